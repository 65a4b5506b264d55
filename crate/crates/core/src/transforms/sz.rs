//! Polynomials over prime fields and the Schwartz–Zippel zero-fraction check.

use serde::{Deserialize, Serialize};

use crate::bits::{ceil_log2, check_cap, index_to_bits, Bits};
use crate::circuit::{Builder, Circuit};
use crate::error::{ApxError, Result};
use crate::oracle::{effective, CountingOracle, Precision};
use crate::scalar::Scalar;

/// A monomial `coeff · Π xⱼ^{exps[j]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: u64,
    pub exps: Vec<u32>,
}

/// Polynomial over `𝔽_p` in `m` variables with an evaluation circuit over
/// field-element encodings: each coordinate is `⌈log₂ p⌉` bits, least
/// significant first; encodings `≥ p` are not field elements.
#[derive(Clone, Debug)]
pub struct FieldPoly {
    p: u64,
    m: usize,
    d: u32,
    terms: Vec<Term>,
    circuit: Circuit,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|k| k * k <= p).all(|k| !p.is_multiple_of(k))
}

fn pow_mod(mut base: u64, mut exp: u32, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

impl FieldPoly {
    pub fn new(p: u64, m: usize, terms: Vec<Term>, cap: usize) -> Result<Self> {
        if !is_prime(p) || p > 1 << 16 {
            return Err(ApxError::InvalidParameter(format!("{p} is not a supported prime")));
        }
        if let Some(t) = terms.iter().find(|t| t.exps.len() != m) {
            return Err(ApxError::LengthMismatch { expected: m, got: t.exps.len() });
        }
        let d = terms.iter().flat_map(|t| t.exps.iter().copied()).max().unwrap_or(0);
        let width = Self::width_of(p);
        check_cap(m * width, cap)?;
        let probe = FieldPoly { p, m, d, terms, circuit: Circuit::null(0) };
        let circuit = Circuit::from_function(m * width, width, cap, |x| match probe.decode_point(x) {
            Some(pt) => index_to_bits(probe.eval(&pt), width),
            None => vec![false; width],
        })?;
        Ok(FieldPoly { circuit, ..probe })
    }

    fn width_of(p: u64) -> usize {
        ceil_log2(p).max(1)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Largest individual degree.
    pub fn d(&self) -> u32 {
        self.d
    }

    /// Bits per field element.
    pub fn width(&self) -> usize {
        Self::width_of(self.p)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn eval(&self, point: &[u64]) -> u64 {
        self.terms.iter().fold(0, |acc, t| {
            let mono =
                t.exps.iter().zip(point).fold(t.coeff % self.p, |a, (&e, &x)| a * pow_mod(x, e, self.p) % self.p);
            (acc + mono) % self.p
        })
    }

    pub fn encode_point(&self, point: &[u64]) -> Bits {
        point.iter().flat_map(|&x| index_to_bits(x, self.width())).collect()
    }

    pub fn decode_point(&self, bits: &[bool]) -> Option<Vec<u64>> {
        bits.chunks(self.width())
            .map(|c| {
                let v = crate::bits::bits_to_index(c);
                (v < self.p).then_some(v)
            })
            .collect()
    }

    /// Accepts encodings whose coordinates are all field elements.
    pub fn validity_circuit(&self) -> Result<Circuit> {
        let w = self.width();
        let lt = Circuit::threshold_less_than(w, self.p as u128)?;
        let mut b = Builder::new(self.m * w);
        let checks = (0..self.m)
            .map(|j| {
                let block = b.inputs(j * w + 1..=j * w + w);
                b.embed_bit(&lt, &block)
            })
            .collect();
        let out = b.and(checks);
        Ok(b.finish_bit(out))
    }

    /// `T_C`: valid encoding and `f = 0`.
    pub fn zero_circuit(&self) -> Result<Circuit> {
        let w = self.width();
        let valid = self.validity_circuit()?;
        let zero = self.circuit.indicator_eq(&vec![false; w])?;
        let mut b = Builder::new(self.m * w);
        let x = b.inputs(1..=self.m * w);
        let v = b.embed_bit(&valid, &x);
        let z = b.embed_bit(&zero, &x);
        let out = b.and(vec![v, z]);
        Ok(b.finish_bit(out))
    }
}

#[derive(Clone, Debug)]
pub struct SzReport<T> {
    /// `𝐏(T_C) / 𝐏(valid)`: zeros among field points.
    pub zero_fraction: T,
    /// `md/p`.
    pub bound: T,
    pub accept_probability: T,
    pub valid_probability: T,
    /// `𝐏(T_C) ≤ (md/p)·𝐏(valid) + 2δ + β`.
    pub pass: bool,
}

pub fn schwartz_zippel_check<T: Scalar>(
    f: &FieldPoly,
    witness: &[u64],
    oracle: &dyn CountingOracle<T>,
    delta: Precision,
    beta: Precision,
) -> Result<SzReport<T>> {
    if witness.len() != f.m() || witness.iter().any(|&x| x >= f.p()) {
        return Err(ApxError::InvalidParameter("witness is not a point of 𝔽_p^m".into()));
    }
    if f.eval(witness) == 0 {
        return Err(ApxError::Precondition("f vanishes at the witness".into()));
    }
    let accept = oracle.query(&f.zero_circuit()?, delta)?;
    let valid = oracle.query(&f.validity_circuit()?, delta)?;
    let bound = T::from_ratio(f.m() as i64 * f.d() as i64, f.p());
    let slack = T::from_count(2) * effective(oracle, delta) + effective::<T>(oracle, beta);
    let pass = accept <= bound.clone() * valid.clone() + slack;
    let zero_fraction = if valid.is_zero() { T::zero() } else { accept.clone() / valid.clone() };
    Ok(SzReport { zero_fraction, bound, accept_probability: accept, valid_probability: valid, pass })
}
