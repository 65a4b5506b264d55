//! Feasible random variables: an explicit support, a seed length and a sampler
//! circuit whose output code selects a support value.

mod avg;
mod inequalities;
mod suite;

pub use avg::{avg_sampler, AvgSamplerRun, LinearCombination};
pub use inequalities::{verify_inequality, Inequality, InequalityReport, CHERNOFF_MAX_M};
pub use suite::{inequality_suite, random_variable};

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::bits::{index_to_bits, Bits};
use crate::circuit::{Builder, Circuit};
use crate::error::{ApxError, Result};
use crate::oracle::{CountingOracle, Precision};
use crate::scalar::{l1_norm, Scalar};

/// Number of random seeds checked when the seed space exceeds the cap.
const SPOT_CHECKS: usize = 1000;

#[derive(Clone, Debug)]
pub struct RandomVariable<T> {
    seed_len: usize,
    sampler: Circuit,
    /// Output code (output `j` at bit `j`) and the value it denotes; codes distinct.
    table: Vec<(u64, T)>,
    /// Sorted, deduplicated, contains every table value.
    support: Vec<T>,
}

fn sort_dedup<T: Scalar>(mut v: Vec<T>) -> Vec<T> {
    v.sort_by(|a, b| a.partial_cmp(b).expect("support values are comparable"));
    v.dedup();
    v
}

/// Value of the dyadic encoding `Σ xᵢ2^{i−1} + Σ y_j2^{−j}` of `bits = x∘y`.
pub fn decode_dyadic(bits: &[bool], int_bits: usize) -> BigRational {
    let frac_bits = bits.len() - int_bits;
    let mut num = BigInt::zero();
    for (i, &b) in bits[..int_bits].iter().enumerate() {
        if b {
            num += BigInt::one() << (i + frac_bits);
        }
    }
    for (j, &b) in bits[int_bits..].iter().enumerate() {
        if b {
            num += BigInt::one() << (frac_bits - 1 - j);
        }
    }
    BigRational::new(num, BigInt::one() << frac_bits)
}

/// Inverse of [`decode_dyadic`]; `None` when `v` has no such encoding.
pub fn encode_dyadic(v: &BigRational, int_bits: usize, frac_bits: usize) -> Option<Bits> {
    let scaled = v * BigRational::from_integer(BigInt::one() << frac_bits);
    if !scaled.is_integer() || scaled < BigRational::zero() {
        return None;
    }
    let k = scaled.to_integer();
    if k >= BigInt::one() << (int_bits + frac_bits) {
        return None;
    }
    let total = int_bits + frac_bits;
    let bit = |p: usize| (&k >> p) & BigInt::one() == BigInt::one();
    let mut out: Bits = (0..int_bits).map(|i| bit(i + frac_bits)).collect();
    out.extend((0..frac_bits).map(|j| bit(frac_bits - 1 - j)));
    debug_assert_eq!(out.len(), total);
    Some(out)
}

fn code_of(bits: &[bool]) -> u64 {
    crate::bits::bits_to_index(bits)
}

impl<T: Scalar> RandomVariable<T> {
    /// Validates that every seed maps to a tabulated code (exhaustively when
    /// `seed_len ≤ cap`, else on 1000 seeded spot checks).
    pub fn from_table(sampler: Circuit, table: Vec<(u64, T)>, support: Vec<T>, cap: usize) -> Result<Self> {
        if sampler.num_outputs() > 64 {
            return Err(ApxError::InvalidParameter("samplers have at most 64 outputs".into()));
        }
        let mut seen = HashMap::new();
        for (k, (code, _)) in table.iter().enumerate() {
            if seen.insert(*code, k).is_some() {
                return Err(ApxError::InvalidParameter(format!("code {code} appears twice")));
            }
        }
        let support = sort_dedup(support);
        if let Some((_, v)) = table.iter().find(|(_, v)| !support.contains(v)) {
            return Err(ApxError::InvalidParameter(format!("value {v:?} is outside the support")));
        }
        let rv = RandomVariable { seed_len: sampler.num_inputs(), sampler, table, support };
        rv.validate(&seen, cap)?;
        Ok(rv)
    }

    fn validate(&self, known: &HashMap<u64, usize>, cap: usize) -> Result<()> {
        let n = self.seed_len;
        let bad = |code: u64, seed: &[bool]| {
            ApxError::InvalidParameter(format!(
                "seed {} yields output code {code} outside the support",
                crate::bits::format_bits(seed)
            ))
        };
        if n <= cap {
            for (idx, code) in self.sampler.output_codes(cap)?.into_iter().enumerate() {
                if !known.contains_key(&code) {
                    return Err(bad(code, &index_to_bits(idx as u64, n)));
                }
            }
        } else {
            let mut rng = ChaCha20Rng::seed_from_u64(0);
            for _ in 0..SPOT_CHECKS {
                let seed: Bits = (0..n).map(|_| rng.gen()).collect();
                let code = code_of(&self.sampler.eval(&seed)?);
                if !known.contains_key(&code) {
                    return Err(bad(code, &seed));
                }
            }
        }
        Ok(())
    }

    /// Sampler outputs read as the dyadic encoding with `int_bits` integer bits
    /// followed by fraction bits.
    pub fn from_dyadic(sampler: Circuit, int_bits: usize, support: &[BigRational], cap: usize) -> Result<Self> {
        let width = sampler.num_outputs();
        if int_bits > width {
            return Err(ApxError::InvalidParameter(format!("{int_bits} integer bits of {width} outputs")));
        }
        let table = support
            .iter()
            .map(|v| {
                encode_dyadic(v, int_bits, width - int_bits).map(|b| (code_of(&b), T::from_rational(v))).ok_or_else(
                    || ApxError::InvalidParameter(format!("{v} has no {int_bits}.{} encoding", width - int_bits)),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let values = table.iter().map(|(_, v)| v.clone()).collect();
        RandomVariable::from_table(sampler, table, values, cap)
    }

    /// The constant `v` on `seed_len` seed bits.
    pub fn constant(v: T, seed_len: usize) -> Self {
        RandomVariable { seed_len, sampler: Circuit::null(seed_len), table: vec![(0, v.clone())], support: vec![v] }
    }

    /// The 0/1 indicator of a single-output circuit.
    pub fn indicator(c: &Circuit) -> Result<Self> {
        c.expect_single_output()?;
        Ok(RandomVariable {
            seed_len: c.num_inputs(),
            sampler: c.clone(),
            table: vec![(0, T::zero()), (1, T::one())],
            support: vec![T::zero(), T::one()],
        })
    }

    /// Uniform on `{0, …, 2^bits − 1}` via the identity sampler.
    pub fn uniform_int(bits: usize) -> Self {
        let table: Vec<(u64, T)> = (0..1u64 << bits).map(|k| (k, T::from_count(k))).collect();
        let support = table.iter().map(|(_, v)| v.clone()).collect();
        RandomVariable { seed_len: bits, sampler: Circuit::identity(bits), table, support }
    }

    pub fn seed_len(&self) -> usize {
        self.seed_len
    }

    pub fn sampler(&self) -> &Circuit {
        &self.sampler
    }

    pub fn support(&self) -> &[T] {
        &self.support
    }

    pub fn table(&self) -> &[(u64, T)] {
        &self.table
    }

    /// `‖V‖ = Σ_{v∈V} |v|`.
    pub fn norm(&self) -> T {
        l1_norm(&self.support)
    }

    /// Adds values to the support without changing the sampler.
    pub fn extend_support(&self, extra: &[T]) -> Self {
        let mut s = self.support.clone();
        s.extend_from_slice(extra);
        RandomVariable { support: sort_dedup(s), ..self.clone() }
    }

    /// Value at one seed.
    pub fn value_at(&self, seed: &[bool]) -> Result<T> {
        let code = code_of(&self.sampler.eval(seed)?);
        self.table
            .iter()
            .find(|(c, _)| *c == code)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| ApxError::InvalidParameter(format!("code {code} outside the table")))
    }

    /// Values at every seed in index order.
    pub fn values_all(&self, cap: usize) -> Result<Vec<T>> {
        let lookup: HashMap<u64, &T> = self.table.iter().map(|(c, v)| (*c, v)).collect();
        self.sampler
            .output_codes(cap)?
            .into_iter()
            .map(|c| {
                lookup
                    .get(&c)
                    .map(|v| (*v).clone())
                    .ok_or_else(|| ApxError::InvalidParameter(format!("code {c} outside the table")))
            })
            .collect()
    }

    /// Accepts the seeds whose value satisfies `pred`.
    pub fn event(&self, pred: impl Fn(&T) -> bool) -> Circuit {
        let n = self.seed_len;
        let mut b = Builder::new(n);
        let wires = b.inputs(1..=n);
        let outs = b.embed(&self.sampler, &wires);
        let terms = self
            .table
            .iter()
            .filter(|(_, v)| pred(v))
            .map(|(code, _)| {
                let lits = outs.iter().enumerate().map(|(j, &o)| b.literal(o, (code >> j) & 1 == 1)).collect();
                b.and(lits)
            })
            .collect();
        let out = b.or(terms);
        b.finish_bit(out)
    }

    /// `C_v`: accepts iff the sampled value is `v`.
    pub fn indicator_of(&self, v: &T) -> Circuit {
        self.event(|u| u == v)
    }

    /// `f(X)` with support `f(V)`.
    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        RandomVariable {
            seed_len: self.seed_len,
            sampler: self.sampler.clone(),
            table: self.table.iter().map(|(c, v)| (*c, f(v))).collect(),
            support: sort_dedup(self.support.iter().map(&f).collect()),
        }
    }

    /// `f(X₁,…,X_m)` for variables over the same seed; the support is `f`
    /// applied to the product of supports.
    pub fn combine(vars: &[&RandomVariable<T>], f: impl Fn(&[T]) -> T) -> Result<Self> {
        let first = vars.first().ok_or_else(|| ApxError::InvalidParameter("combine needs a variable".into()))?;
        let n = first.seed_len;
        if let Some(v) = vars.iter().find(|v| v.seed_len != n) {
            return Err(ApxError::LengthMismatch { expected: n, got: v.seed_len });
        }
        let widths: Vec<usize> = vars.iter().map(|v| v.sampler.num_outputs()).collect();
        if widths.iter().sum::<usize>() > 64 {
            return Err(ApxError::InvalidParameter("combined sampler exceeds 64 outputs".into()));
        }
        let mut b = Builder::new(n);
        let wires = b.inputs(1..=n);
        let outs: Vec<usize> = vars.iter().flat_map(|v| b.embed(&v.sampler, &wires)).collect();
        let sampler = b.finish(outs);
        let mut table: Vec<(u64, Vec<T>)> = vec![(0, Vec::new())];
        let mut shift = 0;
        for (v, w) in vars.iter().zip(&widths) {
            table = table
                .into_iter()
                .flat_map(|(code, vals)| {
                    v.table.iter().map(move |(c, x)| {
                        let mut vs = vals.clone();
                        vs.push(x.clone());
                        (code | (c << shift), vs)
                    })
                })
                .collect();
            shift += w;
        }
        let mut supports: Vec<Vec<T>> = vec![Vec::new()];
        for v in vars {
            supports = supports
                .into_iter()
                .flat_map(|vals| {
                    v.support.iter().map(move |x| {
                        let mut vs = vals.clone();
                        vs.push(x.clone());
                        vs
                    })
                })
                .collect();
        }
        Ok(RandomVariable {
            seed_len: n,
            sampler,
            table: table.into_iter().map(|(c, vs)| (c, f(&vs))).collect(),
            support: sort_dedup(supports.iter().map(|vs| f(vs)).collect()),
        })
    }

    /// The same variable reading seed bits `offset+1 ..= offset+seed_len` of a
    /// `total`-bit seed.
    pub fn embed(&self, total: usize, offset: usize) -> Result<Self> {
        if offset + self.seed_len > total {
            return Err(ApxError::OutOfRange(format!("block at {offset} of {total} bits")));
        }
        let sampler = self.sampler.map_inputs(total, |i| crate::circuit::InputSub::Input(offset + i));
        Ok(RandomVariable { seed_len: total, sampler, ..self.clone() })
    }

    /// `m` explicitly independent copies on disjoint seed blocks.
    pub fn iid(&self, m: usize) -> Result<Vec<Self>> {
        (0..m).map(|j| self.embed(m * self.seed_len, j * self.seed_len)).collect()
    }

    /// `X|_z`: the rightmost `|z|` seed bits fixed to `z`.
    pub fn restrict_suffix(&self, z: &[bool]) -> Result<Self> {
        let sampler = self.sampler.fix_suffix(z)?;
        Ok(RandomVariable { seed_len: sampler.num_inputs(), sampler, ..self.clone() })
    }
}

/// `𝔼_δ[X] = Σ_{v∈V} v·𝐏(C_v, Δ)`.
pub fn approx_expectation<T: Scalar>(
    x: &RandomVariable<T>,
    oracle: &dyn CountingOracle<T>,
    delta: Precision,
) -> Result<T> {
    let mut total = T::zero();
    for v in x.support() {
        if v.is_zero() {
            continue;
        }
        total = total + v.clone() * oracle.query(&x.indicator_of(v), delta)?;
    }
    Ok(total)
}

/// `Var_δ[X] = 𝔼_δ[(X−μ)²]` with `μ = 𝔼_δ[X]`.
pub fn variance<T: Scalar>(x: &RandomVariable<T>, oracle: &dyn CountingOracle<T>, delta: Precision) -> Result<T> {
    let mu = approx_expectation(x, oracle, delta)?;
    let centered = x.map(|v| (v.clone() - mu.clone()) * (v.clone() - mu.clone()));
    approx_expectation(&centered, oracle, delta)
}

/// `|𝔼_δ[XY] − 𝔼_δ[X]·𝔼_δ[Y]|` for variables over one seed.
pub fn covariance<T: Scalar>(
    x: &RandomVariable<T>,
    y: &RandomVariable<T>,
    oracle: &dyn CountingOracle<T>,
    delta: Precision,
) -> Result<T> {
    let xy = RandomVariable::combine(&[x, y], |v| v[0].clone() * v[1].clone())?;
    let exy = approx_expectation(&xy, oracle, delta)?;
    let ex = approx_expectation(x, oracle, delta)?;
    let ey = approx_expectation(y, oracle, delta)?;
    Ok((exy - ex * ey).abs())
}
