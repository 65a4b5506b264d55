//! One-way randomized protocols and their worst-case error.

use serde::{Deserialize, Serialize};

use crate::bits::{check_cap, index_to_bits, Bits};
use crate::circuit::{Builder, Circuit};
use crate::error::{ApxError, Result};
use crate::oracle::{CountingOracle, Precision};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolMode {
    /// Bob sees the shared seed.
    Public,
    /// Only Alice is randomized; Bob's seed inputs are `0^r`.
    Private,
}

/// Alice sends `g_A(x, sd)` (`n+r → m`); Bob outputs `d_B(y, msg, sd)` (`n+m+r → 1`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OneWayProtocol {
    pub mode: ProtocolMode,
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub alice: Circuit,
    pub bob: Circuit,
}

impl OneWayProtocol {
    pub fn new(mode: ProtocolMode, n: usize, m: usize, r: usize, alice: Circuit, bob: Circuit) -> Result<Self> {
        let p = OneWayProtocol { mode, n, m, r, alice, bob };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alice.num_inputs() != self.n + self.r || self.alice.num_outputs() != self.m {
            return Err(ApxError::ArityMismatch(format!(
                "message circuit is {}→{}, expected {}→{}",
                self.alice.num_inputs(),
                self.alice.num_outputs(),
                self.n + self.r,
                self.m
            )));
        }
        if self.bob.num_inputs() != self.n + self.m + self.r || self.bob.num_outputs() != 1 {
            return Err(ApxError::ArityMismatch(format!(
                "decision circuit is {}→{}, expected {}→1",
                self.bob.num_inputs(),
                self.bob.num_outputs(),
                self.n + self.m + self.r
            )));
        }
        Ok(())
    }

    /// Alice sends `x`; Bob evaluates `f(msg, y)` directly.
    pub fn trivial(n: usize, f: &Circuit) -> Result<Self> {
        if f.num_inputs() != 2 * n {
            return Err(ApxError::ArityMismatch(format!("target reads {} bits, expected {}", f.num_inputs(), 2 * n)));
        }
        let alice = Circuit::identity(n);
        let mut b = Builder::new(2 * n);
        let y = b.inputs(1..=n);
        let msg = b.inputs(n + 1..=2 * n);
        let wires: Vec<usize> = msg.into_iter().chain(y).collect();
        let out = b.embed_bit(f, &wires);
        OneWayProtocol::new(ProtocolMode::Public, n, n, 0, alice, b.finish_bit(out))
    }

    /// Public-coin Equality: the seed is `A ∈ 𝔽₂^{m×n}` (row-major), Alice
    /// sends `Ax` and Bob accepts iff `Ay = Ax`.
    pub fn equality(n: usize, m: usize) -> Result<Self> {
        let r = n * m;
        let hash = |b: &mut Builder, v: &[usize], a_off: usize| -> Vec<usize> {
            (0..m)
                .map(|row| {
                    let terms = (0..n)
                        .map(|c| {
                            let a = b.input(a_off + row * n + c + 1);
                            b.and(vec![v[c], a])
                        })
                        .collect();
                    b.xor(terms)
                })
                .collect()
        };
        let mut ba = Builder::new(n + r);
        let x = ba.inputs(1..=n);
        let msg = hash(&mut ba, &x, n);
        let alice = ba.finish(msg);
        let mut bb = Builder::new(n + m + r);
        let y = bb.inputs(1..=n);
        let got = bb.inputs(n + 1..=n + m);
        let want = hash(&mut bb, &y, n + m);
        let eqs = got.iter().zip(&want).map(|(&g, &w)| bb.eq(g, w)).collect();
        let out = bb.and(eqs);
        OneWayProtocol::new(ProtocolMode::Public, n, m, r, alice, bb.finish_bit(out))
    }

    /// Error event over the seed for one input pair.
    pub fn error_circuit(&self, x: &[bool], y: &[bool], fxy: bool) -> Result<Circuit> {
        crate::bits::expect_len(x, self.n)?;
        crate::bits::expect_len(y, self.n)?;
        let mut b = Builder::new(self.r);
        let sd = b.inputs(1..=self.r);
        let mut aw: Vec<usize> = x.iter().map(|&v| b.constant(v)).collect();
        aw.extend(&sd);
        let msg = b.embed(&self.alice, &aw);
        let mut bw: Vec<usize> = y.iter().map(|&v| b.constant(v)).collect();
        bw.extend(msg);
        match self.mode {
            ProtocolMode::Public => bw.extend(&sd),
            ProtocolMode::Private => {
                let zero = b.constant(false);
                bw.extend(std::iter::repeat_n(zero, self.r));
            }
        }
        let out = b.embed_bit(&self.bob, &bw);
        let k = b.constant(fxy);
        let err = b.xor(vec![out, k]);
        Ok(b.finish_bit(err))
    }
}

/// `[x = y]` over `2n` inputs.
pub fn equality_function(n: usize) -> Circuit {
    let mut b = Builder::new(2 * n);
    let eqs = (1..=n)
        .map(|i| {
            let (p, q) = (b.input(i), b.input(n + i));
            b.eq(p, q)
        })
        .collect();
    let out = b.and(eqs);
    b.finish_bit(out)
}

#[derive(Clone, Debug)]
pub struct ProtocolReport<T> {
    pub max_error: T,
    pub worst_x: Bits,
    pub worst_y: Bits,
    pub pairs: usize,
}

/// Maximum error probability over all input pairs (first maximum in index order).
pub fn simulate_protocol<T: Scalar>(
    p: &OneWayProtocol,
    f: &Circuit,
    oracle: &dyn CountingOracle<T>,
    delta: Precision,
    cap: usize,
) -> Result<ProtocolReport<T>> {
    p.validate()?;
    if f.num_inputs() != 2 * p.n {
        return Err(ApxError::ArityMismatch(format!("target reads {} bits, expected {}", f.num_inputs(), 2 * p.n)));
    }
    check_cap(2 * p.n, cap)?;
    let mut best: Option<(T, Bits, Bits)> = None;
    let mut pairs = 0;
    for xi in 0..1u64 << p.n {
        for yi in 0..1u64 << p.n {
            let (x, y) = (index_to_bits(xi, p.n), index_to_bits(yi, p.n));
            let xy: Bits = x.iter().chain(&y).copied().collect();
            let fxy = f.eval_bit(&xy)?;
            let e = oracle.query(&p.error_circuit(&x, &y, fxy)?, delta)?;
            pairs += 1;
            if best.as_ref().is_none_or(|(b, _, _)| e > *b) {
                best = Some((e, x, y));
            }
        }
    }
    let (max_error, worst_x, worst_y) = best.expect("at least one pair");
    Ok(ProtocolReport { max_error, worst_x, worst_y, pairs })
}
