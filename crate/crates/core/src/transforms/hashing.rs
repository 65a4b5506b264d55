//! Universality of linear hashing over `𝔽₂`.

use crate::bits::expect_len;
use crate::circuit::{Builder, Circuit};
use crate::error::{ApxError, Result};
use crate::oracle::{effective, CountingOracle, Precision};
use crate::scalar::{powi, Scalar};

/// `[Ax = Ay]` over the `nm` entries of `A ∈ 𝔽₂^{m×n}`, row-major
/// (entry `(r, c)` is input `rn + c + 1`).
pub fn linear_hash_collision_circuit(n: usize, m: usize, x: &[bool], y: &[bool]) -> Result<Circuit> {
    expect_len(x, n)?;
    expect_len(y, n)?;
    let mut b = Builder::new(n * m);
    let rows = (0..m)
        .map(|r| {
            let diff = (0..n).filter(|&c| x[c] != y[c]).map(|c| b.input(r * n + c + 1)).collect();
            let s = b.xor(diff);
            b.not(s)
        })
        .collect();
    let out = b.and(rows);
    Ok(b.finish_bit(out))
}

#[derive(Clone, Debug)]
pub struct HashReport<T> {
    pub probability: T,
    /// `δ + β + (1/2 + β)^m`.
    pub bound: T,
    pub pass: bool,
}

pub fn linear_hash_collision_bound<T: Scalar>(
    n: usize,
    m: usize,
    x: &[bool],
    y: &[bool],
    oracle: &dyn CountingOracle<T>,
    delta: Precision,
    beta: Precision,
) -> Result<HashReport<T>> {
    if x == y {
        return Err(ApxError::InvalidParameter("x and y must differ".into()));
    }
    let probability = oracle.query(&linear_hash_collision_circuit(n, m, x, y)?, delta)?;
    let d: T = effective(oracle, delta);
    let b: T = effective(oracle, beta);
    let bound = d + b.clone() + powi(&(T::from_ratio(1, 2) + b), m as u32);
    Ok(HashReport { pass: probability <= bound, probability, bound })
}
