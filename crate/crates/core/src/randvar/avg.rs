//! Linear combinations of approximate expectations and greedy seed fixing.

use super::{approx_expectation, RandomVariable};
use crate::error::{ApxError, Result};
use crate::oracle::{CountingOracle, Precision};
use crate::scalar::{l1_norm, Scalar};

/// `μ = Σ λᵢ 𝔼_δ[Xᵢ]` over variables sharing one seed length.
#[derive(Clone, Debug)]
pub struct LinearCombination<T> {
    seed_len: usize,
    vars: Vec<RandomVariable<T>>,
    coeffs: Vec<T>,
}

impl<T: Scalar> LinearCombination<T> {
    pub fn new(seed_len: usize, vars: Vec<RandomVariable<T>>, coeffs: Vec<T>) -> Result<Self> {
        if vars.len() != coeffs.len() {
            return Err(ApxError::LengthMismatch { expected: vars.len(), got: coeffs.len() });
        }
        if let Some(v) = vars.iter().find(|v| v.seed_len() != seed_len) {
            return Err(ApxError::LengthMismatch { expected: seed_len, got: v.seed_len() });
        }
        Ok(LinearCombination { seed_len, vars, coeffs })
    }

    pub fn seed_len(&self) -> usize {
        self.seed_len
    }

    pub fn vars(&self) -> &[RandomVariable<T>] {
        &self.vars
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// `‖λ‖ = Σ|λᵢ|`.
    pub fn coeff_norm(&self) -> T {
        l1_norm(&self.coeffs)
    }

    /// Norm of the union of the supports.
    pub fn support_norm(&self) -> T {
        let mut all: Vec<T> = self.vars.iter().flat_map(|v| v.support().iter().cloned()).collect();
        all.sort_by(|a, b| a.partial_cmp(b).expect("comparable"));
        all.dedup();
        l1_norm(&all)
    }

    pub fn value(&self, oracle: &dyn CountingOracle<T>, delta: Precision) -> Result<T> {
        let mut mu = T::zero();
        for (x, l) in self.vars.iter().zip(&self.coeffs) {
            mu = mu + l.clone() * approx_expectation(x, oracle, delta)?;
        }
        Ok(mu)
    }

    /// Every variable restricted to the seed suffix `z`.
    pub fn restrict_suffix(&self, z: &[bool]) -> Result<Self> {
        if z.len() > self.seed_len {
            return Err(ApxError::OutOfRange(format!("suffix {} of {} seed bits", z.len(), self.seed_len)));
        }
        Ok(LinearCombination {
            seed_len: self.seed_len - z.len(),
            vars: self.vars.iter().map(|v| v.restrict_suffix(z)).collect::<Result<_>>()?,
            coeffs: self.coeffs.clone(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct AvgSamplerRun<T> {
    /// Fixed suffix of the seed, leftmost bit chosen last.
    pub z: Vec<bool>,
    /// `μ` before fixing anything.
    pub initial: T,
    /// `μ|_z` after each greedy step.
    pub path: Vec<T>,
}

impl<T: Scalar> AvgSamplerRun<T> {
    pub fn final_value(&self) -> T {
        self.path.last().cloned().unwrap_or_else(|| self.initial.clone())
    }
}

/// Builds a seed suffix of length `k` one bit at a time, prepending the bit
/// `b` that maximizes `μ|_{b∘z}` (ties to 0).
pub fn avg_sampler<T: Scalar>(
    l: &LinearCombination<T>,
    k: usize,
    oracle: &dyn CountingOracle<T>,
    delta: Precision,
) -> Result<AvgSamplerRun<T>> {
    if k > l.seed_len() {
        return Err(ApxError::OutOfRange(format!("suffix length {k} of {} seed bits", l.seed_len())));
    }
    let initial = l.value(oracle, delta)?;
    let mut z: Vec<bool> = Vec::with_capacity(k);
    let mut path = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<(bool, T)> = None;
        for b in [false, true] {
            let mut cand = Vec::with_capacity(z.len() + 1);
            cand.push(b);
            cand.extend_from_slice(&z);
            let v = l.restrict_suffix(&cand)?.value(oracle, delta)?;
            if best.as_ref().is_none_or(|(_, bv)| v > *bv) {
                best = Some((b, v));
            }
        }
        let (b, v) = best.expect("two candidates");
        z.insert(0, b);
        path.push(v);
    }
    Ok(AvgSamplerRun { z, initial, path })
}
