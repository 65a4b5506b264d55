//! Implementations of the approximate-counting symbol `𝐏(C, Δ)`.

mod axioms;
mod dist;

pub use axioms::{
    check_axioms, find_local_violation, Axiom, AxiomReport, BiasedOracle, DescentViolation, QueryTrace, TraceEntry,
    TracingOracle, Violation,
};
pub use dist::FlatDistribution;

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::marker::PhantomData;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, DEFAULT_CAP};
use crate::error::{ApxError, Result};
use crate::scalar::Scalar;

/// Identifier of the pseudorandom stream used by every seeded procedure.
pub const PRNG_ALGORITHM: &str = "chacha20";

/// Precision parameter carried as `δ⁻¹ ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Precision {
    inverse: u64,
}

impl Precision {
    pub fn new(inverse: u64) -> Result<Self> {
        if inverse == 0 {
            return Err(ApxError::InvalidParameter("precision inverse must be at least 1".into()));
        }
        Ok(Precision { inverse })
    }

    pub fn inverse(self) -> u64 {
        self.inverse
    }

    /// `δ = 1/inverse`.
    pub fn value<T: Scalar>(self) -> T {
        T::from_ratio(1, self.inverse)
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1/{}", self.inverse)
    }
}

/// A procedure answering acceptance-probability queries.
pub trait CountingOracle<T: Scalar>: Send + Sync {
    /// Probability that a single-output circuit accepts a uniform input, to precision `delta`.
    fn query(&self, c: &Circuit, delta: Precision) -> Result<T>;

    /// True when every answer is the exact acceptance probability; slackened
    /// bounds then evaluate their `δ` and `β` terms at 0.
    fn is_exact(&self) -> bool {
        false
    }

    fn name(&self) -> String;
}

/// The `δ` a bound should use with this oracle: 0 for exact oracles.
pub fn effective<T: Scalar>(oracle: &dyn CountingOracle<T>, p: Precision) -> T {
    if oracle.is_exact() {
        T::zero()
    } else {
        p.value()
    }
}

/// `|{x : c(x)=1}| / 2ⁿ` by exhaustive enumeration.
pub fn exact_count(c: &Circuit, cap: usize) -> Result<BigRational> {
    let hits = c.count_accepting(cap)?;
    Ok(BigRational::new(BigInt::from(hits), BigInt::one() << c.num_inputs()))
}

/// Exhaustive counting, valid up to `cap` input bits.
#[derive(Clone, Debug)]
pub struct ExactOracle<T> {
    cap: usize,
    _scalar: PhantomData<fn() -> T>,
}

impl<T> ExactOracle<T> {
    pub fn new(cap: usize) -> Self {
        ExactOracle { cap, _scalar: PhantomData }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }
}

impl<T> Default for ExactOracle<T> {
    fn default() -> Self {
        ExactOracle::new(DEFAULT_CAP)
    }
}

impl<T: Scalar> CountingOracle<T> for ExactOracle<T> {
    fn query(&self, c: &Circuit, _delta: Precision) -> Result<T> {
        Ok(T::from_rational(&exact_count(c, self.cap)?))
    }

    fn is_exact(&self) -> bool {
        T::EXACT
    }

    fn name(&self) -> String {
        "exact".into()
    }
}

/// Sample size `⌈ln(2/γ)·inverse²/2⌉` of the Hoeffding estimate.
pub fn sample_size(delta: Precision, gamma: f64) -> u64 {
    let inv = delta.inverse() as f64;
    ((2.0 / gamma).ln() * inv * inv / 2.0).ceil().max(1.0) as u64
}

/// Monte-Carlo estimate of the acceptance probability from a seeded stream.
/// Syntactically constant circuits are answered exactly.
pub fn sample_count(c: &Circuit, delta: Precision, gamma: f64, seed: u64) -> Result<BigRational> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(ApxError::InvalidParameter(format!("failure probability {gamma} outside (0,1)")));
    }
    if let Some(b) = c.is_syntactically_constant()? {
        return Ok(BigRational::from_integer(BigInt::from(b as u8)));
    }
    let n = c.num_inputs();
    let samples = sample_size(delta, gamma);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut inputs = vec![0u64; n];
    let mut buf = Vec::with_capacity(c.size());
    let out = c.outputs()[0];
    let mut hits = 0u64;
    let mut left = samples;
    while left > 0 {
        for w in inputs.iter_mut() {
            *w = rng.next_u64();
        }
        c.eval_words_into(&inputs, &mut buf);
        let lanes = left.min(64);
        let mask = if lanes == 64 { !0 } else { (1u64 << lanes) - 1 };
        hits += (buf[out] & mask).count_ones() as u64;
        left -= lanes;
    }
    Ok(BigRational::new(BigInt::from(hits), BigInt::from(samples)))
}

/// Sampling oracle: each query uses a stream derived from the base seed, the
/// circuit and the precision, so repeated queries are reproducible.
#[derive(Clone, Debug)]
pub struct SamplingOracle<T> {
    gamma: f64,
    seed: u64,
    _scalar: PhantomData<fn() -> T>,
}

impl<T> SamplingOracle<T> {
    pub fn new(gamma: f64, seed: u64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(ApxError::InvalidParameter(format!("failure probability {gamma} outside (0,1)")));
        }
        Ok(SamplingOracle { gamma, seed, _scalar: PhantomData })
    }

    pub fn query_seed(&self, c: &Circuit, delta: Precision) -> u64 {
        let mut h = DefaultHasher::new();
        self.seed.hash(&mut h);
        c.hash(&mut h);
        delta.hash(&mut h);
        h.finish()
    }
}

impl<T: Scalar> CountingOracle<T> for SamplingOracle<T> {
    fn query(&self, c: &Circuit, delta: Precision) -> Result<T> {
        c.expect_single_output()?;
        Ok(T::from_rational(&sample_count(c, delta, self.gamma, self.query_seed(c, delta))?))
    }

    fn name(&self) -> String {
        "sample".into()
    }
}

/// `Pr_{u←D}[c(u_{≤t})]` for a circuit on `t ≤ k` inputs.
pub fn empirical_count(c: &Circuit, d: &FlatDistribution) -> Result<BigRational> {
    c.expect_single_output()?;
    let t = c.num_inputs();
    if t > d.n() {
        return Err(ApxError::OutOfRange(format!("circuit reads {t} bits of {}-bit strings", d.n())));
    }
    let mut hits = 0u64;
    let mut inputs = vec![0u64; t];
    let mut buf = Vec::with_capacity(c.size());
    let out = c.outputs()[0];
    for chunk in d.strings().chunks(64) {
        for (i, w) in inputs.iter_mut().enumerate() {
            *w = chunk.iter().enumerate().fold(0u64, |acc, (j, s)| acc | ((s[i] as u64) << j));
        }
        c.eval_words_into(&inputs, &mut buf);
        let mask = if chunk.len() == 64 { !0 } else { (1u64 << chunk.len()) - 1 };
        hits += (buf[out] & mask).count_ones() as u64;
    }
    Ok(BigRational::new(BigInt::from(hits), BigInt::from(d.len() as u64)))
}

/// The oracle induced by a flat distribution; answers ignore the precision.
#[derive(Clone, Debug)]
pub struct EmpiricalOracle<T> {
    dist: FlatDistribution,
    _scalar: PhantomData<fn() -> T>,
}

impl<T> EmpiricalOracle<T> {
    pub fn new(dist: FlatDistribution) -> Self {
        EmpiricalOracle { dist, _scalar: PhantomData }
    }

    pub fn distribution(&self) -> &FlatDistribution {
        &self.dist
    }
}

impl<T: Scalar> CountingOracle<T> for EmpiricalOracle<T> {
    fn query(&self, c: &Circuit, _delta: Precision) -> Result<T> {
        Ok(T::from_rational(&empirical_count(c, &self.dist)?))
    }

    fn name(&self) -> String {
        "empirical".into()
    }
}

impl<T: Scalar, O: CountingOracle<T> + ?Sized> CountingOracle<T> for &O {
    fn query(&self, c: &Circuit, delta: Precision) -> Result<T> {
        (**self).query(c, delta)
    }

    fn is_exact(&self) -> bool {
        (**self).is_exact()
    }

    fn name(&self) -> String {
        (**self).name()
    }
}
