//! Hybrid argument: from a distinguisher of `G`'s output to a next-bit predictor.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::Predictor;
use crate::bits::Bits;
use crate::circuit::{Builder, Circuit};
use crate::error::{ApxError, Result};
use crate::oracle::{effective, CountingOracle, Precision};
use crate::randvar::{avg_sampler, LinearCombination, RandomVariable};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct YaoOutcome<T> {
    pub predictor: Predictor<T>,
    /// `𝐏(C∘G) − 𝐏(C)`.
    pub gap: T,
    /// `|gap| − 2δ`.
    pub epsilon: T,
    /// `𝐏(H₀), …, 𝐏(Hₙ)` with `Hᵢ(u,x) = C(G(u)_{≤i} ∘ x_{>i})`.
    pub hybrids: Vec<T>,
    /// Auxiliary string fixed by greedy seed fixing.
    pub aux: Bits,
    /// True when the hybrid step decreases and the predictor is negated.
    pub negated: bool,
}

/// `Hᵢ` over the `m+n` inputs `(u, x)`.
fn hybrid(g: &Circuit, c: &Circuit, i: usize) -> Circuit {
    let (m, n) = (g.num_inputs(), g.num_outputs());
    let mut b = Builder::new(m + n);
    let u = b.inputs(1..=m);
    let gu = b.embed(g, &u);
    let mut wires: Vec<usize> = gu[..i].to_vec();
    wires.extend((i + 1..=n).map(|j| b.input(m + j)));
    let out = b.embed_bit(c, &wires);
    b.finish_bit(out)
}

/// `T(u,x) = [P_x(G(u)_{<i}) = G(u)_i]` with `P_x(v) = C(v∘x_i∘x_{>i}) ⊕ x_i ⊕ 1 ⊕ negated`.
fn prediction_test(g: &Circuit, c: &Circuit, i: usize, negated: bool) -> Circuit {
    let (m, n) = (g.num_inputs(), g.num_outputs());
    let mut b = Builder::new(m + n);
    let u = b.inputs(1..=m);
    let gu = b.embed(g, &u);
    let mut wires: Vec<usize> = gu[..i - 1].to_vec();
    wires.extend((i..=n).map(|j| b.input(m + j)));
    let cv = b.embed_bit(c, &wires);
    let xi = b.input(m + i);
    let k = b.constant(!negated);
    let pred = b.xor(vec![cv, xi, k]);
    let t = b.eq(pred, gu[i - 1]);
    b.finish_bit(t)
}

/// Exact advantage of predicting `G(u)_i` from `G(u)_{<i}`, over all seeds `u`.
pub fn predictor_advantage_on_seeds(g: &Circuit, index: usize, p: &Circuit, cap: usize) -> Result<BigRational> {
    let m = g.num_inputs();
    let mut b = Builder::new(m);
    let u = b.inputs(1..=m);
    let gu = b.embed(g, &u);
    let guess = b.embed_bit(p, &gu[..index - 1]);
    let hit = b.eq(guess, gu[index - 1]);
    let hits = b.finish_bit(hit).count_accepting(cap)?;
    Ok(BigRational::new(BigInt::from(hits), BigInt::one() << m) - BigRational::new(1.into(), 2.into()))
}

/// Builds a next-bit predictor for `G`'s output from a distinguisher `C`.
///
/// The hybrid index maximizing `|𝐏(Hᵢ) − 𝐏(H_{i−1})|` is chosen (first on ties),
/// the auxiliary string `x` is fixed greedily so the test `T` (or `¬T` when the
/// step is negative) keeps its probability, and the returned advantage is
/// measured exhaustively over the seeds of `G`.
pub fn yao_predictor<T: Scalar>(
    g: &Circuit,
    c: &Circuit,
    oracle: &dyn CountingOracle<T>,
    delta: Precision,
    cap: usize,
) -> Result<YaoOutcome<T>> {
    c.expect_single_output()?;
    let n = g.num_outputs();
    if c.num_inputs() != n {
        return Err(ApxError::ArityMismatch(format!(
            "generator outputs {n} bits, distinguisher reads {}",
            c.num_inputs()
        )));
    }
    let gap = oracle.query(&c.compose(g)?, delta)? - oracle.query(c, delta)?;
    let d: T = effective(oracle, delta);
    let two = T::one() + T::one();
    let threshold = two * d;
    if gap.abs() <= threshold {
        return Err(ApxError::InsufficientAdvantage { gap: gap.to_text(), threshold: threshold.to_text() });
    }
    let epsilon = gap.abs() - threshold;
    let hybrids = (0..=n).map(|i| oracle.query(&hybrid(g, c, i), delta)).collect::<Result<Vec<T>>>()?;
    let mut best = 1;
    for i in 2..=n {
        if (hybrids[i].clone() - hybrids[i - 1].clone()).abs()
            > (hybrids[best].clone() - hybrids[best - 1].clone()).abs()
        {
            best = i;
        }
    }
    let negated = hybrids[best] < hybrids[best - 1];
    let test = prediction_test(g, c, best, negated);
    let combo = LinearCombination::new(test.num_inputs(), vec![RandomVariable::indicator(&test)?], vec![T::one()])?;
    let aux = avg_sampler(&combo, n, oracle, delta)?.z;
    let tail = c.fix_suffix(&aux[best - 1..])?;
    let flip = !aux[best - 1] ^ negated;
    let mut b = Builder::new(best - 1);
    let v = b.inputs(1..=best - 1);
    let cv = b.embed_bit(&tail, &v);
    let out = if flip { b.not(cv) } else { cv };
    let circuit = b.finish_bit(out);
    let advantage = T::from_rational(&predictor_advantage_on_seeds(g, best, &circuit, cap)?);
    Ok(YaoOutcome { predictor: Predictor { index: best, circuit, advantage }, gap, epsilon, hybrids, aux, negated })
}
