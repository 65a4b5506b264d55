//! Seeded generators of random variables and of one instance of every
//! inequality with its hypotheses satisfied by construction.

use rand::Rng;

use super::{approx_expectation, variance, Inequality, RandomVariable};
use crate::circuit::{Builder, Circuit};
use crate::error::{ApxError, Result};
use crate::oracle::{ExactOracle, Precision};
use crate::scalar::{powi, Scalar};

/// Random sampler with `out_bits` outputs; every code gets a value `a/q` with
/// `q ∈ 1..=4` and `a ∈ −4..=8` (`0..=8` when `nonneg`).
pub fn random_variable<T: Scalar, R: Rng + ?Sized>(
    seed_len: usize,
    out_bits: usize,
    nonneg: bool,
    rng: &mut R,
    cap: usize,
) -> Result<RandomVariable<T>> {
    let sampler = Circuit::random(seed_len, out_bits, 3 * seed_len + 4, rng);
    let lo = if nonneg { 0 } else { -4 };
    let table: Vec<(u64, T)> =
        (0..1u64 << out_bits).map(|c| (c, T::from_ratio(rng.gen_range(lo..=8), rng.gen_range(1..=4)))).collect();
    let support = table.iter().map(|(_, v)| v.clone()).collect();
    RandomVariable::from_table(sampler, table, support, cap)
}

/// One instance of each of the ten inequalities over seeds of `seed_len`
/// bits, with `chernoff_m` copies in the Chernoff instance.
pub fn inequality_suite<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    seed_len: usize,
    chernoff_m: usize,
    delta: Precision,
    beta: Precision,
    cap: usize,
) -> Result<Vec<Inequality<T>>> {
    if seed_len < 2 {
        return Err(ApxError::InvalidParameter("the suite needs at least 2 seed bits".into()));
    }
    let exact = ExactOracle::<T>::new(cap);
    let n = seed_len;
    let size = 3 * n + 4;
    let mut out = Vec::with_capacity(10);

    let c1 = Circuit::random(n, 1, size, rng);
    out.push(Inequality::Complementation { c2: c1.negate(), c1 });

    let x1 = random_variable::<T, R>(n, 2, false, rng, cap)?;
    let x2 = random_variable(n, 2, false, rng, cap)?;
    let coeffs = vec![T::from_ratio(rng.gen_range(-3..=3), 2), T::from_ratio(rng.gen_range(-3..=3), 2)];
    let gamma = T::from_ratio(rng.gen_range(-2..=2), 3);
    let (l0, l1, g0) = (coeffs[0].clone(), coeffs[1].clone(), gamma.clone());
    let y = RandomVariable::combine(&[&x1, &x2], move |v| {
        g0.clone() + l0.clone() * v[0].clone() + l1.clone() * v[1].clone()
    })?;
    out.push(Inequality::Linearity { y, vars: vec![x1, x2], coeffs, gamma });

    let events: Vec<Circuit> = (0..3).map(|_| Circuit::random(n, 1, size, rng)).collect();
    let r = Circuit::random(n, 1, size, rng);
    let mut b = Builder::new(n);
    let w = b.inputs(1..=n);
    let e = b.embed_bit(&events[rng.gen_range(0..events.len())], &w);
    let ro = b.embed_bit(&r, &w);
    let s = b.and(vec![e, ro]);
    out.push(Inequality::UnionBound { s: b.finish_bit(s), events });

    let x = random_variable::<T, R>(n, 2, true, rng, cap)?;
    let ex = approx_expectation(&x, &exact, delta)?;
    let mu = if ex > T::zero() { ex } else { T::from_ratio(1, 4) };
    out.push(Inequality::Markov { x, mu, k: T::from_ratio(rng.gen_range(3..=8), 2) });

    out.push(Inequality::VarianceIdentity { x: random_variable(n, 2, false, rng, cap)? });

    let mut tries = 0;
    let x = loop {
        let x = random_variable::<T, R>(n, 2, false, rng, cap)?;
        if variance(&x, &exact, delta)? > T::zero() {
            break x;
        }
        tries += 1;
        if tries > 100 {
            return Err(ApxError::InvalidParameter("no positive-variance variable in 100 draws".into()));
        }
    };
    out.push(Inequality::Chebyshev { x, k: T::from_ratio(rng.gen_range(2..=8), 2) });

    let vars = (0..3).map(|_| random_variable(n, 1, false, rng, cap)).collect::<Result<Vec<_>>>()?;
    out.push(Inequality::PairwiseSum { vars, eps: None });

    let half = n / 2;
    out.push(Inequality::Multiplication {
        x1: random_variable(half, 1, false, rng, cap)?,
        x2: random_variable(n - half, 1, false, rng, cap)?,
    });

    // An OR of three circuits rarely rejects; the k-fold OR reads k·n' ≤ n bits.
    let k = rng.gen_range(2..=3);
    let n1 = (n / k).max(1);
    let parts: Vec<Circuit> = (0..3).map(|_| Circuit::random(n1, 1, 3 * n1 + 4, rng)).collect();
    let mut b = Builder::new(n1);
    let w = b.inputs(1..=n1);
    let outs = parts.iter().map(|p| b.embed_bit(p, &w)).collect();
    let any = b.or(outs);
    let c = b.finish_bit(any);
    let eps = approx_expectation(&RandomVariable::indicator(&c.negate())?, &exact, delta)?;
    let slack = delta.value::<T>() + beta.value::<T>();
    let gamma = powi(&(slack.clone() + eps.clone()), k as u32) + slack;
    out.push(Inequality::OneSided { c, k, eps, gamma });

    let m = chernoff_m.max(1);
    let s = if 2 * m <= cap.min(12) { 2 } else { 1 };
    // k ≥ (1+t)pm must fit below m, so p ≤ 2/3; fall back to a fair bit.
    let t = T::from_ratio(1, 2);
    let mut x = RandomVariable::indicator(&Circuit::projection(s, 1)?)?;
    for _ in 0..20 {
        let cand = RandomVariable::indicator(&Circuit::random(s, 1, 4, rng))?;
        if approx_expectation(&cand, &exact, delta)? <= T::from_ratio(2, 3) {
            x = cand;
            break;
        }
    }
    let p = approx_expectation(&x, &exact, delta)?;
    let floor = (T::one() + t.clone()) * p * T::from_count(m as u64);
    let k = (0..=m).find(|&k| T::from_count(k as u64) >= floor).unwrap_or(m).max(1);
    out.push(Inequality::ChernoffLogLog { x, m, t, k });
    Ok(out)
}
