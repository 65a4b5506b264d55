//! Predictor extraction from a Local Consistency failure of the empirical oracle.

use super::Predictor;
use crate::circuit::{Builder, Circuit};
use crate::error::{ApxError, Result};
use crate::oracle::{empirical_count, FlatDistribution};
use crate::scalar::Scalar;

/// `Pr_{u←D}[P(u_{<i}) = u_i] − 1/2` by enumeration of `D`.
pub fn predictor_advantage_on<T: Scalar>(d: &FlatDistribution, index: usize, p: &Circuit) -> Result<T> {
    if index == 0 || index > d.n() || p.num_inputs() != index - 1 {
        return Err(ApxError::ArityMismatch(format!("predictor for bit {index} reads {} bits", p.num_inputs())));
    }
    let mut hits = 0u64;
    for u in d.strings() {
        if p.eval_bit(&u[..index - 1])? == u[index - 1] {
            hits += 1;
        }
    }
    Ok(T::from_ratio(hits as i64, d.len() as u64) - T::from_ratio(1, 2))
}

fn sign<T: Scalar>(positive: bool) -> T {
    if positive {
        T::one()
    } else {
        -T::one()
    }
}

fn with_flip(c: &Circuit, flip: bool) -> Circuit {
    if !flip {
        return c.clone();
    }
    c.negate()
}

/// Case analysis turning `|Pr_D[c(u_{≤t})] − ½(Pr_D[c(u_{<t}0)] + Pr_D[c(u_{<t}1)])| > τ`
/// into a predictor for bit `t` with advantage at least `τ/2` over `D`.
///
/// With `q = Pr[u_t = 1]`, a frequency predictor is returned when
/// `q ≤ 1/2 − τ/2` (constant 0) or `q ≥ 1/2 + τ/2` (constant 1). Otherwise the
/// gap splits as `X₀ + X₁` with `X_b = Pr[u_t=b ∧ c(·b)] − Pr[u_t≠b ∧ c(·b)]`,
/// and the first term exceeding `τ` in the direction of the gap selects
/// `v ↦ c(v∘b) ⊕ (1⊕b)` or its negation.
pub fn extract_predictor<T: Scalar>(d: &FlatDistribution, c: &Circuit, tau: &T) -> Result<Predictor<T>> {
    c.expect_single_output()?;
    let t = c.num_inputs();
    if t == 0 || t > d.n() {
        return Err(ApxError::OutOfRange(format!("circuit on {t} inputs over {}-bit strings", d.n())));
    }
    let emp = |c: &Circuit| -> Result<T> { Ok(T::from_rational(&empirical_count(c, d)?)) };
    let two = T::one() + T::one();
    let c0 = c.fix_last(false)?;
    let c1 = c.fix_last(true)?;
    let gap = emp(c)? - (emp(&c0)? + emp(&c1)?) / two.clone();
    if gap.abs() <= *tau {
        return Err(ApxError::NoLocalViolation { gap: gap.to_text(), threshold: tau.to_text() });
    }
    let q = emp(&Circuit::projection(t, t)?)?;
    let half = T::one() / two.clone();
    let half_tau = tau.clone() / two;
    let candidate = if q <= half.clone() - half_tau.clone() {
        Circuit::constant(t - 1, false)
    } else if q >= half + half_tau {
        Circuit::constant(t - 1, true)
    } else {
        // X_b over D, computed from the joint events [u_t = b' ∧ c(u_{<t} b)].
        let joint = |child: &Circuit, bit: bool| -> Result<T> {
            let mut b = Builder::new(t);
            let v = b.inputs(1..=t - 1);
            let cv = b.embed_bit(child, &v);
            let ut = b.input(t);
            let lit = b.literal(ut, bit);
            let both = b.and(vec![cv, lit]);
            emp(&b.finish_bit(both))
        };
        let x0 = joint(&c0, false)? - joint(&c0, true)?;
        let x1 = joint(&c1, true)? - joint(&c1, false)?;
        let positive = gap > T::zero();
        let (pick0, pick1) = if positive { (x0 > *tau, x1 > *tau) } else { (-x0.clone() > *tau, -x1.clone() > *tau) };
        // The two terms sum to twice the gap, so one of them exceeds τ; under
        // rounding fall back to the larger one.
        if pick0 || (!pick1 && (x0.clone() - x1.clone()) * sign(positive) >= T::zero()) {
            with_flip(&c0, positive)
        } else {
            with_flip(&c1, !positive)
        }
    };
    let advantage = predictor_advantage_on(d, t, &candidate)?;
    Ok(Predictor { index: t, circuit: candidate, advantage })
}
