//! Method of conditional expectations over an assignment to `T`.
//!
//! For a wide formula with sub-clauses `C'_j`, `φ_j(x)` is 0 once `C'_j` is
//! negatively determined and `2^{−d}` when `d` of its literals are still
//! unfixed; `Φ_i = Π_j (1 − φ_j)` and `Φ = Σ_i Φ_i`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::select::{SubClause, Witness};
use super::RestrictionConfig;
use crate::error::{ApxError, Result};
use crate::knf::{knf_apply_restriction, Connective, Knf, Restriction};
use crate::scalar::Scalar;

/// `ℓ·(1 − 2^{−c})^{⌈k ln n⌉} < 1`, exactly.
pub fn derandomization_hypothesis(wide: usize, c: usize, k: usize, n: usize) -> bool {
    let exponent = (k as f64 * (n as f64).ln()).ceil().max(0.0) as u32;
    let base = BigRational::one() - BigRational::new(BigInt::one(), BigInt::one() << c);
    let mut v = BigRational::from_integer(BigInt::from(wide));
    for _ in 0..exponent {
        v *= &base;
    }
    v < BigRational::one()
}

/// `φ` of one sub-clause under a partial assignment.
fn phi_sub<T: Scalar>(sc: &SubClause, conn: Connective, rho: &Restriction) -> T {
    // A DNF term is killed by a false literal, a CNF clause by a true one.
    let killing = conn == Connective::Cnf;
    let mut open = 0u32;
    for l in sc.literals.literals() {
        match rho.get(l.var) {
            Some(v) if (v == l.positive) == killing => return T::zero(),
            Some(_) => {}
            None => open += 1,
        }
    }
    T::pow2_neg(open)
}

fn phi_formula<T: Scalar>(subs: &[SubClause], conn: Connective, rho: &Restriction) -> T {
    subs.iter().fold(T::one(), |acc, sc| acc * (T::one() - phi_sub::<T>(sc, conn, rho)))
}

/// `Φ(ρ) = Σ_i Π_j (1 − φ_ij(ρ))` over the wide witnesses.
pub fn restriction_potential<T: Scalar>(formulas: &[Knf], witnesses: &[Witness], rho: &Restriction) -> T {
    formulas.iter().zip(witnesses).fold(T::zero(), |acc, (f, w)| match w {
        Witness::Wide { subclauses } => acc + phi_formula::<T>(subclauses, f.connective, rho),
        Witness::Narrow { .. } => acc,
    })
}

#[derive(Clone, Debug)]
pub struct DerandResult<T> {
    pub restriction: Restriction,
    /// `Φ` before the first and after every assignment, in the order of `T`.
    pub path: Vec<T>,
    /// Live-variable count of every formula after restriction (0 when trivialized).
    pub live: Vec<usize>,
    pub trivialized: Vec<bool>,
}

/// Assigns the variables of `T` in increasing order, each to the value
/// minimizing `Φ` (ties to 0), and verifies every formula ends trivialized or
/// with at most `b` live variables.
pub fn derandomized_restriction<T: Scalar>(
    formulas: &[Knf],
    witnesses: &[Witness],
    set: &BTreeSet<usize>,
    n: usize,
    cfg: &RestrictionConfig,
) -> Result<DerandResult<T>> {
    if formulas.len() != witnesses.len() {
        return Err(ApxError::LengthMismatch { expected: formulas.len(), got: witnesses.len() });
    }
    if let Some(&v) = set.iter().find(|&&v| v == 0 || v > n) {
        return Err(ApxError::OutOfRange(format!("variable {v} outside 1..={n}")));
    }
    let wide: Vec<(Connective, &[SubClause])> = formulas
        .iter()
        .zip(witnesses)
        .filter_map(|(f, w)| match w {
            Witness::Wide { subclauses } => Some((f.connective, subclauses.as_slice())),
            Witness::Narrow { .. } => None,
        })
        .collect();
    let c = formulas.iter().map(|f| f.width).max().unwrap_or(0);
    if !derandomization_hypothesis(wide.len(), c, cfg.k, n) {
        return Err(ApxError::Precondition(format!(
            "{} wide formulas of width {c} violate ℓ(1−2^(−c))^⌈k ln n⌉ < 1 at n = {n}",
            wide.len()
        )));
    }
    let total =
        |rho: &Restriction| wide.iter().fold(T::zero(), |acc, (conn, subs)| acc + phi_formula::<T>(subs, *conn, rho));
    let mut rho = Restriction::free(n);
    let mut path = vec![total(&rho)];
    for &v in set {
        rho.set(v, Some(false));
        let zero = total(&rho);
        rho.set(v, Some(true));
        let one = total(&rho);
        if zero <= one {
            rho.set(v, Some(false));
            path.push(zero);
        } else {
            path.push(one);
        }
    }
    let mut live = Vec::with_capacity(formulas.len());
    let mut trivialized = Vec::with_capacity(formulas.len());
    for (i, f) in formulas.iter().enumerate() {
        let s = knf_apply_restriction(f, &rho)?;
        let lv = s.live_vars();
        let triv = matches!(s, crate::knf::Simplification::Trivialized(_));
        if !triv && lv > cfg.b {
            return Err(ApxError::Precondition(format!("formula {i} keeps {lv} live variables after restriction")));
        }
        live.push(lv);
        trivialized.push(triv);
    }
    Ok(DerandResult { restriction: rho, path, live, trivialized })
}
