//! Both sides of the probability inequalities, measured with a given oracle.

use super::{approx_expectation, covariance, variance, RandomVariable};
use crate::circuit::{Builder, Circuit};
use crate::error::Result;
use crate::oracle::{effective, CountingOracle, Precision};
use crate::scalar::{l1_norm, powi, Scalar};

#[derive(Clone, Debug)]
pub enum Inequality<T> {
    /// `C₁(x) ≠ C₂(x)` everywhere: `|𝐏(C₁)+𝐏(C₂)−1| ≤ 2δ+β`.
    Complementation { c1: Circuit, c2: Circuit },
    /// `Y = γ + Σλᵢ Xᵢ` pointwise: `|𝔼Y − (γ+Σλᵢ𝔼Xᵢ)| ≤ (2δ+β)‖V‖‖λ‖`.
    Linearity { y: RandomVariable<T>, vars: Vec<RandomVariable<T>>, coeffs: Vec<T>, gamma: T },
    /// `S ≤ ⋁Cᵢ` pointwise: `𝐏(S) ≤ Σ𝐏(Cᵢ) + (2δ+β)m`.
    UnionBound { s: Circuit, events: Vec<Circuit> },
    /// `X ≥ 0`, `μ ≥ 𝔼X`: `𝐏[X ≥ kμ] ≤ δ + k⁻¹(1+δ‖V‖/μ) + β(‖V‖/μ+1)`.
    Markov { x: RandomVariable<T>, mu: T, k: T },
    /// `|Var X − (𝔼X² − μ²)| ≤ (2δ+β)(1+|μ|)‖V̂‖`.
    VarianceIdentity { x: RandomVariable<T> },
    /// `𝐏[(X−μ)² ≥ kσ²] ≤ δ + k⁻¹(1+δ‖V̂‖/σ²) + β(‖V̂‖/σ²+1)`.
    Chebyshev { x: RandomVariable<T>, k: T },
    /// Pairwise covariances at most `ε` (measured when absent):
    /// `|Var ΣXᵢ − ΣVar Xᵢ| ≤ (ε+3δ‖V‖²)m² + β(‖V‖+1)³`.
    PairwiseSum { vars: Vec<RandomVariable<T>>, eps: Option<T> },
    /// `x1`, `x2` placed on disjoint seed blocks:
    /// `Cov ≤ (2δ+β)‖V̂‖ + (4δ+β)‖V̂‖²`.
    Multiplication { x1: RandomVariable<T>, x2: RandomVariable<T> },
    /// `𝐏(¬C) ≤ ε` and `γ ≥ (δ+β+ε)^k + δ + β`: `𝐏(¬C^{∨k}) ≤ γ`.
    OneSided { c: Circuit, k: usize, eps: T, gamma: T },
    /// `m` i.i.d. copies of a 0/1 variable with mean `p`, `k ≥ (1+t)pm`:
    /// `𝐏[ΣXᵢ ≥ k] ≤ (e^{−t²p/4} + (4δ+β)2^{−pt(1+t)})^m + δ + β`.
    ChernoffLogLog { x: RandomVariable<T>, m: usize, t: T, k: usize },
}

impl<T> Inequality<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Inequality::Complementation { .. } => "complementation",
            Inequality::Linearity { .. } => "linearity",
            Inequality::UnionBound { .. } => "union_bound",
            Inequality::Markov { .. } => "markov",
            Inequality::VarianceIdentity { .. } => "variance_identity",
            Inequality::Chebyshev { .. } => "chebyshev",
            Inequality::PairwiseSum { .. } => "pairwise_sum",
            Inequality::Multiplication { .. } => "multiplication",
            Inequality::OneSided { .. } => "one_sided",
            Inequality::ChernoffLogLog { .. } => "chernoff_loglog",
        }
    }
}

#[derive(Clone, Debug)]
pub struct InequalityReport<T> {
    pub name: &'static str,
    pub lhs: T,
    pub rhs: T,
    /// The part of `rhs` contributed by oracle error terms (0 for exact oracles).
    pub slack: T,
    pub hypotheses_ok: bool,
    /// Failed hypotheses, if any.
    pub notes: Vec<String>,
    pub pass: bool,
}

/// Largest number of i.i.d. copies the Chernoff check enumerates.
pub const CHERNOFF_MAX_M: usize = 24;

fn report<T: Scalar>(name: &'static str, lhs: T, rhs: T, slack: T, notes: Vec<String>) -> InequalityReport<T> {
    let hypotheses_ok = notes.is_empty();
    let pass = hypotheses_ok && lhs <= rhs;
    InequalityReport { name, lhs, rhs, slack, hypotheses_ok, notes, pass }
}

fn union_norm<T: Scalar>(sets: &[&[T]]) -> T {
    let mut all: Vec<T> = sets.iter().flat_map(|s| s.iter().cloned()).collect();
    all.sort_by(|a, b| a.partial_cmp(b).expect("comparable"));
    all.dedup();
    l1_norm(&all)
}

fn prob<T: Scalar>(oracle: &dyn CountingOracle<T>, c: &Circuit, delta: Precision) -> Result<T> {
    oracle.query(c, delta)
}

/// Measures both sides of one inequality instance. Hypotheses are checked
/// (exhaustively where they are pointwise) and reported rather than raised.
pub fn verify_inequality<T: Scalar>(
    inst: &Inequality<T>,
    oracle: &dyn CountingOracle<T>,
    delta: Precision,
    beta: Precision,
    cap: usize,
) -> Result<InequalityReport<T>> {
    let d: T = effective(oracle, delta);
    let b: T = effective(oracle, beta);
    let one = T::one();
    let two = one.clone() + one.clone();
    let four = two.clone() + two.clone();
    let name = inst.name();
    let mut notes = Vec::new();
    match inst {
        Inequality::Complementation { c1, c2 } => {
            let mut bl = Builder::new(c1.num_inputs());
            let w = bl.inputs(1..=c1.num_inputs());
            let o1 = bl.embed_bit(c1, &w);
            let o2 = bl.embed_bit(c2, &w);
            let same = bl.eq(o1, o2);
            if bl.finish_bit(same).find_accepting(cap)?.is_some() {
                notes.push("circuits agree on some input".into());
            }
            let lhs = (prob(oracle, c1, delta)? + prob(oracle, c2, delta)? - one).abs();
            let slack = two * d + b;
            Ok(report(name, lhs, slack.clone(), slack, notes))
        }
        Inequality::Linearity { y, vars, coeffs, gamma } => {
            let ys = y.values_all(cap)?;
            let xs = vars.iter().map(|v| v.values_all(cap)).collect::<Result<Vec<_>>>()?;
            let pointwise = (0..ys.len()).all(|s| {
                let rhs = xs.iter().zip(coeffs).fold(gamma.clone(), |acc, (x, l)| acc + l.clone() * x[s].clone());
                ys[s] == rhs
            });
            if !pointwise {
                notes.push("Y is not γ + Σλᵢ Xᵢ pointwise".into());
            }
            let mut mu = gamma.clone();
            for (x, l) in vars.iter().zip(coeffs) {
                mu = mu + l.clone() * approx_expectation(x, oracle, delta)?;
            }
            let lhs = (approx_expectation(y, oracle, delta)? - mu).abs();
            let mut sets: Vec<&[T]> = vars.iter().map(|v| v.support()).collect();
            sets.push(y.support());
            let slack = (two * d + b) * union_norm(&sets) * l1_norm(coeffs);
            Ok(report(name, lhs, slack.clone(), slack, notes))
        }
        Inequality::UnionBound { s, events } => {
            let n = s.num_inputs();
            let mut bl = Builder::new(n);
            let w = bl.inputs(1..=n);
            let so = bl.embed_bit(s, &w);
            let eo: Vec<usize> = events.iter().map(|e| bl.embed_bit(e, &w)).collect();
            let any = bl.or(eo);
            let none = bl.not(any);
            let escape = bl.and(vec![so, none]);
            if bl.finish_bit(escape).find_accepting(cap)?.is_some() {
                notes.push("S is not covered by the union of events".into());
            }
            let lhs = prob(oracle, s, delta)?;
            let mut sum = T::zero();
            for e in events {
                sum = sum + prob(oracle, e, delta)?;
            }
            let slack = (two * d + b) * T::from_count(events.len() as u64);
            Ok(report(name, lhs, sum + slack.clone(), slack, notes))
        }
        Inequality::Markov { x, mu, k } => {
            if x.support().iter().any(|v| *v < T::zero()) {
                notes.push("support has a negative value".into());
            }
            let ex = approx_expectation(x, oracle, delta)?;
            if *mu < ex || *mu <= T::zero() {
                notes.push("μ must be positive and at least 𝔼[X]".into());
            }
            if *k <= T::zero() {
                notes.push("k must be positive".into());
            }
            if !notes.is_empty() {
                return Ok(report(name, T::zero(), T::zero(), T::zero(), notes));
            }
            let threshold = k.clone() * mu.clone();
            let lhs = prob(oracle, &x.event(|v| *v >= threshold), delta)?;
            let vn = x.norm();
            let kinv = one.clone() / k.clone();
            let rhs =
                d.clone() + kinv.clone() * (one.clone() + d * vn.clone() / mu.clone()) + b * (vn / mu.clone() + one);
            Ok(report(name, lhs, rhs.clone(), rhs - kinv, notes))
        }
        Inequality::VarianceIdentity { x } => {
            let mu = approx_expectation(x, oracle, delta)?;
            let var = variance(x, oracle, delta)?;
            let sq = x.map(|v| v.clone() * v.clone());
            let esq = approx_expectation(&sq, oracle, delta)?;
            let lhs = (var - (esq - mu.clone() * mu.clone())).abs();
            let centered: Vec<T> =
                x.support().iter().map(|v| (v.clone() - mu.clone()) * (v.clone() - mu.clone())).collect();
            let vhat = union_norm(&[x.support(), &centered, sq.support(), std::slice::from_ref(&one)]);
            let slack = (two * d + b) * (one + mu.abs()) * vhat;
            Ok(report(name, lhs, slack.clone(), slack, notes))
        }
        Inequality::Chebyshev { x, k } => {
            let mu = approx_expectation(x, oracle, delta)?;
            let var = variance(x, oracle, delta)?;
            if var <= T::zero() {
                notes.push("variance must be positive".into());
            }
            if *k <= T::zero() {
                notes.push("k must be positive".into());
            }
            if !notes.is_empty() {
                return Ok(report(name, T::zero(), T::zero(), T::zero(), notes));
            }
            let threshold = k.clone() * var.clone();
            let dev = x.map(|v| (v.clone() - mu.clone()) * (v.clone() - mu.clone()));
            let lhs = prob(oracle, &dev.event(|v| *v >= threshold), delta)?;
            let vhat = dev.norm();
            let kinv = one.clone() / k.clone();
            let rhs =
                d.clone() + kinv.clone() * (one.clone() + d * vhat.clone() / var.clone()) + b * (vhat / var + one);
            Ok(report(name, lhs, rhs.clone(), rhs - kinv, notes))
        }
        Inequality::PairwiseSum { vars, eps } => {
            let m = vars.len();
            let mut worst = T::zero();
            for i in 0..m {
                for j in i + 1..m {
                    worst = T::max_of(worst, covariance(&vars[i], &vars[j], oracle, delta)?);
                }
            }
            let eps = match eps {
                Some(e) => {
                    if worst > *e {
                        notes.push("some pairwise covariance exceeds ε".into());
                    }
                    e.clone()
                }
                None => worst,
            };
            let refs: Vec<&RandomVariable<T>> = vars.iter().collect();
            let sum = RandomVariable::combine(&refs, |v| v.iter().fold(T::zero(), |a, x| a + x.clone()))?;
            let mut vsum = T::zero();
            for v in vars {
                vsum = vsum + variance(v, oracle, delta)?;
            }
            let lhs = (variance(&sum, oracle, delta)? - vsum).abs();
            let sets: Vec<&[T]> = vars.iter().map(|v| v.support()).collect();
            let vn = union_norm(&sets);
            let mm = T::from_count((m * m) as u64);
            let three = two + one.clone();
            let slack = three * d * vn.clone() * vn.clone() * mm.clone() + b * powi(&(vn + one), 3);
            let rhs = eps * mm + slack.clone();
            Ok(report(name, lhs, rhs, slack, notes))
        }
        Inequality::Multiplication { x1, x2 } => {
            let total = x1.seed_len() + x2.seed_len();
            let a = x1.embed(total, 0)?;
            let c = x2.embed(total, x1.seed_len())?;
            let lhs = covariance(&a, &c, oracle, delta)?;
            let prods: Vec<T> =
                x1.support().iter().flat_map(|u| x2.support().iter().map(move |v| u.clone() * v.clone())).collect();
            let vhat = union_norm(&[x1.support(), x2.support(), &prods]);
            let slack = (two * d.clone() + b.clone()) * vhat.clone() + (four * d + b) * vhat.clone() * vhat;
            Ok(report(name, lhs, slack.clone(), slack, notes))
        }
        Inequality::OneSided { c, k, eps, gamma } => {
            let miss = prob(oracle, &c.negate(), delta)?;
            if miss > *eps {
                notes.push("𝐏(¬C) exceeds ε".into());
            }
            let floor = powi(&(d.clone() + b.clone() + eps.clone()), *k as u32) + d.clone() + b.clone();
            if *gamma < floor {
                notes.push("γ is below (δ+β+ε)^k + δ + β".into());
            }
            let lhs = prob(oracle, &c.or_amplify(*k)?.negate(), delta)?;
            Ok(report(name, lhs, gamma.clone(), d + b, notes))
        }
        Inequality::ChernoffLogLog { x, m, t, k } => {
            if *m > CHERNOFF_MAX_M || *m == 0 {
                notes.push(format!("m must lie in 1..={CHERNOFF_MAX_M}"));
            }
            if *t < T::zero() || *t > one {
                notes.push("t must lie in [0,1]".into());
            }
            if x.support().iter().any(|v| !(v.is_zero() || v.is_one())) {
                notes.push("X must be 0/1-valued".into());
            }
            if !notes.is_empty() {
                return Ok(report(name, T::zero(), T::zero(), T::zero(), notes));
            }
            let p = approx_expectation(x, oracle, delta)?;
            if T::from_count(*k as u64) < (one.clone() + t.clone()) * p.clone() * T::from_count(*m as u64) {
                notes.push("k is below (1+t)pm".into());
            }
            let copies = x.iid(*m)?;
            let refs: Vec<&RandomVariable<T>> = copies.iter().collect();
            let kk = T::from_count(*k as u64);
            let tail = RandomVariable::combine(&refs, |v| {
                let s = v.iter().fold(T::zero(), |a, x| a + x.clone());
                if s >= kk {
                    T::one()
                } else {
                    T::zero()
                }
            })?;
            let lhs = prob(oracle, &tail.event(|v| v.is_one()), delta)?;
            let (pf, tf) = (p.to_f64_lossy(), t.to_f64_lossy());
            let (df, bf) = (d.to_f64_lossy(), b.to_f64_lossy());
            let base = (-tf * tf * pf / 4.0).exp() + (4.0 * df + bf) * 2f64.powf(-pf * tf * (1.0 + tf));
            let rhs = T::from_f64_bound(base.powi(*m as i32) + df + bf);
            Ok(report(name, lhs, rhs, d + b, notes))
        }
    }
}
