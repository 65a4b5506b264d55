//! Greedy subset selection with narrow-or-wide witnesses.

use std::collections::BTreeSet;

use serde::Serialize;

use super::potential::{meets_log_bound, GeneralPotential, Mark, Piece, SetSystem, StarString};
use super::RestrictionConfig;
use crate::error::{ApxError, Result};
use crate::knf::{Clause, Knf, Literal};
use crate::scalar::Scalar;

/// A sub-clause of clause `clause` of its formula.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubClause {
    pub clause: usize,
    pub literals: Clause,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Witness {
    /// The literals on variables outside `T`; at most `b` variables.
    Narrow { live: BTreeSet<Literal> },
    /// Pairwise-disjoint sub-clauses of distinct clauses, all inside `T`.
    Wide { subclauses: Vec<SubClause> },
}

/// The formula's clause variable sets as a system over `[n]`.
pub fn clause_system(f: &Knf, n: usize) -> Result<SetSystem> {
    SetSystem::new(n, f.clauses.iter().map(Clause::vars).collect(), 0)
}

fn live_literals(f: &Knf, t: &BTreeSet<usize>) -> BTreeSet<Literal> {
    f.clauses.iter().flat_map(|c| c.literals().collect::<Vec<_>>()).filter(|l| !t.contains(&l.var)).collect()
}

fn distinct_vars(lits: &BTreeSet<Literal>) -> usize {
    lits.iter().map(|l| l.var).collect::<BTreeSet<_>>().len()
}

/// Re-checks a witness for `f` against `T` from scratch.
pub fn verify_witness(f: &Knf, t: &BTreeSet<usize>, w: &Witness, n: usize, cfg: &RestrictionConfig) -> bool {
    match w {
        Witness::Narrow { live } => *live == live_literals(f, t) && distinct_vars(live) <= cfg.b,
        Witness::Wide { subclauses } => {
            let mut used_vars = BTreeSet::new();
            let mut used_clauses = BTreeSet::new();
            for sc in subclauses {
                let Some(parent) = f.clauses.get(sc.clause) else { return false };
                let vars = sc.literals.vars();
                let inside = sc.literals.pos.is_subset(&parent.pos) && sc.literals.neg.is_subset(&parent.neg);
                if vars.is_empty() || !inside || !vars.is_subset(t) || !used_clauses.insert(sc.clause) {
                    return false;
                }
                if !vars.iter().all(|&v| used_vars.insert(v)) {
                    return false;
                }
            }
            meets_log_bound(subclauses.len(), cfg.k, n)
        }
    }
}

fn subclause(f: &Knf, piece: &Piece) -> SubClause {
    let parent = &f.clauses[piece.origin];
    let literals = Clause::from_literals(parent.literals().filter(|l| piece.set.contains(&l.var)));
    SubClause { clause: piece.origin, literals }
}

/// A narrow witness if one exists, else a wide one from the decomposition
/// family with the most pieces inside `T`.
pub fn find_witness(
    f: &Knf,
    pot: &GeneralPotential,
    t: &BTreeSet<usize>,
    n: usize,
    cfg: &RestrictionConfig,
) -> Option<Witness> {
    let live = live_literals(f, t);
    if distinct_vars(&live) <= cfg.b {
        return Some(Witness::Narrow { live });
    }
    let best = pot
        .families
        .iter()
        .map(|fam| fam.iter().filter(|pc| pc.set.is_subset(t)).collect::<Vec<_>>())
        .max_by_key(|inside| inside.len())?;
    let w = Witness::Wide { subclauses: best.iter().map(|pc| subclause(f, pc)).collect() };
    verify_witness(f, t, &w, n, cfg).then_some(w)
}

#[derive(Clone, Debug)]
pub struct SelectionRun<T> {
    pub x: StarString,
    /// `Φ` after each step, starting with `Φ(ε)`.
    pub path: Vec<T>,
    /// The greedy set `T_x`.
    pub greedy_set: BTreeSet<usize>,
    /// `T_x` padded with the smallest remaining indices up to `n − t`.
    pub set: BTreeSet<usize>,
    /// Per formula; `None` when neither condition holds for `set`.
    pub witnesses: Vec<Option<Witness>>,
    /// `Φ(x) ≤ (1−p)·n` at the end.
    pub greedy_ok: bool,
}

#[derive(Clone, Debug)]
pub struct SelectionResult<T> {
    pub set: BTreeSet<usize>,
    pub witnesses: Vec<Witness>,
    pub run: SelectionRun<T>,
}

/// Greedy minimization of `Φ(x) = q∘ + (1−p)(n−i) + n·Σ Φ_i(x)` with
/// `p = t/n`, ties toward `∘`; each `Φ_i` is the general potential of
/// formula `i`'s clause sets with parameter `3k`.
pub fn select_subset_run<T: Scalar>(
    formulas: &[Knf],
    n: usize,
    t: usize,
    cfg: &RestrictionConfig,
) -> Result<SelectionRun<T>> {
    if n == 0 {
        return Err(ApxError::ZeroInputs);
    }
    if t > n {
        return Err(ApxError::InvalidParameter(format!("t = {t} exceeds n = {n}")));
    }
    let p = T::from_ratio(t as i64, n as u64);
    let q = T::one() - p.clone();
    let nn = T::from_count(n as u64);
    let pots = formulas
        .iter()
        .map(|f| clause_system(f, n).map(|s| GeneralPotential::new(&s, 3 * cfg.k, cfg.b)))
        .collect::<Result<Vec<_>>>()?;
    // touching[v]: formulas whose potential reads variable v.
    let mut touching = vec![Vec::new(); n + 1];
    for (i, pot) in pots.iter().enumerate() {
        for v in pot.relevant() {
            touching[v].push(i);
        }
    }
    let mut x = StarString::empty();
    let mut cached: Vec<T> = pots.iter().map(|pot| pot.eval(&x, &p)).collect();
    let mut sum = cached.iter().fold(T::zero(), |a, v| a + v.clone());
    let linear = |circles: usize, i: usize| T::from_count(circles as u64) + q.clone() * T::from_count((n - i) as u64);
    let mut path = vec![linear(0, 0) + nn.clone() * sum.clone()];
    for i in 0..n {
        let v = i + 1;
        let xs = x.pushed(Mark::Star);
        let xc = x.pushed(Mark::Circle);
        let (mut sum_s, mut sum_c) = (sum.clone(), sum.clone());
        let mut new_s = Vec::new();
        let mut new_c = Vec::new();
        for &f in &touching[v] {
            let (ps, pc) = (pots[f].eval(&xs, &p), pots[f].eval(&xc, &p));
            sum_s = sum_s - cached[f].clone() + ps.clone();
            sum_c = sum_c - cached[f].clone() + pc.clone();
            new_s.push(ps);
            new_c.push(pc);
        }
        let circles = x.count(Mark::Circle);
        let phi_s = linear(circles, i + 1) + nn.clone() * sum_s.clone();
        let phi_c = linear(circles + 1, i + 1) + nn.clone() * sum_c.clone();
        let (next, value, chosen, new_vals) =
            if phi_c <= phi_s { (xc, phi_c, sum_c, new_c) } else { (xs, phi_s, sum_s, new_s) };
        for (&f, val) in touching[v].iter().zip(new_vals) {
            cached[f] = val;
        }
        x = next;
        sum = chosen;
        path.push(value);
    }
    let bound = q * nn;
    let greedy_ok = path.last().expect("nonempty path") <= &bound;
    let greedy_set = x.circles();
    let mut set = greedy_set.clone();
    for v in 1..=n {
        if set.len() >= n - t {
            break;
        }
        set.insert(v);
    }
    let witnesses = formulas.iter().zip(&pots).map(|(f, pot)| find_witness(f, pot, &set, n, cfg)).collect();
    Ok(SelectionRun { x, path, greedy_set, set, witnesses, greedy_ok })
}

/// The strict form: fails when the greedy end point exceeds `(1−p)·n` or a
/// witness is missing.
pub fn select_subset<T: Scalar>(
    formulas: &[Knf],
    n: usize,
    t: usize,
    cfg: &RestrictionConfig,
) -> Result<SelectionResult<T>> {
    let run = select_subset_run::<T>(formulas, n, t, cfg)?;
    if !run.greedy_ok {
        return Err(ApxError::GreedyFailure(format!(
            "final potential {} exceeds (1−p)·n = {}",
            run.path.last().expect("nonempty").to_text(),
            n - t
        )));
    }
    let witnesses = run
        .witnesses
        .iter()
        .enumerate()
        .map(|(i, w)| w.clone().ok_or_else(|| ApxError::GreedyFailure(format!("formula {i} has no witness"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(SelectionResult { set: run.set.clone(), witnesses, run })
}
