//! Potentials over star/circle prefixes and the disjoint-set decomposition.
//!
//! A prefix `x ∈ {⋆,∘}^{≤n}` fixes the marks of variables `1..=|x|`; the
//! remaining variables are thought of as independently `⋆` with probability
//! `p` and `∘` otherwise. Every potential here is the exact probability of its
//! event under that completion, so `Φ(x) = p·Φ(x⋆) + (1−p)·Φ(x∘)` holds
//! identically.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ApxError, Result};
use crate::scalar::{powi, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mark {
    /// Left free by the restriction.
    Star,
    /// Fixed by the restriction (member of `T`).
    Circle,
}

/// A prefix `x ∈ {⋆,∘}^{≤n}`; `x[i−1]` marks variable `i`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct StarString(pub Vec<Mark>);

impl StarString {
    pub fn empty() -> Self {
        StarString(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Mark of variable `v`, or `None` beyond the prefix.
    pub fn mark(&self, v: usize) -> Option<Mark> {
        self.0.get(v - 1).copied()
    }

    pub fn pushed(&self, m: Mark) -> StarString {
        let mut v = self.0.clone();
        v.push(m);
        StarString(v)
    }

    /// `T_x = {i : x_i = ∘}`.
    pub fn circles(&self) -> BTreeSet<usize> {
        (1..=self.len()).filter(|&i| self.0[i - 1] == Mark::Circle).collect()
    }

    pub fn count(&self, m: Mark) -> usize {
        self.0.iter().filter(|&&x| x == m).count()
    }

    /// `*` and `o` characters.
    pub fn parse(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|ch| match ch {
                '*' => Ok(Mark::Star),
                'o' | '∘' => Ok(Mark::Circle),
                other => Err(ApxError::Parse(format!("bad mark {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(StarString)
    }
}

impl fmt::Display for StarString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.0 {
            f.write_str(if *m == Mark::Star { "*" } else { "o" })?;
        }
        Ok(())
    }
}

/// Sets `S₁..S_m ⊆ [n]`, each of size at most `c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSystem {
    pub n: usize,
    pub sets: Vec<BTreeSet<usize>>,
    pub c: usize,
}

impl SetSystem {
    /// `c` defaults to the largest set size when smaller.
    pub fn new(n: usize, sets: Vec<BTreeSet<usize>>, c: usize) -> Result<Self> {
        if let Some(v) = sets.iter().flatten().find(|&&v| v == 0 || v > n) {
            return Err(ApxError::OutOfRange(format!("element {v} outside 1..={n}")));
        }
        let widest = sets.iter().map(BTreeSet::len).max().unwrap_or(0);
        Ok(SetSystem { n, sets, c: c.max(widest) })
    }

    pub fn is_disjoint(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.sets.iter().flatten().all(|&v| seen.insert(v))
    }

    pub fn union(&self) -> BTreeSet<usize> {
        self.sets.iter().flatten().copied().collect()
    }
}

/// Probability that `S ⊆ T'` under the random completion of `x`.
fn inside_probability<T: Scalar>(x: &StarString, set: &BTreeSet<usize>, q: &T) -> T {
    let mut open = 0u32;
    for &v in set {
        match x.mark(v) {
            Some(Mark::Star) => return T::zero(),
            Some(Mark::Circle) => {}
            None => open += 1,
        }
    }
    powi(q, open)
}

/// `Pr[fewer than s of the independent events occur]` for event
/// probabilities `a` (Poisson-binomial lower tail).
fn fewer_than<T: Scalar>(a: &[T], s: usize) -> T {
    if s == 0 {
        return T::zero();
    }
    // dist[j] = Pr[exactly j events so far], truncated at s−1.
    let mut dist = vec![T::zero(); s];
    dist[0] = T::one();
    for aj in a {
        let miss = T::one() - aj.clone();
        for j in (0..s).rev() {
            let stay = dist[j].clone() * miss.clone();
            dist[j] = if j > 0 { stay + dist[j - 1].clone() * aj.clone() } else { stay };
        }
    }
    dist.into_iter().fold(T::zero(), |acc, v| acc + v)
}

/// `Φ_s(x) = Σ_{α⊆[m],|α|<s} φ(x,α)`: the probability that fewer than `s` of
/// the disjoint sets end up inside `T`.
pub fn phi_small_sets<T: Scalar>(x: &StarString, sys: &SetSystem, s: usize, p: &T) -> Result<T> {
    if x.len() > sys.n {
        return Err(ApxError::LengthMismatch { expected: sys.n, got: x.len() });
    }
    if !sys.is_disjoint() {
        return Err(ApxError::Precondition("the small-set potential needs pairwise disjoint sets".into()));
    }
    let q = T::one() - p.clone();
    let a: Vec<T> = sys.sets.iter().map(|set| inside_probability(x, set, &q)).collect();
    Ok(fewer_than(&a, s))
}

/// A piece of a decomposition family: a subset of the original set `origin`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub origin: usize,
    pub set: BTreeSet<usize>,
}

/// Iterated peeling: take a greedy maximal disjoint subfamily `V_i` (scan
/// order), remove its union from all survivors, drop empty remainders, repeat.
pub fn disjoint_decomposition(sys: &SetSystem) -> Vec<Vec<Piece>> {
    let mut current: Vec<Piece> = sys
        .sets
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_empty())
        .map(|(origin, s)| Piece { origin, set: s.clone() })
        .collect();
    let mut families = Vec::new();
    while !current.is_empty() {
        let mut covered = BTreeSet::new();
        let mut family = Vec::new();
        for piece in &current {
            if piece.set.is_disjoint(&covered) {
                covered.extend(piece.set.iter().copied());
                family.push(piece.clone());
            }
        }
        current = current
            .into_iter()
            .filter_map(|piece| {
                let rest: BTreeSet<usize> = piece.set.difference(&covered).copied().collect();
                (!rest.is_empty()).then_some(Piece { origin: piece.origin, set: rest })
            })
            .collect();
        families.push(family);
    }
    families
}

/// `ℓ = ⌈2k·ln n⌉`, at least 1.
pub fn wide_threshold(k: usize, n: usize) -> usize {
    ((2.0 * k as f64 * (n as f64).ln()).ceil() as usize).max(1)
}

/// True when `count ≥ k·ln n`.
pub fn meets_log_bound(count: usize, k: usize, n: usize) -> bool {
    count as f64 >= k as f64 * (n as f64).ln()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "case")]
pub enum PotentialCase {
    /// Some family has at least `ℓ` pieces; the potential tracks the first
    /// `ℓ` pieces of the first such family with threshold `s = ⌈ℓ/2⌉`.
    Wide { family: usize, pieces: Vec<Piece>, s: usize },
    /// All families are small; the potential tracks `|S ∖ T| ≤ b` over `S = ⋃Sᵢ`.
    Narrow { union: BTreeSet<usize> },
}

/// The general-system potential with its case analysis precomputed.
#[derive(Clone, Debug)]
pub struct GeneralPotential {
    pub n: usize,
    pub b: usize,
    pub k: usize,
    pub families: Vec<Vec<Piece>>,
    pub case: PotentialCase,
}

impl GeneralPotential {
    pub fn new(sys: &SetSystem, k: usize, b: usize) -> Self {
        let families = disjoint_decomposition(sys);
        let ell = wide_threshold(k, sys.n);
        let case = match families.iter().position(|f| f.len() >= ell) {
            Some(i) => PotentialCase::Wide { family: i, pieces: families[i][..ell].to_vec(), s: ell.div_ceil(2) },
            None => PotentialCase::Narrow { union: sys.union() },
        };
        GeneralPotential { n: sys.n, b, k, families, case }
    }

    pub fn is_wide(&self) -> bool {
        matches!(self.case, PotentialCase::Wide { .. })
    }

    /// Variables whose mark can change the potential.
    pub fn relevant(&self) -> BTreeSet<usize> {
        match &self.case {
            PotentialCase::Wide { pieces, .. } => pieces.iter().flat_map(|p| p.set.iter().copied()).collect(),
            PotentialCase::Narrow { union } => union.clone(),
        }
    }

    pub fn eval<T: Scalar>(&self, x: &StarString, p: &T) -> T {
        let q = T::one() - p.clone();
        match &self.case {
            PotentialCase::Wide { pieces, s, .. } => {
                let a: Vec<T> = pieces.iter().map(|pc| inside_probability(x, &pc.set, &q)).collect();
                fewer_than(&a, *s)
            }
            PotentialCase::Narrow { union } => {
                let (mut stars, mut open) = (0usize, 0u32);
                for &v in union {
                    match x.mark(v) {
                        Some(Mark::Star) => stars += 1,
                        Some(Mark::Circle) => {}
                        None => open += 1,
                    }
                }
                // Pr[q* + Bin(q⋄, p) ≥ b + 1].
                let need = (self.b + 1).saturating_sub(stars) as u32;
                if need > open {
                    return T::zero();
                }
                let mut total = T::zero();
                let mut binom = T::one();
                for r in 0..=open {
                    if r >= need {
                        total = total + binom.clone() * powi(p, r) * powi(&q, open - r);
                    }
                    binom = binom * T::from_count(u64::from(open - r)) / T::from_count(u64::from(r + 1));
                }
                total
            }
        }
    }
}

/// `(Φ(x), case)` for a general set system, with `ℓ = ⌈2k·ln n⌉`.
pub fn phi_general<T: Scalar>(
    x: &StarString,
    sys: &SetSystem,
    p: &T,
    k: usize,
    b: usize,
) -> Result<(T, PotentialCase)> {
    if x.len() > sys.n {
        return Err(ApxError::LengthMismatch { expected: sys.n, got: x.len() });
    }
    let g = GeneralPotential::new(sys, k, b);
    Ok((g.eval(x, p), g.case))
}
