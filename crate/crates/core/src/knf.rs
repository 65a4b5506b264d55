//! Bounded-width CNF/DNF formulas and partial restrictions.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::circuit::{Builder, Circuit};
use crate::error::{ApxError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, positive: false }
    }

    /// Signed encoding: `+v` for `x_v`, `−v` for `¬x_v`.
    pub fn from_signed(s: i64) -> Result<Self> {
        if s == 0 {
            return Err(ApxError::Parse("literal 0 is not a variable".into()));
        }
        Ok(Literal { var: s.unsigned_abs() as usize, positive: s > 0 })
    }

    pub fn to_signed(self) -> i64 {
        if self.positive {
            self.var as i64
        } else {
            -(self.var as i64)
        }
    }

    pub fn value(self, x: &[bool]) -> bool {
        x[self.var - 1] == self.positive
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Connective {
    #[serde(rename = "CNF")]
    Cnf,
    #[serde(rename = "DNF")]
    Dnf,
}

impl Connective {
    pub fn dual(self) -> Connective {
        match self {
            Connective::Cnf => Connective::Dnf,
            Connective::Dnf => Connective::Cnf,
        }
    }
}

/// A clause (CNF) or term (DNF) given by its positive and negative index sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Clause {
    #[serde(default)]
    pub pos: BTreeSet<usize>,
    #[serde(default)]
    pub neg: BTreeSet<usize>,
}

impl Clause {
    pub fn from_literals(lits: impl IntoIterator<Item = Literal>) -> Self {
        let mut c = Clause::default();
        for l in lits {
            if l.positive {
                c.pos.insert(l.var);
            } else {
                c.neg.insert(l.var);
            }
        }
        c
    }

    /// The variable set `S_C = S⁺ ∪ S⁻`.
    pub fn vars(&self) -> BTreeSet<usize> {
        self.pos.union(&self.neg).copied().collect()
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.pos.iter().map(|&v| Literal::pos(v)).chain(self.neg.iter().map(|&v| Literal::neg(v)))
    }

    pub fn width(&self) -> usize {
        self.pos.len() + self.neg.len()
    }

    /// True when some variable occurs with both signs.
    pub fn is_complementary(&self) -> bool {
        self.pos.intersection(&self.neg).next().is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Knf {
    pub connective: Connective,
    pub clauses: Vec<Clause>,
    #[serde(default)]
    pub width: usize,
}

impl Knf {
    /// Validates sign-disjointness; the width bound is the widest clause unless larger.
    pub fn new(connective: Connective, clauses: Vec<Clause>, width: usize) -> Result<Self> {
        if let Some((j, _)) = clauses.iter().enumerate().find(|(_, c)| c.is_complementary()) {
            return Err(ApxError::InvalidParameter(format!("clause {j} has a variable with both signs")));
        }
        let widest = clauses.iter().map(Clause::width).max().unwrap_or(0);
        Ok(Knf { connective, clauses, width: width.max(widest) })
    }

    /// Re-validates a deserialized formula.
    pub fn validated(self) -> Result<Self> {
        Knf::new(self.connective, self.clauses, self.width)
    }

    pub fn vars(&self) -> BTreeSet<usize> {
        self.clauses.iter().flat_map(|c| c.vars()).collect()
    }

    pub fn max_var(&self) -> usize {
        self.vars().into_iter().next_back().unwrap_or(0)
    }

    pub fn eval(&self, x: &[bool]) -> bool {
        match self.connective {
            Connective::Cnf => self.clauses.iter().all(|c| c.literals().any(|l| l.value(x))),
            Connective::Dnf => self.clauses.iter().any(|c| c.literals().all(|l| l.value(x))),
        }
    }

    pub fn to_circuit(&self, n: usize) -> Result<Circuit> {
        if self.max_var() > n {
            return Err(ApxError::OutOfRange(format!("variable {} on {n} inputs", self.max_var())));
        }
        let mut b = Builder::new(n);
        let clauses = self
            .clauses
            .iter()
            .map(|c| {
                let lits = c
                    .literals()
                    .map(|l| {
                        let g = b.input(l.var);
                        b.literal(g, l.positive)
                    })
                    .collect();
                match self.connective {
                    Connective::Cnf => b.or(lits),
                    Connective::Dnf => b.and(lits),
                }
            })
            .collect();
        let top = match self.connective {
            Connective::Cnf => b.and(clauses),
            Connective::Dnf => b.or(clauses),
        };
        Ok(b.finish_bit(top))
    }
}

/// A partial assignment `ρ: [n] → {0, 1, ⋆}`; `None` is `⋆`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Restriction {
    assignment: Vec<Option<bool>>,
}

impl Restriction {
    /// The all-`⋆` restriction on `n` variables.
    pub fn free(n: usize) -> Self {
        Restriction { assignment: vec![None; n] }
    }

    pub fn from_assignment(assignment: Vec<Option<bool>>) -> Self {
        Restriction { assignment }
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn get(&self, var: usize) -> Option<bool> {
        self.assignment[var - 1]
    }

    pub fn set(&mut self, var: usize, value: Option<bool>) {
        self.assignment[var - 1] = value;
    }

    pub fn assignment(&self) -> &[Option<bool>] {
        &self.assignment
    }

    /// `T = ρ⁻¹({0,1})`.
    pub fn fixed_vars(&self) -> Vec<usize> {
        (1..=self.n()).filter(|&v| self.get(v).is_some()).collect()
    }

    /// `ρ⁻¹(⋆)`.
    pub fn stars(&self) -> Vec<usize> {
        (1..=self.n()).filter(|&v| self.get(v).is_none()).collect()
    }

    /// Total assignment taking fixed values from `ρ` and `free[j]` for the `j`-th star.
    pub fn extend(&self, free: &[bool]) -> Vec<bool> {
        let mut it = free.iter();
        self.assignment.iter().map(|a| a.unwrap_or_else(|| *it.next().expect("one value per star"))).collect()
    }

    /// Text form: `0`, `1` or `*` per variable.
    pub fn to_text(&self) -> String {
        self.assignment
            .iter()
            .map(|a| match a {
                Some(true) => '1',
                Some(false) => '0',
                None => '*',
            })
            .collect()
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|ch| match ch {
                '0' => Ok(Some(false)),
                '1' => Ok(Some(true)),
                '*' => Ok(None),
                other => Err(ApxError::Parse(format!("bad restriction character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Restriction::from_assignment)
    }
}

/// Outcome of applying a restriction to a formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Simplification {
    Trivialized(bool),
    Survives { live: BTreeSet<Literal>, residual: Knf },
}

impl Simplification {
    /// Number of distinct variables among the live literals (0 when trivialized).
    pub fn live_vars(&self) -> usize {
        match self {
            Simplification::Trivialized(_) => 0,
            Simplification::Survives { live, .. } => live.iter().map(|l| l.var).collect::<BTreeSet<_>>().len(),
        }
    }
}

/// Clause-by-clause simplification of `f` under `ρ`.
pub fn knf_apply_restriction(f: &Knf, rho: &Restriction) -> Result<Simplification> {
    if f.max_var() > rho.n() {
        return Err(ApxError::OutOfRange(format!("variable {} outside the restriction domain", f.max_var())));
    }
    // For CNF a true literal satisfies its clause; for DNF a false literal kills its term.
    let absorbing = f.connective == Connective::Dnf;
    let mut residual = Vec::new();
    for c in &f.clauses {
        let mut decided = false;
        let mut rest = Vec::new();
        for l in c.literals() {
            match rho.get(l.var) {
                Some(v) if (v == l.positive) != absorbing => {
                    decided = true;
                    break;
                }
                Some(_) => {}
                None => rest.push(l),
            }
        }
        if decided {
            continue;
        }
        if rest.is_empty() {
            // Every literal falsified (CNF) or satisfied (DNF).
            return Ok(Simplification::Trivialized(absorbing));
        }
        residual.push(Clause::from_literals(rest));
    }
    if residual.is_empty() {
        return Ok(Simplification::Trivialized(!absorbing));
    }
    let live = residual.iter().flat_map(|c| c.literals().collect::<Vec<_>>()).collect();
    let residual = Knf::new(f.connective, residual, f.width)?;
    Ok(Simplification::Survives { live, residual })
}
