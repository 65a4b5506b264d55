//! Well-formed layered AC⁰ circuits: alternating AND/OR layers, negations only
//! on input literals, each layer fed by the previous one, one top gate.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::circuit::{Builder, Circuit};
use crate::error::{ApxError, Result};
use crate::knf::{knf_apply_restriction, Clause, Connective, Knf, Literal, Restriction, Simplification};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    #[serde(rename = "AND")]
    And,
    #[serde(rename = "OR")]
    Or,
}

impl GateKind {
    pub fn flip(self) -> GateKind {
        match self {
            GateKind::And => GateKind::Or,
            GateKind::Or => GateKind::And,
        }
    }

    /// Value of the gate with no inputs.
    pub fn empty_value(self) -> bool {
        self == GateKind::And
    }

    fn apply(self, mut vals: impl Iterator<Item = bool>) -> bool {
        match self {
            GateKind::And => vals.all(|v| v),
            GateKind::Or => vals.any(|v| v),
        }
    }

    /// A gate of this kind over clauses of the other kind is this normal form.
    pub fn connective(self) -> Connective {
        match self {
            GateKind::And => Connective::Cnf,
            GateKind::Or => Connective::Dnf,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayeredAc0 {
    num_inputs: usize,
    bottom: GateKind,
    bottom_gates: Vec<Vec<Literal>>,
    upper: Vec<Vec<Vec<usize>>>,
}

/// JSON form: layer 1 lists signed literals, higher layers list child indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayeredAc0File {
    pub inputs: usize,
    pub bottom: GateKind,
    pub layers: Vec<Vec<Vec<i64>>>,
}

impl LayeredAc0 {
    pub fn new(
        num_inputs: usize,
        bottom: GateKind,
        bottom_gates: Vec<Vec<Literal>>,
        upper: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        for l in bottom_gates.iter().flatten() {
            if l.var == 0 || l.var > num_inputs {
                return Err(ApxError::InvalidCircuit(format!("literal on variable {} of {num_inputs}", l.var)));
            }
        }
        let mut below = bottom_gates.len();
        for (k, layer) in upper.iter().enumerate() {
            if let Some(&c) = layer.iter().flatten().find(|&&c| c >= below) {
                return Err(ApxError::InvalidCircuit(format!("layer {}: child {c} of {below}", k + 2)));
            }
            below = layer.len();
        }
        if below != 1 {
            return Err(ApxError::InvalidCircuit(format!("top layer has {below} gates, expected 1")));
        }
        Ok(LayeredAc0 { num_inputs, bottom, bottom_gates, upper })
    }

    /// Depth-1 circuit: one gate over literals.
    pub fn single_gate(num_inputs: usize, kind: GateKind, literals: Vec<Literal>) -> Result<Self> {
        LayeredAc0::new(num_inputs, kind, vec![literals], vec![])
    }

    /// Depth-2 circuit from a formula: CNF is AND over ORs, DNF is OR over ANDs.
    pub fn from_knf(num_inputs: usize, f: &Knf) -> Result<Self> {
        let bottom = match f.connective {
            Connective::Cnf => GateKind::Or,
            Connective::Dnf => GateKind::And,
        };
        let gates: Vec<Vec<Literal>> = f.clauses.iter().map(|c| c.literals().collect()).collect();
        let top = vec![(0..gates.len()).collect()];
        LayeredAc0::new(num_inputs, bottom, gates, vec![top])
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn depth(&self) -> usize {
        1 + self.upper.len()
    }

    pub fn bottom(&self) -> GateKind {
        self.bottom
    }

    pub fn bottom_gates(&self) -> &[Vec<Literal>] {
        &self.bottom_gates
    }

    pub fn upper_layers(&self) -> &[Vec<Vec<usize>>] {
        &self.upper
    }

    /// Kind of the gates in layer `l` (1-based).
    pub fn kind(&self, l: usize) -> GateKind {
        if l % 2 == 1 {
            self.bottom
        } else {
            self.bottom.flip()
        }
    }

    /// Gate count.
    pub fn size(&self) -> usize {
        self.bottom_gates.len() + self.upper.iter().map(Vec::len).sum::<usize>()
    }

    pub fn eval(&self, x: &[bool]) -> Result<bool> {
        crate::bits::expect_len(x, self.num_inputs)?;
        let mut vals: Vec<bool> =
            self.bottom_gates.iter().map(|g| self.bottom.apply(g.iter().map(|l| l.value(x)))).collect();
        for (k, layer) in self.upper.iter().enumerate() {
            let kind = self.kind(k + 2);
            vals = layer.iter().map(|g| kind.apply(g.iter().map(|&c| vals[c]))).collect();
        }
        Ok(vals[0])
    }

    pub fn to_circuit(&self) -> Circuit {
        let mut b = Builder::new(self.num_inputs);
        let mut ids: Vec<usize> = self
            .bottom_gates
            .iter()
            .map(|g| {
                let lits = g
                    .iter()
                    .map(|l| {
                        let w = b.input(l.var);
                        b.literal(w, l.positive)
                    })
                    .collect();
                match self.bottom {
                    GateKind::And => b.and(lits),
                    GateKind::Or => b.or(lits),
                }
            })
            .collect();
        for (k, layer) in self.upper.iter().enumerate() {
            let kind = self.kind(k + 2);
            ids = layer
                .iter()
                .map(|g| {
                    let args = g.iter().map(|&c| ids[c]).collect();
                    match kind {
                        GateKind::And => b.and(args),
                        GateKind::Or => b.or(args),
                    }
                })
                .collect();
        }
        b.finish_bit(ids[0])
    }

    /// Bottom gate `g` as a width-1 formula (a gate over single-literal clauses).
    pub fn bottom_gate_knf(&self, g: usize) -> Knf {
        let clauses = self.bottom_gates[g].iter().map(|&l| Clause::from_literals([l])).collect();
        Knf { connective: self.bottom.connective(), clauses, width: 1 }
    }

    /// Layer-2 gate `g` as a formula whose clauses are its children's literal sets.
    /// Tautological clauses (CNF) and contradictory terms (DNF) are dropped.
    pub fn layer2_knf(&self, g: usize) -> Result<Knf> {
        let children = if self.depth() >= 2 {
            self.upper[0][g].clone()
        } else {
            return Err(ApxError::InvalidParameter("depth-1 circuit has no layer 2".into()));
        };
        let connective = self.kind(2).connective();
        let clauses: Vec<Clause> = children
            .iter()
            .map(|&c| Clause::from_literals(self.bottom_gates[c].iter().copied()))
            .filter(|c| !c.is_complementary())
            .collect();
        Knf::new(connective, clauses, 0)
    }

    pub fn to_file(&self) -> LayeredAc0File {
        let mut layers = vec![self.bottom_gates.iter().map(|g| g.iter().map(|l| l.to_signed()).collect()).collect()];
        for layer in &self.upper {
            layers.push(layer.iter().map(|g| g.iter().map(|&c| c as i64).collect()).collect());
        }
        LayeredAc0File { inputs: self.num_inputs, bottom: self.bottom, layers }
    }

    pub fn from_file(f: &LayeredAc0File) -> Result<Self> {
        let (first, rest) =
            f.layers.split_first().ok_or_else(|| ApxError::Parse("circuit needs at least one layer".into()))?;
        let bottom_gates = first
            .iter()
            .map(|g| g.iter().map(|&s| Literal::from_signed(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let upper = rest
            .iter()
            .map(|layer| {
                layer
                    .iter()
                    .map(|g| {
                        g.iter()
                            .map(|&c| usize::try_from(c).map_err(|_| ApxError::Parse(format!("child index {c}"))))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        LayeredAc0::new(f.inputs, f.bottom, bottom_gates, upper)
    }

    /// Rewrites layer 2 under `ρ` and merges it into layer 3, giving depth `d−1`.
    ///
    /// Each layer-2 gate must be trivialized or depend on at most `b2` live
    /// variables. For `d ≥ 3` the gate is re-expressed through its truth table
    /// over the live variables in the normal form of its parent's type and
    /// inlined. For `d = 2` a depth-1 result exists only when the restricted top
    /// gate is constant, a single clause, or a gate over single literals.
    pub fn depth_reduce(&self, rho: &Restriction, b2: usize) -> Result<LayeredAc0> {
        if rho.n() != self.num_inputs {
            return Err(ApxError::LengthMismatch { expected: self.num_inputs, got: rho.n() });
        }
        if self.depth() < 2 {
            return Err(ApxError::InvalidParameter("depth_reduce needs depth at least 2".into()));
        }
        let k2 = self.kind(2);
        let mut simplified = Vec::with_capacity(self.upper[0].len());
        for g in 0..self.upper[0].len() {
            let s = knf_apply_restriction(&self.layer2_knf(g)?, rho)?;
            if s.live_vars() > b2 {
                return Err(ApxError::Precondition(format!(
                    "layer-2 gate {g} keeps {} live variables, more than {b2}",
                    s.live_vars()
                )));
            }
            simplified.push(s);
        }
        if self.depth() == 2 {
            return match &simplified[0] {
                Simplification::Trivialized(v) => {
                    let kind = if *v { GateKind::And } else { GateKind::Or };
                    LayeredAc0::single_gate(self.num_inputs, kind, vec![])
                }
                Simplification::Survives { residual, .. } => {
                    if residual.clauses.len() == 1 {
                        LayeredAc0::single_gate(self.num_inputs, k2.flip(), residual.clauses[0].literals().collect())
                    } else if residual.clauses.iter().all(|c| c.width() == 1) {
                        let lits = residual.clauses.iter().flat_map(|c| c.literals().collect::<Vec<_>>()).collect();
                        LayeredAc0::single_gate(self.num_inputs, k2, lits)
                    } else {
                        Err(ApxError::Precondition(
                            "restricted top gate is a proper 2-level formula; no depth-1 form".into(),
                        ))
                    }
                }
            };
        }
        // New bottom gates have kind k2 and are combined by the parent's kind k1.
        let k1 = k2.flip();
        let mut new_bottom: Vec<Vec<Literal>> = Vec::new();
        let mut groups: Vec<Vec<usize>> = Vec::with_capacity(simplified.len());
        for s in &simplified {
            let terms = normal_form_terms(s, k1);
            let start = new_bottom.len();
            new_bottom.extend(terms);
            groups.push((start..new_bottom.len()).collect());
        }
        let mut upper = Vec::with_capacity(self.upper.len() - 1);
        let merged: Vec<Vec<usize>> =
            self.upper[1].iter().map(|g| g.iter().flat_map(|&c| groups[c].iter().copied()).collect()).collect();
        upper.push(merged);
        upper.extend(self.upper[2..].iter().cloned());
        LayeredAc0::new(self.num_inputs, k2, new_bottom, upper)
    }
}

/// Gates of kind `outer.flip()` whose `outer`-combination equals the simplified gate.
fn normal_form_terms(s: &Simplification, outer: GateKind) -> Vec<Vec<Literal>> {
    match s {
        // An empty inner gate evaluates to the absorbing value of `outer`.
        Simplification::Trivialized(v) => {
            if *v == outer.flip().empty_value() {
                vec![vec![]]
            } else {
                vec![]
            }
        }
        Simplification::Survives { residual, .. } => {
            let vars: Vec<usize> = residual.vars().into_iter().collect();
            let n = residual.max_var();
            let mut x = vec![false; n];
            let mut terms = Vec::new();
            for idx in 0..(1u64 << vars.len()) {
                for (j, &v) in vars.iter().enumerate() {
                    x[v - 1] = (idx >> j) & 1 == 1;
                }
                let val = residual.eval(&x);
                // OR of minterms over satisfying rows; AND of maxterms over falsifying rows.
                match outer {
                    GateKind::Or if val => {
                        terms.push(vars.iter().map(|&v| Literal { var: v, positive: x[v - 1] }).collect())
                    }
                    GateKind::And if !val => {
                        terms.push(vars.iter().map(|&v| Literal { var: v, positive: !x[v - 1] }).collect())
                    }
                    _ => {}
                }
            }
            terms
        }
    }
}

/// Variables occurring in any bottom gate.
pub fn ac0_vars(c: &LayeredAc0) -> BTreeSet<usize> {
    c.bottom_gates.iter().flatten().map(|l| l.var).collect()
}

impl LayeredAc0 {
    /// Random depth-2 circuit: `gates` bottom gates of `1..=max_width` literals
    /// on distinct variables under one top gate, bottom kind chosen at random.
    pub fn random_depth2<R: rand::Rng + ?Sized>(n: usize, gates: usize, max_width: usize, rng: &mut R) -> Result<Self> {
        use rand::seq::SliceRandom;
        if n == 0 {
            return Err(ApxError::ZeroInputs);
        }
        let bottom = if rng.gen() { GateKind::And } else { GateKind::Or };
        let vars: Vec<usize> = (1..=n).collect();
        let bottom_gates = (0..gates.max(1))
            .map(|_| {
                let w = rng.gen_range(1..=max_width.clamp(1, n));
                vars.choose_multiple(rng, w).map(|&v| Literal { var: v, positive: rng.gen() }).collect()
            })
            .collect();
        LayeredAc0::new(n, bottom, bottom_gates, vec![vec![(0..gates.max(1)).collect()]])
    }
}
