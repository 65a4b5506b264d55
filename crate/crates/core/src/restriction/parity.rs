//! End-to-end search for an input on which a depth-≤2 AC⁰ circuit disagrees
//! with parity: shrink by select-then-derandomize twice, then separate on
//! the surviving variables.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::Serialize;

use super::derand::derandomized_restriction;
use super::select::{select_subset_run, Witness};
use super::RestrictionConfig;
use crate::ac0::LayeredAc0;
use crate::bits::{parity, Bits};
use crate::circuit::InputSub;
use crate::error::{ApxError, Result};
use crate::knf::{knf_apply_restriction, Clause, Knf, Literal, Restriction, Simplification};

/// How the final assignment to the surviving variables was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeparationMethod {
    /// A free variable the restricted circuit ignores was set to flip parity.
    IrrelevantVariable,
    /// Exhaustive search over the free variables.
    Exhaustive,
}

/// One select-then-derandomize stage, over original variable indices.
#[derive(Clone, Debug, Serialize)]
pub struct StageTrace {
    pub stage: usize,
    /// Variables still free when the stage starts.
    pub universe: usize,
    pub t: usize,
    pub set: Vec<usize>,
    pub greedy_ok: bool,
    /// Restriction after the stage, `0`/`1`/`*` per variable.
    pub restriction: String,
    /// `⊕` of all fixed bits so far.
    pub sigma: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParityReport {
    pub x: Bits,
    pub circuit_value: bool,
    pub parity: bool,
    /// Restriction the separation ran on.
    pub restriction: String,
    /// Number of completed stages behind that restriction.
    pub stages_used: usize,
    pub method: SeparationMethod,
    pub trace: Vec<StageTrace>,
}

fn isqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn sigma(rho: &Restriction) -> bool {
    rho.assignment().iter().fold(false, |acc, a| acc ^ a.unwrap_or(false))
}

/// The formula computed by the top gate: its layer-2 form at depth 2, the
/// single gate itself at depth 1.
fn top_formula(c: &LayeredAc0) -> Result<Knf> {
    if c.depth() == 1 {
        Ok(c.bottom_gate_knf(0))
    } else {
        c.layer2_knf(0)
    }
}

/// Selects `T` among the free variables of `rho` so that every formula
/// becomes narrow or wide, then fixes `T` by conditional expectations.
fn shrink(
    formulas: &[Knf],
    rho: &Restriction,
    stage: usize,
    cfg: &RestrictionConfig,
) -> (Option<Restriction>, StageTrace) {
    let free = rho.stars();
    let n1 = free.len();
    let t = isqrt(n1);
    let mut trace = StageTrace {
        stage,
        universe: n1,
        t,
        set: vec![],
        greedy_ok: false,
        restriction: rho.to_text(),
        sigma: sigma(rho),
        error: None,
    };
    let result = (|| -> Result<Restriction> {
        let local: BTreeMap<usize, usize> = free.iter().enumerate().map(|(j, &v)| (v, j + 1)).collect();
        let relabel = |l: Literal| Literal { var: local[&l.var], ..l };
        let formulas = formulas
            .iter()
            .map(|f| match knf_apply_restriction(f, rho)? {
                Simplification::Trivialized(_) => Knf::new(f.connective, vec![], 0),
                Simplification::Survives { residual, .. } => Knf::new(
                    f.connective,
                    residual.clauses.iter().map(|c| Clause::from_literals(c.literals().map(relabel))).collect(),
                    0,
                ),
            })
            .collect::<Result<Vec<_>>>()?;
        let run = select_subset_run::<BigRational>(&formulas, n1, t, cfg)?;
        trace.greedy_ok = run.greedy_ok;
        trace.set = run.set.iter().map(|&v| free[v - 1]).collect();
        let witnesses: Vec<Witness> = run
            .witnesses
            .iter()
            .enumerate()
            .map(|(i, w)| w.clone().ok_or_else(|| ApxError::GreedyFailure(format!("formula {i} has no witness"))))
            .collect::<Result<_>>()?;
        let d = derandomized_restriction::<BigRational>(&formulas, &witnesses, &run.set, n1, cfg)?;
        let mut out = rho.clone();
        for (j, &v) in free.iter().enumerate() {
            out.set(v, d.restriction.get(j + 1));
        }
        Ok(out)
    })();
    match result {
        Ok(r) => {
            trace.restriction = r.to_text();
            trace.sigma = sigma(&r);
            (Some(r), trace)
        }
        Err(e) => {
            trace.error = Some(format!("{e}"));
            (None, trace)
        }
    }
}

/// Finds `x` with `c∘ρ(x) ≠ ⊕x` among the extensions of `rho`.
fn separate_on(c: &LayeredAc0, top: &Knf, rho: &Restriction, cap: usize) -> Result<Option<(Bits, SeparationMethod)>> {
    let free = rho.stars();
    let live: Vec<usize> = match knf_apply_restriction(top, rho)? {
        Simplification::Trivialized(_) => vec![],
        Simplification::Survives { residual, .. } => residual.vars().into_iter().collect(),
    };
    if let Some(&v) = free.iter().find(|v| !live.contains(v)) {
        let mut x = rho.extend(&vec![false; free.len()]);
        if c.eval(&x)? == parity(&x) {
            x[v - 1] = true;
        }
        return Ok(Some((x, SeparationMethod::IrrelevantVariable)));
    }
    if free.is_empty() {
        let x = rho.extend(&[]);
        return Ok((c.eval(&x)? != parity(&x)).then_some((x, SeparationMethod::Exhaustive)));
    }
    if free.len() > cap {
        return Err(ApxError::CapExceeded { needed: free.len(), cap });
    }
    let pos: BTreeMap<usize, usize> = free.iter().enumerate().map(|(j, &v)| (v, j + 1)).collect();
    let restricted = c.to_circuit().map_inputs(free.len(), |i| match rho.get(i) {
        Some(b) => InputSub::Const(b),
        None => InputSub::Input(pos[&i]),
    });
    // The tester compares against the parity of the free bits only.
    let tester = restricted.parity_tester()?;
    let target = if sigma(rho) { tester } else { tester.negate() };
    Ok(target.find_accepting(cap)?.map(|y| (rho.extend(&y), SeparationMethod::Exhaustive)))
}

/// Input on which `c` (depth ≤ 2) disagrees with parity.
///
/// Stage 1 makes every bottom gate narrow, stage 2 the restricted top
/// formula; the survivors are then separated directly. A failed stage falls
/// back to the last good restriction, down to the unrestricted circuit with
/// an exhaustive search capped at `cap` free variables.
pub fn parity_separating_input(c: &LayeredAc0, cfg: &RestrictionConfig, cap: usize) -> Result<ParityReport> {
    if c.depth() > 2 {
        return Err(ApxError::Precondition(format!("depth {} exceeds 2", c.depth())));
    }
    let n = c.num_inputs();
    if n == 0 {
        return Err(ApxError::ZeroInputs);
    }
    let top = top_formula(c)?;
    let mut rhos = vec![Restriction::free(n)];
    let mut trace = Vec::new();
    let mut stages: Vec<Vec<Knf>> = Vec::new();
    if c.depth() == 2 {
        stages.push((0..c.bottom_gates().len()).map(|g| c.bottom_gate_knf(g)).collect());
    }
    stages.push(vec![top.clone()]);
    for (s, formulas) in stages.iter().enumerate() {
        let (next, t) = shrink(formulas, rhos.last().expect("nonempty"), s + 1, cfg);
        trace.push(t);
        match next {
            Some(r) => rhos.push(r),
            None => break,
        }
    }
    let mut last_err = None;
    for (used, rho) in rhos.iter().enumerate().rev() {
        match separate_on(c, &top, rho, cap) {
            Ok(Some((x, method))) => {
                let value = c.eval(&x)?;
                let par = parity(&x);
                assert_ne!(value, par, "separating input failed verification after {used} stages");
                return Ok(ParityReport {
                    x,
                    circuit_value: value,
                    parity: par,
                    restriction: rho.to_text(),
                    stages_used: used,
                    method,
                    trace,
                });
            }
            Ok(None) => {}
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| ApxError::Pipeline {
        stage: "separate".into(),
        message: "circuit agrees with parity on every input".into(),
    }))
}
