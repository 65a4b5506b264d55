//! Runtime checks of the four oracle axioms and the bit-fixing descent that
//! locates a Local Consistency failure.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_rational::BigRational;

use super::{exact_count, CountingOracle, Precision};
use crate::circuit::Circuit;
use crate::error::Result;
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct TraceEntry<T> {
    pub circuit: Arc<Circuit>,
    pub precision: Precision,
    pub answer: T,
}

/// Observed queries in call order.
#[derive(Clone, Debug)]
pub struct QueryTrace<T> {
    pub entries: Vec<TraceEntry<T>>,
}

impl<T> Default for QueryTrace<T> {
    fn default() -> Self {
        QueryTrace { entries: Vec::new() }
    }
}

impl<T: Scalar> QueryTrace<T> {
    pub fn push(&mut self, circuit: Circuit, precision: Precision, answer: T) {
        self.entries.push(TraceEntry { circuit: Arc::new(circuit), precision, answer });
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Oracle wrapper recording every query.
pub struct TracingOracle<'a, T> {
    inner: &'a dyn CountingOracle<T>,
    trace: Mutex<QueryTrace<T>>,
}

impl<'a, T: Scalar> TracingOracle<'a, T> {
    pub fn new(inner: &'a dyn CountingOracle<T>) -> Self {
        TracingOracle { inner, trace: Mutex::new(QueryTrace::default()) }
    }

    pub fn into_trace(self) -> QueryTrace<T> {
        self.trace.into_inner().unwrap_or_else(|e| e.into_inner())
    }

    pub fn query_count(&self) -> usize {
        self.trace.lock().map(|t| t.len()).unwrap_or(0)
    }
}

impl<T: Scalar> CountingOracle<T> for TracingOracle<'_, T> {
    fn query(&self, c: &Circuit, delta: Precision) -> Result<T> {
        let p = self.inner.query(c, delta)?;
        self.trace.lock().unwrap_or_else(|e| e.into_inner()).push(c.clone(), delta, p.clone());
        Ok(p)
    }

    fn is_exact(&self) -> bool {
        self.inner.is_exact()
    }

    fn name(&self) -> String {
        self.inner.name()
    }
}

/// Adds a fixed bias to every answer on circuits with at least one input,
/// clamped to `[0,1]`. A deliberately broken oracle for exercising the checkers.
pub struct BiasedOracle<'a, T> {
    inner: &'a dyn CountingOracle<T>,
    bias: T,
}

impl<'a, T: Scalar> BiasedOracle<'a, T> {
    pub fn new(inner: &'a dyn CountingOracle<T>, bias: T) -> Self {
        BiasedOracle { inner, bias }
    }
}

impl<T: Scalar> CountingOracle<T> for BiasedOracle<'_, T> {
    fn query(&self, c: &Circuit, delta: Precision) -> Result<T> {
        let p = self.inner.query(c, delta)?;
        if c.num_inputs() == 0 {
            return Ok(p);
        }
        let q = p + self.bias.clone();
        Ok(if q > T::one() {
            T::one()
        } else if q < T::zero() {
            T::zero()
        } else {
            q
        })
    }

    fn name(&self) -> String {
        format!("biased({})", self.inner.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axiom {
    Basic,
    Boundary,
    PrecisionConsistency,
    LocalConsistency,
}

/// A violated constraint: `measured > allowed`, witnessed by trace indices.
#[derive(Clone, Debug)]
pub struct Violation<T> {
    pub axiom: Axiom,
    pub entries: Vec<usize>,
    pub measured: T,
    pub allowed: T,
}

#[derive(Clone, Debug)]
pub struct AxiomReport<T> {
    pub violations: Vec<Violation<T>>,
    pub precision_pairs: usize,
    pub local_triples: usize,
    /// Largest `|p₁−p₂|` over equal-circuit pairs.
    pub max_precision_gap: T,
    /// Largest `|p − (p₀+p₁)/2|` over checked triples.
    pub max_local_gap: T,
}

impl<T: Scalar> AxiomReport<T> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn passed_except_local(&self) -> bool {
        self.violations.iter().all(|v| v.axiom == Axiom::LocalConsistency)
    }
}

/// Checks every trace entry against the axioms with slack `β`.
pub fn check_axioms<T: Scalar>(trace: &QueryTrace<T>, beta: Precision) -> Result<AxiomReport<T>> {
    let beta_v: T = beta.value();
    let two = T::one() + T::one();
    let mut report = AxiomReport {
        violations: Vec::new(),
        precision_pairs: 0,
        local_triples: 0,
        max_precision_gap: T::zero(),
        max_local_gap: T::zero(),
    };
    let mut by_circuit: HashMap<&Circuit, Vec<usize>> = HashMap::new();
    for (k, e) in trace.entries.iter().enumerate() {
        by_circuit.entry(e.circuit.as_ref()).or_default().push(k);
        if e.answer < T::zero() || e.answer > T::one() {
            report.violations.push(Violation {
                axiom: Axiom::Basic,
                entries: vec![k],
                measured: e.answer.clone(),
                allowed: T::one(),
            });
        }
        if e.circuit.num_outputs() == 1 {
            if let Some(b) = e.circuit.is_syntactically_constant()? {
                let want = if b { T::one() } else { T::zero() };
                if e.answer != want {
                    report.violations.push(Violation {
                        axiom: Axiom::Boundary,
                        entries: vec![k],
                        measured: (e.answer.clone() - want).abs(),
                        allowed: T::zero(),
                    });
                }
            }
        }
    }
    for idx in by_circuit.values() {
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                let (ei, ej) = (&trace.entries[i], &trace.entries[j]);
                let gap = (ei.answer.clone() - ej.answer.clone()).abs();
                let allowed = ei.precision.value::<T>() + ej.precision.value::<T>() + beta_v.clone();
                report.precision_pairs += 1;
                report.max_precision_gap = T::max_of(report.max_precision_gap.clone(), gap.clone());
                if gap > allowed {
                    report.violations.push(Violation {
                        axiom: Axiom::PrecisionConsistency,
                        entries: vec![i, j],
                        measured: gap,
                        allowed,
                    });
                }
            }
        }
    }
    for (k, e) in trace.entries.iter().enumerate() {
        if e.circuit.num_inputs() == 0 || e.circuit.num_outputs() != 1 {
            continue;
        }
        let find = |b: bool| -> Result<Option<usize>> {
            let child = e.circuit.fix_last(b)?;
            Ok(by_circuit
                .get(&child)
                .and_then(|idx| idx.iter().copied().find(|&j| trace.entries[j].precision == e.precision)))
        };
        let (Some(j0), Some(j1)) = (find(false)?, find(true)?) else { continue };
        let avg = (trace.entries[j0].answer.clone() + trace.entries[j1].answer.clone()) / two.clone();
        let gap = (e.answer.clone() - avg).abs();
        let allowed = two.clone() * e.precision.value::<T>() + beta_v.clone();
        report.local_triples += 1;
        report.max_local_gap = T::max_of(report.max_local_gap.clone(), gap.clone());
        if gap > allowed {
            report.violations.push(Violation {
                axiom: Axiom::LocalConsistency,
                entries: vec![k, j0, j1],
                measured: gap,
                allowed,
            });
        }
    }
    Ok(report)
}

/// A constraint failure found by the descent: the circuit reached after
/// fixing `suffix` on the right of the original.
#[derive(Clone, Debug)]
pub struct DescentViolation<T> {
    pub axiom: Axiom,
    pub circuit: Circuit,
    pub suffix: Vec<bool>,
    pub gap: T,
    pub allowed: T,
}

/// Descends from `c` by fixing the rightmost bit, always toward the child whose
/// answer deviates more from the exact count (ties to 0), and returns the first
/// node whose answer is not within `3/|Ξ|` of its children's average, or the
/// constant leaf if it violates Boundary. Queries use `|Ξ| = 10(n+1)·β⁻¹`;
/// `delta` only bounds `Ξ` from below.
pub fn find_local_violation<T: Scalar>(
    oracle: &dyn CountingOracle<T>,
    c: &Circuit,
    delta: Precision,
    beta: Precision,
    cap: usize,
) -> Result<Option<DescentViolation<T>>> {
    c.expect_single_output()?;
    let n = c.num_inputs() as u64;
    let xi = Precision::new((10 * (n + 1) * beta.inverse()).max(delta.inverse()))?;
    let slack = T::from_ratio(3, xi.inverse());
    let two = T::one() + T::one();
    let exact = |c: &Circuit| -> Result<T> {
        let r: BigRational = exact_count(c, cap)?;
        Ok(T::from_rational(&r))
    };
    let mut cur = c.clone();
    let mut suffix: Vec<bool> = Vec::new();
    loop {
        let q = oracle.query(&cur, xi)?;
        if cur.num_inputs() == 0 {
            let b = cur.is_syntactically_constant()?.expect("a circuit without inputs is constant");
            let want = if b { T::one() } else { T::zero() };
            if q != want {
                return Ok(Some(DescentViolation {
                    axiom: super::Axiom::Boundary,
                    circuit: cur,
                    suffix,
                    gap: (q - want).abs(),
                    allowed: T::zero(),
                }));
            }
            return Ok(None);
        }
        let c0 = cur.fix_last(false)?;
        let c1 = cur.fix_last(true)?;
        let q0 = oracle.query(&c0, xi)?;
        let q1 = oracle.query(&c1, xi)?;
        let gap = (q.clone() - (q0.clone() + q1.clone()) / two.clone()).abs();
        if gap > slack {
            return Ok(Some(DescentViolation {
                axiom: super::Axiom::LocalConsistency,
                circuit: cur,
                suffix,
                gap,
                allowed: slack,
            }));
        }
        let d0 = (q0 - exact(&c0)?).abs();
        let d1 = (q1 - exact(&c1)?).abs();
        let go_one = d1 > d0;
        suffix.insert(0, go_one);
        cur = if go_one { c1 } else { c0 };
    }
}
