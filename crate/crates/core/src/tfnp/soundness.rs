//! Randomized soundness trials for the Refuter→LossyCode reduction.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

use super::encoding::description_size;
use super::lossy::solve_lossycode_randomized;
use super::reduction::{refuter_to_lossycode, ReductionLayout, Regime};
use super::refuter::{evaluate_refuter, BuiltinGenerator, RefuterInstance, RefuterVerdict};
use crate::bits::Bits;
use crate::circuit::Circuit;
use crate::error::Result;
use crate::oracle::FlatDistribution;

#[derive(Clone, Debug)]
pub struct SoundnessTrial {
    pub lossy_solution: Option<Bits>,
    pub tries: usize,
    /// The distribution the LossyCode solution encodes, with its verdict.
    pub mapped: Option<(FlatDistribution, RefuterVerdict)>,
}

impl SoundnessTrial {
    /// No solution was found, or the one found maps to a Refuter solution.
    pub fn sound(&self) -> bool {
        self.mapped.as_ref().is_none_or(|(_, v)| v.is_solution)
    }
}

/// Reduces `inst`, searches the LossyCode instance with up to `max_tries`
/// seeded samples, and re-checks the mapped distribution against `inst`.
pub fn reduction_soundness_trial(
    inst: &RefuterInstance,
    regime: Regime,
    seed: u64,
    max_tries: usize,
) -> Result<SoundnessTrial> {
    let code = refuter_to_lossycode(inst, regime)?;
    let search = solve_lossycode_randomized(&code, seed, max_tries)?;
    let mapped = match &search.solution {
        Some(x) => {
            let d = code.map_solution(x)?;
            let v = evaluate_refuter(inst, &d)?;
            Some((d, v))
        }
        None => None,
    };
    Ok(SoundnessTrial { lossy_solution: search.solution, tries: search.tries, mapped })
}

/// Description budget covering every predictor `g` can output on `n`-bit strings.
fn budget(g: &BuiltinGenerator, n: usize) -> Result<usize> {
    let mut circuits = Vec::new();
    match g {
        BuiltinGenerator::Constant { index, .. } | BuiltinGenerator::Majority { index } => {
            circuits.push(Circuit::constant(index - 1, false));
            circuits.push(Circuit::constant(index - 1, true));
        }
        BuiltinGenerator::CopyPrevious { index } => circuits.push(Circuit::projection(index - 1, index - 1)?),
        BuiltinGenerator::BestSingle | BuiltinGenerator::Circuit { .. } => {
            for i in 1..=n {
                circuits.push(Circuit::constant(i - 1, false));
                circuits.push(Circuit::constant(i - 1, true));
                for j in 1..i {
                    let p = Circuit::projection(i - 1, j)?;
                    circuits.push(p.negate());
                    circuits.push(p);
                }
            }
        }
    }
    circuits.iter().map(description_size).try_fold(0, |acc, s| s.map(|s| acc.max(s)))
}

/// A random built-in instance whose reduction fits the exact-length regime.
pub fn random_exact_regime_instance<R: Rng + ?Sized>(rng: &mut R) -> Result<RefuterInstance> {
    let deltas = [(1, 4), (5, 16), (3, 8), (7, 16)];
    loop {
        let n = rng.gen_range(2..=3);
        let m = rng.gen_range(10..=16);
        let &(p, q) = deltas.choose(rng).expect("nonempty");
        let index = rng.gen_range(2..=n);
        let g = match rng.gen_range(0..4) {
            0 => BuiltinGenerator::Constant { index, value: rng.gen() },
            1 => BuiltinGenerator::Majority { index },
            2 => BuiltinGenerator::CopyPrevious { index },
            _ => BuiltinGenerator::BestSingle,
        };
        let s = budget(&g, n)?;
        let delta = BigRational::new(BigInt::from(p), BigInt::from(q));
        let inst = RefuterInstance::builtin(n, m, s, delta, g)?;
        if ReductionLayout::new(&inst).fits() {
            return Ok(inst);
        }
    }
}
