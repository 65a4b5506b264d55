//! Refuter(Yao): find a flat distribution on which a given predictor
//! generator fails to predict with advantage `δ`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::encoding::{decode_circuit, description_size};
use crate::bits::{ceil_log2, read_uint, Bits};
use crate::circuit::Circuit;
use crate::error::{ApxError, Result};
use crate::oracle::FlatDistribution;
use crate::scalar::{parse_rational, rational_text};

/// A deterministic map from distributions to `(i, P)` with `P : {0,1}^{i−1} → {0,1}`.
pub trait PredictorGenerator: Send + Sync {
    fn name(&self) -> String;

    /// `s` is the instance's description budget, needed by generators whose
    /// output is a raw description.
    fn generate(&self, d: &FlatDistribution, s: usize) -> Result<(usize, Circuit)>;

    /// Serializable form, when one exists.
    fn to_builtin(&self) -> Option<BuiltinGenerator> {
        None
    }
}

/// Named generators, plus a raw generator circuit as in the problem definition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BuiltinGenerator {
    /// Always predicts `value` for bit `index`.
    Constant { index: usize, value: bool },
    /// Predicts the majority value of bit `index` in `D` (ties to 0).
    Majority { index: usize },
    /// Predicts `x_index = x_{index−1}`.
    CopyPrevious { index: usize },
    /// The best predictor among constants and (negated) single earlier bits,
    /// over all indices; first maximum in enumeration order.
    BestSingle,
    /// A circuit `nm → ⌈log₂ n⌉ + s` whose output is `i−1` (most significant
    /// bit first) followed by the predictor description.
    Circuit { circuit: Circuit },
}

fn single_bit_candidates(i: usize) -> Result<Vec<Circuit>> {
    let mut out = vec![Circuit::constant(i - 1, false), Circuit::constant(i - 1, true)];
    for j in 1..i {
        let p = Circuit::projection(i - 1, j)?;
        out.push(p.negate());
        out.push(p);
    }
    Ok(out)
}

impl BuiltinGenerator {
    fn check_index(index: usize, n: usize) -> Result<()> {
        if index == 0 || index > n {
            return Err(ApxError::OutOfRange(format!("bit index {index} outside 1..={n}")));
        }
        Ok(())
    }
}

impl PredictorGenerator for BuiltinGenerator {
    fn name(&self) -> String {
        match self {
            BuiltinGenerator::Constant { index, value } => format!("constant({index},{})", *value as u8),
            BuiltinGenerator::Majority { index } => format!("majority({index})"),
            BuiltinGenerator::CopyPrevious { index } => format!("copy-previous({index})"),
            BuiltinGenerator::BestSingle => "best-single".into(),
            BuiltinGenerator::Circuit { .. } => "circuit".into(),
        }
    }

    fn generate(&self, d: &FlatDistribution, s: usize) -> Result<(usize, Circuit)> {
        let n = d.n();
        match self {
            BuiltinGenerator::Constant { index, value } => {
                Self::check_index(*index, n)?;
                Ok((*index, Circuit::constant(index - 1, *value)))
            }
            BuiltinGenerator::Majority { index } => {
                Self::check_index(*index, n)?;
                let ones = d.strings().iter().filter(|x| x[index - 1]).count();
                Ok((*index, Circuit::constant(index - 1, 2 * ones > d.len())))
            }
            BuiltinGenerator::CopyPrevious { index } => {
                Self::check_index(*index, n)?;
                if *index < 2 {
                    return Err(ApxError::OutOfRange("copy-previous needs index ≥ 2".into()));
                }
                Ok((*index, Circuit::projection(index - 1, index - 1)?))
            }
            BuiltinGenerator::BestSingle => {
                let mut best: Option<(usize, usize, Circuit)> = None;
                for i in 1..=n {
                    for p in single_bit_candidates(i)? {
                        let hits = successes(d, i, &p)?;
                        if best.as_ref().is_none_or(|(h, _, _)| hits > *h) {
                            best = Some((hits, i, p));
                        }
                    }
                }
                let (_, i, p) = best.expect("n ≥ 1");
                Ok((i, p))
            }
            BuiltinGenerator::Circuit { circuit } => {
                let w = ceil_log2(n as u64);
                if circuit.num_inputs() != n * d.len() || circuit.num_outputs() != w + s {
                    return Err(ApxError::ArityMismatch(format!(
                        "generator circuit is {}→{}, expected {}→{}",
                        circuit.num_inputs(),
                        circuit.num_outputs(),
                        n * d.len(),
                        w + s
                    )));
                }
                let out = circuit.eval(&d.to_concat())?;
                let mut pos = 0;
                let i = read_uint(&out, &mut pos, w).expect("width checked") as usize + 1;
                Self::check_index(i, n)?;
                let (p, _) = decode_circuit(&out[w..], i - 1)?;
                Ok((i, p))
            }
        }
    }

    fn to_builtin(&self) -> Option<BuiltinGenerator> {
        Some(self.clone())
    }
}

/// Number of strings `x` in `D` with `P(x_{<i}) = x_i`.
pub fn successes(d: &FlatDistribution, i: usize, p: &Circuit) -> Result<usize> {
    let mut hits = 0;
    for x in d.strings() {
        if p.eval_bit(&x[..i - 1])? == x[i - 1] {
            hits += 1;
        }
    }
    Ok(hits)
}

#[derive(Clone)]
pub struct RefuterInstance {
    pub n: usize,
    pub m: usize,
    pub s: usize,
    pub delta: BigRational,
    pub generator: Arc<dyn PredictorGenerator>,
}

impl fmt::Debug for RefuterInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RefuterInstance")
            .field("n", &self.n)
            .field("m", &self.m)
            .field("s", &self.s)
            .field("delta", &rational_text(&self.delta))
            .field("generator", &self.generator.name())
            .finish()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RefuterInstanceFile {
    pub n: usize,
    pub m: usize,
    pub s: usize,
    pub delta: String,
    pub generator: BuiltinGenerator,
}

impl RefuterInstance {
    pub fn new(
        n: usize,
        m: usize,
        s: usize,
        delta: BigRational,
        generator: Arc<dyn PredictorGenerator>,
    ) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(ApxError::InvalidParameter("refuter instance needs n, m ≥ 1".into()));
        }
        let zero = BigRational::from_integer(0.into());
        let one = BigRational::from_integer(1.into());
        if delta < zero || delta > one {
            return Err(ApxError::InvalidParameter(format!("advantage {} outside [0,1]", rational_text(&delta))));
        }
        Ok(RefuterInstance { n, m, s, delta, generator })
    }

    pub fn builtin(n: usize, m: usize, s: usize, delta: BigRational, g: BuiltinGenerator) -> Result<Self> {
        RefuterInstance::new(n, m, s, delta, Arc::new(g))
    }

    /// `(δ²/10)·m ≥ s + ⌈log₂ n⌉ + 1`.
    pub fn condition_holds(&self) -> bool {
        let lhs = &self.delta * &self.delta * BigRational::new(BigInt::from(self.m), BigInt::from(10));
        let rhs = BigRational::from_integer(BigInt::from(self.s + ceil_log2(self.n as u64) + 1));
        lhs >= rhs
    }

    /// `1/2 + δ`.
    pub fn threshold(&self) -> BigRational {
        BigRational::new(1.into(), 2.into()) + &self.delta
    }

    pub fn to_file(&self) -> Result<RefuterInstanceFile> {
        let generator = self
            .generator
            .to_builtin()
            .ok_or_else(|| ApxError::InvalidParameter("generator has no serializable form".into()))?;
        Ok(RefuterInstanceFile { n: self.n, m: self.m, s: self.s, delta: rational_text(&self.delta), generator })
    }

    pub fn from_file(f: &RefuterInstanceFile) -> Result<Self> {
        let delta = parse_rational(&f.delta).ok_or_else(|| ApxError::Parse(format!("bad rational {:?}", f.delta)))?;
        RefuterInstance::builtin(f.n, f.m, f.s, delta, f.generator.clone())
    }

    /// Runs `G` and validates its output against the instance parameters.
    pub fn run_generator(&self, d: &FlatDistribution) -> Result<(usize, Circuit, usize)> {
        if d.n() != self.n {
            return Err(ApxError::LengthMismatch { expected: self.n, got: d.n() });
        }
        if d.len() != self.m {
            return Err(ApxError::InvalidParameter(format!(
                "distribution has {} strings, expected {}",
                d.len(),
                self.m
            )));
        }
        let (i, p) = self.generator.generate(d, self.s)?;
        if i == 0 || i > self.n {
            return Err(ApxError::OutOfRange(format!("generator index {i} outside 1..={}", self.n)));
        }
        if p.num_inputs() != i - 1 {
            return Err(ApxError::ArityMismatch(format!(
                "predictor reads {} bits, expected {}",
                p.num_inputs(),
                i - 1
            )));
        }
        let size = description_size(&p)?;
        if size > self.s {
            return Err(ApxError::InvalidParameter(format!(
                "predictor description of {size} bits exceeds s = {}",
                self.s
            )));
        }
        Ok((i, p, size))
    }
}

#[derive(Clone, Debug)]
pub struct RefuterVerdict {
    pub index: usize,
    pub predictor: Circuit,
    pub description_bits: usize,
    pub successes: usize,
    pub success_rate: BigRational,
    pub is_solution: bool,
}

/// Exact prediction rate of `G(D)` on `D`; a solution has rate `< 1/2 + δ`.
pub fn evaluate_refuter(inst: &RefuterInstance, d: &FlatDistribution) -> Result<RefuterVerdict> {
    let (index, predictor, description_bits) = inst.run_generator(d)?;
    let hits = successes(d, index, &predictor)?;
    let success_rate = BigRational::new(BigInt::from(hits), BigInt::from(inst.m));
    let is_solution = success_rate < inst.threshold();
    Ok(RefuterVerdict { index, predictor, description_bits, successes: hits, success_rate, is_solution })
}

pub fn check_refuter_solution(inst: &RefuterInstance, d: &FlatDistribution) -> Result<bool> {
    evaluate_refuter(inst, d).map(|v| v.is_solution)
}

#[derive(Clone, Debug)]
pub struct RefuterSearch {
    pub solution: Option<FlatDistribution>,
    pub tries: usize,
    /// Success rate of the generator on the last sample.
    pub last_success_rate: Option<BigRational>,
}

pub fn random_distribution<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> FlatDistribution {
    let strings: Vec<Bits> = (0..m).map(|_| (0..n).map(|_| rng.gen()).collect()).collect();
    FlatDistribution::new(strings).expect("m ≥ 1 strings of equal length")
}

/// Samples uniform distributions until one is a solution.
pub fn solve_refuter_randomized(inst: &RefuterInstance, seed: u64, max_tries: usize) -> Result<RefuterSearch> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut last = None;
    for t in 1..=max_tries {
        let d = random_distribution(inst.n, inst.m, &mut rng);
        let v = evaluate_refuter(inst, &d)?;
        last = Some(v.success_rate);
        if v.is_solution {
            return Ok(RefuterSearch { solution: Some(d), tries: t, last_success_rate: last });
        }
    }
    Ok(RefuterSearch { solution: None, tries: max_tries, last_success_rate: last })
}
