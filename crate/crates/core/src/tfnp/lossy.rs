//! LossyCode: given a compressor `n → n−1` and a decompressor `n−1 → n`,
//! find `x` with `D(C(x)) ≠ x`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{check_cap, expect_len, index_to_bits, Bits};
use crate::circuit::{Builder, Circuit};
use crate::error::{ApxError, Result};

/// A compressor/decompressor pair on `n`-bit strings.
pub trait LossyCode: Send + Sync {
    fn n(&self) -> usize;
    fn compress(&self, x: &[bool]) -> Result<Bits>;
    fn decompress(&self, y: &[bool]) -> Result<Bits>;
}

/// The circuit form of an instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitLossyCode {
    pub compressor: Circuit,
    pub decompressor: Circuit,
}

impl CircuitLossyCode {
    pub fn new(compressor: Circuit, decompressor: Circuit) -> Result<Self> {
        let n = compressor.num_inputs();
        if n < 1 {
            return Err(ApxError::ZeroInputs);
        }
        if compressor.num_outputs() != n - 1 {
            return Err(ApxError::ArityMismatch(format!(
                "compressor has {} outputs, expected {}",
                compressor.num_outputs(),
                n - 1
            )));
        }
        if decompressor.num_inputs() != n - 1 || decompressor.num_outputs() != n {
            return Err(ApxError::ArityMismatch(format!(
                "decompressor is {}→{}, expected {}→{n}",
                decompressor.num_inputs(),
                decompressor.num_outputs(),
                n - 1
            )));
        }
        Ok(CircuitLossyCode { compressor, decompressor })
    }

    /// `C` drops `xₙ`, `D` appends a 0.
    pub fn drop_last(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(ApxError::InvalidParameter("drop-last needs n ≥ 2".into()));
        }
        let mut bc = Builder::new(n);
        let kept = bc.inputs(1..=n - 1);
        let c = bc.finish(kept);
        let mut bd = Builder::new(n - 1);
        let mut out = bd.inputs(1..=n - 1);
        out.push(bd.constant(false));
        let d = bd.finish(out);
        CircuitLossyCode::new(c, d)
    }

    /// Random gate-level compressor and decompressor.
    pub fn random<R: Rng + ?Sized>(n: usize, size: usize, rng: &mut R) -> Result<Self> {
        if n < 2 {
            return Err(ApxError::InvalidParameter("random instance needs n ≥ 2".into()));
        }
        let c = Circuit::random(n, n - 1, size, rng);
        let d = Circuit::random(n - 1, n, size, rng);
        CircuitLossyCode::new(c, d)
    }
}

impl LossyCode for CircuitLossyCode {
    fn n(&self) -> usize {
        self.compressor.num_inputs()
    }

    fn compress(&self, x: &[bool]) -> Result<Bits> {
        self.compressor.eval(x)
    }

    fn decompress(&self, y: &[bool]) -> Result<Bits> {
        self.decompressor.eval(y)
    }
}

pub fn check_lossycode_solution(inst: &dyn LossyCode, x: &[bool]) -> Result<bool> {
    expect_len(x, inst.n())?;
    Ok(inst.decompress(&inst.compress(x)?)? != x)
}

#[derive(Clone, Debug)]
pub struct LossySearch {
    pub solution: Option<Bits>,
    pub tries: usize,
}

/// Samples uniform `x` until `D(C(x)) ≠ x`; at least half of all strings qualify.
pub fn solve_lossycode_randomized(inst: &dyn LossyCode, seed: u64, max_tries: usize) -> Result<LossySearch> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for t in 1..=max_tries {
        let x: Bits = (0..inst.n()).map(|_| rng.gen()).collect();
        if check_lossycode_solution(inst, &x)? {
            return Ok(LossySearch { solution: Some(x), tries: t });
        }
    }
    Ok(LossySearch { solution: None, tries: max_tries })
}

/// Number of solutions, by enumeration.
pub fn count_lossycode_solutions(inst: &dyn LossyCode, cap: usize) -> Result<u64> {
    let n = inst.n();
    check_cap(n, cap)?;
    let mut count = 0;
    for idx in 0..1u64 << n {
        if check_lossycode_solution(inst, &index_to_bits(idx, n))? {
            count += 1;
        }
    }
    Ok(count)
}

/// First solution in index order.
pub fn find_lossycode_solution(inst: &dyn LossyCode, cap: usize) -> Result<Option<Bits>> {
    let n = inst.n();
    check_cap(n, cap)?;
    for idx in 0..1u64 << n {
        let x = index_to_bits(idx, n);
        if check_lossycode_solution(inst, &x)? {
            return Ok(Some(x));
        }
    }
    Ok(None)
}
