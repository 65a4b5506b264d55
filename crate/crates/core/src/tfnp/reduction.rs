//! The mapping reduction from Refuter(Yao) to LossyCode over `nm` bits.
//!
//! The compressor reads `x` as `D`, runs `G`, and when the predictor reaches
//! rate `1/2 + δ` emits `enc(i−1) ∘ pad_s(P) ∘ code(y) ∘ D_{−i}`, zero-padded
//! to `nm − 1` bits, where `y_j = P(x^{(j)}_{<i}) ⊕ x^{(j)}_i`. Otherwise it
//! aborts to `0^{nm−1}`. The decompressor rebuilds the deleted bits as
//! `x^{(j)}_i = P(x^{(j)}_{<i}) ⊕ y_j` and falls back to `0^{nm}` on any
//! unparsable input.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::encoding::{decode_circuit, encode_circuit};
use super::lossy::{CircuitLossyCode, LossyCode};
use super::refuter::RefuterInstance;
use super::weightcode::WeightCode;
use crate::bits::{ceil_log2, expect_len, push_uint, read_uint, Bits};
use crate::circuit::Circuit;
use crate::error::{ApxError, Result};
use crate::oracle::FlatDistribution;

/// Which parameter check gates the reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `(δ²/10)·m ≥ s + ⌈log₂ n⌉ + 1` and the exact length check.
    Paper,
    /// Only the exact length check, for desk-scale instances where the
    /// asymptotic inequality cannot hold.
    ExactLength,
}

/// Parameter arithmetic of the reduction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionLayout {
    pub index_bits: usize,
    pub predictor_bits: usize,
    /// Largest admissible error weight `⌊(1/2 − δ)m⌋`, absent when `δ > 1/2`.
    pub max_errors: Option<usize>,
    pub codeword_bits: usize,
    pub residual_bits: usize,
    /// `⌈log₂ n⌉ + s + |codeword| + (n−1)m`.
    pub tuple_bits: usize,
    pub input_bits: usize,
}

impl ReductionLayout {
    pub fn new(inst: &RefuterInstance) -> Self {
        let (n, m) = (inst.n, inst.m);
        let slack = BigRational::new(1.into(), 2.into()) - &inst.delta;
        let max_errors = if slack.is_negative() {
            None
        } else {
            let k = (slack * BigRational::from_integer(BigInt::from(m))).floor().to_integer();
            Some(k.to_usize().expect("bounded by m"))
        };
        let codeword_bits = max_errors.map_or(0, |k| WeightCode::new(m, k).codeword_len());
        let index_bits = ceil_log2(n as u64);
        let residual_bits = (n - 1) * m;
        ReductionLayout {
            index_bits,
            predictor_bits: inst.s,
            max_errors,
            codeword_bits,
            residual_bits,
            tuple_bits: index_bits + inst.s + codeword_bits + residual_bits,
            input_bits: n * m,
        }
    }

    pub fn fits(&self) -> bool {
        self.tuple_bits < self.input_bits
    }
}

/// The produced LossyCode instance, as a program pair over `nm` bits.
#[derive(Clone, Debug)]
pub struct RefuterLossyCode {
    inst: RefuterInstance,
    layout: ReductionLayout,
    code: Option<WeightCode>,
}

pub fn refuter_to_lossycode(inst: &RefuterInstance, regime: Regime) -> Result<RefuterLossyCode> {
    let layout = ReductionLayout::new(inst);
    if regime == Regime::Paper && !inst.condition_holds() {
        return Err(ApxError::RegimeUnmet(format!(
            "(δ²/10)·m ≥ s + ⌈log₂ n⌉ + 1 fails for n={}, m={}, s={}",
            inst.n, inst.m, inst.s
        )));
    }
    if !layout.fits() {
        return Err(ApxError::RegimeUnmet(format!(
            "tuple length {} is not below nm = {}",
            layout.tuple_bits, layout.input_bits
        )));
    }
    let code = layout.max_errors.map(|k| WeightCode::new(inst.m, k));
    Ok(RefuterLossyCode { inst: inst.clone(), layout, code })
}

impl RefuterLossyCode {
    pub fn instance(&self) -> &RefuterInstance {
        &self.inst
    }

    pub fn layout(&self) -> &ReductionLayout {
        &self.layout
    }

    /// Reads `x` as the distribution it encodes.
    pub fn map_solution(&self, x: &[bool]) -> Result<FlatDistribution> {
        FlatDistribution::from_concat(x, self.inst.n, self.inst.m)
    }

    /// The tuple for `D`, or `None` when the compressor aborts.
    pub fn encode_tuple(&self, d: &FlatDistribution) -> Option<Bits> {
        let code = self.code.as_ref()?;
        let (i, p, _) = self.inst.run_generator(d).ok()?;
        let mut y = Vec::with_capacity(self.inst.m);
        for x in d.strings() {
            y.push(p.eval_bit(&x[..i - 1]).ok()? ^ x[i - 1]);
        }
        let cw = code.encode(&y).ok()?;
        let mut out = Vec::with_capacity(self.layout.input_bits - 1);
        push_uint(&mut out, (i - 1) as u64, self.layout.index_bits);
        let mut desc = encode_circuit(&p).ok()?;
        desc.resize(self.inst.s, false);
        out.extend(desc);
        out.extend(cw);
        for x in d.strings() {
            out.extend(x.iter().enumerate().filter(|&(t, _)| t != i - 1).map(|(_, &b)| b));
        }
        Some(out)
    }

    fn decode_tuple(&self, z: &[bool]) -> Option<Bits> {
        let (n, m) = (self.inst.n, self.inst.m);
        let code = self.code.as_ref()?;
        let mut pos = 0;
        let i = read_uint(z, &mut pos, self.layout.index_bits)? as usize + 1;
        if i > n {
            return None;
        }
        let desc = &z[pos..pos + self.inst.s];
        pos += self.inst.s;
        let (p, _) = decode_circuit(desc, i - 1).ok()?;
        let y = code.decode(&z[pos..pos + self.layout.codeword_bits]).ok()?;
        pos += self.layout.codeword_bits;
        let mut out = Vec::with_capacity(n * m);
        if n == 1 {
            // No residual bits: each string is its predicted bit alone.
            let guess = p.eval_bit(&[]).ok()?;
            out.extend(y.iter().map(|&yj| guess ^ yj));
            return Some(out);
        }
        for (j, rest) in z[pos..pos + self.layout.residual_bits].chunks(n - 1).enumerate() {
            let prefix = &rest[..i - 1];
            let bit = p.eval_bit(prefix).ok()? ^ y[j];
            out.extend_from_slice(prefix);
            out.push(bit);
            out.extend_from_slice(&rest[i - 1..]);
        }
        Some(out)
    }

    /// Exports both maps as circuits; `nm` must be within the cap.
    pub fn to_circuits(&self, cap: usize) -> Result<CircuitLossyCode> {
        let nm = self.layout.input_bits;
        let c = Circuit::from_function(nm, nm - 1, cap, |x| self.compress(x).expect("length fixed"))?;
        let d = Circuit::from_function(nm - 1, nm, cap, |y| self.decompress(y).expect("length fixed"))?;
        CircuitLossyCode::new(c, d)
    }
}

impl LossyCode for RefuterLossyCode {
    fn n(&self) -> usize {
        self.layout.input_bits
    }

    fn compress(&self, x: &[bool]) -> Result<Bits> {
        expect_len(x, self.layout.input_bits)?;
        let d = self.map_solution(x)?;
        let mut out = self.encode_tuple(&d).unwrap_or_default();
        out.resize(self.layout.input_bits - 1, false);
        Ok(out)
    }

    fn decompress(&self, z: &[bool]) -> Result<Bits> {
        expect_len(z, self.layout.input_bits - 1)?;
        Ok(self.decode_tuple(z).unwrap_or_else(|| vec![false; self.layout.input_bits]))
    }
}
