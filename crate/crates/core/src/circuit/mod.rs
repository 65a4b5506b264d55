//! Immutable multi-output Boolean circuits.
//!
//! Gates are stored in topological order: every argument refers to a strictly
//! earlier gate. Inputs are 1-based (`Input(1)` is `x₁`). An empty AND is 1,
//! an empty OR or XOR is 0.

mod build;
mod json;
mod ops;

pub use build::Builder;
pub use json::{CircuitFile, GateFile};
pub use ops::{InputSub, Permutation};

use crate::bits::{check_cap, expect_len, Bits};
use crate::error::{ApxError, Result};

/// Default bound on the number of input bits enumerated exhaustively.
pub const DEFAULT_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    And(Vec<usize>),
    Or(Vec<usize>),
    Xor(Vec<usize>),
    Not(usize),
    Const(bool),
    Input(usize),
}

impl Gate {
    pub fn args(&self) -> &[usize] {
        match self {
            Gate::And(a) | Gate::Or(a) | Gate::Xor(a) => a,
            Gate::Not(a) => std::slice::from_ref(a),
            Gate::Const(_) | Gate::Input(_) => &[],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Circuit {
    num_inputs: usize,
    gates: Vec<Gate>,
    outputs: Vec<usize>,
}

/// Lane patterns of the six low index bits inside a 64-input block.
const LOW_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

impl Circuit {
    /// Validates acyclicity, input ranges and the presence of an output.
    pub fn new(num_inputs: usize, gates: Vec<Gate>, outputs: Vec<usize>) -> Result<Self> {
        for (k, g) in gates.iter().enumerate() {
            if let Gate::Input(i) = g {
                if *i == 0 || *i > num_inputs {
                    return Err(ApxError::InvalidCircuit(format!("gate {k}: input {i} outside 1..={num_inputs}")));
                }
            }
            if let Some(a) = g.args().iter().find(|&&a| a >= k) {
                return Err(ApxError::InvalidCircuit(format!("gate {k}: argument {a} is not an earlier gate")));
            }
        }
        if outputs.is_empty() {
            return Err(ApxError::InvalidCircuit("no outputs".into()));
        }
        if let Some(o) = outputs.iter().find(|&&o| o >= gates.len()) {
            return Err(ApxError::InvalidCircuit(format!("output {o} refers to a missing gate")));
        }
        Ok(Circuit { num_inputs, gates, outputs })
    }

    pub(crate) fn from_parts_unchecked(num_inputs: usize, gates: Vec<Gate>, outputs: Vec<usize>) -> Self {
        debug_assert!(Circuit::new(num_inputs, gates.clone(), outputs.clone()).is_ok());
        Circuit { num_inputs, gates, outputs }
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn expect_single_output(&self) -> Result<()> {
        if self.outputs.len() == 1 {
            Ok(())
        } else {
            Err(ApxError::NotSingleOutput(self.outputs.len()))
        }
    }

    /// Gate-by-gate evaluation.
    pub fn eval(&self, x: &[bool]) -> Result<Bits> {
        expect_len(x, self.num_inputs)?;
        let mut val = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let v = match g {
                Gate::And(a) => a.iter().all(|&k| val[k]),
                Gate::Or(a) => a.iter().any(|&k| val[k]),
                Gate::Xor(a) => a.iter().fold(false, |acc, &k| acc ^ val[k]),
                Gate::Not(a) => !val[*a],
                Gate::Const(b) => *b,
                Gate::Input(i) => x[i - 1],
            };
            val.push(v);
        }
        Ok(self.outputs.iter().map(|&o| val[o]).collect())
    }

    /// Single-output evaluation.
    pub fn eval_bit(&self, x: &[bool]) -> Result<bool> {
        self.expect_single_output()?;
        Ok(self.eval(x)?[0])
    }

    /// Evaluates 64 inputs at once: bit `j` of `inputs[i]` is `x_{i+1}` in lane `j`.
    /// Gate values are left in `buf`; returns nothing so callers can read any gate.
    pub fn eval_words_into(&self, inputs: &[u64], buf: &mut Vec<u64>) {
        buf.clear();
        for g in &self.gates {
            let v = match g {
                Gate::And(a) => a.iter().fold(!0u64, |acc, &k| acc & buf[k]),
                Gate::Or(a) => a.iter().fold(0u64, |acc, &k| acc | buf[k]),
                Gate::Xor(a) => a.iter().fold(0u64, |acc, &k| acc ^ buf[k]),
                Gate::Not(a) => !buf[*a],
                Gate::Const(b) => {
                    if *b {
                        !0
                    } else {
                        0
                    }
                }
                Gate::Input(i) => inputs[i - 1],
            };
            buf.push(v);
        }
    }

    /// Output words for 64 lanes of input.
    pub fn eval_words(&self, inputs: &[u64]) -> Vec<u64> {
        let mut buf = Vec::with_capacity(self.gates.len());
        self.eval_words_into(inputs, &mut buf);
        self.outputs.iter().map(|&o| buf[o]).collect()
    }

    /// Calls `f(block, lane_mask, output_words)` for every block of 64 consecutive
    /// input indices; lane `j` of block `b` is the input with index `64b + j`.
    pub fn for_each_block<F: FnMut(u64, u64, &[u64])>(&self, cap: usize, mut f: F) -> Result<()> {
        let n = self.num_inputs;
        check_cap(n, cap)?;
        let low = n.min(6);
        let mask = if n >= 6 { !0u64 } else { (1u64 << (1usize << n)) - 1 };
        let blocks = if n > 6 { 1u64 << (n - 6) } else { 1 };
        let mut inputs = vec![0u64; n];
        for (i, w) in inputs.iter_mut().enumerate().take(low) {
            *w = LOW_PATTERNS[i];
        }
        let mut buf = Vec::with_capacity(self.gates.len());
        let mut outs = vec![0u64; self.outputs.len()];
        for b in 0..blocks {
            for (i, w) in inputs.iter_mut().enumerate().skip(6) {
                *w = if (b >> (i - 6)) & 1 == 1 { !0 } else { 0 };
            }
            self.eval_words_into(&inputs, &mut buf);
            for (o, w) in self.outputs.iter().zip(outs.iter_mut()) {
                *w = buf[*o];
            }
            f(b, mask, &outs);
        }
        Ok(())
    }

    /// Number of accepting inputs of a single-output circuit, by exhaustive enumeration.
    pub fn count_accepting(&self, cap: usize) -> Result<u64> {
        self.expect_single_output()?;
        let mut total = 0u64;
        self.for_each_block(cap, |_, mask, outs| total += (outs[0] & mask).count_ones() as u64)?;
        Ok(total)
    }

    /// Output code (output `j` at bit `j`) for every input index, in index order.
    pub fn output_codes(&self, cap: usize) -> Result<Vec<u64>> {
        if self.outputs.len() > 64 {
            return Err(ApxError::InvalidParameter("more than 64 outputs".into()));
        }
        check_cap(self.num_inputs, cap)?;
        let total = 1usize << self.num_inputs;
        let mut codes = Vec::with_capacity(total);
        self.for_each_block(cap, |_, _, outs| {
            let lanes = (total - codes.len()).min(64);
            for j in 0..lanes {
                let code = outs.iter().enumerate().fold(0u64, |acc, (k, w)| acc | (((w >> j) & 1) << k));
                codes.push(code);
            }
        })?;
        Ok(codes)
    }

    /// First accepting input in index order, if any.
    pub fn find_accepting(&self, cap: usize) -> Result<Option<Bits>> {
        self.expect_single_output()?;
        let mut found = None;
        self.for_each_block(cap, |b, mask, outs| {
            if found.is_none() {
                let w = outs[0] & mask;
                if w != 0 {
                    found = Some(b * 64 + w.trailing_zeros() as u64);
                }
            }
        })?;
        Ok(found.map(|idx| crate::bits::index_to_bits(idx, self.num_inputs)))
    }

    /// Exhaustive function equality; both circuits must agree on arity.
    pub fn function_equal(&self, other: &Circuit, cap: usize) -> Result<bool> {
        if self.num_inputs != other.num_inputs || self.outputs.len() != other.outputs.len() {
            return Ok(false);
        }
        Ok(self.output_codes(cap)? == other.output_codes(cap)?)
    }

    /// The output bit when no input is reachable from the (single) output.
    pub fn is_syntactically_constant(&self) -> Result<Option<bool>> {
        self.expect_single_output()?;
        let mut reach = vec![false; self.gates.len()];
        reach[self.outputs[0]] = true;
        for k in (0..self.gates.len()).rev() {
            if !reach[k] {
                continue;
            }
            if let Gate::Input(_) = self.gates[k] {
                return Ok(None);
            }
            for &a in self.gates[k].args() {
                reach[a] = true;
            }
        }
        let mut val = vec![false; self.gates.len()];
        for k in 0..self.gates.len() {
            if !reach[k] {
                continue;
            }
            val[k] = match &self.gates[k] {
                Gate::And(a) => a.iter().all(|&j| val[j]),
                Gate::Or(a) => a.iter().any(|&j| val[j]),
                Gate::Xor(a) => a.iter().fold(false, |acc, &j| acc ^ val[j]),
                Gate::Not(a) => !val[*a],
                Gate::Const(b) => *b,
                Gate::Input(_) => unreachable!("no input is reachable"),
            };
        }
        Ok(Some(val[self.outputs[0]]))
    }

    /// Input indices read by some gate reachable from an output.
    pub fn live_inputs(&self) -> Vec<usize> {
        let mut reach = vec![false; self.gates.len()];
        for &o in &self.outputs {
            reach[o] = true;
        }
        let mut live = vec![false; self.num_inputs + 1];
        for k in (0..self.gates.len()).rev() {
            if reach[k] {
                if let Gate::Input(i) = self.gates[k] {
                    live[i] = true;
                }
                for &a in self.gates[k].args() {
                    reach[a] = true;
                }
            }
        }
        (1..=self.num_inputs).filter(|&i| live[i]).collect()
    }
}
