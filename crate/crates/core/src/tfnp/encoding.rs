//! Self-delimiting bit encoding of single-output circuits, used as the
//! predictor description whose length is bounded by `s`.
//!
//! Layout: `γ(#gates)`, then per gate a 3-bit opcode followed by its
//! operands. `INPUT` stores `i−1` in `⌈log₂ n_in⌉` bits; every gate reference
//! made by gate `j` is stored in `⌈log₂ j⌉` bits; `AND`/`OR`/`XOR` store
//! `γ(arity+1)` before their arguments. The output is the last gate.

use crate::bits::{ceil_log2, push_gamma, push_uint, read_gamma, read_uint, Bits};
use crate::circuit::{Circuit, Gate};
use crate::error::{ApxError, Result};

const OP_AND: u64 = 0;
const OP_OR: u64 = 1;
const OP_XOR: u64 = 2;
const OP_NOT: u64 = 3;
const OP_CONST0: u64 = 4;
const OP_CONST1: u64 = 5;
const OP_INPUT: u64 = 6;

/// Encodes the gates feeding the single output; gates after it are dropped.
pub fn encode_circuit(c: &Circuit) -> Result<Bits> {
    c.expect_single_output()?;
    let out = c.outputs()[0];
    let gates = &c.gates()[..=out];
    let in_width = ceil_log2(c.num_inputs() as u64);
    let mut bits = Vec::new();
    push_gamma(&mut bits, gates.len() as u64);
    for (j, g) in gates.iter().enumerate() {
        let ref_width = ceil_log2(j as u64);
        let nary = |bits: &mut Bits, op: u64, args: &[usize]| {
            push_uint(bits, op, 3);
            push_gamma(bits, args.len() as u64 + 1);
            for &a in args {
                push_uint(bits, a as u64, ref_width);
            }
        };
        match g {
            Gate::And(a) => nary(&mut bits, OP_AND, a),
            Gate::Or(a) => nary(&mut bits, OP_OR, a),
            Gate::Xor(a) => nary(&mut bits, OP_XOR, a),
            Gate::Not(a) => {
                push_uint(&mut bits, OP_NOT, 3);
                push_uint(&mut bits, *a as u64, ref_width);
            }
            Gate::Const(v) => push_uint(&mut bits, if *v { OP_CONST1 } else { OP_CONST0 }, 3),
            Gate::Input(i) => {
                push_uint(&mut bits, OP_INPUT, 3);
                push_uint(&mut bits, *i as u64 - 1, in_width);
            }
        }
    }
    Ok(bits)
}

/// Number of bits in [`encode_circuit`]'s output.
pub fn description_size(c: &Circuit) -> Result<usize> {
    encode_circuit(c).map(|b| b.len())
}

/// Decodes a prefix of `bits` as a circuit over `num_inputs` inputs and
/// returns it with the number of bits consumed.
pub fn decode_circuit(bits: &[bool], num_inputs: usize) -> Result<(Circuit, usize)> {
    let bad = |what: &str| ApxError::Parse(format!("circuit description: {what}"));
    let mut pos = 0;
    let count = read_gamma(bits, &mut pos).ok_or_else(|| bad("missing gate count"))? as usize;
    if count > bits.len() {
        return Err(bad("gate count exceeds description length"));
    }
    let in_width = ceil_log2(num_inputs as u64);
    let mut gates = Vec::with_capacity(count);
    for j in 0..count {
        let ref_width = ceil_log2(j as u64);
        let op = read_uint(bits, &mut pos, 3).ok_or_else(|| bad("truncated opcode"))?;
        let read_ref = |pos: &mut usize| -> Result<usize> {
            let a = read_uint(bits, pos, ref_width).ok_or_else(|| bad("truncated reference"))? as usize;
            if a >= j {
                return Err(bad("forward reference"));
            }
            Ok(a)
        };
        let gate = match op {
            OP_AND | OP_OR | OP_XOR => {
                let arity = read_gamma(bits, &mut pos).ok_or_else(|| bad("truncated arity"))? as usize - 1;
                if arity > bits.len() {
                    return Err(bad("arity exceeds description length"));
                }
                let args = (0..arity).map(|_| read_ref(&mut pos)).collect::<Result<Vec<_>>>()?;
                match op {
                    OP_AND => Gate::And(args),
                    OP_OR => Gate::Or(args),
                    _ => Gate::Xor(args),
                }
            }
            OP_NOT => Gate::Not(read_ref(&mut pos)?),
            OP_CONST0 => Gate::Const(false),
            OP_CONST1 => Gate::Const(true),
            OP_INPUT => {
                let i = read_uint(bits, &mut pos, in_width).ok_or_else(|| bad("truncated input index"))? as usize;
                if i >= num_inputs {
                    return Err(bad("input index out of range"));
                }
                Gate::Input(i + 1)
            }
            _ => return Err(bad("unknown opcode")),
        };
        gates.push(gate);
    }
    if count == 0 {
        return Err(bad("empty circuit"));
    }
    let circuit = Circuit::new(num_inputs, gates, vec![count - 1])?;
    Ok((circuit, pos))
}
