//! Linearity testing, self-correction and decoding.

use crate::bits::{index_to_bits, Bits};
use crate::circuit::{Builder, Circuit};
use crate::error::Result;
use crate::oracle::{effective, CountingOracle, Precision};
use crate::scalar::Scalar;

/// `x ↦ ⟨x, z⟩ mod 2`.
pub fn linear_function(z: &[bool]) -> Circuit {
    let mut b = Builder::new(z.len());
    let terms = z.iter().enumerate().filter(|(_, &zi)| zi).map(|(i, _)| b.input(i + 1)).collect();
    let out = b.xor(terms);
    b.finish_bit(out)
}

/// `T(x,y) = [C(x)⊕C(y) ≠ C(x⊕y)]` over `2n` inputs.
pub fn blr_test_circuit(c: &Circuit) -> Result<Circuit> {
    c.expect_single_output()?;
    let n = c.num_inputs();
    let mut b = Builder::new(2 * n);
    let x = b.inputs(1..=n);
    let y = b.inputs(n + 1..=2 * n);
    let xy: Vec<usize> = x.iter().zip(&y).map(|(&p, &q)| b.xor(vec![p, q])).collect();
    let cx = b.embed_bit(c, &x);
    let cy = b.embed_bit(c, &y);
    let cxy = b.embed_bit(c, &xy);
    let t = b.xor(vec![cx, cy, cxy]);
    Ok(b.finish_bit(t))
}

/// Test failure rate `𝐏(T_{C,BLR})`.
pub fn blr_test<T: Scalar>(c: &Circuit, oracle: &dyn CountingOracle<T>, delta: Precision) -> Result<T> {
    oracle.query(&blr_test_circuit(c)?, delta)
}

/// `D_{x,b}(r) = [C(x⊕r) ⊕ C(r) = b]`.
fn vote_circuit(c: &Circuit, x: &[bool], bit: bool) -> Result<Circuit> {
    let n = c.num_inputs();
    let shifted = c.xor_shift(x)?;
    let mut b = Builder::new(n);
    let r = b.inputs(1..=n);
    let a = b.embed_bit(&shifted, &r);
    let cr = b.embed_bit(c, &r);
    let k = b.constant(!bit);
    let v = b.xor(vec![a, cr, k]);
    Ok(b.finish_bit(v))
}

#[derive(Clone, Debug)]
pub struct SelfCorrection<T> {
    pub bit: Option<bool>,
    pub prob_zero: T,
    pub prob_one: T,
    pub threshold: T,
}

/// Returns the bit `b` whose vote `𝐏(D_{x,b})` reaches `1 − 4ε − (4δ+β)`;
/// if both do, the larger (ties to 0).
pub fn blr_self_correct<T: Scalar>(
    c: &Circuit,
    x: &[bool],
    oracle: &dyn CountingOracle<T>,
    delta: Precision,
    beta: Precision,
    eps: &T,
) -> Result<SelfCorrection<T>> {
    let four = T::from_count(4);
    let threshold =
        T::one() - four.clone() * eps.clone() - (four * effective(oracle, delta) + effective::<T>(oracle, beta));
    let prob_zero = oracle.query(&vote_circuit(c, x, false)?, delta)?;
    let prob_one = oracle.query(&vote_circuit(c, x, true)?, delta)?;
    let ok0 = prob_zero >= threshold;
    let ok1 = prob_one >= threshold;
    let bit = match (ok0, ok1) {
        (true, true) => Some(prob_one > prob_zero),
        (true, false) => Some(false),
        (false, true) => Some(true),
        (false, false) => None,
    };
    Ok(SelfCorrection { bit, prob_zero, prob_one, threshold })
}

/// `T_{C,z}(x) = [C(x) ≠ ⟨x,z⟩]`.
pub fn disagreement_circuit(c: &Circuit, z: &[bool]) -> Result<Circuit> {
    c.expect_single_output()?;
    let n = c.num_inputs();
    let lin = linear_function(z);
    let mut b = Builder::new(n);
    let x = b.inputs(1..=n);
    let a = b.embed_bit(c, &x);
    let l = b.embed_bit(&lin, &x);
    let d = b.xor(vec![a, l]);
    Ok(b.finish_bit(d))
}

#[derive(Clone, Debug)]
pub struct BlrDecodeReport<T> {
    /// `z_i = g(e_i)`, absent if some coordinate did not self-correct.
    pub z: Option<Bits>,
    pub test_rate: T,
    /// Whether the test rate is at most `ε`.
    pub precondition_ok: bool,
    /// `𝐏(T_{C,z})` when `z` was decoded.
    pub disagreement: Option<T>,
    /// `5ε + 6δ + β`.
    pub bound: T,
    pub within_bound: Option<bool>,
}

/// Decodes a linear function from a circuit passing the test at rate `ε`.
pub fn blr_decode<T: Scalar>(
    c: &Circuit,
    oracle: &dyn CountingOracle<T>,
    delta: Precision,
    beta: Precision,
    eps: &T,
) -> Result<BlrDecodeReport<T>> {
    let n = c.num_inputs();
    let test_rate = blr_test(c, oracle, delta)?;
    let mut z = Some(Vec::with_capacity(n));
    for i in 0..n {
        let e = index_to_bits(1u64 << i, n);
        match blr_self_correct(c, &e, oracle, delta, beta, eps)?.bit {
            Some(bit) => z.as_mut().map(|z| z.push(bit)),
            None => {
                z = None;
                break;
            }
        };
    }
    let bound =
        T::from_count(5) * eps.clone() + T::from_count(6) * effective(oracle, delta) + effective::<T>(oracle, beta);
    let disagreement = match &z {
        Some(z) => Some(oracle.query(&disagreement_circuit(c, z)?, delta)?),
        None => None,
    };
    let within_bound = disagreement.as_ref().map(|d| *d <= bound);
    Ok(BlrDecodeReport { precondition_ok: test_rate <= *eps, z, test_rate, disagreement, bound, within_bound })
}
