//! Bit-string helpers.
//!
//! A bit-string is a `[bool]` whose element 0 is `x₁`. The integer index of a
//! string is `Σ xᵢ·2^{i−1}`, so `xₙ` is the most significant bit and the
//! "rightmost" bit fixed by `fix_last`.

use crate::error::{ApxError, Result};

pub type Bits = Vec<bool>;

/// Parses a string of `0`/`1` characters; `x₁` is the first character.
pub fn parse_bits(s: &str) -> Result<Bits> {
    s.trim()
        .chars()
        .map(|ch| match ch {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(ApxError::Parse(format!("bad bit character {other:?}"))),
        })
        .collect()
}

pub fn format_bits(x: &[bool]) -> String {
    x.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// The `n`-bit string with integer index `idx`.
pub fn index_to_bits(idx: u64, n: usize) -> Bits {
    (0..n).map(|i| i < 64 && (idx >> i) & 1 == 1).collect()
}

/// Integer index of a string of at most 64 bits.
pub fn bits_to_index(x: &[bool]) -> u64 {
    x.iter().enumerate().fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i))
}

pub fn weight(x: &[bool]) -> usize {
    x.iter().filter(|&&b| b).count()
}

pub fn parity(x: &[bool]) -> bool {
    x.iter().fold(false, |acc, &b| acc ^ b)
}

pub fn xor(a: &[bool], b: &[bool]) -> Bits {
    a.iter().zip(b).map(|(&p, &q)| p ^ q).collect()
}

/// Inner product mod 2.
pub fn inner(a: &[bool], b: &[bool]) -> bool {
    a.iter().zip(b).fold(false, |acc, (&p, &q)| acc ^ (p & q))
}

/// `⌈log₂ k⌉` for `k ≥ 1`, and 0 for `k ≤ 1`.
pub fn ceil_log2(k: u64) -> usize {
    if k <= 1 {
        0
    } else {
        (64 - (k - 1).leading_zeros()) as usize
    }
}

/// Writes `value` into `width` bits, most significant bit first.
pub fn push_uint(out: &mut Bits, value: u64, width: usize) {
    for j in (0..width).rev() {
        out.push(j < 64 && (value >> j) & 1 == 1);
    }
}

/// Reads a `width`-bit unsigned integer, most significant bit first.
pub fn read_uint(bits: &[bool], pos: &mut usize, width: usize) -> Option<u64> {
    if *pos + width > bits.len() || width > 64 {
        return None;
    }
    let mut v = 0u64;
    for j in 0..width {
        v = (v << 1) | bits[*pos + j] as u64;
    }
    *pos += width;
    Some(v)
}

/// Elias-gamma code of `v ≥ 1`.
pub fn push_gamma(out: &mut Bits, v: u64) {
    debug_assert!(v >= 1);
    let len = 64 - v.leading_zeros() as usize;
    out.extend(std::iter::repeat_n(false, len - 1));
    push_uint(out, v, len);
}

pub fn read_gamma(bits: &[bool], pos: &mut usize) -> Option<u64> {
    let mut zeros = 0;
    while *pos + zeros < bits.len() && !bits[*pos + zeros] {
        zeros += 1;
        if zeros > 63 {
            return None;
        }
    }
    *pos += zeros;
    read_uint(bits, pos, zeros + 1)
}

/// Checks `x.len() == n`.
pub fn expect_len(x: &[bool], n: usize) -> Result<()> {
    if x.len() == n {
        Ok(())
    } else {
        Err(ApxError::LengthMismatch { expected: n, got: x.len() })
    }
}

/// Checks that `2^n` inputs may be enumerated under `cap`.
pub fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n <= cap && n < 64 {
        Ok(())
    } else {
        Err(ApxError::CapExceeded { needed: n, cap })
    }
}
