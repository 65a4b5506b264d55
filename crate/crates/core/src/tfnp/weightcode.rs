//! Enumerative coding of bounded-weight strings.
//!
//! All strings of length `m` and weight at most `k` are ranked jointly in
//! lexicographic order (`0 < 1`, `x₁` most significant). The codeword is the
//! rank written in `⌈log₂ N(m,k)⌉` bits, where `N(r,k) = Σ_{j≤k} C(r,j)`.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::bits::{weight, Bits};
use crate::error::{ApxError, Result};

/// `N(r, k) = Σ_{j≤k} C(r, j)`.
pub fn bounded_weight_count(r: usize, k: usize) -> BigUint {
    let mut term = BigUint::one();
    let mut sum = BigUint::one();
    for j in 0..k.min(r) {
        term = term * BigUint::from(r - j) / BigUint::from(j + 1);
        sum += &term;
    }
    sum
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightCode {
    m: usize,
    k: usize,
    count: BigUint,
    codeword_len: usize,
}

impl WeightCode {
    pub fn new(m: usize, k: usize) -> Self {
        let count = bounded_weight_count(m, k);
        let codeword_len = if count.is_one() { 0 } else { (&count - 1u32).bits() as usize };
        WeightCode { m, k, count, codeword_len }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of codable strings.
    pub fn count(&self) -> &BigUint {
        &self.count
    }

    pub fn codeword_len(&self) -> usize {
        self.codeword_len
    }

    pub fn rank(&self, y: &[bool]) -> Result<BigUint> {
        crate::bits::expect_len(y, self.m)?;
        let w = weight(y);
        if w > self.k {
            return Err(ApxError::InvalidParameter(format!("weight {w} exceeds the cap {}", self.k)));
        }
        let mut rank = BigUint::zero();
        let mut budget = self.k;
        for (p, &bit) in y.iter().enumerate() {
            if bit {
                // Every string agreeing so far with a 0 here precedes y.
                rank += bounded_weight_count(self.m - p - 1, budget);
                budget -= 1;
            }
        }
        Ok(rank)
    }

    pub fn unrank(&self, rank: &BigUint) -> Result<Bits> {
        if rank >= &self.count {
            return Err(ApxError::OutOfRange(format!("rank {rank} is not below {}", self.count)));
        }
        let mut r = rank.clone();
        let mut budget = self.k;
        let mut y = Vec::with_capacity(self.m);
        for p in 0..self.m {
            let zeros = bounded_weight_count(self.m - p - 1, budget);
            if r < zeros {
                y.push(false);
            } else {
                r -= zeros;
                budget -= 1;
                y.push(true);
            }
        }
        Ok(y)
    }

    /// The rank in `codeword_len` bits, most significant first.
    pub fn encode(&self, y: &[bool]) -> Result<Bits> {
        let rank = self.rank(y)?;
        Ok((0..self.codeword_len).rev().map(|j| rank.bit(j as u64)).collect())
    }

    pub fn decode(&self, cw: &[bool]) -> Result<Bits> {
        crate::bits::expect_len(cw, self.codeword_len)?;
        let rank = cw.iter().fold(BigUint::zero(), |acc, &b| (acc << 1u32) + BigUint::from(b as u8));
        self.unrank(&rank)
    }
}
