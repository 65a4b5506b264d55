//! Iterated block compression: stretch amplification of a randomized
//! one-bit scheme and the worst-case scheme built from an average-case one
//! by per-round XOR masks.
//!
//! Round `i` parses `z_{i−1}` as `x_1 ∘ … ∘ x_k ∘ y_i` with `k = ⌊|z_{i−1}|/n⌋`
//! and sets `z_i = x'_1 ∘ … ∘ x'_k`. The output is `z_d ∘ y_1 ∘ … ∘ y_d ∘ sd_1 ∘ … ∘ sd_d`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::bits::{check_cap, expect_len, index_to_bits, xor, Bits};
use crate::circuit::Circuit;
use crate::error::{ApxError, Result};

/// A one-bit compression scheme: `C : n + r → n − 1`, `D : n − 1 → n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseScheme {
    pub n: usize,
    pub r: usize,
    pub compressor: Circuit,
    pub decompressor: Circuit,
}

impl BaseScheme {
    pub fn new(n: usize, r: usize, compressor: Circuit, decompressor: Circuit) -> Result<Self> {
        if n < 2 {
            return Err(ApxError::InvalidParameter("block length must be at least 2".into()));
        }
        if compressor.num_inputs() != n + r || compressor.num_outputs() != n - 1 {
            return Err(ApxError::ArityMismatch(format!(
                "compressor is {}→{}, expected {}→{}",
                compressor.num_inputs(),
                compressor.num_outputs(),
                n + r,
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
        Ok(BaseScheme { n, r, compressor, decompressor })
    }

    fn compress_block(&self, x: &[bool], sd: &[bool]) -> Result<Bits> {
        let input: Bits = x.iter().chain(sd).copied().collect();
        self.compressor.eval(&input)
    }

    fn decompress_block(&self, y: &[bool]) -> Result<Bits> {
        self.decompressor.eval(y)
    }

    /// Fraction of blocks `x` with `D(C(x, sd)) ≠ x`, over all `x`.
    pub fn failure_rate(&self, sd: &[bool], cap: usize) -> Result<BigRational> {
        expect_len(sd, self.r)?;
        check_cap(self.n, cap)?;
        let mut bad = 0u64;
        for idx in 0..1u64 << self.n {
            let x = index_to_bits(idx, self.n);
            if self.decompress_block(&self.compress_block(&x, sd)?)? != x {
                bad += 1;
            }
        }
        Ok(BigRational::new(BigInt::from(bad), BigInt::from(1u64 << self.n)))
    }
}

impl BaseScheme {
    /// `max_x Pr_sd[D(C(x, sd)) ≠ x]`, by enumeration of blocks and seeds.
    pub fn worst_block_failure(&self, cap: usize) -> Result<BigRational> {
        check_cap(self.n + self.r, cap)?;
        let mut worst = 0u64;
        for idx in 0..1u64 << self.n {
            let x = index_to_bits(idx, self.n);
            let mut bad = 0u64;
            for s in 0..1u64 << self.r {
                let sd = index_to_bits(s, self.r);
                if self.decompress_block(&self.compress_block(&x, &sd)?)? != x {
                    bad += 1;
                }
            }
            worst = worst.max(bad);
        }
        Ok(BigRational::new(BigInt::from(worst), BigInt::from(1u64 << self.r)))
    }
}

/// Per-round block counts and lengths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Round {
    pub blocks: usize,
    pub remainder: usize,
    pub output: usize,
}

/// `k_i = ⌊z/n⌋`, `|y_i| = z − n·k_i`, `|z_i| = (n−1)·k_i`, from `|z_0| = ℓ`.
pub fn recurrence(n: usize, ell: usize, d: usize) -> Vec<Round> {
    let mut z = ell;
    (0..d)
        .map(|_| {
            let blocks = z / n;
            let round = Round { blocks, remainder: z - n * blocks, output: (n - 1) * blocks };
            z = round.output;
            round
        })
        .collect()
}

/// Output length `|z_d| + Σ|y_i| + d·r`.
pub fn output_length(n: usize, r: usize, ell: usize, d: usize) -> usize {
    let rounds = recurrence(n, ell, d);
    let zd = rounds.last().map_or(ell, |rd| rd.output);
    zd + rounds.iter().map(|rd| rd.remainder).sum::<usize>() + d * r
}

/// How round seeds enter the base scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedUse {
    /// `x' = C(x, sd_i)`; the base scheme has `r` seed bits.
    Direct,
    /// `x' = C(x ⊕ sd_i)` and `x = D(x') ⊕ sd_i`; `sd_i` has `n` bits.
    XorMask,
}

#[derive(Clone, Debug)]
pub struct IteratedScheme {
    base: BaseScheme,
    ell: usize,
    d: usize,
    seed_use: SeedUse,
    rounds: Vec<Round>,
}

/// The `d`-round scheme over `ℓ + d·r` input bits.
pub fn stretch_amplify(base: BaseScheme, ell: usize, d: usize) -> Result<IteratedScheme> {
    IteratedScheme::new(base, ell, d, SeedUse::Direct)
}

/// The `d`-round scheme with an `n`-bit XOR mask per round; the base scheme
/// must be deterministic (`r = 0`).
pub fn worstcase_from_average(base: BaseScheme, ell: usize, d: usize) -> Result<IteratedScheme> {
    if base.r != 0 {
        return Err(ApxError::InvalidParameter("the average-case base scheme takes no seed".into()));
    }
    IteratedScheme::new(base, ell, d, SeedUse::XorMask)
}

impl IteratedScheme {
    fn new(base: BaseScheme, ell: usize, d: usize, seed_use: SeedUse) -> Result<Self> {
        if ell == 0 {
            return Err(ApxError::InvalidParameter("ℓ must be positive".into()));
        }
        let rounds = recurrence(base.n, ell, d);
        Ok(IteratedScheme { base, ell, d, seed_use, rounds })
    }

    pub fn base(&self) -> &BaseScheme {
        &self.base
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn rounds(&self) -> &[Round] {
        &self.rounds
    }

    /// Bits per round seed.
    pub fn round_seed_len(&self) -> usize {
        match self.seed_use {
            SeedUse::Direct => self.base.r,
            SeedUse::XorMask => self.base.n,
        }
    }

    pub fn seed_len(&self) -> usize {
        self.d * self.round_seed_len()
    }

    pub fn output_len(&self) -> usize {
        output_length(self.base.n, self.round_seed_len(), self.ell, self.d)
    }

    /// `ℓ(1 − 1/n)^d + d(n + r)` as an exact rational, with `r` the round seed length.
    pub fn length_bound(&self) -> BigRational {
        let n = BigInt::from(self.base.n);
        let shrink = BigRational::new(&n - 1, n.clone());
        let mut p = BigRational::from_integer(BigInt::from(self.ell));
        for _ in 0..self.d {
            p *= &shrink;
        }
        p + BigRational::from_integer(BigInt::from(self.d * (self.base.n + self.round_seed_len())))
    }

    fn round_block(&self, x: &[bool], sd: &[bool]) -> Result<Bits> {
        match self.seed_use {
            SeedUse::Direct => self.base.compress_block(x, sd),
            SeedUse::XorMask => self.base.compress_block(&xor(x, sd), &[]),
        }
    }

    fn unround_block(&self, y: &[bool], sd: &[bool]) -> Result<Bits> {
        let x = self.base.decompress_block(y)?;
        Ok(match self.seed_use {
            SeedUse::Direct => x,
            SeedUse::XorMask => xor(&x, sd),
        })
    }

    pub fn compress(&self, z: &[bool], seeds: &[bool]) -> Result<Bits> {
        expect_len(z, self.ell)?;
        expect_len(seeds, self.seed_len())?;
        let (n, w) = (self.base.n, self.round_seed_len());
        let mut cur = z.to_vec();
        let mut rems = Vec::new();
        for (i, rd) in self.rounds.iter().enumerate() {
            let sd = &seeds[i * w..(i + 1) * w];
            let mut next = Vec::with_capacity(rd.output);
            for x in cur[..rd.blocks * n].chunks(n) {
                next.extend(self.round_block(x, sd)?);
            }
            rems.extend_from_slice(&cur[rd.blocks * n..]);
            cur = next;
        }
        cur.extend(rems);
        cur.extend_from_slice(seeds);
        Ok(cur)
    }

    /// Inverts [`IteratedScheme::compress`] round by round; returns `(z, seeds)`.
    pub fn decompress(&self, out: &[bool]) -> Result<(Bits, Bits)> {
        expect_len(out, self.output_len())?;
        let (n, w) = (self.base.n, self.round_seed_len());
        let zd_len = self.rounds.last().map_or(self.ell, |rd| rd.output);
        let mut pos = zd_len;
        let mut rem_at = Vec::with_capacity(self.d);
        for rd in &self.rounds {
            rem_at.push(pos);
            pos += rd.remainder;
        }
        let seeds = out[pos..].to_vec();
        let mut cur = out[..zd_len].to_vec();
        for (i, rd) in self.rounds.iter().enumerate().rev() {
            let sd = &seeds[i * w..(i + 1) * w];
            let mut prev = Vec::with_capacity(rd.blocks * n + rd.remainder);
            for y in cur.chunks(n - 1).take(rd.blocks) {
                prev.extend(self.unround_block(y, sd)?);
            }
            prev.extend_from_slice(&out[rem_at[i]..rem_at[i] + rd.remainder]);
            cur = prev;
        }
        Ok((cur, seeds))
    }

    pub fn roundtrip_ok(&self, z: &[bool], seeds: &[bool]) -> Result<bool> {
        Ok(self.decompress(&self.compress(z, seeds)?)?.0 == z)
    }

    /// Fraction of seeds on which `z` fails to round-trip, by enumeration.
    pub fn failure_probability(&self, z: &[bool], cap: usize) -> Result<BigRational> {
        let r = self.seed_len();
        check_cap(r, cap)?;
        let mut bad = 0u64;
        for idx in 0..1u64 << r {
            if !self.roundtrip_ok(z, &index_to_bits(idx, r))? {
                bad += 1;
            }
        }
        Ok(BigRational::new(BigInt::from(bad), BigInt::from(1u64 << r)))
    }

    /// `Σ_i k_i · ε`: the union bound over all compressed blocks for a
    /// per-block failure rate `ε`.
    pub fn union_bound(&self, per_block: &BigRational) -> BigRational {
        let blocks: usize = self.rounds.iter().map(|rd| rd.blocks).sum();
        per_block * BigRational::from_integer(BigInt::from(blocks))
    }
}

/// `Pr_sd[T(x ⊕ sd)]`: the failure rate of a masked block, which equals the
/// average failure rate of `T` for every `x`.
pub fn masked_failure(t: &Circuit, x: &[bool], cap: usize) -> Result<BigRational> {
    let shifted = t.xor_shift(x)?;
    crate::oracle::exact_count(&shifted, cap)
}
