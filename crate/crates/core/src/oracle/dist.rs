use crate::bits::{format_bits, parse_bits, Bits};
use crate::error::{ApxError, Result};

/// Uniform distribution over an explicit multiset of equal-length strings.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlatDistribution {
    n: usize,
    strings: Vec<Bits>,
}

impl FlatDistribution {
    pub fn new(strings: Vec<Bits>) -> Result<Self> {
        let n = strings.first().ok_or_else(|| ApxError::InvalidParameter("empty distribution".into()))?.len();
        if let Some(s) = strings.iter().find(|s| s.len() != n) {
            return Err(ApxError::LengthMismatch { expected: n, got: s.len() });
        }
        Ok(FlatDistribution { n, strings })
    }

    /// Splits `x` into `m` consecutive strings of `n` bits.
    pub fn from_concat(x: &[bool], n: usize, m: usize) -> Result<Self> {
        crate::bits::expect_len(x, n * m)?;
        if n == 0 || m == 0 {
            return Err(ApxError::InvalidParameter("distribution needs n, m ≥ 1".into()));
        }
        FlatDistribution::new(x.chunks(n).map(<[bool]>::to_vec).collect())
    }

    pub fn to_concat(&self) -> Bits {
        self.strings.concat()
    }

    /// String length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of strings, counted with multiplicity.
    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    pub fn strings(&self) -> &[Bits] {
        &self.strings
    }

    /// One string per line.
    pub fn parse(text: &str) -> Result<Self> {
        let strings =
            text.lines().map(str::trim).filter(|l| !l.is_empty()).map(parse_bits).collect::<Result<Vec<_>>>()?;
        FlatDistribution::new(strings)
    }

    pub fn to_text(&self) -> String {
        self.strings.iter().map(|s| format_bits(s) + "\n").collect()
    }
}
