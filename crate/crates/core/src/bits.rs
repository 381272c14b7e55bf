//! Points of the n-cube.
//!
//! Coordinates are numbered `1..=n`. Coordinate 1 is the least-significant
//! bit of the integer encoding; the text form lists coordinate 1 first.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported input arity.
pub const MAX_ARITY: usize = 24;

pub(crate) fn check_arity(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ARITY {
        return Err(Error::Arity { n, max: MAX_ARITY });
    }
    Ok(())
}

/// Mask with the low `n` bits set.
#[inline]
pub(crate) fn low_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// A point `x ∈ {0,1}^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    n: usize,
    bits: u32,
}

impl BitVector {
    pub fn new(n: usize, bits: u32) -> Result<Self> {
        check_arity(n)?;
        if bits & !low_mask(n) != 0 {
            return Err(Error::Coordinate {
                i: 32 - bits.leading_zeros() as usize,
                n,
            });
        }
        Ok(Self { n, bits })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, 0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Integer encoding (coordinate 1 is bit 0).
    pub fn bits(&self) -> u32 {
        self.bits
    }

    fn check(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n {
            return Err(Error::Coordinate { i, n: self.n });
        }
        Ok(())
    }

    pub fn get(&self, i: usize) -> Result<bool> {
        self.check(i)?;
        Ok(self.bits >> (i - 1) & 1 == 1)
    }

    /// `x^{⊕i}`.
    pub fn flip_bit(&self, i: usize) -> Result<Self> {
        self.check(i)?;
        Ok(Self {
            n: self.n,
            bits: self.bits ^ (1 << (i - 1)),
        })
    }

    /// `x^{(i ↦ b)}`.
    pub fn set_bit(&self, i: usize, b: bool) -> Result<Self> {
        self.check(i)?;
        let mask = 1u32 << (i - 1);
        let bits = if b {
            self.bits | mask
        } else {
            self.bits & !mask
        };
        Ok(Self { n: self.n, bits })
    }

    pub fn hamming_weight(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn complement(&self) -> Self {
        Self {
            n: self.n,
            bits: !self.bits & low_mask(self.n),
        }
    }
}

/// Formats `bits` as an `n`-character 0/1 string, coordinate 1 first.
pub fn format_point(n: usize, bits: u32) -> String {
    (0..n)
        .map(|i| if bits >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_point(self.n, self.bits))
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = 0u32;
        for (pos, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' if pos < 32 => bits |= 1 << pos,
                _ => {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!("bad bit string {s:?}"),
                    })
                }
            }
        }
        Self::new(s.chars().count(), bits)
    }
}
