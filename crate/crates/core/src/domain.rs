//! Subsets of the n-cube.

use crate::bits::check_arity;
use crate::error::{Error, Result};

/// A nonempty subset `D ⊆ {0,1}^n`, stored as a membership bitmap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    n: usize,
    mask: Vec<u64>,
    size: u64,
    band: Option<(u32, u32)>,
}

impl Domain {
    pub fn full(n: usize) -> Result<Self> {
        check_arity(n)?;
        Self::from_predicate(n, |_| true).map(|mut d| {
            d.band = Some((0, n as u32));
            d
        })
    }

    /// Inputs whose Hamming weight lies in `lo..=hi`.
    pub fn band(n: usize, lo: u32, hi: u32) -> Result<Self> {
        check_arity(n)?;
        if lo > hi || lo > n as u32 {
            return Err(Error::Domain(format!(
                "empty weight band {lo}:{hi} for n={n}"
            )));
        }
        let mut d = Self::from_predicate(n, |x| (lo..=hi).contains(&x.count_ones()))?;
        d.band = Some((lo, hi.min(n as u32)));
        Ok(d)
    }

    pub fn from_predicate(n: usize, pred: impl Fn(u32) -> bool) -> Result<Self> {
        check_arity(n)?;
        let size = 1usize << n;
        let mut mask = vec![0u64; size.div_ceil(64)];
        let mut count = 0;
        for x in 0..size {
            if pred(x as u32) {
                mask[x >> 6] |= 1 << (x & 63);
                count += 1;
            }
        }
        if count == 0 {
            return Err(Error::Domain("domain is empty".into()));
        }
        Ok(Self {
            n,
            mask,
            size: count,
            band: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `|D|`.
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn is_full(&self) -> bool {
        self.size == 1u64 << self.n
    }

    /// The weight interval, when this domain was built as a band.
    pub fn weight_band(&self) -> Option<(u32, u32)> {
        self.band
    }

    #[inline]
    pub fn contains(&self, x: u32) -> bool {
        let x = x as usize;
        x >> self.n == 0 && self.mask[x >> 6] >> (x & 63) & 1 == 1
    }

    /// Members in increasing integer order.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.mask.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let t = bits.trailing_zeros();
                bits &= bits - 1;
                Some((w as u32) << 6 | t)
            })
        })
    }

    /// Members within `[start, end)`.
    pub fn iter_range(&self, start: u32, end: u32) -> impl Iterator<Item = u32> + '_ {
        (start..end).filter(move |&x| self.contains(x))
    }

    /// `log2 |D|`.
    pub fn log_size(&self) -> f64 {
        (self.size as f64).log2()
    }
}
