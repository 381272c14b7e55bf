//! Upper-bound constructions for parity, Hamming weight and majority.
//!
//! Variables are split into consecutive blocks of `k` (the last block takes
//! the remainder). Parity uses one XOR per block. Hamming weight and majority
//! use the binary digits of each block sum, least-significant digit first.

use std::ops::RangeInclusive;

use crate::bits::check_arity;
use crate::composition::{Composition, LocalFunction};
use crate::domain::Domain;
use crate::error::{Error, Result};

/// `⌈log2(s+1)⌉`, the number of bits needed to write `0..=s`.
pub fn digits_for(s: usize) -> usize {
    (usize::BITS - s.leading_zeros()) as usize
}

/// Partition of `[n]` into consecutive blocks of size at most `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSplit {
    blocks: Vec<RangeInclusive<usize>>,
}

impl GroupSplit {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        check_range(n, k)?;
        let blocks = (1..=n)
            .step_by(k)
            .map(|start| start..=(start + k - 1).min(n))
            .collect();
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[RangeInclusive<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

fn check_range(n: usize, k: usize) -> Result<()> {
    check_arity(n)?;
    if k == 0 || k > n {
        return Err(Error::Precondition(format!(
            "need 1 ≤ k ≤ n, got k={k}, n={n}"
        )));
    }
    Ok(())
}

pub fn build_parity(n: usize, k: usize) -> Result<Composition> {
    let split = GroupSplit::new(n, k)?;
    let inners = split
        .blocks()
        .iter()
        .map(|b| LocalFunction::from_fn(b.clone().collect(), |t| t.count_ones() & 1 == 1))
        .collect::<Result<Vec<_>>>()?;
    Composition::from_decoder(n, k, inners, 2, &Domain::full(n)?, |u| u.count_ones() & 1)
}

/// For each block, its first inner index and digit count.
type DigitLayout = Vec<(usize, usize)>;

/// Block-sum digit inners plus their layout.
fn block_sum_inners(split: &GroupSplit) -> Result<(Vec<LocalFunction>, DigitLayout)> {
    let mut inners = Vec::new();
    let mut layout = Vec::new();
    for b in split.blocks() {
        let support: Vec<usize> = b.clone().collect();
        let digits = digits_for(support.len());
        layout.push((inners.len(), digits));
        for d in 0..digits {
            inners.push(LocalFunction::from_fn(support.clone(), |t| {
                t.count_ones() >> d & 1 == 1
            })?);
        }
    }
    Ok((inners, layout))
}

fn decode_sum(layout: &[(usize, usize)], u: u64) -> u32 {
    layout
        .iter()
        .map(|&(start, digits)| (u >> start & ((1 << digits) - 1)) as u32)
        .sum()
}

pub fn build_hw(n: usize, k: usize) -> Result<Composition> {
    let split = GroupSplit::new(n, k)?;
    let (inners, layout) = block_sum_inners(&split)?;
    Composition::from_decoder(n, k, inners, n as u32 + 1, &Domain::full(n)?, |u| {
        decode_sum(&layout, u)
    })
}

pub fn build_maj(n: usize, k: usize) -> Result<Composition> {
    let split = GroupSplit::new(n, k)?;
    let (inners, layout) = block_sum_inners(&split)?;
    Composition::from_decoder(n, k, inners, 2, &Domain::full(n)?, |u| {
        u32::from(2 * decode_sum(&layout, u) >= n as u32)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{NamedFunction, TruthTable};
    use crate::composition::{query_profile, verify_against};

    fn passes(c: &Composition, f: NamedFunction) -> bool {
        let t = TruthTable::named(f, c.n()).unwrap();
        verify_against(c, &t, &Domain::full(c.n()).unwrap())
            .unwrap()
            .passed()
    }

    #[test]
    fn digit_counts() {
        let got: Vec<usize> = (0..=8).map(digits_for).collect();
        assert_eq!(got, vec![0, 1, 2, 2, 3, 3, 3, 3, 4]);
    }

    #[test]
    fn split_shapes() {
        let s = GroupSplit::new(5, 2).unwrap();
        assert_eq!(s.blocks(), &[1..=2, 3..=4, 5..=5]);
        assert!(GroupSplit::new(3, 4).is_err());
        assert!(GroupSplit::new(3, 0).is_err());
        assert!(GroupSplit::new(25, 2).is_err());
    }

    #[test]
    fn parity_examples() {
        let c = build_parity(4, 2).unwrap();
        assert_eq!(c.m(), 2);
        assert!(passes(&c, NamedFunction::Parity));
        assert_eq!(build_parity(5, 2).unwrap().m(), 3);
        assert_eq!(build_parity(3, 3).unwrap().m(), 1);
    }

    #[test]
    fn hw_examples() {
        let c = build_hw(8, 4).unwrap();
        assert_eq!(c.m(), 6);
        assert!(passes(&c, NamedFunction::Hw));
        assert_eq!(query_profile(&c).q, vec![3; 8]);

        let c = build_hw(4, 2).unwrap();
        assert_eq!(c.m(), 4);
        assert_eq!(c.evaluate(&"1111".parse().unwrap()).unwrap(), 4);

        let c = build_hw(2, 1).unwrap();
        assert_eq!(c.m(), 2);
        assert_eq!(c.inners()[0], LocalFunction::variable(1).unwrap());
        assert_eq!(c.inners()[1], LocalFunction::variable(2).unwrap());
    }

    #[test]
    fn maj_examples() {
        let c = build_maj(12, 3).unwrap();
        assert_eq!(c.m(), 8);
        assert!(passes(&c, NamedFunction::Maj));

        let c = build_maj(2, 1).unwrap();
        assert_eq!(c.m(), 2);
        let outs: Vec<u32> = (0..4).map(|x| c.eval_raw(x).unwrap()).collect();
        assert_eq!(outs, vec![0, 1, 1, 1]);

        assert_eq!(build_maj(4, 4).unwrap().m(), 3);
    }

    #[test]
    fn block_query_counts() {
        for (n, k) in [(7, 3), (10, 4), (9, 2)] {
            let c = build_hw(n, k).unwrap();
            let split = GroupSplit::new(n, k).unwrap();
            let p = query_profile(&c);
            for b in split.blocks() {
                let s = b.end() - b.start() + 1;
                for i in b.clone() {
                    assert_eq!(p.q(i) as usize, digits_for(s));
                }
            }
        }
    }
}
