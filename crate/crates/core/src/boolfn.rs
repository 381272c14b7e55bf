//! Explicit functions `{0,1}^n → {0,…,d−1}` and restrictions.

use std::fmt;
use std::str::FromStr;

use crate::bits::{check_arity, low_mask, BitVector};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Values {
    /// Binary codomain, one bit per input.
    Packed(Vec<u64>),
    Wide(Vec<u32>),
}

/// Full truth table of a function on `n ≤ 24` inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthTable {
    n: usize,
    codomain: u32,
    values: Values,
}

impl TruthTable {
    pub fn from_fn(n: usize, codomain: u32, f: impl Fn(u32) -> u32) -> Result<Self> {
        check_arity(n)?;
        if codomain < 2 {
            return Err(Error::Codomain { value: 0, codomain });
        }
        let size = 1usize << n;
        let values = if codomain == 2 {
            let mut words = vec![0u64; size.div_ceil(64)];
            for x in 0..size {
                match f(x as u32) {
                    0 => {}
                    1 => words[x >> 6] |= 1 << (x & 63),
                    value => return Err(Error::Codomain { value, codomain }),
                }
            }
            Values::Packed(words)
        } else {
            let mut vals = Vec::with_capacity(size);
            for x in 0..size {
                let value = f(x as u32);
                if value >= codomain {
                    return Err(Error::Codomain { value, codomain });
                }
                vals.push(value);
            }
            Values::Wide(vals)
        };
        Ok(Self {
            n,
            codomain,
            values,
        })
    }

    pub fn from_values(n: usize, codomain: u32, values: &[u32]) -> Result<Self> {
        check_arity(n)?;
        if values.len() != 1 << n {
            return Err(Error::Composition(format!(
                "truth table for n={n} needs {} entries, got {}",
                1usize << n,
                values.len()
            )));
        }
        Self::from_fn(n, codomain, |x| values[x as usize])
    }

    pub fn named(name: NamedFunction, n: usize) -> Result<Self> {
        check_arity(n)?;
        match name {
            NamedFunction::Parity => Self::from_fn(n, 2, |x| x.count_ones() & 1),
            NamedFunction::Hw => Self::from_fn(n, n as u32 + 1, |x| x.count_ones()),
            // |x| ≥ n/2, ties map to 1
            NamedFunction::Maj => {
                Self::from_fn(n, 2, |x| u32::from(2 * x.count_ones() >= n as u32))
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn codomain_size(&self) -> u32 {
        self.codomain
    }

    /// Value at the integer-encoded input `x`.
    #[inline]
    pub fn get(&self, x: u32) -> u32 {
        match &self.values {
            Values::Packed(w) => (w[(x >> 6) as usize] >> (x & 63) & 1) as u32,
            Values::Wide(v) => v[x as usize],
        }
    }

    pub fn eval(&self, x: &BitVector) -> Result<u32> {
        if x.n() != self.n {
            return Err(Error::Precondition(format!(
                "input arity {} does not match table arity {}",
                x.n(),
                self.n
            )));
        }
        Ok(self.get(x.bits()))
    }

    pub fn values(&self) -> Vec<u32> {
        (0..1u32 << self.n).map(|x| self.get(x)).collect()
    }

    /// Whether the value changes under flipping coordinate `i` for some input.
    pub fn depends_on(&self, i: usize) -> bool {
        if i == 0 || i > self.n {
            return false;
        }
        let bit = 1u32 << (i - 1);
        (0..1u32 << self.n)
            .filter(|x| x & bit == 0)
            .any(|x| self.get(x) != self.get(x | bit))
    }

    pub fn depends_on_all(&self) -> bool {
        (1..=self.n).all(|i| self.depends_on(i))
    }

    /// Number of distinct values taken.
    pub fn image_size(&self) -> usize {
        let mut seen = vec![false; self.codomain as usize];
        for x in 0..1u32 << self.n {
            seen[self.get(x) as usize] = true;
        }
        seen.into_iter().filter(|&s| s).count()
    }

    /// The subfunction on the kept coordinates of `r`.
    pub fn restrict(&self, r: &Restriction) -> Result<Self> {
        if r.n() != self.n {
            return Err(Error::Restriction(format!(
                "restriction is over {} coordinates, table over {}",
                r.n(),
                self.n
            )));
        }
        Self::from_fn(r.kept().len(), self.codomain, |y| self.get(r.embed(y)))
    }
}

/// The function families with builders in this crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedFunction {
    Parity,
    Hw,
    Maj,
}

impl fmt::Display for NamedFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NamedFunction::Parity => "parity",
            NamedFunction::Hw => "hw",
            NamedFunction::Maj => "maj",
        })
    }
}

impl FromStr for NamedFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "parity" => Ok(Self::Parity),
            "hw" => Ok(Self::Hw),
            "maj" => Ok(Self::Maj),
            _ => Err(Error::Parse {
                line: 0,
                msg: format!("unknown function {s:?}"),
            }),
        }
    }
}

/// A split of `[n]` into kept coordinates `I` and fixed coordinates with
/// their values. Kept coordinates retain their relative order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction {
    n: usize,
    kept: Vec<usize>,
    fixed_bits: u32,
}

impl Restriction {
    pub fn new(n: usize, kept: &[usize], fixing: &[(usize, bool)]) -> Result<Self> {
        check_arity(n)?;
        if kept.is_empty() {
            return Err(Error::Restriction("kept set is empty".into()));
        }
        let mut seen = vec![false; n + 1];
        let mut fixed_bits = 0u32;
        let coords = kept.iter().copied().chain(fixing.iter().map(|&(i, _)| i));
        for i in coords {
            if i == 0 || i > n {
                return Err(Error::Coordinate { i, n });
            }
            if seen[i] {
                return Err(Error::Restriction(format!("coordinate {i} given twice")));
            }
            seen[i] = true;
        }
        if let Some(i) = (1..=n).find(|&i| !seen[i]) {
            return Err(Error::Restriction(format!(
                "coordinate {i} neither kept nor fixed"
            )));
        }
        for &(i, b) in fixing {
            if b {
                fixed_bits |= 1 << (i - 1);
            }
        }
        let mut kept = kept.to_vec();
        kept.sort_unstable();
        Ok(Self {
            n,
            kept,
            fixed_bits,
        })
    }

    /// Keeps every coordinate.
    pub fn identity(n: usize) -> Result<Self> {
        let kept: Vec<usize> = (1..=n).collect();
        Self::new(n, &kept, &[])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    /// Integer encoding of the fixed part (kept coordinates zero).
    pub fn fixed_bits(&self) -> u32 {
        self.fixed_bits
    }

    pub fn kept_mask(&self) -> u32 {
        self.kept.iter().fold(0, |m, &i| m | 1 << (i - 1))
    }

    pub fn fixed_weight(&self) -> u32 {
        self.fixed_bits.count_ones()
    }

    /// Lifts a point of the `|I|`-cube to the full cube.
    #[inline]
    pub fn embed(&self, y: u32) -> u32 {
        let mut x = self.fixed_bits;
        for (pos, &i) in self.kept.iter().enumerate() {
            x |= (y >> pos & 1) << (i - 1);
        }
        x
    }

    /// Projects a full point onto the kept coordinates.
    #[inline]
    pub fn project(&self, x: u32) -> u32 {
        let mut y = 0;
        for (pos, &i) in self.kept.iter().enumerate() {
            y |= (x >> (i - 1) & 1) << pos;
        }
        y & low_mask(self.kept.len())
    }

    /// Position of coordinate `i` among the kept coordinates, 1-based.
    pub fn position(&self, i: usize) -> Option<usize> {
        self.kept.binary_search(&i).ok().map(|p| p + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn at(t: &TruthTable, s: &str) -> u32 {
        t.eval(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn named_examples() {
        assert_eq!(
            at(&TruthTable::named(NamedFunction::Maj, 2).unwrap(), "10"),
            1
        );
        assert_eq!(
            at(&TruthTable::named(NamedFunction::Hw, 3).unwrap(), "110"),
            2
        );
        assert_eq!(
            at(
                &TruthTable::named(NamedFunction::Parity, 4).unwrap(),
                "1110"
            ),
            1
        );
        assert_eq!(
            TruthTable::named(NamedFunction::Hw, 5)
                .unwrap()
                .codomain_size(),
            6
        );
        assert_eq!(
            TruthTable::named(NamedFunction::Maj, 5)
                .unwrap()
                .codomain_size(),
            2
        );
    }

    #[test]
    fn maj_tie_maps_to_one() {
        let maj4 = TruthTable::named(NamedFunction::Maj, 4).unwrap();
        assert_eq!(at(&maj4, "1100"), 1);
        assert_eq!(at(&maj4, "1000"), 0);
        let maj5 = TruthTable::named(NamedFunction::Maj, 5).unwrap();
        assert_eq!(at(&maj5, "11000"), 0);
        assert_eq!(at(&maj5, "11010"), 1);
    }

    #[test]
    fn unsupported_arity() {
        assert!(matches!(
            TruthTable::named(NamedFunction::Hw, 0),
            Err(Error::Arity { .. })
        ));
        assert!(matches!(
            TruthTable::named(NamedFunction::Hw, 25),
            Err(Error::Arity { .. })
        ));
    }

    #[test]
    fn restrict_examples() {
        let hw4 = TruthTable::named(NamedFunction::Hw, 4).unwrap();
        let r = Restriction::new(4, &[1, 2], &[(3, false), (4, false)]).unwrap();
        let sub = hw4.restrict(&r).unwrap();
        let hw2 = TruthTable::named(NamedFunction::Hw, 2).unwrap();
        assert_eq!(sub.values(), hw2.values());

        let maj4 = TruthTable::named(NamedFunction::Maj, 4).unwrap();
        let r = Restriction::new(4, &[1, 2], &[(3, true), (4, false)]).unwrap();
        assert_eq!(
            maj4.restrict(&r).unwrap(),
            TruthTable::named(NamedFunction::Maj, 2).unwrap()
        );

        let par3 = TruthTable::named(NamedFunction::Parity, 3).unwrap();
        let r = Restriction::new(3, &[2], &[(1, true), (3, false)]).unwrap();
        assert_eq!(par3.restrict(&r).unwrap().values(), vec![1, 0]);
    }

    #[test]
    fn bad_restrictions() {
        assert!(Restriction::new(4, &[1, 2], &[(3, false)]).is_err());
        assert!(Restriction::new(4, &[1, 2], &[(2, false), (3, false), (4, true)]).is_err());
        assert!(
            Restriction::new(4, &[], &[(1, false), (2, false), (3, false), (4, true)]).is_err()
        );
        assert!(Restriction::new(4, &[1, 5], &[(2, false), (3, false), (4, true)]).is_err());
    }

    #[test]
    fn dependence() {
        let t = TruthTable::from_fn(3, 2, |x| x & 1).unwrap();
        assert!(t.depends_on(1));
        assert!(!t.depends_on(2));
        assert!(!t.depends_on_all());
        assert_eq!(
            TruthTable::named(NamedFunction::Hw, 4)
                .unwrap()
                .image_size(),
            5
        );
    }

    proptest! {
        // Restricting HW_{2m} to any m coordinates with zeros elsewhere gives HW_m.
        #[test]
        fn hw_is_self_containing(m in 1usize..=6, perm_seed in any::<u64>()) {
            let n = 2 * m;
            let mut coords: Vec<usize> = (1..=n).collect();
            let mut s = perm_seed;
            for i in (1..coords.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                coords.swap(i, (s >> 33) as usize % (i + 1));
            }
            let kept = &coords[..m];
            let fixing: Vec<(usize, bool)> = coords[m..].iter().map(|&i| (i, false)).collect();
            let r = Restriction::new(n, kept, &fixing).unwrap();
            let sub = TruthTable::named(NamedFunction::Hw, n).unwrap().restrict(&r).unwrap();
            prop_assert_eq!(sub.values(), TruthTable::named(NamedFunction::Hw, m).unwrap().values());
        }

        #[test]
        fn embed_project_inverse(n in 1usize..=10, seed in any::<u64>()) {
            let kept: Vec<usize> = (1..=n).filter(|i| seed >> i & 1 == 1).collect();
            prop_assume!(!kept.is_empty());
            let fixing: Vec<(usize, bool)> = (1..=n)
                .filter(|i| !kept.contains(i))
                .map(|i| (i, seed >> (i + 20) & 1 == 1))
                .collect();
            let r = Restriction::new(n, &kept, &fixing).unwrap();
            for y in 0..1u32 << kept.len() {
                prop_assert_eq!(r.project(r.embed(y)), y);
            }
        }
    }
}
