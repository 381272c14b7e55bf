//! Depth-3 circuits obtained by writing the outer function as a DNF (or CNF)
//! over reachable inner-output vectors and each inner as a canonical CNF (or
//! DNF) of its support.
//!
//! A Σ3 circuit is OR-AND-OR; a Π3 circuit is AND-OR-AND. Bottom gates are
//! shared across middle gates, so the gate count is at most
//! `2^m + m·2^k + 1` (the `+1` is the root).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::bits::BitVector;
use crate::composition::Composition;
use crate::error::{Error, Result};

pub const MAX_LOWERING_ARITY: usize = 12;
pub const MAX_LOWERING_INNERS: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    /// OR of ANDs of ORs.
    Sigma3,
    /// AND of ORs of ANDs.
    Pi3,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Sigma3 => "sigma3",
            Polarity::Pi3 => "pi3",
        })
    }
}

impl FromStr for Polarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigma3" => Ok(Self::Sigma3),
            "pi3" => Ok(Self::Pi3),
            _ => Err(Error::Parse {
                line: 0,
                msg: format!("unknown polarity {s:?}"),
            }),
        }
    }
}

/// `x_var` or its negation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    #[inline]
    fn holds(&self, x: u32) -> bool {
        (x >> (self.var - 1) & 1 == 1) == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.positive { '+' } else { '-' }, self.var)
    }
}

/// Middle gate: bottom-gate inputs plus single literals wired in directly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MiddleGate {
    pub gates: Vec<usize>,
    pub literals: Vec<Literal>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Depth3Circuit {
    pub n: usize,
    pub polarity: Polarity,
    pub bottom_fanin: usize,
    /// Distinct bottom gates, each a set of at least two literals.
    pub bottom: Vec<Vec<Literal>>,
    pub middle: Vec<MiddleGate>,
    /// Indices of middle gates feeding the root.
    pub top: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Depth3Size {
    /// Bottom gates + middle gates + root.
    pub gate_count: usize,
    pub bottom_fanin: usize,
    pub top_fanin: usize,
}

impl Depth3Circuit {
    /// Standard gate semantics on the integer-encoded input.
    pub fn eval_raw(&self, x: u32) -> bool {
        // Σ3: bottom OR, middle AND, top OR. Π3 swaps every gate.
        let sigma = self.polarity == Polarity::Sigma3;
        let bottom: Vec<bool> = self
            .bottom
            .iter()
            .map(|lits| {
                if sigma {
                    lits.iter().any(|l| l.holds(x))
                } else {
                    lits.iter().all(|l| l.holds(x))
                }
            })
            .collect();
        let middle = |g: &MiddleGate| {
            let mut inputs = g
                .gates
                .iter()
                .map(|&b| bottom[b])
                .chain(g.literals.iter().map(|l| l.holds(x)));
            if sigma {
                inputs.all(|v| v)
            } else {
                inputs.any(|v| v)
            }
        };
        let mut tops = self.top.iter().map(|&t| middle(&self.middle[t]));
        if sigma {
            tops.any(|v| v)
        } else {
            tops.all(|v| v)
        }
    }

    pub fn evaluate(&self, x: &BitVector) -> Result<bool> {
        if x.n() != self.n {
            return Err(Error::Precondition(format!(
                "input arity {} does not match circuit arity {}",
                x.n(),
                self.n
            )));
        }
        Ok(self.eval_raw(x.bits()))
    }

    pub fn size(&self) -> Depth3Size {
        let widest_bottom = self.bottom.iter().map(Vec::len).max().unwrap_or(0);
        let any_literal = self.middle.iter().any(|g| !g.literals.is_empty());
        Depth3Size {
            gate_count: self.bottom.len() + self.middle.len() + 1,
            bottom_fanin: widest_bottom.max(usize::from(any_literal)),
            top_fanin: self.top.len(),
        }
    }
}

/// Lowers a binary-codomain composition to a depth-3 circuit that agrees with
/// it on every input whose inner-output vector is mapped.
pub fn composition_to_depth3(c: &Composition, polarity: Polarity) -> Result<Depth3Circuit> {
    if c.codomain_size() != 2 {
        return Err(Error::Precondition(format!(
            "depth-3 lowering needs a binary codomain, got {}",
            c.codomain_size()
        )));
    }
    if c.n() > MAX_LOWERING_ARITY || c.m() > MAX_LOWERING_INNERS {
        return Err(Error::Sizing(format!(
            "lowering supports n ≤ {MAX_LOWERING_ARITY} and m ≤ {MAX_LOWERING_INNERS}, got n={}, m={}",
            c.n(),
            c.m()
        )));
    }
    // Σ3 lists accepted vectors and asserts g_j = u_j with CNF clauses.
    // Π3 lists rejected vectors and asserts some g_j ≠ u_j with DNF terms.
    // Both use one bottom gate per support assignment a with g_j(a) ≠ u_j;
    // the literal for coordinate i is (x_i ≠ a_i) in a clause and (x_i = a_i)
    // in a term.
    let (wanted, clause) = match polarity {
        Polarity::Sigma3 => (1, true),
        Polarity::Pi3 => (0, false),
    };
    let mut bottom: Vec<Vec<Literal>> = Vec::new();
    let mut bottom_index: HashMap<Vec<Literal>, usize> = HashMap::new();
    // (inner j, u_j) → (bottom gate ids, direct literals)
    let mut pieces: HashMap<(usize, bool), (Vec<usize>, Vec<Literal>)> = HashMap::new();
    let mut middle = Vec::new();
    for (key, value) in c.outer().entries() {
        if value != wanted {
            continue;
        }
        let mut gate = MiddleGate {
            gates: Vec::new(),
            literals: Vec::new(),
        };
        for (j, g) in c.inners().iter().enumerate() {
            let u = key >> j & 1 == 1;
            let (gates, lits) = pieces.entry((j, u)).or_insert_with(|| {
                let mut gates = Vec::new();
                let mut lits = Vec::new();
                for a in 0..1u32 << g.arity() {
                    if g.table_bit(a) == u {
                        continue;
                    }
                    let gate_lits: Vec<Literal> = g
                        .support()
                        .iter()
                        .enumerate()
                        .map(|(pos, &var)| Literal {
                            var,
                            positive: (a >> pos & 1 == 1) != clause,
                        })
                        .collect();
                    if gate_lits.len() == 1 {
                        lits.push(gate_lits[0]);
                    } else {
                        let next = bottom.len();
                        let id = *bottom_index.entry(gate_lits.clone()).or_insert_with(|| {
                            bottom.push(gate_lits);
                            next
                        });
                        gates.push(id);
                    }
                }
                (gates, lits)
            });
            gate.gates.extend_from_slice(gates);
            gate.literals.extend_from_slice(lits);
        }
        gate.gates.sort_unstable();
        gate.gates.dedup();
        gate.literals.sort_unstable();
        gate.literals.dedup();
        middle.push(gate);
    }
    let top = (0..middle.len()).collect();
    Ok(Depth3Circuit {
        n: c.n(),
        polarity,
        bottom_fanin: c.k(),
        bottom,
        middle,
        top,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::TruthTable;
    use crate::composition::LocalFunction;
    use crate::constructions::{build_maj, build_parity};
    use crate::domain::Domain;

    fn equivalent(c: &Composition, d: &Depth3Circuit) -> bool {
        (0..1u32 << c.n()).all(|x| match c.eval_raw(x) {
            Some(v) => d.eval_raw(x) == (v == 1),
            None => true,
        })
    }

    fn bound(c: &Composition) -> usize {
        (1 << c.m()) + c.m() * (1 << c.k()) + 1
    }

    #[test]
    fn parity_lowering() {
        let c = build_parity(4, 2).unwrap();
        let d = composition_to_depth3(&c, Polarity::Sigma3).unwrap();
        assert!(equivalent(&c, &d));
        let size = d.size();
        assert!(size.gate_count <= 13, "{size:?}");
        assert!(size.bottom_fanin <= 2);
        assert!(d.evaluate(&"1000".parse().unwrap()).unwrap());
        assert!(!d.evaluate(&"0000".parse().unwrap()).unwrap());
    }

    #[test]
    fn and_wrapper_is_single_term() {
        let and = TruthTable::from_fn(2, 2, |x| (x == 3) as u32).unwrap();
        let g = LocalFunction::from_fn(vec![1, 2], |t| t == 3).unwrap();
        let c = Composition::induced(&and, 2, vec![g], &Domain::full(2).unwrap()).unwrap();
        let d = composition_to_depth3(&c, Polarity::Sigma3).unwrap();
        assert_eq!(d.top.len(), 1);
        assert!(equivalent(&c, &d));
        assert!(d.size().gate_count <= 5);
    }

    #[test]
    fn maj_lowering() {
        let c = build_maj(6, 3).unwrap();
        for pol in [Polarity::Sigma3, Polarity::Pi3] {
            let d = composition_to_depth3(&c, pol).unwrap();
            assert!(equivalent(&c, &d));
            assert!(d.size().gate_count <= bound(&c));
            assert!(d.size().bottom_fanin <= 3);
        }
    }

    #[test]
    fn polarity_duality() {
        let c = build_maj(6, 2).unwrap();
        let pi = composition_to_depth3(&c, Polarity::Pi3).unwrap();
        let sigma_neg = composition_to_depth3(&c.negated().unwrap(), Polarity::Sigma3).unwrap();
        for x in 0..64 {
            assert_eq!(pi.eval_raw(x), !sigma_neg.eval_raw(x));
        }
    }

    #[test]
    fn rejects_non_binary_and_oversize() {
        let hw = crate::constructions::build_hw(4, 2).unwrap();
        assert!(matches!(
            composition_to_depth3(&hw, Polarity::Sigma3),
            Err(Error::Precondition(_))
        ));
        let big = build_parity(13, 1).unwrap();
        assert!(matches!(
            composition_to_depth3(&big, Polarity::Sigma3),
            Err(Error::Sizing(_))
        ));
    }
}
