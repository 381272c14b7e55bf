//! Exact composition complexity for tiny functions by exhaustive search.
//!
//! Candidates are k-local functions that depend on every support coordinate
//! and are non-constant; of each complementary pair only the table whose
//! all-zero entry is 0 is kept, since the outer absorbs negation. Multisets
//! are enumerated as strictly increasing candidate sequences (duplicates are
//! never needed), pruned on coverage of `[n]`.

use std::time::{Duration, Instant};

use crate::boolfn::{NamedFunction, TruthTable};
use crate::composition::{verify_against, Composition, LocalFunction};
use crate::constructions::digits_for;
use crate::domain::Domain;
use crate::error::{Error, Result};

pub const MAX_SEARCH_ARITY: usize = 6;
pub const MAX_SEARCH_LOCALITY: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub m_max: usize,
    /// Search-tree nodes visited across all levels.
    pub node_limit: u64,
    pub time_limit: Duration,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            m_max: 8,
            node_limit: 200_000_000,
            time_limit: Duration::from_secs(60),
        }
    }
}

/// How a candidate size `m` was ruled out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LevelResult {
    /// Rejected by the counting filter without enumeration.
    Filtered(String),
    /// Every candidate multiset of this size was checked and none works.
    Exhausted { leaves: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelStats {
    pub m: usize,
    pub result: LevelResult,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SearchOutcome {
    Found {
        m_star: usize,
        witness: Composition,
        /// One entry per `m` in `⌈n/k⌉..m_star`; smaller `m` cannot cover every variable.
        refuted: Vec<LevelStats>,
        candidates: usize,
    },
    Inconclusive {
        /// Every `m` below this was proven infeasible.
        lower_bound: usize,
        refuted: Vec<LevelStats>,
        reason: String,
    },
}

impl SearchOutcome {
    pub fn m_star(&self) -> Option<usize> {
        match self {
            SearchOutcome::Found { m_star, .. } => Some(*m_star),
            SearchOutcome::Inconclusive { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Refinement {
    Refuted(String),
    Possible,
}

/// The largest lower bound on `m` that follows from the subset counting
/// argument for `HW_n`: an `r`-set must be touched by `⌈log2(r+1)⌉` inners,
/// and one inner touches at most `min(k, ⌊n/r⌋)` disjoint `r`-sets.
pub fn hw_counting_bound(n: usize, k: usize) -> usize {
    (1..=n)
        .map(|r| {
            let parts = n / r;
            let per_part = digits_for(r);
            (per_part * parts).div_ceil(k.min(parts).max(1))
        })
        .max()
        .unwrap_or(0)
}

/// Necessary conditions for `f = h(g_1, …, g_m)` with k-local inners.
pub fn lower_bound_refinement(f: &TruthTable, k: usize, m: usize) -> Refinement {
    let dependent = (1..=f.n()).filter(|&i| f.depends_on(i)).count();
    if m * k < dependent {
        return Refinement::Refuted(format!(
            "coverage: {m} inners of locality {k} reach at most {} of {dependent} relevant variables",
            m * k
        ));
    }
    let image = f.image_size();
    if m < 64 && (1usize << m) < image {
        return Refinement::Refuted(format!(
            "image: {image} output values need at least {} inners",
            digits_for(image - 1)
        ));
    }
    let is_hw = TruthTable::named(NamedFunction::Hw, f.n()).is_ok_and(|hw| hw == *f);
    if is_hw {
        let bound = hw_counting_bound(f.n(), k);
        if m < bound {
            return Refinement::Refuted(format!(
                "subset counting: HW_{} with locality {k} needs at least {bound} inners",
                f.n()
            ));
        }
    }
    Refinement::Possible
}

struct Candidate {
    func: LocalFunction,
    /// Output on every point of the cube, bit x = g(x).
    word: u64,
    mask: u32,
}

fn candidates(n: usize, k: usize) -> Result<Vec<Candidate>> {
    let mut out = Vec::new();
    for size in 1..=k.min(n) {
        for support in supports(n, size) {
            let entries = 1u32 << size;
            for table in 0..1u64 << entries {
                // canonical representative of {g, ¬g}: g(0…0) = 0; drops constants too
                if table & 1 == 1 || table == 0 {
                    continue;
                }
                let func = LocalFunction::from_fn(support.clone(), |t| table >> t & 1 == 1)?;
                if !func.depends_on_all() {
                    continue;
                }
                let word = (0..1u32 << n).fold(0u64, |w, x| w | (func.eval(x) as u64) << x);
                let mask = support.iter().fold(0u32, |m, &i| m | 1 << (i - 1));
                out.push(Candidate { func, word, mask });
            }
        }
    }
    Ok(out)
}

fn supports(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..=n {
            cur.push(i);
            rec(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, size, &mut Vec::new(), &mut out);
    out
}

enum Walk {
    Found(Vec<usize>),
    Exhausted,
    OutOfBudget(String),
}

struct Searcher<'a> {
    cands: &'a [Candidate],
    values: Vec<u32>,
    points: usize,
    full: u32,
    k: usize,
    nodes: u64,
    leaves: u64,
    budget: &'a SearchBudget,
    started: Instant,
}

impl Searcher<'_> {
    /// `classes` labels each point by its inner-output vector so far.
    fn walk(
        &mut self,
        m: usize,
        start: usize,
        covered: u32,
        classes: &[u8],
        chosen: &mut Vec<usize>,
    ) -> Walk {
        self.nodes += 1;
        if self.nodes > self.budget.node_limit {
            return Walk::OutOfBudget(format!("node limit {} reached", self.budget.node_limit));
        }
        if self.nodes & 0xfff == 0 && self.started.elapsed() > self.budget.time_limit {
            return Walk::OutOfBudget(format!("time limit {:?} reached", self.budget.time_limit));
        }
        if chosen.len() == m {
            self.leaves += 1;
            return if covered == self.full && self.pure(classes) {
                Walk::Found(chosen.clone())
            } else {
                Walk::Exhausted
            };
        }
        let remaining = m - chosen.len();
        let uncovered = (self.full & !covered).count_ones() as usize;
        if uncovered > remaining * self.k {
            return Walk::Exhausted;
        }
        let mut next = vec![0u8; self.points];
        for idx in start..=self.cands.len().saturating_sub(remaining) {
            let cand = &self.cands[idx];
            // relabel (class, bit) pairs densely
            let mut relabel = [u8::MAX; 128];
            let mut fresh = 0u8;
            for x in 0..self.points {
                let slot = (classes[x] as usize) << 1 | (cand.word >> x & 1) as usize;
                if relabel[slot] == u8::MAX {
                    relabel[slot] = fresh;
                    fresh += 1;
                }
                next[x] = relabel[slot];
            }
            chosen.push(idx);
            let r = self.walk(m, idx + 1, covered | cand.mask, &next, chosen);
            chosen.pop();
            if !matches!(r, Walk::Exhausted) {
                return r;
            }
        }
        Walk::Exhausted
    }

    fn pure(&self, classes: &[u8]) -> bool {
        let mut value = [u32::MAX; 64];
        for (x, &cl) in classes.iter().enumerate() {
            let slot = &mut value[cl as usize];
            if *slot == u32::MAX {
                *slot = self.values[x];
            } else if *slot != self.values[x] {
                return false;
            }
        }
        true
    }
}

/// Least `m` with `f = h(g_1, …, g_m)` for k-local `g_j`, plus the
/// lexicographically first witness in candidate order.
pub fn exact_cc(f: &TruthTable, k: usize, budget: &SearchBudget) -> Result<SearchOutcome> {
    let n = f.n();
    if n > MAX_SEARCH_ARITY || k == 0 || k > MAX_SEARCH_LOCALITY {
        return Err(Error::Sizing(format!(
            "search supports n ≤ {MAX_SEARCH_ARITY} and 1 ≤ k ≤ {MAX_SEARCH_LOCALITY}, got n={n}, k={k}"
        )));
    }
    if budget.m_max == 0 || budget.node_limit == 0 || budget.time_limit.is_zero() {
        return Err(Error::Precondition(
            "search budgets must be positive".into(),
        ));
    }
    if let Some(i) = (1..=n).find(|&i| !f.depends_on(i)) {
        return Err(Error::Precondition(format!(
            "target does not depend on variable {i}"
        )));
    }
    let cands = candidates(n, k)?;
    let points = 1usize << n;
    let mut searcher = Searcher {
        cands: &cands,
        values: (0..points as u32).map(|x| f.get(x)).collect(),
        points,
        full: (1u32 << n) - 1,
        k,
        nodes: 0,
        leaves: 0,
        budget,
        started: Instant::now(),
    };
    let mut refuted = Vec::new();
    let first = n.div_ceil(k).max(1);
    for m in first..=budget.m_max {
        if let Refinement::Refuted(why) = lower_bound_refinement(f, k, m) {
            refuted.push(LevelStats {
                m,
                result: LevelResult::Filtered(why),
            });
            continue;
        }
        searcher.leaves = 0;
        match searcher.walk(m, 0, 0, &vec![0u8; points], &mut Vec::with_capacity(m)) {
            Walk::Found(idx) => {
                let inners: Vec<LocalFunction> =
                    idx.iter().map(|&i| cands[i].func.clone()).collect();
                let full = Domain::full(n)?;
                let witness = Composition::induced(f, k, inners, &full)?;
                if !verify_against(&witness, f, &full)?.passed() {
                    return Err(Error::Invariant(
                        "search witness failed verification".into(),
                    ));
                }
                return Ok(SearchOutcome::Found {
                    m_star: m,
                    witness,
                    refuted,
                    candidates: cands.len(),
                });
            }
            Walk::Exhausted => refuted.push(LevelStats {
                m,
                result: LevelResult::Exhausted {
                    leaves: searcher.leaves,
                },
            }),
            Walk::OutOfBudget(reason) => {
                return Ok(SearchOutcome::Inconclusive {
                    lower_bound: m,
                    refuted,
                    reason,
                })
            }
        }
    }
    Ok(SearchOutcome::Inconclusive {
        lower_bound: budget.m_max + 1,
        refuted,
        reason: format!("no composition with m ≤ {}", budget.m_max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn named(f: NamedFunction, n: usize) -> TruthTable {
        TruthTable::named(f, n).unwrap()
    }

    #[test]
    fn candidate_counts() {
        // n=4, k=2: 4 dictators + 6 supports × 5 canonical two-variable functions
        assert_eq!(candidates(4, 2).unwrap().len(), 4 + 6 * 5);
        assert_eq!(candidates(3, 1).unwrap().len(), 3);
    }

    #[test]
    fn hw2_with_dictators() {
        let out = exact_cc(&named(NamedFunction::Hw, 2), 1, &SearchBudget::default()).unwrap();
        match out {
            SearchOutcome::Found {
                m_star, witness, ..
            } => {
                assert_eq!(m_star, 2);
                assert_eq!(witness.inners()[0], LocalFunction::variable(1).unwrap());
                assert_eq!(witness.inners()[1], LocalFunction::variable(2).unwrap());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parity4_meets_n_over_k() {
        let out = exact_cc(
            &named(NamedFunction::Parity, 4),
            2,
            &SearchBudget::default(),
        )
        .unwrap();
        assert_eq!(out.m_star(), Some(2));
    }

    #[test]
    fn filter_examples() {
        let hw4 = named(NamedFunction::Hw, 4);
        assert!(matches!(
            lower_bound_refinement(&hw4, 2, 2),
            Refinement::Refuted(_)
        ));
        assert_eq!(lower_bound_refinement(&hw4, 2, 2 * 2), Refinement::Possible);
        let p4 = named(NamedFunction::Parity, 4);
        assert!(matches!(
            lower_bound_refinement(&p4, 2, 1),
            Refinement::Refuted(_)
        ));
    }

    #[test]
    fn rejects_degenerate_targets() {
        let f = TruthTable::from_fn(3, 2, |x| x & 1).unwrap();
        assert!(matches!(
            exact_cc(&f, 2, &SearchBudget::default()),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            exact_cc(&named(NamedFunction::Hw, 7), 2, &SearchBudget::default()),
            Err(Error::Sizing(_))
        ));
    }

    #[test]
    fn node_limit_gives_inconclusive() {
        let budget = SearchBudget {
            node_limit: 10,
            ..SearchBudget::default()
        };
        let out = exact_cc(&named(NamedFunction::Maj, 4), 2, &budget).unwrap();
        assert!(matches!(
            out,
            SearchOutcome::Inconclusive { lower_bound: 2, .. }
        ));
    }
}
