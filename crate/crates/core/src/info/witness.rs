//! Bias witnesses: given the outputs `v` of the inners that do not query
//! variable `i`, a Hamming weight `w*` at which `X_i` is biased away from 1/2.
//!
//! For each reachable `v`, with `S_v` the inputs producing `v`:
//!   - `W_v` is the set of weights attained on `D ∩ S_v` (at most `2^{q_i}`),
//!   - `p_w = Pr[X^{⊕i} ∈ D ∧ |X^{(i↦0)}| = w | X ∈ S_v]` for `w = −1..n`,
//!   - `w*` sits at the largest upward step `p_w − p_{w−1}`.

use std::collections::BTreeMap;

use crate::boolfn::TruthTable;
use crate::composition::{verify_against, Composition, Verification};
use crate::domain::Domain;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct BiasWitness {
    pub var: usize,
    /// 0-based indices of the inners that do not query `var`.
    pub free_inners: Vec<usize>,
    /// Their outputs, packed in the order of `free_inners`.
    pub v: u64,
    pub w_star: u32,
    /// `Pr[X_i = 1 | X ∈ S_v ∧ |X| = w*]`.
    pub p_cond: f64,
    /// `Pr[|X| = w* | X ∈ S_v]`.
    pub mass: f64,
    /// `p_{w*} − p_{w*−1}`.
    pub jump: f64,
    pub w_v: Vec<u32>,
    pub w_v_size: usize,
    /// Largest `|W_v|` over every reachable `v`.
    pub max_w_v_size: usize,
    /// Number of reachable `v`.
    pub reachable: usize,
    /// `|p_cond − 1/2| · mass`.
    pub score: f64,
}

/// Exact rational `num / den`, compared by cross-multiplication.
#[derive(Clone, Copy, Debug)]
struct Frac {
    num: u128,
    den: u128,
}

impl Frac {
    fn gt(self, other: Frac) -> bool {
        self.num * other.den > other.num * self.den
    }
}

struct Candidate {
    v: u64,
    w_star: u32,
    ones: u64,
    at_weight: u64,
    members: u64,
    jump: Frac,
    w_v: Vec<u32>,
}

impl Candidate {
    // |ones/at − 1/2| · at/members = |2·ones − at| / (2·members)
    fn score(&self) -> Frac {
        Frac {
            num: (2 * self.ones).abs_diff(self.at_weight) as u128,
            den: 2 * self.members as u128,
        }
    }
}

pub fn extract_bias_witness(
    c: &Composition,
    target: &TruthTable,
    domain: &Domain,
    var: usize,
) -> Result<BiasWitness> {
    let n = c.n();
    if var == 0 || var > n {
        return Err(Error::Coordinate { i: var, n });
    }
    if let Verification::Counterexample { input, .. } = verify_against(c, target, domain)? {
        return Err(Error::Precondition(format!(
            "composition disagrees with the target at {input}"
        )));
    }
    if let Some(x) = domain.iter().find(|&x| target.get(x) != x.count_ones()) {
        return Err(Error::Precondition(format!(
            "target is not the Hamming weight on the domain (input {})",
            crate::bits::format_point(n, x)
        )));
    }
    let querying = c.querying(var);
    let q = querying.len();
    if q == 0 {
        return Err(Error::Precondition(format!(
            "variable {var} is not queried"
        )));
    }
    let free_inners: Vec<usize> = (0..c.m()).filter(|j| !querying.contains(j)).collect();
    let bit = 1u32 << (var - 1);

    // v → members of D ∩ S_v
    let mut classes: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for x in domain.iter() {
        let v = free_inners.iter().enumerate().fold(0u64, |acc, (pos, &j)| {
            acc | (c.inners()[j].eval(x) as u64) << pos
        });
        classes.entry(v).or_default().push(x);
    }
    if classes.is_empty() {
        return Err(Error::Precondition("no reachable assignment".into()));
    }

    let limit = if q >= 63 { usize::MAX } else { 1usize << q };
    let mut best: Option<Candidate> = None;
    let mut max_w_v_size = 0;
    for (&v, members) in &classes {
        let mut weights: Vec<u32> = members.iter().map(|x| x.count_ones()).collect();
        weights.sort_unstable();
        weights.dedup();
        if weights.len() > limit {
            return Err(Error::Invariant(format!(
                "|W_v| = {} exceeds 2^q = {limit} for v = {v:#b}",
                weights.len()
            )));
        }
        max_w_v_size = max_w_v_size.max(weights.len());

        // counts[w + 1] = #{x : x^{⊕i} ∈ D, |x^{(i↦0)}| = w}
        let mut pairs = vec![0u64; n + 2];
        for &x in members {
            if domain.contains(x ^ bit) {
                pairs[(x & !bit).count_ones() as usize + 1] += 1;
            }
        }
        let w_star = (1..n + 2)
            .max_by(|&a, &b| {
                let da = pairs[a] as i64 - pairs[a - 1] as i64;
                let db = pairs[b] as i64 - pairs[b - 1] as i64;
                // prefer the lower weight on ties
                da.cmp(&db).then(b.cmp(&a))
            })
            .expect("nonempty range");
        let step = pairs[w_star] as i64 - pairs[w_star - 1] as i64;
        if step <= 0 {
            continue;
        }
        let w_star = (w_star - 1) as u32;
        let at: Vec<&u32> = members
            .iter()
            .filter(|x| x.count_ones() == w_star)
            .collect();
        if at.is_empty() {
            continue;
        }
        let cand = Candidate {
            v,
            w_star,
            ones: at.iter().filter(|&&&x| x & bit != 0).count() as u64,
            at_weight: at.len() as u64,
            members: members.len() as u64,
            jump: Frac {
                num: step as u128,
                den: members.len() as u128,
            },
            w_v: weights,
        };
        // strict improvement only: earlier (v, w*) wins ties
        if best.as_ref().is_none_or(|b| cand.score().gt(b.score())) {
            best = Some(cand);
        }
    }
    let best = best.ok_or_else(|| {
        Error::Precondition(format!(
            "no assignment yields an upward step for variable {var}"
        ))
    })?;
    let score = best.score();
    Ok(BiasWitness {
        var,
        free_inners,
        v: best.v,
        w_star: best.w_star,
        p_cond: best.ones as f64 / best.at_weight as f64,
        mass: best.at_weight as f64 / best.members as f64,
        jump: best.jump.num as f64 / best.jump.den as f64,
        w_v_size: best.w_v.len(),
        w_v: best.w_v,
        max_w_v_size,
        reachable: classes.len(),
        score: score.num as f64 / score.den as f64,
    })
}
