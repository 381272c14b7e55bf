//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use comploc::{
    BranchingProgram, Composition, Domain, Layer, LocalFunction, NamedFunction, OuterFunction,
    TruthTable,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_local(rng: &mut TestRng, n: usize, k: usize) -> LocalFunction {
    let size = rng.gen_range(1..=k.min(n));
    let mut vars: Vec<usize> = (1..=n).collect();
    vars.shuffle(rng);
    let mut support = vars[..size].to_vec();
    support.sort_unstable();
    let table: Vec<bool> = (0..1usize << size).map(|_| rng.gen()).collect();
    LocalFunction::new(support, &table).unwrap()
}

/// A random composition computing `HW_n` on the full cube.
///
/// Variables are shuffled into blocks of at most `k`; each block reports its
/// weight either in binary or as a list of thresholds, with each inner
/// possibly negated. A few unrelated inners are mixed in.
pub fn random_hw_composition(rng: &mut TestRng, n: usize, k: usize) -> Composition {
    let mut vars: Vec<usize> = (1..=n).collect();
    vars.shuffle(rng);
    let mut inners = Vec::new();
    let mut rest = &vars[..];
    while !rest.is_empty() {
        let size = rng.gen_range(1..=k.min(rest.len()));
        let mut block = rest[..size].to_vec();
        rest = &rest[size..];
        block.sort_unstable();
        let binary = rng.gen_bool(0.5);
        let outputs = if binary {
            usize::BITS - size.leading_zeros()
        } else {
            size as u32
        };
        for d in 0..outputs {
            let flip = rng.gen_bool(0.5);
            let g = LocalFunction::from_fn(block.clone(), |t| {
                let w = t.count_ones();
                let bit = if binary { w >> d & 1 == 1 } else { w > d };
                bit ^ flip
            })
            .unwrap();
            inners.push(g);
        }
    }
    for _ in 0..rng.gen_range(0..=2) {
        inners.push(random_local(rng, n, k));
    }
    inners.shuffle(rng);
    let hw = TruthTable::named(NamedFunction::Hw, n).unwrap();
    Composition::induced(&hw, k, inners, &Domain::full(n).unwrap()).unwrap()
}

/// Random inners with a random boolean outer defined on every reachable vector.
pub fn random_binary_composition(rng: &mut TestRng, n: usize, k: usize, m: usize) -> Composition {
    let inners: Vec<LocalFunction> = (0..m).map(|_| random_local(rng, n, k)).collect();
    let mut outer = OuterFunction::new(m, 2).unwrap();
    let c = Composition::new(n, k, inners.clone(), OuterFunction::new(m, 2).unwrap()).unwrap();
    for x in 0..1u32 << n {
        let key = c.inner_vector(x);
        if outer.get(key).is_none() {
            outer.insert(key, rng.gen_range(0..2)).unwrap();
        }
    }
    Composition::new(n, k, inners, outer).unwrap()
}

pub fn random_bp(rng: &mut TestRng) -> BranchingProgram {
    let n = rng.gen_range(1..=8);
    let width = rng.gen_range(2..=4);
    let len = rng.gen_range(1..=10);
    let layers = (0..len)
        .map(|_| Layer {
            var: rng.gen_range(1..=n),
            delta0: (0..width).map(|_| rng.gen_range(0..width)).collect(),
            delta1: (0..width).map(|_| rng.gen_range(0..width)).collect(),
        })
        .collect();
    let accept: BTreeSet<usize> = (0..width).filter(|_| rng.gen_bool(0.4)).collect();
    BranchingProgram::new(n, width, layers, rng.gen_range(0..width), accept).unwrap()
}

/// Entropy in bits of the empirical distribution given by `counts`.
pub fn entropy(counts: impl IntoIterator<Item = u64>) -> f64 {
    let counts: Vec<u64> = counts.into_iter().collect();
    let total: u64 = counts.iter().sum();
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total as f64;
            -p * p.log2()
        })
        .sum()
}
