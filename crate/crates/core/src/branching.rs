//! Bounded-width branching programs and their reduction to compositions.

use std::collections::BTreeSet;

use crate::bits::{check_arity, BitVector};
use crate::boolfn::TruthTable;
use crate::composition::{Composition, LocalFunction, MAX_INNERS};
use crate::constructions::digits_for;
use crate::domain::Domain;
use crate::error::{Error, Result};

/// One layer: read `var`, then move along `delta0` or `delta1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layer {
    pub var: usize,
    pub delta0: Vec<usize>,
    pub delta1: Vec<usize>,
}

impl Layer {
    #[inline]
    fn step(&self, state: usize, x: u32) -> usize {
        if x >> (self.var - 1) & 1 == 1 {
            self.delta1[state]
        } else {
            self.delta0[state]
        }
    }
}

/// A layered program of width `w` over `n` inputs; states are `0..w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchingProgram {
    n: usize,
    width: usize,
    layers: Vec<Layer>,
    start: usize,
    accept: BTreeSet<usize>,
}

impl BranchingProgram {
    pub fn new(
        n: usize,
        width: usize,
        layers: Vec<Layer>,
        start: usize,
        accept: BTreeSet<usize>,
    ) -> Result<Self> {
        check_arity(n)?;
        if width < 2 {
            return Err(Error::BranchingProgram(format!("width {width} below 2")));
        }
        if start >= width {
            return Err(Error::BranchingProgram(format!(
                "start state {start} ≥ width {width}"
            )));
        }
        if let Some(s) = accept.iter().find(|&&s| s >= width) {
            return Err(Error::BranchingProgram(format!(
                "accept state {s} ≥ width {width}"
            )));
        }
        for (t, layer) in layers.iter().enumerate() {
            if layer.var == 0 || layer.var > n {
                return Err(Error::Coordinate { i: layer.var, n });
            }
            for delta in [&layer.delta0, &layer.delta1] {
                if delta.len() != width || delta.iter().any(|&s| s >= width) {
                    return Err(Error::BranchingProgram(format!(
                        "layer {} transition {delta:?} is not a map [{width}]→[{width}]",
                        t + 1
                    )));
                }
            }
        }
        Ok(Self {
            n,
            width,
            layers,
            start,
            accept,
        })
    }

    /// Width-2 parity automaton reading `x_1, …, x_n` in order.
    pub fn parity(n: usize) -> Result<Self> {
        Self::counter(n, 2, [1].into_iter().collect())
    }

    /// Counts ones modulo `width`, accepting when the count is `≡ 0`.
    pub fn mod_counter(n: usize, width: usize) -> Result<Self> {
        Self::counter(n, width, [0].into_iter().collect())
    }

    fn counter(n: usize, width: usize, accept: BTreeSet<usize>) -> Result<Self> {
        let id: Vec<usize> = (0..width).collect();
        let inc: Vec<usize> = (0..width).map(|s| (s + 1) % width).collect();
        let layers = (1..=n)
            .map(|var| Layer {
                var,
                delta0: id.clone(),
                delta1: inc.clone(),
            })
            .collect();
        Self::new(n, width, layers, 0, accept)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn accept(&self) -> &BTreeSet<usize> {
        &self.accept
    }

    fn run(&self, layers: &[Layer], state: usize, x: u32) -> usize {
        layers.iter().fold(state, |s, l| l.step(s, x))
    }

    #[inline]
    pub fn eval_raw(&self, x: u32) -> bool {
        self.accept.contains(&self.run(&self.layers, self.start, x))
    }

    pub fn evaluate(&self, x: &BitVector) -> Result<bool> {
        if x.n() != self.n {
            return Err(Error::Precondition(format!(
                "input arity {} does not match program arity {}",
                x.n(),
                self.n
            )));
        }
        Ok(self.eval_raw(x.bits()))
    }

    pub fn truth_table(&self) -> Result<TruthTable> {
        TruthTable::from_fn(self.n, 2, |x| self.eval_raw(x) as u32)
    }
}

/// Cuts the program into `⌈L/k⌉` segments of at most `k` layers. For every
/// segment and start state, `⌈log2 w⌉` inners give the end state in binary
/// (least-significant bit first). The outer chains the segment maps from the
/// start state and tests acceptance.
///
/// Inner order: segment, then start state, then state bit.
pub fn bp_to_composition(bp: &BranchingProgram, k: usize) -> Result<Composition> {
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    if bp.is_empty() {
        return Err(Error::BranchingProgram("program has no layers".into()));
    }
    let w = bp.width();
    let state_bits = digits_for(w - 1);
    let segments: Vec<&[Layer]> = bp.layers().chunks(k).collect();
    let m = segments.len() * w * state_bits;
    if m > MAX_INNERS {
        return Err(Error::Sizing(format!(
            "reduction needs {m} inners, limit {MAX_INNERS}"
        )));
    }
    let mut inners = Vec::with_capacity(m);
    for seg in &segments {
        let vars: BTreeSet<usize> = seg.iter().map(|l| l.var).collect();
        let support: Vec<usize> = vars.into_iter().collect();
        for sigma in 0..w {
            for b in 0..state_bits {
                let g = LocalFunction::from_fn(support.clone(), |t| {
                    let mut x = 0u32;
                    for (pos, &i) in support.iter().enumerate() {
                        x |= (t >> pos & 1) << (i - 1);
                    }
                    bp.run(seg, sigma, x) >> b & 1 == 1
                })?;
                inners.push(g);
            }
        }
    }
    let per_segment = w * state_bits;
    let decode = |u: u64| {
        let mut state = bp.start();
        for s in 0..segments.len() {
            let base = s * per_segment + state * state_bits;
            state = (u >> base & ((1 << state_bits) - 1)) as usize;
            if state >= w {
                // only reachable vectors are decoded
                return 0;
            }
        }
        bp.accept().contains(&state) as u32
    };
    Composition::from_decoder(bp.n(), k, inners, 2, &Domain::full(bp.n())?, decode)
}
