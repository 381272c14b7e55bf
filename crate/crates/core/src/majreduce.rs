//! From a composition for `Maj_n` to one computing the Hamming weight of the
//! free variables on a weight band.
//!
//! Variables split into control, buffer and free sets so that no inner reads
//! both a control and a free variable. Buffers are fixed to a known weight,
//! and replaying the source outer over every control weight `0..=t` recovers
//! `|x_free|` exactly on the band `[⌈n_free/2⌉ − s − 1, ⌈n_free/2⌉ + s]`,
//! `s = ⌊t/2⌋`, clamped outside it.

use std::collections::BTreeSet;

use crate::boolfn::{NamedFunction, Restriction, TruthTable};
use crate::composition::{
    pack, query_profile, verify_against, Composition, LocalFunction, OuterFunction, Restricted,
    Verification,
};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::info::{check_key_lemma, InfoReport, KeyLemmaReport};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableSplit {
    pub n: usize,
    pub control: Vec<usize>,
    pub buffer: Vec<usize>,
    pub free: Vec<usize>,
    /// 0-based indices of inners reading some control variable.
    pub control_inners: Vec<usize>,
}

impl VariableSplit {
    pub fn t(&self) -> usize {
        self.control.len()
    }

    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    /// Whether some inner reads both a free and a control variable.
    pub fn mixes(&self, c: &Composition) -> bool {
        c.inners().iter().any(|g| {
            g.support().iter().any(|i| self.free.contains(i))
                && g.support().iter().any(|i| self.control.contains(i))
        })
    }
}

fn closure(c: &Composition, controls: &BTreeSet<usize>) -> (BTreeSet<usize>, Vec<usize>) {
    let mut vars = controls.clone();
    let mut inners = Vec::new();
    for (j, g) in c.inners().iter().enumerate() {
        if g.support().iter().any(|i| controls.contains(i)) {
            inners.push(j);
            vars.extend(g.support().iter().copied());
        }
    }
    (vars, inners)
}

/// Picks `t` control variables greedily (smallest closure, lowest index on
/// ties), pads the closure `I′` with the lowest unused indices up to `2t+1`,
/// and requires `|I′| ≤ n/2`.
pub fn split_variables(c: &Composition, t: usize) -> Result<VariableSplit> {
    let n = c.n();
    if t == 0 {
        return Err(Error::Precondition(
            "control size t must be at least 1".into(),
        ));
    }
    if t > n {
        return Err(Error::Infeasible(format!("t = {t} exceeds n = {n}")));
    }
    let mut controls = BTreeSet::new();
    for _ in 0..t {
        let pick = (1..=n)
            .filter(|i| !controls.contains(i))
            .min_by_key(|&i| {
                let mut trial = controls.clone();
                trial.insert(i);
                (closure(c, &trial).0.len(), i)
            })
            .expect("t ≤ n leaves a candidate");
        controls.insert(pick);
    }
    let (mut closed, control_inners) = closure(c, &controls);
    for i in 1..=n {
        if closed.len() > 2 * t {
            break;
        }
        closed.insert(i);
    }
    if 2 * closed.len() > n {
        return Err(Error::Infeasible(format!(
            "closure of {t} control variables has {} variables, more than n/2 = {}",
            closed.len(),
            n as f64 / 2.0
        )));
    }
    let split = VariableSplit {
        n,
        control: controls.iter().copied().collect(),
        buffer: closed.difference(&controls).copied().collect(),
        free: (1..=n).filter(|i| !closed.contains(i)).collect(),
        control_inners,
    };
    debug_assert!(!split.mixes(c));
    Ok(split)
}

/// Which control coordinates are set to reach a given control weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ControlFill {
    #[default]
    LowestFirst,
    HighestFirst,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartialHw {
    /// Composition over the free variables, renumbered `1..=n_free` in order.
    pub composition: Composition,
    pub split: VariableSplit,
    /// Weight interval on which the composition equals `|x_free|`.
    pub band: (u32, u32),
    /// Buffer coordinates fixed to 1 (the rest are 0).
    pub buffer_ones: Vec<usize>,
    pub buffer_weight: u32,
}

impl PartialHw {
    pub fn domain(&self) -> Result<Domain> {
        Domain::band(self.split.n_free(), self.band.0, self.band.1)
    }
}

fn ceil_half(n: usize) -> i64 {
    n.div_ceil(2) as i64
}

pub fn derive_partial_hw(c: &Composition, split: &VariableSplit) -> Result<PartialHw> {
    derive_partial_hw_with(c, split, ControlFill::LowestFirst)
}

pub fn derive_partial_hw_with(
    c: &Composition,
    split: &VariableSplit,
    fill: ControlFill,
) -> Result<PartialHw> {
    let n = c.n();
    if split.n != n || split.mixes(c) {
        return Err(Error::Precondition(
            "split does not belong to this composition".into(),
        ));
    }
    if c.codomain_size() != 2 {
        return Err(Error::Precondition("source must compute majority".into()));
    }
    let t = split.t() as i64;
    let s = t / 2;
    let n_free = split.n_free();
    if n_free == 0 {
        return Err(Error::Infeasible("no free variables".into()));
    }
    let b = ceil_half(n) - ceil_half(n_free) - s;
    if b < 0 || b > split.buffer.len() as i64 {
        return Err(Error::Infeasible(format!(
            "buffer weight {b} outside 0..={}",
            split.buffer.len()
        )));
    }
    let lo = ceil_half(n_free) - s - 1;
    let hi = ceil_half(n_free) + s;
    if lo < 0 || hi > n_free as i64 {
        return Err(Error::Infeasible(format!(
            "band [{lo}, {hi}] does not fit {n_free} free variables"
        )));
    }

    let buffer_ones: Vec<usize> = split.buffer.iter().copied().take(b as usize).collect();
    let buffer_bits = buffer_ones.iter().fold(0u32, |x, &i| x | 1 << (i - 1));
    let controls: Vec<usize> = match fill {
        ControlFill::LowestFirst => split.control.clone(),
        ControlFill::HighestFirst => split.control.iter().rev().copied().collect(),
    };
    let control_bits = |weight: usize| {
        controls[..weight]
            .iter()
            .fold(0u32, |x, &i| x | 1 << (i - 1))
    };

    // g'_j(x_free) = g_j(x_free ∘ x_buffer ∘ 0^control) for every j reading a free variable
    let fixing: Vec<(usize, bool)> = split
        .buffer
        .iter()
        .map(|&i| (i, buffer_bits >> (i - 1) & 1 == 1))
        .chain(split.control.iter().map(|&i| (i, false)))
        .collect();
    let r = Restriction::new(n, &split.free, &fixing)?;
    let derived: Vec<LocalFunction> = c
        .inners()
        .iter()
        .filter_map(|g| match g.restrict(&r) {
            Restricted::Local(h) => Some(h),
            Restricted::Constant(_) => None,
        })
        .collect();

    // f(x_free) = (⌈n_free/2⌉ + s − t − 1) + #{weights w ≤ t : Maj(x_free ∘ x_buffer ∘ w ones)}
    let base = ceil_half(n_free) + s - t - 1;
    let mut outer = OuterFunction::new(derived.len(), hi as u32 + 1)?;
    for y in 0..1u32 << n_free {
        let x = r.embed(y);
        let mut accepted = 0i64;
        for w in 0..=split.t() {
            accepted += c.outer().lookup(c.inner_vector(x | control_bits(w)))? as i64;
        }
        let value = (base + accepted).max(lo) as u32;
        let key = pack(&derived, y);
        if outer.get(key).is_some_and(|v| v != value) {
            return Err(Error::Invariant(format!(
                "derived outer is not a function of the free-side inner outputs (input {})",
                crate::bits::format_point(n_free, y)
            )));
        }
        outer.insert(key, value)?;
    }
    let composition = Composition::new(n_free, c.k(), derived, outer)?;
    Ok(PartialHw {
        composition,
        split: split.clone(),
        band: (lo as u32, hi as u32),
        buffer_ones,
        buffer_weight: b as u32,
    })
}

/// Everything the majority pipeline measures on the derived instance.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineReport {
    pub partial: PartialHw,
    pub key_lemma: KeyLemmaReport,
    /// Inners of the derived composition.
    pub m: usize,
    /// `n_free − log2 |D|`.
    pub log_deficit: f64,
    pub gap_sum: f64,
    /// `2 / (t + 2)`.
    pub escape_bound: f64,
    /// Largest per-variable query count in the derived composition.
    pub q_max: u32,
}

impl PipelineReport {
    pub fn info(&self) -> &InfoReport {
        &self.key_lemma.info
    }

    pub fn escapes_within_bound(&self) -> bool {
        self.info()
            .vars
            .iter()
            .all(|v| v.escape <= self.escape_bound + 1e-12)
    }
}

/// Checks the derived composition against `|x|` on the band and against the
/// clamp values outside it.
pub fn verify_partial_hw(p: &PartialHw) -> Result<Verification> {
    let n_free = p.split.n_free();
    let (lo, hi) = p.band;
    let clamped = TruthTable::from_fn(n_free, hi + 1, |x| x.count_ones().clamp(lo, hi))?;
    verify_against(&p.composition, &clamped, &Domain::full(n_free)?)
}

pub fn end_to_end_pipeline(c: &Composition, t: usize) -> Result<PipelineReport> {
    let split = split_variables(c, t)?;
    let partial = derive_partial_hw(c, &split)?;
    if let Verification::Counterexample {
        input,
        expected,
        got,
    } = verify_partial_hw(&partial)?
    {
        return Err(Error::Invariant(format!(
            "derived composition wrong at {input}: expected {expected}, got {got:?}"
        )));
    }
    let n_free = split.n_free();
    let domain = partial.domain()?;
    let hw = TruthTable::named(NamedFunction::Hw, n_free)?;
    let key_lemma = check_key_lemma(&partial.composition, &hw, &domain)?;
    Ok(PipelineReport {
        m: partial.composition.m(),
        log_deficit: n_free as f64 - domain.log_size(),
        gap_sum: key_lemma.gap_sum(),
        escape_bound: 2.0 / (t as f64 + 2.0),
        q_max: query_profile(&partial.composition).q_max,
        key_lemma,
        partial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composition::{induce_outer, LocalFunction};
    use crate::constructions::build_maj;

    #[test]
    fn split_of_maj_12_3() {
        let c = build_maj(12, 3).unwrap();
        let s = split_variables(&c, 2).unwrap();
        assert_eq!(s.control, vec![1, 2]);
        assert_eq!(s.control_inners, vec![0, 1]);
        assert_eq!(s.buffer, vec![3, 4, 5]);
        assert_eq!(s.free, (6..=12).collect::<Vec<_>>());
        assert!(!s.mixes(&c));
    }

    #[test]
    fn infeasible_t() {
        let c = build_maj(12, 3).unwrap();
        assert!(matches!(split_variables(&c, 12), Err(Error::Infeasible(_))));
        assert!(matches!(split_variables(&c, 4), Err(Error::Infeasible(_))));
    }

    #[test]
    fn disjoint_supports_pad_to_three() {
        // Maj_8 through eight dictators
        let maj = TruthTable::named(NamedFunction::Maj, 8).unwrap();
        let inners: Vec<LocalFunction> = (1..=8)
            .map(|i| LocalFunction::variable(i).unwrap())
            .collect();
        let full = Domain::full(8).unwrap();
        let outer = induce_outer(&maj, &inners, &full).unwrap();
        let c = Composition::new(8, 1, inners, outer).unwrap();
        let s = split_variables(&c, 1).unwrap();
        assert_eq!(s.control, vec![1]);
        assert_eq!(s.buffer, vec![2, 3]);
        assert_eq!(s.free.len(), 5);
    }

    #[test]
    fn derive_maj_12_3() {
        let c = build_maj(12, 3).unwrap();
        let s = split_variables(&c, 2).unwrap();
        let p = derive_partial_hw(&c, &s).unwrap();
        assert_eq!(p.buffer_weight, 1);
        assert_eq!(p.buffer_ones, vec![3]);
        assert_eq!(p.band, (2, 5));
        assert!(verify_partial_hw(&p).unwrap().passed());
        let hw7 = TruthTable::named(NamedFunction::Hw, 7).unwrap();
        assert!(verify_against(&p.composition, &hw7, &p.domain().unwrap())
            .unwrap()
            .passed());
    }

    #[test]
    fn control_fill_is_irrelevant() {
        let c = build_maj(12, 3).unwrap();
        let s = split_variables(&c, 2).unwrap();
        let a = derive_partial_hw_with(&c, &s, ControlFill::LowestFirst).unwrap();
        let b = derive_partial_hw_with(&c, &s, ControlFill::HighestFirst).unwrap();
        for y in 0..1u32 << 7 {
            assert_eq!(a.composition.eval_raw(y), b.composition.eval_raw(y));
        }
    }
}
