//! Compositions `f = h(g_1, …, g_m)` with k-local inner functions.

use std::collections::{BTreeMap, HashMap};

use num_rational::Ratio;
use rayon::prelude::*;

use crate::bits::{check_arity, format_point, BitVector, MAX_ARITY};
use crate::boolfn::{NamedFunction, Restriction, TruthTable};
use crate::domain::Domain;
use crate::error::{Error, Result};

/// Largest number of inner functions (inner-output vectors are packed in a `u64`).
pub const MAX_INNERS: usize = 64;

/// A function depending only on the coordinates in its support.
///
/// The table is indexed by the packed values of the support coordinates,
/// smallest coordinate in the least-significant position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalFunction {
    support: Vec<usize>,
    table: Vec<u64>,
}

/// Result of fixing some coordinates of a local function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Restricted {
    Local(LocalFunction),
    Constant(bool),
}

impl LocalFunction {
    pub fn new(support: Vec<usize>, table: &[bool]) -> Result<Self> {
        Self::check_support(&support)?;
        if table.len() != 1 << support.len() {
            return Err(Error::LocalFunction(format!(
                "support of size {} needs a table of {} bits, got {}",
                support.len(),
                1usize << support.len(),
                table.len()
            )));
        }
        Ok(Self::from_fn_unchecked(support, |t| table[t as usize]))
    }

    /// Builds the table from `f(local_index)`.
    pub fn from_fn(support: Vec<usize>, f: impl Fn(u32) -> bool) -> Result<Self> {
        Self::check_support(&support)?;
        Ok(Self::from_fn_unchecked(support, f))
    }

    /// The dictator function `x_i`.
    pub fn variable(i: usize) -> Result<Self> {
        Self::from_fn(vec![i], |t| t == 1)
    }

    fn check_support(support: &[usize]) -> Result<()> {
        if support.is_empty() {
            return Err(Error::LocalFunction("empty support".into()));
        }
        if support.len() > MAX_ARITY {
            return Err(Error::LocalFunction(format!(
                "support of size {} too large",
                support.len()
            )));
        }
        if support[0] == 0 {
            return Err(Error::LocalFunction("coordinates start at 1".into()));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::LocalFunction(format!(
                "support {support:?} not strictly increasing"
            )));
        }
        Ok(())
    }

    fn from_fn_unchecked(support: Vec<usize>, f: impl Fn(u32) -> bool) -> Self {
        let size = 1usize << support.len();
        let mut table = vec![0u64; size.div_ceil(64)];
        for t in 0..size {
            if f(t as u32) {
                table[t >> 6] |= 1 << (t & 63);
            }
        }
        Self { support, table }
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn arity(&self) -> usize {
        self.support.len()
    }

    pub fn queries(&self, i: usize) -> bool {
        self.support.binary_search(&i).is_ok()
    }

    #[inline]
    pub fn table_bit(&self, t: u32) -> bool {
        self.table[(t >> 6) as usize] >> (t & 63) & 1 == 1
    }

    pub fn table_bits(&self) -> Vec<bool> {
        (0..1u32 << self.arity())
            .map(|t| self.table_bit(t))
            .collect()
    }

    /// Packs the support coordinates of the full input `x`.
    #[inline]
    pub fn local_index(&self, x: u32) -> u32 {
        let mut t = 0;
        for (pos, &i) in self.support.iter().enumerate() {
            t |= (x >> (i - 1) & 1) << pos;
        }
        t
    }

    #[inline]
    pub fn eval(&self, x: u32) -> bool {
        self.table_bit(self.local_index(x))
    }

    pub fn is_constant(&self) -> bool {
        let first = self.table_bit(0);
        (0..1u32 << self.arity()).all(|t| self.table_bit(t) == first)
    }

    /// Whether every support coordinate actually influences the output.
    pub fn depends_on_all(&self) -> bool {
        (0..self.arity()).all(|pos| {
            let bit = 1u32 << pos;
            (0..1u32 << self.arity())
                .filter(|t| t & bit == 0)
                .any(|t| self.table_bit(t) != self.table_bit(t | bit))
        })
    }

    pub fn negate(&self) -> Self {
        Self::from_fn_unchecked(self.support.clone(), |t| !self.table_bit(t))
    }

    /// Fixes the coordinates not kept by `r` and renumbers the rest.
    pub fn restrict(&self, r: &Restriction) -> Restricted {
        let kept: Vec<(usize, usize)> = self
            .support
            .iter()
            .enumerate()
            .filter_map(|(pos, &i)| r.position(i).map(|p| (pos, p)))
            .collect();
        let mut base = 0u32;
        for (pos, &i) in self.support.iter().enumerate() {
            base |= (r.fixed_bits() >> (i - 1) & 1) << pos;
        }
        if kept.is_empty() {
            return Restricted::Constant(self.table_bit(base));
        }
        let support = kept.iter().map(|&(_, p)| p).collect();
        Restricted::Local(Self::from_fn_unchecked(support, |t| {
            let mut idx = base;
            for (bit, &(pos, _)) in kept.iter().enumerate() {
                idx |= (t >> bit & 1) << pos;
            }
            self.table_bit(idx)
        }))
    }
}

/// Formats an inner-output vector as an `m`-bit string, inner 1 leftmost.
pub fn format_key(m: usize, key: u64) -> String {
    (0..m)
        .map(|j| if key >> j & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Partial map `h : {0,1}^m → {0,…,d−1}` over reachable inner-output vectors.
///
/// Keys are packed with inner `j` (1-based) in bit `j−1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OuterFunction {
    m: usize,
    codomain: u32,
    entries: BTreeMap<u64, u32>,
}

impl OuterFunction {
    pub fn new(m: usize, codomain: u32) -> Result<Self> {
        if m > MAX_INNERS {
            return Err(Error::Sizing(format!(
                "{m} inner functions exceeds {MAX_INNERS}"
            )));
        }
        if codomain < 2 {
            return Err(Error::Codomain { value: 0, codomain });
        }
        Ok(Self {
            m,
            codomain,
            entries: BTreeMap::new(),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn codomain_size(&self) -> u32 {
        self.codomain
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Stores `h(key) = value`. Re-inserting a different value for the same key
    /// is an error.
    pub fn insert(&mut self, key: u64, value: u32) -> Result<()> {
        if self.m < 64 && key >> self.m != 0 {
            return Err(Error::Composition(format!(
                "key {key:#x} wider than m={}",
                self.m
            )));
        }
        if value >= self.codomain {
            return Err(Error::Codomain {
                value,
                codomain: self.codomain,
            });
        }
        match self.entries.insert(key, value) {
            Some(old) if old != value => Err(Error::Composition(format!(
                "outer key {} mapped to both {old} and {value}",
                format_key(self.m, key)
            ))),
            _ => Ok(()),
        }
    }

    #[inline]
    pub fn get(&self, key: u64) -> Option<u32> {
        self.entries.get(&key).copied()
    }

    pub fn lookup(&self, key: u64) -> Result<u32> {
        self.get(key).ok_or_else(|| Error::UnmappedKey {
            key: format_key(self.m, key),
        })
    }

    /// Entries in increasing packed-key order.
    pub fn entries(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    /// Same keys, values mapped through `f`.
    pub fn map_values(&self, codomain: u32, f: impl Fn(u32) -> u32) -> Result<Self> {
        let mut out = Self::new(self.m, codomain)?;
        for (k, v) in self.entries() {
            out.insert(k, f(v))?;
        }
        Ok(out)
    }
}

/// `f = h(g_1, …, g_m)` over `n` inputs with every `g_j` k-local.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Composition {
    n: usize,
    k: usize,
    inners: Vec<LocalFunction>,
    outer: OuterFunction,
}

impl Composition {
    pub fn new(
        n: usize,
        k: usize,
        inners: Vec<LocalFunction>,
        outer: OuterFunction,
    ) -> Result<Self> {
        check_arity(n)?;
        if k == 0 {
            return Err(Error::Composition("locality k must be at least 1".into()));
        }
        if inners.len() != outer.m() {
            return Err(Error::Composition(format!(
                "{} inner functions but outer takes {} inputs",
                inners.len(),
                outer.m()
            )));
        }
        for (j, g) in inners.iter().enumerate() {
            if g.arity() > k {
                return Err(Error::Composition(format!(
                    "inner {} queries {} variables, more than k={k}",
                    j + 1,
                    g.arity()
                )));
            }
            if let Some(&i) = g.support().last().filter(|&&i| i > n) {
                return Err(Error::Coordinate { i, n });
            }
        }
        Ok(Self {
            n,
            k,
            inners,
            outer,
        })
    }

    /// Builds the outer map by running `decode` on every inner-output vector
    /// reached from `domain`.
    pub fn from_decoder(
        n: usize,
        k: usize,
        inners: Vec<LocalFunction>,
        codomain: u32,
        domain: &Domain,
        decode: impl Fn(u64) -> u32,
    ) -> Result<Self> {
        let mut outer = OuterFunction::new(inners.len(), codomain)?;
        let mut seen = std::collections::HashSet::new();
        for x in domain.iter() {
            let key = pack(&inners, x);
            if seen.insert(key) {
                outer.insert(key, decode(key))?;
            }
        }
        Self::new(n, k, inners, outer)
    }

    /// Inner functions plus the outer induced from `f` on `domain`.
    pub fn induced(
        f: &TruthTable,
        k: usize,
        inners: Vec<LocalFunction>,
        domain: &Domain,
    ) -> Result<Self> {
        let outer = induce_outer(f, &inners, domain).map_err(Error::from)?;
        Self::new(f.n(), k, inners, outer)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.inners.len()
    }

    pub fn inners(&self) -> &[LocalFunction] {
        &self.inners
    }

    pub fn outer(&self) -> &OuterFunction {
        &self.outer
    }

    pub fn codomain_size(&self) -> u32 {
        self.outer.codomain_size()
    }

    /// `(g_1(x), …, g_m(x))` packed with inner 1 in bit 0.
    #[inline]
    pub fn inner_vector(&self, x: u32) -> u64 {
        pack(&self.inners, x)
    }

    /// `h(g(x))`, or `None` when the inner-output vector is unmapped.
    #[inline]
    pub fn eval_raw(&self, x: u32) -> Option<u32> {
        self.outer.get(self.inner_vector(x))
    }

    pub fn evaluate(&self, x: &BitVector) -> Result<u32> {
        if x.n() != self.n {
            return Err(Error::Precondition(format!(
                "input arity {} does not match composition arity {}",
                x.n(),
                self.n
            )));
        }
        self.outer.lookup(self.inner_vector(x.bits()))
    }

    /// The same composition with output negated (binary codomain only).
    pub fn negated(&self) -> Result<Self> {
        if self.codomain_size() != 2 {
            return Err(Error::Precondition(
                "negation needs a binary codomain".into(),
            ));
        }
        let outer = self.outer.map_values(2, |v| 1 - v)?;
        Self::new(self.n, self.k, self.inners.clone(), outer)
    }

    /// Full truth table; fails if some input reaches an unmapped vector.
    pub fn to_truth_table(&self) -> Result<TruthTable> {
        for x in 0..1u32 << self.n {
            self.outer.lookup(self.inner_vector(x))?;
        }
        TruthTable::from_fn(self.n, self.codomain_size(), |x| {
            self.eval_raw(x).unwrap_or_default()
        })
    }

    /// Indices (0-based) of inners whose support contains `i`.
    pub fn querying(&self, i: usize) -> Vec<usize> {
        (0..self.m())
            .filter(|&j| self.inners[j].queries(i))
            .collect()
    }
}

#[inline]
pub(crate) fn pack(inners: &[LocalFunction], x: u32) -> u64 {
    let mut key = 0u64;
    for (j, g) in inners.iter().enumerate() {
        key |= (g.eval(x) as u64) << j;
    }
    key
}

/// Outcome of an exhaustive equivalence check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verification {
    Pass,
    /// Least failing input in integer-encoding order; `got` is `None` when the
    /// composition's outer is undefined there.
    Counterexample {
        input: BitVector,
        expected: u32,
        got: Option<u32>,
    },
}

impl Verification {
    pub fn passed(&self) -> bool {
        matches!(self, Verification::Pass)
    }
}

/// Checks `c(x) = f(x)` for every `x ∈ D`.
pub fn verify_against(c: &Composition, f: &TruthTable, domain: &Domain) -> Result<Verification> {
    if c.n() != f.n() || domain.n() != f.n() {
        return Err(Error::Precondition(format!(
            "arity mismatch: composition {}, target {}, domain {}",
            c.n(),
            f.n(),
            domain.n()
        )));
    }
    let bad = (0..1u32 << c.n())
        .into_par_iter()
        .filter(|&x| domain.contains(x))
        .find_first(|&x| c.eval_raw(x) != Some(f.get(x)));
    Ok(match bad {
        None => Verification::Pass,
        Some(x) => Verification::Counterexample {
            input: BitVector::new(c.n(), x)?,
            expected: f.get(x),
            got: c.eval_raw(x),
        },
    })
}

/// Two inputs with equal inner outputs but different target values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FiberConflict {
    pub x: BitVector,
    pub y: BitVector,
    pub key: u64,
}

impl From<FiberConflict> for Error {
    fn from(c: FiberConflict) -> Self {
        Error::Conflict {
            x: c.x.to_string(),
            y: c.y.to_string(),
        }
    }
}

/// The minimal outer map with `f = h ∘ g` on `D`, if one exists.
///
/// When the inner outputs fail to determine `f` on `D`, returns the conflict
/// pair `(x, y)` that is least in integer-encoding order, first on `x` then on `y`.
pub fn induce_outer(
    f: &TruthTable,
    inners: &[LocalFunction],
    domain: &Domain,
) -> std::result::Result<OuterFunction, FiberConflict> {
    struct Fiber {
        rep: u32,
        value: u32,
        first_diff: Option<u32>,
    }
    let n = f.n();
    let mut fibers: HashMap<u64, Fiber> = HashMap::new();
    for x in domain.iter() {
        let key = pack(inners, x);
        let value = f.get(x);
        let fiber = fibers.entry(key).or_insert(Fiber {
            rep: x,
            value,
            first_diff: None,
        });
        if fiber.value != value && fiber.first_diff.is_none() {
            fiber.first_diff = Some(x);
        }
    }
    let conflict = fibers
        .iter()
        .filter_map(|(&key, fb)| fb.first_diff.map(|y| (fb.rep, y, key)))
        .min();
    if let Some((x, y, key)) = conflict {
        return Err(FiberConflict {
            x: BitVector::new(n, x).expect("domain point"),
            y: BitVector::new(n, y).expect("domain point"),
            key,
        });
    }
    let mut outer =
        OuterFunction::new(inners.len(), f.codomain_size()).expect("inner count checked by caller");
    for (key, fb) in fibers {
        outer.insert(key, fb.value).expect("consistent fiber");
    }
    Ok(outer)
}

/// Per-variable query counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryProfile {
    /// `q[i-1]` = number of inners whose support contains `i`.
    pub q: Vec<u32>,
    pub q_max: u32,
    /// `m·k/n`.
    pub overhead: Ratio<u64>,
}

impl QueryProfile {
    pub fn q(&self, i: usize) -> u32 {
        self.q[i - 1]
    }
}

pub fn query_profile(c: &Composition) -> QueryProfile {
    let mut q = vec![0u32; c.n()];
    for g in c.inners() {
        for &i in g.support() {
            q[i - 1] += 1;
        }
    }
    let q_max = q.iter().copied().max().unwrap_or(0);
    QueryProfile {
        q,
        q_max,
        overhead: Ratio::new((c.m() * c.k()) as u64, c.n() as u64),
    }
}

/// Restricts every inner to the kept coordinates and rebuilds the outer map
/// over the `|I|`-cube. Inners that become constant are folded into the outer.
pub fn restrict_composition(c: &Composition, r: &Restriction) -> Result<Composition> {
    if r.n() != c.n() {
        return Err(Error::Restriction(format!(
            "restriction over {} coordinates, composition over {}",
            r.n(),
            c.n()
        )));
    }
    let inners: Vec<LocalFunction> = c
        .inners()
        .iter()
        .filter_map(|g| match g.restrict(r) {
            Restricted::Local(h) => Some(h),
            Restricted::Constant(_) => None,
        })
        .collect();
    let n_sub = r.kept().len();
    let mut outer = OuterFunction::new(inners.len(), c.codomain_size())?;
    for y in 0..1u32 << n_sub {
        let value = c.outer().lookup(c.inner_vector(r.embed(y)))?;
        let key = pack(&inners, y);
        match outer.get(key) {
            Some(old) if old != value => {
                let rep = (0..y).find(|&z| pack(&inners, z) == key).unwrap_or(y);
                return Err(Error::Conflict {
                    x: format_point(n_sub, rep),
                    y: format_point(n_sub, y),
                });
            }
            Some(_) => {}
            None => outer.insert(key, value)?,
        }
    }
    Composition::new(n_sub, c.k(), inners, outer)
}

/// Restricts a composition for `f_{2n}` to the `n` least-queried variables,
/// yielding a composition for `f_n` in which every variable is queried at
/// most `⌊mk/n⌋` times.
pub fn low_query_restriction(c: &Composition, family: NamedFunction) -> Result<Composition> {
    if !c.n().is_multiple_of(2) {
        return Err(Error::Infeasible(format!(
            "source arity {} is odd; expected a composition for f_(2n)",
            c.n()
        )));
    }
    let n_sub = c.n() / 2;
    let profile = query_profile(c);
    let mut order: Vec<usize> = (1..=c.n()).collect();
    order.sort_by_key(|&i| (profile.q(i), i));
    let kept = &order[..n_sub];
    let mut rest: Vec<usize> = order[n_sub..].to_vec();
    rest.sort_unstable();
    let ones = match family {
        NamedFunction::Hw => 0,
        // |x_I| + w ≥ n_sub  ⇔  |x_I| ≥ ⌈n_sub/2⌉  when w = ⌊n_sub/2⌋
        NamedFunction::Maj => n_sub / 2,
        NamedFunction::Parity => {
            return Err(Error::Precondition(
                "low-query restriction is defined for hw and maj".into(),
            ))
        }
    };
    if ones > rest.len() {
        return Err(Error::Infeasible(format!(
            "cannot place {ones} fixed ones among {} fixed coordinates",
            rest.len()
        )));
    }
    let fixing: Vec<(usize, bool)> = rest
        .iter()
        .enumerate()
        .map(|(pos, &i)| (i, pos < ones))
        .collect();
    let r = Restriction::new(c.n(), kept, &fixing)?;
    let out = restrict_composition(c, &r)?;
    let bound = (c.m() * c.k() / n_sub) as u32;
    let q_max = query_profile(&out).q_max;
    if q_max > bound {
        return Err(Error::Invariant(format!(
            "restricted q_max {q_max} exceeds ⌊mk/n⌋ = {bound}"
        )));
    }
    Ok(out)
}
