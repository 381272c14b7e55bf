use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use super::entropy::{binary_entropy, entropy_of_counts};
use super::INFO_TOLERANCE;
use crate::boolfn::{NamedFunction, TruthTable};
use crate::composition::{query_profile, verify_against, Composition, Verification};
use crate::domain::Domain;
use crate::error::{Error, Result};

/// Largest arity for exhaustive information reports.
pub const MAX_INFO_ARITY: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct VarInfo {
    pub var: usize,
    /// Number of inners querying this variable.
    pub q: u32,
    /// `I[X_i : g(X)]`.
    pub mutual_info: f64,
    /// `H[X_i | g(X)]`.
    pub cond_entropy: f64,
    /// `H[X_i]`.
    pub marginal_entropy: f64,
    /// `Pr[X^{⊕i} ∉ D]`.
    pub escape: f64,
    /// Exact test that `X_i` and `g(X)` are dependent, i.e. `I_i > 0`.
    pub informative: bool,
}

/// Per-variable and aggregate information for `X` uniform on `D`.
#[derive(Clone, Debug, PartialEq)]
pub struct InfoReport {
    pub n: usize,
    pub m: usize,
    pub domain_size: u64,
    pub vars: Vec<VarInfo>,
    /// `I[X : g(X)] = H[g(X)]`.
    pub total_info: f64,
    /// `H[X] = log2 |D|`.
    pub domain_entropy: f64,
}

impl InfoReport {
    pub fn var(&self, i: usize) -> &VarInfo {
        &self.vars[i - 1]
    }

    /// `Σ_i I[X_i : g(X)]`.
    pub fn sum_var_info(&self) -> f64 {
        self.vars.iter().map(|v| v.mutual_info).sum()
    }

    /// `H[X | g(X)]`.
    pub fn cond_entropy_total(&self) -> f64 {
        self.domain_entropy - self.total_info
    }

    /// `var,q,I,Hcond,escape` rows; the trailing `total` row carries
    /// `m`, `I[X : g(X)]`, `H[X | g(X)]` and the largest escape probability.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("var,q,I,Hcond,escape\n");
        for v in &self.vars {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                v.var, v.q, v.mutual_info, v.cond_entropy, v.escape
            );
        }
        let max_escape = self.vars.iter().map(|v| v.escape).fold(0.0, f64::max);
        let _ = writeln!(
            out,
            "total,{},{},{},{}",
            self.m,
            self.total_info,
            self.cond_entropy_total(),
            max_escape
        );
        out
    }
}

pub fn info_report(c: &Composition, domain: &Domain) -> Result<InfoReport> {
    let n = c.n();
    if n > MAX_INFO_ARITY {
        return Err(Error::Sizing(format!(
            "information report needs n ≤ {MAX_INFO_ARITY}, got {n}"
        )));
    }
    if domain.n() != n {
        return Err(Error::Precondition(format!(
            "domain arity {} does not match composition arity {n}",
            domain.n()
        )));
    }
    let points: Vec<u32> = domain.iter().collect();
    let keys: Vec<u64> = points.par_iter().map(|&x| c.inner_vector(x)).collect();

    let mut group_of: HashMap<u64, usize> = HashMap::new();
    let mut group_keys: Vec<u64> = Vec::new();
    let mut group_count: Vec<u64> = Vec::new();
    // ones[g * n + (i-1)]
    let mut ones: Vec<u64> = Vec::new();
    let mut ones_total = vec![0u64; n];
    let mut escapes = vec![0u64; n];
    for (&x, &key) in points.iter().zip(&keys) {
        let g = *group_of.entry(key).or_insert_with(|| {
            group_keys.push(key);
            group_count.push(0);
            ones.extend(std::iter::repeat_n(0, n));
            group_keys.len() - 1
        });
        group_count[g] += 1;
        for i in 0..n {
            if x >> i & 1 == 1 {
                ones[g * n + i] += 1;
                ones_total[i] += 1;
            }
            if !domain.contains(x ^ 1 << i) {
                escapes[i] += 1;
            }
        }
    }
    // fixed summation order
    let mut order: Vec<usize> = (0..group_keys.len()).collect();
    order.sort_unstable_by_key(|&g| group_keys[g]);

    let total = domain.size();
    let t = total as f64;
    let profile = query_profile(c);
    let vars = (0..n)
        .map(|i| {
            let marginal = binary_entropy(ones_total[i] as f64 / t);
            let mut cond = 0.0;
            let mut informative = false;
            for &g in &order {
                let cnt = group_count[g];
                let o = ones[g * n + i];
                cond += cnt as f64 / t * binary_entropy(o as f64 / cnt as f64);
                // Pr[X_i=1 | g] ≠ Pr[X_i=1]
                informative |= o as u128 * total as u128 != cnt as u128 * ones_total[i] as u128;
            }
            VarInfo {
                var: i + 1,
                q: profile.q[i],
                mutual_info: (marginal - cond).max(0.0),
                cond_entropy: cond,
                marginal_entropy: marginal,
                escape: escapes[i] as f64 / t,
                informative,
            }
        })
        .collect();
    let total_info = entropy_of_counts(order.iter().map(|&g| group_count[g]), total);
    Ok(InfoReport {
        n,
        m: c.m(),
        domain_size: total,
        vars,
        total_info,
        domain_entropy: domain.log_size(),
    })
}

fn require_hw_on_domain(c: &Composition, target: &TruthTable, domain: &Domain) -> Result<()> {
    if let Verification::Counterexample {
        input,
        expected,
        got,
    } = verify_against(c, target, domain)?
    {
        return Err(Error::Precondition(format!(
            "composition does not compute the target on the domain: at {input} expected {expected}, got {got:?}"
        )));
    }
    if let Some(x) = domain.iter().find(|&x| target.get(x) != x.count_ones()) {
        return Err(Error::Precondition(format!(
            "target is not the Hamming weight on the domain (input {})",
            crate::bits::format_point(domain.n(), x)
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct KeyLemmaRow {
    pub var: usize,
    pub q: u32,
    pub escape: f64,
    pub cond_entropy: f64,
    /// `1 + Pr[X^{⊕i} ∉ D] − H[X_i | g(X)]`.
    pub gap: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KeyLemmaReport {
    pub rows: Vec<KeyLemmaRow>,
    pub info: InfoReport,
}

impl KeyLemmaReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn gap_sum(&self) -> f64 {
        self.rows.iter().map(|r| r.gap).sum()
    }

    /// Whether every variable feeds at least one inner.
    pub fn all_queried(&self) -> bool {
        self.rows.iter().all(|r| r.q >= 1)
    }
}

/// For a composition computing `|x|` on `D`, checks per variable that
/// `gap_i = 1 + escape_i − H[X_i | g(X)]` is nonnegative, and strictly
/// positive whenever no flip of `i` leaves `D`.
pub fn check_key_lemma(
    c: &Composition,
    target: &TruthTable,
    domain: &Domain,
) -> Result<KeyLemmaReport> {
    require_hw_on_domain(c, target, domain)?;
    let info = info_report(c, domain)?;
    let rows = info
        .vars
        .iter()
        .map(|v| {
            let gap = 1.0 + v.escape - v.cond_entropy;
            let strict_ok = v.escape > 0.0 || v.informative;
            KeyLemmaRow {
                var: v.var,
                q: v.q,
                escape: v.escape,
                cond_entropy: v.cond_entropy,
                gap,
                pass: gap >= -INFO_TOLERANCE && strict_ok,
            }
        })
        .collect();
    Ok(KeyLemmaReport { rows, info })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountingReport {
    pub checked: usize,
    /// Subsets touched by too few inners, with the count observed.
    pub failures: Vec<(Vec<usize>, usize)>,
}

impl CountingReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks that every subset `S` is touched by at least `log2(|S|+1)` inners
/// of a composition computing `HW_n` on the full cube.
pub fn check_counting_bound(c: &Composition, subsets: &[Vec<usize>]) -> Result<CountingReport> {
    let hw = TruthTable::named(NamedFunction::Hw, c.n())?;
    require_hw_on_domain(c, &hw, &Domain::full(c.n())?)?;
    let mut failures = Vec::new();
    for s in subsets {
        if let Some(&i) = s.iter().find(|&&i| i == 0 || i > c.n()) {
            return Err(Error::Coordinate { i, n: c.n() });
        }
        let count = c
            .inners()
            .iter()
            .filter(|g| s.iter().any(|&i| g.queries(i)))
            .count();
        // count ≥ log2(|S|+1)  ⇔  2^count ≥ |S|+1
        let enough = count >= 64 || (1u64 << count) > s.len() as u64;
        if !enough {
            failures.push((s.clone(), count));
        }
    }
    Ok(CountingReport {
        checked: subsets.len(),
        failures,
    })
}

/// All nonempty subsets of `[n]` of size at most `r`, in lexicographic order.
pub fn subsets_up_to(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        for i in start..=n {
            cur.push(i);
            out.push(cur.clone());
            if cur.len() < r {
                rec(i + 1, n, r, cur, out);
            }
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if r > 0 {
        rec(1, n, r, &mut Vec::new(), &mut out);
    }
    out
}
