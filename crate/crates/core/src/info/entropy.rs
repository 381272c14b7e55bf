//! Shannon entropy of finite distributions, in bits.

use crate::error::{Error, Result};

const SUM_TOLERANCE: f64 = 1e-12;

/// `−p log2 p`, with `0 log 0 = 0`.
#[inline]
pub(crate) fn plogp(p: f64) -> f64 {
    if p > 0.0 && p < 1.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// `H2(p) = −p log p − (1−p) log(1−p)`.
pub fn binary_entropy(p: f64) -> f64 {
    plogp(p) + plogp(1.0 - p)
}

/// Entropy of the empirical distribution given by integer counts.
pub(crate) fn entropy_of_counts(counts: impl IntoIterator<Item = u64>, total: u64) -> f64 {
    let t = total as f64;
    counts.into_iter().map(|c| plogp(c as f64 / t)).sum()
}

fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::Distribution("no outcomes".into()));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::Distribution(format!(
            "weight {w} is not a probability"
        )));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::Distribution(format!("weights sum to {sum}, not 1")));
    }
    Ok(())
}

fn normalise(counts: &[u64]) -> Result<Vec<f64>> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::Distribution("all counts are zero".into()));
    }
    Ok(counts.iter().map(|&c| c as f64 / total as f64).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteDistribution {
    weights: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        check_weights(&weights)?;
        Ok(Self { weights })
    }

    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        Self::new(normalise(counts)?)
    }

    pub fn uniform(outcomes: usize) -> Result<Self> {
        if outcomes == 0 {
            return Err(Error::Distribution("no outcomes".into()));
        }
        Self::new(vec![1.0 / outcomes as f64; outcomes])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of outcomes with positive weight.
    pub fn support_size(&self) -> usize {
        self.weights.iter().filter(|&&w| w > 0.0).count()
    }

    pub fn entropy(&self) -> f64 {
        self.weights.iter().copied().map(plogp).sum()
    }
}

/// Joint distribution of `(X, Y)`; row index is `X`, column index is `Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    rows: usize,
    cols: usize,
    weights: Vec<f64>,
}

impl JointDistribution {
    /// `weights` in row-major order.
    pub fn new(rows: usize, cols: usize, weights: Vec<f64>) -> Result<Self> {
        if rows * cols != weights.len() || rows == 0 || cols == 0 {
            return Err(Error::Distribution(format!(
                "{rows}×{cols} joint needs {} weights, got {}",
                rows * cols,
                weights.len()
            )));
        }
        check_weights(&weights)?;
        Ok(Self {
            rows,
            cols,
            weights,
        })
    }

    pub fn from_counts(rows: usize, cols: usize, counts: &[u64]) -> Result<Self> {
        Self::new(rows, cols, normalise(counts)?)
    }

    /// Joint of `(X, f(X))` for `X` with the given marginal.
    pub fn of_function(
        marginal: &DiscreteDistribution,
        cols: usize,
        f: impl Fn(usize) -> usize,
    ) -> Result<Self> {
        let rows = marginal.weights().len();
        let mut weights = vec![0.0; rows * cols];
        for (x, &p) in marginal.weights().iter().enumerate() {
            let y = f(x);
            if y >= cols {
                return Err(Error::Distribution(format!(
                    "f({x}) = {y} outside {cols} columns"
                )));
            }
            weights[x * cols + y] = p;
        }
        Self::new(rows, cols, weights)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.weights[x * self.cols + y]
    }

    pub fn transpose(&self) -> Self {
        let mut weights = Vec::with_capacity(self.weights.len());
        for y in 0..self.cols {
            for x in 0..self.rows {
                weights.push(self.get(x, y));
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            weights,
        }
    }

    pub fn marginal_x(&self) -> DiscreteDistribution {
        let weights = (0..self.rows)
            .map(|x| (0..self.cols).map(|y| self.get(x, y)).sum())
            .collect();
        DiscreteDistribution { weights }
    }

    pub fn marginal_y(&self) -> DiscreteDistribution {
        let weights = (0..self.cols)
            .map(|y| (0..self.rows).map(|x| self.get(x, y)).sum())
            .collect();
        DiscreteDistribution { weights }
    }

    /// `H[X, Y]`.
    pub fn joint_entropy(&self) -> f64 {
        self.weights.iter().copied().map(plogp).sum()
    }

    /// `H[X | Y] = Σ_y Pr[Y=y] · H[X | Y=y]`.
    pub fn conditional_entropy(&self) -> f64 {
        (0..self.cols)
            .map(|y| {
                let py: f64 = (0..self.rows).map(|x| self.get(x, y)).sum();
                if py <= 0.0 {
                    return 0.0;
                }
                py * (0..self.rows)
                    .map(|x| plogp(self.get(x, y) / py))
                    .sum::<f64>()
            })
            .sum()
    }

    /// `I[X : Y] = H[X] − H[X | Y]`.
    pub fn mutual_information(&self) -> f64 {
        self.marginal_x().entropy() - self.conditional_entropy()
    }
}
