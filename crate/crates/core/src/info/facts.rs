//! Randomised checks of the basic entropy inequalities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::entropy::{DiscreteDistribution, JointDistribution};
use super::INFO_TOLERANCE;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FactsReport {
    pub trials: usize,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl FactsReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, trial: usize, what: &str, ok: bool) {
        self.checks += 1;
        if !ok {
            self.failures.push(format!("trial {trial}: {what}"));
        }
    }
}

fn random_weights(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    // a few exact zeros keep the 0·log 0 path exercised
    let raw: Vec<f64> = (0..len)
        .map(|_| {
            if rng.gen_bool(0.15) {
                0.0
            } else {
                rng.gen_range(0.0..1.0)
            }
        })
        .collect();
    let sum: f64 = raw.iter().sum();
    if sum == 0.0 {
        let mut w = vec![0.0; len];
        w[0] = 1.0;
        return w;
    }
    let mut w: Vec<f64> = raw.iter().map(|x| x / sum).collect();
    // absorb rounding so the weights sum to 1 within tolerance
    let drift = 1.0 - w.iter().sum::<f64>();
    if let Some(max) = w.iter_mut().max_by(|a, b| a.total_cmp(b)) {
        *max += drift;
    }
    w
}

/// Samples random joints and deterministic pairs and checks
/// `0 ≤ H[X|Y] ≤ H[X] ≤ log|supp X|`, subadditivity `H[X,Y] ≤ H[X] + H[Y]`,
/// `H[f(X) | X] = 0`, equality for independent pairs, and `I[X:Y] = I[Y:X]`.
pub fn validate_information_facts(trials: usize, seed: u64) -> FactsReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = FactsReport {
        trials,
        ..FactsReport::default()
    };
    let tol = INFO_TOLERANCE;
    for t in 0..trials {
        let rows = rng.gen_range(1..=6);
        let cols = rng.gen_range(1..=6);
        let joint = match JointDistribution::new(rows, cols, random_weights(&mut rng, rows * cols))
        {
            Ok(j) => j,
            Err(e) => {
                report
                    .failures
                    .push(format!("trial {t}: generator produced invalid joint: {e}"));
                continue;
            }
        };
        let hx = joint.marginal_x().entropy();
        let hy = joint.marginal_y().entropy();
        let hxy = joint.joint_entropy();
        let hx_given_y = joint.conditional_entropy();
        let support = joint.marginal_x().support_size().max(1) as f64;
        report.check(t, "H[X|Y] ≥ 0", hx_given_y >= -tol);
        report.check(t, "H[X|Y] ≤ H[X]", hx_given_y <= hx + tol);
        report.check(t, "H[X] ≤ log |supp X|", hx <= support.log2() + tol);
        report.check(t, "H[X,Y] ≤ H[X] + H[Y]", hxy <= hx + hy + tol);
        report.check(
            t,
            "H[X,Y] = H[Y] + H[X|Y]",
            (hxy - hy - hx_given_y).abs() <= tol,
        );
        let i_xy = joint.mutual_information();
        let i_yx = joint.transpose().mutual_information();
        report.check(t, "I[X:Y] = I[Y:X]", (i_xy - i_yx).abs() <= tol);
        report.check(t, "I[X:Y] ≥ 0", i_xy >= -tol);

        // Y = f(X)
        let px = DiscreteDistribution::new(random_weights(&mut rng, rows)).expect("normalised");
        let table: Vec<usize> = (0..rows).map(|_| rng.gen_range(0..cols)).collect();
        let det = JointDistribution::of_function(&px, cols, |x| table[x]).expect("in range");
        report.check(
            t,
            "H[f(X) | X] = 0",
            det.transpose().conditional_entropy().abs() <= tol,
        );
        report.check(
            t,
            "H[f(X)] ≤ H[X]",
            det.marginal_y().entropy() <= px.entropy() + tol,
        );

        // independent pair
        let py = DiscreteDistribution::new(random_weights(&mut rng, cols)).expect("normalised");
        let product: Vec<f64> = px
            .weights()
            .iter()
            .flat_map(|a| py.weights().iter().map(move |b| a * b))
            .collect();
        let sum: f64 = product.iter().sum();
        let product: Vec<f64> = product.iter().map(|p| p / sum).collect();
        if let Ok(ind) = JointDistribution::new(rows, cols, product) {
            report.check(
                t,
                "H[X1,X2] = H[X1] + H[X2] for independent X1, X2",
                (ind.joint_entropy() - px.entropy() - py.entropy()).abs() <= tol,
            );
        }
    }
    report
}
