//! Monte-Carlo propagation of expert-judgment noise through the weight
//! derivation: Gaussian perturbations of the upper-triangle comparisons,
//! reciprocals rebuilt, principal-eigenvector weights per sample.

use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;
use crate::fahp::principal_eigen;

use super::{mean_and_std, substream};

/// Smallest admissible perturbed comparison entry; draws at or below this
/// are rejected and redrawn to keep the matrix positive.
const MIN_ENTRY: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloResult {
    pub n_samples: usize,
    pub sigma: f64,
    pub seed: u64,
    /// Per-sample weight vectors, each summing to 1.
    pub weight_samples: Vec<Vec<f64>>,
    /// Per-sample scores `w_i * cf_i * erm_i`.
    pub ers_samples: Vec<Vec<f64>>,
    pub weight_mean: Vec<f64>,
    pub weight_std: Vec<f64>,
    pub ers_mean: Vec<f64>,
    pub ers_std: Vec<f64>,
    /// How often each criterion carried the largest weight.
    pub dominance_counts: Vec<usize>,
}

/// Run `n` perturbed weight extractions: add N(0, sigma^2) noise to each
/// strict-upper entry of the crisp comparison matrix (redrawing values at
/// or below 0.01), enforce reciprocity and a unit diagonal, take the
/// power-iteration principal eigenvector normalized to sum 1, and score
/// each risk with the fixed cf and erm vectors.
///
/// Sample `i` draws from the ChaCha substream (seed, i), so results are
/// identical whether samples run sequentially or in parallel.
pub fn fahp_monte_carlo(
    base: &[Vec<f64>],
    sigma: f64,
    n: usize,
    seed: u64,
    cf: &[f64],
    erm: &[f64],
) -> Result<MonteCarloResult> {
    let k = base.len();
    if k < 2 || base.iter().any(|row| row.len() != k) {
        return Err(Error::Matrix(
            "base matrix is not square of size >= 2".to_string(),
        ));
    }
    if base.iter().flatten().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::Matrix(
            "base matrix has non-positive entries".to_string(),
        ));
    }
    if cf.len() != k || erm.len() != k {
        return Err(Error::Matrix(format!(
            "cf and erm vectors must have length {k}"
        )));
    }
    if n == 0 {
        return Err(Error::EmptySweep("zero samples requested".to_string()));
    }
    if sigma < 0.0 || sigma.is_nan() {
        return Err(Error::validation(
            "monte carlo",
            format!("sigma {sigma} is negative"),
        ));
    }

    let noise = Normal::new(0.0, sigma)
        .map_err(|e| Error::validation("monte carlo", format!("bad noise width: {e}")))?;

    const MAX_REDRAWS: usize = 10_000;
    let samples: Vec<Result<Vec<f64>>> = exec::map_indexed(n, |i| {
        let mut rng = substream(seed, i);
        let mut matrix = base.to_vec();
        for row in 0..k {
            matrix[row][row] = 1.0;
            for col in (row + 1)..k {
                let perturbed = if sigma == 0.0 {
                    base[row][col]
                } else {
                    let mut drawn = None;
                    for _ in 0..MAX_REDRAWS {
                        let candidate = base[row][col] + noise.sample(&mut rng);
                        if candidate > MIN_ENTRY {
                            drawn = Some(candidate);
                            break;
                        }
                    }
                    drawn.ok_or_else(|| {
                        Error::validation(
                            "monte carlo",
                            format!(
                                "no positive perturbation of entry ({row}, {col}) = {} after {MAX_REDRAWS} draws",
                                base[row][col]
                            ),
                        )
                    })?
                };
                matrix[row][col] = perturbed;
                matrix[col][row] = 1.0 / perturbed;
            }
        }
        principal_eigen(&matrix).map(|(_, w)| w)
    });
    let weight_samples: Vec<Vec<f64>> = samples.into_iter().collect::<Result<_>>()?;

    let ers_samples: Vec<Vec<f64>> = weight_samples
        .iter()
        .map(|w| (0..k).map(|i| w[i] * cf[i] * erm[i]).collect())
        .collect();

    let column =
        |data: &[Vec<f64>], i: usize| -> Vec<f64> { data.iter().map(|row| row[i]).collect() };
    let mut weight_mean = Vec::with_capacity(k);
    let mut weight_std = Vec::with_capacity(k);
    let mut ers_mean = Vec::with_capacity(k);
    let mut ers_std = Vec::with_capacity(k);
    for i in 0..k {
        let (wm, ws) = mean_and_std(&column(&weight_samples, i));
        let (em, es) = mean_and_std(&column(&ers_samples, i));
        weight_mean.push(wm);
        weight_std.push(ws);
        ers_mean.push(em);
        ers_std.push(es);
    }

    let mut dominance_counts = vec![0usize; k];
    for w in &weight_samples {
        let argmax = w
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i)
            .unwrap_or(0);
        dominance_counts[argmax] += 1;
    }

    Ok(MonteCarloResult {
        n_samples: n,
        sigma,
        seed,
        weight_samples,
        ers_samples,
        weight_mean,
        weight_std,
        ers_mean,
        ers_std,
        dominance_counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> Vec<Vec<f64>> {
        vec![
            vec![1.0, 3.0, 5.0],
            vec![1.0 / 3.0, 1.0, 3.0],
            vec![1.0 / 5.0, 1.0 / 3.0, 1.0],
        ]
    }

    const CF: [f64; 3] = [0.632, 0.648, 0.525];
    const ERM: [f64; 3] = [78.0, 25.0, 65.0];

    #[test]
    fn zero_noise_reproduces_the_deterministic_eigenvector() {
        let result = fahp_monte_carlo(&base(), 0.0, 8, 7, &CF, &ERM).unwrap();
        let (_, expected) = principal_eigen(&base()).unwrap();
        for sample in &result.weight_samples {
            for (a, b) in sample.iter().zip(&expected) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_sample_has_zero_spread() {
        let result = fahp_monte_carlo(&base(), 0.2, 1, 7, &CF, &ERM).unwrap();
        assert_eq!(result.n_samples, 1);
        for s in &result.weight_std {
            assert_eq!(*s, 0.0);
        }
    }

    #[test]
    fn weights_always_sum_to_one() {
        let result = fahp_monte_carlo(&base(), 0.2, 64, 42, &CF, &ERM).unwrap();
        for w in &result.weight_samples {
            let sum: f64 = w.iter().sum();
            assert!((sum - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn first_criterion_dominates_under_noise() {
        let result = fahp_monte_carlo(&base(), 0.2, 200, 42, &CF, &ERM).unwrap();
        assert!(result.dominance_counts[0] >= 198);
    }

    #[test]
    fn same_seed_means_same_samples() {
        let a = fahp_monte_carlo(&base(), 0.2, 32, 123, &CF, &ERM).unwrap();
        let b = fahp_monte_carlo(&base(), 0.2, 32, 123, &CF, &ERM).unwrap();
        assert_eq!(a, b);
        let c = fahp_monte_carlo(&base(), 0.2, 32, 124, &CF, &ERM).unwrap();
        assert_ne!(a.weight_samples, c.weight_samples);
    }

    #[test]
    fn tiny_entries_do_not_hang_at_zero_noise() {
        // an entry at the rejection floor must not spin the redraw loop
        let base = vec![vec![1.0, 0.005], vec![200.0, 1.0]];
        let result = fahp_monte_carlo(&base, 0.0, 4, 1, &[0.5, 0.5], &[50.0, 50.0]).unwrap();
        assert_eq!(result.n_samples, 4);
    }

    #[test]
    fn shape_errors_are_rejected() {
        assert!(fahp_monte_carlo(&base(), 0.2, 4, 1, &[0.5, 0.5], &ERM).is_err());
        assert!(fahp_monte_carlo(&base(), 0.2, 0, 1, &CF, &ERM).is_err());
        assert!(fahp_monte_carlo(&base(), -0.1, 4, 1, &CF, &ERM).is_err());
    }
}
