//! Monte-Carlo checks of how additive evaluation noise propagates into IG
//! and Baseline SHAP attributions.

use std::io::Write;
use std::sync::Mutex;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{check_dim, Error, Result};
use crate::explainers::{
    baseline_shap_exact, default_delta, integrated_gradients, permutation_shap, shapley_weight,
    IgConfig, PermutationConfig, PermutationCount, EXHAUSTIVE_MAX_FEATURES,
};
use crate::model::{FnModel, Model};

/// Smallest replication count for which a variance is reported.
pub const MIN_REPLICATES: usize = 30;
/// Largest feature count accepted by [`shap_error_scan`].
pub const MAX_SCAN_FEATURES: usize = 12;

/// `inner` plus fresh N(0, σ²) noise on every evaluation. Batches draw their
/// noise in row order.
pub struct AdditiveNoise<M> {
    inner: M,
    sigma: f64,
    rng: Mutex<ChaCha8Rng>,
}

impl<M: Model> AdditiveNoise<M> {
    pub fn new(inner: M, sigma: f64, rng: ChaCha8Rng) -> Self {
        AdditiveNoise {
            inner,
            sigma,
            rng: Mutex::new(rng),
        }
    }

    fn noise(&self, count: usize) -> Vec<f64> {
        if self.sigma == 0.0 {
            return vec![0.0; count];
        }
        let normal = Normal::new(0.0, self.sigma).expect("sigma validated");
        let mut rng = self.rng.lock().expect("noise rng poisoned");
        (0..count).map(|_| normal.sample(&mut *rng)).collect()
    }
}

impl<M: Model> Model for AdditiveNoise<M> {
    fn feature_count(&self) -> usize {
        self.inner.feature_count()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.inner.eval(x) + self.noise(1)[0]
    }

    fn eval_batch(&self, xs: &[Vec<f64>]) -> Vec<f64> {
        let clean = self.inner.eval_batch(xs);
        clean.into_iter().zip(self.noise(xs.len())).map(|(v, e)| v + e).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapMode {
    /// One noisy evaluation per corner, shared by every coalition.
    Memoized,
    /// All n! orderings, each walking its corners with fresh noise.
    Resampled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// `ig`, `bs-memoized` or `bs-resampled`.
    pub method: String,
    pub sigma: f64,
    /// Mesh size for IG, feature count for SHAP.
    pub size: usize,
    pub replicates: usize,
    pub empirical_var: Vec<f64>,
    pub predicted_var: Vec<f64>,
}

impl StabilityReport {
    pub fn mean_empirical(&self) -> f64 {
        mean(&self.empirical_var)
    }

    pub fn mean_predicted(&self) -> f64 {
        mean(&self.predicted_var)
    }

    /// Feature-averaged empirical over predicted variance; NaN when nothing
    /// is predicted.
    pub fn ratio(&self) -> f64 {
        let p = self.mean_predicted();
        if p == 0.0 {
            f64::NAN
        } else {
            self.mean_empirical() / p
        }
    }

    /// 95% band for the feature-averaged variance, treating it as a sample
    /// variance with R − 1 degrees of freedom.
    pub fn confidence_interval(&self) -> (f64, f64) {
        chi_square_band(self.mean_empirical(), self.replicates)
    }
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// Two-sided 95% chi-square interval for a variance estimated from `r`
/// replicates.
pub fn chi_square_band(variance: f64, r: usize) -> (f64, f64) {
    let dof = (r - 1) as f64;
    let chi = ChiSquared::new(dof).expect("dof positive");
    (
        variance * dof / chi.inverse_cdf(0.975),
        variance * dof / chi.inverse_cdf(0.025),
    )
}

/// Unbiased per-column sample variance.
fn column_variance(rows: &[Vec<f64>]) -> Vec<f64> {
    let r = rows.len() as f64;
    let n = rows.first().map_or(0, Vec::len);
    (0..n)
        .map(|e| {
            // shifted by the first sample so identical runs give exactly 0
            let k = rows[0][e];
            let d: Vec<f64> = rows.iter().map(|row| row[e] - k).collect();
            let m = d.iter().sum::<f64>() / r;
            d.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (r - 1.0)
        })
        .collect()
}

fn check_scan(sigma: f64, replicates: usize) -> Result<()> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidConfig(format!("sigma {sigma} must be non-negative")));
    }
    if replicates < MIN_REPLICATES {
        return Err(Error::InvalidConfig(format!(
            "{replicates} replicates; at least {MIN_REPLICATES} are needed"
        )));
    }
    Ok(())
}

fn replicate_rng(seed: u64, block: u64, replicate: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block << 32 | replicate as u64);
    rng
}

/// Variance of the IG estimate under iid evaluation noise:
/// ((xₑ−bₑ)/(2Nδₑ))² · 2(N−1) · σ².
pub fn ig_predicted_variance(x: &[f64], b: &[f64], delta: &[f64], mesh: usize, sigma: f64) -> Vec<f64> {
    let n = mesh as f64;
    x.iter()
        .zip(b)
        .zip(delta)
        .map(|((x, b), d)| ((x - b) / (2.0 * n * d)).powi(2) * 2.0 * (n - 1.0) * sigma * sigma)
        .collect()
}

/// Variance of memoized exact Baseline SHAP when every corner carries
/// independent noise: 2σ² Σₛ C(n−1, s) wₛ².
pub fn memoized_bs_predicted_variance(n: usize, sigma: f64) -> f64 {
    let mut binom = 1.0;
    let mut total = 0.0;
    for s in 0..n {
        total += binom * shapley_weight(n, s).powi(2);
        binom *= (n - 1 - s) as f64 / (s + 1) as f64;
    }
    2.0 * sigma * sigma * total
}

/// Variance of the all-orderings estimator with fresh noise at every step:
/// 2σ²/n!.
pub fn resampled_bs_predicted_variance(n: usize, sigma: f64) -> f64 {
    let factorial: f64 = (1..=n).map(|i| i as f64).product();
    2.0 * sigma * sigma / factorial
}

/// Repeats IG on `f` plus noise for each mesh size, with the default δ.
pub fn ig_error_scan<M: Model>(
    f: &M,
    x: &[f64],
    b: &[f64],
    sigma: f64,
    meshes: &[usize],
    replicates: usize,
    seed: u64,
) -> Result<Vec<StabilityReport>> {
    check_scan(sigma, replicates)?;
    check_dim("input", f.feature_count(), x.len())?;
    check_dim("baseline", f.feature_count(), b.len())?;
    let delta = default_delta(x, b);
    meshes
        .iter()
        .enumerate()
        .map(|(block, &mesh)| {
            let config = IgConfig {
                mesh,
                delta: Some(delta.clone()),
            };
            let runs = (0..replicates)
                .into_par_iter()
                .map(|rep| {
                    let noisy = AdditiveNoise::new(f, sigma, replicate_rng(seed, block as u64, rep));
                    integrated_gradients(&noisy, x, b, &config).map(|r| r.values)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(StabilityReport {
                method: "ig".into(),
                sigma,
                size: mesh,
                replicates,
                empirical_var: column_variance(&runs),
                predicted_var: ig_predicted_variance(x, b, &delta, mesh, sigma),
            })
        })
        .collect()
}

/// Repeats exact Baseline SHAP on `f` plus noise for each feature count n,
/// restricting `f` to its first n inputs and explaining `x[..n]` against
/// `b[..n]`.
pub fn shap_error_scan<F>(
    f: F,
    x: &[f64],
    b: &[f64],
    sigma: f64,
    feature_counts: &[usize],
    replicates: usize,
    mode: ShapMode,
    seed: u64,
) -> Result<Vec<StabilityReport>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    check_scan(sigma, replicates)?;
    check_dim("baseline", x.len(), b.len())?;
    feature_counts
        .iter()
        .enumerate()
        .map(|(block, &n)| {
            let cap = match mode {
                ShapMode::Memoized => MAX_SCAN_FEATURES,
                ShapMode::Resampled => EXHAUSTIVE_MAX_FEATURES,
            };
            if n == 0 || n > cap {
                return Err(Error::TooManyFeatures { n, cap });
            }
            if n > x.len() {
                return Err(Error::DimensionMismatch {
                    what: "input",
                    expected: n,
                    got: x.len(),
                });
            }
            let (xs, bs) = (&x[..n], &b[..n]);
            let model = FnModel::new(n, &f);
            let runs = (0..replicates)
                .into_par_iter()
                .map(|rep| {
                    let noisy =
                        AdditiveNoise::new(&model, sigma, replicate_rng(seed, block as u64, rep));
                    match mode {
                        ShapMode::Memoized => baseline_shap_exact(&noisy, xs, bs),
                        ShapMode::Resampled => permutation_shap(
                            &noisy,
                            xs,
                            bs,
                            &PermutationConfig {
                                permutations: PermutationCount::All,
                                seed,
                                resample: true,
                            },
                        ),
                    }
                    .map(|r| r.values)
                })
                .collect::<Result<Vec<_>>>()?;
            let (method, predicted) = match mode {
                ShapMode::Memoized => ("bs-memoized", memoized_bs_predicted_variance(n, sigma)),
                ShapMode::Resampled => ("bs-resampled", resampled_bs_predicted_variance(n, sigma)),
            };
            // a feature with xₑ = bₑ is exactly zero in every run
            let predicted_var = xs
                .iter()
                .zip(bs)
                .map(|(x, b)| if x == b { 0.0 } else { predicted })
                .collect();
            Ok(StabilityReport {
                method: method.into(),
                sigma,
                size: n,
                replicates,
                empirical_var: column_variance(&runs),
                predicted_var,
            })
        })
        .collect()
}

/// Writes one row per report. `preamble` lines are emitted first as
/// `#`-prefixed comments.
pub fn write_csv<W: Write>(out: W, reports: &[StabilityReport], preamble: &[String]) -> Result<()> {
    let mut out = out;
    for line in preamble {
        writeln!(out, "# {line}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "method",
        "sigma",
        "N_or_n",
        "empirical_var",
        "predicted_var",
        "ratio",
        "ci_lo",
        "ci_hi",
    ])?;
    for r in reports {
        let (lo, hi) = r.confidence_interval();
        w.write_record([
            r.method.clone(),
            r.sigma.to_string(),
            r.size.to_string(),
            format!("{:.6e}", r.mean_empirical()),
            format!("{:.6e}", r.mean_predicted()),
            format!("{:.4}", r.ratio()),
            format!("{lo:.6e}"),
            format!("{hi:.6e}"),
        ])?;
    }
    w.flush()?;
    Ok(())
}
