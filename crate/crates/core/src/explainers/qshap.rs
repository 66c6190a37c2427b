use serde::{Deserialize, Serialize};

use super::{check_request, AttributionResult, Method};
use crate::error::{check_dim, Result};
use crate::fourier::{fit, FitConfig, FourierSeries, FrequencyLattice};
use crate::model::Model;
use crate::polytensor::{expand_series_about, polynomial_shap_values, ExpansionConfig, ShapStats};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QShapConfig {
    pub fit: FitConfig,
    pub expansion: ExpansionConfig,
    /// Drop Fourier terms whose amplitude falls below this before expanding.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prune_threshold: Option<f64>,
}

impl Default for QShapConfig {
    fn default() -> Self {
        QShapConfig {
            fit: FitConfig::default(),
            expansion: ExpansionConfig::chebyshev(7, None),
            prune_threshold: None,
        }
    }
}

/// SHAP values of a fitted series: the series is expanded about the midpoint
/// of `x` and `b`, and PolynomialSHAP is applied in the shifted coordinates.
pub fn qshap_from_series(
    series: &FourierSeries,
    x: &[f64],
    b: &[f64],
    expansion: &ExpansionConfig,
) -> Result<(Vec<f64>, ShapStats)> {
    check_dim("input", series.n, x.len())?;
    check_dim("baseline", series.n, b.len())?;
    let center: Vec<f64> = x.iter().zip(b).map(|(x, b)| 0.5 * (x + b)).collect();
    let half: Vec<f64> = x.iter().zip(b).map(|(x, b)| 0.5 * (x - b)).collect();
    let poly = expand_series_about(series, expansion, &center, Some(&half))?;
    let neg: Vec<f64> = half.iter().map(|h| -h).collect();
    polynomial_shap_values(&poly, &half, &neg)
}

/// Fourier fit of `model` on `lattice`, then closed-form SHAP of the
/// polynomial surrogate. Fitting samples the whole torus, independent of
/// `x` and `b`; the evaluation count is the sample count.
pub fn qshap<M: Model + ?Sized>(
    model: &M,
    lattice: &FrequencyLattice,
    x: &[f64],
    b: &[f64],
    config: &QShapConfig,
) -> Result<AttributionResult> {
    check_request(model, x, b)?;
    config.expansion.validate()?;
    let fitted = fit(model, lattice, &config.fit)?;
    let series = match config.prune_threshold {
        Some(t) => fitted.series.prune(t),
        None => fitted.series,
    };
    let (values, stats) = qshap_from_series(&series, x, b, &config.expansion)?;
    log::debug!(
        "qshap: {} terms, residual {:.3e}, {} polynomial operations",
        series.terms.len(),
        fitted.residual_rms,
        stats.operations()
    );
    let mut result = AttributionResult::new(Method::Qshap, values, fitted.evaluations as u64, x, b)
        .with_seed(config.fit.seed)
        .with_config(config);
    result.residual_rms = Some(fitted.residual_rms);
    Ok(result)
}
