//! Attribution methods over any [`Model`](crate::model::Model): Integrated
//! Gradients, exact and permutation-sampled Baseline SHAP, and qSHAP.

mod bs;
mod ig;
mod perm;
mod qshap;

use serde::{Deserialize, Serialize};

pub use bs::{baseline_shap_exact, shapley_weight, EXACT_BS_MAX_FEATURES};
pub use ig::{default_delta, integrated_gradients, IgConfig};
pub use perm::{permutation_shap, PermutationConfig, PermutationCount, EXHAUSTIVE_MAX_FEATURES};
pub use qshap::{qshap, qshap_from_series, QShapConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Ig,
    Bs,
    Perm,
    Qshap,
    PolynomialShap,
    QuadraticShap,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Ig => "ig",
            Method::Bs => "bs",
            Method::Perm => "perm",
            Method::Qshap => "qshap",
            Method::PolynomialShap => "polynomial-shap",
            Method::QuadraticShap => "quadratic-shap",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Per-feature attributions with the bookkeeping needed to reproduce them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributionResult {
    pub method: Method,
    pub values: Vec<f64>,
    /// Model calls made.
    pub evaluations: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_rms: Option<f64>,
    pub input: Vec<f64>,
    pub baseline: Vec<f64>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub config: serde_json::Value,
}

impl AttributionResult {
    pub fn new(method: Method, values: Vec<f64>, evaluations: u64, x: &[f64], b: &[f64]) -> Self {
        AttributionResult {
            method,
            values,
            evaluations,
            seed: None,
            residual_rms: None,
            input: x.to_vec(),
            baseline: b.to_vec(),
            config: serde_json::Value::Null,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_config(mut self, config: impl Serialize) -> Self {
        self.config = serde_json::to_value(config).unwrap_or(serde_json::Value::Null);
        self
    }

    /// Σₑ values[e].
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

pub(crate) fn check_request<M: crate::model::Model + ?Sized>(
    model: &M,
    x: &[f64],
    b: &[f64],
) -> crate::error::Result<usize> {
    let n = model.feature_count();
    crate::error::check_dim("input", n, x.len())?;
    crate::error::check_dim("baseline", n, b.len())?;
    Ok(n)
}
