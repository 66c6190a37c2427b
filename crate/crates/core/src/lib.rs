//! Feature attribution for parameterized quantum circuit classifiers.
//!
//! A state-vector simulator with noise injection, a bars-and-stripes
//! classifier, Fourier fitting of circuit outputs, rank-one polynomial
//! surrogates with closed-form Shapley values, and the usual model-agnostic
//! explainers (Integrated Gradients, exact and permutation Baseline SHAP).

pub mod classifier;
pub mod error;
pub mod explainers;
pub mod fourier;
pub mod model;
pub mod polytensor;
pub mod sim;
pub mod stability;

pub use error::{Error, Result};
pub use model::{FnModel, Model};

/// Crate version, echoed into every output file.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
