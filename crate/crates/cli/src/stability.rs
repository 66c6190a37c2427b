use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use qxai_core::stability::{ig_error_scan, shap_error_scan, write_csv, ShapMode};
use qxai_core::FnModel;
use serde::Serialize;

use crate::output::{emit, Meta};

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StabilityMethod {
    Ig,
    Bs,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Memoized,
    Resampled,
}

#[derive(Args, Debug, Serialize)]
pub struct StabilityArgs {
    #[arg(long, value_enum)]
    method: StabilityMethod,
    /// How Baseline SHAP reuses noisy evaluations.
    #[arg(long, value_enum, default_value_t = ModeArg::Memoized)]
    mode: ModeArg,
    /// Standard deviation of the additive output noise.
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    /// IG mesh sizes.
    #[arg(long, value_delimiter = ',', default_value = "10,20,40,80")]
    mesh: Vec<usize>,
    /// Feature counts for `bs`; the first entry is the IG dimension.
    #[arg(long, value_delimiter = ',', default_value = "4")]
    features: Vec<usize>,
    /// Noisy replicates per row.
    #[arg(long, default_value_t = 200)]
    reps: usize,
    /// CSV output; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Smooth test function with one interaction: Σ sin((i+1)zᵢ) + z₀·z_{n−1}.
fn test_function(z: &[f64]) -> f64 {
    let n = z.len();
    let waves: f64 = z.iter().enumerate().map(|(i, v)| ((i + 1) as f64 * v).sin()).sum();
    waves + if n > 1 { z[0] * z[n - 1] } else { 0.0 }
}

pub fn run(args: StabilityArgs, seed: Option<u64>) -> Result<()> {
    let seed = seed.unwrap_or(0);
    let reports = match args.method {
        StabilityMethod::Ig => {
            let n = args.features.first().copied().unwrap_or(4);
            let f = FnModel::new(n, test_function);
            ig_error_scan(&f, &vec![1.0; n], &vec![0.0; n], args.sigma, &args.mesh, args.reps, seed)?
        }
        StabilityMethod::Bs => {
            let n = args.features.iter().copied().max().unwrap_or(0);
            let mode = match args.mode {
                ModeArg::Memoized => ShapMode::Memoized,
                ModeArg::Resampled => ShapMode::Resampled,
            };
            shap_error_scan(
                test_function,
                &vec![1.0; n],
                &vec![0.0; n],
                args.sigma,
                &args.features,
                args.reps,
                mode,
                seed,
            )?
        }
    };
    let preamble = vec![
        Meta::new("stability", seed, &args).line(),
        "f(z) = sum_i sin((i+1) z_i) + z_0 z_(n-1), x = 1, b = 0".to_string(),
    ];
    let mut bytes = Vec::new();
    write_csv(&mut bytes, &reports, &preamble)?;
    emit(args.out.as_deref(), &bytes)
}
