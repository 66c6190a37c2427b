use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use qxai_core::classifier::{dataset, ImageModel, TrainedModel, PIXELS};
use qxai_core::explainers::{
    baseline_shap_exact, integrated_gradients, permutation_shap, qshap, AttributionResult, IgConfig,
    PermutationConfig, PermutationCount, QShapConfig,
};
use qxai_core::fourier::{FitConfig, FrequencyLattice};
use qxai_core::polytensor::{ExpansionConfig, ExpansionScheme};
use qxai_core::sim::NoiseSpec;
use serde::Serialize;

use crate::output::{emit, json_bytes, write_atomic, Meta};
use crate::UsageError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Ig,
    Bs,
    Perm,
    Qshap,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeArg {
    Taylor,
    Chebyshev,
}

#[derive(Args, Clone, Debug, Default, Serialize)]
pub struct NoiseArgs {
    /// Estimate each expectation from this many shots.
    #[arg(long)]
    pub shots: Option<u64>,
    /// Two-qubit depolarizing probability after every CNOT.
    #[arg(long, default_value_t = 0.0)]
    pub depolarizing: f64,
    /// Per-shot readout flip probability.
    #[arg(long, default_value_t = 0.0)]
    pub readout: f64,
    /// Gaussian noise added to every model output.
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
}

impl NoiseArgs {
    pub fn spec(&self, seed: u64) -> NoiseSpec {
        NoiseSpec {
            shots: self.shots,
            depolarizing_p: self.depolarizing,
            readout_flip_p: self.readout,
            additive_sigma: self.sigma,
            seed,
        }
    }
}

pub fn describe_noise(noise: &NoiseSpec) -> String {
    let mut parts = Vec::new();
    if let Some(s) = noise.shots {
        parts.push(format!("shots={s}"));
    }
    if noise.depolarizing_p > 0.0 {
        parts.push(format!("depolarizing={}", noise.depolarizing_p));
    }
    if noise.readout_flip_p > 0.0 {
        parts.push(format!("readout={}", noise.readout_flip_p));
    }
    if noise.additive_sigma > 0.0 {
        parts.push(format!("sigma={}", noise.additive_sigma));
    }
    if parts.is_empty() {
        "noiseless".into()
    } else {
        parts.join(", ")
    }
}

/// Method settings shared by `explain` and `reproduce`.
#[derive(Args, Clone, Debug, Serialize)]
pub struct MethodArgs {
    /// IG mesh size.
    #[arg(long, default_value_t = 20)]
    pub mesh: usize,
    /// qSHAP sample count; three times the unknown count when omitted.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_enum, default_value_t = SchemeArg::Chebyshev)]
    pub expansion: SchemeArg,
    /// qSHAP polynomial order.
    #[arg(long, default_value_t = 7)]
    pub order: usize,
    /// Drop Fourier terms below this amplitude; defaults to 3/√shots with
    /// shot noise and to no pruning otherwise.
    #[arg(long)]
    pub prune: Option<f64>,
    /// Never prune, even with shot noise.
    #[arg(long, conflicts_with = "prune")]
    pub no_prune: bool,
    /// Sampled permutations for `perm`.
    #[arg(long, default_value_t = 100)]
    pub permutations: usize,
    /// Enumerate all orderings for `perm`.
    #[arg(long)]
    pub all_permutations: bool,
    /// Fresh evaluation at every permutation step for `perm`.
    #[arg(long)]
    pub resample: bool,
}

impl MethodArgs {
    fn prune_threshold(&self, noise: &NoiseSpec) -> Option<f64> {
        if self.no_prune {
            return None;
        }
        self.prune
            .or_else(|| noise.shots.map(|s| 3.0 / (s as f64).sqrt()))
    }

    pub fn attribute(
        &self,
        method: MethodArg,
        model: &ImageModel,
        noise: &NoiseSpec,
        x: &[f64],
        b: &[f64],
        seed: u64,
    ) -> qxai_core::Result<AttributionResult> {
        match method {
            MethodArg::Ig => integrated_gradients(model, x, b, &IgConfig { mesh: self.mesh, delta: None }),
            MethodArg::Bs => baseline_shap_exact(model, x, b),
            MethodArg::Perm => {
                let permutations = if self.all_permutations {
                    PermutationCount::All
                } else {
                    PermutationCount::Sampled(self.permutations)
                };
                let cfg = PermutationConfig {
                    permutations,
                    seed,
                    resample: self.resample,
                };
                permutation_shap(model, x, b, &cfg)
            }
            MethodArg::Qshap => {
                let scheme = match self.expansion {
                    SchemeArg::Taylor => ExpansionScheme::Taylor,
                    SchemeArg::Chebyshev => ExpansionScheme::Chebyshev,
                };
                let cfg = QShapConfig {
                    fit: FitConfig {
                        samples: self.samples,
                        seed,
                        ..Default::default()
                    },
                    expansion: ExpansionConfig {
                        scheme,
                        order: self.order,
                        domain_radius: None,
                    },
                    prune_threshold: self.prune_threshold(noise),
                };
                let lattice = FrequencyLattice::new(model.frequency_bounds());
                qshap(model, &lattice, x, b, &cfg)
            }
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct ExplainArgs {
    /// Model JSON from `train`, or `builtin:<circuit>`.
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Dataset image index (0-3).
    #[arg(long, conflicts_with = "pixels", required_unless_present = "pixels")]
    image: Option<usize>,
    /// Four comma-separated pixel values in [0, 1].
    #[arg(long, value_delimiter = ',')]
    pixels: Option<Vec<f64>>,
    /// Baseline pixel values.
    #[arg(long, value_delimiter = ',', default_value = "0,0,0,0")]
    baseline: Vec<f64>,
    #[command(flatten)]
    noise: NoiseArgs,
    #[command(flatten)]
    methods: MethodArgs,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a heatmap.
    #[arg(long)]
    svg: Option<PathBuf>,
}

fn pixel_values(args: &ExplainArgs) -> Result<Vec<f64>> {
    let pixels = match (args.image, &args.pixels) {
        (Some(i), _) => {
            let data = dataset();
            let img = data.get(i).ok_or_else(|| {
                UsageError(format!("image index {i} out of range (0-{})", data.len() - 1))
            })?;
            img.pixels.iter().map(|&p| f64::from(p)).collect()
        }
        (None, Some(p)) => p.clone(),
        (None, None) => unreachable!("clap requires one of --image/--pixels"),
    };
    check_pixels("--pixels", &pixels)?;
    check_pixels("--baseline", &args.baseline)?;
    Ok(pixels)
}

fn check_pixels(flag: &str, values: &[f64]) -> Result<()> {
    if values.len() != PIXELS {
        return Err(UsageError(format!("{flag} needs {PIXELS} values, got {}", values.len())).into());
    }
    if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(UsageError(format!("{flag} values must lie in [0, 1]")).into());
    }
    Ok(())
}

pub fn angles(model: &TrainedModel, pixels: &[f64]) -> Vec<f64> {
    pixels.iter().map(|&p| model.scaling.angle(p)).collect()
}

#[derive(Serialize)]
struct ExplainFile<'a> {
    #[serde(flatten)]
    result: &'a AttributionResult,
    pixels: &'a [f64],
    baseline_pixels: &'a [f64],
    noise: &'a NoiseSpec,
    meta: Meta<'a, ExplainArgs>,
}

pub fn run(args: ExplainArgs, seed: Option<u64>) -> Result<()> {
    let seed = seed.unwrap_or(0);
    let trained = crate::train::load_model(&args.model)?;
    let pixels = pixel_values(&args)?;
    let noise = args.noise.spec(seed);
    noise.validate()?;
    let model = trained.image_model(noise.clone())?;
    let x = angles(&trained, &pixels);
    let b = angles(&trained, &args.baseline);
    let result = args.methods.attribute(args.method, &model, &noise, &x, &b, seed)?;

    let file = ExplainFile {
        result: &result,
        pixels: &pixels,
        baseline_pixels: &args.baseline,
        noise: &noise,
        meta: Meta::new("explain", seed, &args),
    };
    emit(args.out.as_deref(), &json_bytes(&file)?)?;
    if let Some(path) = &args.svg {
        let caption = format!("{} | {}", result.method, describe_noise(&noise));
        let doc = crate::svg::single(&result.values, &caption, &Meta::new("explain", seed, &args).line());
        write_atomic(path, doc.as_bytes())?;
    }
    Ok(())
}
