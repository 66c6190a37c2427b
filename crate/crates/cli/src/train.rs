use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use qxai_core::classifier::{dataset as images, reference_circuit, train, ReferenceKind, TrainConfig, TrainedModel};
use serde::Serialize;

use crate::output::{emit, json_bytes, Meta};

pub fn parse_kind(s: &str) -> std::result::Result<ReferenceKind, String> {
    s.parse().map_err(|e: qxai_core::Error| e.to_string())
}

#[derive(Args, Debug, Serialize)]
pub struct DatasetArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn dataset(args: DatasetArgs) -> Result<()> {
    #[derive(Serialize)]
    struct Doc<'a> {
        meta: Meta<'a, DatasetArgs>,
        images: Vec<qxai_core::classifier::BarsStripesImage>,
    }
    let doc = Doc {
        meta: Meta::new("dataset", 0, &args),
        images: images(),
    };
    emit(args.out.as_deref(), &json_bytes(&doc)?)
}

#[derive(Args, Debug, Serialize)]
pub struct TrainArgs {
    /// single-qubit, two-qubit or four-qubit.
    #[arg(long, value_parser = parse_kind)]
    circuit: ReferenceKind,
    #[arg(long, default_value_t = 0.2)]
    lr: f64,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    /// Defaults to `<circuit>.json`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Training {
    correct: usize,
    total: usize,
    loss: f64,
}

#[derive(Serialize)]
struct ModelFile<'a> {
    #[serde(flatten)]
    model: &'a TrainedModel,
    training: Training,
    meta: Meta<'a, TrainArgs>,
}

pub fn run(args: TrainArgs, seed: Option<u64>) -> Result<()> {
    let seed = seed.unwrap_or(TrainConfig::default().seed);
    let config = TrainConfig {
        learning_rate: args.lr,
        epochs: args.epochs,
        seed,
    };
    let report = train(
        reference_circuit(args.circuit),
        args.circuit.feature_pixels(),
        &images(),
        &config,
    )?;
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.json", args.circuit)));
    let file = ModelFile {
        model: &report.model,
        training: Training {
            correct: report.correct,
            total: report.total,
            loss: report.loss,
        },
        meta: Meta::new("train", seed, &args),
    };
    emit(Some(&out), &json_bytes(&file)?)?;
    println!(
        "{}: accuracy {}/{} loss {:.6} -> {}",
        args.circuit,
        report.correct,
        report.total,
        report.loss,
        out.display()
    );
    Ok(())
}

/// Reads a model written by `train`; the bundled reference parameters are
/// used for `builtin:<circuit>`.
pub fn load_model(path: &std::path::Path) -> Result<TrainedModel> {
    use anyhow::Context;
    if let Some(kind) = path.to_str().and_then(|s| s.strip_prefix("builtin:")) {
        let kind = parse_kind(kind).map_err(crate::UsageError)?;
        return Ok(qxai_core::classifier::reference_model(kind));
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let model: TrainedModel =
        serde_json::from_str(&text).with_context(|| format!("parsing model file {}", path.display()))?;
    model.validate()?;
    Ok(model)
}
