use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use qxai_core::classifier::{dataset, reference_model, ReferenceKind};
use qxai_core::explainers::AttributionResult;
use qxai_core::sim::NoiseSpec;
use rayon::prelude::*;
use serde::Serialize;

use crate::explain::{angles, describe_noise, MethodArg, MethodArgs};
use crate::output::{json_bytes, write_atomic, Meta};
use crate::svg::{grid, Panel};
use crate::train::parse_kind;

const METHODS: [MethodArg; 3] = [MethodArg::Ig, MethodArg::Bs, MethodArg::Qshap];

#[derive(Args, Debug, Serialize)]
pub struct ReproduceArgs {
    #[arg(long, value_parser = parse_kind)]
    circuit: ReferenceKind,
    /// Model JSON from `train`; the shipped reference model when omitted.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Created if missing.
    #[arg(long)]
    out_dir: PathBuf,
    /// Shots for the noisy tiers.
    #[arg(long, default_value_t = 1000)]
    shots: u64,
    /// Depolarizing probability for the hardware-like tier.
    #[arg(long, default_value_t = 0.02)]
    depolarizing: f64,
    /// Readout flip probability for the hardware-like tier.
    #[arg(long, default_value_t = 0.02)]
    readout: f64,
    #[command(flatten)]
    methods: MethodArgs,
}

#[derive(Serialize)]
struct Cell {
    tier: &'static str,
    image: usize,
    pixels: [u8; 4],
    #[serde(flatten)]
    result: AttributionResult,
}

#[derive(Serialize)]
struct Failure {
    tier: &'static str,
    method: MethodArg,
    image: usize,
    error: String,
}

#[derive(Serialize)]
struct ReproduceFile<'a> {
    circuit: &'static str,
    tiers: Vec<(&'static str, &'a NoiseSpec)>,
    cells: &'a [Cell],
    failures: &'a [Failure],
    meta: Meta<'a, ReproduceArgs>,
}

fn tiers(args: &ReproduceArgs) -> Vec<(&'static str, NoiseSpec)> {
    vec![
        ("noiseless", NoiseSpec::exact()),
        ("shots", NoiseSpec::shots(args.shots, 0)),
        (
            "hardware",
            NoiseSpec::shots(args.shots, 0)
                .with_depolarizing(args.depolarizing)
                .with_readout(args.readout),
        ),
    ]
}

fn cell_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn pixel_string(p: &[u8; 4]) -> String {
    p.iter().map(|v| v.to_string()).collect()
}

pub fn run(args: ReproduceArgs, seed: Option<u64>) -> Result<()> {
    let seed = seed.unwrap_or(0);
    let trained = match &args.model {
        Some(path) => crate::train::load_model(path)?,
        None => reference_model(args.circuit),
    };
    let images = dataset();
    let tiers = tiers(&args);
    for (_, noise) in &tiers {
        noise.validate()?;
    }
    std::fs::create_dir_all(&args.out_dir)?;

    let mut jobs = Vec::new();
    for (t, _) in tiers.iter().enumerate() {
        for &method in &METHODS {
            for i in 0..images.len() {
                jobs.push((t, method, i));
            }
        }
    }
    let baseline = angles(&trained, &[0.0; 4]);
    let outcomes: Vec<_> = jobs
        .par_iter()
        .enumerate()
        .map(|(k, &(t, method, i))| {
            let cell = cell_seed(seed, k);
            let noise = tiers[t].1.clone().with_seed(cell);
            let pixels: Vec<f64> = images[i].pixels.iter().map(|&p| f64::from(p)).collect();
            let x = angles(&trained, &pixels);
            trained
                .image_model(noise.clone())
                .and_then(|model| args.methods.attribute(method, &model, &noise, &x, &baseline, cell))
        })
        .collect();

    let mut cells = Vec::new();
    let mut failures = Vec::new();
    for (&(t, method, i), outcome) in jobs.iter().zip(outcomes) {
        let tier = tiers[t].0;
        match outcome {
            Ok(result) => cells.push(Cell {
                tier,
                image: i,
                pixels: images[i].pixels,
                result,
            }),
            Err(e) => {
                eprintln!("warning: {tier}/{method:?}/image {i} failed: {e}");
                failures.push(Failure {
                    tier,
                    method,
                    image: i,
                    error: e.to_string(),
                });
            }
        }
    }

    let name = args.circuit.name();
    let meta = Meta::new("reproduce", seed, &args);
    let meta_line = meta.line();

    let mut csv_bytes = Vec::new();
    for line in [meta_line.clone(), format!("circuit {name}")] {
        csv_bytes.extend_from_slice(format!("# {line}\n").as_bytes());
    }
    {
        let mut w = csv::Writer::from_writer(&mut csv_bytes);
        w.write_record([
            "tier", "method", "image", "pixels", "attr_0", "attr_1", "attr_2", "attr_3", "evaluations", "residual_rms",
        ])?;
        for c in &cells {
            let mut row = vec![
                c.tier.to_string(),
                c.result.method.to_string(),
                c.image.to_string(),
                pixel_string(&c.pixels),
            ];
            row.extend(c.result.values.iter().map(|v| format!("{:.6e}", v + 0.0)));
            row.push(c.result.evaluations.to_string());
            row.push(c.result.residual_rms.map(|r| format!("{r:.3e}")).unwrap_or_default());
            w.write_record(&row)?;
        }
        w.flush()?;
    }

    let panels: Vec<Panel<'_>> = cells
        .iter()
        .map(|c| Panel {
            title: format!("{} {} {}", c.tier, c.result.method, pixel_string(&c.pixels)),
            values: &c.result.values,
        })
        .collect();
    let caption = format!(
        "{name} circuit; rows: method per tier ({})",
        tiers
            .iter()
            .map(|(t, n)| format!("{t}: {}", describe_noise(n)))
            .collect::<Vec<_>>()
            .join("; ")
    );
    let svg = grid(&panels, images.len(), &caption, &meta_line);

    let file = ReproduceFile {
        circuit: name,
        tiers: tiers.iter().map(|(t, n)| (*t, n)).collect(),
        cells: &cells,
        failures: &failures,
        meta,
    };
    let dir = &args.out_dir;
    write_atomic(&dir.join(format!("{name}.json")), &json_bytes(&file)?)?;
    write_atomic(&dir.join(format!("{name}.csv")), &csv_bytes)?;
    write_atomic(&dir.join(format!("{name}.svg")), svg.as_bytes())?;
    if cells.is_empty() {
        bail!("every cell failed");
    }
    println!(
        "{name}: {} cells, {} failed -> {}",
        cells.len(),
        failures.len(),
        dir.display()
    );
    Ok(())
}
