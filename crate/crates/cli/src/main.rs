//! `qxai`: train bars-and-stripes circuit classifiers and explain them.

mod explain;
mod output;
mod reproduce;
mod stability;
mod svg;
mod train;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "qxai", version, about = "Feature attribution for parameterized quantum circuit classifiers")]
struct Cli {
    /// Global RNG seed; each command has its own default.
    #[arg(long, global = true, env = "QXAI_SEED")]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the 2×2 bars-and-stripes images.
    Dataset(train::DatasetArgs),
    /// Train a reference circuit on the dataset.
    Train(train::TrainArgs),
    /// Attribute one classifier output to the four pixels.
    Explain(explain::ExplainArgs),
    /// Run the method × noise grid over all images.
    Reproduce(reproduce::ReproduceArgs),
    /// Measure how evaluation noise propagates into attributions.
    Stability(stability::StabilityArgs),
}

/// Bad arguments detected after parsing; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    use qxai_core::Error as E;
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<E>() {
            if matches!(
                e,
                E::InvalidConfig(_) | E::InvalidNoise(_) | E::TooManyFeatures { .. } | E::Underdetermined { .. }
            ) {
                return 2;
            }
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Dataset(args) => train::dataset(args),
        Command::Train(args) => train::run(args, cli.seed),
        Command::Explain(args) => explain::run(args, cli.seed),
        Command::Reproduce(args) => reproduce::run(args, cli.seed),
        Command::Stability(args) => stability::run(args, cli.seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
