use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use vortex_align::channel::ChannelModel;
use vortex_align::harness::{run, Config, ExperimentKind, ExperimentSpec, HarnessError, Overrides};

/// Simulate misaligned OAM links, estimate the misalignment and score the
/// phase-front correction.
#[derive(Debug, Parser)]
#[command(name = "vortex-align", version)]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    kind: ExperimentKind,
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Master seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Monte Carlo trials per point; overrides the config.
    #[arg(long)]
    trials: Option<usize>,
    /// Per-antenna SNR in dB; `inf` disables noise.
    #[arg(long, allow_negative_numbers = true)]
    snr_db: Option<f64>,
    /// Channel model used for simulation.
    #[arg(long)]
    model: Option<ChannelModel>,
}

fn execute(cli: &Cli) -> Result<(), HarnessError> {
    let config = Config::load(&cli.config)?;
    let overrides = Overrides {
        seed: cli.seed,
        trials: cli.trials,
        snr_db: cli.snr_db,
        model: cli.model,
    };
    let spec = ExperimentSpec::new(cli.kind, config, &overrides)?;
    let output = run(&spec)?;
    output.write(&spec, &cli.out)?;
    if let Some(warnings) = output.summary.get("warnings").and_then(|w| w.as_array()) {
        for w in warnings.iter().filter_map(|w| w.as_str()) {
            eprintln!("warning: {w}");
        }
    }
    println!("{} -> {}", spec.kind.name(), cli.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
