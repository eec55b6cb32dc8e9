//! Run the simulated-student experiment and write CSVs and SVG charts.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use qtutor_core::sim::{prepare_lexicon, run_simulation, write_outputs, SimulationConfig};
use qtutor_core::RngSeed;

#[derive(Debug, Parser)]
#[command(name = "simulate", about = "Simulate students against the Q-learning tutor")]
struct Args {
    /// Simulation config (TOML, or JSON with a .json extension)
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding the config
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    runs: Option<u32>,
    #[arg(long)]
    interactions: Option<u32>,
    /// Suppress progress output
    #[arg(long)]
    quiet: bool,
}

fn run(args: Args) -> anyhow::Result<()> {
    let mut config = SimulationConfig::from_path(&args.config)
        .with_context(|| format!("loading config {}", args.config.display()))?;
    if let Some(out) = args.out {
        config.output_dir = out;
    }
    if let Some(seed) = args.seed {
        config.base_seed = RngSeed(seed);
    }
    if let Some(runs) = args.runs {
        config.runs = runs;
    }
    if let Some(n) = args.interactions {
        config.interactions = n;
    }
    config.validate()?;

    let lexicon = prepare_lexicon(&config).context("loading content")?;
    if !args.quiet {
        eprintln!(
            "simulating {} students x {} runs x {} interactions (seed {})",
            config.students.len(),
            config.runs,
            config.interactions,
            config.base_seed.0
        );
    }
    let result = run_simulation(&config, &lexicon)?;
    let written = write_outputs(&result, &config.output_dir)?;
    if !args.quiet {
        for (label, runs) in &result.students {
            let mut finals: Vec<i64> =
                runs.iter().filter_map(|t| t.points.last()).map(|p| p.cumulative_reward).collect();
            finals.sort_unstable();
            eprintln!("{label}: median final cumulative reward {}", finals[finals.len() / 2]);
        }
        eprintln!("wrote {} files to {}", written.len(), config.output_dir.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    if !args.quiet {
        env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    }
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("simulate: {e:#}");
            ExitCode::FAILURE
        }
    }
}
