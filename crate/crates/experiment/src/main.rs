use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use upsell_experiment::{run_experiment, synthetic_quiz, HttpPipeline, InProcessPipeline, Pipeline, SimConfig};

#[derive(Debug, Parser)]
#[command(name = "experiment", about = "Simulated uplift experiment for persuasion-matched messages")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate both arms and write the report.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Base URL of a running service; in-process when absent.
        #[arg(long)]
        service: Option<String>,
    },
    /// Write the synthetic quiz a service needs to serve the simulation.
    Quiz {
        #[arg(long, default_value = "wheel")]
        taxonomy: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Run { config, seed, out, service } => {
            let text = std::fs::read_to_string(&config).map_err(|e| format!("{}: {e}", config.display()))?;
            let mut sim = SimConfig::from_toml(&text).map_err(|e| e.to_string())?;
            if let Some(seed) = seed {
                sim.seed = seed;
            }
            let mut pipeline: Box<dyn Pipeline> = match service {
                Some(url) => Box::new(HttpPipeline::new(url).map_err(|e| e.to_string())?),
                None => Box::new(InProcessPipeline::new(&sim.taxonomy, sim.seed).map_err(|e| e.to_string())?),
            };
            let report = run_experiment(&sim, pipeline.as_mut()).map_err(|e| e.to_string())?;
            std::fs::write(&out, report.to_json() + "\n").map_err(|e| format!("{}: {e}", out.display()))?;
            eprintln!(
                "control {:.4} treatment {:.4} uplift {} p {:.3e}",
                report.control.rate,
                report.treatment.rate,
                report.uplift.map_or("undefined".into(), |u| format!("{u:+.3}")),
                report.p_value
            );
            Ok(())
        }
        Command::Quiz { taxonomy, out } => {
            let taxonomy = upsell_core::influence::EmotionTaxonomy::preset(&taxonomy).map_err(|e| e.to_string())?;
            let quiz = serde_json::to_string_pretty(&synthetic_quiz(&taxonomy)).expect("quiz serializes");
            std::fs::write(&out, quiz + "\n").map_err(|e| format!("{}: {e}", out.display()))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
