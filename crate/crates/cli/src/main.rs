use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stc_cli::commands::{batch, export, simulate, synth, verify};
use stc_cli::{CliError, CliResult};

/// Self-triggered control of constrained linear systems via contractive sets.
#[derive(Debug, Parser)]
#[command(name = "stc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize target set, scaled family, graph and periodic law.
    Synth {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate one closed-loop run and write trajectory/events CSVs.
    Simulate {
        #[arg(long)]
        artifact: PathBuf,
        /// Initial state, comma separated (e.g. `0,-4`).
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long, default_value_t = 500)]
        max_steps: usize,
        /// Output prefix; `<prefix>_trajectory.csv` and `<prefix>_events.csv` are written.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run many closed loops from random initial states.
    Batch {
        #[arg(long)]
        artifact: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Edge weights `p,q`; defaults to those of the artifact.
        #[arg(long)]
        pq: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the transition graph in DOT format.
    ExportGraph {
        #[arg(long)]
        artifact: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-check every certificate stored in an artifact.
    Verify {
        #[arg(long)]
        artifact: PathBuf,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_pq(text: &str) -> CliResult<(f64, f64)> {
    let parts: Vec<&str> = text.split(',').collect();
    let parsed = match parts.as_slice() {
        [p, q] => p.trim().parse::<f64>().ok().zip(q.trim().parse::<f64>().ok()),
        _ => None,
    };
    parsed.ok_or_else(|| CliError::Usage(format!("--pq expects `p,q`, got {text:?}")))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Synth { config, out } => {
            let art = synth::run(&config, &out)?;
            print!("{}", art.summary());
            println!("wrote {}", out.display());
        }
        Command::Simulate {
            artifact,
            x0,
            max_steps,
            out,
        } => {
            let x0 = simulate::parse_state(&x0)?;
            let report = simulate::run(&artifact, &x0, max_steps, &out)?;
            match report.mean_inter_event() {
                Some(m) => println!("average inter-event steps: {m}"),
                None => println!("average inter-event steps: n/a (started inside P0)"),
            }
            println!("steps to target: {}", report.steps_to_target());
            println!(
                "wrote {} and {}",
                report.trajectory_path.display(),
                report.events_path.display()
            );
        }
        Command::Batch {
            artifact,
            trials,
            seed,
            pq,
            out,
        } => {
            let pq = pq.as_deref().map(parse_pq).transpose()?;
            let opts = batch::BatchOptions { trials, seed, pq };
            let summary = batch::run(&artifact, &opts, &out)?;
            println!("trials: {}", summary.trials.len());
            println!("mean inter-event steps: {}", summary.mean_inter_event);
            println!("mean convergence steps: {}", summary.mean_convergence);
            println!("wrote {} and {}", out.display(), summary.summary_path.display());
        }
        Command::ExportGraph { artifact, out } => {
            export::run(&artifact, &out)?;
            println!("wrote {}", out.display());
        }
        Command::Verify {
            artifact,
            samples,
            seed,
        } => {
            let report = verify::run(&artifact, samples, seed)?;
            for c in &report.checks {
                println!("{c}");
            }
            if !report.passed() {
                return Err(CliError::VerificationFailed(report.failures()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
