//! `slv`: batch front end for the strain-limiting viscoelastic solver.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Outcome;

#[derive(Debug, Parser)]
#[command(
    name = "slv",
    version,
    about = "Strain-limiting viscoelasticity solver"
)]
struct Cli {
    /// Output directory; each scenario writes into its own subdirectory.
    #[arg(long, global = true, env = "SLV_OUT_DIR", default_value = "slv-out")]
    out: PathBuf,
    /// Worker threads for batches and refinement studies (0 = all cores).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Picard solve with diagnostics and displacement recovery.
    Run {
        /// Scenario file; repeat to run a batch.
        #[arg(long, required = true)]
        scenario: Vec<PathBuf>,
        /// Fail when the smallness condition on the initial data does not hold.
        #[arg(long)]
        strict_smallness: bool,
    },
    /// Direct IMEX solve of the strain-sum equation.
    Oracle {
        #[arg(long, required = true)]
        scenario: Vec<PathBuf>,
    },
    /// Discrepancy between two SLVT trajectory files.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Largest accepted max-norm discrepancy.
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        /// Sobolev order of the reported H^s discrepancy.
        #[arg(long, default_value_t = 3.0)]
        s: f64,
    },
    /// Time-step refinement study.
    Convergence {
        #[arg(long)]
        scenario: PathBuf,
        /// Number of refinement levels (factor 2 each).
        #[arg(long, default_value_t = 4)]
        levels: usize,
        #[arg(long, value_enum, default_value = "both")]
        pipeline: commands::PipelineChoice,
    },
    /// Round-trip and monotonicity checks of a constitutive law.
    ModelCheck { model: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run {
            scenario,
            strict_smallness,
        } => commands::run_batch(&scenario, &cli.out, cli.jobs, |path, out| {
            commands::cmd_run(path, out, strict_smallness)
        }),
        Command::Oracle { scenario } => {
            commands::run_batch(&scenario, &cli.out, cli.jobs, commands::cmd_oracle)
        }
        Command::Compare { a, b, tol, s } => commands::cmd_compare(&a, &b, tol, s),
        Command::Convergence {
            scenario,
            levels,
            pipeline,
        } => commands::cmd_convergence(&scenario, &cli.out, levels, pipeline, cli.jobs),
        Command::ModelCheck { model } => commands::cmd_model_check(&model),
    };
    ExitCode::from(match outcome {
        Outcome::Success => 0,
        Outcome::Error => 1,
        Outcome::ChecksFailed => 2,
    })
}
