//! Curvature flows with spectral observers, from the command line.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use flowspectra::cli::{cmd_evolve, cmd_oracle_sphere, cmd_plot, cmd_verify, EXIT_ERROR};

#[derive(Parser)]
#[command(
    name = "flowspectra",
    version,
    about = "Curvature flows on discrete curves and surfaces with first-eigenvalue tracking"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a flow experiment and write trace.csv / summary.json
    Evolve {
        /// Experiment config file (INI)
        config: PathBuf,
    },
    /// Run an experiment and check one theorem, writing verdict.json
    Verify {
        /// Experiment config file (INI)
        config: PathBuf,
        /// One of: tt1, psi-phi, hk, variation, lemma21, metric-cmp
        #[arg(long)]
        theorem: String,
    },
    /// Render eigenvalue / monotone-quantity / curvature plots from a trace
    Plot {
        /// Trace CSV produced by `evolve`
        trace: PathBuf,
        /// Output SVG path
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Closed-form reference values
    Oracle {
        #[command(subcommand)]
        what: OracleCommand,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Shrinking round sphere/circle under mean-curvature flow
    Sphere {
        /// Initial radius
        #[arg(long = "R")]
        radius: f64,
        /// Manifold dimension (1 = circle, 2 = sphere)
        #[arg(long)]
        n: u32,
        /// Time to evaluate at (before the singular time R^2 / 2n)
        #[arg(long, default_value_t = 0.0)]
        t: f64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FLOWSPECTRA_LOG", "error"))
        .format_timestamp(None)
        .init();

    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Evolve { config } => cmd_evolve(config),
        Command::Verify { config, theorem } => cmd_verify(config, theorem),
        Command::Plot { trace, out } => cmd_plot(trace, out),
        Command::Oracle {
            what: OracleCommand::Sphere { radius, n, t },
        } => cmd_oracle_sphere(*radius, *n, *t),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
