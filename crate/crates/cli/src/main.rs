use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rabuild_cli::commands::{self, CheckArgs, ExportArgs, ExportWhat};

/// Right-angled building workbench.
///
/// Exit codes: 0 success, 1 a check failed, 2 unreadable or invalid input,
/// 3 a resource cap was hit, 4 the requested analysis does not apply to the
/// diagram.
#[derive(Parser)]
#[command(name = "rabuild", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification checks on a building.
    Check {
        spec: PathBuf,
        /// A check name, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the JSON report here (`-` for stdout).
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Classify the ends of the building's Coxeter group.
    Ends {
        spec: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Write a DOT graph of the ball around the identity chamber.
    Export {
        spec: PathBuf,
        #[arg(long, value_enum)]
        what: What,
        #[arg(long)]
        radius: Option<usize>,
        /// Generator whose panel at the identity defines the wings.
        #[arg(long = "panel-type")]
        panel_type: Option<String>,
        /// Output file (`-` or absent for stdout).
        #[arg(long)]
        dot: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    Ball,
    Tree,
    Wings,
}

fn main() -> ExitCode {
    let exit = match Cli::parse().command {
        Command::Check { spec, suite, radius, trials, seed, json } => {
            commands::check(&CheckArgs { spec, suite, radius, trials, seed, json })
        }
        Command::Ends { spec, json } => commands::ends(&spec, json.as_deref()),
        Command::Export { spec, what, radius, panel_type, dot } => {
            let what = match what {
                What::Ball => ExportWhat::Ball,
                What::Tree => ExportWhat::Tree,
                What::Wings => ExportWhat::Wings,
            };
            commands::export(&ExportArgs { spec, what, radius, panel_type, dot })
        }
    };
    ExitCode::from(exit.code())
}
