//! `grc-sim`: run preset or file-configured simulations and compare runs.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 diverged run.

mod compare;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "grc-sim", version, about = "Generic robust control servo simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one closed-loop simulation and write telemetry and metrics.
    Run(RunArgs),
    /// Compare the metrics of two completed runs.
    Compare { dir_a: PathBuf, dir_b: PathBuf },
    /// List the built-in presets.
    Presets,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ControllerArg {
    Grc,
    Pid,
}

#[derive(clap::Args, Debug)]
pub struct RunArgs {
    /// Built-in preset name.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    pub preset: Option<String>,
    /// Path to a run configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "grc")]
    pub controller: ControllerArg,
    /// Output directory [default: $GRC_SIM_OUT or `runs`, plus `<name>-<controller>`].
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the run duration [s].
    #[arg(long)]
    pub duration: Option<f64>,
    /// Write telemetry.csv (default: both files when neither flag is given).
    #[arg(long)]
    pub csv: bool,
    /// Write metrics.txt.
    #[arg(long)]
    pub metrics: bool,
    /// Also write plot.gp, a gnuplot script over telemetry.csv.
    #[arg(long)]
    pub gnuplot: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run(args) => run::run(&args),
        Command::Compare { dir_a, dir_b } => compare::compare(&dir_a, &dir_b).map(|()| run::Status::Completed),
        Command::Presets => {
            for name in grc_core::config::preset_names() {
                println!("{name}");
            }
            Ok(run::Status::Completed)
        }
    };
    match result {
        Ok(run::Status::Completed) => ExitCode::SUCCESS,
        Ok(run::Status::Diverged) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
