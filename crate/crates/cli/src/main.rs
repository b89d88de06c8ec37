//! `lls-lab`: sampling, local spacing runs, theory tables and the
//! acceptance report.

mod config;
mod lls;
mod output;
mod report;
mod sample;
mod theory;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lls_core::LlsError;

#[derive(Parser, Debug)]
#[command(name = "lls-lab", version, about = "Local level spacing experiments")]
#[command(args_override_self = true)]
struct Cli {
    /// `key = value` file whose entries act as flags; explicit flags win.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write sampled circular spectra as CSV.
    Sample(sample::SampleArgs),
    /// Run a local spacing protocol and write statistics plus a JSON report.
    Lls(lls::LlsArgs),
    /// Tabulate theory curves and means.
    Theory(theory::TheoryArgs),
    /// Run the acceptance suite.
    Report(report::ReportArgs),
}

/// Outcome of a command that ran to completion.
pub enum Status {
    Ok,
    /// Some declared check failed.
    Failed,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match config::expand_args(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("lls-lab: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Sample(a) => sample::run(&a),
        Command::Lls(a) => lls::run(&a),
        Command::Theory(a) => theory::run(&a),
        Command::Report(a) => report::run(&a),
    };
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("lls-lab: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// Bad arguments and unreadable configs are usage errors; everything else
/// is a failed run.
fn exit_code_for(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<LlsError>() {
        Some(LlsError::Argument(_) | LlsError::Parse { .. }) => 2,
        _ if e.downcast_ref::<config::ConfigError>().is_some() => 2,
        _ => 1,
    }
}
