//! `report`: the acceptance suite as a table plus one JSON document.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use lls_core::acceptance::{all_passed, Profile, Suite, SuiteConfig, Verdict, ZEROS_ENV};
use serde_json::json;

use crate::output::{write_file, VERSION};
use crate::Status;

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// smoke, desk or full-desk.
    #[arg(long, default_value = "smoke")]
    pub profile: Profile,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, env = "LLS_LAB_THREADS", default_value_t = 0)]
    pub threads: usize,
    /// High-height zeros file for the Riemann criterion.
    #[arg(long, env = ZEROS_ENV)]
    pub zeros: Option<PathBuf>,
    /// JSON report path.
    #[arg(long, default_value = "acceptance_report.json")]
    pub json: PathBuf,
    /// Run only these criteria.
    #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u8).range(1..=15))]
    pub only: Vec<u8>,
}

pub fn run(args: &ReportArgs) -> Result<Status> {
    let config = SuiteConfig { profile: args.profile, seed: args.seed, threads: args.threads, zeros_file: args.zeros.clone() };
    let suite = Suite::new(config.clone())?;
    println!("{VERSION} acceptance report, profile {}", args.profile);
    let print = |r: &lls_core::acceptance::CriterionResult| {
        println!("{}", r.line());
        if r.verdict == Verdict::Fail {
            for c in r.checks.iter().filter(|c| !c.pass) {
                println!("          failing: {c}");
            }
        }
    };
    let results = if args.only.is_empty() {
        suite.run_all(print)
    } else {
        args.only
            .iter()
            .map(|&id| {
                let r = suite.run(id);
                print(&r);
                r
            })
            .collect()
    };
    let pass = all_passed(&results);
    let doc = json!({ "version": VERSION, "config": config, "criteria": results, "pass": pass });
    write_file(&args.json, &(serde_json::to_string_pretty(&doc)? + "\n"))?;
    let failed = results.iter().filter(|r| r.verdict == Verdict::Fail).count();
    println!("{} criteria, {failed} failed; report written to {}", results.len(), args.json.display());
    Ok(if pass { Status::Ok } else { Status::Failed })
}
