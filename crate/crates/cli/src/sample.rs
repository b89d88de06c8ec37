//! `sample`: seeded circular spectra as CSV.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use lls_core::ensembles::{EnsembleConfig, EnsembleSampler, Method};
use serde::Serialize;

use crate::output::{csv_preamble, num, workers};
use crate::Status;

/// Samples written per batch.
const BATCH: u64 = 1024;

#[derive(Args, Debug, Serialize)]
pub struct SampleArgs {
    /// Dyson index; 0 gives independent uniform angles.
    #[arg(long, default_value_t = 2)]
    pub beta: u8,
    /// Levels per spectrum.
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    /// Number of spectra.
    #[arg(long, default_value_t = 1)]
    pub m: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `cmv` or `haar-qr` (β = 2 only).
    #[arg(long, default_value = "cmv")]
    pub method: String,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads, 0 for all cores.
    #[arg(long, env = "LLS_LAB_THREADS", default_value_t = 0)]
    #[serde(skip)]
    pub threads: usize,
}

pub fn run(args: &SampleArgs) -> Result<Status> {
    let method: Method = args.method.parse()?;
    let sampler = EnsembleSampler::new(EnsembleConfig::new(args.beta, args.n, args.seed).with_method(method))?;
    let workers = workers(args.threads)?;
    let mut sink: Box<dyn std::io::Write> = match &args.out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            Box::new(std::io::BufWriter::new(std::fs::File::create(p)?))
        }
        None => Box::new(std::io::stdout().lock()),
    };
    sink.write_all(csv_preamble("sample", args)?.as_bytes())?;
    sink.write_all(b"sample,index,angle\n")?;
    let mut start = 0;
    while start < args.m {
        let ids: Vec<u64> = (start..(start + BATCH).min(args.m)).collect();
        let spectra = workers.map(&ids, |&i| sampler.spectrum(i));
        let mut text = String::new();
        for (i, s) in ids.iter().zip(spectra) {
            for (k, a) in s?.angles().iter().enumerate() {
                let _ = writeln!(text, "{i},{k},{}", num(*a));
            }
        }
        sink.write_all(text.as_bytes())?;
        start += BATCH;
    }
    sink.flush()?;
    Ok(Status::Ok)
}
