//! `lls`: one protocol run, written as statistics CSV plus a JSON report
//! that compares against the reference constants.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use lls_core::deterministic::{
    billiard_levels, parse_zeros_file, parse_zeros_str, riemann_unfold, weyl_unfold, BilliardConfig, BilliardFamily,
    OffsetSpec, ZerosDataset, BUNDLED_ZEROS, UNFOLD_THRESHOLD,
};
use lls_core::ensembles::{sample_poisson_line, EnsembleConfig, EnsembleSampler, Method};
use lls_core::rng::derived_seed;
use lls_core::spacing::LineSpectrum;
use lls_core::statistics::{
    covariance_from_means, protocol1, protocol2_param, protocol2_points, ratios, spaced_reference_points, LagEstimate,
    SpacingStats, Workers,
};
use lls_core::syk::{SykConfig, SykSampler};
use lls_core::theory::{mean_lls_reference, ratio_reference, RIEMANN_MEAN_LLS};
use lls_core::LlsError;
use serde::Serialize;
use serde_json::json;

use crate::output::{csv_preamble, num, workers, write_file, VERSION};
use crate::Status;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Protocol {
    /// Fixed reference point, independent samples.
    #[value(name = "1")]
    #[serde(rename = "1")]
    FixedPoint,
    /// Many reference points on one spectrum.
    #[value(name = "2.1")]
    #[serde(rename = "2.1")]
    ManyPoints,
    /// One reference point per parameter draw.
    #[value(name = "2.2")]
    #[serde(rename = "2.2")]
    ParameterFamily,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    /// Circular β ensemble.
    Cbe,
    /// Independent uniform angles on the circle.
    Poisson,
    Syk,
    /// Rectangular billiard window at fixed area.
    Billiard,
    /// Unfolded zeta zeros.
    Riemann,
    /// Unit-rate Poisson levels on the line.
    PoissonLine,
}

impl Source {
    fn default_protocol(self) -> Protocol {
        match self {
            Source::Cbe | Source::Poisson | Source::Syk => Protocol::FixedPoint,
            Source::Riemann | Source::PoissonLine => Protocol::ManyPoints,
            Source::Billiard => Protocol::ParameterFamily,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    Cue,
    Coe,
    Cse,
    Poisson,
}

#[derive(Args, Debug, Serialize)]
pub struct LlsArgs {
    /// Defaults to 1 for circle and SYK sources, 2.1 for riemann and
    /// poisson-line, 2.2 for billiard.
    #[arg(long, value_enum)]
    pub protocol: Option<Protocol>,
    #[arg(long, value_enum, default_value = "cbe")]
    pub source: Source,
    /// Shorthand for a circular source with its β; overrides --source.
    #[arg(long, value_enum)]
    pub ensemble: Option<Ensemble>,
    #[arg(long, default_value_t = 2)]
    pub beta: u8,
    /// Levels per circular spectrum, or on the Poisson line.
    #[arg(long)]
    pub n: Option<usize>,
    /// Samples, reference points or parameter draws.
    #[arg(long, default_value_t = 10_000)]
    pub m: u64,
    /// Reference point; π on the circle and 0 for SYK by default.
    #[arg(long)]
    pub phi: Option<f64>,
    #[arg(long, default_value_t = 4)]
    pub lmax: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "cmv")]
    pub method: String,
    #[arg(long, default_value_t = 16)]
    pub n_majorana: usize,
    #[arg(long, default_value_t = 1.0)]
    pub coupling: f64,
    #[arg(long, default_value_t = 4.0 * PI)]
    pub area: f64,
    /// Aspect ratio for a single billiard under protocol 2.1.
    #[arg(long, default_value_t = 1.2360679774997898)]
    pub aspect: f64,
    #[arg(long, default_value_t = 1.2)]
    pub aspect_min: f64,
    #[arg(long, default_value_t = 3.0)]
    pub aspect_max: f64,
    /// Billiard energy at the window centre.
    #[arg(long, default_value_t = 1e8)]
    pub energy: f64,
    #[arg(long, default_value_t = 600.0)]
    pub halfwidth: f64,
    /// Zeros file; the bundled first 10⁴ zeros when absent.
    #[arg(long)]
    pub zeros: Option<PathBuf>,
    /// Decimal base the zeros file values are offsets from.
    #[arg(long)]
    pub base: Option<String>,
    /// Allowed deviation from the reference constants.
    #[arg(long, default_value_t = 0.01)]
    pub tolerance: f64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, env = "LLS_LAB_THREADS", default_value_t = 0)]
    #[serde(skip)]
    pub threads: usize,
}

/// What the run measured and what it should be compared with.
struct Measured {
    stats: SpacingStats,
    /// Whether means are in units of the mean spacing.
    unfolded: bool,
    mean_reference: Vec<f64>,
    ratio_beta: u8,
    note: Option<String>,
}

#[derive(Serialize)]
struct ReferenceCheck {
    quantity: String,
    measured: f64,
    reference: f64,
    deviation: f64,
    tolerance: f64,
    pass: bool,
}

impl ReferenceCheck {
    fn new(quantity: String, measured: f64, reference: f64, tolerance: f64) -> Self {
        let deviation = measured - reference;
        Self { quantity, measured, reference, deviation, tolerance, pass: deviation.abs() <= tolerance }
    }
}

pub fn run(args: &LlsArgs) -> Result<Status> {
    let (source, beta) = match args.ensemble {
        Some(Ensemble::Cue) => (Source::Cbe, 2),
        Some(Ensemble::Coe) => (Source::Cbe, 1),
        Some(Ensemble::Cse) => (Source::Cbe, 4),
        Some(Ensemble::Poisson) => (Source::Poisson, 0),
        None if args.source == Source::Poisson => (Source::Poisson, 0),
        None => (args.source, args.beta),
    };
    let protocol = args.protocol.unwrap_or_else(|| source.default_protocol());
    let workers = workers(args.threads)?;
    let measured = match (protocol, source) {
        (Protocol::FixedPoint, Source::Cbe | Source::Poisson) => circle(args, beta, &workers)?,
        (Protocol::FixedPoint, Source::Syk) => syk(args, &workers)?,
        (Protocol::ManyPoints, Source::Riemann) => riemann(args)?,
        (Protocol::ManyPoints, Source::PoissonLine) => poisson_line(args)?,
        (Protocol::ManyPoints, Source::Billiard) => single_billiard(args)?,
        (Protocol::ParameterFamily, Source::Billiard) => billiard_family(args, &workers)?,
        (p, s) => {
            return Err(LlsError::Argument(format!(
                "source {} does not support protocol {}",
                s.to_possible_value().expect("named").get_name(),
                p.to_possible_value().expect("named").get_name()
            ))
            .into())
        }
    };
    write_outputs(args, protocol, source, &measured)
}

fn arg(message: impl Into<String>) -> anyhow::Error {
    LlsError::Argument(message.into()).into()
}

fn table(beta: u8, lmax: usize) -> Vec<f64> {
    (0..=lmax).map_while(|ell| mean_lls_reference(beta, ell)).collect()
}

fn circle(args: &LlsArgs, beta: u8, workers: &Workers) -> Result<Measured> {
    let n = args.n.unwrap_or(64);
    let phi = args.phi.unwrap_or(PI);
    let method: Method = args.method.parse()?;
    let sampler = EnsembleSampler::new(EnsembleConfig::new(beta, n, args.seed).with_method(method))?;
    let stats = protocol1(&sampler, phi.rem_euclid(TAU), args.lmax, args.m, workers)?;
    Ok(Measured { stats, unfolded: true, mean_reference: table(beta, args.lmax), ratio_beta: beta, note: None })
}

fn syk(args: &LlsArgs, workers: &Workers) -> Result<Measured> {
    let config = SykConfig::new(args.n_majorana, args.coupling, args.seed);
    let beta = config.symmetry_beta();
    let sampler = SykSampler::new(config)?;
    let stats = protocol1(&sampler, args.phi.unwrap_or(0.0), args.lmax, args.m, workers)?;
    Ok(Measured {
        stats,
        unfolded: false,
        mean_reference: Vec::new(),
        ratio_beta: beta,
        note: Some(format!("raw energies; symmetry class beta = {beta}")),
    })
}

/// Up to `m` points on one unfolded spectrum, fewer if the separation rule
/// leaves no room.
fn many_points(args: &LlsArgs, spectrum: &LineSpectrum) -> Result<(SpacingStats, Option<String>)> {
    let room = (spectrum.len() as f64 / ((args.lmax + 2) as f64 * 1.25)).floor() as u64;
    if room == 0 {
        return Err(arg(format!("{} levels leave no room for a reference point", spectrum.len())));
    }
    let count = args.m.min(room);
    let note = (count < args.m).then(|| {
        log::warn!("only {count} of {} reference points fit on {} levels", args.m, spectrum.len());
        format!("reference points capped at {count} by the spectrum length")
    });
    let phis = spaced_reference_points(spectrum, count as usize, args.lmax, derived_seed(args.seed, 1))?;
    Ok((protocol2_points(spectrum, &phis, args.lmax)?, note))
}

/// Drops leading zeros too low to unfold.
fn above_threshold(data: ZerosDataset) -> Result<(ZerosDataset, usize)> {
    if data.base.is_some() {
        return Ok((data, 0));
    }
    let skip = data.values.iter().take_while(|g| **g <= UNFOLD_THRESHOLD).count();
    if skip == 0 {
        return Ok((data, 0));
    }
    log::warn!("skipping {skip} zero(s) below the unfolding threshold 2πe");
    let len = data.len();
    Ok((data.slice(skip..len)?, skip))
}

fn riemann(args: &LlsArgs) -> Result<Measured> {
    let spec = args.base.clone().map_or(OffsetSpec::FromHeader, OffsetSpec::Base);
    let data = match &args.zeros {
        Some(p) => parse_zeros_file(p, &spec)?,
        None => parse_zeros_str(BUNDLED_ZEROS, &spec)?,
    };
    let (data, skipped) = above_threshold(data)?;
    let (stats, note) = many_points(args, &riemann_unfold(&data)?)?;
    let mut notes: Vec<String> = note.into_iter().collect();
    if skipped > 0 {
        notes.push(format!("{skipped} zero(s) below 2πe skipped"));
    }
    if args.zeros.is_none() {
        notes.push("bundled low-height zeros".into());
    }
    Ok(Measured {
        stats,
        unfolded: true,
        mean_reference: RIEMANN_MEAN_LLS.iter().take(args.lmax + 1).copied().collect(),
        ratio_beta: 2,
        note: Some(notes.join("; ")).filter(|s| !s.is_empty()),
    })
}

fn poisson_line(args: &LlsArgs) -> Result<Measured> {
    let needed = (args.m as f64 * (args.lmax + 2) as f64 * 1.25).ceil() as usize + 2 * (args.lmax + 2);
    let spectrum = sample_poisson_line(1.0, args.n.unwrap_or(needed), args.seed)?;
    let (stats, note) = many_points(args, &spectrum)?;
    Ok(Measured { stats, unfolded: true, mean_reference: table(0, args.lmax), ratio_beta: 0, note })
}

fn single_billiard(args: &LlsArgs) -> Result<Measured> {
    let config = BilliardConfig {
        area: args.area,
        aspect_ratio: args.aspect,
        energy_center: args.energy,
        window_halfwidth: args.halfwidth,
    };
    let spectrum = weyl_unfold(&billiard_levels(&config)?, &config)?;
    let (stats, note) = many_points(args, &spectrum)?;
    Ok(Measured { stats, unfolded: true, mean_reference: table(0, args.lmax), ratio_beta: 0, note })
}

fn billiard_family(args: &LlsArgs, workers: &Workers) -> Result<Measured> {
    let family = BilliardFamily {
        area: args.area,
        aspect_range: (args.aspect_min, args.aspect_max),
        energy_center: args.energy,
        window_halfwidth: args.halfwidth,
        seed: args.seed,
    };
    let stats = protocol2_param(|q| family.draw(q), args.lmax, args.m, workers)?;
    Ok(Measured { stats, unfolded: true, mean_reference: table(0, args.lmax), ratio_beta: 0, note: None })
}

fn lag_csv(rows: &[LagEstimate]) -> String {
    let mut s = String::from("ell,value,stderr,ci99\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{}", r.ell, num(r.value), num(r.stderr), num(r.ci99()));
    }
    s
}

fn write_outputs(args: &LlsArgs, protocol: Protocol, source: Source, m: &Measured) -> Result<Status> {
    let ratio_rows = ratios(&m.stats)?;
    let mut checks = Vec::new();
    for (ell, want) in m.mean_reference.iter().enumerate() {
        checks.push(ReferenceCheck::new(format!("mean_s{ell}"), m.stats.mean(ell), *want, args.tolerance));
    }
    for r in &ratio_rows {
        if let Some(want) = ratio_reference(m.ratio_beta, r.ell) {
            checks.push(ReferenceCheck::new(format!("ratio_{}", r.ell), r.value, want, args.tolerance));
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    let covariance = m.unfolded.then(|| covariance_from_means(&m.stats, 1.0));

    let preamble = csv_preamble("lls", args)?;
    write_file(&args.out_dir.join("lls_stats.csv"), &(preamble.clone() + &m.stats.to_csv()))?;
    write_file(&args.out_dir.join("lls_ratios.csv"), &(preamble + &lag_csv(&ratio_rows)))?;
    let report = json!({
        "version": VERSION,
        "config": args,
        "protocol": protocol,
        "source": source,
        "attempted": m.stats.attempted,
        "failed": m.stats.failed,
        "units": if m.unfolded { "mean spacing" } else { "raw" },
        "note": m.note,
        "means": m.stats.rows(),
        "ratios": ratio_rows,
        "covariance": covariance,
        "reference_checks": checks,
        "pass": pass,
    });
    write_file(&args.out_dir.join("lls_report.json"), &(serde_json::to_string_pretty(&report)? + "\n"))?;

    for r in m.stats.rows() {
        println!("<s_{}> = {:.6} ± {:.6}", r.ell, r.mean, r.ci99);
    }
    for c in &checks {
        println!(
            "{:<4} {}: {:.6} vs {:.6} (±{})",
            if c.pass { "PASS" } else { "FAIL" },
            c.quantity,
            c.measured,
            c.reference,
            c.tolerance
        );
    }
    Ok(if pass { Status::Ok } else { Status::Failed })
}
