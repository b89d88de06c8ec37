//! `theory`: tabulated means, densities, gap probabilities and σ.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use lls_core::theory::{
    coverage, gap_probability, mean_lls_reference, mean_lls_theory, p0_mean, p0_pdf, spacing_pdf, PainleveTable,
};
use lls_core::LlsError;
use serde::Serialize;

use crate::output::{csv_preamble, emit, num};
use crate::Status;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum What {
    /// Mean local spacings for ℓ = 0..lmax.
    Means,
    /// Density of the gap straddling a fixed point.
    P0,
    /// Nearest-neighbour spacing density.
    P,
    /// Probability of an empty interval, E(0; s).
    Gap,
    /// σ(t) of the Painlevé table, t from 0 to smax.
    Sigma,
}

#[derive(Args, Debug, Serialize)]
pub struct TheoryArgs {
    #[arg(long, value_enum)]
    pub what: What,
    #[arg(long, default_value_t = 2)]
    pub beta: u8,
    #[arg(long, default_value_t = 4)]
    pub lmax: usize,
    /// Upper end of the grid; 4, or the end of the tabulated range if that
    /// comes first.
    #[arg(long)]
    pub smax: Option<f64>,
    /// Grid points, endpoints included.
    #[arg(long, default_value_t = 401)]
    pub points: usize,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &TheoryArgs) -> Result<Status> {
    let mut text = csv_preamble("theory", args)?;
    match args.what {
        What::Means => {
            text.push_str("ell,mean\n");
            for ell in 0..=args.lmax {
                let _ = writeln!(text, "{ell},{}", num(theory_mean(args.beta, ell)?));
            }
        }
        what => {
            let grid = grid(default_smax(args), args.points)?;
            let values = curve(what, args.beta, &grid)?;
            let _ = writeln!(text, "# integral over the grid: {}", num(simpson(&grid, &values)));
            text.push_str(match what {
                What::Sigma => "t,sigma\n",
                What::Gap => "s,gap\n",
                _ => "s,density\n",
            });
            for (x, v) in grid.iter().zip(&values) {
                let _ = writeln!(text, "{},{}", num(*x), num(*v));
            }
        }
    }
    emit(args.out.as_deref(), &text)?;
    Ok(Status::Ok)
}

/// Computed where a computation exists, tabulated otherwise.
fn theory_mean(beta: u8, ell: usize) -> Result<f64> {
    Ok(match beta {
        0 | 2 => mean_lls_theory(beta, ell)?,
        1 | 4 if ell == 0 => p0_mean(beta)?,
        1 | 4 => mean_lls_reference(beta, ell).ok_or_else(|| {
            LlsError::Argument(format!("no mean for beta = {beta} beyond ell = 4, got {ell}"))
        })?,
        _ => return Err(LlsError::Argument(format!("beta must be 0, 1, 2 or 4, got {beta}")).into()),
    })
}

fn default_smax(args: &TheoryArgs) -> f64 {
    args.smax.unwrap_or(match (args.what, args.beta) {
        (What::Sigma, _) => 4.0,
        (_, 1 | 2 | 4) => coverage(PainleveTable::shared(), args.beta).min(4.0),
        _ => 4.0,
    })
}

fn grid(smax: f64, points: usize) -> Result<Vec<f64>> {
    if !(smax > 0.0 && smax.is_finite()) || points < 2 {
        return Err(LlsError::Argument("need smax > 0 and at least 2 points".into()).into());
    }
    let h = smax / (points - 1) as f64;
    let mut grid: Vec<f64> = (0..points).map(|i| i as f64 * h).collect();
    grid[points - 1] = smax;
    Ok(grid)
}

fn curve(what: What, beta: u8, grid: &[f64]) -> Result<Vec<f64>> {
    if beta == 0 {
        return Ok(match what {
            What::Gap | What::P => grid.iter().map(|s| (-s).exp()).collect(),
            What::P0 => grid.iter().map(|s| s * (-s).exp()).collect(),
            _ => return Err(LlsError::Argument("sigma has no Poisson counterpart".into()).into()),
        });
    }
    Ok(match what {
        What::P0 => p0_pdf(beta, grid)?,
        What::P => spacing_pdf(beta, grid)?,
        What::Gap => grid.iter().map(|&s| gap_probability(beta, s)).collect::<Result<_, _>>()?,
        What::Sigma => {
            let table = PainleveTable::shared();
            grid.iter().map(|&t| table.sigma(t)).collect::<Result<_, _>>()?
        }
        What::Means => unreachable!("handled by the caller"),
    })
}

/// Simpson's rule on a uniform grid, trapezoid on a trailing odd panel.
fn simpson(x: &[f64], y: &[f64]) -> f64 {
    let h = x[1] - x[0];
    let pairs = (x.len() - 1) / 2;
    let mut sum = 0.0;
    for k in 0..pairs {
        sum += h / 3.0 * (y[2 * k] + 4.0 * y[2 * k + 1] + y[2 * k + 2]);
    }
    if (x.len() - 1) % 2 == 1 {
        sum += 0.5 * h * (y[x.len() - 2] + y[x.len() - 1]);
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_on_cubics() {
        let x = grid(2.0, 11).unwrap();
        let y: Vec<f64> = x.iter().map(|t| t * t * t - t).collect();
        assert!((simpson(&x, &y) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn poisson_curves_are_closed_form() {
        let g = grid(1.0, 3).unwrap();
        assert_eq!(curve(What::P0, 0, &g).unwrap()[2], (-1f64).exp());
        assert!(curve(What::Sigma, 0, &g).is_err());
        assert_eq!(theory_mean(0, 0).unwrap(), 2.0);
        assert!(theory_mean(3, 0).is_err());
    }
}
