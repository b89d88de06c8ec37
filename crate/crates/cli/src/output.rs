//! Shared output plumbing: config echo, number formatting, destinations.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use lls_core::statistics::Workers;
use serde::Serialize;

pub const VERSION: &str = concat!("lls-lab ", env!("CARGO_PKG_VERSION"));

/// Comment lines that open every CSV file.
pub fn csv_preamble(command: &str, config: &impl Serialize) -> Result<String> {
    Ok(format!("# {VERSION}\n# {command} config: {}\n", serde_json::to_string(config)?))
}

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes to `path`, or to standard output when there is none.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            std::io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn workers(threads: usize) -> Result<Workers> {
    Ok(Workers::new(threads)?)
}
