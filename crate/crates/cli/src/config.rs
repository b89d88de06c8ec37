//! `key = value` config files. Each entry becomes `--key value` placed right
//! after the subcommand, so flags given on the command line (which come
//! later and override earlier occurrences) take precedence.

use std::ffi::OsString;
use std::fmt;
use std::path::Path;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Entries of a config file as flag tokens. `true` gives a bare flag,
/// `false` drops the entry.
pub fn parse_config(text: &str) -> Result<Vec<OsString>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError(format!("line {}: expected `key = value`", i + 1)));
        };
        let key = key.trim().replace('_', "-");
        let value = value.trim().trim_matches('"');
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
            return Err(ConfigError(format!("line {}: bad key {key:?}", i + 1)));
        }
        if key == "config" {
            return Err(ConfigError(format!("line {}: config files cannot include others", i + 1)));
        }
        match value {
            "false" => {}
            "true" => out.push(format!("--{key}").into()),
            v => {
                out.push(format!("--{key}").into());
                out.push(v.into());
            }
        }
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<(usize, OsString)> {
    for (i, a) in args.iter().enumerate().skip(1) {
        let s = a.to_string_lossy();
        if s == "--" {
            return None;
        }
        if s == "--config" {
            return args.get(i + 1).map(|p| (i, p.clone()));
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some((i, p.into()));
        }
    }
    None
}

/// Inserts the entries of the `--config` file, if any, after the
/// subcommand.
pub fn expand_args(args: Vec<OsString>) -> Result<Vec<OsString>, ConfigError> {
    let Some((at, path)) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| ConfigError(format!("{}: {e}", Path::new(&path).display())))?;
    let entries = parse_config(&text)?;
    // the subcommand is the first token that is neither a flag nor the
    // config path
    let value_slot = if args[at].to_string_lossy().contains('=') { usize::MAX } else { at + 1 };
    let Some(sub) = (1..args.len()).find(|&i| i != value_slot && !args[i].to_string_lossy().starts_with('-')) else {
        return Ok(args);
    };
    let mut out = args[..=sub].to_vec();
    out.extend(entries);
    out.extend_from_slice(&args[sub + 1..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn parses_entries() {
        let got = parse_config("# comment\nbeta = 2\n\nn_levels=64\nverbose = true\nquiet = false\n").unwrap();
        assert_eq!(got, os(&["--beta", "2", "--n-levels", "64", "--verbose"]));
        assert!(parse_config("beta 2\n").is_err());
        assert!(parse_config("be ta = 2\n").is_err());
    }

    #[test]
    fn entries_go_after_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "n = 32\nseed = 5\n").unwrap();
        let p = path.to_str().unwrap();
        let got = expand_args(os(&["lls-lab", "--config", p, "sample", "--seed", "9"])).unwrap();
        assert_eq!(got, os(&["lls-lab", "--config", p, "sample", "--n", "32", "--seed", "5", "--seed", "9"]));
        let with_eq = format!("--config={p}");
        let got = expand_args(os(&["lls-lab", "sample", &with_eq])).unwrap();
        assert_eq!(got, os(&["lls-lab", "sample", "--n", "32", "--seed", "5", &with_eq]));
    }

    #[test]
    fn no_config_is_identity() {
        let args = os(&["lls-lab", "theory", "--what", "means"]);
        assert_eq!(expand_args(args.clone()).unwrap(), args);
    }
}
