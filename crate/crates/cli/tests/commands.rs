use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lls_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lls-lab"))
        .args(args)
        .env_remove("LLS_ZEROS_FILE")
        .env_remove("LLS_LAB_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV: comment lines and the header dropped.
fn rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("lls_report.json")).unwrap()).unwrap()
}

#[test]
fn sample_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spectra.csv");
    let mut runs = Vec::new();
    for threads in ["1", "2"] {
        let o = lls_lab(&["sample", "--beta", "2", "--n", "64", "--m", "100", "--seed", "7", "--threads", threads, "--out", path.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        runs.push(std::fs::read(&path).unwrap());
    }
    let text = runs.pop().unwrap();
    assert_eq!(text, runs[0]);
    let data = rows(std::str::from_utf8(&text).unwrap());
    assert_eq!(data.len(), 6400);
    assert_eq!(data.last().unwrap()[..2], [99.0, 63.0]);
    let other = lls_lab(&["sample", "--beta", "2", "--n", "64", "--m", "100", "--seed", "8"]);
    assert_ne!(rows(&stdout(&other)), data);
}

#[test]
fn poisson_sample_is_sorted_on_the_circle() {
    let o = lls_lab(&["sample", "--beta", "0", "--n", "1024", "--m", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# lls-lab "));
    assert!(text.contains("\"beta\":0"));
    let angles: Vec<f64> = rows(&text).iter().map(|r| r[2]).collect();
    assert_eq!(angles.len(), 1024);
    assert!(angles.windows(2).all(|w| w[0] <= w[1]));
    assert!(angles.iter().all(|a| (0.0..std::f64::consts::TAU).contains(a)));
}

#[test]
fn theory_means_match_the_unitary_row() {
    let o = lls_lab(&["theory", "--what", "means", "--beta", "2", "--lmax", "4"]);
    assert!(o.status.success());
    let want = [1.17999, 0.94449, 0.98610, 0.99404, 0.99671];
    let got = rows(&stdout(&o));
    for (row, w) in got.iter().zip(want) {
        assert!((row[1] - w).abs() < 1e-4, "{row:?}");
    }
    assert_eq!(got.len(), 5);
}

#[test]
fn theory_curves() {
    let o = lls_lab(&["theory", "--what", "p0", "--beta", "2", "--smax", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let integral: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("# integral over the grid: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((integral - 1.0).abs() < 1e-4, "{integral}");

    let o = lls_lab(&["theory", "--what", "gap", "--beta", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let gap: Vec<f64> = rows(&stdout(&o)).iter().map(|r| r[1]).collect();
    assert_eq!(gap[0], 1.0);
    assert!(gap.windows(2).all(|w| w[1] <= w[0]));
    assert!(*gap.last().unwrap() < 1e-6);
}

#[test]
fn lls_poisson_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = lls_lab(&["lls", "--ensemble", "poisson", "--n", "64", "--m", "20000", "--seed", "3", "--tolerance", "0.1", "--out-dir", out]);
    let r = report(dir.path());
    assert_eq!(o.status.code(), Some(if r["pass"].as_bool().unwrap() { 0 } else { 1 }));
    assert!(r["pass"].as_bool().unwrap(), "{r}");
    assert_eq!(r["config"]["m"], 20000);
    assert_eq!(r["protocol"], "1");
    assert_eq!(r["means"].as_array().unwrap().len(), 5);
    assert_eq!(r["reference_checks"].as_array().unwrap().len(), 8);
    let stats = std::fs::read_to_string(dir.path().join("lls_stats.csv")).unwrap();
    assert!(stats.contains("# lls config: "));
    assert!(stats.contains("ell,mean,stderr,ci99,count"));
}

#[test]
fn lls_results_do_not_depend_on_worker_count() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for (d, t) in dirs.iter().zip(["1", "3"]) {
        lls_lab(&["lls", "--ensemble", "coe", "--n", "16", "--m", "1500", "--threads", t, "--out-dir", d.path().to_str().unwrap()]);
    }
    let read = |d: &tempfile::TempDir| rows(&std::fs::read_to_string(d.path().join("lls_stats.csv")).unwrap());
    assert_eq!(read(&dirs[0]), read(&dirs[1]));
}

#[test]
fn lls_strict_tolerance_fails_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = lls_lab(&["lls", "--ensemble", "cue", "--n", "8", "--m", "200", "--tolerance", "1e-9", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(report(dir.path())["pass"], false);
}

#[test]
fn lls_line_sources() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = lls_lab(&["lls", "--source", "poisson-line", "--m", "5000", "--tolerance", "0.2", "--out-dir", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(report(dir.path())["protocol"], "2.1");

    let o = lls_lab(&["lls", "--source", "riemann", "--m", "100", "--tolerance", "0.5", "--out-dir", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(dir.path());
    assert!(r["note"].as_str().unwrap().contains("below 2πe skipped"));
    assert_eq!(r["means"][0]["count"], 100);

    let o = lls_lab(&[
        "lls", "--source", "billiard", "--m", "200", "--energy", "1e5", "--halfwidth", "600", "--tolerance", "0.5", "--out-dir", out,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(report(dir.path())["protocol"], "2.2");
}

#[test]
fn lls_syk_compares_ratios_only() {
    let dir = tempfile::tempdir().unwrap();
    let o = lls_lab(&["lls", "--source", "syk", "--n-majorana", "12", "--m", "50", "--lmax", "3", "--tolerance", "1", "--out-dir", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(dir.path());
    let names: Vec<&str> = r["reference_checks"].as_array().unwrap().iter().map(|c| c["quantity"].as_str().unwrap()).collect();
    assert_eq!(names, ["ratio_1", "ratio_2", "ratio_3"]);
    assert_eq!(r["units"], "raw");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(lls_lab(&["lls", "--bogus"]).status.code(), Some(2));
    assert_eq!(lls_lab(&["sample", "--method", "nope"]).status.code(), Some(2));
    assert_eq!(lls_lab(&["lls", "--source", "riemann", "--protocol", "1"]).status.code(), Some(2));
    assert_eq!(lls_lab(&["report", "--profile", "huge"]).status.code(), Some(2));
    assert_eq!(lls_lab(&["--config", "/nonexistent/run.cfg", "sample"]).status.code(), Some(2));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# sampler\nbeta = 0\nn = 10\nseed = 4\n").unwrap();
    let o = lls_lab(&["--config", cfg.to_str().unwrap(), "sample", "--n", "12"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("\"beta\":0,\"n\":12,\"m\":1,\"seed\":4"), "{text}");
    assert_eq!(rows(&text).len(), 12);
    std::fs::write(&cfg, "not a pair\n").unwrap();
    assert_eq!(lls_lab(&["--config", cfg.to_str().unwrap(), "sample"]).status.code(), Some(2));
}

#[test]
fn smoke_report_skips_riemann_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("acc.json");
    let o = lls_lab(&["report", "--profile", "smoke", "--json", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let criteria = doc["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 15);
    assert_eq!(criteria[13]["verdict"], "SKIPPED");
    assert_eq!(criteria[0]["verdict"], "PASS");
    assert!(stdout(&o).lines().filter(|l| l.starts_with("PASS") || l.starts_with("SKIPPED")).count() == 15);
}
