//! End-to-end runs of the `gcor` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gcor_core::{qf_surface, BivariateSample, DependenceSurface, SurfaceMeasure};
use tempfile::TempDir;

fn gcor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcor")).args(args).output().expect("binary runs")
}

fn gcor_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcor")).args(args).env(key, value).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_csv(dir: &TempDir, name: &str, header: &str, rows: impl IntoIterator<Item = (f64, f64)>) -> PathBuf {
    let mut text = format!("{header}\n");
    for (x, y) in rows {
        text.push_str(&format!("{x},{y}\n"));
    }
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Field `name` of the single-row report CSV.
fn field(report: &str, name: &str) -> String {
    let mut lines = report.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row = lines.next().unwrap();
    let mut fields = Vec::new();
    let mut rest = row;
    while !rest.is_empty() {
        if let Some(stripped) = rest.strip_prefix('"') {
            let end = stripped.find('"').unwrap();
            fields.push(stripped[..end].to_string());
            rest = stripped[end + 1..].strip_prefix(',').unwrap_or("");
        } else {
            let (f, r) = rest.split_once(',').unwrap_or((rest, ""));
            fields.push(f.to_string());
            rest = r;
        }
    }
    fields[header.iter().position(|h| *h == name).unwrap()].clone()
}

fn number(report: &str, name: &str) -> f64 {
    field(report, name).parse().unwrap()
}

fn simulate(dir: &TempDir, family: &str, n: usize, seed: u64) -> PathBuf {
    let path = dir.path().join(format!("{}_{n}_{seed}.csv", family.replace(':', "_")));
    let out = gcor(&["simulate", "--family", family, "-n", &n.to_string(), "--seed", &seed.to_string(), "-o", p(&path)]);
    stdout(&out);
    path
}

#[test]
fn compute_perfect_dependence() {
    let dir = TempDir::new().unwrap();
    let co = write_csv(&dir, "co.csv", "x,y", (0..50).map(|i| (i as f64, (i as f64).exp())));
    let report = stdout(&gcor(&["compute", "-i", p(&co), "--measure", "qcor", "--alpha", "0.5", "--beta", "0.5"]));
    assert_eq!(number(&report, "correlation"), 1.0);
    let counter = write_csv(&dir, "counter.csv", "x,y", (0..50).map(|i| (i as f64, -(i as f64).powi(3))));
    let report = stdout(&gcor(&["compute", "-i", p(&counter), "--measure", "mcor"]));
    assert_eq!(number(&report, "correlation"), -1.0);
    assert_eq!(field(&report, "n"), "50");
}

#[test]
fn compute_constant_column_is_degenerate() {
    let dir = TempDir::new().unwrap();
    let path = write_csv(&dir, "c.csv", "x,y", (0..20).map(|i| (i as f64, 3.0)));
    for measure in ["mcor", "qcor", "ecor", "qmcor", "blomqvist", "gcor"] {
        let out = gcor(&["compute", "-i", p(&path), "--measure", measure]);
        assert_eq!(out.status.code(), Some(0));
        let report = stdout(&out);
        assert_eq!(number(&report, "correlation"), 0.0, "{measure}");
        assert_eq!(field(&report, "degenerate"), "true", "{measure}");
    }
}

#[test]
fn compute_named_columns_and_json() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("named.csv");
    std::fs::write(&path, "id,left,right\n1,1,5\n2,2,NA\n3,3,3\n4,4,1\n").unwrap();
    let out = stdout(&gcor(&["compute", "-i", p(&path), "--x", "left", "--y", "right", "--measure", "mcor", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["measure"], "mcor");
    assert_eq!(v["n"], 3);
    assert_eq!(v["correlation"], -1.0);
    let out = stdout(&gcor(&[
        "compute",
        "-i",
        p(&path),
        "--x",
        "left",
        "--y",
        "right",
        "--measure",
        "gcor",
        "--fx",
        "quantile:0.5",
        "--fy",
        "expectile:0.3",
    ]));
    assert!(field(&out, "params").contains("fx=quantile:0.5"));
    let out = stdout(&gcor(&["compute", "-i", p(&path), "--measure", "tcor", "--a", "1.5", "--b", "-2"]));
    assert_eq!(field(&out, "measure"), "tcor");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let good = write_csv(&dir, "good.csv", "x,y", (0..10).map(|i| (i as f64, (i * i) as f64)));
    let missing = dir.path().join("missing.csv");
    assert_eq!(gcor(&["compute", "-i", p(&missing), "--measure", "mcor"]).status.code(), Some(2));

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x,y\n1,2\n3,four\n").unwrap();
    assert_eq!(gcor(&["compute", "-i", p(&bad), "--measure", "mcor"]).status.code(), Some(3));
    assert_eq!(gcor(&["compute", "-i", p(&good), "--x", "z", "--measure", "mcor"]).status.code(), Some(3));
    assert_eq!(gcor(&["compute", "-i", p(&good), "--measure", "tcor"]).status.code(), Some(3));

    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "x,y\nNA,1\n2,\n").unwrap();
    assert_eq!(gcor(&["compute", "-i", p(&empty), "--measure", "mcor"]).status.code(), Some(4));

    let constant = write_csv(&dir, "const.csv", "x,y", (0..10).map(|i| (1.0, i as f64)));
    assert_eq!(gcor(&["grid", "-i", p(&constant), "--mode", "cdf"]).status.code(), Some(5));

    assert_eq!(gcor(&["compute", "-i", p(&good), "--measure", "qcor", "--alpha", "1.5"]).status.code(), Some(6));
    assert_eq!(gcor(&["grid", "-i", p(&good), "--levels", "0.5,0.2"]).status.code(), Some(6));

    assert_eq!(gcor(&["compute", "-i", p(&good)]).status.code(), Some(64));
    assert_eq!(gcor(&["summary", "-i", p(&good), "--domain", "cdf", "--format", "svg"]).status.code(), Some(64));
    assert_eq!(gcor(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(gcor(&["--help"]).status.code(), Some(0));

    assert_eq!(gcor_env(&["compute", "-i", p(&good), "--measure", "mcor"], "GCOR_THREADS", "many").status.code(), Some(3));
    assert_eq!(gcor(&["compute", "-i", p(&good), "--measure", "mcor"]).status.code(), Some(0));
}

#[test]
fn grid_round_trips_and_matches_library() {
    let dir = TempDir::new().unwrap();
    let path = simulate(&dir, "gaussian:0.5", 2000, 5);
    let out = stdout(&gcor(&["grid", "-i", p(&path), "--levels", "0.1,0.25,0.5,0.75,0.9"]));
    let parsed = DependenceSurface::from_csv(&out, SurfaceMeasure::QfCor).unwrap();

    let text = std::fs::read_to_string(&path).unwrap();
    let (xs, ys): (Vec<f64>, Vec<f64>) = text
        .lines()
        .skip(1)
        .map(|l| {
            let (u, v) = l.split_once(',').unwrap();
            (u.parse::<f64>().unwrap(), v.parse::<f64>().unwrap())
        })
        .unzip();
    let sample = BivariateSample::new(xs, ys).unwrap();
    let expected = qf_surface(&sample, &[0.1, 0.25, 0.5, 0.75, 0.9], true).unwrap();
    assert_eq!(parsed, expected);

    let json = stdout(&gcor(&["grid", "-i", p(&path), "--levels", "0.1,0.25,0.5,0.75,0.9", "--format", "json"]));
    assert_eq!(DependenceSurface::from_json(&json).unwrap(), expected);
}

#[test]
fn grid_on_simulated_copulas() {
    let dir = TempDir::new().unwrap();
    let levels = "0.1,0.3,0.5,0.7,0.9";
    let independent = simulate(&dir, "independence", 100_000, 1);
    let out = stdout(&gcor(&["grid", "-i", p(&independent), "--levels", levels]));
    let s = DependenceSurface::from_csv(&out, SurfaceMeasure::QfCor).unwrap();
    assert!(s.values.iter().flatten().all(|v| v.abs() <= 0.05), "{:?}", s.values);

    let clayton = simulate(&dir, "clayton:2", 100_000, 2);
    let out = stdout(&gcor(&["grid", "-i", p(&clayton), "--levels", levels]));
    let s = DependenceSurface::from_csv(&out, SurfaceMeasure::QfCor).unwrap();
    assert!((s.value(2, 2) - 0.512).abs() <= 0.02, "{}", s.value(2, 2));
}

#[test]
fn grid_svg() {
    let dir = TempDir::new().unwrap();
    let path = simulate(&dir, "clayton:2", 1000, 3);
    let svg_path = dir.path().join("grid.svg");
    stdout(&gcor(&["grid", "-i", p(&path), "--format", "svg", "-o", p(&svg_path)]));
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<?xml version=\"1.0\""));
    assert!(svg.contains("<svg xmlns=\"http://www.w3.org/2000/svg\""));
    let cells = &svg[svg.find("<g id=\"cells\"").unwrap()..];
    let cells = &cells[..cells.find("</g>").unwrap()];
    assert_eq!(cells.matches("<rect").count(), 99 * 99);
    assert_eq!(svg.matches("<rect").count(), 99 * 99);
    assert!(svg.contains("<g id=\"legend\">") && svg.contains("<g id=\"axes\""));

    let again = stdout(&gcor(&["grid", "-i", p(&path), "--format", "svg"]));
    assert_eq!(again, svg);
    let single = stdout(&gcor_env(&["grid", "-i", p(&path), "--format", "svg"], "GCOR_THREADS", "1"));
    assert_eq!(single, svg);
}

#[test]
fn cdf_grid_modes() {
    let dir = TempDir::new().unwrap();
    let path = simulate(&dir, "gaussian:0.5", 500, 4);
    let out = stdout(&gcor(&["grid", "-i", p(&path), "--mode", "cdf", "--thresholds-x", "0.25,0.5", "--thresholds-y", "0.5,0.75,0.9"]));
    assert_eq!(out.lines().count(), 1 + 6);
    let out = stdout(&gcor(&["grid", "-i", p(&path), "--mode", "cdf", "--statistic", "cov", "--trim", "0.025,0.975"]));
    let s = DependenceSurface::from_csv(&out, SurfaceMeasure::CdfCov).unwrap();
    assert!(s.axis_x.len() > 400 && s.axis_y.len() > 400);
}

#[test]
fn summary_lebesgue_cdf_is_sample_covariance() {
    let dir = TempDir::new().unwrap();
    let rows: Vec<(f64, f64)> = (0..300).map(|i| ((i as f64 * 0.37).sin() * 4.0, (i as f64 * 0.11).cos() + i as f64 / 100.0)).collect();
    let path = write_csv(&dir, "s.csv", "x,y", rows.iter().copied());
    let n = rows.len() as f64;
    let mx = rows.iter().map(|r| r.0).sum::<f64>() / n;
    let my = rows.iter().map(|r| r.1).sum::<f64>() / n;
    let cov = rows.iter().map(|r| (r.0 - mx) * (r.1 - my)).sum::<f64>() / n;
    let report = stdout(&gcor(&["summary", "-i", p(&path), "--domain", "cdf", "--measure", "lebesgue"]));
    assert!((number(&report, "covariance") - cov).abs() <= 1e-10);

    let regional = stdout(&gcor(&["summary", "-i", p(&path), "--domain", "qf", "--measure", "region", "--trim", "0.5,1"]));
    assert!(field(&regional, "params").starts_with("region=[0.5,1]"));
    let boxed = stdout(&gcor(&["summary", "-i", p(&path), "--domain", "cdf", "--region", "-1,1,0,2"]));
    assert!(number(&boxed, "correlation").abs() <= 1.0);
}

#[test]
fn tail_outputs() {
    let dir = TempDir::new().unwrap();
    let path = simulate(&dir, "comonotone", 2000, 0);
    let csv = stdout(&gcor(&["tail", "-i", p(&path), "--side", "upper"]));
    assert!(csv.starts_with("side,level,qcor,lambda,n_corner\nupper,9.0000000000000002e-1,1.0"));
    let json = stdout(&gcor(&["tail", "-i", p(&path), "--side", "lower", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["classification"]["label"], "comonotonic");
    assert_eq!(v["classification"]["level"], 0.005);
    let json = stdout(&gcor(&["tail", "-i", p(&path), "--side", "lower", "--levels", "0.001", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!(v["classification"].is_null());
}

#[test]
fn simulate_is_deterministic() {
    let args = ["simulate", "--family", "countermonotone", "--n", "5", "--seed", "7"];
    let first = stdout(&gcor(&args));
    assert_eq!(first, stdout(&gcor(&args)));
    assert_eq!(first.lines().count(), 6);
    assert_eq!(first.lines().next(), Some("u,v"));

    let args = ["simulate", "--family", "t:0.3:4", "-n", "100", "--seed", "9", "--marginal", "exponential"];
    let first = stdout(&gcor(&args));
    assert_eq!(first, stdout(&gcor_env(&args, "GCOR_THREADS", "2")));
    assert!(first.starts_with("u,v,x,y\n"));
    assert_ne!(first, stdout(&gcor(&["simulate", "--family", "t:0.3:4", "-n", "100", "--seed", "10", "--marginal", "exponential"])));

    let calibrated = stdout(&gcor(&["simulate", "--family", "gumbel", "--spearman", "0.5", "-n", "3"]));
    assert_eq!(calibrated.lines().count(), 4);
    assert_eq!(gcor(&["simulate", "--family", "gumbel", "--spearman", "-0.5", "-n", "3"]).status.code(), Some(6));
}
