#![allow(dead_code)]

use std::io::Write;
use std::path::Path;

/// Writes straight to the stderr handle so the line survives libtest's
/// output capture.
pub fn line(msg: &str) {
    let mut err = std::io::stderr();
    let _ = writeln!(err, "{msg}");
}

pub fn verdict(n: u32, title: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    line(&format!("acceptance {n:>2} [{tag}] {title}: {detail}"));
}

/// Runs the CLI in-process and returns (exit code, parsed JSON report).
pub fn run_cli(args: &[&str], report: &Path) -> (i32, Option<serde_json::Value>) {
    let mut argv = vec!["cavityfit".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    argv.push("--out".into());
    argv.push(report.display().to_string());
    let code = cavityfit::pipeline::run(argv);
    let json = std::fs::read_to_string(report)
        .ok()
        .and_then(|s| serde_json::from_str(&s).ok());
    (code, json)
}

pub fn result<'a>(report: &'a serde_json::Value, name: &str) -> &'a serde_json::Value {
    report["results"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["name"] == name)
        .unwrap_or_else(|| panic!("no result {name}"))
}

pub fn display(report: &serde_json::Value, name: &str) -> String {
    result(report, name)["display"].as_str().unwrap().to_string()
}

pub fn value(report: &serde_json::Value, name: &str) -> f64 {
    result(report, name)["value"].as_str().unwrap().parse().unwrap()
}

pub fn sigma(report: &serde_json::Value, name: &str) -> f64 {
    result(report, name)["sigma"].as_str().unwrap().parse().unwrap_or(0.0)
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss-Legendre integral of f over [a, b] with `panels` panels.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, rule: &[(f64, f64)]) -> f64 {
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let mid = a + h * (p as f64 + 0.5);
        for &(x, w) in rule {
            sum += w * f(mid + 0.5 * h * x);
        }
    }
    0.5 * h * sum
}
