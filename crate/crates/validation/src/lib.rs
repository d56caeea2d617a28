//! Shared reporting for the acceptance suite in `tests/acceptance.rs`.
//!
//! The suite lives in its own package so that it runs after the unit and
//! integration tests of the other crates.

use std::io::Write;

/// Writes one `PASS`/`FAIL` line straight to stderr, past the test harness
/// output capture.
pub fn report(tag: &str, title: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "\n{verdict} [{tag}] {title}: {detail}");
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Standard error of the mean of `a_i - b_i`.
pub fn paired_std_err(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = d.len() as f64;
    if d.len() < 2 {
        return 0.0;
    }
    let m = mean(&d);
    let var = d.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (var / n).sqrt()
}

pub fn db(x: f64) -> f64 {
    10.0 * x.log10()
}
