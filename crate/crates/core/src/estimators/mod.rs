//! Sparse channel estimators over a [`Sensing`](crate::sensing::Sensing)
//! dictionary.
//!
//! Every estimator returns one estimate per pilot snapshot. The Bayesian
//! learners share hyperparameters across snapshots; the greedy and convex
//! baselines treat each snapshot on its own.

pub mod focuss;
pub mod gmm_sbl;
pub mod lasso;
pub mod omp;
pub mod oracle;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::OtfsError;

pub use focuss::{focuss, FocussConfig};
pub use gmm_sbl::{e_step, gmm_sbl_fit, m_step, sbl_fit, GmmSblConfig, GmmSblState, InitMode};
pub use lasso::{lasso, LassoConfig};
pub use omp::{omp, OmpConfig};
pub use oracle::{oracle_mmse, oracle_mmse_with_prior};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    GmmSbl,
    Sbl,
    Omp,
    Focuss,
    Lasso,
    OracleMmse,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::GmmSbl,
        Method::Sbl,
        Method::Omp,
        Method::Focuss,
        Method::Lasso,
        Method::OracleMmse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::GmmSbl => "gmm_sbl",
            Method::Sbl => "sbl",
            Method::Omp => "omp",
            Method::Focuss => "focuss",
            Method::Lasso => "lasso",
            Method::OracleMmse => "oracle_mmse",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = OtfsError;

    fn from_str(s: &str) -> Result<Self, OtfsError> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| OtfsError::InvalidConfig(format!("unknown estimator '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    /// One estimate per snapshot, each of dictionary length.
    pub estimates: Vec<Vec<Complex64>>,
    /// Iterations of the outer loop; for per-snapshot methods the maximum.
    pub iterations: usize,
    pub converged: bool,
    pub method: Method,
}

impl EstimateResult {
    /// Average of the per-snapshot estimates.
    pub fn fused(&self) -> Vec<Complex64> {
        let l = self.estimates.len().max(1) as f64;
        let d = self.estimates.first().map_or(0, Vec::len);
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        for e in &self.estimates {
            for (o, &v) in out.iter_mut().zip(e) {
                *o += v;
            }
        }
        out.iter_mut().for_each(|z| *z /= l);
        out
    }
}

/// Runs a single-snapshot solver on every snapshot.
pub(crate) fn per_snapshot(
    snapshots: &[Vec<Complex64>],
    method: Method,
    mut solve: impl FnMut(&[Complex64]) -> crate::Result<(Vec<Complex64>, usize, bool)>,
) -> crate::Result<EstimateResult> {
    if snapshots.is_empty() {
        return Err(OtfsError::NoSnapshots);
    }
    let mut estimates = Vec::with_capacity(snapshots.len());
    let (mut iterations, mut converged) = (0, true);
    for r in snapshots {
        let (h, it, ok) = solve(r)?;
        estimates.push(h);
        iterations = iterations.max(it);
        converged &= ok;
    }
    Ok(EstimateResult {
        estimates,
        iterations,
        converged,
        method,
    })
}

pub(crate) fn check_lengths(snapshots: &[Vec<Complex64>], rows: usize) -> crate::Result<()> {
    if snapshots.is_empty() {
        return Err(OtfsError::NoSnapshots);
    }
    for r in snapshots {
        if r.len() != rows {
            return Err(OtfsError::DimensionMismatch(format!(
                "snapshot of length {} for {rows} pilot samples",
                r.len()
            )));
        }
    }
    Ok(())
}
