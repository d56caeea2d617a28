//! Regularized FOCUSS: iteratively reweighted minimum-norm solutions that
//! approximate an `ℓ_p` penalty.

use num_complex::Complex64;

use super::{check_lengths, per_snapshot, EstimateResult, Method};
use crate::linalg::{norm_sqr, Cholesky};
use crate::sensing::Sensing;
use crate::{OtfsError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FocussConfig {
    /// Exponent of the `ℓ_p` quasi-norm.
    pub p: f64,
    pub sigma2: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl FocussConfig {
    pub fn new(sigma2: f64) -> Self {
        Self {
            p: 0.8,
            sigma2,
            tol: 1e-6,
            max_iter: 500,
        }
    }
}

/// Runs FOCUSS on every snapshot independently.
pub fn focuss<S: Sensing + ?Sized>(
    snapshots: &[Vec<Complex64>],
    dict: &S,
    cfg: &FocussConfig,
) -> Result<EstimateResult> {
    check_lengths(snapshots, dict.rows())?;
    if !(cfg.p > 0.0 && cfg.p <= 2.0) {
        return Err(OtfsError::InvalidConfig(format!(
            "FOCUSS exponent {} outside (0, 2]",
            cfg.p
        )));
    }
    per_snapshot(snapshots, Method::Focuss, |r| focuss_single(r, dict, cfg))
}

fn focuss_single<S: Sensing + ?Sized>(
    r: &[Complex64],
    dict: &S,
    cfg: &FocussConfig,
) -> Result<(Vec<Complex64>, usize, bool)> {
    let d = dict.cols();
    if norm_sqr(r) == 0.0 {
        return Ok((vec![Complex64::new(0.0, 0.0); d], 0, true));
    }
    let lambda = cfg.sigma2.max(1e-12);
    let exponent = 2.0 - cfg.p;
    let mut h = reweighted_solve(r, dict, &vec![1.0; d], lambda)?;
    for t in 1..=cfg.max_iter {
        let weights: Vec<f64> = h.iter().map(|z| z.norm().powf(exponent)).collect();
        if weights.iter().all(|&w| w == 0.0) {
            return Ok((h, t, true));
        }
        let next = reweighted_solve(r, dict, &weights, lambda)?;
        let change: f64 = next
            .iter()
            .zip(&h)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let scale = norm_sqr(&next).sqrt();
        h = next;
        if change <= cfg.tol * scale.max(f64::MIN_POSITIVE) {
            return Ok((h, t, true));
        }
    }
    Ok((h, cfg.max_iter, false))
}

/// `W Ωᴴ (Ω W Ωᴴ + λ I)⁻¹ r` for diagonal `W`.
fn reweighted_solve<S: Sensing + ?Sized>(
    r: &[Complex64],
    dict: &S,
    weights: &[f64],
    lambda: f64,
) -> Result<Vec<Complex64>> {
    let mut a = dict.weighted_gram(weights);
    a.add_diag(lambda);
    let chol = Cholesky::new_unchecked(&a)
        .map_err(|e| OtfsError::NumericalBreakdown(format!("FOCUSS system: {e}")))?;
    let u = chol.solve_vec(r)?;
    Ok(dict
        .adjoint(&u)
        .into_iter()
        .zip(weights)
        .map(|(z, &w)| z * w)
        .collect())
}
