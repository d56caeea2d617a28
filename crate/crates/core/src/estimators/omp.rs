//! Orthogonal matching pursuit with a noise-aware residual stopping rule.

use num_complex::Complex64;

use super::{check_lengths, per_snapshot, EstimateResult, Method};
use crate::linalg::{dot_c, norm_sqr, Cholesky, ComplexMatrix};
use crate::sensing::Sensing;
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct OmpConfig {
    pub sigma2: f64,
    /// Minimum relative drop of the residual energy for a new atom to be kept.
    pub min_decrease: f64,
    /// Cap on the support size; `None` means the measurement length.
    pub max_support: Option<usize>,
}

impl OmpConfig {
    pub fn new(sigma2: f64) -> Self {
        Self {
            sigma2,
            min_decrease: 1e-2,
            max_support: None,
        }
    }
}

/// Runs OMP on every snapshot independently.
pub fn omp<S: Sensing + ?Sized>(
    snapshots: &[Vec<Complex64>],
    dict: &S,
    cfg: &OmpConfig,
) -> Result<EstimateResult> {
    check_lengths(snapshots, dict.rows())?;
    let columns: Vec<Vec<Complex64>> = (0..dict.cols()).map(|r| dict.column(r)).collect();
    let norms: Vec<f64> = columns.iter().map(|c| norm_sqr(c).sqrt()).collect();
    per_snapshot(snapshots, Method::Omp, |r| {
        omp_single(r, &columns, &norms, cfg)
    })
}

fn omp_single(
    r: &[Complex64],
    columns: &[Vec<Complex64>],
    norms: &[f64],
    cfg: &OmpConfig,
) -> Result<(Vec<Complex64>, usize, bool)> {
    let n = r.len();
    let d = columns.len();
    let cap = cfg.max_support.unwrap_or(n).min(n).min(d);
    let energy = norm_sqr(r);
    let target = (n as f64 * cfg.sigma2).max(1e-24 * energy);
    let mut support: Vec<usize> = Vec::new();
    let mut coef: Vec<Complex64> = Vec::new();
    let mut residual = r.to_vec();
    let mut res_energy = energy;
    let mut converged = true;

    while res_energy > target && support.len() < cap {
        let mut best = None;
        let mut best_val = 0.0;
        for (j, col) in columns.iter().enumerate() {
            if norms[j] == 0.0 || support.contains(&j) {
                continue;
            }
            let v = dot_c(col, &residual).norm() / norms[j];
            if v > best_val {
                best_val = v;
                best = Some(j);
            }
        }
        let Some(j) = best else { break };
        support.push(j);
        let Some(new_coef) = least_squares(r, columns, &support) else {
            support.pop();
            converged = false;
            break;
        };
        let new_residual = residual_of(r, columns, &support, &new_coef);
        let new_energy = norm_sqr(&new_residual);
        if res_energy - new_energy < cfg.min_decrease * res_energy {
            support.pop();
            break;
        }
        coef = new_coef;
        residual = new_residual;
        res_energy = new_energy;
    }
    let mut h = vec![Complex64::new(0.0, 0.0); d];
    for (&j, &c) in support.iter().zip(&coef) {
        h[j] = c;
    }
    Ok((h, support.len(), converged))
}

/// Least squares on the chosen columns through the normal equations.
fn least_squares(
    r: &[Complex64],
    columns: &[Vec<Complex64>],
    support: &[usize],
) -> Option<Vec<Complex64>> {
    let s = support.len();
    let mut g = ComplexMatrix::zeros(s, s);
    for a in 0..s {
        for b in 0..=a {
            let v = dot_c(&columns[support[a]], &columns[support[b]]);
            g[(a, b)] = v;
            g[(b, a)] = v.conj();
        }
        g[(a, a)].im = 0.0;
    }
    let rhs: Vec<Complex64> = support.iter().map(|&j| dot_c(&columns[j], r)).collect();
    Cholesky::new_unchecked(&g).ok()?.solve_vec(&rhs).ok()
}

fn residual_of(
    r: &[Complex64],
    columns: &[Vec<Complex64>],
    support: &[usize],
    coef: &[Complex64],
) -> Vec<Complex64> {
    let mut res = r.to_vec();
    for (&j, &c) in support.iter().zip(coef) {
        for (o, &a) in res.iter_mut().zip(&columns[j]) {
            *o -= a * c;
        }
    }
    res
}
