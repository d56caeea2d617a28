//! Complex LASSO `min ‖r − Ωh‖² + λ‖h‖₁` by cyclic coordinate descent.
//!
//! Correlations `Ωᴴ(r − Ωh)` are kept up to date through the Gram matrix, so
//! a coordinate update costs one Gram column. Sweeps alternate between the
//! full index set and the current nonzeros until a full sweep moves nothing.

use num_complex::Complex64;

use super::{check_lengths, per_snapshot, EstimateResult, Method};
use crate::linalg::{norm_sqr, ComplexMatrix};
use crate::sensing::Sensing;
use crate::{OtfsError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LassoConfig {
    pub lambda: f64,
    /// Largest coefficient move in a sweep, relative to `‖h‖∞`, that ends the loop.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for LassoConfig {
    fn default() -> Self {
        Self {
            lambda: 1e-3,
            tol: 1e-6,
            max_sweeps: 300,
        }
    }
}

/// One-snapshot solution with its objective after every sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoPath {
    pub h: Vec<Complex64>,
    pub objective: Vec<f64>,
    pub sweeps: usize,
    pub converged: bool,
}

/// Complex soft threshold: shrinks the magnitude by `t`, keeps the phase.
pub fn soft_threshold(z: Complex64, t: f64) -> Complex64 {
    let mag = z.norm();
    if mag <= t {
        Complex64::new(0.0, 0.0)
    } else {
        z * ((mag - t) / mag)
    }
}

pub fn lasso_objective<S: Sensing + ?Sized>(
    r: &[Complex64],
    dict: &S,
    h: &[Complex64],
    lambda: f64,
) -> f64 {
    let fit = dict.apply(h);
    let res: f64 = r.iter().zip(&fit).map(|(a, b)| (a - b).norm_sqr()).sum();
    res + lambda * h.iter().map(|z| z.norm()).sum::<f64>()
}

/// Runs LASSO on every snapshot independently.
pub fn lasso<S: Sensing + ?Sized>(
    snapshots: &[Vec<Complex64>],
    dict: &S,
    cfg: &LassoConfig,
) -> Result<EstimateResult> {
    check_lengths(snapshots, dict.rows())?;
    validate(cfg)?;
    let gram = dict.gram();
    per_snapshot(snapshots, Method::Lasso, |r| {
        let path = solve(r, dict, &gram, cfg, false);
        Ok((path.h, path.sweeps, path.converged))
    })
}

/// Single-snapshot solve that records the objective after each sweep.
pub fn lasso_path<S: Sensing + ?Sized>(
    r: &[Complex64],
    dict: &S,
    cfg: &LassoConfig,
) -> Result<LassoPath> {
    check_lengths(std::slice::from_ref(&r.to_vec()), dict.rows())?;
    validate(cfg)?;
    Ok(solve(r, dict, &dict.gram(), cfg, true))
}

fn validate(cfg: &LassoConfig) -> Result<()> {
    if !(cfg.lambda >= 0.0) || !(cfg.tol >= 0.0) || cfg.max_sweeps == 0 {
        return Err(OtfsError::InvalidConfig(format!("LASSO settings {cfg:?}")));
    }
    Ok(())
}

fn solve<S: Sensing + ?Sized>(
    r: &[Complex64],
    dict: &S,
    gram: &ComplexMatrix,
    cfg: &LassoConfig,
    record: bool,
) -> LassoPath {
    let d = dict.cols();
    let zero = Complex64::new(0.0, 0.0);
    let mut h = vec![zero; d];
    let mut objective = Vec::new();
    if norm_sqr(r) == 0.0 {
        return LassoPath {
            h,
            objective,
            sweeps: 0,
            converged: true,
        };
    }
    let half = cfg.lambda / 2.0;
    // corr = Ωᴴ(r − Ωh)
    let mut corr = dict.adjoint(r);
    let all: Vec<usize> = (0..d).collect();
    let mut full_pass = true;
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < cfg.max_sweeps {
        sweeps += 1;
        let active: Vec<usize> = if full_pass {
            all.clone()
        } else {
            (0..d).filter(|&j| h[j] != zero).collect()
        };
        let mut max_move: f64 = 0.0;
        for &j in &active {
            let g_jj = gram[(j, j)].re;
            if g_jj <= 0.0 {
                continue;
            }
            let b = corr[j] + h[j] * g_jj;
            let new = soft_threshold(b, half) / g_jj;
            let delta = new - h[j];
            if delta == zero {
                continue;
            }
            h[j] = new;
            max_move = max_move.max(delta.norm());
            let col = gram.row(j);
            // column j of a Hermitian Gram is the conjugate of row j
            for (c, g) in corr.iter_mut().zip(col) {
                *c -= g.conj() * delta;
            }
        }
        if record {
            objective.push(lasso_objective(r, dict, &h, cfg.lambda));
        }
        let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let settled = max_move <= cfg.tol * scale.max(f64::MIN_POSITIVE);
        if settled {
            if full_pass {
                converged = true;
                break;
            }
            full_pass = true;
        } else {
            full_pass = false;
        }
    }
    LassoPath {
        h,
        objective,
        sweeps,
        converged,
    }
}
