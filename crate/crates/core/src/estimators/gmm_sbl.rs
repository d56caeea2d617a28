//! Gaussian-mixture sparse Bayesian learning.
//!
//! Each snapshot `r_i = Ω h_i + η_i` is explained by one of `K` zero-mean
//! diagonal Gaussian priors `CN(0, Γ_k)`. EM alternates between per-component
//! Gaussian posteriors with their responsibilities and closed-form updates of
//! the variance vectors `γ_k` and weights `ρ_k`. `K = 1` is classic SBL.

use num_complex::Complex64;

use super::{check_lengths, EstimateResult, Method};
use crate::linalg::{log_sum_exp, norm_sqr, Cholesky, ComplexMatrix};
use crate::sensing::Sensing;
use crate::{OtfsError, Result};

/// Starting variances of the mixture components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitMode {
    /// Every `Γ_k` starts at the identity. Identical components stay
    /// identical under EM, so this reduces any `K` to plain SBL.
    Identity,
    /// `Γ_k` starts at `s_k I` with `s_k` log-spaced over `[1/2, 2]`, which
    /// breaks the symmetry between components. `K = 1` gets the identity.
    Spread,
    /// `Γ_k` starts at `c_k I`, where `c_k` is the `(k + ½)/K` quantile of
    /// the per-snapshot level `(‖r_i‖² − N_p σ²) / ‖Ω‖²_F`. Components start
    /// on the data scale and split the snapshots by received power.
    PowerQuantile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmmSblConfig {
    /// Mixture order `K`.
    pub components: usize,
    /// EM iteration cap.
    pub max_iter: usize,
    pub gamma_floor: f64,
    /// Relative evidence change that counts as converged.
    pub conv_tol: f64,
    /// Known noise variance.
    pub sigma2: f64,
    pub init: InitMode,
}

impl GmmSblConfig {
    pub fn new(components: usize, sigma2: f64) -> Self {
        Self {
            components,
            max_iter: 100,
            gamma_floor: 1e-12,
            conv_tol: 1e-6,
            sigma2,
            init: InitMode::Spread,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.components == 0 || self.max_iter == 0 {
            return Err(OtfsError::InvalidConfig(
                "mixture order and iteration cap must be positive".into(),
            ));
        }
        if !(self.gamma_floor > 0.0) {
            return Err(OtfsError::InvalidConfig(format!(
                "gamma floor {} must be positive",
                self.gamma_floor
            )));
        }
        if !(self.sigma2 > 0.0) || !self.sigma2.is_finite() {
            return Err(OtfsError::NonPositiveNoise(self.sigma2));
        }
        if !(self.conv_tol >= 0.0) {
            return Err(OtfsError::InvalidConfig(format!(
                "convergence tolerance {}",
                self.conv_tol
            )));
        }
        Ok(())
    }

    fn initial_scale(&self, k: usize) -> f64 {
        match self.init {
            InitMode::Identity | InitMode::PowerQuantile => 1.0,
            InitMode::Spread if self.components == 1 => 1.0,
            InitMode::Spread => {
                let t = k as f64 / (self.components - 1) as f64;
                2f64.powf(2.0 * t - 1.0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmmSblState {
    /// `γ_k`, one variance vector per component.
    pub gammas: Vec<Vec<f64>>,
    /// `ρ_k`.
    pub weights: Vec<f64>,
    /// `μ_{i,k}`, indexed `[component][snapshot]`.
    pub means: Vec<Vec<Vec<Complex64>>>,
    /// `diag Σ_k`.
    pub post_var: Vec<Vec<f64>>,
    /// `π_{i,k}`, indexed `[snapshot][component]`.
    pub resp: Vec<Vec<f64>>,
    /// `ℓ_{i,k} = ln CN(r_i; 0, A_k)`, indexed `[snapshot][component]`.
    pub log_lik: Vec<Vec<f64>>,
    /// Incomplete-data log-likelihood after every E-step.
    pub evidence: Vec<f64>,
}

impl GmmSblState {
    /// Starting state for the scale-free modes; [`InitMode::PowerQuantile`]
    /// needs the data and falls back to the identity here.
    pub fn initial(cfg: &GmmSblConfig, atoms: usize, snapshots: usize) -> Self {
        let scales: Vec<f64> = (0..cfg.components).map(|c| cfg.initial_scale(c)).collect();
        Self::with_scales(&scales, atoms, snapshots)
    }

    /// Starting state of a fit on `snapshots`.
    pub fn initial_for<S: Sensing + ?Sized>(
        cfg: &GmmSblConfig,
        snapshots: &[Vec<Complex64>],
        dict: &S,
    ) -> Self {
        let scales = match cfg.init {
            InitMode::PowerQuantile => power_quantiles(snapshots, dict, cfg),
            _ => (0..cfg.components).map(|c| cfg.initial_scale(c)).collect(),
        };
        Self::with_scales(&scales, dict.cols(), snapshots.len())
    }

    /// Every component `k` starts at `scales[k] · I` with equal weights.
    pub fn with_scales(scales: &[f64], atoms: usize, snapshots: usize) -> Self {
        let k = scales.len();
        Self {
            gammas: scales.iter().map(|&s| vec![s; atoms]).collect(),
            weights: vec![1.0 / k as f64; k],
            means: vec![vec![vec![Complex64::new(0.0, 0.0); atoms]; snapshots]; k],
            post_var: vec![vec![0.0; atoms]; k],
            resp: vec![vec![1.0 / k as f64; k]; snapshots],
            log_lik: vec![vec![0.0; k]; snapshots],
            evidence: Vec::new(),
        }
    }

    pub fn components(&self) -> usize {
        self.weights.len()
    }

    pub fn snapshots(&self) -> usize {
        self.resp.len()
    }

    /// Conditional-mean estimate `Σ_k π_{i,k} μ_{i,k}` of every snapshot.
    pub fn conditional_means(&self) -> Vec<Vec<Complex64>> {
        let atoms = self.gammas.first().map_or(0, Vec::len);
        (0..self.snapshots())
            .map(|i| {
                let mut h = vec![Complex64::new(0.0, 0.0); atoms];
                for k in 0..self.components() {
                    let w = self.resp[i][k];
                    if w == 0.0 {
                        continue;
                    }
                    for (o, &m) in h.iter_mut().zip(&self.means[k][i]) {
                        *o += m * w;
                    }
                }
                h
            })
            .collect()
    }
}

fn power_quantiles<S: Sensing + ?Sized>(
    snapshots: &[Vec<Complex64>],
    dict: &S,
    cfg: &GmmSblConfig,
) -> Vec<f64> {
    let ones = vec![1.0; dict.cols()];
    let gram = dict.weighted_gram(&ones);
    let frob: f64 = (0..gram.rows()).map(|p| gram[(p, p)].re).sum();
    let n_p = dict.rows() as f64;
    let mut levels: Vec<f64> = snapshots
        .iter()
        .map(|r| {
            let excess = (norm_sqr(r) - n_p * cfg.sigma2).max(n_p * cfg.sigma2 * 1e-3);
            (excess / frob).max(cfg.gamma_floor)
        })
        .collect();
    levels.sort_by(f64::total_cmp);
    let k = cfg.components;
    (0..k)
        .map(|c| {
            // linear interpolation between order statistics
            let pos = ((c as f64 + 0.5) / k as f64 * levels.len() as f64 - 0.5)
                .clamp(0.0, (levels.len() - 1) as f64);
            let lo = pos.floor() as usize;
            let hi = (lo + 1).min(levels.len() - 1);
            let t = pos - lo as f64;
            levels[lo] * (1.0 - t) + levels[hi] * t
        })
        .collect()
}

/// Recomputes posteriors, log-densities and responsibilities for the current
/// hyperparameters and appends the evidence to the trace.
pub fn e_step<S: Sensing + ?Sized>(
    state: &mut GmmSblState,
    snapshots: &[Vec<Complex64>],
    dict: &S,
    cfg: &GmmSblConfig,
) -> Result<f64> {
    let n_p = dict.rows();
    let norm = n_p as f64 * std::f64::consts::PI.ln();
    for k in 0..state.components() {
        let gamma = &state.gammas[k];
        let mut a = dict.weighted_gram(gamma);
        a.add_diag(cfg.sigma2);
        let chol = Cholesky::new_unchecked(&a)
            .map_err(|e| OtfsError::NumericalBreakdown(format!("component {k}: {e}")))?;
        let log_det = chol.log_det();
        for (i, r) in snapshots.iter().enumerate() {
            let u = chol.solve_vec(r)?;
            let quad: f64 = r.iter().zip(&u).map(|(a, b)| (a.conj() * b).re).sum();
            let back = dict.adjoint(&u);
            let mu = &mut state.means[k][i];
            for ((m, b), &g) in mu.iter_mut().zip(&back).zip(gamma) {
                *m = b * g;
            }
            state.log_lik[i][k] = -(quad + log_det + norm);
        }
        let q = dict.quad_diag(&chol.inverse());
        for ((v, &g), qr) in state.post_var[k].iter_mut().zip(gamma).zip(q) {
            *v = (g - g * g * qr).max(0.0);
        }
    }
    let mut evidence = 0.0;
    let log_w: Vec<f64> = state.weights.iter().map(|w| w.ln()).collect();
    for i in 0..state.snapshots() {
        let joint: Vec<f64> = state.log_lik[i]
            .iter()
            .zip(&log_w)
            .map(|(l, w)| l + w)
            .collect();
        let lse = log_sum_exp(&joint);
        if !lse.is_finite() {
            return Err(OtfsError::NumericalBreakdown(format!(
                "snapshot {i} has non-finite evidence"
            )));
        }
        for (p, j) in state.resp[i].iter_mut().zip(&joint) {
            *p = (j - lse).exp();
        }
        let total: f64 = state.resp[i].iter().sum();
        state.resp[i].iter_mut().for_each(|p| *p /= total);
        evidence += lse;
    }
    state.evidence.push(evidence);
    Ok(evidence)
}

/// Responsibility-weighted variance and weight updates.
pub fn m_step(state: &mut GmmSblState, cfg: &GmmSblConfig) {
    let l = state.snapshots() as f64;
    for k in 0..state.components() {
        let n_k: f64 = state.resp.iter().map(|r| r[k]).sum();
        state.weights[k] = n_k / l;
        // an empty component keeps its variances
        if n_k <= 1e-12 {
            continue;
        }
        let gamma = &mut state.gammas[k];
        gamma.iter_mut().for_each(|g| *g = 0.0);
        for (i, resp) in state.resp.iter().enumerate() {
            let w = resp[k];
            if w == 0.0 {
                continue;
            }
            for (g, m) in gamma.iter_mut().zip(&state.means[k][i]) {
                *g += w * m.norm_sqr();
            }
        }
        for (g, &v) in gamma.iter_mut().zip(&state.post_var[k]) {
            *g = (*g / n_k + v).max(cfg.gamma_floor);
        }
    }
    let total: f64 = state.weights.iter().sum();
    state.weights.iter_mut().for_each(|w| *w /= total);
}

/// EM fit reporting the state after every E-step to `observe`.
pub fn fit_observed<S: Sensing + ?Sized>(
    snapshots: &[Vec<Complex64>],
    dict: &S,
    cfg: &GmmSblConfig,
    mut observe: impl FnMut(usize, &GmmSblState),
) -> Result<(EstimateResult, GmmSblState)> {
    cfg.validate()?;
    check_lengths(snapshots, dict.rows())?;
    let mut state = GmmSblState::initial_for(cfg, snapshots, dict);
    let mut converged = false;
    let mut iterations = 0;
    let mut prev = f64::NAN;
    for t in 0..cfg.max_iter {
        let ev = e_step(&mut state, snapshots, dict, cfg)?;
        observe(t, &state);
        if t > 0 && (ev - prev).abs() <= cfg.conv_tol * prev.abs() {
            converged = true;
            break;
        }
        prev = ev;
        m_step(&mut state, cfg);
        iterations += 1;
    }
    if !converged {
        e_step(&mut state, snapshots, dict, cfg)?;
        observe(cfg.max_iter, &state);
    }
    let method = if cfg.components == 1 {
        Method::Sbl
    } else {
        Method::GmmSbl
    };
    let result = EstimateResult {
        estimates: state.conditional_means(),
        iterations,
        converged,
        method,
    };
    Ok((result, state))
}

pub fn gmm_sbl_fit<S: Sensing + ?Sized>(
    snapshots: &[Vec<Complex64>],
    dict: &S,
    cfg: &GmmSblConfig,
) -> Result<(EstimateResult, GmmSblState)> {
    fit_observed(snapshots, dict, cfg, |_, _| {})
}

/// Single-Gaussian SBL: the mixture fit with `K = 1`.
pub fn sbl_fit<S: Sensing + ?Sized>(
    snapshots: &[Vec<Complex64>],
    dict: &S,
    cfg: &GmmSblConfig,
) -> Result<EstimateResult> {
    let cfg = GmmSblConfig {
        components: 1,
        ..cfg.clone()
    };
    Ok(gmm_sbl_fit(snapshots, dict, &cfg)?.0)
}

/// Full posterior covariance `Γ - Γ Ωᴴ A⁻¹ Ω Γ`, dense.
pub fn posterior_covariance<S: Sensing + ?Sized>(
    dict: &S,
    gamma: &[f64],
    sigma2: f64,
) -> Result<ComplexMatrix> {
    let om = dict.to_dense();
    let mut a = dict.weighted_gram(gamma);
    a.add_diag(sigma2);
    let chol = Cholesky::new(&a)?;
    let og = ComplexMatrix::from_fn(om.rows(), om.cols(), |p, r| om[(p, r)] * gamma[r]);
    let x = chol.solve(&og)?;
    let mut out = og
        .conj_transpose()
        .matmul(&x)?
        .scale(Complex64::new(-1.0, 0.0));
    for (r, &g) in gamma.iter().enumerate() {
        out[(r, r)] += g;
    }
    out.symmetrize();
    Ok(out)
}
