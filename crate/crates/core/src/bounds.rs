//! Bayesian Cramér–Rao references and the mixture-prior sparsity envelope.
//!
//! Information matrices use the complex (Wirtinger) convention, so the data
//! term of `L` snapshots is `(L/σ²) ΩᴴΩ` and a `CN(μ, Γ)` prior contributes
//! `Γ⁻¹`.

use num_complex::Complex64;
use rand::Rng;

use crate::channel::complex_normal;
use crate::linalg::{log_sum_exp, Cholesky, ComplexMatrix};
use crate::sensing::Sensing;
use crate::{OtfsError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FimEstimate {
    pub j_data: ComplexMatrix,
    pub j_prior: ComplexMatrix,
    /// `tr((J_data + J_prior)⁻¹)`.
    pub bound: f64,
    /// Zero for the closed form.
    pub mc_samples: usize,
}

/// Mixture of `K` diagonal complex Gaussians over `C^D`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorGmm {
    weights: Vec<f64>,
    means: Vec<Vec<Complex64>>,
    variances: Vec<Vec<f64>>,
}

impl VectorGmm {
    pub fn new(
        weights: Vec<f64>,
        means: Vec<Vec<Complex64>>,
        variances: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let k = weights.len();
        if k == 0 || means.len() != k || variances.len() != k {
            return Err(OtfsError::InvalidConfig(
                "mixture needs matching weights, means and variances".into(),
            ));
        }
        let d = variances[0].len();
        if d == 0 || means.iter().any(|m| m.len() != d) || variances.iter().any(|v| v.len() != d) {
            return Err(OtfsError::DimensionMismatch(
                "mixture components differ in dimension".into(),
            ));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return Err(OtfsError::InvalidConfig(format!(
                "mixture weights {weights:?} are not a distribution"
            )));
        }
        if variances
            .iter()
            .flatten()
            .any(|v| !(*v > 0.0) || !v.is_finite())
        {
            return Err(OtfsError::InvalidConfig(
                "component variances must be positive".into(),
            ));
        }
        Ok(Self {
            weights,
            means,
            variances,
        })
    }

    /// Zero-mean mixture with per-component variance vectors.
    pub fn zero_mean(weights: Vec<f64>, variances: Vec<Vec<f64>>) -> Result<Self> {
        let d = variances.first().map_or(0, Vec::len);
        let means = vec![vec![Complex64::new(0.0, 0.0); d]; variances.len()];
        Self::new(weights, means, variances)
    }

    pub fn order(&self) -> usize {
        self.weights.len()
    }

    pub fn dim(&self) -> usize {
        self.variances[0].len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn means(&self) -> &[Vec<Complex64>] {
        &self.means
    }

    pub fn variances(&self) -> &[Vec<f64>] {
        &self.variances
    }

    pub fn is_zero_mean(&self) -> bool {
        self.means.iter().flatten().all(|m| m.norm() == 0.0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Complex64> {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut k = self.order() - 1;
        for (i, w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                k = i;
                break;
            }
        }
        self.means[k]
            .iter()
            .zip(&self.variances[k])
            .map(|(&m, &v)| m + complex_normal(v, rng))
            .collect()
    }

    /// `ln ρ_k + ln CN(h; μ_k, Γ_k)` for every component.
    pub fn component_log_densities(&self, h: &[Complex64]) -> Vec<f64> {
        let ln_pi = std::f64::consts::PI.ln();
        (0..self.order())
            .map(|k| {
                let mut s = self.weights[k].ln();
                for ((x, m), v) in h.iter().zip(&self.means[k]).zip(&self.variances[k]) {
                    s -= (x - m).norm_sqr() / v + v.ln() + ln_pi;
                }
                s
            })
            .collect()
    }

    pub fn log_density(&self, h: &[Complex64]) -> f64 {
        log_sum_exp(&self.component_log_densities(h))
    }

    /// Posterior component probabilities `w_k(h)`.
    pub fn local_weights(&self, h: &[Complex64]) -> Vec<f64> {
        let logs = self.component_log_densities(h);
        let lse = log_sum_exp(&logs);
        logs.iter().map(|l| (l - lse).exp()).collect()
    }
}

/// Monte Carlo prior information with batch-mean standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorFim {
    pub mean: ComplexMatrix,
    /// Per-entry standard error; real and imaginary parts estimated separately.
    pub std_err: ComplexMatrix,
    pub samples: usize,
}

const MC_BATCHES: usize = 20;

/// `E[-∇² ln p(h)]` under the mixture, estimated from `samples` draws.
///
/// Per draw the Hessian is `Σ_k w_k (Γ_k⁻¹ − (g_k − b)(g_k − b)ᴴ)` with scores
/// `g_k = −Γ_k⁻¹(h − μ_k)` and `b = Σ_k w_k g_k`. This equals the usual
/// three-term split but never subtracts two large outer products.
pub fn prior_fim_mc<R: Rng + ?Sized>(
    gmm: &VectorGmm,
    samples: usize,
    rng: &mut R,
) -> Result<PriorFim> {
    if samples == 0 {
        return Err(OtfsError::InvalidConfig(
            "Monte Carlo needs at least one sample".into(),
        ));
    }
    let d = gmm.dim();
    let batches = MC_BATCHES.min(samples);
    let mut total = ComplexMatrix::zeros(d, d);
    let mut sq = vec![(0.0, 0.0); d * d];
    let mut done = 0;
    for b in 0..batches {
        let count = samples / batches + usize::from(b < samples % batches);
        let mut acc = ComplexMatrix::zeros(d, d);
        let mut diag = vec![0.0; d];
        for _ in 0..count {
            let h = gmm.sample(rng);
            accumulate_sample(gmm, &h, &mut acc, &mut diag);
        }
        for (r, v) in diag.iter().enumerate() {
            acc[(r, r)] += *v;
        }
        let batch = acc.scale(Complex64::new(1.0 / count as f64, 0.0));
        for (s, z) in sq.iter_mut().zip(batch.as_slice()) {
            s.0 += z.re * z.re;
            s.1 += z.im * z.im;
        }
        total = total.add(&batch.scale(Complex64::new(count as f64, 0.0)))?;
        done += count;
    }
    let mut mean = total.scale(Complex64::new(1.0 / done as f64, 0.0));
    mean.symmetrize();
    // batch means are equally weighted up to one sample of imbalance
    let nb = batches as f64;
    let std_err = if batches > 1 {
        let data = sq
            .iter()
            .zip(mean.as_slice())
            .map(|(s, m)| {
                let vr = ((s.0 / nb - m.re * m.re) * nb / (nb - 1.0)).max(0.0);
                let vi = ((s.1 / nb - m.im * m.im) * nb / (nb - 1.0)).max(0.0);
                Complex64::new((vr / nb).sqrt(), (vi / nb).sqrt())
            })
            .collect();
        ComplexMatrix::from_vec(d, d, data)?
    } else {
        ComplexMatrix::zeros(d, d)
    };
    Ok(PriorFim {
        mean,
        std_err,
        samples: done,
    })
}

fn accumulate_sample(gmm: &VectorGmm, h: &[Complex64], acc: &mut ComplexMatrix, diag: &mut [f64]) {
    let d = h.len();
    let w = gmm.local_weights(h);
    let scores: Vec<Vec<Complex64>> = (0..gmm.order())
        .map(|k| {
            h.iter()
                .zip(&gmm.means[k])
                .zip(&gmm.variances[k])
                .map(|((x, m), v)| -(x - m) / v)
                .collect()
        })
        .collect();
    let mut b = vec![Complex64::new(0.0, 0.0); d];
    for (wk, g) in w.iter().zip(&scores) {
        for (o, z) in b.iter_mut().zip(g) {
            *o += z * wk;
        }
    }
    for k in 0..gmm.order() {
        if w[k] == 0.0 {
            continue;
        }
        for (o, v) in diag.iter_mut().zip(&gmm.variances[k]) {
            *o += w[k] / v;
        }
        let dev: Vec<Complex64> = scores[k].iter().zip(&b).map(|(g, b)| g - b).collect();
        if dev.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
            continue;
        }
        for (p, dp) in dev.iter().enumerate() {
            let a = dp * w[k];
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (o, dq) in acc.row_mut(p).iter_mut().zip(&dev) {
                *o -= a * dq.conj();
            }
        }
    }
}

fn data_information<S: Sensing + ?Sized>(
    dict: &S,
    sigma2: f64,
    snapshots: usize,
) -> Result<ComplexMatrix> {
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(OtfsError::NonPositiveNoise(sigma2));
    }
    if snapshots == 0 {
        return Err(OtfsError::NoSnapshots);
    }
    Ok(dict
        .gram()
        .scale(Complex64::new(snapshots as f64 / sigma2, 0.0)))
}

fn trace_inverse(j: &ComplexMatrix) -> Result<f64> {
    if j.hermitian_asymmetry() > 1e-9 * j.max_abs().max(1.0) {
        return Err(OtfsError::SingularInformation(
            "information matrix is not Hermitian".into(),
        ));
    }
    let mut j = j.clone();
    j.symmetrize();
    let chol =
        Cholesky::new_unchecked(&j).map_err(|e| OtfsError::SingularInformation(e.to_string()))?;
    // tr(J⁻¹) = ‖L⁻¹‖²_F
    Ok(chol.inverse_factor().frobenius_norm_sqr())
}

/// Bound for a zero-mean Gaussian prior with variances `gamma`.
pub fn bcrlb_closed_form<S: Sensing + ?Sized>(
    dict: &S,
    sigma2: f64,
    snapshots: usize,
    gamma: &[f64],
) -> Result<FimEstimate> {
    if gamma.len() != dict.cols() {
        return Err(OtfsError::DimensionMismatch(format!(
            "{} variances for {} atoms",
            gamma.len(),
            dict.cols()
        )));
    }
    if let Some(g) = gamma.iter().find(|g| !(**g > 0.0)) {
        return Err(OtfsError::SingularInformation(format!(
            "prior variance {g}"
        )));
    }
    let j_data = data_information(dict, sigma2, snapshots)?;
    let j_prior = ComplexMatrix::from_real_diag(&gamma.iter().map(|g| 1.0 / g).collect::<Vec<_>>());
    let bound = trace_inverse(&j_data.add(&j_prior)?)?;
    Ok(FimEstimate {
        j_data,
        j_prior,
        bound,
        mc_samples: 0,
    })
}

/// Bound with the prior information of a mixture estimated by Monte Carlo.
pub fn bcrlb_gmm_mc<S: Sensing + ?Sized, R: Rng + ?Sized>(
    dict: &S,
    sigma2: f64,
    snapshots: usize,
    gmm: &VectorGmm,
    samples: usize,
    rng: &mut R,
) -> Result<FimEstimate> {
    if gmm.dim() != dict.cols() {
        return Err(OtfsError::DimensionMismatch(format!(
            "{}-dim prior for {} atoms",
            gmm.dim(),
            dict.cols()
        )));
    }
    let j_data = data_information(dict, sigma2, snapshots)?;
    let prior = prior_fim_mc(gmm, samples, rng)?;
    let bound = trace_inverse(&j_data.add(&prior.mean)?)?;
    Ok(FimEstimate {
        j_data,
        j_prior: prior.mean,
        bound,
        mc_samples: prior.samples,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeReport {
    /// `C = Σ_k ρ_k C_k`.
    pub constant: f64,
    pub points: usize,
    pub violations: usize,
    /// Largest `p(h) / (C Π|h_r|⁻²)` seen; at most one when there are no violations.
    pub max_ratio: f64,
}

/// Per-component envelope constant. With `x = |h|²/γ` each factor
/// `e^{−x}/(πγ)` is at most `1/(πe|h|²)` because `x e^{−x} ≤ e⁻¹`.
pub fn envelope_constant(dim: usize) -> f64 {
    (std::f64::consts::PI * std::f64::consts::E).powi(-(dim as i32))
}

/// Checks `p(h) ≤ C Π_r |h_r|⁻²` at every point, in the log domain.
pub fn theorem1_bound_check(gmm: &VectorGmm, points: &[Vec<Complex64>]) -> Result<EnvelopeReport> {
    if !gmm.is_zero_mean() {
        return Err(OtfsError::InvalidConfig(
            "the sparsity envelope needs zero-mean components".into(),
        ));
    }
    let d = gmm.dim();
    // every component has the same constant, so the mixture constant equals it
    let constant: f64 = gmm.weights.iter().map(|w| w * envelope_constant(d)).sum();
    let ln_c = constant.ln();
    let mut violations = 0;
    let mut max_log_ratio = f64::NEG_INFINITY;
    for h in points {
        if h.len() != d {
            return Err(OtfsError::DimensionMismatch(format!(
                "point of length {} for dimension {d}",
                h.len()
            )));
        }
        let ln_rhs = ln_c - h.iter().map(|z| z.norm_sqr().ln()).sum::<f64>();
        let log_ratio = gmm.log_density(h) - ln_rhs;
        // log p is accurate to a few ulps of its magnitude
        if log_ratio > 1e-12 * (1.0 + ln_rhs.abs()) {
            violations += 1;
        }
        max_log_ratio = max_log_ratio.max(log_ratio);
    }
    Ok(EnvelopeReport {
        constant,
        points: points.len(),
        violations,
        max_ratio: max_log_ratio.exp(),
    })
}
