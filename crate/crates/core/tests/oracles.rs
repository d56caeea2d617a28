//! Cross-checks against independent dense computations.

use nalgebra::DMatrix;
use otfs_sbl::bounds::{bcrlb_closed_form, prior_fim_mc, VectorGmm};
use otfs_sbl::channel::complex_normal;
use otfs_sbl::estimators::gmm_sbl::{sbl_fit, GmmSblConfig, InitMode};
use otfs_sbl::linalg::{log_det_hpd, ComplexMatrix};
use otfs_sbl::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type CMat = DMatrix<Complex64>;

fn to_na(m: &ComplexMatrix) -> CMat {
    CMat::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

fn random_matrix(rows: usize, cols: usize, var: f64, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_normal(var, rng))
}

fn random_hpd(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let b = random_matrix(n, n, 1.0, rng);
    let mut a = b.conj_transpose().matmul(&b).unwrap();
    a.add_diag(0.5);
    a.symmetrize();
    a
}

fn eigen_log_det(a: &ComplexMatrix) -> f64 {
    to_na(a)
        .symmetric_eigenvalues()
        .iter()
        .map(|l| l.ln())
        .sum()
}

#[test]
fn log_det_matches_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [1, 6, 200] {
        let a = random_hpd(n, &mut rng);
        let want = eigen_log_det(&a);
        let got = log_det_hpd(&a).unwrap();
        assert!(
            (got - want).abs() <= 1e-9 * want.abs().max(1.0),
            "n={n}: {got} vs {want}"
        );
    }
}

#[test]
fn log_det_scales_with_the_dimension() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let a = random_hpd(30, &mut rng);
    let c = 3.7;
    let scaled = a.scale(Complex64::new(c, 0.0));
    let gap = log_det_hpd(&scaled).unwrap() - log_det_hpd(&a).unwrap();
    assert!((gap - 30.0 * c.ln()).abs() < 1e-9);
}

#[test]
fn closed_form_bound_matches_eigenvalue_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let om = random_matrix(12, 20, 1.0 / 12.0, &mut rng);
    let gamma: Vec<f64> = (0..20).map(|r| 0.05 + 0.1 * r as f64).collect();
    for (sigma2, l) in [(1.0, 1), (0.1, 4), (0.01, 10)] {
        let bound = bcrlb_closed_form(&om, sigma2, l, &gamma).unwrap().bound;
        let a = to_na(&om);
        let mut j = a.adjoint() * &a * Complex64::new(l as f64 / sigma2, 0.0);
        for (r, g) in gamma.iter().enumerate() {
            j[(r, r)] += Complex64::new(1.0 / g, 0.0);
        }
        let want: f64 = j.symmetric_eigenvalues().iter().map(|v| 1.0 / v).sum();
        assert!(
            (bound - want).abs() <= 1e-9 * want,
            "σ²={sigma2} L={l}: {bound} vs {want}"
        );
    }
}

#[test]
fn isotropic_bound_matches_gram_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let om = random_matrix(8, 20, 1.0 / 8.0, &mut rng);
    let (sigma2, l, c) = (0.2, 3, 0.5);
    let bound = bcrlb_closed_form(&om, sigma2, l, &[c; 20]).unwrap().bound;
    let a = to_na(&om);
    let gram = a.adjoint() * &a;
    let want: f64 = gram
        .symmetric_eigenvalues()
        .iter()
        .map(|lam| 1.0 / (l as f64 * lam / sigma2 + 1.0 / c))
        .sum();
    assert!((bound - want).abs() <= 1e-9 * want);
}

/// `ln p` of a diagonal complex mixture over real coordinates
/// `(x_1, y_1, x_2, y_2, ...)`.
fn mixture_log_density(
    v: &[f64],
    weights: &[f64],
    means: &[Vec<Complex64>],
    vars: &[Vec<f64>],
) -> f64 {
    let terms: Vec<f64> = weights
        .iter()
        .zip(means)
        .zip(vars)
        .map(|((w, m), g)| {
            let mut s = w.ln();
            for r in 0..m.len() {
                let dx = v[2 * r] - m[r].re;
                let dy = v[2 * r + 1] - m[r].im;
                s += -(dx * dx + dy * dy) / g[r] - (std::f64::consts::PI * g[r]).ln();
            }
            s
        })
        .collect();
    let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln()
}

/// `E[-∂² ln p / ∂h* ∂hᵀ]` by tensor trapezoid quadrature with a
/// finite-difference real Hessian.
fn quadrature_prior_information(
    weights: &[f64],
    means: &[Vec<Complex64>],
    vars: &[Vec<f64>],
    n: usize,
) -> (CMat, f64) {
    let f = |v: &[f64]| mixture_log_density(v, weights, means, vars);
    let (lo, hi) = (-4.8, 4.8);
    let step = (hi - lo) / (n - 1) as f64;
    let e = 1e-3;
    let mut j = CMat::zeros(2, 2);
    let mut mass = 0.0;
    let node = |i: usize| lo + step * i as f64;
    let weight = |i: usize| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let v = [node(a), node(b), node(c), node(d)];
                    let w = weight(a) * weight(b) * weight(c) * weight(d) * step.powi(4);
                    let f0 = f(&v);
                    let p = f0.exp() * w;
                    mass += p;
                    let mut h = [[0.0; 4]; 4];
                    for s in 0..4 {
                        let mut up = v;
                        let mut dn = v;
                        up[s] += e;
                        dn[s] -= e;
                        h[s][s] = (f(&up) - 2.0 * f0 + f(&dn)) / (e * e);
                        for t in s + 1..4 {
                            let mut pp = v;
                            let mut pm = v;
                            let mut mp = v;
                            let mut mm = v;
                            pp[s] += e;
                            pp[t] += e;
                            pm[s] += e;
                            pm[t] -= e;
                            mp[s] -= e;
                            mp[t] += e;
                            mm[s] -= e;
                            mm[t] -= e;
                            h[s][t] = (f(&pp) - f(&pm) - f(&mp) + f(&mm)) / (4.0 * e * e);
                            h[t][s] = h[s][t];
                        }
                    }
                    for pi in 0..2 {
                        for qi in 0..2 {
                            let (xp, yp, xq, yq) = (2 * pi, 2 * pi + 1, 2 * qi, 2 * qi + 1);
                            let entry =
                                Complex64::new(h[xp][xq] + h[yp][yq], h[yp][xq] - h[xp][yq]);
                            j[(pi, qi)] -= entry * (0.25 * p);
                        }
                    }
                }
            }
        }
    }
    (j, mass)
}

#[test]
fn prior_information_matches_quadrature() {
    let weights = vec![0.4, 0.6];
    let means = vec![
        vec![Complex64::new(0.4, 0.2), Complex64::new(0.0, -0.3)],
        vec![Complex64::new(-0.5, 0.0), Complex64::new(0.6, 0.1)],
    ];
    let vars = vec![vec![1.0, 0.5], vec![0.3, 0.8]];
    let (quad, mass) = quadrature_prior_information(&weights, &means, &vars, 32);
    assert!((mass - 1.0).abs() < 1e-6, "quadrature mass {mass}");
    let gmm = VectorGmm::new(weights, means, vars).unwrap();
    let mc = prior_fim_mc(&gmm, 400_000, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
    let scale = quad[(0, 0)].re.max(quad[(1, 1)].re);
    for p in 0..2 {
        for q in 0..2 {
            let gap = (mc.mean[(p, q)] - quad[(p, q)]).norm();
            assert!(
                gap <= 0.02 * scale,
                "entry ({p},{q}): mc {} vs quadrature {}",
                mc.mean[(p, q)],
                quad[(p, q)]
            );
        }
    }
    // the mixture is far from a single Gaussian, so the off-diagonal is not negligible
    assert!(quad[(0, 1)].norm() > 0.01 * scale);
}

/// Textbook SBL EM with dense posteriors.
fn reference_sbl(
    om: &ComplexMatrix,
    snapshots: &[Vec<Complex64>],
    sigma2: f64,
    iters: usize,
) -> Vec<Vec<Complex64>> {
    let a = to_na(om);
    let d = om.cols();
    let l = snapshots.len() as f64;
    let posterior = |gamma: &[f64]| {
        let mut info = a.adjoint() * &a / Complex64::new(sigma2, 0.0);
        for r in 0..d {
            info[(r, r)] += Complex64::new(1.0 / gamma[r], 0.0);
        }
        let sigma = info.cholesky().unwrap().inverse();
        let means: Vec<CMat> = snapshots
            .iter()
            .map(|r| {
                &sigma * a.adjoint() * CMat::from_column_slice(r.len(), 1, r)
                    / Complex64::new(sigma2, 0.0)
            })
            .collect();
        (sigma, means)
    };
    let mut gamma = vec![1.0; d];
    for _ in 0..iters {
        let (sigma, means) = posterior(&gamma);
        for r in 0..d {
            let power: f64 = means.iter().map(|m| m[(r, 0)].norm_sqr()).sum::<f64>() / l;
            gamma[r] = (power + sigma[(r, r)].re).max(1e-12);
        }
    }
    posterior(&gamma)
        .1
        .iter()
        .map(|m| m.iter().cloned().collect())
        .collect()
}

#[test]
fn sbl_matches_textbook_iterations() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let om = random_matrix(12, 24, 1.0 / 12.0, &mut rng);
    let sigma2 = 0.05;
    let mut h = vec![Complex64::new(0.0, 0.0); 24];
    let snapshots: Vec<Vec<Complex64>> = (0..5)
        .map(|_| {
            for s in [3, 11, 17] {
                h[s] = complex_normal(1.0, &mut rng);
            }
            let mut r = om.matvec(&h).unwrap();
            otfs_sbl::channel::add_noise(&mut r, sigma2, &mut rng);
            r
        })
        .collect();
    let iters = 8;
    let cfg = GmmSblConfig {
        max_iter: iters,
        conv_tol: 0.0,
        init: InitMode::Identity,
        ..GmmSblConfig::new(1, sigma2)
    };
    let got = sbl_fit(&snapshots, &om, &cfg).unwrap();
    let want = reference_sbl(&om, &snapshots, sigma2, iters);
    for (g, w) in got.estimates.iter().zip(&want) {
        let err: f64 = g
            .iter()
            .zip(w)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let norm: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(err <= 1e-9 * norm, "relative error {}", err / norm);
    }
}
