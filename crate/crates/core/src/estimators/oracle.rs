//! Support-aware MMSE benchmark.

use num_complex::Complex64;

use super::{check_lengths, per_snapshot, EstimateResult, Method};
use crate::linalg::{dot_c, Cholesky, ComplexMatrix};
use crate::sensing::Sensing;
use crate::{OtfsError, Result};

/// MMSE estimate with the true support and unit prior variance on it.
pub fn oracle_mmse<S: Sensing + ?Sized>(
    snapshots: &[Vec<Complex64>],
    dict: &S,
    support: &[usize],
    sigma2: f64,
) -> Result<EstimateResult> {
    oracle_mmse_with_prior(snapshots, dict, support, sigma2, 1.0)
}

/// `(Ω_Sᴴ Ω_S + (σ²/v) I)⁻¹ Ω_Sᴴ r` on the support `S`, zero elsewhere.
pub fn oracle_mmse_with_prior<S: Sensing + ?Sized>(
    snapshots: &[Vec<Complex64>],
    dict: &S,
    support: &[usize],
    sigma2: f64,
    prior_var: f64,
) -> Result<EstimateResult> {
    check_lengths(snapshots, dict.rows())?;
    if support.is_empty() {
        return Err(OtfsError::EmptySupport);
    }
    if !(sigma2 >= 0.0) || !(prior_var > 0.0) {
        return Err(OtfsError::InvalidConfig(format!(
            "noise {sigma2} and prior variance {prior_var}"
        )));
    }
    let d = dict.cols();
    if let Some(&j) = support.iter().find(|&&j| j >= d) {
        return Err(OtfsError::OutOfGrid(format!(
            "support index {j} with {d} atoms"
        )));
    }
    let columns: Vec<Vec<Complex64>> = support.iter().map(|&j| dict.column(j)).collect();
    let s = support.len();
    let mut info = ComplexMatrix::zeros(s, s);
    for a in 0..s {
        for b in 0..=a {
            let v = dot_c(&columns[a], &columns[b]);
            info[(a, b)] = v;
            info[(b, a)] = v.conj();
        }
        info[(a, a)].im = 0.0;
    }
    info.add_diag(sigma2 / prior_var);
    let chol = Cholesky::new_unchecked(&info)
        .map_err(|e| OtfsError::SingularInformation(e.to_string()))?;
    per_snapshot(snapshots, Method::OracleMmse, |r| {
        let rhs: Vec<Complex64> = columns.iter().map(|c| dot_c(c, r)).collect();
        let x = chol.solve_vec(&rhs)?;
        let mut h = vec![Complex64::new(0.0, 0.0); d];
        for (&j, v) in support.iter().zip(x) {
            h[j] = v;
        }
        Ok((h, 1, true))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::complex_normal;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_full_support_halves() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r: Vec<Complex64> = (0..5).map(|_| complex_normal(1.0, &mut rng)).collect();
        let all: Vec<usize> = (0..5).collect();
        let est = oracle_mmse(
            std::slice::from_ref(&r),
            &ComplexMatrix::identity(5),
            &all,
            1.0,
        )
        .unwrap();
        for (h, z) in est.estimates[0].iter().zip(&r) {
            assert!((h - z / 2.0).norm() < 1e-15);
        }
    }

    #[test]
    fn vanishing_noise_gives_least_squares() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let om = ComplexMatrix::from_fn(12, 20, |_, _| complex_normal(1.0, &mut rng));
        let r: Vec<Complex64> = (0..12).map(|_| complex_normal(1.0, &mut rng)).collect();
        let support = [1, 7, 11];
        let est = oracle_mmse(std::slice::from_ref(&r), &om, &support, 1e-14).unwrap();
        // pseudoinverse via the normal equations, solved densely
        let sub = ComplexMatrix::from_columns(
            12,
            &support.iter().map(|&j| om.column(j)).collect::<Vec<_>>(),
        )
        .unwrap();
        let g = sub.conj_transpose().matmul(&sub).unwrap();
        let rhs = ComplexMatrix::from_vec(3, 1, sub.adjoint_matvec(&r).unwrap()).unwrap();
        let ls = crate::linalg::solve_hpd(&g, &rhs).unwrap();
        for (k, &j) in support.iter().enumerate() {
            assert!((est.estimates[0][j] - ls[(k, 0)]).norm() < 1e-9);
        }
    }

    #[test]
    fn one_sparse_high_snr_is_accurate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let om = ComplexMatrix::from_fn(40, 80, |_, _| complex_normal(1.0, &mut rng));
        let mut h = vec![Complex64::new(0.0, 0.0); 80];
        h[33] = complex_normal(1.0, &mut rng);
        let sigma2 = 1e-6;
        let mut r = om.matvec(&h).unwrap();
        r.iter_mut()
            .for_each(|z| *z += complex_normal(sigma2, &mut rng));
        let est = oracle_mmse(&[r], &om, &[33], sigma2).unwrap();
        let err: f64 = est.estimates[0]
            .iter()
            .zip(&h)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let nmse_db = 10.0 * (err / h[33].norm_sqr()).log10();
        assert!(nmse_db < -40.0, "{nmse_db}");
    }

    #[test]
    fn empty_support_is_rejected() {
        let om = ComplexMatrix::identity(3);
        let r = vec![vec![Complex64::new(1.0, 0.0); 3]];
        assert!(matches!(
            oracle_mmse(&r, &om, &[], 1.0),
            Err(OtfsError::EmptySupport)
        ));
        assert!(matches!(
            oracle_mmse(&r, &om, &[5], 1.0),
            Err(OtfsError::OutOfGrid(_))
        ));
    }
}
