//! Linear measurement operators `y = Ω x`.
//!
//! Estimators only touch the sensing matrix through this trait, so a
//! structured dictionary can supply fast Gram and quadratic-form kernels
//! while a plain dense matrix works for small problems and tests.

use num_complex::Complex64;

use crate::linalg::{dot_c, ComplexMatrix};

pub trait Sensing: Sync {
    /// Measurement length.
    fn rows(&self) -> usize;

    /// Number of atoms.
    fn cols(&self) -> usize;

    /// `Ω x`.
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64>;

    /// `Ωᴴ y`.
    fn adjoint(&self, y: &[Complex64]) -> Vec<Complex64>;

    fn column(&self, r: usize) -> Vec<Complex64>;

    /// `Ω diag(γ) Ωᴴ`, exactly Hermitian.
    fn weighted_gram(&self, gamma: &[f64]) -> ComplexMatrix;

    /// `Re diag(Ωᴴ B Ω)` for Hermitian `B`.
    fn quad_diag(&self, b: &ComplexMatrix) -> Vec<f64>;

    /// `Ωᴴ Ω`.
    fn gram(&self) -> ComplexMatrix;

    fn to_dense(&self) -> ComplexMatrix;
}

impl Sensing for ComplexMatrix {
    fn rows(&self) -> usize {
        ComplexMatrix::rows(self)
    }

    fn cols(&self) -> usize {
        ComplexMatrix::cols(self)
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.matvec(x).expect("input length matches the dictionary")
    }

    fn adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        self.adjoint_matvec(y)
            .expect("input length matches the dictionary")
    }

    fn column(&self, r: usize) -> Vec<Complex64> {
        ComplexMatrix::column(self, r)
    }

    fn weighted_gram(&self, gamma: &[f64]) -> ComplexMatrix {
        let (n, d) = (ComplexMatrix::rows(self), ComplexMatrix::cols(self));
        let scaled = ComplexMatrix::from_fn(n, d, |p, r| self[(p, r)] * gamma[r]);
        let mut out = ComplexMatrix::zeros(n, n);
        for p in 0..n {
            for q in 0..=p {
                // Σ_r γ_r Ω[p,r] conj(Ω[q,r])
                let v = dot_c(self.row(q), scaled.row(p));
                out[(p, q)] = v;
                out[(q, p)] = v.conj();
            }
            out[(p, p)].im = 0.0;
        }
        out
    }

    fn quad_diag(&self, b: &ComplexMatrix) -> Vec<f64> {
        let bo = b.matmul(self).expect("square operator of matching size");
        (0..ComplexMatrix::cols(self))
            .map(|r| {
                (0..ComplexMatrix::rows(self))
                    .map(|p| (self[(p, r)].conj() * bo[(p, r)]).re)
                    .sum()
            })
            .collect()
    }

    fn gram(&self) -> ComplexMatrix {
        let t = self.transpose();
        let d = ComplexMatrix::cols(self);
        let mut out = ComplexMatrix::zeros(d, d);
        for a in 0..d {
            for b in 0..=a {
                let v = dot_c(t.row(a), t.row(b));
                out[(a, b)] = v;
                out[(b, a)] = v.conj();
            }
            out[(a, a)].im = 0.0;
        }
        out
    }

    fn to_dense(&self) -> ComplexMatrix {
        self.clone()
    }
}
