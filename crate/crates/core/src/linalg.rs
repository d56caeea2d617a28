//! Dense complex matrices and the Hermitian positive-definite kernels the
//! estimators are built on.
//!
//! Storage is row-major. Everything here is a plain value type; nothing keeps
//! internal state between calls, so matrices can be shared freely between
//! trial workers.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use thiserror::Error;

/// Complex sample vector.
pub type ComplexVector = Vec<Complex64>;

/// Relative tolerance used when checking that an input is Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (max asymmetry {asymmetry:.3e}, scale {scale:.3e})")]
    NotHermitian { asymmetry: f64, scale: f64 },
    #[error("matrix is not positive definite (pivot {pivot} = {value:.3e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting NaN/Inf.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(LinalgError::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<Complex64>]) -> Result<Self, LinalgError> {
        let cols = columns.len();
        let mut m = Self::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(LinalgError::DimensionMismatch(format!(
                    "column {j} has length {}, expected {rows}",
                    c.len()
                )));
            }
            for (i, &z) in c.iter().enumerate() {
                m.data[i * cols + j] = z;
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        let c = self.cols;
        &mut self.data[i * c..(i + 1) * c]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols + j])
            .collect()
    }

    pub fn diag(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols))
            .map(|i| self.data[i * self.cols + i])
            .collect()
    }

    pub fn trace(&self) -> Complex64 {
        self.diag().into_iter().sum()
    }

    pub fn conj_transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
        if x.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} matrix applied to length-{} vector",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows).map(|i| dot_u(self.row(i), x)).collect())
    }

    /// `selfᴴ · x` without forming the adjoint.
    pub fn adjoint_matvec(&self, x: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
        if x.len() != self.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "adjoint of {}x{} applied to length-{} vector",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a.conj() * xi;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn add_diag(&mut self, c: f64) {
        let n = self.rows.min(self.cols);
        for i in 0..n {
            self.data[i * self.cols + i].re += c;
        }
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest `|A_ij - conj(A_ji)|`.
    pub fn hermitian_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Replaces the matrix by `(A + Aᴴ)/2`.
    pub fn symmetrize(&mut self) {
        let n = self.rows;
        for i in 0..n {
            self.data[i * n + i].im = 0.0;
            for j in i + 1..n {
                let avg = (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5;
                self.data[i * n + j] = avg;
                self.data[j * n + i] = avg.conj();
            }
        }
    }

    pub fn check_hermitian(&self) -> Result<(), LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::DimensionMismatch(format!(
                "expected square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let scale = self.max_abs();
        let asymmetry = self.hermitian_asymmetry();
        if asymmetry > HERMITIAN_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(LinalgError::NotHermitian { asymmetry, scale });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Unconjugated dot product `Σ a_i b_i`.
#[inline]
pub fn dot_u(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    // four independent accumulators keep the adds off the critical path
    let mut acc = [0.0f64; 8];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for t in 0..4 {
            acc[2 * t] += x[t].re * y[t].re - x[t].im * y[t].im;
            acc[2 * t + 1] += x[t].re * y[t].im + x[t].im * y[t].re;
        }
    }
    for (x, y) in ra.iter().zip(rb) {
        acc[0] += x.re * y.re - x.im * y.im;
        acc[1] += x.re * y.im + x.im * y.re;
    }
    Complex64::new(
        (acc[0] + acc[2]) + (acc[4] + acc[6]),
        (acc[1] + acc[3]) + (acc[5] + acc[7]),
    )
}

/// Conjugated dot product `Σ conj(a_i) b_i`.
#[inline]
pub fn dot_c(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 8];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for t in 0..4 {
            acc[2 * t] += x[t].re * y[t].re + x[t].im * y[t].im;
            acc[2 * t + 1] += x[t].re * y[t].im - x[t].im * y[t].re;
        }
    }
    for (x, y) in ra.iter().zip(rb) {
        acc[0] += x.re * y.re + x.im * y.im;
        acc[1] += x.re * y.im - x.im * y.re;
    }
    Complex64::new(
        (acc[0] + acc[2]) + (acc[4] + acc[6]),
        (acc[1] + acc[3]) + (acc[5] + acc[7]),
    )
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Lower-triangular Cholesky factor `A = L Lᴴ` of a Hermitian positive
/// definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    // row-major, upper triangle left as zero
    l: Vec<Complex64>,
}

impl Cholesky {
    /// Factors `a` after checking it is Hermitian to [`HERMITIAN_TOL`].
    pub fn new(a: &ComplexMatrix) -> Result<Self, LinalgError> {
        a.check_hermitian()?;
        Self::new_unchecked(a)
    }

    /// Factors `a` reading only its lower triangle.
    pub fn new_unchecked(a: &ComplexMatrix) -> Result<Self, LinalgError> {
        if !a.is_square() {
            return Err(LinalgError::DimensionMismatch(format!(
                "cholesky of {}x{} matrix",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let mut l = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..=i {
                let (li, lj) = if i == j {
                    (&l[i * n..i * n + j], &l[j * n..j * n + j])
                } else {
                    let (head, tail) = l.split_at(i * n);
                    (&tail[..j], &head[j * n..j * n + j])
                };
                // Σ_k L[i,k] conj(L[j,k])
                let s = dot_c(lj, li);
                let v = a[(i, j)] - s;
                if i == j {
                    let d = v.re;
                    if !(d > 0.0) || !d.is_finite() {
                        return Err(LinalgError::NotPositiveDefinite { pivot: i, value: d });
                    }
                    l[i * n + i] = Complex64::new(d.sqrt(), 0.0);
                } else {
                    l[i * n + j] = v / l[j * n + j].re;
                }
            }
        }
        Ok(Self { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// The factor `L` as a dense matrix.
    pub fn factor(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.n,
            cols: self.n,
            data: self.l.clone(),
        }
    }

    pub fn log_det(&self) -> f64 {
        (0..self.n)
            .map(|i| self.l[i * self.n + i].re.ln())
            .sum::<f64>()
            * 2.0
    }

    /// Solves `L y = b` in place.
    pub fn forward_in_place(&self, b: &mut [Complex64]) {
        let n = self.n;
        for i in 0..n {
            let s = dot_u(&self.l[i * n..i * n + i], &b[..i]);
            b[i] = (b[i] - s) / self.l[i * n + i].re;
        }
    }

    /// Solves `Lᴴ x = y` in place.
    pub fn backward_in_place(&self, y: &mut [Complex64]) {
        let n = self.n;
        for i in (0..n).rev() {
            let xi = y[i] / self.l[i * n + i].re;
            y[i] = xi;
            // column i of Lᴴ above the diagonal is conj of row i of L
            for (yk, lik) in y[..i].iter_mut().zip(&self.l[i * n..i * n + i]) {
                *yk -= lik.conj() * xi;
            }
        }
    }

    pub fn solve_vec(&self, b: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
        if b.len() != self.n {
            return Err(LinalgError::DimensionMismatch(format!(
                "rhs of length {} for {}x{} system",
                b.len(),
                self.n,
                self.n
            )));
        }
        let mut x = b.to_vec();
        self.forward_in_place(&mut x);
        self.backward_in_place(&mut x);
        Ok(x)
    }

    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
        if b.rows() != self.n {
            return Err(LinalgError::DimensionMismatch(format!(
                "rhs with {} rows for {}x{} system",
                b.rows(),
                self.n,
                self.n
            )));
        }
        let mut out = ComplexMatrix::zeros(b.rows(), b.cols());
        let mut col = vec![Complex64::new(0.0, 0.0); self.n];
        for j in 0..b.cols() {
            for (i, c) in col.iter_mut().enumerate() {
                *c = b[(i, j)];
            }
            self.forward_in_place(&mut col);
            self.backward_in_place(&mut col);
            for (i, c) in col.iter().enumerate() {
                out[(i, j)] = *c;
            }
        }
        Ok(out)
    }

    /// `L⁻¹` (lower triangular).
    pub fn inverse_factor(&self) -> ComplexMatrix {
        let n = self.n;
        let mut inv = ComplexMatrix::zeros(n, n);
        // row i: W[i,:] = (e_i − Σ_{k<i} L[i,k] W[k,:]) / L[i,i], rows only fill up to the diagonal
        for i in 0..n {
            let (done, rest) = inv.data.split_at_mut(i * n);
            let row = &mut rest[..n];
            row[i] = Complex64::new(1.0, 0.0);
            for k in 0..i {
                let c = self.l[i * n + k];
                if c == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let wk = &done[k * n..k * n + k + 1];
                for (o, w) in row[..=k].iter_mut().zip(wk) {
                    *o -= c * w;
                }
            }
            let d = 1.0 / self.l[i * n + i].re;
            row[..=i].iter_mut().for_each(|z| *z *= d);
        }
        inv
    }

    /// `A⁻¹ = L⁻ᴴ L⁻¹`, exactly Hermitian.
    pub fn inverse(&self) -> ComplexMatrix {
        let n = self.n;
        let w = self.inverse_factor();
        // A⁻¹[i,j] = Σ_{k ≥ max(i,j)} conj(W[k,i]) W[k,j]
        // work on the transpose so the inner loop runs over contiguous rows
        let wt = w.transpose();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let s = dot_c(&wt.row(i)[i..], &wt.row(j)[i..]);
                out[(i, j)] = s;
                out[(j, i)] = s.conj();
            }
            out[(i, i)].im = 0.0;
        }
        out
    }
}

/// Solves `A X = B` for Hermitian positive definite `A`.
pub fn solve_hpd(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    if b.rows() != a.rows() {
        return Err(LinalgError::DimensionMismatch(format!(
            "A is {}x{}, B has {} rows",
            a.rows(),
            a.cols(),
            b.rows()
        )));
    }
    Cholesky::new(a)?.solve(b)
}

/// `ln det A` for Hermitian positive definite `A`, through its Cholesky factor.
pub fn log_det_hpd(a: &ComplexMatrix) -> Result<f64, LinalgError> {
    Ok(Cholesky::new(a)?.log_det())
}

/// Numerically stable `ln Σ exp(x_i)`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|&x| (x - m).exp()).sum::<f64>().ln()
}
