//! OTFS frame geometry and the DD / TF / time-domain transforms.
//!
//! Grids are `M x N` matrices with the delay (or frequency) index along rows
//! and the Doppler (or time) index along columns. Time-domain blocks are the
//! column-major vectorisation of an `M x N` sample matrix, so sample `g`
//! sits at row `g % M`, column `g / M`. All DFTs are unitary.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::linalg::ComplexMatrix;
use crate::{OtfsError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameConfig {
    /// Subcarriers (delay bins).
    pub m: usize,
    /// Symbols (Doppler bins).
    pub n: usize,
    /// Subcarrier spacing in Hz.
    pub delta_f: f64,
    /// Symbol duration in seconds.
    pub symbol_time: f64,
    /// Cyclic prefix length in samples.
    pub cp_len: usize,
    /// Carrier frequency in Hz.
    pub carrier_hz: f64,
}

impl Default for FrameConfig {
    fn default() -> Self {
        Self {
            m: 32,
            n: 32,
            delta_f: 15e3,
            symbol_time: 1.0 / 15e3,
            cp_len: 16,
            carrier_hz: 4e9,
        }
    }
}

impl FrameConfig {
    /// A frame with `T = 1/Δf` and the default spacing and carrier.
    pub fn with_grid(m: usize, n: usize, cp_len: usize) -> Result<Self> {
        let cfg = Self {
            m,
            n,
            cp_len,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 || self.cp_len == 0 {
            return Err(OtfsError::InvalidConfig(format!(
                "M, N and the CP length must be positive (M={}, N={}, P={})",
                self.m, self.n, self.cp_len
            )));
        }
        if self.cp_len >= self.block_len() {
            return Err(OtfsError::CpTooLong {
                cp: self.cp_len,
                len: self.block_len(),
            });
        }
        if (self.symbol_time * self.delta_f - 1.0).abs() > 1e-12 {
            return Err(OtfsError::InvalidConfig(format!(
                "T*delta_f must equal 1, got {}",
                self.symbol_time * self.delta_f
            )));
        }
        Ok(())
    }

    /// `MN`, the number of time-domain samples per frame.
    pub fn block_len(&self) -> usize {
        self.m * self.n
    }

    /// Occupied bandwidth `MΔf`.
    pub fn bandwidth(&self) -> f64 {
        self.m as f64 * self.delta_f
    }

    /// Frame duration `NT`.
    pub fn frame_duration(&self) -> f64 {
        self.n as f64 * self.symbol_time
    }

    /// Per-sample phase step `2π/(MN)` of a unit Doppler index.
    pub fn doppler_phase_base(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.block_len() as f64
    }
}

/// Symbols on the delay-Doppler grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DdFrame(pub ComplexMatrix);

/// Samples on the time-frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TfFrame(pub ComplexMatrix);

impl DdFrame {
    pub fn zeros(cfg: &FrameConfig) -> Self {
        Self(ComplexMatrix::zeros(cfg.m, cfg.n))
    }

    /// Builds a frame from a column-major vector of length `MN`.
    pub fn from_vec(cfg: &FrameConfig, v: &[Complex64]) -> Result<Self> {
        Ok(Self(unvec(v, cfg.m, cfg.n)?))
    }

    pub fn to_vec(&self) -> Vec<Complex64> {
        vec_col_major(&self.0)
    }

    pub fn grid(&self) -> &ComplexMatrix {
        &self.0
    }
}

impl TfFrame {
    pub fn grid(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// Diagonal transmit and receive pulse windows.
///
/// Rectangular pulses give identity windows; any other per-sample diagonal
/// can be substituted through the `*_shaped` variants.
#[derive(Debug, Clone, PartialEq)]
pub struct Pulses {
    pub tx: Vec<Complex64>,
    pub rx: Vec<Complex64>,
}

impl Pulses {
    pub fn rectangular(m: usize) -> Self {
        let one = vec![Complex64::new(1.0, 0.0); m];
        Self {
            tx: one.clone(),
            rx: one,
        }
    }

    fn check(&self, m: usize) -> Result<()> {
        if self.tx.len() != m || self.rx.len() != m {
            return Err(OtfsError::DimensionMismatch(format!(
                "pulse windows of length {}/{} for M={m}",
                self.tx.len(),
                self.rx.len()
            )));
        }
        Ok(())
    }
}

/// Column-major vectorisation.
pub fn vec_col_major(a: &ComplexMatrix) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.rows() * a.cols());
    for j in 0..a.cols() {
        for i in 0..a.rows() {
            out.push(a[(i, j)]);
        }
    }
    out
}

/// Inverse of [`vec_col_major`].
pub fn unvec(v: &[Complex64], rows: usize, cols: usize) -> Result<ComplexMatrix> {
    if v.len() != rows * cols {
        return Err(OtfsError::DimensionMismatch(format!(
            "vector of length {} for a {rows}x{cols} grid",
            v.len()
        )));
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| v[i + rows * j]))
}

#[derive(Clone, Copy, PartialEq)]
enum Dir {
    Forward,
    Inverse,
}

fn plan(len: usize, dir: Dir) -> std::sync::Arc<dyn Fft<f64>> {
    let mut planner = FftPlanner::new();
    match dir {
        Dir::Forward => planner.plan_fft_forward(len),
        Dir::Inverse => planner.plan_fft_inverse(len),
    }
}

/// Unitary DFT of every column (along the row index).
fn dft_columns(a: &mut ComplexMatrix, dir: Dir) {
    let (rows, cols) = (a.rows(), a.cols());
    let fft = plan(rows, dir);
    let scale = 1.0 / (rows as f64).sqrt();
    let mut buf = vec![Complex64::new(0.0, 0.0); rows];
    for j in 0..cols {
        for i in 0..rows {
            buf[i] = a[(i, j)];
        }
        fft.process(&mut buf);
        for i in 0..rows {
            a[(i, j)] = buf[i] * scale;
        }
    }
}

/// Unitary DFT of every row (along the column index).
fn dft_rows(a: &mut ComplexMatrix, dir: Dir) {
    let cols = a.cols();
    let fft = plan(cols, dir);
    let scale = 1.0 / (cols as f64).sqrt();
    for i in 0..a.rows() {
        let row = a.row_mut(i);
        fft.process(row);
        row.iter_mut().for_each(|z| *z *= scale);
    }
}

/// Unitary DFT along the `N` axis of a column-major `M x N` block, applied
/// in place. `Forward` realises `(F_N ⊗ I_M)`, `Inverse` realises `(F_Nᴴ ⊗ I_M)`.
pub(crate) fn doppler_axis_dft(v: &mut [Complex64], m: usize, n: usize, forward: bool) {
    let fft = plan(n, if forward { Dir::Forward } else { Dir::Inverse });
    let scale = 1.0 / (n as f64).sqrt();
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for row in 0..m {
        for (c, b) in buf.iter_mut().enumerate() {
            *b = v[row + m * c];
        }
        fft.process(&mut buf);
        for (c, b) in buf.iter().enumerate() {
            v[row + m * c] = b * scale;
        }
    }
}

fn check_grid(a: &ComplexMatrix, cfg: Option<&FrameConfig>) -> Result<()> {
    if let Some(cfg) = cfg {
        if a.rows() != cfg.m || a.cols() != cfg.n {
            return Err(OtfsError::DimensionMismatch(format!(
                "{}x{} grid for an {}x{} frame",
                a.rows(),
                a.cols(),
                cfg.m,
                cfg.n
            )));
        }
    }
    Ok(())
}

/// `X_TF = F_M X_DD F_Nᴴ`.
pub fn isfft(x: &DdFrame) -> TfFrame {
    let mut a = x.0.clone();
    dft_columns(&mut a, Dir::Forward);
    dft_rows(&mut a, Dir::Inverse);
    TfFrame(a)
}

/// `Y_DD = F_Mᴴ Y_TF F_N`.
pub fn sfft(y: &TfFrame) -> DdFrame {
    let mut a = y.0.clone();
    dft_columns(&mut a, Dir::Inverse);
    dft_rows(&mut a, Dir::Forward);
    DdFrame(a)
}

/// `isfft` with a frame-size check.
pub fn isfft_checked(x: &DdFrame, cfg: &FrameConfig) -> Result<TfFrame> {
    check_grid(&x.0, Some(cfg))?;
    Ok(isfft(x))
}

/// `sfft` with a frame-size check.
pub fn sfft_checked(y: &TfFrame, cfg: &FrameConfig) -> Result<DdFrame> {
    check_grid(&y.0, Some(cfg))?;
    Ok(sfft(y))
}

/// Transmit samples `s = vec(G_tx X_DD F_Nᴴ)` for rectangular pulses.
pub fn modulate(x: &DdFrame, cfg: &FrameConfig) -> Result<Vec<Complex64>> {
    modulate_shaped(x, cfg, &Pulses::rectangular(cfg.m))
}

pub fn modulate_shaped(x: &DdFrame, cfg: &FrameConfig, pulses: &Pulses) -> Result<Vec<Complex64>> {
    check_grid(&x.0, Some(cfg))?;
    pulses.check(cfg.m)?;
    let mut s = x.to_vec();
    doppler_axis_dft(&mut s, cfg.m, cfg.n, false);
    for (g, z) in s.iter_mut().enumerate() {
        *z *= pulses.tx[g % cfg.m];
    }
    Ok(s)
}

/// DD grid `Y_DD = G_rx R F_N` of a received block for rectangular pulses.
pub fn demodulate(r: &[Complex64], cfg: &FrameConfig) -> Result<DdFrame> {
    demodulate_shaped(r, cfg, &Pulses::rectangular(cfg.m))
}

pub fn demodulate_shaped(r: &[Complex64], cfg: &FrameConfig, pulses: &Pulses) -> Result<DdFrame> {
    if r.len() != cfg.block_len() {
        return Err(OtfsError::DimensionMismatch(format!(
            "received block of length {} for MN={}",
            r.len(),
            cfg.block_len()
        )));
    }
    pulses.check(cfg.m)?;
    let mut y: Vec<Complex64> = r
        .iter()
        .enumerate()
        .map(|(g, &z)| z * pulses.rx[g % cfg.m])
        .collect();
    doppler_axis_dft(&mut y, cfg.m, cfg.n, true);
    DdFrame::from_vec(cfg, &y)
}

/// Prepends the last `cp` samples.
pub fn add_cp(s: &[Complex64], cp: usize) -> Result<Vec<Complex64>> {
    if cp >= s.len() {
        return Err(OtfsError::CpTooLong { cp, len: s.len() });
    }
    let mut out = Vec::with_capacity(s.len() + cp);
    out.extend_from_slice(&s[s.len() - cp..]);
    out.extend_from_slice(s);
    Ok(out)
}

/// Drops the first `cp` samples.
pub fn remove_cp(r: &[Complex64], cp: usize) -> Result<Vec<Complex64>> {
    if cp >= r.len() {
        return Err(OtfsError::CpTooLong { cp, len: r.len() });
    }
    Ok(r[cp..].to_vec())
}

/// `H_DD = (F_N ⊗ G_rx) H (F_Nᴴ ⊗ G_tx)` for rectangular pulses.
pub fn dd_effective_channel(h: &ComplexMatrix, cfg: &FrameConfig) -> Result<ComplexMatrix> {
    dd_effective_channel_shaped(h, cfg, &Pulses::rectangular(cfg.m))
}

pub fn dd_effective_channel_shaped(
    h: &ComplexMatrix,
    cfg: &FrameConfig,
    pulses: &Pulses,
) -> Result<ComplexMatrix> {
    let size = cfg.block_len();
    if h.rows() != size || h.cols() != size {
        return Err(OtfsError::DimensionMismatch(format!(
            "{}x{} channel for MN={size}",
            h.rows(),
            h.cols()
        )));
    }
    pulses.check(cfg.m)?;
    let (m, n) = (cfg.m, cfg.n);
    // right factor, row by row: row · (F_Nᴴ ⊗ G_tx) = ((F_Nᴴ ⊗ G_tx)ᵀ rowᵀ)ᵀ and
    // F_Nᴴ is symmetric, so each row goes through the inverse Doppler DFT
    // after the transmit window
    let mut out = h.clone();
    for i in 0..size {
        let row = out.row_mut(i);
        doppler_axis_dft(row, m, n, false);
        for (g, z) in row.iter_mut().enumerate() {
            *z *= pulses.tx[g % m];
        }
    }
    let mut col = vec![Complex64::new(0.0, 0.0); size];
    for j in 0..size {
        for (g, c) in col.iter_mut().enumerate() {
            *c = out[(g, j)] * pulses.rx[g % m];
        }
        doppler_axis_dft(&mut col, m, n, true);
        for (g, c) in col.iter().enumerate() {
            out[(g, j)] = *c;
        }
    }
    Ok(out)
}

/// DD noise covariance `σ² [I_N ⊗ G_rx G_rxᴴ]`; `σ² I` for rectangular pulses.
pub fn noise_cov_dd(cfg: &FrameConfig, sigma2: f64) -> Result<ComplexMatrix> {
    noise_cov_dd_shaped(cfg, sigma2, &Pulses::rectangular(cfg.m))
}

pub fn noise_cov_dd_shaped(
    cfg: &FrameConfig,
    sigma2: f64,
    pulses: &Pulses,
) -> Result<ComplexMatrix> {
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(OtfsError::NonPositiveNoise(sigma2));
    }
    pulses.check(cfg.m)?;
    let diag: Vec<f64> = (0..cfg.block_len())
        .map(|g| sigma2 * pulses.rx[g % cfg.m].norm_sqr())
        .collect();
    Ok(ComplexMatrix::from_real_diag(&diag))
}

/// Dense unitary DFT matrix `F_n[a, b] = e^{-j2πab/n}/√n`.
pub fn dft_matrix(n: usize) -> ComplexMatrix {
    let scale = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, n, |a, b| {
        let ang = -2.0 * std::f64::consts::PI * ((a * b) % n) as f64 / n as f64;
        Complex64::from_polar(scale, ang)
    })
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}
