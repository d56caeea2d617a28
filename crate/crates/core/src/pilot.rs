//! Time-domain pilots and the sparse DD sensing model `r_p = Ω h + η`.
//!
//! Atom `(i, j)` is the pilot delayed cyclically by `i` samples and rotated
//! by the `j`-th fine Doppler bin:
//!
//! ```text
//! Ω[p, (i, j)] = ω^{j (p - i)} · s[(p - i) mod N_p],   ω = e^{j 2π N_ν / (G_ν M N)}
//! ```
//!
//! Columns are ordered delay-major, `col = i·G_ν + j`.

use std::sync::OnceLock;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::channel::{add_noise, ChannelRealization, PathSpec, TdChannel};
use crate::frame::FrameConfig;
use crate::linalg::ComplexMatrix;
use crate::sensing::Sensing;
use crate::{OtfsError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PilotSpec {
    pub symbols: Vec<Complex64>,
    pub seed: u64,
}

impl PilotSpec {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// Seeded unit-modulus QPSK pilot of length `n_p`.
pub fn generate_pilot(n_p: usize, seed: u64) -> PilotSpec {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let symbols = (0..n_p)
        .map(|_| {
            let b: u8 = rng.random_range(0..4);
            let re = if b & 1 == 0 { h } else { -h };
            let im = if b & 2 == 0 { h } else { -h };
            Complex64::new(re, im)
        })
        .collect();
    PilotSpec { symbols, seed }
}

/// Geometry of the fine delay-Doppler grid the dictionary spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DictionaryGrid {
    /// Delay taps `M_τ`.
    pub delay_taps: usize,
    /// Integer Doppler spread `N_ν`.
    pub doppler_taps: usize,
    /// Fine Doppler bins `G_ν`.
    pub doppler_bins: usize,
    /// Frame subcarriers.
    pub m: usize,
    /// Frame symbols.
    pub n: usize,
}

impl DictionaryGrid {
    pub fn new(
        delay_taps: usize,
        doppler_taps: usize,
        doppler_bins: usize,
        frame: &FrameConfig,
    ) -> Self {
        Self {
            delay_taps,
            doppler_taps,
            doppler_bins,
            m: frame.m,
            n: frame.n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.delay_taps == 0
            || self.doppler_taps == 0
            || self.doppler_bins == 0
            || self.m == 0
            || self.n == 0
        {
            return Err(OtfsError::EmptyGrid(format!("{self:?}")));
        }
        Ok(())
    }

    /// Number of atoms `D = M_τ G_ν`.
    pub fn atoms(&self) -> usize {
        self.delay_taps * self.doppler_bins
    }

    pub fn col_of(&self, delay: usize, bin: usize) -> usize {
        debug_assert!(delay < self.delay_taps && bin < self.doppler_bins);
        delay * self.doppler_bins + bin
    }

    pub fn index_of(&self, col: usize) -> (usize, usize) {
        (col / self.doppler_bins, col % self.doppler_bins)
    }

    /// Doppler index `j N_ν / G_ν` of fine bin `j`.
    pub fn bin_doppler(&self, bin: usize) -> f64 {
        bin as f64 * self.doppler_taps as f64 / self.doppler_bins as f64
    }

    /// Nearest fine bin of a Doppler index, clamped to the grid.
    pub fn nearest_bin(&self, doppler: f64) -> usize {
        let j = (doppler * self.doppler_bins as f64 / self.doppler_taps as f64).round();
        j.clamp(0.0, (self.doppler_bins - 1) as f64) as usize
    }

    /// Phase step `2π N_ν / (G_ν M N)` of one fine bin per sample.
    pub fn bin_phase(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.doppler_taps as f64
            / (self.doppler_bins * self.m * self.n) as f64
    }
}

/// Dictionary `Ω` with its grid map and structured kernels.
#[derive(Debug)]
pub struct Dictionary {
    pilot: PilotSpec,
    grid: DictionaryGrid,
    omega: ComplexMatrix,
    // lag_phase[j][Δ + N_p - 1] = ω^{jΔ}
    lag_phase: Vec<Vec<Complex64>>,
    gram: OnceLock<ComplexMatrix>,
}

impl Clone for Dictionary {
    fn clone(&self) -> Self {
        Self {
            pilot: self.pilot.clone(),
            grid: self.grid,
            omega: self.omega.clone(),
            lag_phase: self.lag_phase.clone(),
            gram: self
                .gram
                .get()
                .cloned()
                .map(OnceLock::from)
                .unwrap_or_default(),
        }
    }
}

/// Diagonal of the `i`-delay Doppler operator: `ω^g` for the first
/// `N_p - i` entries and `ω^{-i}, …, ω^{-1}` on the wrapped tail.
pub fn delay_phase_diag(delay: usize, n_p: usize, theta: f64) -> Vec<Complex64> {
    (0..n_p)
        .map(|g| {
            let e = if delay != 0 && g >= n_p - delay.min(n_p) {
                g as f64 - n_p as f64
            } else {
                g as f64
            };
            Complex64::from_polar(1.0, theta * e)
        })
        .collect()
}

pub fn build_dictionary(pilot: &PilotSpec, grid: DictionaryGrid) -> Result<Dictionary> {
    grid.validate()?;
    if pilot.is_empty() {
        return Err(OtfsError::EmptyGrid("pilot has no symbols".into()));
    }
    let n_p = pilot.len();
    let theta = grid.bin_phase();
    let s = &pilot.symbols;
    let omega = ComplexMatrix::from_fn(n_p, grid.atoms(), |p, col| {
        let (i, j) = grid.index_of(col);
        let lag = p as i64 - i as i64;
        let src = lag.rem_euclid(n_p as i64) as usize;
        s[src] * Complex64::from_polar(1.0, theta * (j as i64 * lag) as f64)
    });
    let lag_phase = (0..grid.doppler_bins)
        .map(|j| {
            (0..2 * n_p - 1)
                .map(|k| {
                    Complex64::from_polar(
                        1.0,
                        theta * (j as i64 * (k as i64 - (n_p as i64 - 1))) as f64,
                    )
                })
                .collect()
        })
        .collect();
    Ok(Dictionary {
        pilot: pilot.clone(),
        grid,
        omega,
        lag_phase,
        gram: OnceLock::new(),
    })
}

impl Dictionary {
    pub fn pilot(&self) -> &PilotSpec {
        &self.pilot
    }

    pub fn grid(&self) -> &DictionaryGrid {
        &self.grid
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.omega
    }

    pub fn pilot_len(&self) -> usize {
        self.pilot.len()
    }

    fn shifted_pilot(&self, delay: usize, p: usize) -> Complex64 {
        let n_p = self.pilot_len();
        self.pilot.symbols[(p as i64 - delay as i64).rem_euclid(n_p as i64) as usize]
    }
}

impl Sensing for Dictionary {
    fn rows(&self) -> usize {
        self.omega.rows()
    }

    fn cols(&self) -> usize {
        self.omega.cols()
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.omega
            .matvec(x)
            .expect("input length matches the dictionary")
    }

    fn adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        self.omega
            .adjoint_matvec(y)
            .expect("input length matches the dictionary")
    }

    fn column(&self, r: usize) -> Vec<Complex64> {
        self.omega.column(r)
    }

    fn weighted_gram(&self, gamma: &[f64]) -> ComplexMatrix {
        // A[p,q] = Σ_i s_{p-i} conj(s_{q-i}) g_i(p-q), g_i(Δ) = Σ_j γ_ij ω^{jΔ}
        let n_p = self.pilot_len();
        let g_bins = self.grid.doppler_bins;
        let lags = 2 * n_p - 1;
        let mut out = ComplexMatrix::zeros(n_p, n_p);
        let mut g = vec![Complex64::new(0.0, 0.0); lags];
        let mut shifted = vec![Complex64::new(0.0, 0.0); n_p];
        for i in 0..self.grid.delay_taps {
            let gam = &gamma[i * g_bins..(i + 1) * g_bins];
            if gam.iter().all(|&v| v == 0.0) {
                continue;
            }
            for (k, gk) in g.iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, &w) in gam.iter().enumerate() {
                    acc += self.lag_phase[j][k] * w;
                }
                *gk = acc;
            }
            for (p, sp) in shifted.iter_mut().enumerate() {
                *sp = self.shifted_pilot(i, p);
            }
            for p in 0..n_p {
                let sp = shifted[p];
                let row = out.row_mut(p);
                for q in 0..=p {
                    row[q] += sp * shifted[q].conj() * g[p - q + n_p - 1];
                }
            }
        }
        for p in 0..n_p {
            out[(p, p)].im = 0.0;
            for q in 0..p {
                out[(q, p)] = out[(p, q)].conj();
            }
        }
        out
    }

    fn quad_diag(&self, b: &ComplexMatrix) -> Vec<f64> {
        // quad[(i,j)] = Re Σ_Δ c_i(Δ) ω^{jΔ}, c_i(Δ) = Σ_{q-p=Δ} conj(s_{p-i}) B[p,q] s_{q-i}
        let n_p = self.pilot_len();
        let lags = 2 * n_p - 1;
        let mut out = vec![0.0; self.grid.atoms()];
        let mut c = vec![Complex64::new(0.0, 0.0); lags];
        let mut shifted = vec![Complex64::new(0.0, 0.0); n_p];
        for i in 0..self.grid.delay_taps {
            c.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            for (p, sp) in shifted.iter_mut().enumerate() {
                *sp = self.shifted_pilot(i, p);
            }
            for p in 0..n_p {
                let sp = shifted[p].conj();
                let row = b.row(p);
                for q in 0..n_p {
                    c[q + n_p - 1 - p] += sp * row[q] * shifted[q];
                }
            }
            for j in 0..self.grid.doppler_bins {
                let ph = &self.lag_phase[j];
                let mut acc = 0.0;
                for (ck, wk) in c.iter().zip(ph) {
                    acc += ck.re * wk.re - ck.im * wk.im;
                }
                out[self.grid.col_of(i, j)] = acc;
            }
        }
        out
    }

    fn gram(&self) -> ComplexMatrix {
        self.gram.get_or_init(|| Sensing::gram(&self.omega)).clone()
    }

    fn to_dense(&self) -> ComplexMatrix {
        self.omega.clone()
    }
}

impl Dictionary {
    /// Cached `ΩᴴΩ` without cloning.
    pub fn gram_ref(&self) -> &ComplexMatrix {
        self.gram.get_or_init(|| Sensing::gram(&self.omega))
    }
}

/// `L` snapshots `r_i = Ω h + η_i` with a fixed `h` and fresh noise.
pub fn forward_model<S: Sensing + ?Sized, R: Rng + ?Sized>(
    dict: &S,
    h: &[Complex64],
    sigma2: f64,
    rng: &mut R,
    snapshots: usize,
) -> Result<Vec<Vec<Complex64>>> {
    if h.len() != dict.cols() {
        return Err(OtfsError::DimensionMismatch(format!(
            "h of length {} for {} atoms",
            h.len(),
            dict.cols()
        )));
    }
    if !(sigma2 >= 0.0) {
        return Err(OtfsError::NonPositiveNoise(sigma2));
    }
    let clean = dict.apply(h);
    Ok((0..snapshots)
        .map(|_| {
            let mut r = clean.clone();
            add_noise(&mut r, sigma2, rng);
            r
        })
        .collect())
}

/// Places each path gain at its nearest fine-grid atom.
pub fn sparse_truth(ch: &ChannelRealization, grid: &DictionaryGrid) -> Result<Vec<Complex64>> {
    paths_to_sparse(&ch.paths, grid)
}

pub fn paths_to_sparse(paths: &[PathSpec], grid: &DictionaryGrid) -> Result<Vec<Complex64>> {
    let mut h = vec![Complex64::new(0.0, 0.0); grid.atoms()];
    for p in paths {
        if p.delay >= grid.delay_taps {
            return Err(OtfsError::OutOfGrid(format!(
                "delay tap {} beyond {}",
                p.delay,
                grid.delay_taps - 1
            )));
        }
        if !p.doppler.is_finite() {
            return Err(OtfsError::OutOfGrid(format!("Doppler index {}", p.doppler)));
        }
        h[grid.col_of(p.delay, grid.nearest_bin(p.doppler))] += p.gain;
    }
    Ok(h)
}

/// Expands a sparse vector back into one path per nonzero atom.
pub fn sparse_to_paths(h: &[Complex64], grid: &DictionaryGrid) -> Vec<PathSpec> {
    h.iter()
        .enumerate()
        .filter(|(_, g)| g.norm_sqr() > 0.0)
        .map(|(col, &gain)| {
            let (i, j) = grid.index_of(col);
            PathSpec {
                delay: i,
                doppler: grid.bin_doppler(j),
                gain,
            }
        })
        .collect()
}

/// Noise-free received pilot `H s_p` over the `N_p`-sample cyclic block.
pub fn pilot_response(
    paths: &[PathSpec],
    pilot: &PilotSpec,
    frame: &FrameConfig,
) -> Result<Vec<Complex64>> {
    TdChannel::from_paths(paths, pilot.len(), frame.doppler_phase_base())?.apply(&pilot.symbols)
}

/// Time-domain pilot overhead `N_p / (MN + N_p)`.
pub fn pilot_overhead(n_p: usize, m: usize, n: usize) -> f64 {
    if n_p == 0 {
        return 0.0;
    }
    n_p as f64 / (m * n + n_p) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{profile_support, reference_profile, ChannelOrigin, DdSpread};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn default_grid() -> DictionaryGrid {
        DictionaryGrid::new(16, 10, 20, &FrameConfig::default())
    }

    #[test]
    fn pilot_properties() {
        let one = generate_pilot(1, 3);
        assert_eq!(one.len(), 1);
        assert!((one.symbols[0].norm() - 1.0).abs() < 1e-15);
        assert_eq!(generate_pilot(80, 42), generate_pilot(80, 42));
        assert_ne!(generate_pilot(80, 42), generate_pilot(80, 43));
        let p = generate_pilot(80, 7);
        let power = p.symbols.iter().map(|z| z.norm_sqr()).sum::<f64>() / 80.0;
        assert!((power - 1.0).abs() < 1e-15);
    }

    #[test]
    fn grid_bijection() {
        let g = default_grid();
        let mut seen = vec![false; g.atoms()];
        for i in 0..g.delay_taps {
            for j in 0..g.doppler_bins {
                let col = g.col_of(i, j);
                assert!(!seen[col]);
                seen[col] = true;
                assert_eq!(g.index_of(col), (i, j));
            }
        }
        assert!(seen.into_iter().all(|s| s));
        assert_eq!(g.col_of(2, 3), 43);
    }

    #[test]
    fn base_phase_for_reference_grid() {
        let g = default_grid();
        assert!((g.bin_phase() - std::f64::consts::PI / 1024.0).abs() < 1e-15);
    }

    #[test]
    fn delay_diagonal_wraps_tail_phases() {
        let theta = 0.3;
        let d = delay_phase_diag(1, 2, theta);
        assert!((d[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((d[1] - Complex64::from_polar(1.0, -theta)).norm() < 1e-15);
        let d0 = delay_phase_diag(0, 3, theta);
        assert!((d0[2] - Complex64::from_polar(1.0, 2.0 * theta)).norm() < 1e-15);
    }

    #[test]
    fn columns_match_shift_and_phase_operators() {
        let frame = FrameConfig::with_grid(8, 4, 2).unwrap();
        let grid = DictionaryGrid::new(3, 2, 5, &frame);
        let pilot = generate_pilot(6, 1);
        let dict = build_dictionary(&pilot, grid).unwrap();
        let n_p = 6;
        let shift = ComplexMatrix::from_fn(n_p, n_p, |a, b| {
            if a == (b + 1) % n_p {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        for i in 0..3 {
            let mut pi = ComplexMatrix::identity(n_p);
            for _ in 0..i {
                pi = shift.matmul(&pi).unwrap();
            }
            let delta = ComplexMatrix::from_diag(&delay_phase_diag(i, n_p, grid.bin_phase()));
            let mut dj = ComplexMatrix::identity(n_p);
            for j in 0..5 {
                let want = pi.matmul(&dj).unwrap().matvec(&pilot.symbols).unwrap();
                let got = dict.column(grid.col_of(i, j));
                for (a, b) in got.iter().zip(&want) {
                    assert!((a - b).norm() < 1e-12, "atom ({i},{j})");
                }
                dj = delta.matmul(&dj).unwrap();
            }
        }
    }

    #[test]
    fn column_invariants() {
        let dict = build_dictionary(&generate_pilot(80, 5), default_grid()).unwrap();
        assert_eq!(dict.column(0), dict.pilot().symbols);
        for r in 0..dict.cols() {
            let col = dict.column(r);
            assert!(col.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
            let e: f64 = col.iter().map(|z| z.norm_sqr()).sum();
            assert!((e - 80.0).abs() < 1e-9);
        }
    }

    #[test]
    fn structured_kernels_match_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let frame = FrameConfig::default();
        let grid = DictionaryGrid::new(5, 4, 7, &frame);
        let dict = build_dictionary(&generate_pilot(11, 9), grid).unwrap();
        let dense = dict.to_dense();
        let gamma: Vec<f64> = (0..grid.atoms()).map(|_| rng.random::<f64>()).collect();
        let a = dict.weighted_gram(&gamma);
        let want = dense.weighted_gram(&gamma);
        assert!(a.sub(&want).unwrap().max_abs() < 1e-12);
        assert_eq!(a.hermitian_asymmetry(), 0.0);

        let mut b = ComplexMatrix::from_fn(11, 11, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        b.symmetrize();
        for (x, y) in dict.quad_diag(&b).iter().zip(dense.quad_diag(&b)) {
            assert!((x - y).abs() < 1e-11);
        }
        assert!(dict.gram().sub(&Sensing::gram(&dense)).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn forward_model_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dict = build_dictionary(&generate_pilot(80, 5), default_grid()).unwrap();
        let d = dict.cols();
        let mut e = vec![c(0.0, 0.0); d];
        e[57] = c(1.0, 0.0);
        let r = forward_model(&dict, &e, 0.0, &mut rng, 2).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0], dict.column(57));

        let zero = forward_model(&dict, &vec![c(0.0, 0.0); d], 0.0, &mut rng, 1).unwrap();
        assert!(zero[0].iter().all(|z| z.norm() == 0.0));

        let h: Vec<Complex64> = (0..d).map(|_| c(rng.random(), rng.random())).collect();
        let r = forward_model(&dict, &h, 0.0, &mut rng, 1).unwrap();
        let dense = dict.to_dense();
        for p in 0..80 {
            let mut acc = c(0.0, 0.0);
            for col in 0..d {
                acc += dense[(p, col)] * h[col];
            }
            assert!((r[0][p] - acc).norm() < 1e-12);
        }
        assert!(forward_model(&dict, &h[..3], 0.0, &mut rng, 1).is_err());
    }

    #[test]
    fn fresh_noise_per_snapshot() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let dict = build_dictionary(
            &generate_pilot(8, 5),
            DictionaryGrid::new(2, 1, 2, &FrameConfig::default()),
        )
        .unwrap();
        let h = vec![c(1.0, 0.0); 4];
        let r = forward_model(&dict, &h, 0.1, &mut rng, 2).unwrap();
        assert_ne!(r[0], r[1]);
    }

    #[test]
    fn sparse_truth_examples() {
        let grid = default_grid();
        let single = ChannelRealization {
            paths: vec![PathSpec {
                delay: 0,
                doppler: 0.0,
                gain: c(1.0, 0.0),
            }],
            origin: ChannelOrigin::Profile("unit".into()),
        };
        let h = sparse_truth(&single, &grid).unwrap();
        assert_eq!(h[0], c(1.0, 0.0));
        assert_eq!(h.iter().filter(|z| z.norm() > 0.0).count(), 1);

        // integer bin 3 of a 20-bin grid: Doppler index 3·10/20
        let at = ChannelRealization {
            paths: vec![PathSpec {
                delay: 2,
                doppler: 1.5,
                gain: c(0.5, -0.5),
            }],
            origin: ChannelOrigin::Profile("one".into()),
        };
        let h = sparse_truth(&at, &grid).unwrap();
        assert_eq!(h[43], c(0.5, -0.5));

        let far = ChannelRealization {
            paths: vec![PathSpec {
                delay: 16,
                doppler: 0.0,
                gain: c(1.0, 0.0),
            }],
            origin: ChannelOrigin::Profile("far".into()),
        };
        assert!(matches!(
            sparse_truth(&far, &grid),
            Err(OtfsError::OutOfGrid(_))
        ));
        assert_eq!(grid.nearest_bin(-0.4), 0);
        assert_eq!(grid.nearest_bin(12.0), 19);
    }

    #[test]
    fn on_grid_pilot_response_matches_dictionary() {
        let frame = FrameConfig::default();
        let grid = default_grid();
        let spread = DdSpread {
            delay_taps: 16,
            doppler_taps: 10,
        };
        let pilot = generate_pilot(80, 11);
        let dict = build_dictionary(&pilot, grid).unwrap();
        // reference profile snapped to its nearest fine bins
        let support = profile_support(&reference_profile(), &frame, spread).unwrap();
        let gains = [
            c(1.0, 0.0),
            c(0.3, -0.7),
            c(-0.5, 0.2),
            c(0.1, 0.9),
            c(-0.8, -0.4),
        ];
        let paths: Vec<PathSpec> = support
            .with_gains(&gains)
            .into_iter()
            .map(|p| PathSpec {
                doppler: grid.bin_doppler(grid.nearest_bin(p.doppler)),
                ..p
            })
            .collect();
        let ch = ChannelRealization {
            paths: paths.clone(),
            origin: ChannelOrigin::Profile("ref".into()),
        };
        let h = sparse_truth(&ch, &grid).unwrap();
        let want = pilot_response(&paths, &pilot, &frame).unwrap();
        let got = dict.apply(&h);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).norm() < 1e-10);
        }
        // and each single path on its own
        for p in paths {
            let h1 = paths_to_sparse(&[p], &grid).unwrap();
            let r = pilot_response(&[p], &pilot, &frame).unwrap();
            for (a, b) in dict.apply(&h1).iter().zip(&r) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn overhead() {
        assert!((pilot_overhead(80, 32, 32) - 0.072464).abs() < 5e-7);
        assert_eq!(pilot_overhead(0, 32, 32), 0.0);
        assert_eq!(pilot_overhead(1024, 32, 32), 0.5);
    }

    #[test]
    fn sparse_round_trip_through_paths() {
        let grid = default_grid();
        let mut h = vec![c(0.0, 0.0); grid.atoms()];
        h[5] = c(1.0, 2.0);
        h[300] = c(-0.5, 0.0);
        let paths = sparse_to_paths(&h, &grid);
        assert_eq!(paths.len(), 2);
        assert_eq!(paths_to_sparse(&paths, &grid).unwrap(), h);
    }

    #[test]
    fn empty_grid_rejected() {
        let grid = DictionaryGrid {
            delay_taps: 0,
            ..default_grid()
        };
        assert!(matches!(
            build_dictionary(&generate_pilot(4, 1), grid),
            Err(OtfsError::EmptyGrid(_))
        ));
        assert!(matches!(
            build_dictionary(&generate_pilot(0, 1), default_grid()),
            Err(OtfsError::EmptyGrid(_))
        ));
    }
}
