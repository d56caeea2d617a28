//! QPSK data frames, LMMSE detection, channel reconstruction and the
//! NMSE / SER metrics.
//!
//! Two detectors are provided. [`lmmse_detect`] is the dense textbook form on
//! `MN × MN` DD matrices. [`lmmse_detect_td`] gives the same estimate for
//! rectangular pulses and white noise by working on the time-domain channel:
//! with `U = F_N ⊗ I_M` and `H_DD = U H Uᴴ`,
//! `x̂ = U (HᴴH + σ²I)⁻¹ Hᴴ r`, and `HᴴH` is cyclically banded.

use num_complex::Complex64;
use rand::Rng;

use crate::channel::TdChannel;
use crate::frame::{dd_effective_channel, demodulate, DdFrame, FrameConfig};
use crate::linalg::{Cholesky, ComplexMatrix};
use crate::pilot::{sparse_to_paths, DictionaryGrid};
use crate::{OtfsError, Result};

const QPSK_AMP: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// QPSK symbols with the bits they carry, two bits per symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolFrame {
    pub symbols: Vec<Complex64>,
    pub bits: Vec<u8>,
}

impl SymbolFrame {
    /// Uniformly random bits mapped to `count` symbols.
    pub fn random<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Self {
        let bits: Vec<u8> = (0..2 * count).map(|_| rng.random_range(0..2u8)).collect();
        qpsk_mod(&bits).expect("even bit count")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Places the symbols column-major on an `M × N` DD grid.
    pub fn to_dd(&self, cfg: &FrameConfig) -> Result<DdFrame> {
        DdFrame::from_vec(cfg, &self.symbols)
    }
}

/// Gray mapping: the first bit of a pair sets the sign of the real part, the
/// second the sign of the imaginary part, and a zero bit means positive.
pub fn qpsk_mod(bits: &[u8]) -> Result<SymbolFrame> {
    if !bits.len().is_multiple_of(2) {
        return Err(OtfsError::OddBitCount(bits.len()));
    }
    if let Some(b) = bits.iter().find(|&&b| b > 1) {
        return Err(OtfsError::InvalidConfig(format!("bit value {b}")));
    }
    let sign = |b: u8| if b == 0 { QPSK_AMP } else { -QPSK_AMP };
    let symbols = bits
        .chunks_exact(2)
        .map(|p| Complex64::new(sign(p[0]), sign(p[1])))
        .collect();
    Ok(SymbolFrame {
        symbols,
        bits: bits.to_vec(),
    })
}

/// Minimum-distance bit decisions.
pub fn qpsk_demod(symbols: &[Complex64]) -> Vec<u8> {
    symbols
        .iter()
        .flat_map(|z| [u8::from(z.re < 0.0), u8::from(z.im < 0.0)])
        .collect()
}

/// Nearest constellation point.
pub fn qpsk_decide(z: Complex64) -> Complex64 {
    let s = |v: f64| if v < 0.0 { -QPSK_AMP } else { QPSK_AMP };
    Complex64::new(s(z.re), s(z.im))
}

/// `x̂ = (Hᴴ R⁻¹ H + I)⁻¹ Hᴴ R⁻¹ y` for unit-power symbols.
pub fn lmmse_detect(
    y: &[Complex64],
    h_dd: &ComplexMatrix,
    r_v: &ComplexMatrix,
) -> Result<Vec<Complex64>> {
    let n = h_dd.rows();
    if y.len() != n || r_v.rows() != n || r_v.cols() != n {
        return Err(OtfsError::DimensionMismatch(format!(
            "observation {}, channel {}x{}, covariance {}x{}",
            y.len(),
            n,
            h_dd.cols(),
            r_v.rows(),
            r_v.cols()
        )));
    }
    let noise = Cholesky::new(r_v).map_err(|e| OtfsError::SingularCovariance(e.to_string()))?;
    // whiten: R⁻¹ = L⁻ᴴ L⁻¹
    let mut cols: Vec<Vec<Complex64>> = (0..h_dd.cols()).map(|j| h_dd.column(j)).collect();
    cols.iter_mut().for_each(|c| noise.forward_in_place(c));
    let wh = ComplexMatrix::from_columns(n, &cols)?;
    let mut wy = y.to_vec();
    noise.forward_in_place(&mut wy);
    let mut a = wh.conj_transpose().matmul(&wh)?;
    a.symmetrize();
    a.add_diag(1.0);
    let rhs = wh.adjoint_matvec(&wy)?;
    Ok(Cholesky::new_unchecked(&a)?.solve_vec(&rhs)?)
}

/// LMMSE estimate of the DD symbols from a CP-free time-domain block
/// received through `channel` with white noise of variance `sigma2`.
pub fn lmmse_detect_td(
    r: &[Complex64],
    channel: &TdChannel,
    sigma2: f64,
    cfg: &FrameConfig,
) -> Result<Vec<Complex64>> {
    if channel.size() != cfg.block_len() {
        return Err(OtfsError::DimensionMismatch(format!(
            "channel of size {} for MN={}",
            channel.size(),
            cfg.block_len()
        )));
    }
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(OtfsError::SingularCovariance(format!(
            "noise variance {sigma2}"
        )));
    }
    let rhs = channel.adjoint_apply(r)?;
    let chol = EnvelopeCholesky::normal_equations(channel, sigma2)?;
    let z = chol.solve(&rhs);
    Ok(demodulate(&z, cfg)?.to_vec())
}

/// Lower-triangular profile storage: row `i` keeps columns `first[i]..=i`.
struct EnvelopeCholesky {
    first: Vec<usize>,
    rows: Vec<Vec<Complex64>>,
}

impl EnvelopeCholesky {
    /// Factors `HᴴH + σ² I` of a cyclic channel.
    fn normal_equations(channel: &TdChannel, sigma2: f64) -> Result<Self> {
        let n = channel.size();
        let taps = channel.taps();
        // (HᴴH)[a, b] = Σ_p conj(H[p, a]) H[p, b] with H[p, p - l] = d_l[p]
        let mut offsets: Vec<usize> = Vec::new();
        for (la, _) in taps {
            for (lb, _) in taps {
                // column b sits (la - lb) mod n to the right of column a
                let off = (la + n - lb) % n;
                if !offsets.contains(&off) {
                    offsets.push(off);
                }
            }
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (i, slot) in first.iter_mut().enumerate() {
            for &off in &offsets {
                // entries (i, i - off) and (i, i + off), both mod n
                for j in [(i + n - off) % n, (i + off) % n] {
                    if j < *slot {
                        *slot = j;
                    }
                }
            }
        }
        let mut rows: Vec<Vec<Complex64>> = (0..n)
            .map(|i| vec![Complex64::new(0.0, 0.0); i + 1 - first[i]])
            .collect();
        for (la, da) in taps {
            for (lb, db) in taps {
                for p in 0..n {
                    let a = (p + n - la) % n;
                    let b = (p + n - lb) % n;
                    if b <= a {
                        rows[a][b - first[a]] += da[p].conj() * db[p];
                    }
                }
            }
        }
        for (i, row) in rows.iter_mut().enumerate() {
            let d = i - first[i];
            row[d] = Complex64::new(row[d].re + sigma2, 0.0);
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                let start = fi.max(first[j]);
                let mut s = rows[i][j - fi];
                let (ri, rj) = (&rows[i], &rows[j]);
                for k in start..j {
                    s -= ri[k - fi] * rj[k - first[j]].conj();
                }
                let ljj = rows[j][j - first[j]].re;
                rows[i][j - fi] = s / ljj;
            }
            let row = &rows[i];
            let diag = row[i - fi].re - row[..i - fi].iter().map(|z| z.norm_sqr()).sum::<f64>();
            if !(diag > 0.0) || !diag.is_finite() {
                return Err(OtfsError::SingularCovariance(format!(
                    "pivot {i} is {diag}"
                )));
            }
            rows[i][i - fi] = Complex64::new(diag.sqrt(), 0.0);
        }
        Ok(Self { first, rows })
    }

    fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.rows.len();
        let mut y = b.to_vec();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.rows[i];
            let mut s = y[i];
            for k in fi..i {
                s -= row[k - fi] * y[k];
            }
            y[i] = s / row[i - fi].re;
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.rows[i];
            y[i] /= row[i - fi].re;
            let yi = y[i];
            for k in fi..i {
                y[k] -= row[k - fi].conj() * yi;
            }
        }
        y
    }
}

/// Time-domain channel described by a sparse estimate over the fine grid.
pub fn reconstruct_td(
    h_hat: &[Complex64],
    grid: &DictionaryGrid,
    cfg: &FrameConfig,
) -> Result<TdChannel> {
    if h_hat.len() != grid.atoms() {
        return Err(OtfsError::DimensionMismatch(format!(
            "estimate of length {} for {} atoms",
            h_hat.len(),
            grid.atoms()
        )));
    }
    TdChannel::from_paths(
        &sparse_to_paths(h_hat, grid),
        cfg.block_len(),
        cfg.doppler_phase_base(),
    )
}

/// Fast version of [`reconstruct_td`] for repeated use on one grid: the fine
/// Doppler phases `ω^{j t}` are tabulated once for every lag `t`.
#[derive(Debug, Clone)]
pub struct FineGridSynth {
    grid: DictionaryGrid,
    size: usize,
    // table[(t + M_τ - 1) * G_ν + j] = ω^{j t}
    table: Vec<Complex64>,
}

impl FineGridSynth {
    pub fn new(grid: &DictionaryGrid, cfg: &FrameConfig) -> Result<Self> {
        grid.validate()?;
        let size = cfg.block_len();
        let (taps, bins) = (grid.delay_taps, grid.doppler_bins);
        let theta = grid.bin_phase();
        let mut table = Vec::with_capacity((size + taps - 1) * bins);
        for t in 0..size + taps - 1 {
            let lag = t as f64 - (taps - 1) as f64;
            table.extend((0..bins).map(|j| Complex64::from_polar(1.0, theta * j as f64 * lag)));
        }
        Ok(Self {
            grid: *grid,
            size,
            table,
        })
    }

    pub fn td_channel(&self, h_hat: &[Complex64]) -> Result<TdChannel> {
        let (taps, bins) = (self.grid.delay_taps, self.grid.doppler_bins);
        if h_hat.len() != self.grid.atoms() {
            return Err(OtfsError::DimensionMismatch(format!(
                "estimate of length {} for {} atoms",
                h_hat.len(),
                self.grid.atoms()
            )));
        }
        let mut ch = TdChannel::zero(self.size);
        let mut diag = vec![Complex64::new(0.0, 0.0); self.size];
        for i in 0..taps {
            let coef = &h_hat[i * bins..(i + 1) * bins];
            if coef.iter().all(|z| z.norm_sqr() == 0.0) {
                continue;
            }
            for (q, d) in diag.iter_mut().enumerate() {
                let base = (q + taps - 1 - i) * bins;
                let phases = &self.table[base..base + bins];
                *d = coef.iter().zip(phases).map(|(a, b)| a * b).sum();
            }
            ch.add_diagonal(i, &diag)?;
        }
        Ok(ch)
    }
}

/// Effective DD channel `Ĥ_DD` of a sparse estimate.
pub fn reconstruct_hdd(
    h_hat: &[Complex64],
    grid: &DictionaryGrid,
    cfg: &FrameConfig,
) -> Result<ComplexMatrix> {
    dd_effective_channel(&reconstruct_td(h_hat, grid, cfg)?.to_dense(), cfg)
}

/// `‖Ĥ − H‖²_F / ‖H‖²_F`.
pub fn nmse(h_hat: &ComplexMatrix, h_true: &ComplexMatrix) -> Result<f64> {
    let denom = h_true.frobenius_norm_sqr();
    if denom == 0.0 {
        return Err(OtfsError::ZeroReference);
    }
    Ok(h_hat.sub(h_true)?.frobenius_norm_sqr() / denom)
}

/// NMSE of two time-domain channels. For rectangular pulses this equals the
/// DD-domain NMSE because the DD map is a unitary similarity.
pub fn nmse_td(h_hat: &TdChannel, h_true: &TdChannel) -> Result<f64> {
    let denom = h_true.frobenius_norm_sqr();
    if denom == 0.0 {
        return Err(OtfsError::ZeroReference);
    }
    Ok(h_hat.distance_sqr(h_true)? / denom)
}

/// Fraction of minimum-distance decisions that differ from the sent symbols.
pub fn ser(x_hat: &[Complex64], x_true: &[Complex64]) -> Result<f64> {
    if x_hat.len() != x_true.len() {
        return Err(OtfsError::LengthMismatch(x_hat.len(), x_true.len()));
    }
    if x_true.is_empty() {
        return Ok(0.0);
    }
    let errors = x_hat
        .iter()
        .zip(x_true)
        .filter(|(a, b)| qpsk_decide(**a) != qpsk_decide(**b))
        .count();
    Ok(errors as f64 / x_true.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{complex_normal, PathSpec};
    use crate::frame::{modulate, noise_cov_dd};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gray_table_and_round_trip() {
        let f = qpsk_mod(&[0, 0, 1, 0, 0, 1, 1, 1]).unwrap();
        let a = QPSK_AMP;
        assert_eq!(f.symbols, vec![c(a, a), c(-a, a), c(a, -a), c(-a, -a)]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = SymbolFrame::random(500, &mut rng);
        assert_eq!(qpsk_demod(&f.symbols), f.bits);
        let power: f64 = f.symbols.iter().map(|z| z.norm_sqr()).sum::<f64>() / 500.0;
        assert!((power - 1.0).abs() < 1e-15);
        assert!(matches!(
            qpsk_mod(&[1, 0, 1]),
            Err(OtfsError::OddBitCount(3))
        ));
    }

    #[test]
    fn identity_channel_is_a_wiener_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let y: Vec<Complex64> = (0..6).map(|_| complex_normal(1.0, &mut rng)).collect();
        let s2 = 0.4;
        let x = lmmse_detect(
            &y,
            &ComplexMatrix::identity(6),
            &ComplexMatrix::identity(6).scale(c(s2, 0.0)),
        )
        .unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b / (1.0 + s2)).norm() < 1e-14);
        }
        let zero = lmmse_detect(
            &[c(0.0, 0.0); 6],
            &ComplexMatrix::identity(6),
            &ComplexMatrix::identity(6),
        )
        .unwrap();
        assert!(zero.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn unitary_channel_at_low_noise_inverts() {
        let u = crate::frame::dft_matrix(8);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let y: Vec<Complex64> = (0..8).map(|_| complex_normal(1.0, &mut rng)).collect();
        let x = lmmse_detect(&y, &u, &ComplexMatrix::identity(8).scale(c(1e-12, 0.0))).unwrap();
        let want = u.adjoint_matvec(&y).unwrap();
        for (a, b) in x.iter().zip(&want) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn dense_detector_solves_the_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = ComplexMatrix::from_fn(10, 10, |_, _| complex_normal(1.0, &mut rng));
        let m = ComplexMatrix::from_fn(10, 10, |_, _| complex_normal(1.0, &mut rng));
        let mut rv = m.conj_transpose().matmul(&m).unwrap();
        rv.add_diag(0.5);
        rv.symmetrize();
        let y: Vec<Complex64> = (0..10).map(|_| complex_normal(1.0, &mut rng)).collect();
        let x = lmmse_detect(&y, &h, &rv).unwrap();
        let rinv = Cholesky::new(&rv).unwrap().inverse();
        let hr = h.conj_transpose().matmul(&rinv).unwrap();
        let mut a = hr.matmul(&h).unwrap();
        a.add_diag(1.0);
        let lhs = a.matvec(&x).unwrap();
        let rhs = hr.matvec(&y).unwrap();
        let err: f64 = lhs
            .iter()
            .zip(&rhs)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let scale: f64 = rhs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(err <= 1e-8 * scale);
    }

    #[test]
    fn singular_noise_covariance_is_reported() {
        let rv = ComplexMatrix::zeros(3, 3);
        let y = vec![c(1.0, 0.0); 3];
        assert!(matches!(
            lmmse_detect(&y, &ComplexMatrix::identity(3), &rv),
            Err(OtfsError::SingularCovariance(_))
        ));
    }

    #[test]
    fn time_domain_detector_matches_dense() {
        let cfg = FrameConfig::with_grid(8, 4, 4).unwrap();
        let paths = [
            PathSpec {
                delay: 0,
                doppler: 0.0,
                gain: c(0.8, 0.1),
            },
            PathSpec {
                delay: 2,
                doppler: 1.3,
                gain: c(-0.3, 0.4),
            },
            PathSpec {
                delay: 3,
                doppler: -0.6,
                gain: c(0.2, -0.2),
            },
        ];
        let td = TdChannel::from_paths(&paths, 32, cfg.doppler_phase_base()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r: Vec<Complex64> = (0..32).map(|_| complex_normal(1.0, &mut rng)).collect();
        let s2 = 0.05;
        let fast = lmmse_detect_td(&r, &td, s2, &cfg).unwrap();
        let h_dd = dd_effective_channel(&td.to_dense(), &cfg).unwrap();
        let y = demodulate(&r, &cfg).unwrap().to_vec();
        let dense = lmmse_detect(&y, &h_dd, &noise_cov_dd(&cfg, s2).unwrap()).unwrap();
        for (a, b) in fast.iter().zip(&dense) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn envelope_factor_handles_wrapped_delays() {
        // delays near the block length wrap around and fill the corners
        let n = 12;
        let mut td = TdChannel::zero(n);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for l in [0, 1, 10] {
            let d: Vec<Complex64> = (0..n).map(|_| complex_normal(1.0, &mut rng)).collect();
            td.add_diagonal(l, &d).unwrap();
        }
        let chol = EnvelopeCholesky::normal_equations(&td, 0.1).unwrap();
        let b: Vec<Complex64> = (0..n).map(|_| complex_normal(1.0, &mut rng)).collect();
        let x = chol.solve(&b);
        let h = td.to_dense();
        let mut a = h.conj_transpose().matmul(&h).unwrap();
        a.add_diag(0.1);
        let ax = a.matvec(&x).unwrap();
        for (u, v) in ax.iter().zip(&b) {
            assert!((u - v).norm() < 1e-10);
        }
    }

    #[test]
    fn reconstruction_of_exact_on_grid_estimate() {
        let cfg = FrameConfig::with_grid(8, 4, 4).unwrap();
        let frame = FrameConfig { ..cfg };
        let grid = DictionaryGrid::new(4, 2, 4, &frame);
        let mut h = vec![c(0.0, 0.0); grid.atoms()];
        h[grid.col_of(1, 2)] = c(0.5, -0.5);
        let est = reconstruct_hdd(&h, &grid, &cfg).unwrap();
        let path = PathSpec {
            delay: 1,
            doppler: grid.bin_doppler(2),
            gain: c(0.5, -0.5),
        };
        let direct = dd_effective_channel(
            &TdChannel::from_paths(&[path], 32, cfg.doppler_phase_base())
                .unwrap()
                .to_dense(),
            &cfg,
        )
        .unwrap();
        assert!(est.sub(&direct).unwrap().max_abs() < 1e-12);
        let zero = reconstruct_hdd(&vec![c(0.0, 0.0); grid.atoms()], &grid, &cfg).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
        assert!(matches!(
            reconstruct_hdd(&h[1..], &grid, &cfg),
            Err(OtfsError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn tabulated_synthesis_matches_path_expansion() {
        let cfg = FrameConfig::with_grid(8, 4, 4).unwrap();
        let grid = DictionaryGrid::new(4, 2, 4, &cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut h: Vec<Complex64> = (0..grid.atoms())
            .map(|_| complex_normal(1.0, &mut rng))
            .collect();
        h[grid.col_of(2, 0)] = c(0.0, 0.0);
        let synth = FineGridSynth::new(&grid, &cfg).unwrap();
        let fast = synth.td_channel(&h).unwrap();
        let slow = reconstruct_td(&h, &grid, &cfg).unwrap();
        assert!(fast.distance_sqr(&slow).unwrap() < 1e-24 * slow.frobenius_norm_sqr());
    }

    #[test]
    fn nmse_reference_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = ComplexMatrix::from_fn(5, 5, |_, _| complex_normal(1.0, &mut rng));
        assert_eq!(nmse(&h, &h).unwrap(), 0.0);
        assert!((nmse(&ComplexMatrix::zeros(5, 5), &h).unwrap() - 1.0).abs() < 1e-15);
        assert!((nmse(&h.scale(c(2.0, 0.0)), &h).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            nmse(&h, &ComplexMatrix::zeros(5, 5)),
            Err(OtfsError::ZeroReference)
        ));
    }

    #[test]
    fn td_and_dd_nmse_agree() {
        let cfg = FrameConfig::with_grid(4, 4, 2).unwrap();
        let a = TdChannel::from_paths(
            &[PathSpec {
                delay: 1,
                doppler: 0.7,
                gain: c(1.0, 0.2),
            }],
            16,
            cfg.doppler_phase_base(),
        )
        .unwrap();
        let b = TdChannel::from_paths(
            &[PathSpec {
                delay: 1,
                doppler: 1.0,
                gain: c(0.9, 0.0),
            }],
            16,
            cfg.doppler_phase_base(),
        )
        .unwrap();
        let dd_a = dd_effective_channel(&a.to_dense(), &cfg).unwrap();
        let dd_b = dd_effective_channel(&b.to_dense(), &cfg).unwrap();
        assert!((nmse_td(&b, &a).unwrap() - nmse(&dd_b, &dd_a).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn ser_reference_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = SymbolFrame::random(64, &mut rng);
        assert_eq!(ser(&f.symbols, &f.symbols).unwrap(), 0.0);
        let neg: Vec<Complex64> = f.symbols.iter().map(|z| -z).collect();
        assert_eq!(ser(&neg, &f.symbols).unwrap(), 1.0);
        assert!(matches!(
            ser(&neg[1..], &f.symbols),
            Err(OtfsError::LengthMismatch(63, 64))
        ));
    }

    #[test]
    fn perfect_csi_identity_channel_has_no_errors() {
        let cfg = FrameConfig::with_grid(8, 8, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = SymbolFrame::random(64, &mut rng);
        let s = modulate(&f.to_dd(&cfg).unwrap(), &cfg).unwrap();
        let td = TdChannel::from_paths(
            &[PathSpec {
                delay: 0,
                doppler: 0.0,
                gain: c(1.0, 0.0),
            }],
            64,
            cfg.doppler_phase_base(),
        )
        .unwrap();
        let x = lmmse_detect_td(&s, &td, 1e-6, &cfg).unwrap();
        assert_eq!(ser(&x, &f.symbols).unwrap(), 0.0);
    }
}
