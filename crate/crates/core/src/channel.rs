//! Clustered delay-Doppler channels and their time-domain matrices.
//!
//! A path is a delay tap `l`, a real Doppler index `c` (integer tap plus an
//! optional fractional part) and a complex gain. Over a block of `size`
//! samples it acts as
//!
//! ```text
//! r[p] = h · e^{j φ c (p - l)} · s[(p - l) mod size]
//! ```
//!
//! with `φ = 2π/(MN)`. The phase uses the unwrapped lag `p - l`, which is what
//! a cyclic-prefixed block sees after CP removal (see [`propagate_linear`]).
//! For integer `c` at `size = MN` this coincides with `Π^l Δ^c`.

use std::path::Path;

use num_complex::Complex64;
use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_distr::weighted::WeightedIndex;
use rand_distr::{Distribution, StandardNormal};

use crate::frame::FrameConfig;
use crate::linalg::ComplexMatrix;
use crate::{OtfsError, Result};

/// Complex Gaussian mixture over scalar path gains.
#[derive(Debug, Clone, PartialEq)]
pub struct GmmSpec {
    weights: Vec<f64>,
    means: Vec<Complex64>,
    variances: Vec<f64>,
}

/// Mixture presets used for the clustered-channel studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixtureCase {
    WellSeparated,
    Clustered,
    UnevenWeights,
    Outlier,
}

impl std::str::FromStr for MixtureCase {
    type Err = OtfsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Ok(Self::WellSeparated),
            "B" => Ok(Self::Clustered),
            "C" => Ok(Self::UnevenWeights),
            "D" => Ok(Self::Outlier),
            _ => Err(OtfsError::InvalidConfig(format!(
                "unknown mixture case '{s}' (expected A-D)"
            ))),
        }
    }
}

impl GmmSpec {
    pub fn new(weights: Vec<f64>, means: Vec<Complex64>, variances: Vec<f64>) -> Result<Self> {
        let k = weights.len();
        if k == 0 || means.len() != k || variances.len() != k {
            return Err(OtfsError::InvalidConfig(format!(
                "mixture needs matching non-empty weights/means/variances, got {}/{}/{}",
                k,
                means.len(),
                variances.len()
            )));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12
        {
            return Err(OtfsError::InvalidConfig(format!(
                "mixture weights {weights:?} are not a distribution"
            )));
        }
        if variances.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(OtfsError::InvalidConfig(format!(
                "mixture variances {variances:?} must be positive"
            )));
        }
        if means.iter().any(|m| !m.re.is_finite() || !m.im.is_finite()) {
            return Err(OtfsError::InvalidConfig(
                "mixture means must be finite".into(),
            ));
        }
        Ok(Self {
            weights,
            means,
            variances,
        })
    }

    /// Single zero-mean component.
    pub fn single(variance: f64) -> Result<Self> {
        Self::new(vec![1.0], vec![Complex64::new(0.0, 0.0)], vec![variance])
    }

    /// Equal-weight zero-mean mixture whose components differ in power.
    ///
    /// `k = 1` is a unit-variance Gaussian. Larger orders spread the
    /// component variances geometrically, keeping the average power at one.
    pub fn balanced(k: usize) -> Result<Self> {
        let variances: Vec<f64> = match k {
            0 => {
                return Err(OtfsError::InvalidConfig(
                    "mixture order must be at least 1".into(),
                ))
            }
            1 => vec![1.0],
            2 => vec![1.8, 0.2],
            4 => vec![2.6, 0.9, 0.35, 0.15],
            _ => {
                let raw: Vec<f64> = (0..k)
                    .map(|i| 10f64.powf(-1.5 * i as f64 / (k - 1) as f64))
                    .collect();
                let total: f64 = raw.iter().sum();
                raw.iter().map(|v| v * k as f64 / total).collect()
            }
        };
        Self::new(
            vec![1.0 / k as f64; k],
            vec![Complex64::new(0.0, 0.0); k],
            variances,
        )
    }

    /// Four-component presets A-D.
    pub fn case(case: MixtureCase) -> Self {
        let c = Complex64::new;
        let (weights, means, variances) = match case {
            MixtureCase::WellSeparated => (
                vec![0.25; 4],
                vec![c(1.0, 1.0), c(-1.0, 1.0), c(-1.0, -1.0), c(1.0, -1.0)],
                vec![0.05; 4],
            ),
            MixtureCase::Clustered => (
                vec![0.25; 4],
                vec![c(0.9, 0.15), c(0.9, -0.15), c(-0.9, 0.15), c(-0.9, -0.15)],
                vec![0.1; 4],
            ),
            MixtureCase::UnevenWeights => (
                vec![0.4, 0.1, 0.4, 0.1],
                vec![c(0.5, 0.5); 4],
                vec![0.05, 1.0, 0.2, 2.0],
            ),
            MixtureCase::Outlier => (
                vec![0.7, 0.15, 0.1, 0.05],
                vec![c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(2.5, 2.5)],
                vec![0.1, 0.1, 0.1, 1.0],
            ),
        };
        Self::new(weights, means, variances).expect("preset mixtures are valid")
    }

    pub fn order(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn means(&self) -> &[Complex64] {
        &self.means
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    /// `Σ ρ_k μ_k`.
    pub fn mean(&self) -> Complex64 {
        self.weights
            .iter()
            .zip(&self.means)
            .map(|(&w, &m)| m * w)
            .sum()
    }

    /// `E|h|² = Σ ρ_k (|μ_k|² + σ_k²)`.
    pub fn second_moment(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.means)
            .zip(&self.variances)
            .map(|((&w, m), &v)| w * (m.norm_sqr() + v))
            .sum()
    }

    /// `E|h - E h|²`.
    pub fn variance(&self) -> f64 {
        self.second_moment() - self.mean().norm_sqr()
    }

    pub fn sample_component<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if self.weights.len() == 1 {
            return 0;
        }
        WeightedIndex::new(&self.weights)
            .expect("weights validated")
            .sample(rng)
    }

    pub fn sample_from<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Complex64 {
        self.means[k] + complex_normal(self.variances[k], rng)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        let k = self.sample_component(rng);
        self.sample_from(k, rng)
    }
}

/// Draw from `CN(0, variance)`: independent real and imaginary parts of
/// variance `variance/2`.
pub fn complex_normal<R: Rng + ?Sized>(variance: f64, rng: &mut R) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re * s, im * s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSpec {
    /// Delay tap in samples.
    pub delay: usize,
    /// Doppler index, integer tap plus fractional offset.
    pub doppler: f64,
    pub gain: Complex64,
}

impl PathSpec {
    /// Fractional part relative to the nearest integer Doppler tap.
    pub fn fractional_doppler(&self) -> f64 {
        self.doppler - self.doppler.round()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelOrigin {
    Mixture(GmmSpec),
    Profile(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub paths: Vec<PathSpec>,
    pub origin: ChannelOrigin,
}

impl ChannelRealization {
    pub fn path_count(&self) -> usize {
        self.paths.len()
    }

    pub fn energy(&self) -> f64 {
        self.paths.iter().map(|p| p.gain.norm_sqr()).sum()
    }
}

/// Delay and integer-Doppler spreads of the channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DdSpread {
    /// Delay taps `M_τ`.
    pub delay_taps: usize,
    /// Integer Doppler taps `N_ν`.
    pub doppler_taps: usize,
}

/// Delay/Doppler positions of the paths of one channel, without gains.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSupport {
    pub delays: Vec<usize>,
    pub dopplers: Vec<f64>,
}

impl PathSupport {
    pub fn len(&self) -> usize {
        self.delays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delays.is_empty()
    }

    pub fn with_gains(&self, gains: &[Complex64]) -> Vec<PathSpec> {
        self.delays
            .iter()
            .zip(&self.dopplers)
            .zip(gains)
            .map(|((&delay, &doppler), &gain)| PathSpec {
                delay,
                doppler,
                gain,
            })
            .collect()
    }
}

/// Distinct delay taps drawn without replacement, integer Doppler taps drawn
/// uniformly, and an optional `U(-½, ½)` fractional offset per path.
pub fn sample_support<R: Rng + ?Sized>(
    path_count: usize,
    spread: DdSpread,
    frac_doppler: bool,
    rng: &mut R,
) -> Result<PathSupport> {
    if path_count == 0 {
        return Err(OtfsError::InvalidConfig(
            "at least one path is required".into(),
        ));
    }
    if path_count > spread.delay_taps {
        return Err(OtfsError::TooManyPaths {
            paths: path_count,
            taps: spread.delay_taps,
        });
    }
    if spread.doppler_taps == 0 {
        return Err(OtfsError::EmptyGrid("no Doppler taps".into()));
    }
    let mut delays = sample_indices(rng, spread.delay_taps, path_count).into_vec();
    delays.sort_unstable();
    let dopplers = (0..path_count)
        .map(|_| {
            let k = rng.random_range(0..spread.doppler_taps) as f64;
            if frac_doppler {
                // open interval: reject the single endpoint value
                loop {
                    let kappa: f64 = rng.random::<f64>() - 0.5;
                    if kappa > -0.5 {
                        break k + kappa;
                    }
                }
            } else {
                k
            }
        })
        .collect();
    Ok(PathSupport { delays, dopplers })
}

/// How mixture components are assigned to the paths of one realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatentMode {
    /// Each path draws its own component.
    PerPath,
    /// One component is drawn per realization and shared by all its paths.
    PerRealization,
}

/// Draws `count` gains from `gmm`, returning the gains and the component
/// index behind each one.
pub fn draw_gains<R: Rng + ?Sized>(
    gmm: &GmmSpec,
    count: usize,
    mode: LatentMode,
    rng: &mut R,
) -> (Vec<Complex64>, Vec<usize>) {
    let shared = match mode {
        LatentMode::PerRealization => Some(gmm.sample_component(rng)),
        LatentMode::PerPath => None,
    };
    (0..count)
        .map(|_| {
            let k = shared.unwrap_or_else(|| gmm.sample_component(rng));
            (gmm.sample_from(k, rng), k)
        })
        .unzip()
}

/// Random clustered channel with one mixture draw per path.
pub fn sample_channel<R: Rng + ?Sized>(
    gmm: &GmmSpec,
    path_count: usize,
    spread: DdSpread,
    frac_doppler: bool,
    rng: &mut R,
) -> Result<ChannelRealization> {
    let support = sample_support(path_count, spread, frac_doppler, rng)?;
    let (gains, _) = draw_gains(gmm, path_count, LatentMode::PerPath, rng);
    Ok(ChannelRealization {
        paths: support.with_gains(&gains),
        origin: ChannelOrigin::Mixture(gmm.clone()),
    })
}

/// Maps physical (delay s, Doppler Hz) pairs to `(l, c)` with
/// `l = round(τ MΔf)` and `c = ν NT`.
pub fn profile_to_taps(
    profile: &[(f64, f64)],
    cfg: &FrameConfig,
    spread: DdSpread,
) -> Result<Vec<(usize, f64)>> {
    let max_delay = spread.delay_taps as f64 / cfg.bandwidth();
    let max_doppler = spread.doppler_taps as f64 / cfg.frame_duration();
    profile
        .iter()
        .map(|&(tau, nu)| {
            if !(tau >= 0.0) || tau > max_delay * (1.0 + 1e-12) {
                return Err(OtfsError::OutOfGrid(format!(
                    "delay {tau:e} s outside [0, {max_delay:e}]"
                )));
            }
            if !nu.is_finite() || nu.abs() > max_doppler * (1.0 + 1e-12) {
                return Err(OtfsError::OutOfGrid(format!(
                    "Doppler {nu} Hz beyond ±{max_doppler}"
                )));
            }
            let l = (tau * cfg.bandwidth()).round() as usize;
            if l >= spread.delay_taps {
                return Err(OtfsError::OutOfGrid(format!(
                    "delay tap {l} beyond {}",
                    spread.delay_taps - 1
                )));
            }
            Ok((l, nu * cfg.frame_duration()))
        })
        .collect()
}

/// One row of a DD profile table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileEntry {
    pub index: usize,
    pub delay_us: f64,
    pub doppler_hz: f64,
}

/// The five-path high-mobility reference profile.
pub fn reference_profile() -> Vec<ProfileEntry> {
    [
        (1, 2.08, 0.0),
        (2, 4.164, 470.0),
        (3, 6.246, 940.0),
        (4, 8.328, 1410.0),
        (5, 10.42, 1880.0),
    ]
    .into_iter()
    .map(|(index, delay_us, doppler_hz)| ProfileEntry {
        index,
        delay_us,
        doppler_hz,
    })
    .collect()
}

/// Parses a whitespace- or comma-separated table with one path per line:
/// `index delay_us doppler_hz`. Blank lines and `#` comments are skipped.
pub fn parse_profile(text: &str) -> Result<Vec<ProfileEntry>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        let bad = || {
            OtfsError::InvalidConfig(format!(
                "profile line {}: expected 'index delay_us doppler_hz'",
                lineno + 1
            ))
        };
        if fields.len() != 3 {
            return Err(bad());
        }
        let index = fields[0].parse().map_err(|_| bad())?;
        let delay_us: f64 = fields[1].parse().map_err(|_| bad())?;
        let doppler_hz: f64 = fields[2].parse().map_err(|_| bad())?;
        out.push(ProfileEntry {
            index,
            delay_us,
            doppler_hz,
        });
    }
    if out.is_empty() {
        return Err(OtfsError::InvalidConfig("profile has no paths".into()));
    }
    Ok(out)
}

pub fn load_profile(path: &Path) -> Result<Vec<ProfileEntry>> {
    parse_profile(&std::fs::read_to_string(path)?)
}

/// Delay/Doppler support of a profile on the frame grid.
pub fn profile_support(
    entries: &[ProfileEntry],
    cfg: &FrameConfig,
    spread: DdSpread,
) -> Result<PathSupport> {
    let physical: Vec<(f64, f64)> = entries
        .iter()
        .map(|e| (e.delay_us * 1e-6, e.doppler_hz))
        .collect();
    let taps = profile_to_taps(&physical, cfg, spread)?;
    let mut delays: Vec<usize> = taps.iter().map(|t| t.0).collect();
    delays.sort_unstable();
    delays.dedup();
    if delays.len() != taps.len() {
        return Err(OtfsError::OutOfGrid(
            "profile paths share a delay tap".into(),
        ));
    }
    Ok(PathSupport {
        delays: taps.iter().map(|t| t.0).collect(),
        dopplers: taps.iter().map(|t| t.1).collect(),
    })
}

/// Channel on a cyclic block stored as one weighted diagonal per delay:
/// `(H s)[p] = Σ_l d_l[p] s[(p - l) mod size]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TdChannel {
    size: usize,
    // sorted by delay, delays unique
    taps: Vec<(usize, Vec<Complex64>)>,
}

impl TdChannel {
    pub fn zero(size: usize) -> Self {
        Self {
            size,
            taps: Vec::new(),
        }
    }

    /// Superposition of `paths` over a block of `size` samples with phase step
    /// `phase_base` per sample and unit Doppler.
    pub fn from_paths(paths: &[PathSpec], size: usize, phase_base: f64) -> Result<Self> {
        if size == 0 {
            return Err(OtfsError::DimensionMismatch("empty block".into()));
        }
        let mut ch = Self::zero(size);
        for p in paths {
            if p.gain == Complex64::new(0.0, 0.0) {
                continue;
            }
            let step = phase_base * p.doppler;
            let diag = ch.diagonal_mut(p.delay % size);
            let l = p.delay as f64;
            for (q, d) in diag.iter_mut().enumerate() {
                *d += p.gain * Complex64::from_polar(1.0, step * (q as f64 - l));
            }
        }
        Ok(ch)
    }

    fn diagonal_mut(&mut self, delay: usize) -> &mut Vec<Complex64> {
        let pos = match self.taps.binary_search_by_key(&delay, |t| t.0) {
            Ok(pos) => pos,
            Err(pos) => {
                self.taps
                    .insert(pos, (delay, vec![Complex64::new(0.0, 0.0); self.size]));
                pos
            }
        };
        &mut self.taps[pos].1
    }

    /// Adds a full diagonal for `delay`.
    pub fn add_diagonal(&mut self, delay: usize, diag: &[Complex64]) -> Result<()> {
        if diag.len() != self.size {
            return Err(OtfsError::DimensionMismatch(format!(
                "diagonal of length {} for size {}",
                diag.len(),
                self.size
            )));
        }
        let d = self.diagonal_mut(delay % self.size);
        for (a, &b) in d.iter_mut().zip(diag) {
            *a += b;
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn taps(&self) -> &[(usize, Vec<Complex64>)] {
        &self.taps
    }

    pub fn apply(&self, s: &[Complex64]) -> Result<Vec<Complex64>> {
        if s.len() != self.size {
            return Err(OtfsError::DimensionMismatch(format!(
                "input of length {} for size {}",
                s.len(),
                self.size
            )));
        }
        let n = self.size;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (l, d) in &self.taps {
            let l = *l;
            for p in 0..n {
                out[p] += d[p] * s[(p + n - l) % n];
            }
        }
        Ok(out)
    }

    /// `Hᴴ v`.
    pub fn adjoint_apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.size {
            return Err(OtfsError::DimensionMismatch(format!(
                "input of length {} for size {}",
                v.len(),
                self.size
            )));
        }
        let n = self.size;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (l, d) in &self.taps {
            for p in 0..n {
                out[(p + n - l) % n] += d[p].conj() * v[p];
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let n = self.size;
        let mut h = ComplexMatrix::zeros(n, n);
        for (l, d) in &self.taps {
            for p in 0..n {
                h[(p, (p + n - l) % n)] += d[p];
            }
        }
        h
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.taps
            .iter()
            .flat_map(|(_, d)| d.iter())
            .map(|z| z.norm_sqr())
            .sum()
    }

    /// `‖self - other‖²_F`.
    pub fn distance_sqr(&self, other: &TdChannel) -> Result<f64> {
        if self.size != other.size {
            return Err(OtfsError::DimensionMismatch(format!(
                "sizes {} and {}",
                self.size, other.size
            )));
        }
        let mut total = 0.0;
        let (mut a, mut b) = (self.taps.iter().peekable(), other.taps.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(x), Some(y)) if x.0 == y.0 => {
                    total +=
                        x.1.iter()
                            .zip(&y.1)
                            .map(|(p, q)| (p - q).norm_sqr())
                            .sum::<f64>();
                    a.next();
                    b.next();
                }
                (Some(x), Some(y)) if x.0 < y.0 => {
                    total += x.1.iter().map(|z| z.norm_sqr()).sum::<f64>();
                    a.next();
                }
                (Some(_), Some(y)) => {
                    total += y.1.iter().map(|z| z.norm_sqr()).sum::<f64>();
                    b.next();
                }
                (Some(x), None) => {
                    total += x.1.iter().map(|z| z.norm_sqr()).sum::<f64>();
                    a.next();
                }
                (None, Some(y)) => {
                    total += y.1.iter().map(|z| z.norm_sqr()).sum::<f64>();
                    b.next();
                }
                (None, None) => break,
            }
        }
        Ok(total)
    }
}

/// Dense time-domain channel matrix `Σ h_i Π^{l_i} Δ^{c_i}` over `size` samples.
pub fn td_channel_matrix(
    ch: &ChannelRealization,
    size: usize,
    phase_base: f64,
) -> Result<ComplexMatrix> {
    Ok(TdChannel::from_paths(&ch.paths, size, phase_base)?.to_dense())
}

/// Adds `CN(0, σ²)` noise in place.
pub fn add_noise<R: Rng + ?Sized>(v: &mut [Complex64], sigma2: f64, rng: &mut R) {
    if sigma2 > 0.0 {
        for z in v.iter_mut() {
            *z += complex_normal(sigma2, rng);
        }
    }
}

/// `r = H s + η` with `η ~ CN(0, σ² I)`.
pub fn apply_channel<R: Rng + ?Sized>(
    h: &ComplexMatrix,
    s: &[Complex64],
    sigma2: f64,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if !(sigma2 >= 0.0) {
        return Err(OtfsError::NonPositiveNoise(sigma2));
    }
    let mut r = h.matvec(s)?;
    add_noise(&mut r, sigma2, rng);
    Ok(r)
}

/// Linear (non-cyclic) propagation of a sample stream through `paths`.
///
/// Time zero is the first sample after a `cp`-sample prefix, so feeding
/// `add_cp(s, cp)` and dropping the first `cp` outputs yields the cyclic
/// model whenever every delay is at most `cp`.
pub fn propagate_linear(
    paths: &[PathSpec],
    stream: &[Complex64],
    cp: usize,
    phase_base: f64,
) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); stream.len()];
    for p in paths {
        for (t, o) in out.iter_mut().enumerate() {
            if t < p.delay {
                continue;
            }
            let lag = t as f64 - cp as f64 - p.delay as f64;
            *o += p.gain
                * Complex64::from_polar(1.0, phase_base * p.doppler * lag)
                * stream[t - p.delay];
        }
    }
    out
}
