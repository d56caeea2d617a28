//! Seeded Monte Carlo driver for the NMSE / SER studies.
//!
//! A trial draws one path support (delays and Doppler indices) per mixture
//! component of the channel and then `L` pilot snapshots. Each snapshot picks
//! one component, draws fresh gains from it on that component's support and
//! adds fresh noise. With a single component every snapshot shares the support
//! and only the gains change. Every estimator sees the same snapshots. NMSE is scored per
//! snapshot against the exact time-domain channel of that snapshot and
//! averaged over snapshots. SER uses the channel and estimate of the first
//! snapshot to detect one random QPSK frame.
//!
//! Randomness comes from one ChaCha20 generator per `(trial, purpose)` pair,
//! so results do not depend on scheduling or on the worker count.
//!
//! # Configuration grammar
//!
//! One `key = value` pair per line, `#` starts a comment, lists are
//! comma-separated. Unknown keys are errors. See [`RunConfig::set`] for the
//! keys.

use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::channel::{
    add_noise, load_profile, profile_support, reference_profile, sample_support, DdSpread, GmmSpec,
    MixtureCase, PathSpec, PathSupport, TdChannel,
};
use crate::detection::{lmmse_detect_td, nmse_td, ser, FineGridSynth, SymbolFrame};
use crate::estimators::{
    focuss, gmm_sbl_fit, lasso, omp, oracle_mmse_with_prior, FocussConfig, GmmSblConfig, InitMode,
    LassoConfig, Method, OmpConfig,
};
use crate::frame::{modulate, FrameConfig};
use crate::pilot::{build_dictionary, generate_pilot, pilot_response, Dictionary, DictionaryGrid};
use crate::{snr_db_to_sigma2, OtfsError, Result};

/// Where path gains and positions come from.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelMode {
    /// Random support with zero-mean gains of mixture order `k_true`.
    Mixture,
    /// Random support with gains from one of the four-component presets.
    Case(MixtureCase),
    /// Fixed support from a DD profile table; the built-in one when no file is given.
    Profile(Option<PathBuf>),
}

impl fmt::Display for ChannelMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelMode::Mixture => f.write_str("mixture"),
            ChannelMode::Case(c) => write!(f, "case:{}", case_letter(*c)),
            ChannelMode::Profile(None) => f.write_str("profile"),
            ChannelMode::Profile(Some(p)) => write!(f, "profile:{}", p.display()),
        }
    }
}

fn case_letter(c: MixtureCase) -> char {
    match c {
        MixtureCase::WellSeparated => 'A',
        MixtureCase::Clustered => 'B',
        MixtureCase::UnevenWeights => 'C',
        MixtureCase::Outlier => 'D',
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub frame: FrameConfig,
    pub delay_taps: usize,
    pub doppler_taps: usize,
    pub doppler_bins: usize,
    /// Pilot lengths `N_p` to sweep.
    pub pilot_lens: Vec<usize>,
    /// Snapshot counts `L` to sweep.
    pub snapshots: Vec<usize>,
    /// Dominant paths `L_p`.
    pub paths: usize,
    pub snr_db: Vec<f64>,
    pub estimators: Vec<Method>,
    /// Mixture orders fitted by `gmm_sbl`, one result per order.
    pub k_model: Vec<usize>,
    /// Mixture order of the generated gains in [`ChannelMode::Mixture`].
    pub k_true: usize,
    pub channel: ChannelMode,
    pub trials: usize,
    pub seed: u64,
    pub pilot_seed: u64,
    pub frac_doppler: bool,
    pub out: Option<PathBuf>,
    /// Worker threads; zero uses every available core.
    pub workers: usize,
    pub ser: bool,
    /// Record wall-clock time per estimator. Off keeps the CSV reproducible.
    pub timing: bool,
    pub em_iters: usize,
    pub init: InitMode,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            frame: FrameConfig::default(),
            delay_taps: 16,
            doppler_taps: 10,
            doppler_bins: 20,
            pilot_lens: vec![80],
            snapshots: vec![10],
            paths: 5,
            snr_db: vec![0.0],
            estimators: vec![Method::GmmSbl],
            k_model: vec![2],
            k_true: 1,
            channel: ChannelMode::Mixture,
            trials: 500,
            seed: 1,
            pilot_seed: 7,
            frac_doppler: false,
            out: None,
            workers: 0,
            ser: true,
            timing: false,
            em_iters: 100,
            init: InitMode::PowerQuantile,
        }
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    let items: Vec<&str> = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() {
        return Err(OtfsError::InvalidConfig(format!("{key}: empty list")));
    }
    items
        .iter()
        .map(|s| {
            s.parse()
                .map_err(|_| OtfsError::InvalidConfig(format!("{key}: cannot parse '{s}'")))
        })
        .collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| OtfsError::InvalidConfig(format!("{key}: cannot parse '{}'", value.trim())))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        other => Err(OtfsError::InvalidConfig(format!(
            "{key}: expected a boolean, got '{other}'"
        ))),
    }
}

impl RunConfig {
    /// Defaults overridden by the `key = value` lines of `text`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply(text)?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Applies the `key = value` lines of `text` on top of `self`.
    pub fn apply(&mut self, text: &str) -> Result<()> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                OtfsError::InvalidConfig(format!("line {}: expected 'key = value'", no + 1))
            })?;
            self.set(key.trim(), value.trim()).map_err(|e| {
                OtfsError::InvalidConfig(format!("line {}: {}", no + 1, strip_prefix(&e)))
            })?;
        }
        Ok(())
    }

    /// Sets one key.
    ///
    /// | key | value |
    /// |---|---|
    /// | `m`, `n` | grid size |
    /// | `delta_f` | subcarrier spacing in Hz; the symbol time follows as `1/Δf` |
    /// | `carrier_hz`, `cp_len` | carrier frequency, CP samples |
    /// | `delay_taps`, `doppler_taps`, `doppler_bins` | dictionary grid |
    /// | `pilot_len` | list of pilot lengths |
    /// | `snapshots` | list of snapshot counts |
    /// | `paths` | dominant paths |
    /// | `snr_db` | list of SNRs |
    /// | `estimators` | list of `gmm_sbl`, `sbl`, `omp`, `focuss`, `lasso`, `oracle_mmse` |
    /// | `k_model` | list of fitted mixture orders |
    /// | `k_true` | generated mixture order |
    /// | `channel` | `mixture`, `case:A`..`case:D`, `profile` or `profile:<file>` |
    /// | `trials`, `seed`, `pilot_seed`, `workers`, `em_iters` | integers |
    /// | `frac_doppler`, `ser`, `timing` | booleans |
    /// | `init` | `power` (default), `spread` or `identity` |
    /// | `out` | CSV path |
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "m" => self.frame.m = parse_one(key, value)?,
            "n" => self.frame.n = parse_one(key, value)?,
            "delta_f" => {
                self.frame.delta_f = parse_one(key, value)?;
                self.frame.symbol_time = 1.0 / self.frame.delta_f;
            }
            "carrier_hz" => self.frame.carrier_hz = parse_one(key, value)?,
            "cp_len" => self.frame.cp_len = parse_one(key, value)?,
            "delay_taps" => self.delay_taps = parse_one(key, value)?,
            "doppler_taps" => self.doppler_taps = parse_one(key, value)?,
            "doppler_bins" => self.doppler_bins = parse_one(key, value)?,
            "pilot_len" => self.pilot_lens = parse_list(key, value)?,
            "snapshots" => self.snapshots = parse_list(key, value)?,
            "paths" => self.paths = parse_one(key, value)?,
            "snr_db" => self.snr_db = parse_list(key, value)?,
            "estimators" => self.estimators = parse_list(key, value)?,
            "k_model" => self.k_model = parse_list(key, value)?,
            "k_true" => self.k_true = parse_one(key, value)?,
            "channel" => self.channel = parse_channel(value)?,
            "trials" => self.trials = parse_one(key, value)?,
            "seed" => self.seed = parse_one(key, value)?,
            "pilot_seed" => self.pilot_seed = parse_one(key, value)?,
            "workers" => self.workers = parse_one(key, value)?,
            "em_iters" => self.em_iters = parse_one(key, value)?,
            "frac_doppler" => self.frac_doppler = parse_bool(key, value)?,
            "ser" => self.ser = parse_bool(key, value)?,
            "timing" => self.timing = parse_bool(key, value)?,
            "init" => {
                self.init = match value.trim() {
                    "spread" => InitMode::Spread,
                    "identity" => InitMode::Identity,
                    "power" => InitMode::PowerQuantile,
                    other => {
                        return Err(OtfsError::InvalidConfig(format!(
                            "init: unknown mode '{other}'"
                        )))
                    }
                }
            }
            "out" => self.out = Some(PathBuf::from(value.trim())),
            other => return Err(OtfsError::InvalidConfig(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.frame.validate()?;
        self.grid(self.pilot_lens.first().copied().unwrap_or(1))
            .validate()?;
        let bad = |msg: &str| Err(OtfsError::InvalidConfig(msg.to_string()));
        if self.pilot_lens.is_empty() || self.pilot_lens.contains(&0) {
            return bad("pilot lengths must be positive");
        }
        if self.snapshots.is_empty() || self.snapshots.contains(&0) {
            return bad("snapshot counts must be positive");
        }
        if self.snr_db.is_empty() || self.snr_db.iter().any(|s| !s.is_finite()) {
            return bad("SNR list must be finite and non-empty");
        }
        if self.estimators.is_empty() {
            return bad("no estimators selected");
        }
        if self.estimators.contains(&Method::GmmSbl)
            && (self.k_model.is_empty() || self.k_model.contains(&0))
        {
            return bad("mixture orders must be positive");
        }
        if self.k_true == 0 || self.trials == 0 || self.em_iters == 0 {
            return bad("k_true, trials and em_iters must be positive");
        }
        if self.delay_taps > self.frame.cp_len + 1 {
            return bad("delay spread exceeds the cyclic prefix");
        }
        if let ChannelMode::Mixture | ChannelMode::Case(_) = self.channel {
            if self.paths == 0 {
                return bad("at least one path is required");
            }
            if self.paths > self.delay_taps {
                return Err(OtfsError::TooManyPaths {
                    paths: self.paths,
                    taps: self.delay_taps,
                });
            }
        }
        if self.trials as u64 >= 1 << 60 {
            return bad("too many trials");
        }
        Ok(())
    }

    pub fn grid(&self, _pilot_len: usize) -> DictionaryGrid {
        DictionaryGrid::new(
            self.delay_taps,
            self.doppler_taps,
            self.doppler_bins,
            &self.frame,
        )
    }

    pub fn spread(&self) -> DdSpread {
        DdSpread {
            delay_taps: self.delay_taps,
            doppler_taps: self.doppler_taps,
        }
    }

    /// Result labels in row order.
    pub fn labels(&self) -> Vec<String> {
        let mut out = Vec::new();
        for m in &self.estimators {
            if *m == Method::GmmSbl {
                out.extend(self.k_model.iter().map(|k| format!("gmm_sbl_k{k}")));
            } else {
                out.push(m.name().to_string());
            }
        }
        out
    }

    /// The gain distribution of generated channels.
    pub fn gain_model(&self) -> Result<GmmSpec> {
        match &self.channel {
            ChannelMode::Case(c) => Ok(GmmSpec::case(*c)),
            _ => GmmSpec::balanced(self.k_true),
        }
    }

    /// Sweep points in row order: pilot length, then snapshots, then SNR.
    pub fn points(&self) -> Vec<SweepPoint> {
        let mut out = Vec::new();
        for &pilot_len in &self.pilot_lens {
            for &snapshots in &self.snapshots {
                for &snr_db in &self.snr_db {
                    out.push(SweepPoint {
                        pilot_len,
                        snapshots,
                        snr_db,
                    });
                }
            }
        }
        out
    }

    pub fn scenario_id(&self, point: &SweepPoint) -> String {
        let source = match &self.channel {
            ChannelMode::Mixture => format!("kt{}", self.k_true),
            ChannelMode::Case(c) => format!("case{}", case_letter(*c)),
            ChannelMode::Profile(_) => format!("profile-kt{}", self.k_true),
        };
        let frac = if self.frac_doppler { "-frac" } else { "" };
        format!("np{}-l{}-{source}{frac}", point.pilot_len, point.snapshots)
    }
}

fn strip_prefix(e: &OtfsError) -> String {
    match e {
        OtfsError::InvalidConfig(m) => m.clone(),
        other => other.to_string(),
    }
}

fn parse_channel(value: &str) -> Result<ChannelMode> {
    let v = value.trim();
    if v == "mixture" {
        return Ok(ChannelMode::Mixture);
    }
    if v == "profile" {
        return Ok(ChannelMode::Profile(None));
    }
    if let Some(c) = v.strip_prefix("case:") {
        return Ok(ChannelMode::Case(c.trim().parse()?));
    }
    if let Some(p) = v.strip_prefix("profile:") {
        return Ok(ChannelMode::Profile(Some(PathBuf::from(p.trim()))));
    }
    Err(OtfsError::InvalidConfig(format!(
        "channel: unknown mode '{v}'"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub pilot_len: usize,
    pub snapshots: usize,
    pub snr_db: f64,
}

/// What a trial consumed: the supports, the per-snapshot paths and pilots.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialData {
    /// One support per mixture component.
    pub supports: Vec<PathSupport>,
    /// Component behind each snapshot.
    pub components: Vec<usize>,
    pub paths: Vec<Vec<PathSpec>>,
    pub pilots: Vec<Vec<Complex64>>,
    pub sigma2: f64,
}

/// Per-label outcome of one trial, in [`RunConfig::labels`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub nmse: Vec<f64>,
    pub ser: Vec<Option<f64>>,
    pub elapsed_ns: Vec<u64>,
}

/// All trials of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub scenario: String,
    pub point: SweepPoint,
    pub labels: Vec<String>,
    pub trials: Vec<TrialOutcome>,
}

impl PointSummary {
    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn nmse_samples(&self, idx: usize) -> Vec<f64> {
        self.trials.iter().map(|t| t.nmse[idx]).collect()
    }

    pub fn mean_nmse(&self, idx: usize) -> f64 {
        mean(&self.nmse_samples(idx))
    }

    /// Standard error of the mean NMSE.
    pub fn nmse_std_err(&self, idx: usize) -> f64 {
        std_err(&self.nmse_samples(idx))
    }

    pub fn mean_ser(&self, idx: usize) -> Option<f64> {
        let v: Option<Vec<f64>> = self.trials.iter().map(|t| t.ser[idx]).collect();
        v.map(|v| mean(&v))
    }

    fn elapsed_ms(&self, idx: usize) -> u64 {
        self.trials.iter().map(|t| t.elapsed_ns[idx]).sum::<u64>() / 1_000_000
    }
}

fn component_power(gmm: &GmmSpec, k: usize) -> f64 {
    gmm.variances()[k] + gmm.means()[k].norm_sqr()
}

pub fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn std_err(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64;
    (var / v.len() as f64).sqrt()
}

struct PilotContext {
    dict: Dictionary,
}

/// Precomputed dictionaries and synthesis tables for one configuration.
pub struct Harness {
    cfg: RunConfig,
    support_source: Option<PathSupport>,
    gains: GmmSpec,
    gain_scale: f64,
    synth: FineGridSynth,
    pilots: Vec<(usize, PilotContext)>,
    labels: Vec<String>,
}

const STREAM_SUPPORT: u64 = 0;
const STREAM_GAINS: u64 = 1;
const STREAM_NOISE: u64 = 2;
const STREAM_BITS: u64 = 3;
const STREAM_DATA_NOISE: u64 = 4;

impl Harness {
    pub fn new(cfg: RunConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = cfg.grid(0);
        let support_source = match &cfg.channel {
            ChannelMode::Profile(file) => {
                let entries = match file {
                    Some(p) => load_profile(p)?,
                    None => reference_profile(),
                };
                Some(profile_support(&entries, &cfg.frame, cfg.spread())?)
            }
            _ => None,
        };
        let gains = cfg.gain_model()?;
        let path_count = support_source.as_ref().map_or(cfg.paths, PathSupport::len);
        // unit expected channel energy
        let gain_scale = 1.0 / (path_count as f64 * gains.second_moment()).sqrt();
        let synth = FineGridSynth::new(&grid, &cfg.frame)?;
        let mut pilots = Vec::new();
        for &n_p in &cfg.pilot_lens {
            if pilots.iter().any(|(n, _)| *n == n_p) {
                continue;
            }
            let dict = build_dictionary(&generate_pilot(n_p, cfg.pilot_seed), grid)?;
            if cfg.estimators.contains(&Method::Lasso) {
                dict.gram_ref();
            }
            pilots.push((n_p, PilotContext { dict }));
        }
        let labels = cfg.labels();
        Ok(Self {
            cfg,
            support_source,
            gains,
            gain_scale,
            synth,
            pilots,
            labels,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    fn rng(&self, trial: u64, purpose: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream((trial << 4) | purpose);
        rng
    }

    fn dictionary(&self, pilot_len: usize) -> Result<&Dictionary> {
        self.pilots
            .iter()
            .find(|(n, _)| *n == pilot_len)
            .map(|(_, c)| &c.dict)
            .ok_or_else(|| {
                OtfsError::InvalidConfig(format!("pilot length {pilot_len} is not configured"))
            })
    }

    /// Channel draws and noisy pilot snapshots of one trial.
    pub fn trial_data(&self, point: &SweepPoint, trial: u64) -> Result<TrialData> {
        let dict = self.dictionary(point.pilot_len)?;
        let order = self.gains.order();
        let supports = match &self.support_source {
            Some(s) => vec![s.clone(); order],
            None => {
                let mut rng = self.rng(trial, STREAM_SUPPORT);
                (0..order)
                    .map(|_| {
                        sample_support(
                            self.cfg.paths,
                            self.cfg.spread(),
                            self.cfg.frac_doppler,
                            &mut rng,
                        )
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        let sigma2 = snr_db_to_sigma2(point.snr_db);
        let mut gain_rng = self.rng(trial, STREAM_GAINS);
        let mut noise_rng = self.rng(trial, STREAM_NOISE);
        let mut paths = Vec::with_capacity(point.snapshots);
        let mut pilots = Vec::with_capacity(point.snapshots);
        let mut components = Vec::with_capacity(point.snapshots);
        for _ in 0..point.snapshots {
            let k = self.gains.sample_component(&mut gain_rng);
            let gains: Vec<Complex64> = (0..supports[k].len())
                .map(|_| self.gains.sample_from(k, &mut gain_rng) * self.gain_scale)
                .collect();
            let p = supports[k].with_gains(&gains);
            let mut r = pilot_response(&p, dict.pilot(), &self.cfg.frame)?;
            add_noise(&mut r, sigma2, &mut noise_rng);
            paths.push(p);
            pilots.push(r);
            components.push(k);
        }
        Ok(TrialData {
            supports,
            components,
            paths,
            pilots,
            sigma2,
        })
    }

    /// Runs every configured estimator on one trial.
    pub fn run_trial(&self, point: &SweepPoint, trial: u64) -> Result<TrialOutcome> {
        let data = self.trial_data(point, trial)?;
        let dict = self.dictionary(point.pilot_len)?;
        let block = self.cfg.frame.block_len();
        let phase = self.cfg.frame.doppler_phase_base();
        let truths: Vec<TdChannel> = data
            .paths
            .iter()
            .map(|p| TdChannel::from_paths(p, block, phase))
            .collect::<Result<_>>()?;

        // one data frame through the first snapshot's channel
        let detection = if self.cfg.ser {
            let frame = SymbolFrame::random(block, &mut self.rng(trial, STREAM_BITS));
            let s = modulate(&frame.to_dd(&self.cfg.frame)?, &self.cfg.frame)?;
            let mut r = truths[0].apply(&s)?;
            add_noise(&mut r, data.sigma2, &mut self.rng(trial, STREAM_DATA_NOISE));
            Some((frame, r))
        } else {
            None
        };

        let mut outcome = TrialOutcome {
            nmse: Vec::new(),
            ser: Vec::new(),
            elapsed_ns: Vec::new(),
        };
        for method in &self.cfg.estimators {
            let orders: Vec<usize> = if *method == Method::GmmSbl {
                self.cfg.k_model.clone()
            } else {
                vec![0]
            };
            for k in orders {
                let start = Instant::now();
                let estimates = self.estimate(*method, k, &data, dict)?;
                let elapsed = if self.cfg.timing {
                    start.elapsed().as_nanos() as u64
                } else {
                    0
                };
                let mut total = 0.0;
                let mut first = None;
                for (i, (h, truth)) in estimates.iter().zip(&truths).enumerate() {
                    let est = self.synth.td_channel(h)?;
                    total += nmse_td(&est, truth)?;
                    if i == 0 {
                        first = Some(est);
                    }
                }
                outcome.nmse.push(total / estimates.len() as f64);
                let ser_value = match (&detection, first) {
                    (Some((frame, r)), Some(est)) => {
                        let x = lmmse_detect_td(r, &est, data.sigma2, &self.cfg.frame)?;
                        Some(ser(&x, &frame.symbols)?)
                    }
                    _ => None,
                };
                outcome.ser.push(ser_value);
                outcome.elapsed_ns.push(elapsed);
            }
        }
        Ok(outcome)
    }

    fn estimate(
        &self,
        method: Method,
        k: usize,
        data: &TrialData,
        dict: &Dictionary,
    ) -> Result<Vec<Vec<Complex64>>> {
        let s2 = data.sigma2;
        let snaps = &data.pilots;
        let result = match method {
            Method::GmmSbl | Method::Sbl => {
                let k = if method == Method::Sbl { 1 } else { k };
                let cfg = GmmSblConfig {
                    max_iter: self.cfg.em_iters,
                    init: self.cfg.init,
                    ..GmmSblConfig::new(k, s2)
                };
                gmm_sbl_fit(snaps, dict, &cfg)?.0
            }
            Method::Omp => omp(snaps, dict, &OmpConfig::new(s2))?,
            Method::Focuss => focuss(snaps, dict, &FocussConfig::new(s2))?,
            Method::Lasso => lasso(snaps, dict, &LassoConfig::default())?,
            Method::OracleMmse => {
                let grid = dict.grid();
                let mut estimates = Vec::with_capacity(snaps.len());
                for (r, &k) in snaps.iter().zip(&data.components) {
                    let support = &data.supports[k];
                    let mut cols: Vec<usize> = support
                        .delays
                        .iter()
                        .zip(&support.dopplers)
                        .map(|(&l, &c)| grid.col_of(l, grid.nearest_bin(c)))
                        .collect();
                    cols.sort_unstable();
                    cols.dedup();
                    let prior = self.gain_scale * self.gain_scale * component_power(&self.gains, k);
                    let est =
                        oracle_mmse_with_prior(std::slice::from_ref(r), dict, &cols, s2, prior)?;
                    estimates.extend(est.estimates);
                }
                return Ok(estimates);
            }
        };
        Ok(result.estimates)
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.cfg.workers)
            .build()
            .map_err(|e| OtfsError::InvalidConfig(format!("worker pool: {e}")))
    }

    /// Every trial of one point, in trial order.
    pub fn run_point(&self, point: &SweepPoint) -> Result<PointSummary> {
        let pool = self.pool()?;
        let trials: Vec<TrialOutcome> = pool.install(|| {
            (0..self.cfg.trials as u64)
                .into_par_iter()
                .map(|t| self.run_trial(point, t))
                .collect::<Result<_>>()
        })?;
        Ok(PointSummary {
            scenario: self.cfg.scenario_id(point),
            point: *point,
            labels: self.labels.clone(),
            trials,
        })
    }

    pub fn sweep_detailed(&self) -> Result<Vec<PointSummary>> {
        self.cfg
            .points()
            .iter()
            .map(|p| self.run_point(p))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scenario: String,
    pub estimator: String,
    pub snr_db: f64,
    pub nmse: f64,
    pub nmse_db: f64,
    /// Absent when detection is switched off.
    pub ser: Option<f64>,
    pub trials: usize,
    pub elapsed_ms: u64,
    pub seed: u64,
}

pub fn summaries_to_rows(summaries: &[PointSummary], seed: u64) -> Vec<ResultRow> {
    let mut rows = Vec::new();
    for s in summaries {
        for (idx, label) in s.labels.iter().enumerate() {
            let nmse = s.mean_nmse(idx);
            rows.push(ResultRow {
                scenario: s.scenario.clone(),
                estimator: label.clone(),
                snr_db: s.point.snr_db,
                nmse,
                nmse_db: 10.0 * nmse.log10(),
                ser: s.mean_ser(idx),
                trials: s.trials.len(),
                elapsed_ms: s.elapsed_ms(idx),
                seed,
            });
        }
    }
    rows
}

/// Runs the whole sweep and averages trials per point.
pub fn sweep(cfg: &RunConfig) -> Result<Vec<ResultRow>> {
    let harness = Harness::new(cfg.clone())?;
    Ok(summaries_to_rows(&harness.sweep_detailed()?, cfg.seed))
}

/// Runs one trial of `point` from scratch.
pub fn run_trial(cfg: &RunConfig, point: &SweepPoint, trial: u64) -> Result<TrialOutcome> {
    Harness::new(cfg.clone())?.run_trial(point, trial)
}

pub const CSV_HEADER: [&str; 9] = [
    "scenario",
    "estimator",
    "snr_db",
    "nmse",
    "nmse_db",
    "ser",
    "trials",
    "elapsed_ms",
    "seed",
];

fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.scenario.clone(),
            r.estimator.clone(),
            fmt_float(r.snr_db),
            fmt_float(r.nmse),
            fmt_float(r.nmse_db),
            r.ser.map(fmt_float).unwrap_or_default(),
            r.trials.to_string(),
            r.elapsed_ms.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(rows, std::io::BufWriter::new(file))
}

pub fn parse_csv<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut rd = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(OtfsError::InvalidConfig(format!(
            "unexpected CSV header {header:?}"
        )));
    }
    let bad = |field: &str, v: &str| {
        OtfsError::InvalidConfig(format!("CSV field {field}: cannot parse '{v}'"))
    };
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let get = |i: usize| rec.get(i).unwrap_or("");
        let float = |i: usize| {
            get(i)
                .parse::<f64>()
                .map_err(|_| bad(CSV_HEADER[i], get(i)))
        };
        let int = |i: usize| {
            get(i)
                .parse::<u64>()
                .map_err(|_| bad(CSV_HEADER[i], get(i)))
        };
        rows.push(ResultRow {
            scenario: get(0).to_string(),
            estimator: get(1).to_string(),
            snr_db: float(2)?,
            nmse: float(3)?,
            nmse_db: float(4)?,
            ser: if get(5).is_empty() {
                None
            } else {
                Some(float(5)?)
            },
            trials: int(6)? as usize,
            elapsed_ms: int(7)?,
            seed: int(8)?,
        });
    }
    Ok(rows)
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>> {
    parse_csv(std::fs::File::open(path)?)
}
