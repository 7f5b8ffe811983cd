use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::acquisition::{AcquisitionOptions, SamplingMode};
use crate::error::{Error, Result};
use crate::grid::GridConfig;
use crate::recovery::{Pursuit, RecoveryOptions};
use crate::signalgen::DEFAULT_EDGE_MARGIN;

/// Named parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Full published protocol: 200 trials per point.
    Paper,
    /// Same grid, 20 trials per point.
    Desk,
    /// `L = 17` at a lower Nyquist rate; runs in seconds.
    Small,
}

/// Inclusive arithmetic range `start, start + step, ..., <= stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepRange {
    pub fn new(start: f64, stop: f64, step: f64) -> Self {
        Self { start, stop, step }
    }

    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }

    pub fn counts(&self) -> Vec<usize> {
        self.values().into_iter().map(|v| v.round() as usize).collect()
    }

    fn validate(&self, what: &str) -> Result<()> {
        if !(self.step > 0.0 && self.start <= self.stop && self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::Config(format!("{what} range is empty or malformed: {self:?}")));
        }
        Ok(())
    }
}

/// Everything a trial or sweep needs, serializable to TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub f_nyq: f64,
    pub slices: usize,
    pub n_periods: usize,
    pub trials: usize,
    pub master_seed: u64,
    /// Band width `B` in Hz.
    pub bandwidth: f64,
    pub energy_min: f64,
    pub energy_max: f64,
    /// Pulse-time window in seconds. The window is centered in the record.
    pub time_min: f64,
    pub time_max: f64,
    /// Band pairs `K` when not swept.
    pub k: usize,
    /// Acquisitions `M` when not swept.
    pub m: usize,
    /// Input SNR in dB when not swept; `inf` is noiseless.
    pub input_snr_db: f64,
    /// `None` picks `min(4K, M - 2)`.
    pub max_bands: Option<usize>,
    pub residual_tol: f64,
    pub symmetric: bool,
    pub eig_threshold: f64,
    pub edge_margin: f64,
    pub pursuit: Pursuit,
    pub mode: SamplingMode,
    pub tau_jitter: u32,
    pub k_sweep: SweepRange,
    pub snr_sweep: SweepRange,
    pub m_sweep: SweepRange,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::profile(Profile::Desk)
    }
}

impl ExperimentConfig {
    pub fn profile(profile: Profile) -> Self {
        let desk = Self {
            f_nyq: 2.5e9,
            slices: 197,
            n_periods: 513,
            trials: 20,
            master_seed: 1,
            bandwidth: 10e6,
            energy_min: 1.0,
            energy_max: 10.0,
            time_min: 0.0,
            time_max: 10e-6,
            k: 3,
            m: 20,
            input_snr_db: f64::INFINITY,
            max_bands: None,
            residual_tol: 1e-3,
            symmetric: true,
            eig_threshold: 1e-6,
            edge_margin: DEFAULT_EDGE_MARGIN,
            pursuit: Pursuit::default(),
            mode: SamplingMode::Exact,
            tau_jitter: 0,
            k_sweep: SweepRange::new(1.0, 15.0, 1.0),
            snr_sweep: SweepRange::new(10.0, 50.0, 5.0),
            m_sweep: SweepRange::new(10.0, 20.0, 1.0),
        };
        match profile {
            Profile::Desk => desk,
            Profile::Paper => Self { trials: 200, ..desk },
            Profile::Small => Self {
                f_nyq: 250e6,
                slices: 17,
                n_periods: 65,
                trials: 10,
                bandwidth: 5e6,
                time_max: 1e-6,
                k: 2,
                m: 12,
                k_sweep: SweepRange::new(1.0, 4.0, 1.0),
                snr_sweep: SweepRange::new(10.0, 50.0, 10.0),
                m_sweep: SweepRange::new(8.0, 12.0, 1.0),
                ..desk
            },
        }
    }

    pub fn from_toml_file(path: &Path) -> Result<Self> {
        Self::from_toml_file_over(&Self::default(), path)
    }

    /// Reads a TOML file whose keys override `base`.
    pub fn from_toml_file_over(base: &Self, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(Error::file(path))?;
        Self::from_toml_str_over(base, &text, path)
    }

    pub fn from_toml_str(text: &str, path: &Path) -> Result<Self> {
        Self::from_toml_str_over(&Self::default(), text, path)
    }

    /// Parses `text` as a partial config layered over `base`. Unknown keys
    /// and type errors are reported with their line in `path`.
    pub fn from_toml_str_over(base: &Self, text: &str, path: &Path) -> Result<Self> {
        let parse_err = |e: toml::de::Error| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(0);
            Error::Parse {
                path: path.to_path_buf(),
                line,
                msg: e.message().to_string(),
            }
        };
        // Typed parse first, for key and type errors with positions.
        toml::from_str::<Self>(text).map_err(parse_err)?;
        let overlay: toml::Table = toml::from_str(text).map_err(parse_err)?;
        let mut merged = toml::Table::try_from(base).map_err(|e| Error::Config(e.to_string()))?;
        merged.extend(overlay);
        let cfg: Self = toml::Value::Table(merged)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn grid(&self) -> Result<GridConfig> {
        GridConfig::new(self.f_nyq, self.slices, self.n_periods)
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.grid()?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.m == 0 {
            return Err(Error::Config("m must be >= 1".into()));
        }
        if !(self.bandwidth > 0.0 && self.bandwidth <= grid.fp()) {
            return Err(Error::Config(format!(
                "bandwidth {} Hz must lie in (0, f_p = {} Hz]",
                self.bandwidth,
                grid.fp()
            )));
        }
        if !(self.energy_min > 0.0 && self.energy_min <= self.energy_max) {
            return Err(Error::Config("energy range is empty".into()));
        }
        if self.time_min > self.time_max || self.time_min.is_nan() || self.time_max.is_nan() {
            return Err(Error::Config("time range is empty".into()));
        }
        if self.time_max - self.time_min > grid.duration() {
            return Err(Error::Config(format!(
                "time window {} s longer than the record {} s",
                self.time_max - self.time_min,
                grid.duration()
            )));
        }
        if !(0.0..=0.25).contains(&self.edge_margin) {
            return Err(Error::InvalidMargin(self.edge_margin));
        }
        self.k_sweep.validate("k_sweep")?;
        self.snr_sweep.validate("snr_sweep")?;
        self.m_sweep.validate("m_sweep")?;
        Ok(())
    }

    /// Support budget for `k` band pairs and `m` acquisitions.
    pub fn max_bands_for(&self, k: usize, m: usize) -> usize {
        match self.max_bands {
            Some(b) => b.min(m),
            None => (4 * k).min(m.saturating_sub(2)).max(1).min(m),
        }
    }

    pub fn recovery_options(&self, k: usize, m: usize) -> RecoveryOptions {
        RecoveryOptions {
            max_bands: self.max_bands_for(k, m),
            residual_tol: self.residual_tol,
            symmetric: self.symmetric,
            eig_threshold: self.eig_threshold,
            edge_margin: self.edge_margin,
            pursuit: self.pursuit,
        }
    }

    pub fn acquisition_options(&self) -> AcquisitionOptions {
        AcquisitionOptions {
            mode: self.mode,
            tau_jitter: self.tau_jitter,
        }
    }
}
