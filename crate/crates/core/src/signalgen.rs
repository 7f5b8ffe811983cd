//! Sparse multiband test signals on the Nyquist grid.
//!
//! Each band is a sinc pulse of two-sided width `B` shifted to a carrier:
//!
//! ```text
//! x(t) = sum_i sqrt(E_i * B) * sinc(B (t - t_i)) * cos(2 pi f_i (t - t_i))
//! ```
//!
//! with `sinc(u) = sin(pi u) / (pi u)`, so band `i` occupies
//! `[f_i - B/2, f_i + B/2]` and its mirror image.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{bin_index, signed_bin, GridConfig};

/// Cap returned by [`snr_db`] when the estimate is exact.
pub const SNR_CAP_DB: f64 = 300.0;

/// Default fraction trimmed from each end of the record before measuring SNR.
pub const DEFAULT_EDGE_MARGIN: f64 = 0.05;

/// One pair of active bands (positive carrier and its mirror).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSpec {
    /// Energy coefficient `E_i`.
    pub energy: f64,
    /// Two-sided band width `B` in Hz.
    pub bandwidth: f64,
    /// Pulse center `t_i` in seconds from the start of the record.
    pub time_offset: f64,
    /// Carrier `f_i` in Hz.
    pub carrier: f64,
}

impl BandSpec {
    pub fn new(energy: f64, bandwidth: f64, time_offset: f64, carrier: f64) -> Self {
        Self {
            energy,
            bandwidth,
            time_offset,
            carrier,
        }
    }

    /// Legal carrier range `[B/2, (f_nyq - B)/2]`.
    pub fn carrier_range(bandwidth: f64, grid: &GridConfig) -> (f64, f64) {
        (bandwidth / 2.0, (grid.f_nyq() - bandwidth) / 2.0)
    }

    pub fn validate(&self, grid: &GridConfig) -> Result<()> {
        if !(self.bandwidth.is_finite() && self.bandwidth > 0.0) {
            return Err(Error::InvalidBand(format!(
                "band width must be positive, got {}",
                self.bandwidth
            )));
        }
        if !(self.energy.is_finite() && self.energy >= 0.0) {
            return Err(Error::InvalidBand(format!(
                "energy must be non-negative, got {}",
                self.energy
            )));
        }
        let slack = 1e-9 * grid.f_nyq();
        if self.bandwidth > grid.fp() + slack {
            return Err(Error::BandTooWide {
                bandwidth_hz: self.bandwidth,
                fp_hz: grid.fp(),
            });
        }
        let (lo, hi) = Self::carrier_range(self.bandwidth, grid);
        if !(self.carrier >= lo - slack && self.carrier <= hi + slack) {
            return Err(Error::CarrierOutOfRange {
                carrier_hz: self.carrier,
                min_hz: lo,
                max_hz: hi,
            });
        }
        let t_slack = 1e-9 * grid.duration();
        if !(self.time_offset >= -t_slack && self.time_offset <= grid.duration() + t_slack) {
            return Err(Error::InvalidBand(format!(
                "time offset {} s outside record [0, {}] s",
                self.time_offset,
                grid.duration()
            )));
        }
        Ok(())
    }
}

/// Nyquist-grid samples plus whatever ground truth is known about them.
#[derive(Debug, Clone, PartialEq)]
pub struct MultibandSignal {
    pub grid: GridConfig,
    pub samples: Vec<f64>,
    /// Ground-truth bands; empty when the signal came from outside.
    pub bands: Vec<BandSpec>,
}

impl MultibandSignal {
    /// Wraps externally supplied samples with no band ground truth.
    pub fn from_samples(grid: GridConfig, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: samples.len(),
            });
        }
        Ok(Self {
            grid,
            samples,
            bands: Vec::new(),
        })
    }

    /// Spectral occupation ratio `2 * sum(B_i) / (f_nyq / 2)`.
    pub fn occupation_q(&self) -> f64 {
        let occupied: f64 = self.bands.iter().map(|b| 2.0 * b.bandwidth).sum();
        occupied / (self.grid.f_nyq() / 2.0)
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum()
    }

    /// Exact decomposition of the record spectrum into `L` slices.
    pub fn slice_spectra(&self) -> DMatrix<Complex64> {
        slice_spectra(&self.samples, &self.grid)
    }
}

fn sinc(u: f64) -> f64 {
    if u == 0.0 {
        1.0
    } else {
        let a = PI * u;
        a.sin() / a
    }
}

pub fn generate_multiband(grid: GridConfig, bands: &[BandSpec]) -> Result<MultibandSignal> {
    for b in bands {
        b.validate(&grid)?;
    }
    let t = grid.period();
    let samples = (0..grid.len())
        .map(|n| {
            let tn = n as f64 * t;
            bands
                .iter()
                .map(|b| {
                    let dt = tn - b.time_offset;
                    (b.energy * b.bandwidth).sqrt()
                        * sinc(b.bandwidth * dt)
                        * (2.0 * PI * b.carrier * dt).cos()
                })
                .sum()
        })
        .collect();
    Ok(MultibandSignal {
        grid,
        samples,
        bands: bands.to_vec(),
    })
}

/// Adds white Gaussian noise scaled so that `||x||^2 / ||noise||^2` equals
/// `target_snr_db` in expectation. An infinite target returns the input.
pub fn add_awgn(sig: &MultibandSignal, target_snr_db: f64, seed: u64) -> MultibandSignal {
    if target_snr_db.is_infinite() && target_snr_db > 0.0 {
        return sig.clone();
    }
    let n = sig.samples.len().max(1) as f64;
    let power = sig.energy() / n;
    let sigma = (power / 10f64.powf(target_snr_db / 10.0)).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = sig
        .samples
        .iter()
        .map(|&v| {
            let g: f64 = StandardNormal.sample(&mut rng);
            v + sigma * g
        })
        .collect();
    MultibandSignal {
        grid: sig.grid,
        samples,
        bands: sig.bands.clone(),
    }
}

/// `10 log10(||r||^2 / ||r - e||^2)` over the interior of the record,
/// skipping `floor(edge_margin * N)` samples at each end. Exact estimates
/// report [`SNR_CAP_DB`].
pub fn snr_db(reference: &[f64], estimate: &[f64], edge_margin: f64) -> Result<f64> {
    if reference.len() != estimate.len() {
        return Err(Error::LengthMismatch {
            expected: reference.len(),
            got: estimate.len(),
        });
    }
    if !(0.0..=0.25).contains(&edge_margin) {
        return Err(Error::InvalidMargin(edge_margin));
    }
    let n = reference.len();
    let skip = (edge_margin * n as f64).floor() as usize;
    let (mut sig, mut err) = (0.0, 0.0);
    for i in skip..n - skip {
        sig += reference[i] * reference[i];
        let d = reference[i] - estimate[i];
        err += d * d;
    }
    if sig == 0.0 {
        return Err(Error::ZeroReference);
    }
    if err == 0.0 {
        return Ok(SNR_CAP_DB);
    }
    Ok((10.0 * (sig / err).log10()).min(SNR_CAP_DB))
}

/// Slices whose interval `[c_l - f_p/2, c_l + f_p/2)` overlaps (with positive
/// measure) any band `+-[f_i - B/2, f_i + B/2]`. Returned 1-based.
pub fn true_support_slices(sig: &MultibandSignal) -> BTreeSet<usize> {
    support_of_bands(&sig.grid, &sig.bands)
}

pub fn support_of_bands(grid: &GridConfig, bands: &[BandSpec]) -> BTreeSet<usize> {
    let fp = grid.fp();
    let mut out = BTreeSet::new();
    for b in bands.iter().filter(|b| b.energy > 0.0) {
        for sign in [1.0, -1.0] {
            let center = sign * b.carrier;
            let lo = center - b.bandwidth / 2.0;
            let hi = center + b.bandwidth / 2.0;
            for l in 1..=grid.slices() {
                let c = grid.slice_center(l);
                if lo < c + fp / 2.0 && hi > c - fp / 2.0 {
                    out.insert(l);
                }
            }
        }
    }
    out
}

/// `s_l(f_j) = X[(l - L_0 - 1) P + j] / L` for every slice `l` (rows) and
/// baseband bin `j` (columns, length-`P` DFT storage order), where `X` is the
/// length-`N` DFT of `samples`.
///
/// The `1/L` puts slice spectra in the units of a length-`P` DFT of the
/// sub-Nyquist samples.
pub fn slice_spectra(samples: &[f64], grid: &GridConfig) -> DMatrix<Complex64> {
    let spectrum = fft::forward_real(samples);
    let (l_count, p, n) = (grid.slices(), grid.n_periods(), grid.len());
    let l0 = grid.half_slices() as i64;
    let scale = 1.0 / l_count as f64;
    DMatrix::from_fn(l_count, p, |row, col| {
        let offset = (row as i64 - l0) * p as i64;
        let bin = offset + signed_bin(col, p);
        spectrum[bin_index(bin, n)] * scale
    })
}
