//! One random-triggered acquisition: modulate by the chip waveform, ideal
//! lowpass at `f_s/2`, sample at `f_s` starting from the trigger offset.
//!
//! [`acquire`] runs the literal time-domain chain on the Nyquist grid.
//! [`Acquirer`] computes the same samples from the signal spectrum, which is
//! shared across runs; [`acquire_run`] uses it.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chipseq::{fourier_coeffs, in_band_waveform, ChipSet};
use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{bin_index, signed_bin, GridConfig};
use crate::signalgen::MultibandSignal;

/// Where the ADC grid sits relative to the trigger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    /// Samples land on the TDC-quantized offset `tau * T`.
    #[default]
    Exact,
    /// Samples land on the true offset `dt`; only `tau` is reported.
    Misaligned,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AcquisitionOptions {
    pub mode: SamplingMode,
    /// TDC error: reported `tau` is perturbed by a uniform integer in
    /// `[-tau_jitter, tau_jitter]`, clamped to `[0, L-1]`.
    pub tau_jitter: u32,
}

/// Sub-Nyquist samples `y_m[k]` of one run with its trigger offset.
#[derive(Debug, Clone, PartialEq)]
pub struct Acquisition {
    pub m: usize,
    pub samples: Vec<f64>,
    /// Trigger-to-clock offset in seconds, in `[0, T_s)`.
    pub dt: f64,
    /// Offset in Nyquist ticks as reported by the TDC.
    pub tau: usize,
    pub chips_row: Vec<i8>,
}

/// Brick-wall filter on a periodic grid sampled at `sample_rate`: DFT bins
/// with `|f| <= cutoff` are kept, the rest zeroed.
pub fn ideal_lowpass_complex(x: &[Complex64], cutoff: f64, sample_rate: f64) -> Vec<Complex64> {
    let n = x.len();
    let mut buf = x.to_vec();
    fft::forward(&mut buf);
    let keep = passband_half_width(n, cutoff, sample_rate);
    for (k, v) in buf.iter_mut().enumerate() {
        if signed_bin(k, n).unsigned_abs() as usize > keep {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    fft::inverse(&mut buf);
    buf
}

pub fn ideal_lowpass(x: &[f64], cutoff: f64, sample_rate: f64) -> Vec<f64> {
    let buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    ideal_lowpass_complex(&buf, cutoff, sample_rate)
        .into_iter()
        .map(|c| c.re)
        .collect()
}

/// Largest bin index `k` with `k * rate / n <= cutoff`.
fn passband_half_width(n: usize, cutoff: f64, sample_rate: f64) -> usize {
    let bins = cutoff * n as f64 / sample_rate;
    ((bins * (1.0 + 1e-12)).floor() as usize).min(n / 2)
}

fn ceil_ticks(dt: f64, grid: &GridConfig) -> usize {
    let u = dt * grid.f_nyq();
    let r = u.round();
    if (u - r).abs() < 1e-9 {
        r as usize
    } else {
        u.ceil() as usize
    }
}

/// `tau = ceil(dt * f_nyq)`, clamped to `L - 1` for the sliver of offsets
/// within one tick of `T_s`.
pub fn quantize_offset(dt: f64, grid: &GridConfig) -> Result<usize> {
    if !(dt >= 0.0 && dt < grid.ts()) {
        return Err(Error::OffsetOutOfRange { dt, ts: grid.ts() });
    }
    Ok(ceil_ticks(dt, grid).min(grid.slices() - 1))
}

fn sample_position(dt: f64, tau: usize, grid: &GridConfig, mode: SamplingMode) -> f64 {
    match mode {
        SamplingMode::Exact => tau as f64,
        SamplingMode::Misaligned => dt * grid.f_nyq(),
    }
}

/// Time-domain reference model in exact mode.
pub fn acquire(sig: &MultibandSignal, chips_row: &[i8], dt: f64) -> Result<Acquisition> {
    acquire_with(sig, chips_row, dt, SamplingMode::Exact)
}

pub fn acquire_with(
    sig: &MultibandSignal,
    chips_row: &[i8],
    dt: f64,
    mode: SamplingMode,
) -> Result<Acquisition> {
    let grid = sig.grid;
    check_row(chips_row, &grid)?;
    let tau = quantize_offset(dt, &grid)?;
    let l = grid.slices();
    let wave = in_band_waveform(chips_row);
    let modulated: Vec<f64> = sig
        .samples
        .iter()
        .enumerate()
        .map(|(n, &v)| v * wave[n % l])
        .collect();
    let samples = match mode {
        SamplingMode::Exact => {
            let y = ideal_lowpass(&modulated, grid.fs() / 2.0, grid.f_nyq());
            (0..grid.n_periods()).map(|k| y[tau + k * l]).collect()
        }
        SamplingMode::Misaligned => {
            // Fractional advance by dt of the bandlimited output.
            let n = grid.len();
            let mut spec = fft::forward_real(&modulated);
            let keep = passband_half_width(n, grid.fs() / 2.0, grid.f_nyq());
            let shift = dt * grid.f_nyq();
            for (k, v) in spec.iter_mut().enumerate() {
                let b = signed_bin(k, n);
                if b.unsigned_abs() as usize > keep {
                    *v = Complex64::new(0.0, 0.0);
                } else {
                    *v *= Complex64::from_polar(1.0, 2.0 * PI * b as f64 * shift / n as f64);
                }
            }
            let y = fft::inverse_real(&spec);
            (0..grid.n_periods()).map(|k| y[k * l]).collect()
        }
    };
    Ok(Acquisition {
        m: 0,
        samples,
        dt,
        tau,
        chips_row: chips_row.to_vec(),
    })
}

fn check_row(row: &[i8], grid: &GridConfig) -> Result<()> {
    if row.len() != grid.slices() || row.iter().any(|&a| a != 1 && a != -1) {
        return Err(Error::InvalidChips {
            expected: grid.slices(),
        });
    }
    Ok(())
}

/// Acquisition engine working from the signal's DFT.
///
/// For baseband bin `i` the modulated, filtered spectrum is
/// `Y_i = sum_{|q| <= L_0} c_q X_{i - q P}`; the sub-Nyquist DFT follows by
/// folding `Y_i e^{j 2 pi i s / N} / L` onto `P` bins, `s` being the sample
/// position in ticks.
pub struct Acquirer {
    grid: GridConfig,
    spectrum: Vec<Complex64>,
    half_width: usize,
}

impl Acquirer {
    pub fn new(sig: &MultibandSignal) -> Self {
        let grid = sig.grid;
        Self {
            grid,
            spectrum: fft::forward_real(&sig.samples),
            half_width: passband_half_width(grid.len(), grid.fs() / 2.0, grid.f_nyq()),
        }
    }

    pub fn grid(&self) -> &GridConfig {
        &self.grid
    }

    pub fn acquire(&self, m: usize, chips_row: &[i8], dt: f64, mode: SamplingMode) -> Result<Acquisition> {
        let grid = &self.grid;
        check_row(chips_row, grid)?;
        let tau = quantize_offset(dt, grid)?;
        let (n, p, l) = (grid.len(), grid.n_periods(), grid.slices());
        let l0 = grid.half_slices() as i64;
        let coeffs = fourier_coeffs(chips_row);
        let pos = sample_position(dt, tau, grid, mode);
        let h = self.half_width as i64;
        let mut folded = vec![Complex64::new(0.0, 0.0); p];
        for i in -h..=h {
            let y: Complex64 = (-l0..=l0)
                .zip(&coeffs)
                .map(|(q, c)| c * self.spectrum[bin_index(i - q * p as i64, n)])
                .sum();
            let phase = Complex64::from_polar(1.0 / l as f64, 2.0 * PI * i as f64 * pos / n as f64);
            folded[bin_index(i, p)] += y * phase;
        }
        fft::inverse(&mut folded);
        Ok(Acquisition {
            m,
            samples: folded.into_iter().map(|c| c.re).collect(),
            dt,
            tau,
            chips_row: chips_row.to_vec(),
        })
    }
}

/// Draws `m` offsets uniform in `[0, T_s)`, redrawing any whose ceiling
/// quantization would reach `L` ticks, plus the per-run TDC jitter.
/// Runs are drawn in order from one stream, so prefixes do not depend on `m`.
pub fn draw_offsets(grid: &GridConfig, m: usize, seed: u64, tau_jitter: u32) -> Vec<(f64, i64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m)
        .map(|_| {
            let dt = loop {
                let dt = rng.random_range(0.0..grid.ts());
                if ceil_ticks(dt, grid) < grid.slices() {
                    break dt;
                }
            };
            let jitter = if tau_jitter > 0 {
                rng.random_range(-(tau_jitter as i64)..=tau_jitter as i64)
            } else {
                0
            };
            (dt, jitter)
        })
        .collect()
}

/// Acquires one run per chip row with the given offsets and tau perturbations.
pub fn acquire_with_offsets(
    sig: &MultibandSignal,
    chipset: &ChipSet,
    offsets: &[(f64, i64)],
    mode: SamplingMode,
) -> Result<Vec<Acquisition>> {
    if offsets.len() != chipset.m() {
        return Err(Error::LengthMismatch {
            expected: chipset.m(),
            got: offsets.len(),
        });
    }
    let engine = Acquirer::new(sig);
    let max_tau = sig.grid.slices() as i64 - 1;
    (0..chipset.m())
        .into_par_iter()
        .map(|m| {
            let (dt, jitter) = offsets[m];
            let mut acq = engine.acquire(m, chipset.row(m), dt, mode)?;
            acq.tau = (acq.tau as i64 + jitter).clamp(0, max_tau) as usize;
            Ok(acq)
        })
        .collect()
}

/// `M` independent random-triggered runs, one per chip row.
pub fn acquire_run(
    sig: &MultibandSignal,
    chipset: &ChipSet,
    seed: u64,
    opts: &AcquisitionOptions,
) -> Result<Vec<Acquisition>> {
    let offsets = draw_offsets(&sig.grid, chipset.m(), seed, opts.tau_jitter);
    acquire_with_offsets(sig, chipset, &offsets, opts.mode)
}
