//! One seeded trial: draw bands, synthesize, acquire, reconstruct.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::acquisition::{acquire_with_offsets, draw_offsets, Acquisition, SamplingMode};
use crate::chipseq::{build_phi, generate_chips, ChipSet, MeasurementMatrix};
use crate::error::{Error, Result};
use crate::grid::GridConfig;
use crate::harness::config::ExperimentConfig;
use crate::recovery::reconstruct;
use crate::signalgen::{add_awgn, generate_multiband, support_of_bands, BandSpec, MultibandSignal};

const MAX_DRAW_ATTEMPTS: usize = 10_000;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial` under `master`. Independent of the sweep point, so
/// every point of a sweep sees the same trial population.
pub fn trial_seed(master: u64, trial: usize) -> u64 {
    splitmix64(splitmix64(master) ^ (trial as u64).wrapping_mul(0xA24B_AED4_963E_E407))
}

/// Stream seeds derived from one trial seed.
#[derive(Debug, Clone, Copy)]
pub struct TrialSeeds {
    pub bands: u64,
    pub chips: u64,
    pub offsets: u64,
    pub noise: u64,
}

impl TrialSeeds {
    pub fn new(trial_seed: u64) -> Self {
        let sub = |tag: u64| splitmix64(trial_seed ^ splitmix64(tag));
        Self {
            bands: sub(1),
            chips: sub(2),
            offsets: sub(3),
            noise: sub(4),
        }
    }
}

/// `k` bands with `E`, `t` and `f` uniform in their configured ranges,
/// carriers at least `B` apart so the bands are disjoint. The pulse-time
/// window is centered in the record.
pub fn draw_bands(cfg: &ExperimentConfig, grid: &GridConfig, k: usize, seed: u64) -> Result<Vec<BandSpec>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = cfg.bandwidth;
    let (f_lo, f_hi) = BandSpec::carrier_range(b, grid);
    let window = cfg.time_max - cfg.time_min;
    let lead = (grid.duration() - window) / 2.0;
    let mut bands: Vec<BandSpec> = Vec::with_capacity(k);
    let mut attempts = 0;
    while bands.len() < k {
        attempts += 1;
        if attempts > MAX_DRAW_ATTEMPTS {
            return Err(Error::BandDrawFailed { k, attempts });
        }
        let carrier = rng.random_range(f_lo..=f_hi);
        let energy = rng.random_range(cfg.energy_min..=cfg.energy_max);
        let t = rng.random_range(cfg.time_min..=cfg.time_max);
        if bands.iter().any(|o| (o.carrier - carrier).abs() < b) {
            continue;
        }
        bands.push(BandSpec::new(energy, b, lead + (t - cfg.time_min), carrier));
    }
    Ok(bands)
}

/// Everything one trial draws, shared by every scheme and sweep point that
/// reuses the trial.
pub struct TrialSetup {
    pub trial: usize,
    pub seed: u64,
    pub seeds: TrialSeeds,
    pub clean: MultibandSignal,
    pub noisy: MultibandSignal,
    pub chips: ChipSet,
    pub phi: MeasurementMatrix,
    pub true_support: BTreeSet<usize>,
}

impl TrialSetup {
    pub fn new(cfg: &ExperimentConfig, trial: usize, k: usize, m: usize, input_snr_db: f64) -> Result<Self> {
        let grid = cfg.grid()?;
        let seeds = TrialSeeds::new(trial_seed(cfg.master_seed, trial));
        let bands = draw_bands(cfg, &grid, k, seeds.bands)?;
        let clean = generate_multiband(grid, &bands)?;
        Ok(Self::with_signal(cfg, trial, clean, m, input_snr_db))
    }

    /// Same seeds as [`TrialSetup::new`], but with a caller-supplied clean
    /// signal in place of the band draw.
    pub fn with_signal(cfg: &ExperimentConfig, trial: usize, clean: MultibandSignal, m: usize, input_snr_db: f64) -> Self {
        let grid = clean.grid;
        let seed = trial_seed(cfg.master_seed, trial);
        let seeds = TrialSeeds::new(seed);
        let noisy = add_awgn(&clean, input_snr_db, seeds.noise);
        let chips = generate_chips(grid, m, seeds.chips);
        let phi = build_phi(&chips);
        Self {
            trial,
            seed,
            seeds,
            true_support: support_of_bands(&grid, &clean.bands),
            clean,
            noisy,
            chips,
            phi,
        }
    }

    pub fn grid(&self) -> GridConfig {
        self.clean.grid
    }

    /// Random-triggered runs; `zero_offsets` forces every `dt` to 0.
    pub fn acquire_rt(&self, cfg: &ExperimentConfig, zero_offsets: bool) -> Result<Vec<Acquisition>> {
        let m = self.chips.m();
        let offsets = if zero_offsets {
            vec![(0.0, 0); m]
        } else {
            draw_offsets(&self.grid(), m, self.seeds.offsets, cfg.tau_jitter)
        };
        acquire_with_offsets(&self.noisy, &self.chips, &offsets, cfg.mode)
    }

    /// Synchronous channels with zero offsets.
    pub fn acquire_mwc(&self) -> Result<Vec<Acquisition>> {
        let offsets = vec![(0.0, 0); self.chips.m()];
        acquire_with_offsets(&self.noisy, &self.chips, &offsets, SamplingMode::Exact)
    }
}

/// Result of reconstructing one trial at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial: usize,
    pub trial_seed: u64,
    pub k: usize,
    pub m: usize,
    pub input_snr_db: f64,
    pub output_snr_db: f64,
    pub support: Vec<usize>,
    pub true_support: Vec<usize>,
    pub relative_residual: f64,
    pub wall_time_s: f64,
}

impl TrialOutcome {
    pub fn exact_support(&self) -> bool {
        self.support == self.true_support
    }
}

/// Reconstructs from the first `m` acquisitions of `acqs`.
pub fn evaluate(
    cfg: &ExperimentConfig,
    setup: &TrialSetup,
    acqs: &[Acquisition],
    k: usize,
    m: usize,
    input_snr_db: f64,
) -> Result<TrialOutcome> {
    let start = Instant::now();
    let grid = setup.grid();
    let phi = setup.phi.truncated(m);
    let opts = cfg.recovery_options(k, m);
    let res = reconstruct(&acqs[..m], &phi, &grid, &opts, Some(&setup.clean.samples))?;
    Ok(TrialOutcome {
        trial: setup.trial,
        trial_seed: setup.seed,
        k,
        m,
        input_snr_db,
        output_snr_db: res.output_snr_db.unwrap_or(f64::NAN),
        support: res.support.to_vec(),
        true_support: setup.true_support.iter().copied().collect(),
        relative_residual: res.relative_residual(),
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}
