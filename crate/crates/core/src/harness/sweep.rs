//! Parameter sweeps over trials, merged in deterministic point/trial order.

use rayon::prelude::*;

use crate::error::Result;
use crate::harness::config::ExperimentConfig;
use crate::harness::trial::{evaluate, TrialOutcome, TrialSetup};

/// Which parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Sparsity,
    Noise,
    Channels,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Sparsity => "sparsity",
            SweepKind::Noise => "noise",
            SweepKind::Channels => "channels",
        }
    }
}

/// Acquisition scheme behind a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    /// Random-triggered runs of one channel.
    RtMwcs,
    /// Synchronous multi-channel baseline.
    Mwc,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::RtMwcs => "rt-mwcs",
            Scheme::Mwc => "mwc",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub scheme: Scheme,
    pub outcome: TrialOutcome,
}

/// Trial statistics at one sweep point for one scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub scheme: Scheme,
    pub k: usize,
    pub m: usize,
    pub input_snr_db: f64,
    pub trials: usize,
    pub mean_snr_db: f64,
    /// Sample standard deviation; 0 for a single trial.
    pub std_snr_db: f64,
    pub exact_rate: f64,
    pub mean_residual: f64,
    /// Whether `2K + 2 <= M`, the regime where a `2K`-slice support leaves
    /// the least-squares step overdetermined.
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub kind: SweepKind,
    pub master_seed: u64,
    /// Ordered by point, then scheme, then trial.
    pub records: Vec<SweepRecord>,
}

pub fn is_feasible(k: usize, m: usize) -> bool {
    2 * k + 2 <= m
}

impl SweepTable {
    /// One summary per (point, scheme), in record order.
    pub fn summaries(&self) -> Vec<PointSummary> {
        let mut out: Vec<PointSummary> = Vec::new();
        let mut start = 0;
        while start < self.records.len() {
            let head = &self.records[start];
            let key = point_key(head);
            let end = start
                + self.records[start..]
                    .iter()
                    .take_while(|r| point_key(r) == key)
                    .count();
            out.push(summarize(&self.records[start..end]));
            start = end;
        }
        out
    }

    /// Summaries of one scheme.
    pub fn summaries_for(&self, scheme: Scheme) -> Vec<PointSummary> {
        self.summaries().into_iter().filter(|s| s.scheme == scheme).collect()
    }
}

fn point_key(r: &SweepRecord) -> (Scheme, usize, usize, u64) {
    (r.scheme, r.outcome.k, r.outcome.m, r.outcome.input_snr_db.to_bits())
}

fn summarize(records: &[SweepRecord]) -> PointSummary {
    let first = &records[0];
    let n = records.len();
    let snrs: Vec<f64> = records.iter().map(|r| r.outcome.output_snr_db).collect();
    let mean = snrs.iter().sum::<f64>() / n as f64;
    let std = if n > 1 {
        (snrs.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let exact = records.iter().filter(|r| r.outcome.exact_support()).count();
    PointSummary {
        scheme: first.scheme,
        k: first.outcome.k,
        m: first.outcome.m,
        input_snr_db: first.outcome.input_snr_db,
        trials: n,
        mean_snr_db: mean,
        std_snr_db: std,
        exact_rate: exact as f64 / n as f64,
        mean_residual: records.iter().map(|r| r.outcome.relative_residual).sum::<f64>() / n as f64,
        feasible: is_feasible(first.outcome.k, first.outcome.m),
    }
}

/// Runs `per_trial` for every trial in parallel; each call returns its
/// records for all points, tagged with the point index. The merge sorts by
/// (point, scheme, trial) so thread scheduling never shows in the output.
fn run_trials<F>(cfg: &ExperimentConfig, kind: SweepKind, per_trial: F) -> Result<SweepTable>
where
    F: Fn(usize) -> Result<Vec<(usize, SweepRecord)>> + Sync,
{
    cfg.validate()?;
    let per: Vec<Vec<(usize, SweepRecord)>> = (0..cfg.trials)
        .into_par_iter()
        .map(&per_trial)
        .collect::<Result<_>>()?;
    let mut all: Vec<(usize, SweepRecord)> = per.into_iter().flatten().collect();
    all.sort_by_key(|(point, r)| (*point, r.scheme, r.outcome.trial));
    Ok(SweepTable {
        kind,
        master_seed: cfg.master_seed,
        records: all.into_iter().map(|(_, r)| r).collect(),
    })
}

/// Output SNR against sparsity `K` over `cfg.k_sweep`, at `cfg.m` runs and
/// `cfg.input_snr_db`.
pub fn run_sparsity_sweep(cfg: &ExperimentConfig) -> Result<SweepTable> {
    let ks = cfg.k_sweep.counts();
    run_trials(cfg, SweepKind::Sparsity, |trial| {
        ks.iter()
            .enumerate()
            .map(|(point, &k)| {
                let setup = TrialSetup::new(cfg, trial, k, cfg.m, cfg.input_snr_db)?;
                let acqs = setup.acquire_rt(cfg, false)?;
                let outcome = evaluate(cfg, &setup, &acqs, k, cfg.m, cfg.input_snr_db)?;
                Ok((point, SweepRecord { scheme: Scheme::RtMwcs, outcome }))
            })
            .collect()
    })
}

/// Output SNR against input SNR over `cfg.snr_sweep`, at `cfg.k` bands and
/// `cfg.m` runs. Each trial keeps its signal, chips and offsets across points.
pub fn run_noise_sweep(cfg: &ExperimentConfig) -> Result<SweepTable> {
    let snrs = cfg.snr_sweep.values();
    run_trials(cfg, SweepKind::Noise, |trial| {
        snrs.iter()
            .enumerate()
            .map(|(point, &snr)| {
                let setup = TrialSetup::new(cfg, trial, cfg.k, cfg.m, snr)?;
                let acqs = setup.acquire_rt(cfg, false)?;
                let outcome = evaluate(cfg, &setup, &acqs, cfg.k, cfg.m, snr)?;
                Ok((point, SweepRecord { scheme: Scheme::RtMwcs, outcome }))
            })
            .collect()
    })
}

/// Output SNR against the number of runs over `cfg.m_sweep`. Each trial
/// acquires once at the largest `M` and reconstructs from prefixes, so
/// every point sees the same chips and offsets. With `include_mwc` the
/// synchronous baseline is evaluated on the same signals and chips.
pub fn run_m_sweep(cfg: &ExperimentConfig, include_mwc: bool) -> Result<SweepTable> {
    let ms = cfg.m_sweep.counts();
    let m_max = ms.iter().copied().max().unwrap_or(1).max(1);
    run_trials(cfg, SweepKind::Channels, |trial| {
        let setup = TrialSetup::new(cfg, trial, cfg.k, m_max, cfg.input_snr_db)?;
        let mut schemes = vec![(Scheme::RtMwcs, setup.acquire_rt(cfg, false)?)];
        if include_mwc {
            schemes.push((Scheme::Mwc, setup.acquire_mwc()?));
        }
        let mut out = Vec::with_capacity(ms.len() * schemes.len());
        for (point, &m) in ms.iter().enumerate() {
            for (scheme, acqs) in &schemes {
                let outcome = evaluate(cfg, &setup, acqs, cfg.k, m, cfg.input_snr_db)?;
                out.push((point, SweepRecord { scheme: *scheme, outcome }));
            }
        }
        Ok(out)
    })
}
