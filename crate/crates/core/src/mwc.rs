//! Synchronous multi-channel baseline: `M` channels sample the same record
//! at once with zero trigger offset. It reuses the acquisition chain, so it
//! differs from the random-triggered scheme only in the offsets.

use crate::acquisition::{acquire_with_offsets, Acquisition, SamplingMode};
use crate::chipseq::ChipSet;
use crate::error::{Error, Result};
use crate::signalgen::MultibandSignal;

#[derive(Debug, Clone, PartialEq)]
pub struct MwcRun {
    pub acqs: Vec<Acquisition>,
    pub chip_seed: u64,
}

pub fn acquire_mwc(sig: &MultibandSignal, chipset: &ChipSet) -> Result<MwcRun> {
    let offsets = vec![(0.0, 0); chipset.m()];
    Ok(MwcRun {
        acqs: acquire_with_offsets(sig, chipset, &offsets, SamplingMode::Exact)?,
        chip_seed: chipset.seed,
    })
}

/// Channel count `ceil(8 K ln(L / 4K))` suggested for stable MWC support
/// recovery (natural log).
pub fn recommended_channels(k: usize, l: usize) -> Result<usize> {
    if k == 0 || l <= 4 * k {
        return Err(Error::Config(format!(
            "recommended_channels needs L > 4K, got K = {k}, L = {l}"
        )));
    }
    Ok(channel_bound(k as f64, l as f64))
}

/// `ceil(8 K ln(L / 4K))` for real-valued `L`; callers ensure `L > 4K`.
pub fn channel_bound(k: f64, l: f64) -> usize {
    let m = 8.0 * k * (l / (4.0 * k)).ln();
    // Absorb rounding so exact integers are not pushed up by one.
    (m - 1e-9).ceil() as usize
}
