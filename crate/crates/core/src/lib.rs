//! Random-triggered modulated wideband compressive sampling.
//!
//! A repetitively triggered sparse multiband signal is mixed with a
//! different pseudorandom +-1 chip sequence on each trigger, lowpassed to
//! `f_s/2`, and sampled at `f_s = f_nyq / L` starting at a random offset
//! measured by a time-to-digital converter. From `M` such runs the occupied
//! spectral slices are found blindly and the spectrum is solved by least
//! squares on them.
//!
//! | module | stage |
//! |---|---|
//! | [`signalgen`] | test signals, noise, SNR, ground-truth support |
//! | [`chipseq`] | chip rows, Fourier coefficients, measurement matrix |
//! | [`acquisition`] | modulation, ideal lowpass, offset sampling, TDC |
//! | [`recovery`] | spectral system, covariance, greedy support search, least squares |
//! | [`mwc`] | synchronous multi-channel baseline |
//! | [`harness`] | seeded trials, sweeps, CSV and file formats |

pub mod acquisition;
pub mod chipseq;
pub mod error;
pub mod fft;
pub mod grid;
pub mod harness;
pub mod mwc;
pub mod recovery;
pub mod signalgen;

pub use acquisition::{
    acquire, acquire_run, ideal_lowpass, quantize_offset, Acquisition, AcquisitionOptions,
    SamplingMode,
};
pub use chipseq::{build_phi, fourier_coeffs, generate_chips, ChipSet, MeasurementMatrix};
pub use error::{Error, Result};
pub use grid::GridConfig;
pub use mwc::{acquire_mwc, recommended_channels, MwcRun};
pub use recovery::{
    align_upsample, build_spectral_system, covariance, reconstruct, reconstruct_time,
    recover_slices, somp_support, Pursuit, RecoveryOptions, RecoveryResult, SpectralSystem, SupportSet,
};
pub use signalgen::{
    add_awgn, generate_multiband, snr_db, true_support_slices, BandSpec, MultibandSignal,
};
