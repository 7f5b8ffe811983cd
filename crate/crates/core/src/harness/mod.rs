//! Seeded experiment runner: trials, sweeps, CSV and file formats.

pub mod config;
pub mod csv;
pub mod files;
pub mod plot;
pub mod simulate;
pub mod sweep;
pub mod trial;

pub use config::{ExperimentConfig, Profile, SweepRange};
pub use simulate::{simulate, SimulationReport};
pub use sweep::{run_m_sweep, run_noise_sweep, run_sparsity_sweep, PointSummary, Scheme, SweepKind, SweepTable};
pub use trial::{draw_bands, trial_seed, TrialOutcome, TrialSetup};
