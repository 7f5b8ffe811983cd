use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong between signal synthesis and reconstruction.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("carrier {carrier_hz} Hz outside legal range [{min_hz}, {max_hz}] Hz")]
    CarrierOutOfRange {
        carrier_hz: f64,
        min_hz: f64,
        max_hz: f64,
    },

    #[error("band width {bandwidth_hz} Hz exceeds slice width f_p = {fp_hz} Hz")]
    BandTooWide { bandwidth_hz: f64, fp_hz: f64 },

    #[error("invalid band: {0}")]
    InvalidBand(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("reference signal has zero energy")]
    ZeroReference,

    #[error("edge margin {0} outside [0, 0.25]")]
    InvalidMargin(f64),

    #[error("trigger offset {dt} s outside [0, {ts}) s")]
    OffsetOutOfRange { dt: f64, ts: f64 },

    #[error("chip row must have length {expected} with entries +1/-1")]
    InvalidChips { expected: usize },

    #[error("max_bands = {max_bands} exceeds the number of acquisitions M = {m}")]
    TooManyBands { max_bands: usize, m: usize },

    #[error("least squares is rank deficient on support {0:?}")]
    DegenerateSupport(Vec<usize>),

    #[error("no acquisitions to reconstruct from")]
    NoAcquisitions,

    #[error("could not draw {k} disjoint bands after {attempts} attempts")]
    BandDrawFailed { k: usize, attempts: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn file(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
        move |source| Error::File {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
