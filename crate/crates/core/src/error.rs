use alloc::string::String;

/// Errors produced by the estimation pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("sample {index} is not finite")]
    NonFiniteSample { index: usize },
    #[error("{phases} phases for {samples} samples")]
    PhaseLengthMismatch { samples: usize, phases: usize },
    #[error("phase {value} at index {index} is outside [0, 2π)")]
    PhaseOutOfRange { index: usize, value: f64 },
    #[error("dataset carries no phases")]
    MissingPhases,
    #[error("dataset carries phases; drop them explicitly for phase-averaged estimation")]
    UnexpectedPhases,
    #[error("vacuum reference has degenerate variance {0}")]
    DegenerateVacuum(f64),
    #[error("efficiency {0} outside [0, 1]")]
    InvalidEfficiency(f64),
    #[error("invalid Fock weights: {0}")]
    InvalidWeights(String),
    #[error("photon number must be at least 1")]
    InvalidPhotonNumber,
    #[error("invalid filter: {0}")]
    InvalidFilter(String),
    #[error("filter radius must be non-negative, got {0}")]
    NegativeRadius(f64),
    #[error("Gaussian filter with s = {0} has no regular pattern function (needs s < 0)")]
    NonIntegrable(f64),
    #[error("filter support {b_max} would overflow exp(b²/2)")]
    Overflow { b_max: f64 },
    #[error("{what} did not converge (last change {change:e})")]
    NonConvergence { what: &'static str, change: f64 },
    #[error("pattern table validation failed: worst interpolation error {worst:e}")]
    TableValidation { worst: f64 },
    #[error("quadrature {x} outside table range [{min}, {max}]")]
    OutOfTableRange { x: f64, min: f64, max: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("standard error vanishes at grid index {0}")]
    ZeroStderr(usize),
    #[error("grid ends at a significant value {value} (stderr {stderr})")]
    TailSignificant { value: f64, stderr: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Result alias for this crate.
pub type Result<T> = core::result::Result<T, Error>;
