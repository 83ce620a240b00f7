use thiserror::Error;

/// Errors produced by graph construction, steady-state solving and model builders.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid rate graph: {0}")]
    InvalidGraph(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("rate matrix is singular beyond its stationary null space (reducible graph?)")]
    ReducibleMatrix,

    #[error("secular approximation invalid: {0}")]
    DegenerateSpectrum(String),

    #[error("bosonic rate undefined for frequency {0} (must be > 0)")]
    NonpositiveFrequency(f64),

    #[error("rate function requires a thermal bath, got a work source")]
    WorkSourceRate,

    #[error("invalid model parameters: {0}")]
    InvalidParameters(String),

    #[error("transition quantum {quantum} for bath {bath} on pair ({i},{j}) is not positive")]
    NonpositiveQuantum {
        i: usize,
        j: usize,
        bath: &'static str,
        quantum: f64,
    },

    #[error("analytic coefficients disagree with numeric diagonalization: {0}")]
    CrosscheckMismatch(String),

    #[error("circuit totals disagree with direct steady-state currents: max relative discrepancy {0:.3e}")]
    ReconciliationFailure(f64),

    #[error("requested circuit {0} is not present in the enumerated set")]
    CircuitNotFound(String),

    #[error("no zero crossing bracketed in [{lo}, {hi}]")]
    NoZeroCrossing { lo: f64, hi: f64 },

    #[error("empty operating window: no swept point matches the requested mode")]
    EmptyWindow,

    #[error("invalid sweep request: {0}")]
    InvalidSweep(String),
}

pub type Result<T> = std::result::Result<T, Error>;
