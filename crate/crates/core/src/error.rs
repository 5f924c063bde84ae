use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: must be at least 1")]
    InvalidDimension(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state truncated: norm deviates from 1 by {deviation:.3e} in a {dim}-level cavity")]
    TruncationLoss { dim: usize, deviation: f64 },

    #[error("vanishing normalization ({0:.3e})")]
    VanishingNorm(f64),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NonHermitian(f64),

    #[error("eigensolver did not converge (residual {residual:.3e})")]
    ConvergenceFailure { residual: f64 },

    #[error("ground state not converged in cavity dimension up to {dim} (energy change {energy_change:.3e}, infidelity {infidelity:.3e})")]
    NonConvergence { dim: usize, energy_change: f64, infidelity: f64 },

    #[error("Schrieffer-Wolff operations are singular at resonance (|ω_q − ω_c| = {0:.3e})")]
    Resonance(f64),

    #[error("weak-coupling squeezing is unstable: g = {g} ≥ g* = {g_star}")]
    Instability { g: f64, g_star: f64 },

    #[error("invalid regime: {0}")]
    InvalidRegime(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("every candidate in generation {0} returned a non-finite objective")]
    DegenerateObjective(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("parse error: {0}")]
    Parse(String),
}
