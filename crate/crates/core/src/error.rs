use thiserror::Error;

use crate::maxent::MaxEntResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A dense object would exceed the configured qubit limit.
    #[error("{qubits} qubits exceeds the dense limit of {limit}")]
    Size { qubits: usize, limit: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    /// Eigenvalue below the clamp window: the operator is not a density matrix.
    #[error("not a valid state: eigenvalue {eigenvalue:e} is negative")]
    NotAState { eigenvalue: f64 },

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("generators {first} and {second} do not commute")]
    NonCommuting { first: usize, second: usize },

    #[error("generator {index} is dependent on the preceding generators")]
    Dependent { index: usize },

    #[error("generator {index} is not Hermitian (phase exponent {phase} is odd)")]
    OddPhase { index: usize, phase: u8 },

    #[error("enumeration of 2^{generators} elements exceeds the guard of 2^{limit}")]
    Guard { generators: usize, limit: usize },

    /// Smallest eigenvalue under the full-rank gate.
    #[error(
        "state is not full rank (smallest eigenvalue {min_eigenvalue:e}); use the continuity pipeline"
    )]
    RankDeficient { min_eigenvalue: f64 },

    #[error("dual parameters diverged (|theta| = {magnitude:e}) at iteration {iteration}")]
    Diverged { magnitude: f64, iteration: usize },

    #[error("solver did not converge after {} iterations (residual {:e})", .best.iterations, .best.residual)]
    NotConverged { best: Box<MaxEntResult> },
}
