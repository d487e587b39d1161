use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("matrix market format error: {0}")]
    Format(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("no finite crossover: {0}")]
    NoCrossover(String),

    /// The iteration diverges for this parameter choice.
    #[error("divergent parameters: {0}")]
    Divergence(String),

    #[error("iteration broke down: {0}")]
    Breakdown(String),

    /// `|nu2|` is indistinguishable from `|nu1|`, so `beta = nu2^2/4` would
    /// sit on the divergence boundary.
    #[error("dominant Ritz values tie: |nu1| = {nu1}, |nu2| = {nu2}")]
    SpectralTie { nu1: f64, nu2: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
