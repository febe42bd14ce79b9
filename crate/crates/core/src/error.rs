use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the solver pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("particles {first} and {second} share the same reference position")]
    CoincidentParticles { first: usize, second: usize },

    #[error(
        "correction matrix of particle {particle} is singular or ill-conditioned \
         (condition number {condition:.3e}, {neighbors} neighbors)"
    )]
    SingularCorrection {
        particle: usize,
        neighbors: usize,
        condition: f64,
    },

    #[error("element inversion at particle {particle}: det F = {det:.6e}")]
    ElementInversion { particle: usize, det: f64 },

    #[error("non-finite {quantity} at particle {particle}")]
    NonFiniteState {
        particle: usize,
        quantity: &'static str,
    },

    #[error("STL parse error at byte offset {offset}: {message}")]
    StlBinary { offset: usize, message: String },

    #[error("STL parse error on line {line}: {message}")]
    StlAscii { line: usize, message: String },

    #[error(
        "mesh appears not to be watertight: {fraction:.2}% of lattice points have \
         inconsistent ray parity; repair the mesh before filling"
    )]
    NonWatertight { fraction: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("step {step} at t = {time:.6e} s failed: {source}")]
    Step {
        step: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True when the failure comes from the evolving numerical state rather
    /// than from bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::ElementInversion { .. } | Error::NonFiniteState { .. } => true,
            Error::Step { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
