use thiserror::Error;

/// Errors produced by waveguide construction, coupling assembly and imaging.
#[derive(Debug, Error)]
pub enum Error {
    #[error("no propagating modes: k0*X/pi = {ratio:.6} < 1")]
    NoPropagatingModes { ratio: f64 },

    #[error("{quantity} = {value} outside [{lo}, {hi}]")]
    Domain {
        quantity: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid coherence kernel: {0}")]
    InvalidKernel(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("reflectivity has no point mass and no profile")]
    EmptyTarget,

    #[error("invalid scattering model: {0}")]
    InvalidModel(String),

    #[error("transport generator has no mode coupling; equipartition distance undefined")]
    NoEquipartition,
}

pub type Result<T> = std::result::Result<T, Error>;
