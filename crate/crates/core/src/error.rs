use thiserror::Error;

/// Errors raised by the geometry, sampling and estimation layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point ({re}, {im}) is not strictly inside the unit disc")]
    OutsideDisc { re: f64, im: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate Möbius coefficients: |a|^2 - |b|^2 = {det:e}")]
    DegenerateMobius { det: f64 },

    #[error("fundamental-domain reduction did not terminate after {iterations} iterations")]
    ReductionCap { iterations: usize },

    #[error("path segment {index} has hyperbolic length {length} (tracking requires < {limit})")]
    StepTooLong {
        index: usize,
        length: f64,
        limit: f64,
    },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("representation: {0}")]
    Representation(String),

    #[error("field has no Laplacian and finite differencing is disabled")]
    MissingLaplacian,

    #[error("frame degeneracy at step {step}: QR diagonal {value:e} underflowed")]
    FrameDegeneracy { step: usize, value: f64 },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("not enough data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
