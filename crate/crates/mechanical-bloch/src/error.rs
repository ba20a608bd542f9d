use thiserror::Error;

/// Errors produced by the simulation layers and the CLI front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("imaginary eigenfrequency: radicand {radicand} is negative (overdetuned)")]
    ImaginaryEigenfrequency { radicand: f64 },

    #[error("degenerate transform: kappa = 0 with dk != 0 leaves the eigenbasis undefined")]
    DegenerateTransform,

    #[error("state diverged (non-finite) at t = {t}")]
    Divergence { t: f64 },

    #[error("frame mismatch: {0}")]
    FrameMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
