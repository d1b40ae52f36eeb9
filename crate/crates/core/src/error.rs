use thiserror::Error;

/// Errors raised by constructions, evaluation and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown name `{0}`")]
    Name(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch in {context}: expected {expected}, found {found}")]
    Shape {
        context: String,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value at layer {layer}: {detail}")]
    Numeric { layer: usize, detail: String },

    #[error("accuracy knob K = {k} must exceed the activation threshold K_0 = {k0}")]
    Budget { k: f64, k0: f64 },

    #[error("missing capability: {0}")]
    Capability(String),

    #[error("lifted network deviates by {max_diff:e} (tolerance {tolerance:e}); the lift range r is too small")]
    LiftRange { max_diff: f64, tolerance: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn shape(context: &str, expected: usize, found: usize) -> Error {
    Error::Shape {
        context: context.to_string(),
        expected,
        found,
    }
}
