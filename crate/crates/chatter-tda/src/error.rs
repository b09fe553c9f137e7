//! Error type shared across the pipeline.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside a function's mathematical domain (e.g. ω ≤ 1 for κ(ω)).
    #[error("domain error: {0}")]
    Domain(String),

    /// |y| exceeded the blow-up bound: the response is numerically unbounded.
    #[error("simulation diverged: |y| > {bound:e} at t = {t}")]
    SimulationDiverged { t: f64, bound: f64 },

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    /// Constant series; autocorrelation (and the embedding delay) is undefined.
    #[error("zero-variance series")]
    ZeroVariance,

    /// Point cloud too large for the O(n^3) H1 reduction guard.
    #[error("point cloud of {n} points exceeds the H1 capacity limit {limit}")]
    CapacityExceeded { n: usize, limit: usize },

    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    /// Training data contains a single class; the logistic fit is degenerate.
    #[error("training set contains a single class")]
    SingleClass,

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable kind, used by the CLI error JSON and the FFI
    /// status codes.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::SimulationDiverged { .. } => "simulation_diverged",
            Error::InsufficientSamples(_) => "insufficient_samples",
            Error::ZeroVariance => "zero_variance",
            Error::CapacityExceeded { .. } => "capacity_exceeded",
            Error::InvalidDiagram(_) => "invalid_diagram",
            Error::SingleClass => "single_class",
            Error::Config(_) => "config",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
