use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{func}: argument outside domain ({detail})")]
    Domain { func: &'static str, detail: String },

    #[error("{func}: result overflows f64")]
    Overflow { func: &'static str },

    #[error("invalid NIG parameters: {0}")]
    InvalidNig(String),

    #[error("t = {t} lies outside the convergence strip ({lo}, {hi})")]
    StripViolation { t: f64, lo: f64, hi: f64 },

    #[error("combined convergence strip is empty")]
    EmptyStrip,

    #[error("derivative order {0} not supported (1..=4)")]
    DerivativeOrder(usize),

    #[error("quadrature did not converge: error estimate {achieved:e} above tolerance {tolerance:e}")]
    Quadrature { achieved: f64, tolerance: f64 },

    #[error("base distribution conditions violated: {0}")]
    ConditionViolated(String),

    #[error("saddle point too close to the mean (|c| = {0:e})")]
    DegenerateC(f64),

    #[error("non-finite intermediate in {0}")]
    NonFinite(&'static str),

    #[error("x = {x} outside the attainable range ({lo}, {hi}) of K'")]
    SaddleRange { x: f64, lo: f64, hi: f64 },

    #[error("saddle point iteration did not converge after {iterations} steps (residual {residual:e})")]
    SaddleConvergence { iterations: usize, residual: f64 },

    #[error("characteristic function inversion did not converge (partial value {partial}, error estimate {err_est:e})")]
    Inversion { partial: f64, err_est: f64 },

    #[error("invalid parameter `{field}`: {detail}")]
    Config { field: String, detail: String },

    #[error("{0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain { func, detail: detail.into() }
    }

    pub(crate) fn config(field: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Config { field: field.into(), detail: detail.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
