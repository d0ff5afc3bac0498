use thiserror::Error;

/// Errors raised by parameter validation, the solvers and the analysis drivers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },

    #[error("invalid initial data: {0}")]
    InvalidInitial(String),

    #[error("invalid geometry: {0}")]
    InvalidGrid(String),

    #[error("invalid time-step configuration: {0}")]
    InvalidTimeStep(String),

    #[error("unsupported spatial dimension {0} (expected 1, 2 or 3)")]
    UnsupportedDimension(usize),

    #[error("no critical radius: R0 = {r0} does not exceed 1")]
    NoCriticalRadius { r0: f64 },

    #[error("ODE step rejected at t = {t}: component {component} = {value:e} (dt too large)")]
    OdeStepRejected {
        t: f64,
        component: &'static str,
        value: f64,
    },

    #[error("positivity violated at t = {t}: {field} = {value:e} below tolerance (dt too large)")]
    Positivity {
        t: f64,
        field: &'static str,
        value: f64,
    },

    #[error("front escaped the truncated domain at t = {t}: h = {h} >= {limit}")]
    FrontEscape { t: f64, h: f64, limit: f64 },

    #[error("non-finite value in {field} at t = {t}")]
    NonFinite { t: f64, field: &'static str },

    #[error("invalid bracket: both endpoints classify as {0}")]
    InvalidBracket(String),

    #[error("inconclusive classification at {value}; try a longer t_end")]
    Inconclusive { value: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            field,
            reason: reason.into(),
        }
    }

    /// True for errors produced while time stepping (as opposed to input validation).
    pub fn is_solver_error(&self) -> bool {
        matches!(
            self,
            Error::OdeStepRejected { .. }
                | Error::Positivity { .. }
                | Error::FrontEscape { .. }
                | Error::NonFinite { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
