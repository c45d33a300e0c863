use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used for CLI exit codes and FFI status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Numerical,
    Io,
}

impl ErrorKind {
    pub fn code(self) -> i32 {
        match self {
            ErrorKind::Validation => 2,
            ErrorKind::Numerical => 3,
            ErrorKind::Io => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid window: start {start} is after end {end}")]
    InvalidWindow { start: f64, end: f64 },

    #[error("time {time} is outside the domain [0, {domain_end}]")]
    OutsideDomain { time: f64, domain_end: f64 },

    #[error("curve line {line}: {reason}")]
    CurveParse { line: u64, reason: String },

    #[error("degenerate window: total volatility is zero")]
    DegenerateWindow,

    #[error("invalid level: L = {level} is below the strike K = {strike}")]
    InvalidLevel { level: f64, strike: f64 },

    #[error("perfect hedge affordable: budget {budget} >= perfect-hedge price {price}")]
    PerfectHedgeAffordable { budget: f64, price: f64 },

    #[error("budget must be positive, got {0}")]
    NonPositiveBudget(f64),

    #[error("budget too small for numeric range (bracket exceeded {limit})")]
    BudgetTooSmall { limit: f64 },

    #[error("linear loss requires nonzero drift")]
    ZeroDrift,

    #[error("efficient hedging requires a nonnegative market price of risk, got alpha_T = {0}")]
    NegativeDrift(f64),

    #[error(
        "no solution under the min threshold rule: budget {budget} is not above the floor {floor}"
    )]
    NoSolutionMin { budget: f64, floor: f64 },

    #[error("calibration map is not strictly monotone on [{lo}, {hi}]")]
    NotMonotone { lo: f64, hi: f64 },

    #[error("calibration stalled with relative residual {residual}")]
    CalibrationStalled { residual: f64 },

    #[error("inconsistent claim constants: cap {cap} != payoff {payoff} at the threshold")]
    InconsistentClaim { cap: f64, payoff: f64 },

    #[error("fBm covariance is not positive definite after regularization")]
    CovarianceNotPositiveDefinite,

    #[error("non-uniform grid: the spectral fBm method needs equal steps")]
    NonUniformGrid,

    #[error("pathwise backtest unsupported for H != 1/2")]
    FractionalBacktest,

    #[error("measure mismatch: expected paths under {expected}")]
    MeasureMismatch { expected: &'static str },

    #[error("model mismatch between strategy and simulated paths")]
    ModelMismatch,

    #[error("unsupported model for this operation: {0}")]
    UnsupportedModel(&'static str),

    #[error("I/O: {0}")]
    Io(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::BudgetTooSmall { .. }
            | Error::NoSolutionMin { .. }
            | Error::NotMonotone { .. }
            | Error::CalibrationStalled { .. }
            | Error::CovarianceNotPositiveDefinite => ErrorKind::Numerical,
            Error::Io(_) => ErrorKind::Io,
            _ => ErrorKind::Validation,
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::param(
            name,
            format!("must be finite and > 0, got {value}"),
        ))
    }
}

pub(crate) fn ensure_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite, got {value}")))
    }
}
