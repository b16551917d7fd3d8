use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

/// Side of the photonic band a bound state lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    AboveBand,
    BelowBand,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::AboveBand => f.write_str("above_band"),
            Region::BelowBand => f.write_str("below_band"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid value for `{field}`: {reason}")]
    InvalidParam { field: String, reason: String },

    #[error("dark-state condition g1/g2 = -omega_c/omega_p violated (g1 = {g1}, g2 = {g2})")]
    DarkConditionViolated { g1: f64, g2: f64 },

    #[error("atom spectrum is degenerate (eigenvalue gap {gap:e}); dark state is ambiguous")]
    DegenerateSpectrum { gap: f64 },

    #[error("energy {0} lies on the branch cut of the lattice sum")]
    OnBranchCut(Complex64),

    #[error("bound-state search did not converge in the {region} region: {detail}")]
    NoConvergence { region: Region, detail: String },

    #[error("x = {0} is at or beyond the band edge")]
    EdgeSingularity(f64),

    #[error("index {index} out of range for {len} cavities")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("step too large: norm grew by {growth:e} in one step at t = {t}")]
    StepSizeTooLarge { growth: f64, t: f64 },

    #[error("t = {t} outside the sampled range [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },

    #[error("density-matrix trace drifted to {trace} at t = {t}")]
    TraceDrift { trace: f64, t: f64 },

    #[error("battery state has non-positive trace {0}")]
    NotNormalizable(f64),

    #[error("only {found} envelope peaks found, need at least 4")]
    TooFewPeaks { found: usize },

    #[error("peak {index} has non-positive value {value}")]
    NonPositivePeak { index: usize, value: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Process exit code used by the CLI: 2 for bad input, 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParam { .. }
            | Error::DarkConditionViolated { .. }
            | Error::IndexOutOfRange { .. }
            | Error::Config(_)
            | Error::Json(_)
            | Error::Csv(_) => 2,
            Error::Io(_) => 1,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
