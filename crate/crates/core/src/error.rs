use thiserror::Error;

/// Errors produced while building or analysing a jamming game.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("degenerate model: effective signal gain a = {a} must be strictly positive")]
    DegenerateModel { a: f64 },

    #[error("negative jammer gain: b[{index}] = {value} (every entry of b must be non-negative)")]
    NegativeGain { index: usize, value: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("jammer has no channel to the fusion center (b'b = 0)")]
    ZeroJammerChannel,

    #[error("equilibrium parameter out of range: |epsilon[{index}]| = {value} exceeds b[{index}] = {bound}")]
    ParameterOutOfRange {
        index: usize,
        value: f64,
        bound: f64,
    },

    #[error("profile (lambda = {threshold}) is not in the pure-strategy equilibrium family")]
    NotInFamily { threshold: f64 },

    #[error("initial jammer strategy uses power {power}, exceeding the budget {budget}")]
    InfeasibleInitial { power: f64, budget: f64 },

    #[error("invalid covariance: {0}")]
    InvalidCovariance(String),

    #[error("invalid trial count {0}: at least one trial is required")]
    InvalidTrials(usize),

    #[error("threshold bound R = {given} is too small; it must be at least {required}")]
    ThresholdBoundTooSmall { given: f64, required: f64 },

    #[error("invalid audit configuration: {0}")]
    InvalidAudit(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("sweep aborted at {parameter} = {value}: {source}")]
    Sweep {
        parameter: String,
        value: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            found,
        })
    }
}

pub(crate) fn check_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite, got {value}"),
        })
    }
}
