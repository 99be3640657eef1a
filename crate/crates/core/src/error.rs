use std::fmt;

use thiserror::Error;

/// A single failed constraint on a network configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Path of the offending field, e.g. `tiers[1].threshold`.
    pub field: String,
    pub message: String,
}

impl Violation {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Every violation found in one configuration, not just the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violations(pub Vec<Violation>);

impl Violations {
    pub fn iter(&self) -> impl Iterator<Item = &Violation> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Violations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error in {function}: {message}")]
    Domain { function: &'static str, message: String },

    #[error("invalid network configuration: {0}")]
    Invalid(Violations),

    #[error("quadrature did not converge on [{lower}, {upper}]: estimate {estimate:e}, error {error:e} after {evaluations} evaluations")]
    Quadrature {
        lower: f64,
        upper: f64,
        estimate: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("coverage probability {value} outside [0, 1] beyond rounding slack")]
    ProbabilityOutOfRange { value: f64 },

    #[error("{operation} requires Rayleigh fading (M = 1) on every tier; tier {tier} has M = {m}")]
    NotRayleigh {
        operation: &'static str,
        tier: usize,
        m: u32,
    },

    #[error("tier index {index} out of range for a {tiers}-tier network")]
    TierIndex { index: usize, tiers: usize },

    #[error("tier kernel for M = {m} is not positive ({value:e}); the alternating sum lost all significance")]
    NonPositiveKernel { m: u32, value: f64 },

    #[error("no covered trials in the simulation; the conditional rate is undefined")]
    NoCoveredTrials,
}

impl Error {
    pub(crate) fn domain(function: &'static str, message: impl Into<String>) -> Self {
        Error::Domain {
            function,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
