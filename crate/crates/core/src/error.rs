use thiserror::Error;

/// Errors raised by the model, bounds, barrier, hypothesis and verify layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in `{what}`: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("negative component {value} at index {index}")]
    NegativeComponent { index: usize, value: f64 },
    #[error("parameter `{name}` must be {requirement}, got {value}")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("{0} thresholds are missing from the hypothesis region")]
    MissingThresholds(&'static str),
    #[error("schedule is not monotone at position {0}")]
    NonMonotoneSchedule(usize),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, requirement: &'static str, value: f64) -> Self {
        Error::InvalidParameter {
            name,
            requirement,
            value,
        }
    }
}

pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> crate::Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            got,
        })
    }
}

pub(crate) fn check_positive(name: &'static str, values: &[f64]) -> crate::Result<()> {
    match values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        Some(&v) => Err(Error::invalid(name, "strictly positive and finite", v)),
        None => Ok(()),
    }
}

pub(crate) fn check_nonnegative(values: &[f64]) -> crate::Result<()> {
    match values.iter().position(|v| !(*v >= 0.0)) {
        Some(index) => Err(Error::NegativeComponent {
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}
