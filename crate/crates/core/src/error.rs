use alloc::boxed::Box;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes of the numerical core.
///
/// The variants map one-to-one onto the CLI exit codes: invalid input (2),
/// domain errors and bad brackets (3), convergence failures (4).
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A constructor or operation argument violates its documented range.
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    /// The requested point is outside the domain of the expression
    /// (0/0 points, distributional drives evaluated pointwise, ...).
    Domain(&'static str),
    /// Adaptive quadrature ran out of budget before meeting its tolerance.
    Convergence {
        estimate: f64,
        abs_error: f64,
        evaluations: usize,
    },
    /// The objective has no interior maximum on the supplied bracket.
    Bracket { lo: f64, hi: f64 },
    /// A sweep cell failed; carries the cell coordinates.
    Cell {
        chi0: f64,
        lambda0: f64,
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter { name, value, reason }
    }

    /// Innermost error, looking through sweep-cell wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Cell { source, .. } => source.root(),
            other => other,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, value, reason } => {
                write!(f, "invalid {name} = {value}: {reason}")
            }
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Convergence {
                estimate,
                abs_error,
                evaluations,
            } => write!(
                f,
                "quadrature did not converge after {evaluations} evaluations \
                 (estimate {estimate:e}, error {abs_error:e})"
            ),
            Error::Bracket { lo, hi } => {
                write!(f, "objective is monotone on bracket [{lo}, {hi}]")
            }
            Error::Cell {
                chi0,
                lambda0,
                source,
            } => write!(f, "cell (chi0 = {chi0}, lambda0 = {lambda0}): {source}"),
        }
    }
}

impl core::error::Error for Error {}
