use std::fmt;

/// Errors shared across the model, engine, and initialization layers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Vector/matrix dimensions do not line up.
    DimensionMismatch(String),
    /// The constraint matrix has numerically dependent rows.
    RankDeficient { dependent_rows: Vec<usize> },
    /// A candidate basis matrix was numerically singular.
    SingularBasis { smallest_pivot: f64 },
    /// An index passed to a pivot or basis operation is out of place
    /// (not basic / not nonbasic / out of range).
    InvalidIndex(String),
    /// An engine was started from a basis that violates its precondition.
    BadStart(String),
    /// A problem fails a structural validity check (negative capacity,
    /// unbalanced supplies, zero rows where nonzero ones are required, ...).
    InvalidProblem(String),
    /// A starting point handed to a point-based routine violates its
    /// precondition (infeasible, too far from the constraint surface, ...).
    BadPoint(String),
    /// An unbounded improving direction was met where a bounded step was
    /// required.
    UnboundedDirection,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch(msg) => write!(f, "dimension mismatch: {}", msg),
            Error::RankDeficient { dependent_rows } => {
                write!(f, "constraint matrix is rank deficient; dependent rows {:?}", dependent_rows)
            }
            Error::SingularBasis { smallest_pivot } => {
                write!(f, "basis matrix is singular (smallest pivot {:e})", smallest_pivot)
            }
            Error::InvalidIndex(msg) => write!(f, "invalid index: {}", msg),
            Error::BadStart(msg) => write!(f, "bad starting basis: {}", msg),
            Error::InvalidProblem(msg) => write!(f, "invalid problem: {}", msg),
            Error::BadPoint(msg) => write!(f, "bad starting point: {}", msg),
            Error::UnboundedDirection => write!(f, "improving direction is unbounded"),
        }
    }
}

impl std::error::Error for Error {}
