//! Exact sparse arithmetic for truncated multivariate Laurent series in `q`.

mod monomial;
mod series;
mod var;

pub use monomial::{ExponentVector, Monomial, VarExps};
pub use series::{Grade, Series};
pub use var::{VarTag, VarTagError};

use thiserror::Error;

/// Default truncation order for verification runs.
pub const DEFAULT_ORDER: i64 = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QError {
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("coefficient of q^{requested} requested beyond truncation order {order}")]
    QueryBeyondOrder { requested: i64, order: i64 },
    #[error("truncation unsound: order {needed} requested but only {available} is determined")]
    TruncationUnsound { needed: i64, available: i64 },
    #[error("not truncatable: {0}")]
    NotTruncatable(String),
    #[error("zero divisor: {0}")]
    ZeroDivisor(String),
    #[error("term at q^{qexp} lies below floor {floor}")]
    BelowFloor { qexp: i64, floor: i64 },
    #[error("malformed series text: {0}")]
    Malformed(String),
}

impl QError {
    pub fn name(&self) -> &'static str {
        match self {
            QError::NotInvertible(_) => "NotInvertible",
            QError::QueryBeyondOrder { .. } => "QueryBeyondOrder",
            QError::TruncationUnsound { .. } => "TruncationUnsound",
            QError::NotTruncatable(_) => "NotTruncatable",
            QError::ZeroDivisor(_) => "ZeroDivisorFlag",
            QError::BelowFloor { .. } => "BelowFloor",
            QError::Malformed(_) => "MalformedSeries",
        }
    }
}
