use thiserror::Error;

use crate::value_group::GroupKind;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("value group mismatch: {left:?} vs {right:?}")]
    GroupMismatch { left: GroupKind, right: GroupKind },

    #[error("prime mismatch: {left} vs {right}")]
    PrimeMismatch { left: u32, right: u32 },

    #[error("{0} is not a prime supported here")]
    BadPrime(u32),

    #[error("{value} is not in Z[1/{p}]")]
    NotInValueGroup { value: String, p: u32 },

    #[error("division by zero")]
    DivisionByZero,

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("indeterminate at precision: {0}")]
    Indeterminate(String),

    #[error("Witt level {requested} exceeds the table cap {cap} (set AINF_TABLE_CAP to override)")]
    TableCap { requested: usize, cap: usize },

    #[error("unsupported value-group variant for this operation: {0:?}")]
    UnsupportedVariant(GroupKind),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("not a factorization: y*z differs from x at level {level}")]
    NotAFactorization { level: i64 },

    #[error("unsupported transition matrix: {0}")]
    UnsupportedForm(String),

    #[error("lattice rank defect: rank {found} < {expected} at precision")]
    LatticeDefect { found: usize, expected: usize },

    #[error("transfer induction stalled at level {level}: {reason}")]
    TransferStall { level: i64, reason: String },

    #[error("unsupported ring tag: {0}")]
    UnsupportedTag(String),

    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
