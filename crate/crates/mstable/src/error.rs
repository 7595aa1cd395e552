//! Shared error type for all modules.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("DIVISION_BY_ZERO: rational division by zero")]
    DivisionByZero,

    #[error("BAD_RATIONAL: cannot parse {0:?} as an exact rational")]
    BadRational(String),

    #[error("BAD_SPACE: n={n}, m={m} (need 1 <= n <= 62 and 0 <= m <= n-1)")]
    BadSpace { n: u32, m: u32 },

    #[error("BAD_MARK: mark {mark} outside 1..={n}")]
    BadMark { mark: u32, n: u32 },

    #[error("BAD_INDEX: marked-point index {index} outside 1..={n}")]
    BadIndex { index: u32, n: u32 },

    #[error("CARDINALITY: |S|={size} outside the basis range 2..={max} for this space")]
    Cardinality { size: u32, max: u32 },

    #[error("SPACE_MISMATCH: operands live on (n={left_n}, m={left_m}) and (n={right_n}, m={right_m})")]
    SpaceMismatch {
        left_n: u32,
        left_m: u32,
        right_n: u32,
        right_m: u32,
    },

    #[error("ENUM_CAP: full subset enumeration needs n <= {cap} (set MSTABLE_ENUM_CAP to raise), got n = {n}")]
    EnumCap { n: u32, cap: u32 },

    #[error("NOT_BIG: the divisor is not big at s = {s} (requires s > {threshold})")]
    NotBig { s: String, threshold: String },

    #[error("L_OUT_OF_RANGE: l={l} outside 1..={m}")]
    LOutOfRange { l: u32, m: u32 },

    #[error("EMPTY_STRATUM: the all-singleton partition has no stratum (dimension -1)")]
    EmptyStratum,

    #[error("ALL_SINGLETONS: no fiber curve exists for a partition without a part of size >= 2")]
    AllSingletons,

    #[error("DISCONNECTED: the dual graph is not connected")]
    Disconnected,

    #[error("GENUS_NOT_ONE: arithmetic genus is {got}, expected 1")]
    GenusNotOne { got: i64 },

    #[error("NO_HUB: the dual graph has no elliptic multi-branch point")]
    NoHub,

    #[error("BAD_GRAPH: {0}")]
    BadGraph(String),

    #[error("NON_TERMINATION: reduction exceeded its step bound of {bound}")]
    NonTermination { bound: usize },

    #[error("PRECONDITION_VIOLATED: {0}")]
    PreconditionViolated(String),

    #[error("IO: {0}")]
    Io(String),

    #[error("JSON: {0}")]
    Json(String),

    #[error("USAGE: {0}")]
    Usage(String),

    #[error("INTERNAL: {0}")]
    Internal(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
