use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input values, impossible configurations, degenerate data.
    Domain,
    /// Missing files, unreadable or malformed fixtures.
    Environment,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown entity code `{0}`")]
    UnknownEntity(String),

    #[error("process statistic id {0} is outside 1..=10")]
    UnknownPs(u32),

    #[error("cannot read {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{file}: malformed csv: {message}")]
    Csv { file: String, message: String },

    #[error("{file}: header mismatch: expected `{expected}`, found `{found}`")]
    Header {
        file: String,
        expected: String,
        found: String,
    },

    #[error("{file}:{line}: expected {expected} columns, found {found}")]
    ColumnCount {
        file: String,
        line: u64,
        expected: usize,
        found: usize,
    },

    #[error("{file}:{line}: column `{column}` holds non-numeric value `{value}`")]
    NonNumeric {
        file: String,
        line: u64,
        column: String,
        value: String,
    },

    #[error("{file}:{line}: duplicate row for {entity}")]
    DuplicateEntity {
        file: String,
        line: u64,
        entity: String,
    },

    #[error("{file}: missing row for {entity}")]
    MissingEntity { file: String, entity: String },

    #[error("{file}:{line}: negative value {value} in column `{column}` for {entity}")]
    NegativeValue {
        file: String,
        line: u64,
        entity: String,
        column: String,
        value: f64,
    },

    #[error("{file}:{line}: unexpected US row (the weight table has no national row)")]
    UnexpectedUsRow { file: String, line: u64 },

    #[error("{file}: column `{column}` sums to {sum:.2}, expected 100 +/- 0.1")]
    ColumnSum {
        file: String,
        column: String,
        sum: f64,
    },

    #[error("{file}: expected {expected} rows, found {found}")]
    RowCount {
        file: String,
        expected: usize,
        found: usize,
    },

    #[error("all weights are zero for {0}")]
    DegenerateWeights(String),

    #[error("rows are misaligned: {left} values vs {right} values")]
    Misaligned { left: usize, right: usize },

    #[error("correlation undefined: {0} has zero variance")]
    ZeroVariance(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Io { .. }
            | Error::Csv { .. }
            | Error::Header { .. }
            | Error::ColumnCount { .. }
            | Error::NonNumeric { .. }
            | Error::DuplicateEntity { .. }
            | Error::MissingEntity { .. }
            | Error::NegativeValue { .. }
            | Error::UnexpectedUsRow { .. }
            | Error::ColumnSum { .. }
            | Error::RowCount { .. } => ErrorClass::Environment,
            _ => ErrorClass::Domain,
        }
    }
}
