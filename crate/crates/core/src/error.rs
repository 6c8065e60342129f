use std::fmt;

use crate::search::CountsTable;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("column {column} is all-zero")]
    ZeroColumn { column: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("mask {0:#08x} is not a right coset of any subgroup of S4")]
    NotACoset(u32),

    #[error("configuration too large for the exhaustive oracle ({rows} rows, {cols} columns)")]
    TooLarge { rows: usize, cols: usize },

    #[error("stage {rows} exceeded its capacity of {capacity} classes")]
    StageOverflow {
        rows: usize,
        capacity: usize,
        /// Counts for every stage that completed before the overflow.
        completed: Box<CountsTable>,
    },

    #[error("malformed archive: {0}")]
    Archive(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A configuration text parse failure, with the 1-based line it occurred on.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    MalformedHeader(String),
    MalformedRow(String),
    RowWeight { found: usize },
    ColumnOutOfRange { column: usize, cols: usize },
    ClassOutOfRange { class: usize },
    PartitionMismatch,
    RowCount { expected: usize, found: usize },
    UnsortedColumns,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::MalformedHeader(s) => write!(f, "malformed header: {s}"),
            ParseErrorKind::MalformedRow(s) => write!(f, "malformed row: {s}"),
            ParseErrorKind::RowWeight { found } => {
                write!(f, "row has {found} columns, expected 3")
            }
            ParseErrorKind::ColumnOutOfRange { column, cols } => {
                write!(f, "column {column} out of range for {cols} columns")
            }
            ParseErrorKind::ClassOutOfRange { class } => {
                write!(f, "row class {class} out of range 0..3")
            }
            ParseErrorKind::PartitionMismatch => {
                write!(f, "row class does not match the declared partition")
            }
            ParseErrorKind::RowCount { expected, found } => {
                write!(f, "expected {expected} rows, found {found}")
            }
            ParseErrorKind::UnsortedColumns => write!(f, "column indices must be strictly ascending"),
        }
    }
}
