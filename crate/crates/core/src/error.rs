use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure class, used by the CLI to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad argument values (intervals, breaks, counts).
    Usage,
    /// Malformed or inconsistent input data.
    Data,
    /// The measure is undefined for the given input.
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("category error: {0}")]
    Category(String),

    #[error("window error: {0}")]
    Window(String),

    #[error("record {index} at ({x}, {y}) lies outside the window")]
    /// `index` is the 1-based record number.
    Containment { index: usize, x: f64, y: f64 },

    #[error("empty point pattern")]
    EmptyPattern,

    #[error("estimation error: {0}")]
    Estimation(String),

    #[error("at least 2 spatial units are required, got {0}")]
    InsufficientUnits(usize),

    #[error("invalid distance interval ({d0}, {d1}]: upper bound must exceed lower bound >= 0")]
    Interval { d0: f64, d1: f64 },

    #[error("invalid distance breaks: {0}")]
    Breaks(String),

    #[error("last distance break {last} does not cover the maximum distance {max}")]
    Coverage { last: f64, max: f64 },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("category {0:?} does not occur in the data")]
    EmptyPhenomenon(String),

    #[error("area {area} has zero size but positive probability")]
    DegenerateArea { area: usize },

    #[error("no pairs selected by the adjacency structure")]
    NoPairs,

    #[error("entropy {entropy} exceeds log(I^2) for I = {n_cat}")]
    Inconsistency { entropy: f64, n_cat: usize },

    #[error("unit count mismatch: data has {data} units, structure has {structure}")]
    Mismatch { data: usize, structure: usize },

    #[error("proportion undefined: H(Z) = 0")]
    UndefinedProportion,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Interval { .. } | Error::Breaks(_) | Error::Coverage { .. } | Error::Argument(_) => {
                ErrorKind::Usage
            }
            Error::Dimension(_)
            | Error::Category(_)
            | Error::Window(_)
            | Error::Containment { .. }
            | Error::EmptyPattern
            | Error::Mismatch { .. }
            | Error::Parse { .. }
            | Error::Schema(_)
            | Error::Io(_) => ErrorKind::Data,
            Error::Estimation(_)
            | Error::InsufficientUnits(_)
            | Error::EmptyPhenomenon(_)
            | Error::DegenerateArea { .. }
            | Error::NoPairs
            | Error::Inconsistency { .. }
            | Error::UndefinedProportion => ErrorKind::Numeric,
        }
    }
}
