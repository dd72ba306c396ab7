use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("matrix is rank deficient (rank {rank}, need {needed})")]
    RankDeficient { level: Option<usize>, rank: usize, needed: usize },

    #[error("cannot dilate: matrix at level {level} has rank {rank} < {cols} after contraction")]
    NotDilatable { level: usize, rank: usize, cols: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("row {row} of the matrix at level {level} has no edge")]
    ZeroRow { level: usize, row: usize },

    #[error("user parent map at level {level} is not supported by the diagram: {detail}")]
    UnsupportedUserMap { level: usize, detail: String },

    #[error("depth {requested} exceeds available depth {available}")]
    DepthExceeded { requested: usize, available: usize },

    #[error("end census is not certified")]
    Uncertified,

    #[error("no completion column found for the matrix at level {level} in the bounded search space")]
    CompletionNotFound { level: usize },

    #[error("completion at level {level} is singular")]
    SingularCompletion { level: usize },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("level {level} is not unique-minimal")]
    NotUniqueMinimal { level: usize },

    #[error("level {level} is unique-minimal but not in near-diagonal order")]
    NotNearDiagonal { level: usize },

    #[error("function is not in the dimension group (checked to depth {checked_to})")]
    NotInK0 { checked_to: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }

    pub(crate) fn shape(message: impl Into<String>) -> Self {
        Error::Shape(message.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
