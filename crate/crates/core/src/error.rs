use thiserror::Error;

use crate::semiring::SemiringKind;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("algebra error: cannot combine {left:?} with {right:?} values")]
    SemiringMismatch {
        left: SemiringKind,
        right: SemiringKind,
    },

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("alphabet error: {0}")]
    Alphabet(String),

    #[error("incomparable automata: {0}")]
    Incomparable(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad input rather than a failing environment.
    pub fn is_usage(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Csv(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
