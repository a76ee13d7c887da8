use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty expression")]
    EmptyInput,
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at offset {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("t = {t} outside working interval [{lo}, {hi}]")]
    OutOfInterval { t: f64, lo: f64, hi: f64 },
    #[error("quadrature failure: {0}")]
    Quadrature(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(
        "inconclusive null-space rank (candidates {low} and {high}; singular ratios {ratios:?})"
    )]
    Inconclusive {
        low: usize,
        high: usize,
        ratios: Vec<f64>,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("blow-up at {at}: {msg}")]
    BlowUp { at: f64, msg: String },
    #[error("off grid: {0}")]
    OffGrid(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Inconclusive { .. } => 2,
            Error::Quadrature(_)
            | Error::Numerical(_)
            | Error::BlowUp { .. }
            | Error::OffGrid(_) => 3,
            _ => 1,
        }
    }
}
