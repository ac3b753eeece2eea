use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A matrix-level precondition failed (e.g. fixed points of a non-hyperbolic map).
    #[error("domain error: {0}")]
    Domain(String),

    /// The two maps share their fixed points, so no ping-pong configuration exists.
    #[error("fixed points coincide")]
    FixedPointsCoincide,

    /// A certificate was not reached within the budget (refinements or powers).
    #[error("inconclusive within budget {0}")]
    Inconclusive(u32),

    #[error("vertex {0} is not in the truncated graph")]
    NotInGraph(String),

    /// The truncation is too small; the caller has to raise N.
    #[error("unreachable at truncation {n}: {detail}")]
    Unreachable { n: u64, detail: String },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("construction error: {0}")]
    Construction(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("serialization error: {0}")]
    Serialize(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialize(e.to_string())
    }
}
