use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate string id `{0}`")]
    DuplicateId(String),

    #[error("invalid polyline `{id}`: {reason}")]
    InvalidPolyline { id: String, reason: String },

    #[error("coordinate is not finite")]
    NonFinite,

    #[error("string family is empty")]
    EmptyFamily,

    #[error("vertex {0} is not in the graph")]
    UnknownVertex(usize),

    #[error("degenerate graph: {0}")]
    DegenerateGraph(String),

    #[error("extractor contract violated in round {round}: {reason}")]
    ExtractorViolation { round: usize, reason: String },

    /// The input was promised to be K_p-free but a p-clique (or, for drawings,
    /// p pairwise crossing edges) turned up. The witness is attached.
    #[error("precondition violated: found a clique of size {}", clique.len())]
    PreconditionViolated { clique: Vec<usize> },

    #[error("no multipartite cover found: {0}")]
    NoCoverFound(String),

    #[error("dense-core refinement failed: {0}")]
    RefinementFailed(String),

    #[error("neither the coloring nor the clique bound could be certified: {0}")]
    InternalBoundViolation(String),

    #[error("degenerate drawing: {0}")]
    DegenerateDrawing(String),

    #[error("invalid drawing: {0}")]
    InvalidDrawing(String),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("{what} refuses n = {n} (cap {cap})")]
    TooLarge { what: &'static str, n: usize, cap: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("schema error at `{field}`: {message}")]
    Schema { field: String, message: String },

    #[error("bad generator spec: {0}")]
    BadSpec(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema { field: field.into(), message: message.into() }
    }

    pub fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, column, message: message.into() }
    }
}
