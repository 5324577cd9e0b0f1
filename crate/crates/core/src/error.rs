use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("modulus {0} is neither 0 nor a prime")]
    InvalidModulus(u64),

    #[error("series parameter mismatch: {0}")]
    ParameterMismatch(String),

    #[error("series is not invertible: constant term is not 1")]
    NonInvertible,

    #[error("generator {0} has no assigned series")]
    MissingAssignment(usize),

    #[error("monomial of degree {len} exceeds truncation degree {q}; raise q")]
    TruncationExceeded { len: usize, q: usize },

    #[error("parse error at line {line}, event {event}: {msg}")]
    Parse { line: usize, event: usize, msg: String },

    #[error("unknown component {0}")]
    UnknownComponent(usize),

    #[error("rewrite not applicable: {0}")]
    Rewrite(String),

    #[error("malformed diagram: {0}")]
    MalformedDiagram(String),

    #[error("internal consistency violated: {0}")]
    Internal(String),

    #[error("invalid index: {0}")]
    InvalidIndex(String),

    #[error("component {component} has odd linking number {linking} with the axis")]
    OddLinking { component: usize, linking: i64 },

    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    #[error("band sum not possible: {0}")]
    Composition(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("unknown corpus entry {0:?}")]
    UnknownCorpus(String),
}
