use thiserror::Error;

#[derive(Debug, Error)]
pub enum HxError {
    #[error("edge has {found} vertices, expected {expected}")]
    EdgeSizeMismatch { expected: usize, found: usize },
    #[error("vertex {vertex} out of range [0, {n})")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("duplicate vertex {vertex} in edge")]
    DuplicateVertexInEdge { vertex: usize },
    #[error("empty list of sets")]
    EmptyList,
    #[error("parse error at line {line}: {msg}")]
    ParseError { line: usize, msg: String },
    #[error("format violation: {0}")]
    FormatViolation(String),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("hypergraph has uniformity zero")]
    UniformityZero,
    #[error("uniformity mismatch: expected {expected}, found {found}")]
    UniformityMismatch { expected: usize, found: usize },
    #[error("packing copies have differing uniformity")]
    NonuniformPacking,
    #[error("copy {copy} is not the shadow image under its recorded bijection")]
    ShadowMismatch { copy: usize },
    #[error("candidate edge list too large: {candidates} > limit {limit}")]
    TooManyCandidates { candidates: u128, limit: u128 },
    #[error("union map exceeded cap of {0} entries")]
    MaxUnionsExceeded(usize),
    #[error("retries exhausted after {attempts} attempts (best attempt kept {best_edges} edges)")]
    RetriesExhausted { attempts: u32, best_edges: usize },
    #[error("construction hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, HxError>;
