use thiserror::Error;

/// Ways an environment can fail validation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("duplicate relation id {0:?}")]
    DuplicateRelation(String),
    #[error("relation {0:?} is a self-loop")]
    SelfLoop(String),
    #[error("{context} references concept {index}, but the ontology has {count} concepts")]
    DanglingConcept {
        context: String,
        index: usize,
        count: usize,
    },
    #[error("page {page:?} references unknown relation {relation:?}")]
    UnknownRelation { page: String, relation: String },
    #[error("page {page:?} lists relation {relation:?} more than once")]
    RepeatedPageRelation { page: String, relation: String },
    #[error("page {page:?} lists concept {concept} as isolated, but a page relation touches it")]
    ConceptNotIsolated { page: String, concept: usize },
    #[error("duplicate page id {0:?}")]
    DuplicatePage(String),
    #[error("query has no term/concept associations")]
    EmptyQuery,
    #[error("candidate pair ({0}, {1}) appears more than once")]
    DuplicateCandidate(usize, usize),
    #[error("candidate pair ({0}, {1}) is invalid: {2}")]
    InvalidCandidate(usize, usize, &'static str),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed environment file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid environment: {0}")]
    Validation(#[from] ValidationError),
    #[error("{edges} candidate edges exceed the enumeration cap of {cap}")]
    EnumerationCap { edges: usize, cap: usize },
    #[error("brute-force oracle accepts at most {cap} edges, got {edges}")]
    OracleSize { edges: usize, cap: usize },
    #[error("tree length must be at least 1")]
    ZeroLength,
    #[error("back-link ranking needs at least two pages, got {0}")]
    TooFewPages(usize),
    #[error("back-link matrix is all zeros")]
    ZeroMatrix,
    #[error(
        "power iteration did not converge after {iterations} iterations (last change {change:.3e})"
    )]
    NonConvergence { iterations: usize, change: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("method {0} needs a query")]
    MissingQuery(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
