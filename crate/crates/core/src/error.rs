use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("duplicate id {0}")]
    DuplicateId(u64),
    #[error("node {node} has degree {degree}, above the bound {max}")]
    DegreeExceeded { node: usize, degree: usize, max: usize },
    #[error("node index {0} out of range")]
    InvalidIndex(usize),
    #[error("instance would have {0} nodes, above the cap")]
    SizeOverflow(u128),
    #[error("id range [1, {range}] too small for {n} nodes")]
    RangeTooSmall { n: usize, range: u64 },
    #[error("knowledge violation: {0}")]
    KnowledgeViolation(String),
    #[error("no termination within {0} rounds")]
    NonTermination(usize),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("objective does not change sign on the search interval")]
    NoBracket,
    #[error("round budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("malformed level structure: {0}")]
    MalformedLevel(String),
    #[error("id promise violated: max id {max_id} > {bound}")]
    PromiseViolation { max_id: u64, bound: f64 },
    #[error("node {0} is not at the required level")]
    WrongLevel(usize),
    #[error("inconsistent commitments on the segment containing node {0}")]
    UnsolvableWitness(usize),
    #[error("domain of the half-log is too small: {0}")]
    DomainTooSmall(String),
    #[error("need at least {need} distinct sizes, got {got}")]
    InsufficientData { need: usize, got: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
