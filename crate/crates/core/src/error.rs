use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: self-loop on node {label}")]
    SelfLoop { line: usize, label: String },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("graph is not connected")]
    Disconnected,

    #[error("node {0} out of range")]
    NodeOutOfRange(usize),

    #[error("edge {0} out of range")]
    EdgeOutOfRange(usize),

    #[error("edge {0} was already removed")]
    EdgeRemoved(usize),

    #[error("edge {0} is a bridge")]
    Bridge(usize),

    #[error("endpoints must differ (got {0} twice)")]
    SameNode(usize),

    #[error("information centrality needs at least two nodes")]
    SingleNode,

    #[error("k = {k} must satisfy 1 <= k < m = {m}")]
    InvalidK { k: usize, m: usize },

    #[error("{subsets} subsets exceed the enumeration budget of {budget}")]
    BudgetExceeded { subsets: u128, budget: u128 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
