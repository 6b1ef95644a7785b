use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate instance: {0}")]
    DegenerateInstance(String),

    #[error("size guard exceeded: {what} = {value} (limit {limit})")]
    SizeGuard {
        what: &'static str,
        value: u64,
        limit: u64,
    },

    #[error("infeasible sampling target: {target} exceeds the {space} distinct half-vectors")]
    InfeasibleTarget { target: u64, space: u64 },

    #[error("sample budget of {budget} draws exhausted with {found} of {target} distinct vectors")]
    BudgetExceeded { budget: u64, found: usize, target: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no replacement available: every leaf subset is saturated")]
    SaturatedLeaf,

    #[error("element {0} is not present in leaf {1}")]
    MissingElement(String, usize),

    #[error("element {0} is already present in leaf {1}")]
    DuplicateElement(String, usize),

    #[error("optimizer found no feasible point: {0}")]
    Infeasible(String),

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
