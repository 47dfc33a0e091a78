use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("matrix is not symplectic")]
    NotSymplectic,

    #[error("not a Clifford unitary: {0}")]
    NotClifford(String),

    #[error("state is not normalized (norm² = {0})")]
    Normalization(f64),

    #[error("invalid tensor degree k = {0}; must be a positive multiple of 4")]
    InvalidDegree(usize),

    #[error("subset is not closed under multiplication")]
    NotAGroup,

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("did not converge: {0}")]
    Convergence(String),

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
