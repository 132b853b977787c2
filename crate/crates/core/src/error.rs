use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration error: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("numeric prox did not converge after {iterations} iterations (gap estimate {gap:e})")]
    NonConvergence { iterations: usize, gap: f64 },

    #[error("infeasible point at round {round}, node {node}: {detail}")]
    Infeasible {
        round: usize,
        node: usize,
        detail: String,
    },

    #[error("assumption check failed at round {round}: {detail}")]
    Assumption { round: usize, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(vec![msg.into()])
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
