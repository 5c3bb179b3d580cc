use std::path::PathBuf;

/// Errors raised across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate model: {0}")]
    DegenerateModel(String),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("distributions have disjoint support")]
    DegenerateSupport,
    #[error("divergence needs at least two clusters")]
    SingleCluster,
    #[error("Bhattacharyya overlap is zero")]
    ZeroOverlap,
    #[error("parameter outside the formula's domain: {0}")]
    DomainError(String),
    #[error("singular value threshold undefined: n * p_tilde = {0} <= 1")]
    ThresholdUndefined(f64),
    #[error("no reference ball reached the minimum cluster size")]
    NoClusters,
    #[error("cluster {0} is empty")]
    EmptyCluster(usize),
    #[error("partition sizes differ: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("enumeration of {0} assignments exceeds the oracle cap")]
    TooLarge(f64),
    #[error("every assignment has zero likelihood")]
    ZeroLikelihood,
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
