use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("asymmetric weights: b({0},{1}) = {2} but b({1},{0}) = {3}")]
    AsymmetricWeights(String, String, f64, f64),
    #[error("negative weight {2} on edge ({0},{1})")]
    NegativeWeight(String, String, f64),
    #[error("self loop at vertex {0} with weight {1}")]
    SelfLoop(String, f64),
    #[error("nonpositive measure {1} at vertex {0}")]
    NonpositiveMeasure(String, f64),
    #[error("duplicate vertex {0}")]
    DuplicateVertex(String),
    #[error("duplicate edge ({0},{1})")]
    DuplicateEdge(String, String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("vertex function has {got} values, graph has {expected} vertices")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("time must be positive, got {0}")]
    NonpositiveTime(f64),
    #[error("graph has {0} connected components; kernel positivity needs one")]
    DisconnectedGraph(usize),
    #[error("vertex {0} is not contained in the first exhaustion set")]
    VertexOutsideExhaustion(String),
    #[error("exhaustion sets are not nested at step {0}")]
    NotNested(usize),
    #[error("kernel tables belong to different graphs")]
    GraphMismatch,

    #[error("symmetric eigensolver did not converge within {0} iterations")]
    EigensolverNoConvergence(usize),
    #[error("time grid is empty")]
    EmptyGrid,

    #[error("heat kernel p(t,{0},{1}) vanishes; no bridge exists")]
    ZeroKernel(usize, usize),
    #[error("jump count truncation {n_max} leaves relative bridge mass {tail:e} uncovered")]
    NTruncationExceeded { n_max: usize, tail: f64 },
    #[error("start vertex {0} is not in the region K")]
    VertexNotInK(usize),

    #[error("Fourier truncation not converged: relative change {0:e} when doubling N")]
    TruncationNotConverged(f64),
    #[error("invalid torus model: {0}")]
    InvalidModel(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("config error: {0}")]
    Config(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
