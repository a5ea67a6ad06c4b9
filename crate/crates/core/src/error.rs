use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: left is {left:?}, right is {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("{op} requires a square matrix, got {rows}x{cols}")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("invalid scalar: {0}")]
    InvalidScalar(String),

    #[error("Kleene star diverges: a circuit of positive weight exists through node {node}")]
    KleeneDiverges { node: usize },

    #[error("no circuit; eigenvalue undefined for this artifact")]
    NoCircuit,

    #[error(
        "{op} requires an irreducible matrix, but the precedence graph has {components} strongly \
         connected components (reducible inputs are not supported)"
    )]
    Reducible { op: &'static str, components: usize },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("initial condition must be finite, entry {index} is eps")]
    NonFiniteInitial { index: usize },

    #[error(
        "no periodic regime found within {cap} iterations (last normalized state at k = {last_k})"
    )]
    RegimeCapExceeded { cap: usize, last_k: usize },

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("no repeated state within {k_max} synchronous steps")]
    OrbitCapExceeded { k_max: usize },

    #[error("rule arity mismatch: {0}")]
    Arity(String),

    #[error(
        "state transition graph for N = {n} exceeds the cap of {cap} cells; use sync_orbit instead"
    )]
    StgTooLarge { n: usize, cap: usize },

    #[error("{0}")]
    Undefined(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
