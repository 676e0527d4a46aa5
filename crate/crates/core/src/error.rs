use thiserror::Error;

use crate::graph::NodeId;
use crate::kernel::NodeState;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph must contain at least one node")]
    EmptyGraph,

    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),

    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(NodeId, NodeId),

    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    #[error("line {line}: {message}")]
    EdgeList { line: usize, message: String },

    #[error("cannot parse weight {0:?}")]
    ParseWeight(String),

    #[error("ensemble weights must be positive and sum to 1 (sum = {sum})")]
    EnsembleNotNormalized { sum: String },

    #[error("enumeration would produce {produced} members, above the cap of {cap}")]
    EnumerationCap { produced: usize, cap: usize },

    #[error("invalid state (n={n}, k={k}): degree must be below network size")]
    InvalidState { n: usize, k: usize },

    #[error("state distribution mass sums to {sum}, expected 1")]
    StateNotNormalized { sum: String },

    #[error("cannot attach {m} edges in a network of {n} nodes")]
    AttachmentTooLarge { m: usize, n: usize },

    #[error("no node occupies state {0}")]
    UnoccupiedState(NodeState),

    #[error("reassignment undefined at size {n}: every surviving node has zero weight")]
    DegenerateReassignment { n: usize },

    #[error("state at size {n} lies outside [{floor}, {cap}]")]
    OutsideBounds { n: usize, floor: usize, cap: usize },

    #[error("mass {leaked} escaped the size cap {cap}; rerun with a larger n_cap")]
    CapLeakage { leaked: f64, cap: usize },

    #[error("invalid {field}: {message}")]
    Invalid { field: &'static str, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse_weight(s: &str) -> Self {
        Error::ParseWeight(s.to_string())
    }

    pub(crate) fn invalid(field: &'static str, message: impl Into<String>) -> Self {
        Error::Invalid {
            field,
            message: message.into(),
        }
    }
}
