use thiserror::Error;

use crate::graph::NodeId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node {node} is out of range for a graph with {count} nodes")]
    InvalidNode { node: NodeId, count: usize },

    #[error("the two selected nodes must differ (got {0} twice)")]
    SameNode(NodeId),

    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),

    #[error("nodes {u} and {v} are not connected")]
    Unreachable { u: NodeId, v: NodeId },

    #[error("graph is not connected ({components} components)")]
    Disconnected { components: usize },

    #[error("graph needs at least {needed} nodes, has {found}")]
    TooFewNodes { needed: usize, found: usize },

    #[error("more than {cap} shortest paths between {u} and {v}")]
    PathCapExceeded { u: NodeId, v: NodeId, cap: usize },

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("infeasible plan: {0}")]
    Infeasible(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
