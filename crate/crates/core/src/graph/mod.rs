//! Graph data model: problems, Steiner trees and the shared primitives
//! (shortest paths, metric closure, spanning trees, pruning) the rest of the
//! crate is built on.

mod mst;
mod paths;
mod problem;
mod tree;

use thiserror::Error;

pub use mst::{minimum_spanning_tree, spanning_forest, UnionFind};
pub use paths::{
    metric_closure, path_edges, shortest_path, ClosureEdge, MetricClosure, PathCache, ShortestPaths,
};
pub use problem::{
    validate_problem, Edge, EdgeId, NodeId, NodeKind, NodeRecord, Point, Problem, ProblemMeta,
    ValidationReport, Violation,
};
pub use tree::{
    check_tree_edges, connect_terminals, finalize_tree, is_steiner_tree, prune_tree, repair_tree,
    tree_cost, tree_from_keys, SteinerTree, TreeCheck, TreeViolation,
};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("node {node} out of range (graph has {nodes} nodes)")]
    UnknownNode { node: NodeId, nodes: usize },
    #[error("({u}, {v}) is not an edge of the problem")]
    UnknownEdge { u: NodeId, v: NodeId },
    #[error("edge id {0} out of range")]
    UnknownEdgeId(EdgeId),
    #[error("node {to} unreachable from {from}")]
    Unreachable { from: NodeId, to: NodeId },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("problem has no terminals")]
    NoTerminals,
    #[error("invalid problem: {0}")]
    Invalid(ValidationReport),
    #[error("not a Steiner tree: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    NotATree(Vec<TreeViolation>),
}
