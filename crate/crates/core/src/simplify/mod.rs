//! Graph simplifiers and lifting of simplified solutions back onto the
//! source graph.

pub mod delaunay;
mod gng;
mod physarum;
mod triangle;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{path_edges, repair_tree, Edge, EdgeId, GraphError, NodeId, PathCache, Problem, SteinerTree};
use crate::solvers::physarum::{PhysarumError, PhysarumParams};

pub use gng::{gng_simplify, sample_signal, Gng, GngParams, IsoField, ISO_LEVELS};
pub use physarum::physarum_simplify;
pub use triangle::{triangle_error, triangle_simplify, triangle_simplify_detailed, TriangleIndividual, TriangleOutcome, TriangleParams};

#[derive(Debug, Error)]
pub enum SimplifyError {
    #[error("selection is degenerate: fewer than three points or all collinear")]
    Degenerate,
    #[error("invalid simplifier parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Physarum(#[from] PhysarumError),
}

/// A reduced graph plus the map from its nodes to source nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplifiedProblem {
    pub problem: Problem,
    /// `node_map[i]` is the source node standing behind simplified node `i`;
    /// terminals map to themselves.
    pub node_map: Vec<NodeId>,
}

impl SimplifiedProblem {
    pub fn identity(p: &Problem) -> Self {
        Self {
            problem: p.clone(),
            node_map: (0..p.node_count()).collect(),
        }
    }
}

/// Problem over the source nodes `keys` (ascending) joined by `edges` in
/// local indices; edge cost is mean endpoint weight × Euclidean length.
pub(crate) fn weighted_problem(p: &Problem, keys: &[NodeId], edges: &[(usize, usize)]) -> Result<SimplifiedProblem, SimplifyError> {
    let nodes = keys.iter().map(|&v| *p.node(v)).collect::<Vec<_>>();
    let edges = edges
        .iter()
        .map(|&(a, b)| {
            let (na, nb) = (&nodes[a], &nodes[b]);
            Edge::new(a, b, 0.5 * (na.weight + nb.weight) * na.position.distance(&nb.position))
        })
        .collect();
    let problem = Problem::new(nodes, edges)?.with_meta(p.meta().clone());
    Ok(SimplifiedProblem {
        problem,
        node_map: keys.to_vec(),
    })
}

/// Subgraph formed by `edges` plus every terminal, with source costs.
pub(crate) fn edge_subproblem(p: &Problem, edges: &[EdgeId]) -> Result<SimplifiedProblem, SimplifyError> {
    let mut keep: BTreeSet<NodeId> = p.terminals().iter().copied().collect();
    for &e in edges {
        keep.insert(p.edge(e).u);
        keep.insert(p.edge(e).v);
    }
    let keys: Vec<NodeId> = keep.into_iter().collect();
    let mut local = vec![usize::MAX; p.node_count()];
    for (i, &v) in keys.iter().enumerate() {
        local[v] = i;
    }
    let mut sorted = edges.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let sub_edges = sorted
        .iter()
        .map(|&e| {
            let edge = p.edge(e);
            Edge::new(local[edge.u], local[edge.v], edge.cost)
        })
        .collect();
    let nodes = keys.iter().map(|&v| *p.node(v)).collect();
    let problem = Problem::new(nodes, sub_edges)?.with_meta(p.meta().clone());
    Ok(SimplifiedProblem { problem, node_map: keys })
}

/// Maps a tree on the simplified graph onto `origin`: each simplified edge
/// becomes the shortest source path between its mapped endpoints, the union
/// is reconnected if needed, spanned by a minimum spanning tree and pruned.
pub fn lift_solution(origin: &Problem, sp: &SimplifiedProblem, tree: &SteinerTree) -> Result<SteinerTree, GraphError> {
    let mut cache = PathCache::new(origin);
    let mut edges = BTreeSet::new();
    for &e in tree.edges() {
        let edge = sp.problem.edge(e);
        let (a, b) = (sp.node_map[edge.u], sp.node_map[edge.v]);
        if a == b {
            continue;
        }
        let path = cache.path(a, b).ok_or(GraphError::Disconnected)?;
        edges.extend(path_edges(origin, &path));
    }
    let edges: Vec<EdgeId> = edges.into_iter().collect();
    repair_tree(origin, &edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Simplifier {
    #[default]
    None,
    Triangle,
    Gng,
    Physarum,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SimplifyParams {
    pub triangle: TriangleParams,
    pub gng: GngParams,
    pub physarum: PhysarumParams,
    /// Conductivity below which Physarum-simplified edges are dropped;
    /// `None` uses `α·ε`.
    pub keep_threshold: Option<f64>,
}

pub fn simplify(p: &Problem, kind: Simplifier, params: &SimplifyParams, seed: u64) -> Result<SimplifiedProblem, SimplifyError> {
    match kind {
        Simplifier::None => Ok(SimplifiedProblem::identity(p)),
        Simplifier::Triangle => triangle_simplify(p, &params.triangle, seed),
        Simplifier::Gng => gng_simplify(p, &params.gng, seed),
        Simplifier::Physarum => {
            let physarum = PhysarumParams {
                seed,
                ..params.physarum.clone()
            };
            physarum_simplify(p, &physarum, params.keep_threshold)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{check_tree_edges, NodeRecord};
    use crate::solvers::{solve_baseline, solve_exact};

    fn ring() -> Problem {
        let nodes = vec![
            NodeRecord::terminal(0.0, 0.0),
            NodeRecord::waypoint(1.0, 0.0, 1.0),
            NodeRecord::terminal(2.0, 0.0),
            NodeRecord::waypoint(1.0, 1.0, 1.0),
        ];
        let edges = vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0), Edge::new(2, 3, 1.0), Edge::new(3, 0, 1.0)];
        Problem::new(nodes, edges).unwrap()
    }

    #[test]
    fn identity_lift_is_the_identity() {
        let p = ring();
        let sp = SimplifiedProblem::identity(&p);
        let t = solve_exact(&p).unwrap();
        assert_eq!(lift_solution(&p, &sp, &t).unwrap(), t);
    }

    #[test]
    fn lifting_a_shortcut_expands_it_into_a_path() {
        let p = ring();
        // Simplified graph: just the two terminals, directly joined.
        let sp = weighted_problem(&p, &[0, 2], &[(0, 1)]).unwrap();
        let t = solve_baseline(&sp.problem).unwrap();
        let lifted = lift_solution(&p, &sp, &t).unwrap();
        assert!(check_tree_edges(&p, lifted.edges()).unwrap().is_valid());
        assert!((lifted.cost() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn edge_subproblem_keeps_terminals() {
        let p = ring();
        let sp = edge_subproblem(&p, &[0]).unwrap_err();
        assert!(matches!(sp, SimplifyError::Graph(_)));
        let sp = edge_subproblem(&p, &[0, 1]).unwrap();
        assert_eq!(sp.node_map, vec![0, 1, 2]);
        assert_eq!(sp.problem.terminals(), &[0, 2]);
    }
}
