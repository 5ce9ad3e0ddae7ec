use serde::{Deserialize, Serialize};

use super::{build_stp_qubo, exhaustive_qubo_min, sample_qubo_sa, Qubo, QuboBuildParams, SamplerParams, VarTag, EXHAUSTIVE_GUARD};
use crate::graph::{check_tree_edges, finalize_tree, EdgeId, NodeId, Problem, SteinerTree};
use crate::partition::{merge_sph, PartTree, SphParams};
use crate::solvers::SolverError;

/// A broken constraint found while decoding an assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum QuboViolation {
    RootCount { count: usize },
    NotOneHot { node: NodeId, count: usize },
    EdgeDepthMismatch { edge: EdgeId, depth: usize },
    MissingIncoming { node: NodeId, depth: usize, count: usize },
    EdgeUsedMismatch { edge: EdgeId },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    /// Edges whose usage bit is set, ascending.
    pub edges: Vec<EdgeId>,
    pub violations: Vec<QuboViolation>,
}

/// Reads the usage bits and audits every constraint family.
pub fn decode_assignment(q: &Qubo, p: &Problem, x: &[bool]) -> Decoded {
    let n = p.node_count();
    let depth = q.max_depth;
    let mut roots = 0;
    let mut slots_on = vec![0usize; n];
    let mut at = vec![vec![false; depth + 1]; n];
    let mut incoming = vec![vec![0usize; depth + 1]; n];
    let mut y_per_edge = vec![0usize; p.edge_count()];
    let mut used = vec![None; p.edge_count()];
    for (i, tag) in q.var_map.iter().enumerate() {
        match *tag {
            VarTag::Root { node } => {
                if x[i] {
                    roots += 1;
                    slots_on[node] += 1;
                    at[node][0] = true;
                }
            }
            VarTag::NodeDepth { node, depth } => {
                if x[i] {
                    slots_on[node] += 1;
                    at[node][depth] = true;
                }
            }
            VarTag::Absent { node } => {
                if x[i] {
                    slots_on[node] += 1;
                }
            }
            VarTag::EdgeDepth { edge, .. } => {
                if x[i] {
                    y_per_edge[edge] += 1;
                }
            }
            VarTag::EdgeUsed { edge } => used[edge] = Some(x[i]),
        }
    }
    let mut violations = Vec::new();
    if roots != 1 {
        violations.push(QuboViolation::RootCount { count: roots });
    }
    for (node, &count) in slots_on.iter().enumerate() {
        if count != 1 {
            violations.push(QuboViolation::NotOneHot { node, count });
        }
    }
    for (i, tag) in q.var_map.iter().enumerate() {
        if let VarTag::EdgeDepth { edge, from, to, depth } = *tag {
            if x[i] {
                incoming[to][depth] += 1;
                if !at[from][depth - 1] || !at[to][depth] {
                    violations.push(QuboViolation::EdgeDepthMismatch { edge, depth });
                }
            }
        }
    }
    for node in 0..n {
        for d in 1..=depth {
            if at[node][d] && incoming[node][d] != 1 {
                violations.push(QuboViolation::MissingIncoming {
                    node,
                    depth: d,
                    count: incoming[node][d],
                });
            }
        }
    }
    let mut edges = Vec::new();
    for (edge, u) in used.iter().enumerate() {
        let on = u.unwrap_or(false);
        if on {
            edges.push(edge);
        }
        if usize::from(on) != y_per_edge[edge] {
            violations.push(QuboViolation::EdgeUsedMismatch { edge });
        }
    }
    Decoded { edges, violations }
}

/// Joins whatever fragments `edges` forms into a valid tree with the
/// shortest-path heuristic merge.
pub fn repair_components(p: &Problem, edges: &[EdgeId]) -> Result<SteinerTree, SolverError> {
    Ok(merge_sph(p, &[PartTree::from_edges(p, edges)], &SphParams::default())?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerChoice {
    /// Exhaustive up to the guard, annealing above it.
    #[default]
    Auto,
    Exhaustive,
    Anneal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuboParams {
    pub build: QuboBuildParams,
    pub sampler: SamplerChoice,
    pub anneal: SamplerParams,
    /// Models above this size are not sampled; the result is the repaired
    /// empty assignment.
    pub max_vars: usize,
}

impl Default for QuboParams {
    fn default() -> Self {
        Self {
            build: QuboBuildParams::default(),
            sampler: SamplerChoice::Auto,
            anneal: SamplerParams::default(),
            max_vars: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuboOutcome {
    pub tree: SteinerTree,
    pub assignment: Vec<bool>,
    pub energy: f64,
    pub n_vars: usize,
    pub decoded: Decoded,
    /// Whether the decoded edge set needed repair to become a valid tree.
    pub repaired: bool,
    pub sampled: bool,
}

/// Build, sample, decode and repair.
pub fn solve_qubo_detailed(p: &Problem, params: &QuboParams) -> Result<QuboOutcome, SolverError> {
    let q = build_stp_qubo(p, &params.build)?;
    let n_vars = q.n_vars();
    let sampled = n_vars <= params.max_vars;
    let (assignment, energy) = if !sampled {
        let x = vec![false; n_vars];
        let e = q.energy(&x);
        (x, e)
    } else {
        match params.sampler {
            SamplerChoice::Exhaustive => exhaustive_qubo_min(&q)?,
            SamplerChoice::Auto if n_vars <= EXHAUSTIVE_GUARD => exhaustive_qubo_min(&q)?,
            _ => sample_qubo_sa(&q, &params.anneal),
        }
    };
    let decoded = decode_assignment(&q, p, &assignment);
    let valid = decoded.violations.is_empty() && check_tree_edges(p, &decoded.edges)?.is_valid();
    let tree = if valid {
        finalize_tree(p, &decoded.edges)?
    } else {
        repair_components(p, &decoded.edges)?
    };
    Ok(QuboOutcome {
        tree,
        assignment,
        energy,
        n_vars,
        decoded,
        repaired: !valid,
        sampled,
    })
}

pub fn solve_qubo(p: &Problem, params: &QuboParams) -> Result<SteinerTree, SolverError> {
    Ok(solve_qubo_detailed(p, params)?.tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, NodeRecord};
    use crate::solvers::solve_exact;

    fn diamond() -> Problem {
        let nodes = vec![
            NodeRecord::terminal(0.0, 0.0),
            NodeRecord::waypoint(1.0, 1.0, 1.0),
            NodeRecord::waypoint(1.0, -1.0, 1.0),
            NodeRecord::terminal(2.0, 0.0),
        ];
        let edges = vec![Edge::new(0, 1, 1.0), Edge::new(1, 3, 1.0), Edge::new(0, 2, 1.5), Edge::new(2, 3, 0.2)];
        Problem::new(nodes, edges).unwrap()
    }

    #[test]
    fn empty_assignment_reports_root_and_one_hot_violations() {
        let p = diamond();
        let q = build_stp_qubo(&p, &QuboBuildParams::default()).unwrap();
        let d = decode_assignment(&q, &p, &vec![false; q.n_vars()]);
        assert!(d.edges.is_empty());
        assert!(d.violations.contains(&QuboViolation::RootCount { count: 0 }));
        assert!(d.violations.contains(&QuboViolation::NotOneHot { node: 1, count: 0 }));
    }

    #[test]
    fn ground_state_decodes_to_the_optimum() {
        let p = diamond();
        let params = QuboParams {
            build: QuboBuildParams {
                max_depth: Some(2),
                ..Default::default()
            },
            sampler: SamplerChoice::Exhaustive,
            ..Default::default()
        };
        let out = solve_qubo_detailed(&p, &params).unwrap();
        assert!(out.decoded.violations.is_empty());
        assert!(!out.repaired);
        let exact = solve_exact(&p).unwrap();
        assert!((out.tree.cost() - exact.cost()).abs() < 1e-9);
        assert!((out.energy - exact.cost()).abs() < 1e-9);
    }

    #[test]
    fn fragments_are_repaired_into_a_tree() {
        let p = diamond();
        let t = repair_components(&p, &[0]).unwrap();
        assert!(check_tree_edges(&p, t.edges()).unwrap().is_valid());
        let t = repair_components(&p, &[]).unwrap();
        assert!(check_tree_edges(&p, t.edges()).unwrap().is_valid());
    }

    #[test]
    fn oversized_models_fall_back_to_repair() {
        let p = diamond();
        let params = QuboParams {
            max_vars: 3,
            ..Default::default()
        };
        let out = solve_qubo_detailed(&p, &params).unwrap();
        assert!(!out.sampled && out.repaired);
        assert!(check_tree_edges(&p, out.tree.edges()).unwrap().is_valid());
    }
}
