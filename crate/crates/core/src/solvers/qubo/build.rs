use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{Qubo, QuboError, VarTag};
use crate::graph::{NodeId, Problem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuboBuildParams {
    /// Deepest admissible tree level; `None` picks [`default_max_depth`].
    pub max_depth: Option<usize>,
    /// Constraint weight A; `None` uses `2·B·Σc + 1`.
    pub penalty_a: Option<f64>,
    /// Cost weight B.
    pub cost_b: f64,
}

impl Default for QuboBuildParams {
    fn default() -> Self {
        Self {
            max_depth: None,
            penalty_a: None,
            cost_b: 1.0,
        }
    }
}

fn bfs_hops(p: &Problem, sources: &[NodeId]) -> Vec<usize> {
    let mut hops = vec![usize::MAX; p.node_count()];
    let mut queue = VecDeque::new();
    for &s in sources {
        hops[s] = 0;
        queue.push_back(s);
    }
    while let Some(u) = queue.pop_front() {
        for &(w, _) in p.neighbors(u) {
            if hops[w] == usize::MAX {
                hops[w] = hops[u] + 1;
                queue.push_back(w);
            }
        }
    }
    hops
}

/// `min(|V| − 1, 2·ecc)` where `ecc` is a double-sweep hop-diameter
/// estimate started from the first terminal; never below 1.
pub fn default_max_depth(p: &Problem) -> usize {
    let Some(&start) = p.terminals().first() else {
        return 1;
    };
    let far = |hops: &[usize]| {
        hops.iter()
            .enumerate()
            .filter(|(_, &h)| h != usize::MAX)
            .max_by_key(|&(v, &h)| (h, std::cmp::Reverse(v)))
            .map(|(v, &h)| (v, h))
            .unwrap_or((start, 0))
    };
    let (a, _) = far(&bfs_hops(p, &[start]));
    let (_, ecc) = far(&bfs_hops(p, &[a]));
    (2 * ecc).min(p.node_count().saturating_sub(1)).max(1)
}

/// Builds the depth-indexed QUBO. A valid Steiner tree rooted at a terminal
/// with every node at depth at most `max_depth` has energy exactly
/// `B · cost`; every constraint violation adds at least `A`.
///
/// Slots are pruned by hop distance: a node can only sit at depth `d` if
/// some terminal other than itself lies within `d` hops.
pub fn build_stp_qubo(p: &Problem, params: &QuboBuildParams) -> Result<Qubo, QuboError> {
    if p.terminals().is_empty() {
        return Err(QuboError::NoTerminals);
    }
    let depth = match params.max_depth {
        Some(0) => return Err(QuboError::ZeroDepth),
        Some(d) => d,
        None => default_max_depth(p),
    };
    let b = params.cost_b;
    let total: f64 = p.edges().iter().map(|e| e.cost).sum();
    let max_c = p.edges().iter().map(|e| e.cost).fold(0.0, f64::max);
    let a = params.penalty_a.unwrap_or(2.0 * b * total + 1.0);
    if a <= b * max_c {
        return Err(QuboError::WeakPenalty {
            penalty_a: a,
            bound: b * max_c,
        });
    }

    let n = p.node_count();
    let terminals = p.terminals();
    let hop_any = bfs_hops(p, terminals);
    // For terminals: hops to the nearest other terminal.
    let mut lower = hop_any.clone();
    for &t in terminals {
        let others: Vec<NodeId> = terminals.iter().copied().filter(|&s| s != t).collect();
        lower[t] = if others.is_empty() { usize::MAX } else { bfs_hops(p, &others)[t] };
    }

    let mut tags = Vec::new();
    // slot[v][d]: variable of node v at depth d (d = 0 is the root slot).
    let mut slot = vec![vec![None; depth + 1]; n];
    let mut absent = vec![None; n];
    for v in 0..n {
        if p.is_terminal(v) {
            slot[v][0] = Some(tags.len());
            tags.push(VarTag::Root { node: v });
        } else {
            absent[v] = Some(tags.len());
            tags.push(VarTag::Absent { node: v });
        }
        for d in lower[v].max(1)..=depth {
            slot[v][d] = Some(tags.len());
            tags.push(VarTag::NodeDepth { node: v, depth: d });
        }
    }
    // Per edge: oriented depth variables, then the usage variable.
    let mut incoming: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); depth + 1]; n];
    let mut edge_terms = Vec::new();
    for (e, edge) in p.edges().iter().enumerate() {
        let mut ys = Vec::new();
        for (from, to) in [(edge.u, edge.v), (edge.v, edge.u)] {
            for d in 1..=depth {
                if let (Some(xu), Some(xv)) = (slot[from][d - 1], slot[to][d]) {
                    let y = tags.len();
                    tags.push(VarTag::EdgeDepth { edge: e, from, to, depth: d });
                    incoming[to][d].push(y);
                    ys.push((y, xu, xv));
                }
            }
        }
        if !ys.is_empty() {
            let z = tags.len();
            tags.push(VarTag::EdgeUsed { edge: e });
            edge_terms.push((e, z, ys));
        }
    }

    let mut q = Qubo::new(tags.len());
    q.var_map = tags;
    q.max_depth = depth;
    q.penalty_a = a;
    q.cost_b = b;

    let roots: Vec<(usize, f64)> = terminals.iter().filter_map(|&t| slot[t][0]).map(|i| (i, 1.0)).collect();
    q.add_square(&roots, -1.0, a);
    for v in 0..n {
        let slots: Vec<(usize, f64)> = absent[v]
            .into_iter()
            .chain(slot[v].iter().flatten().copied())
            .map(|i| (i, 1.0))
            .collect();
        q.add_square(&slots, -1.0, a);
        for d in 1..=depth {
            if let Some(x) = slot[v][d] {
                let mut terms = vec![(x, 1.0)];
                terms.extend(incoming[v][d].iter().map(|&y| (y, -1.0)));
                q.add_square(&terms, 0.0, a);
            }
        }
    }
    for (e, z, ys) in &edge_terms {
        for &(y, xu, xv) in ys {
            q.add_linear(y, 2.0 * a);
            q.add_quadratic(y, xu, -a);
            q.add_quadratic(y, xv, -a);
        }
        let mut terms = vec![(*z, 1.0)];
        terms.extend(ys.iter().map(|&(y, _, _)| (y, -1.0)));
        q.add_square(&terms, 0.0, a);
        q.add_linear(*z, b * p.edge(*e).cost);
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, NodeRecord};

    fn path3() -> Problem {
        let nodes = vec![
            NodeRecord::terminal(0.0, 0.0),
            NodeRecord::waypoint(1.0, 0.0, 1.0),
            NodeRecord::terminal(2.0, 0.0),
        ];
        Problem::new(nodes, vec![Edge::new(0, 1, 1.5), Edge::new(1, 2, 2.0)]).unwrap()
    }

    fn assignment(q: &Qubo, on: &[VarTag]) -> Vec<bool> {
        q.var_map.iter().map(|t| on.contains(t)).collect()
    }

    #[test]
    fn pruned_variable_layout_of_a_path() {
        let q = build_stp_qubo(&path3(), &QuboBuildParams { max_depth: Some(2), ..Default::default() }).unwrap();
        // Terminals: root + depth 2; middle: absent + depths 1, 2;
        // each edge has one orientation per direction plus its usage bit.
        assert_eq!(q.n_vars(), 2 + 3 + 2 + 3 + 3);
    }

    #[test]
    fn valid_tree_energy_equals_cost() {
        let p = path3();
        let q = build_stp_qubo(&p, &QuboBuildParams { max_depth: Some(2), ..Default::default() }).unwrap();
        let x = assignment(
            &q,
            &[
                VarTag::Root { node: 0 },
                VarTag::NodeDepth { node: 1, depth: 1 },
                VarTag::NodeDepth { node: 2, depth: 2 },
                VarTag::EdgeDepth { edge: 0, from: 0, to: 1, depth: 1 },
                VarTag::EdgeDepth { edge: 1, from: 1, to: 2, depth: 2 },
                VarTag::EdgeUsed { edge: 0 },
                VarTag::EdgeUsed { edge: 1 },
            ],
        );
        assert!((q.energy(&x) - 3.5).abs() < 1e-9);
    }

    #[test]
    fn violations_cost_at_least_the_penalty() {
        let p = path3();
        let q = build_stp_qubo(&p, &QuboBuildParams { max_depth: Some(2), ..Default::default() }).unwrap();
        // Two roots and nothing else.
        let x = assignment(&q, &[VarTag::Root { node: 0 }, VarTag::Root { node: 2 }, VarTag::Absent { node: 1 }]);
        assert!(q.energy(&x) >= q.penalty_a - 1e-9);
        assert!(q.energy(&vec![false; q.n_vars()]) >= q.penalty_a - 1e-9);
    }

    #[test]
    fn penalty_must_dominate_costs() {
        let params = QuboBuildParams {
            penalty_a: Some(2.0),
            ..Default::default()
        };
        assert!(matches!(build_stp_qubo(&path3(), &params), Err(QuboError::WeakPenalty { .. })));
        let zero = QuboBuildParams {
            max_depth: Some(0),
            ..Default::default()
        };
        assert_eq!(build_stp_qubo(&path3(), &zero), Err(QuboError::ZeroDepth));
    }

    #[test]
    fn default_depth_is_bounded_by_node_count() {
        assert_eq!(default_max_depth(&path3()), 2);
    }
}
