use super::SolverError;
use crate::graph::{prune_tree, spanning_forest, tree_from_keys, EdgeId, PathCache, Problem, SteinerTree, UnionFind};

/// Largest number of non-terminals [`solve_exact`] will enumerate.
pub const EXACT_GUARD: usize = 20;

/// Metric-closure 2-approximation: MST of the terminal closure, expanded
/// into shortest paths, re-spanned and pruned.
pub fn solve_baseline(p: &Problem) -> Result<SteinerTree, SolverError> {
    Ok(tree_from_keys(&mut PathCache::new(p), &[])?)
}

/// Optimal Steiner tree by enumerating every subset of non-terminals.
pub fn solve_exact(p: &Problem) -> Result<SteinerTree, SolverError> {
    let steiner = p.steiner_nodes();
    if steiner.len() > EXACT_GUARD {
        return Err(SolverError::GuardExceeded {
            nonterminals: steiner.len(),
            limit: EXACT_GUARD,
        });
    }
    let n = p.node_count();
    let mut keep = vec![false; n];
    let mut best: Option<SteinerTree> = None;
    for mask in 0u32..(1u32 << steiner.len()) {
        keep.iter_mut().for_each(|k| *k = false);
        for &t in p.terminals() {
            keep[t] = true;
        }
        for (bit, &v) in steiner.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                keep[v] = true;
            }
        }
        let induced: Vec<EdgeId> = (0..p.edge_count())
            .filter(|&e| keep[p.edge(e).u] && keep[p.edge(e).v])
            .collect();
        let mut uf = UnionFind::new(n);
        let mut joined = 1;
        for &e in &induced {
            if uf.union(p.edge(e).u, p.edge(e).v) {
                joined += 1;
            }
        }
        if joined != keep.iter().filter(|&&k| k).count() {
            continue;
        }
        let tree = prune_tree(p, &spanning_forest(p, &induced))?;
        if best.as_ref().is_none_or(|b| tree.cost() < b.cost() - 1e-12) {
            best = Some(tree);
        }
    }
    best.ok_or(SolverError::Graph(crate::graph::GraphError::Disconnected))
}
