use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::mst::{spanning_forest, UnionFind};
use super::paths::{path_edges, PathCache, ShortestPaths};
use super::{EdgeId, GraphError, NodeId, Problem};

/// A subgraph of a [`Problem`] that is a tree spanning all terminals.
///
/// Only constructible through checked paths ([`SteinerTree::from_edges`],
/// [`prune_tree`] and the repair helpers), so holding one means the
/// invariants held against the problem it was built for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteinerTree {
    edges: Vec<EdgeId>,
    nodes: Vec<NodeId>,
    cost: f64,
}

impl SteinerTree {
    pub fn from_edges(p: &Problem, edges: &[EdgeId]) -> Result<Self, GraphError> {
        let check = check_tree_edges(p, edges)?;
        if !check.is_valid() {
            return Err(GraphError::NotATree(check.violations));
        }
        Ok(Self::assemble(p, edges))
    }

    fn assemble(p: &Problem, edges: &[EdgeId]) -> Self {
        let mut edges = edges.to_vec();
        edges.sort_unstable();
        edges.dedup();
        let nodes = tree_nodes(p, &edges);
        let cost = tree_cost(p, &edges);
        Self { edges, nodes, cost }
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    /// Spanned nodes, ascending. A single-terminal tree has one node and no edges.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains_node(&self, n: NodeId) -> bool {
        self.nodes.binary_search(&n).is_ok()
    }

    /// Non-terminal nodes in the tree.
    pub fn steiner_nodes(&self, p: &Problem) -> Vec<NodeId> {
        self.nodes.iter().copied().filter(|&n| !p.is_terminal(n)).collect()
    }

    /// Endpoint pairs of the tree edges.
    pub fn edge_pairs(&self, p: &Problem) -> Vec<(NodeId, NodeId)> {
        self.edges.iter().map(|&e| (p.edge(e).u, p.edge(e).v)).collect()
    }
}

fn tree_nodes(p: &Problem, edges: &[EdgeId]) -> Vec<NodeId> {
    let mut set: BTreeSet<NodeId> = edges
        .iter()
        .flat_map(|&e| [p.edge(e).u, p.edge(e).v])
        .collect();
    if set.is_empty() {
        set.extend(p.terminals().iter().copied());
    }
    set.into_iter().collect()
}

/// Sum of edge costs.
pub fn tree_cost(p: &Problem, edges: &[EdgeId]) -> f64 {
    edges.iter().map(|&e| p.edge(e).cost).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreeViolation {
    DuplicateEdge { edge: EdgeId },
    TerminalUncovered { terminal: NodeId },
    Disconnected { components: usize },
    Cycle,
}

impl fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeViolation::DuplicateEdge { edge } => write!(f, "edge {edge} listed twice"),
            TreeViolation::TerminalUncovered { terminal } => {
                write!(f, "terminal {terminal} uncovered")
            }
            TreeViolation::Disconnected { components } => {
                write!(f, "disconnected: {components} components")
            }
            TreeViolation::Cycle => write!(f, "cycle"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TreeCheck {
    pub violations: Vec<TreeViolation>,
    pub cost: f64,
}

impl TreeCheck {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks a candidate given as endpoint pairs. Pairs that are not problem
/// edges are an input error.
pub fn is_steiner_tree(p: &Problem, candidate: &[(NodeId, NodeId)]) -> Result<TreeCheck, GraphError> {
    let n = p.node_count();
    let mut ids = Vec::with_capacity(candidate.len());
    for &(u, v) in candidate {
        if u >= n || v >= n {
            return Err(GraphError::UnknownNode { node: u.max(v), nodes: n });
        }
        ids.push(p.find_edge(u, v).ok_or(GraphError::UnknownEdge { u, v })?);
    }
    check_tree_edges(p, &ids)
}

/// Checks a candidate given as edge ids.
pub fn check_tree_edges(p: &Problem, edges: &[EdgeId]) -> Result<TreeCheck, GraphError> {
    if let Some(&bad) = edges.iter().find(|&&e| e >= p.edge_count()) {
        return Err(GraphError::UnknownEdgeId(bad));
    }
    let mut violations = Vec::new();
    let mut seen = BTreeSet::new();
    for &e in edges {
        if !seen.insert(e) {
            violations.push(TreeViolation::DuplicateEdge { edge: e });
        }
    }
    let unique: Vec<EdgeId> = seen.into_iter().collect();
    let nodes = tree_nodes(p, &unique);
    for &t in p.terminals() {
        if nodes.binary_search(&t).is_err() {
            violations.push(TreeViolation::TerminalUncovered { terminal: t });
        }
    }
    let mut uf = UnionFind::new(p.node_count());
    let mut cyclic = false;
    for &e in &unique {
        let edge = p.edge(e);
        if !uf.union(edge.u, edge.v) {
            cyclic = true;
        }
    }
    let roots: BTreeSet<usize> = nodes.iter().map(|&v| uf.find(v)).collect();
    if roots.len() > 1 {
        violations.push(TreeViolation::Disconnected { components: roots.len() });
    }
    if cyclic {
        violations.push(TreeViolation::Cycle);
    }
    Ok(TreeCheck {
        violations,
        cost: tree_cost(p, &unique),
    })
}

/// Removes non-terminal leaves until every leaf is a terminal.
pub fn prune_tree(p: &Problem, edges: &[EdgeId]) -> Result<SteinerTree, GraphError> {
    let check = check_tree_edges(p, edges)?;
    if !check.is_valid() {
        return Err(GraphError::NotATree(check.violations));
    }
    Ok(prune_unchecked(p, edges))
}

fn prune_unchecked(p: &Problem, edges: &[EdgeId]) -> SteinerTree {
    let n = p.node_count();
    let mut degree = vec![0usize; n];
    let mut incident: Vec<Vec<EdgeId>> = vec![Vec::new(); n];
    for &e in edges {
        let edge = p.edge(e);
        degree[edge.u] += 1;
        degree[edge.v] += 1;
        incident[edge.u].push(e);
        incident[edge.v].push(e);
    }
    let mut alive = vec![true; p.edge_count()];
    let mut stack: Vec<NodeId> = (0..n)
        .filter(|&v| degree[v] == 1 && !p.is_terminal(v))
        .collect();
    while let Some(v) = stack.pop() {
        if degree[v] != 1 {
            continue;
        }
        let e = *incident[v].iter().find(|&&e| alive[e]).expect("leaf has one live edge");
        alive[e] = false;
        degree[v] = 0;
        let w = p.edge(e).other(v);
        degree[w] -= 1;
        if degree[w] == 1 && !p.is_terminal(w) {
            stack.push(w);
        }
    }
    let kept: Vec<EdgeId> = edges.iter().copied().filter(|&e| alive[e]).collect();
    SteinerTree::assemble(p, &kept)
}

/// Grows the component holding the smallest terminal by repeatedly attaching
/// the nearest other terminal-bearing component along a shortest path, until
/// all terminals share one component. Returns the enlarged edge set.
pub fn connect_terminals(p: &Problem, edges: &[EdgeId]) -> Result<Vec<EdgeId>, GraphError> {
    let terminals = p.terminals();
    if terminals.is_empty() {
        return Err(GraphError::NoTerminals);
    }
    let n = p.node_count();
    let mut set: BTreeSet<EdgeId> = edges.iter().copied().collect();
    loop {
        let mut uf = UnionFind::new(n);
        for &e in &set {
            uf.union(p.edge(e).u, p.edge(e).v);
        }
        let root = uf.find(terminals[0]);
        if terminals.iter().all(|&t| uf.find(t) == root) {
            return Ok(set.into_iter().collect());
        }
        let sources: Vec<NodeId> = (0..n).filter(|&v| uf.find(v) == root).collect();
        let sp = ShortestPaths::from_sources(p, &sources, None);
        // Targets: every node of any other component containing a terminal.
        let target_roots: BTreeSet<usize> = terminals
            .iter()
            .map(|&t| uf.find(t))
            .filter(|&r| r != root)
            .collect();
        let target = (0..n)
            .filter(|&v| target_roots.contains(&uf.find(v)))
            .filter(|&v| sp.reachable(v))
            .min_by(|&a, &b| sp.dist[a].total_cmp(&sp.dist[b]).then(a.cmp(&b)))
            .ok_or(GraphError::Disconnected)?;
        let path = sp.path_from(p, target).expect("target reachable");
        set.extend(path_edges(p, &path));
    }
}

/// Minimum spanning tree of the terminal-bearing component of `edges`,
/// pruned. Fails if the terminals are not all in one component.
pub fn finalize_tree(p: &Problem, edges: &[EdgeId]) -> Result<SteinerTree, GraphError> {
    let terminals = p.terminals();
    if terminals.is_empty() {
        return Err(GraphError::NoTerminals);
    }
    let mut uf = UnionFind::new(p.node_count());
    for &e in edges {
        uf.union(p.edge(e).u, p.edge(e).v);
    }
    let root = uf.find(terminals[0]);
    if terminals.iter().any(|&t| uf.find(t) != root) {
        return Err(GraphError::Disconnected);
    }
    let component: Vec<EdgeId> = edges
        .iter()
        .copied()
        .filter(|&e| uf.find(p.edge(e).u) == root)
        .collect();
    let forest = spanning_forest(p, &component);
    Ok(prune_unchecked(p, &forest))
}

/// `connect_terminals` followed by `finalize_tree`: turns any edge set into a
/// valid Steiner tree of a connected problem.
pub fn repair_tree(p: &Problem, edges: &[EdgeId]) -> Result<SteinerTree, GraphError> {
    let connected = connect_terminals(p, edges)?;
    finalize_tree(p, &connected)
}

/// Steiner tree over the key nodes `terminals ∪ extra`: minimum spanning tree
/// of their metric closure, expanded into shortest paths, re-spanned and
/// pruned. With `extra` empty this is the classic 2-approximation.
pub fn tree_from_keys(cache: &mut PathCache<'_>, extra: &[NodeId]) -> Result<SteinerTree, GraphError> {
    let p = cache.problem();
    let mut keys: Vec<NodeId> = p.terminals().to_vec();
    keys.extend_from_slice(extra);
    keys.sort_unstable();
    keys.dedup();
    if keys.is_empty() {
        return Err(GraphError::NoTerminals);
    }
    if keys.len() == 1 {
        return finalize_tree(p, &[]);
    }
    let mut closure_edges = Vec::with_capacity(keys.len() * (keys.len() - 1) / 2);
    for (i, &a) in keys.iter().enumerate() {
        for (j, &b) in keys.iter().enumerate().skip(i + 1) {
            let d = cache.distance(a, b);
            if !d.is_finite() {
                return Err(GraphError::Unreachable { from: a, to: b });
            }
            closure_edges.push((i, j, d));
        }
    }
    let chosen = super::mst::minimum_spanning_tree(keys.len(), &closure_edges)?;
    let mut expanded = BTreeSet::new();
    for idx in chosen {
        let (i, j, _) = closure_edges[idx];
        let path = cache
            .path(keys[i], keys[j])
            .ok_or(GraphError::Unreachable { from: keys[i], to: keys[j] })?;
        expanded.extend(path_edges(p, &path));
    }
    let expanded: Vec<EdgeId> = expanded.into_iter().collect();
    finalize_tree(p, &expanded)
}
