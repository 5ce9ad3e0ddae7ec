use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::GraphError;

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn manhattan(&self, other: &Point) -> f64 {
        (self.x - other.x).abs() + (self.y - other.y).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    /// A house connection; must be spanned.
    Terminal,
    /// An access node. Spanned like any terminal; the distinction is metadata.
    Distributor,
    /// An optional Steiner node.
    Waypoint,
}

impl NodeKind {
    pub fn is_terminal(self) -> bool {
        !matches!(self, NodeKind::Waypoint)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub position: Point,
    /// Ditch cost density at this node.
    pub weight: f64,
    pub kind: NodeKind,
}

impl NodeRecord {
    pub fn new(x: f64, y: f64, weight: f64, kind: NodeKind) -> Self {
        Self {
            position: Point::new(x, y),
            weight,
            kind,
        }
    }

    pub fn waypoint(x: f64, y: f64, weight: f64) -> Self {
        Self::new(x, y, weight, NodeKind::Waypoint)
    }

    pub fn terminal(x: f64, y: f64) -> Self {
        Self::new(x, y, 0.0, NodeKind::Terminal)
    }
}

/// An undirected edge, stored with `u <= v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub cost: f64,
}

impl Edge {
    pub fn new(a: NodeId, b: NodeId, cost: f64) -> Self {
        Self {
            u: a.min(b),
            v: a.max(b),
            cost,
        }
    }

    pub fn other(&self, n: NodeId) -> NodeId {
        if n == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProblemMeta {
    pub name: String,
    pub source: String,
}

/// A Steiner tree problem instance: weighted undirected graph, node positions
/// and the terminal set implied by the node kinds.
///
/// `from_parts` accepts structurally indexable input (it may still violate the
/// problem invariants so that [`validate_problem`] can report them); `new`
/// additionally rejects anything `validate_problem` flags.
#[derive(Debug, Clone)]
pub struct Problem {
    nodes: Vec<NodeRecord>,
    edges: Vec<Edge>,
    terminals: Vec<NodeId>,
    distributors: Vec<NodeId>,
    is_terminal: Vec<bool>,
    adjacency: Vec<Vec<(NodeId, EdgeId)>>,
    lookup: HashMap<(NodeId, NodeId), EdgeId>,
    meta: ProblemMeta,
}

impl PartialEq for Problem {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges && self.meta == other.meta
    }
}

impl Problem {
    pub fn from_parts(nodes: Vec<NodeRecord>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let n = nodes.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut lookup = HashMap::with_capacity(edges.len());
        let mut canonical = Vec::with_capacity(edges.len());
        for (id, e) in edges.into_iter().enumerate() {
            if e.u >= n || e.v >= n {
                return Err(GraphError::UnknownNode {
                    node: e.u.max(e.v),
                    nodes: n,
                });
            }
            let e = Edge::new(e.u, e.v, e.cost);
            lookup.entry((e.u, e.v)).or_insert(id);
            adjacency[e.u].push((e.v, id));
            if e.u != e.v {
                adjacency[e.v].push((e.u, id));
            }
            canonical.push(e);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let is_terminal: Vec<bool> = nodes.iter().map(|r| r.kind.is_terminal()).collect();
        let terminals = (0..n).filter(|&i| is_terminal[i]).collect();
        let distributors = (0..n)
            .filter(|&i| nodes[i].kind == NodeKind::Distributor)
            .collect();
        Ok(Self {
            nodes,
            edges: canonical,
            terminals,
            distributors,
            is_terminal,
            adjacency,
            lookup,
            meta: ProblemMeta::default(),
        })
    }

    /// Builds a problem and rejects it unless every invariant holds.
    pub fn new(nodes: Vec<NodeRecord>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let p = Self::from_parts(nodes, edges)?;
        let report = validate_problem(&p);
        if report.is_valid() {
            Ok(p)
        } else {
            Err(GraphError::Invalid(report))
        }
    }

    pub fn with_meta(mut self, meta: ProblemMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn meta(&self) -> &ProblemMeta {
        &self.meta
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &NodeRecord {
        &self.nodes[id]
    }

    pub fn position(&self, id: NodeId) -> Point {
        self.nodes[id].position
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn terminals(&self) -> &[NodeId] {
        &self.terminals
    }

    pub fn distributors(&self) -> &[NodeId] {
        &self.distributors
    }

    pub fn is_terminal(&self, id: NodeId) -> bool {
        self.is_terminal[id]
    }

    /// Non-terminal (Steiner) node ids in ascending order.
    pub fn steiner_nodes(&self) -> Vec<NodeId> {
        (0..self.nodes.len()).filter(|&i| !self.is_terminal[i]).collect()
    }

    /// Neighbors of `id` as `(neighbor, edge)` pairs sorted by neighbor.
    pub fn neighbors(&self, id: NodeId) -> &[(NodeId, EdgeId)] {
        &self.adjacency[id]
    }

    pub fn degree(&self, id: NodeId) -> usize {
        self.adjacency[id].len()
    }

    pub fn find_edge(&self, a: NodeId, b: NodeId) -> Option<EdgeId> {
        self.lookup.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn total_cost(&self) -> f64 {
        self.edges.iter().map(|e| e.cost).sum()
    }

    /// Connected components as a per-node label (labels ordered by smallest member).
    pub fn component_labels(&self) -> (Vec<usize>, usize) {
        let n = self.nodes.len();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &(w, _) in &self.adjacency[u] {
                    if label[w] == usize::MAX {
                        label[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    /// Induced subgraph over `keep` (ascending), reindexed densely. Returns the
    /// subproblem and the local -> original node map.
    pub fn induced(&self, keep: &[NodeId]) -> (Problem, Vec<NodeId>) {
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut local = vec![usize::MAX; self.nodes.len()];
        for (i, &g) in sorted.iter().enumerate() {
            local[g] = i;
        }
        let nodes = sorted.iter().map(|&g| self.nodes[g]).collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| local[e.u] != usize::MAX && local[e.v] != usize::MAX)
            .map(|e| Edge::new(local[e.u], local[e.v], e.cost))
            .collect();
        let sub = Problem::from_parts(nodes, edges)
            .expect("induced edges reference kept nodes")
            .with_meta(self.meta.clone());
        (sub, sorted)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    EmptyGraph,
    NoTerminals,
    NegativeWeight { node: NodeId, weight: f64 },
    NegativeCost { edge: EdgeId, u: NodeId, v: NodeId, cost: f64 },
    SelfLoop { edge: EdgeId, node: NodeId },
    DuplicateEdge { edge: EdgeId, first: EdgeId, u: NodeId, v: NodeId },
    Disconnected { components: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyGraph => write!(f, "graph has no nodes"),
            Violation::NoTerminals => write!(f, "no terminals"),
            Violation::NegativeWeight { node, weight } => {
                write!(f, "node {node} has invalid weight {weight}")
            }
            Violation::NegativeCost { edge, u, v, cost } => {
                write!(f, "edge {edge} ({u}, {v}) has invalid cost {cost}")
            }
            Violation::SelfLoop { edge, node } => write!(f, "edge {edge} is a self-loop on {node}"),
            Violation::DuplicateEdge { edge, first, u, v } => {
                write!(f, "edge {edge} ({u}, {v}) duplicates edge {first}")
            }
            Violation::Disconnected { components } => {
                write!(f, "disconnected: {components} components")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Reports every violated problem invariant; an empty report means valid.
pub fn validate_problem(p: &Problem) -> ValidationReport {
    let mut violations = Vec::new();
    if p.nodes.is_empty() {
        violations.push(Violation::EmptyGraph);
        return ValidationReport { violations };
    }
    if p.terminals.is_empty() {
        violations.push(Violation::NoTerminals);
    }
    for (i, n) in p.nodes.iter().enumerate() {
        if !(n.weight >= 0.0) || !n.weight.is_finite() {
            violations.push(Violation::NegativeWeight {
                node: i,
                weight: n.weight,
            });
        }
    }
    let mut seen: HashMap<(NodeId, NodeId), EdgeId> = HashMap::new();
    for (id, e) in p.edges.iter().enumerate() {
        if !(e.cost >= 0.0) || !e.cost.is_finite() {
            violations.push(Violation::NegativeCost {
                edge: id,
                u: e.u,
                v: e.v,
                cost: e.cost,
            });
        }
        if e.u == e.v {
            violations.push(Violation::SelfLoop { edge: id, node: e.u });
        }
        match seen.get(&(e.u, e.v)) {
            Some(&first) => violations.push(Violation::DuplicateEdge {
                edge: id,
                first,
                u: e.u,
                v: e.v,
            }),
            None => {
                seen.insert((e.u, e.v), id);
            }
        }
    }
    let (_, components) = p.component_labels();
    if components > 1 {
        violations.push(Violation::Disconnected { components });
    }
    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle(costs: [f64; 3]) -> Result<Problem, GraphError> {
        Problem::from_parts(
            vec![
                NodeRecord::terminal(0.0, 0.0),
                NodeRecord::waypoint(1.0, 0.0, 1.0),
                NodeRecord::terminal(0.0, 1.0),
            ],
            vec![
                Edge::new(0, 1, costs[0]),
                Edge::new(1, 2, costs[1]),
                Edge::new(0, 2, costs[2]),
            ],
        )
    }

    #[test]
    fn valid_triangle_has_empty_report() {
        let p = triangle([1.0, 1.0, 1.0]).unwrap();
        assert!(validate_problem(&p).is_valid());
        assert_eq!(p.terminals(), &[0, 2]);
    }

    #[test]
    fn negative_cost_names_the_edge() {
        let p = triangle([1.0, -1.0, 1.0]).unwrap();
        let report = validate_problem(&p);
        assert_eq!(
            report.violations,
            vec![Violation::NegativeCost {
                edge: 1,
                u: 1,
                v: 2,
                cost: -1.0
            }]
        );
        assert!(Problem::new(p.nodes().to_vec(), p.edges().to_vec()).is_err());
    }

    #[test]
    fn two_components_reported_disconnected() {
        let p = Problem::from_parts(
            vec![
                NodeRecord::terminal(0.0, 0.0),
                NodeRecord::waypoint(1.0, 0.0, 1.0),
                NodeRecord::terminal(5.0, 0.0),
                NodeRecord::waypoint(6.0, 0.0, 1.0),
            ],
            vec![Edge::new(0, 1, 1.0), Edge::new(2, 3, 1.0)],
        )
        .unwrap();
        let report = validate_problem(&p);
        assert_eq!(report.violations, vec![Violation::Disconnected { components: 2 }]);
    }

    #[test]
    fn self_loops_duplicates_and_missing_terminals() {
        let p = Problem::from_parts(
            vec![NodeRecord::waypoint(0.0, 0.0, 1.0), NodeRecord::waypoint(1.0, 0.0, 1.0)],
            vec![Edge::new(0, 1, 1.0), Edge::new(1, 0, 2.0), Edge::new(1, 1, 0.0)],
        )
        .unwrap();
        let report = validate_problem(&p);
        assert!(report.violations.contains(&Violation::NoTerminals));
        assert!(report
            .violations
            .contains(&Violation::DuplicateEdge { edge: 1, first: 0, u: 0, v: 1 }));
        assert!(report.violations.contains(&Violation::SelfLoop { edge: 2, node: 1 }));
    }

    #[test]
    fn edges_are_canonical_and_unknown_nodes_rejected() {
        let p = triangle([1.0, 2.0, 3.0]).unwrap();
        assert_eq!(p.edge(1).u, 1);
        assert_eq!(p.find_edge(2, 0), Some(2));
        let bad = Problem::from_parts(vec![NodeRecord::terminal(0.0, 0.0)], vec![Edge::new(0, 3, 1.0)]);
        assert!(matches!(bad, Err(GraphError::UnknownNode { node: 3, .. })));
    }
}
