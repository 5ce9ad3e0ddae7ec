use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use super::{EdgeId, GraphError, NodeId, Problem};

const NONE: usize = usize::MAX;

fn ties(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

#[derive(Clone, Copy)]
struct Entry {
    dist: f64,
    origin: usize,
    hops: u32,
    node: NodeId,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // Reversed so BinaryHeap pops the smallest key.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then(other.origin.cmp(&self.origin))
            .then(other.hops.cmp(&self.hops))
            .then(other.node.cmp(&self.node))
    }
}

/// Single- or multi-source shortest path labels.
///
/// Labels are ordered by `(distance, source rank, hop count)`; `path_from`
/// walks back towards the sources choosing the smallest neighbor id that
/// continues a shortest, hop-minimal path. The resulting node sequences are
/// deterministic and independent of heap internals.
#[derive(Debug, Clone)]
pub struct ShortestPaths {
    pub dist: Vec<f64>,
    pub hops: Vec<u32>,
    /// Index into the `sources` slice of the source that labelled each node.
    pub origin: Vec<usize>,
}

impl ShortestPaths {
    pub fn from_source(p: &Problem, source: NodeId) -> Self {
        Self::from_sources(p, &[source], None)
    }

    /// Dijkstra from every node in `sources` simultaneously. Nodes flagged in
    /// `blocked` are never entered (a blocked source is still a source).
    pub fn from_sources(p: &Problem, sources: &[NodeId], blocked: Option<&[bool]>) -> Self {
        let n = p.node_count();
        let mut dist = vec![f64::INFINITY; n];
        let mut hops = vec![u32::MAX; n];
        let mut origin = vec![NONE; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        for (rank, &s) in sources.iter().enumerate() {
            if origin[s] == NONE {
                dist[s] = 0.0;
                hops[s] = 0;
                origin[s] = rank;
                heap.push(Entry {
                    dist: 0.0,
                    origin: rank,
                    hops: 0,
                    node: s,
                });
            }
        }
        while let Some(Entry {
            dist: d,
            origin: o,
            hops: h,
            node: u,
        }) = heap.pop()
        {
            if done[u] {
                continue;
            }
            done[u] = true;
            for &(w, e) in p.neighbors(u) {
                if done[w] || blocked.is_some_and(|b| b[w]) {
                    continue;
                }
                let nd = d + p.edge(e).cost;
                let better = match nd.total_cmp(&dist[w]) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    Ordering::Equal => (o, h + 1) < (origin[w], hops[w]),
                };
                if better {
                    dist[w] = nd;
                    hops[w] = h + 1;
                    origin[w] = o;
                    heap.push(Entry {
                        dist: nd,
                        origin: o,
                        hops: h + 1,
                        node: w,
                    });
                }
            }
        }
        Self { dist, hops, origin }
    }

    pub fn reachable(&self, u: NodeId) -> bool {
        self.dist[u].is_finite()
    }

    /// Node sequence from `u` to its labelling source (inclusive both ends).
    pub fn path_from(&self, p: &Problem, u: NodeId) -> Option<Vec<NodeId>> {
        if !self.reachable(u) {
            return None;
        }
        let mut path = vec![u];
        let mut cur = u;
        while self.hops[cur] > 0 {
            let next = p.neighbors(cur).iter().find_map(|&(w, e)| {
                let usable = self.hops[w] != u32::MAX
                    && self.hops[w] + 1 == self.hops[cur]
                    && ties(self.dist[w] + p.edge(e).cost, self.dist[cur]);
                usable.then_some(w)
            })?;
            path.push(next);
            cur = next;
        }
        Some(path)
    }

    /// Edge ids along `path_from(u)`.
    pub fn edges_from(&self, p: &Problem, u: NodeId) -> Option<Vec<EdgeId>> {
        let path = self.path_from(p, u)?;
        Some(path_edges(p, &path))
    }
}

/// Edge ids joining consecutive nodes of a path.
pub fn path_edges(p: &Problem, path: &[NodeId]) -> Vec<EdgeId> {
    path.windows(2)
        .map(|w| p.find_edge(w[0], w[1]).expect("path follows graph edges"))
        .collect()
}

/// Shortest `u`-`v` path. Ties go to the fewest hops, then to the
/// lexicographically smallest node sequence starting at `u`.
pub fn shortest_path(p: &Problem, u: NodeId, v: NodeId) -> Result<(Vec<NodeId>, f64), GraphError> {
    let n = p.node_count();
    for x in [u, v] {
        if x >= n {
            return Err(GraphError::UnknownNode { node: x, nodes: n });
        }
    }
    let sp = ShortestPaths::from_source(p, v);
    match sp.path_from(p, u) {
        Some(path) => Ok((path, sp.dist[u])),
        None => Err(GraphError::Unreachable { from: u, to: v }),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosureEdge {
    pub a: NodeId,
    pub b: NodeId,
    pub weight: f64,
    /// Realizing path from `a` to `b`.
    pub path: Vec<NodeId>,
}

/// Complete graph over a node subset weighted by shortest-path distance.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricClosure {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<ClosureEdge>,
}

impl MetricClosure {
    pub fn weight(&self, a: NodeId, b: NodeId) -> Option<f64> {
        self.edges
            .iter()
            .find(|e| (e.a == a && e.b == b) || (e.a == b && e.b == a))
            .map(|e| e.weight)
    }
}

/// Metric closure of `nodes` (deduplicated and sorted); pairs are emitted
/// with `a < b` in lexicographic order.
pub fn metric_closure(p: &Problem, nodes: &[NodeId]) -> Result<MetricClosure, GraphError> {
    let mut cache = PathCache::new(p);
    cache.closure(nodes)
}

/// Lazily computed single-source shortest path labels, keyed by root.
pub struct PathCache<'a> {
    problem: &'a Problem,
    trees: HashMap<NodeId, ShortestPaths>,
}

impl<'a> PathCache<'a> {
    pub fn new(problem: &'a Problem) -> Self {
        Self {
            problem,
            trees: HashMap::new(),
        }
    }

    pub fn problem(&self) -> &'a Problem {
        self.problem
    }

    pub fn rooted(&mut self, root: NodeId) -> &ShortestPaths {
        let p = self.problem;
        self.trees
            .entry(root)
            .or_insert_with(|| ShortestPaths::from_source(p, root))
    }

    pub fn distance(&mut self, a: NodeId, b: NodeId) -> f64 {
        // Always label from the larger id so both orders share one tree.
        let (root, from) = if a < b { (b, a) } else { (a, b) };
        self.rooted(root).dist[from]
    }

    /// Shortest path `a` -> `b` with the same tie rules as [`shortest_path`].
    pub fn path(&mut self, a: NodeId, b: NodeId) -> Option<Vec<NodeId>> {
        let p = self.problem;
        self.rooted(b).path_from(p, a)
    }

    pub fn closure(&mut self, nodes: &[NodeId]) -> Result<MetricClosure, GraphError> {
        let n = self.problem.node_count();
        let mut keys = nodes.to_vec();
        keys.sort_unstable();
        keys.dedup();
        if let Some(&bad) = keys.iter().find(|&&k| k >= n) {
            return Err(GraphError::UnknownNode { node: bad, nodes: n });
        }
        let mut edges = Vec::new();
        for (i, &a) in keys.iter().enumerate() {
            for &b in &keys[i + 1..] {
                let path = self
                    .path(a, b)
                    .ok_or(GraphError::Unreachable { from: a, to: b })?;
                let weight = self.rooted(b).dist[a];
                edges.push(ClosureEdge { a, b, weight, path });
            }
        }
        Ok(MetricClosure { nodes: keys, edges })
    }
}
