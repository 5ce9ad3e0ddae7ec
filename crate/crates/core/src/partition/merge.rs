use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::graph::{
    finalize_tree, path_edges, EdgeId, GraphError, NodeId, PathCache, Point, Problem, SteinerTree, UnionFind,
};

/// A partial solution in global ids: nodes it covers and the edges joining them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PartTree {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
}

impl PartTree {
    pub fn new(nodes: Vec<NodeId>, edges: Vec<EdgeId>) -> Self {
        Self { nodes, edges }
    }

    /// Nodes are the edge endpoints.
    pub fn from_edges(p: &Problem, edges: &[EdgeId]) -> Self {
        let nodes: BTreeSet<NodeId> = edges.iter().flat_map(|&e| [p.edge(e).u, p.edge(e).v]).collect();
        Self::new(nodes.into_iter().collect(), edges.to_vec())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MergeStrategy {
    #[default]
    Sph,
    #[serde(alias = "com")]
    CenterOfMass,
}

/// Manhattan preselection limits for [`merge_sph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SphParams {
    pub n_partitions: usize,
    pub n_nodes: usize,
}

impl Default for SphParams {
    fn default() -> Self {
        Self {
            n_partitions: 3,
            n_nodes: 10,
        }
    }
}

struct Pieces {
    edges: BTreeSet<EdgeId>,
    members: BTreeSet<NodeId>,
}

impl Pieces {
    fn new(p: &Problem, parts: &[PartTree]) -> Self {
        let mut edges = BTreeSet::new();
        let mut members: BTreeSet<NodeId> = p.terminals().iter().copied().collect();
        for part in parts {
            members.extend(part.nodes.iter().copied());
            for &e in &part.edges {
                edges.insert(e);
                members.insert(p.edge(e).u);
                members.insert(p.edge(e).v);
            }
        }
        let mut pieces = Self { edges, members };
        pieces.drop_terminal_free(p);
        pieces
    }

    /// Components of the member nodes, each ascending, ordered by smallest member.
    fn components(&self, p: &Problem) -> Vec<Vec<NodeId>> {
        let mut uf = UnionFind::new(p.node_count());
        for &e in &self.edges {
            uf.union(p.edge(e).u, p.edge(e).v);
        }
        let mut groups: Vec<(usize, Vec<NodeId>)> = Vec::new();
        for &v in &self.members {
            let r = uf.find(v);
            match groups.iter_mut().find(|(root, _)| *root == r) {
                Some((_, g)) => g.push(v),
                None => groups.push((r, vec![v])),
            }
        }
        groups.into_iter().map(|(_, g)| g).collect()
    }

    fn drop_terminal_free(&mut self, p: &Problem) {
        for comp in self.components(p) {
            if !comp.iter().any(|&v| p.is_terminal(v)) {
                for v in comp {
                    self.members.remove(&v);
                }
            }
        }
        let members = &self.members;
        self.edges.retain(|&e| members.contains(&p.edge(e).u));
    }

    fn add_path(&mut self, p: &Problem, path: &[NodeId]) {
        self.members.extend(path.iter().copied());
        self.edges.extend(path_edges(p, path));
    }

    fn finish(&self, p: &Problem) -> Result<SteinerTree, GraphError> {
        let edges: Vec<EdgeId> = self.edges.iter().copied().collect();
        finalize_tree(p, &edges)
    }
}

fn min_manhattan(p: &Problem, a: &[NodeId], b: &[NodeId]) -> f64 {
    let mut best = f64::INFINITY;
    for &u in a {
        let pu = p.position(u);
        for &v in b {
            best = best.min(pu.manhattan(&p.position(v)));
        }
    }
    best
}

/// Shortest-path merging with Manhattan preselection: the smallest component
/// is repeatedly joined to another along the cheapest true shortest path among
/// the `n_nodes` closest node pairs drawn from its `n_partitions` closest
/// neighbor components. The union is re-spanned and pruned at the end.
pub fn merge_sph(p: &Problem, parts: &[PartTree], params: &SphParams) -> Result<SteinerTree, GraphError> {
    let mut pieces = Pieces::new(p, parts);
    let mut cache = PathCache::new(p);
    loop {
        let comps = pieces.components(p);
        if comps.len() <= 1 {
            break;
        }
        let small = (0..comps.len())
            .min_by_key(|&i| (comps[i].len(), comps[i][0]))
            .expect("non-empty");
        let mut ranked: Vec<(f64, usize)> = (0..comps.len())
            .filter(|&j| j != small)
            .map(|j| (min_manhattan(p, &comps[small], &comps[j]), j))
            .collect();
        ranked.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        ranked.truncate(params.n_partitions.max(1));
        let mut pairs: Vec<(f64, NodeId, NodeId)> = Vec::new();
        for &(_, j) in &ranked {
            for &a in &comps[small] {
                let pa = p.position(a);
                for &b in &comps[j] {
                    pairs.push((pa.manhattan(&p.position(b)), a, b));
                }
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));
        pairs.truncate(params.n_nodes.max(1));
        let mut best: Option<(f64, NodeId, NodeId)> = None;
        for &(_, a, b) in &pairs {
            let d = cache.rooted(a).dist[b];
            if d.is_finite() && best.is_none_or(|(bd, _, _)| d < bd) {
                best = Some((d, a, b));
            }
        }
        let (_, a, b) = best.ok_or(GraphError::Disconnected)?;
        let path = cache.path(b, a).ok_or(GraphError::Unreachable { from: b, to: a })?;
        pieces.add_path(p, &path);
    }
    pieces.finish(p)
}

fn centroid(p: &Problem, nodes: &[NodeId]) -> Point {
    let n = nodes.len() as f64;
    let (sx, sy) = nodes.iter().fold((0.0, 0.0), |(sx, sy), &v| {
        let q = p.position(v);
        (sx + q.x, sy + q.y)
    });
    Point { x: sx / n, y: sy / n }
}

/// Center-of-mass merging: component pairs are joined in ascending order of
/// centroid distance (Kruskal over components), each along the shortest path
/// between the members nearest to the two centroids.
pub fn merge_center_of_mass(p: &Problem, parts: &[PartTree]) -> Result<SteinerTree, GraphError> {
    let mut pieces = Pieces::new(p, parts);
    let comps = pieces.components(p);
    if comps.len() <= 1 {
        return pieces.finish(p);
    }
    let mut owner = vec![usize::MAX; p.node_count()];
    for (i, comp) in comps.iter().enumerate() {
        for &v in comp {
            owner[v] = i;
        }
    }
    let centers: Vec<Point> = comps.iter().map(|c| centroid(p, c)).collect();
    let anchors: Vec<NodeId> = comps
        .iter()
        .zip(&centers)
        .map(|(comp, c)| {
            *comp
                .iter()
                .min_by(|&&a, &&b| p.position(a).distance(c).total_cmp(&p.position(b).distance(c)).then(a.cmp(&b)))
                .expect("non-empty component")
        })
        .collect();
    let mut pairs = Vec::new();
    for i in 0..comps.len() {
        for j in i + 1..comps.len() {
            pairs.push((centers[i].distance(&centers[j]), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    let mut joined = UnionFind::new(comps.len());
    let mut cache = PathCache::new(p);
    for (_, i, j) in pairs {
        if joined.find(i) == joined.find(j) {
            continue;
        }
        let path = cache
            .path(anchors[i], anchors[j])
            .ok_or(GraphError::Unreachable { from: anchors[i], to: anchors[j] })?;
        for &v in &path {
            if owner[v] != usize::MAX {
                joined.union(i, owner[v]);
            }
        }
        pieces.add_path(p, &path);
    }
    pieces.finish(p)
}
