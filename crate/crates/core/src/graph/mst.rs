use super::{EdgeId, GraphError, NodeId, Problem};

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] || (self.size[ra] == self.size[rb] && rb < ra) {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

fn kruskal_order(edges: &[(NodeId, NodeId, f64)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (&edges[i], &edges[j]);
        a.2.total_cmp(&b.2)
            .then((a.0.min(a.1), a.0.max(a.1)).cmp(&(b.0.min(b.1), b.0.max(b.1))))
            .then(i.cmp(&j))
    });
    order
}

/// Minimum spanning tree of the graph on nodes `0..node_count` given as an
/// edge list. Returns indices into `edges`, ascending. Ties are broken by the
/// `(cost, min endpoint, max endpoint)` ordering.
pub fn minimum_spanning_tree(
    node_count: usize,
    edges: &[(NodeId, NodeId, f64)],
) -> Result<Vec<usize>, GraphError> {
    if let Some(&(u, v, _)) = edges.iter().find(|e| e.0 >= node_count || e.1 >= node_count) {
        return Err(GraphError::UnknownNode {
            node: u.max(v),
            nodes: node_count,
        });
    }
    let mut uf = UnionFind::new(node_count);
    let mut chosen = Vec::with_capacity(node_count.saturating_sub(1));
    for i in kruskal_order(edges) {
        let (u, v, _) = edges[i];
        if uf.union(u, v) {
            chosen.push(i);
        }
    }
    if node_count > 0 && chosen.len() + 1 != node_count {
        return Err(GraphError::Disconnected);
    }
    chosen.sort_unstable();
    Ok(chosen)
}

/// Minimum spanning forest over a subset of problem edges (Kruskal with the
/// same tie order as [`minimum_spanning_tree`]). Returns ascending edge ids.
pub fn spanning_forest(p: &Problem, edges: &[EdgeId]) -> Vec<EdgeId> {
    let list: Vec<(NodeId, NodeId, f64)> = edges
        .iter()
        .map(|&e| {
            let e = p.edge(e);
            (e.u, e.v, e.cost)
        })
        .collect();
    let mut uf = UnionFind::new(p.node_count());
    let mut chosen: Vec<EdgeId> = kruskal_order(&list)
        .into_iter()
        .filter(|&i| uf.union(list[i].0, list[i].1))
        .map(|i| edges[i])
        .collect();
    chosen.sort_unstable();
    chosen.dedup();
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_input_returns_itself() {
        let edges = vec![(0, 1, 3.0), (1, 2, 1.0), (1, 3, 2.0)];
        assert_eq!(minimum_spanning_tree(4, &edges).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn four_cycle_drops_heavy_edge() {
        let edges = vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 10.0), (3, 0, 1.0)];
        assert_eq!(minimum_spanning_tree(4, &edges).unwrap(), vec![0, 1, 3]);
    }

    #[test]
    fn ties_prefer_smaller_endpoints() {
        let edges = vec![(2, 0, 1.0), (0, 1, 1.0), (1, 2, 1.0)];
        assert_eq!(minimum_spanning_tree(3, &edges).unwrap(), vec![0, 1]);
    }

    #[test]
    fn disconnected_input_is_an_error() {
        let edges = vec![(0, 1, 1.0)];
        assert!(matches!(minimum_spanning_tree(3, &edges), Err(GraphError::Disconnected)));
    }
}
