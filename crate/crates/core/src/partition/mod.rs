//! Graph partitioners (greedy modularity, spectral clustering, Voronoi
//! regions) and the mergers that join per-cluster Steiner trees.

mod merge;
mod modularity;
mod spectral;
mod voronoi;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeId, NodeId, Problem, SteinerTree, UnionFind};

pub use merge::{merge_center_of_mass, merge_sph, MergeStrategy, PartTree, SphParams};
pub use modularity::{greedy_modularity, greedy_modularity_partition, modularity};
pub use spectral::{
    educated_guess_k, eigengap_k, kmeans, laplacian_spectrum, resolve_k, spectral_partition,
    EigSelection, KMode, SpectralParams,
};
pub use voronoi::voronoi_partition;

#[derive(Debug, Error, PartialEq)]
pub enum PartitionError {
    #[error("cluster count {k} out of range 1..={max}")]
    KOutOfRange { k: usize, max: usize },
    #[error("assignment has {got} entries for {expected} nodes")]
    WrongLength { got: usize, expected: usize },
}

/// Node-to-cluster assignment with dense cluster ids `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    assignment: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Relabels arbitrary cluster labels densely, ordered by smallest member.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut map = BTreeMap::new();
        let mut assignment = Vec::with_capacity(labels.len());
        for &l in labels {
            let next = map.len();
            assignment.push(*map.entry(l).or_insert(next));
        }
        Self {
            k: map.len(),
            assignment,
        }
    }

    pub fn single(n: usize) -> Self {
        Self::from_labels(&vec![0; n])
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn cluster_of(&self, v: NodeId) -> usize {
        self.assignment[v]
    }

    /// Member lists, each ascending.
    pub fn clusters(&self) -> Vec<Vec<NodeId>> {
        let mut out = vec![Vec::new(); self.k];
        for (v, &c) in self.assignment.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    /// True when every cluster is connected and holds a terminal.
    pub fn is_valid_for(&self, p: &Problem) -> bool {
        if self.assignment.len() != p.node_count() {
            return false;
        }
        self.clusters().iter().all(|members| {
            !members.is_empty()
                && members.iter().any(|&v| p.is_terminal(v))
                && induced_components(p, &self.assignment, members).1 == 1
        })
    }
}

fn induced_components(p: &Problem, assignment: &[usize], members: &[NodeId]) -> (Vec<usize>, usize) {
    let mut uf = UnionFind::new(p.node_count());
    for &v in members {
        for &(w, _) in p.neighbors(v) {
            if assignment[w] == assignment[v] {
                uf.union(v, w);
            }
        }
    }
    let mut roots: Vec<usize> = members.iter().map(|&v| uf.find(v)).collect();
    let labels = roots.clone();
    roots.sort_unstable();
    roots.dedup();
    (labels, roots.len())
}

/// Splits disconnected clusters into their components, then folds every
/// terminal-free cluster into the neighboring cluster sharing the most edges
/// with it.
pub fn repair(p: &Problem, labels: &[usize]) -> Partition {
    let n = p.node_count();
    let mut uf = UnionFind::new(n);
    for e in p.edges() {
        if labels[e.u] == labels[e.v] {
            uf.union(e.u, e.v);
        }
    }
    let mut assignment: Vec<usize> = (0..n).map(|v| uf.find(v)).collect();
    loop {
        let part = Partition::from_labels(&assignment);
        assignment = part.assignment.clone();
        let clusters = part.clusters();
        let Some(bare) = (0..part.k).find(|&c| !clusters[c].iter().any(|&v| p.is_terminal(v))) else {
            return part;
        };
        let mut cut: BTreeMap<usize, usize> = BTreeMap::new();
        for &v in &clusters[bare] {
            for &(w, _) in p.neighbors(v) {
                if assignment[w] != bare {
                    *cut.entry(assignment[w]).or_default() += 1;
                }
            }
        }
        // Ascending key order plus strict comparison keeps the smallest id on ties.
        let Some(target) = cut
            .iter()
            .fold(None, |best: Option<(usize, usize)>, (&c, &w)| match best {
                Some((_, bw)) if bw >= w => best,
                _ => Some((c, w)),
            })
            .map(|(c, _)| c)
        else {
            return part;
        };
        for a in assignment.iter_mut() {
            if *a == bare {
                *a = target;
            }
        }
    }
}

/// Induced subproblem of one cluster with its local-to-global node map.
#[derive(Debug, Clone)]
pub struct Subproblem {
    pub problem: Problem,
    pub back_map: Vec<NodeId>,
}

impl Subproblem {
    /// Maps a tree on the subproblem to global node and edge ids.
    pub fn lift_tree(&self, global: &Problem, t: &SteinerTree) -> PartTree {
        let edges: Vec<EdgeId> = t
            .edges()
            .iter()
            .map(|&e| {
                let le = self.problem.edge(e);
                global
                    .find_edge(self.back_map[le.u], self.back_map[le.v])
                    .expect("subproblem edges exist globally")
            })
            .collect();
        let nodes = t.nodes().iter().map(|&v| self.back_map[v]).collect();
        PartTree::new(nodes, edges)
    }
}

pub fn split_subproblems(p: &Problem, partition: &Partition) -> Vec<Subproblem> {
    partition
        .clusters()
        .into_iter()
        .map(|members| {
            let (problem, back_map) = p.induced(&members);
            Subproblem { problem, back_map }
        })
        .collect()
}
