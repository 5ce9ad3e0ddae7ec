use std::collections::BTreeSet;
use std::f64::consts::TAU;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{Edge, NodeKind, NodeRecord, Point, Problem, ProblemMeta};
use crate::rng::{stage_rng, StageRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyntheticKind {
    /// Dense blobs joined by a few bridges.
    Clustered,
    /// Random geometric graph with high connectivity.
    Meshed,
    /// Pixel lattice over a smooth weight field.
    Grid,
}

impl SyntheticKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::Clustered => "clustered",
            Self::Meshed => "meshed",
            Self::Grid => "grid",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticParams {
    pub clusters: usize,
    pub cluster_size: usize,
    /// Inter-cluster edges; at least `clusters − 1` are always placed.
    pub bridges: usize,
    /// Nearest-neighbor degree inside blobs and meshes.
    pub neighbors: usize,
    /// Node count of meshed instances.
    pub nodes: usize,
    pub width: usize,
    pub height: usize,
    /// Share of non-corner nodes made terminals.
    pub terminal_fraction: f64,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        Self {
            clusters: 3,
            cluster_size: 40,
            bridges: 2,
            neighbors: 4,
            nodes: 60,
            width: 10,
            height: 10,
            terminal_fraction: 0.1,
        }
    }
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Euclidean minimum spanning tree (Prim) over the listed nodes.
fn emst(points: &[Point], members: &[usize], edges: &mut BTreeSet<(usize, usize)>) {
    if members.len() < 2 {
        return;
    }
    let mut in_tree = vec![false; members.len()];
    let mut best = vec![(f64::INFINITY, 0usize); members.len()];
    in_tree[0] = true;
    for j in 1..members.len() {
        best[j] = (points[members[0]].distance(&points[members[j]]), 0);
    }
    for _ in 1..members.len() {
        let j = (0..members.len())
            .filter(|&j| !in_tree[j])
            .min_by(|&a, &b| best[a].0.total_cmp(&best[b].0).then(a.cmp(&b)))
            .expect("nodes remain");
        in_tree[j] = true;
        edges.insert(key(members[j], members[best[j].1]));
        for k in 0..members.len() {
            if !in_tree[k] {
                let d = points[members[j]].distance(&points[members[k]]);
                if d < best[k].0 {
                    best[k] = (d, j);
                }
            }
        }
    }
}

fn knn(points: &[Point], members: &[usize], k: usize, edges: &mut BTreeSet<(usize, usize)>) {
    for &a in members {
        let mut others: Vec<usize> = members.iter().copied().filter(|&b| b != a).collect();
        others.sort_by(|&x, &y| points[a].distance(&points[x]).total_cmp(&points[a].distance(&points[y])).then(x.cmp(&y)));
        for &b in others.iter().take(k) {
            edges.insert(key(a, b));
        }
    }
}

fn closest_pair(points: &[Point], a: &[usize], b: &[usize], taken: &BTreeSet<(usize, usize)>) -> Option<(usize, usize)> {
    let mut best: Option<(f64, usize, usize)> = None;
    for &u in a {
        for &v in b {
            if taken.contains(&key(u, v)) {
                continue;
            }
            let d = points[u].distance(&points[v]);
            if best.is_none_or(|(bd, _, _)| d < bd) {
                best = Some((d, u, v));
            }
        }
    }
    best.map(|(_, u, v)| (u, v))
}

fn pick_terminals(rng: &mut StageRng, pool: &[usize], count: usize, kinds: &mut [NodeKind]) {
    for i in sample(rng, pool.len(), count.min(pool.len())) {
        kinds[pool[i]] = NodeKind::Terminal;
    }
}

fn assemble(points: Vec<Point>, weights: Vec<f64>, kinds: Vec<NodeKind>, edges: BTreeSet<(usize, usize)>, name: String) -> Problem {
    let nodes: Vec<NodeRecord> = points
        .iter()
        .zip(&weights)
        .zip(&kinds)
        .map(|((q, &w), &k)| NodeRecord::new(q.x, q.y, if k == NodeKind::Waypoint { w } else { 0.0 }, k))
        .collect();
    let edges = edges
        .into_iter()
        .map(|(a, b)| Edge::new(a, b, 0.5 * (weights[a] + weights[b]) * points[a].distance(&points[b])))
        .collect();
    Problem::new(nodes, edges).expect("generated instances are valid").with_meta(ProblemMeta {
        name,
        source: "synthetic".into(),
    })
}

/// Deterministic synthetic instance. Every instance is connected, has at
/// least two terminals (one per blob for clustered instances, the four
/// corners for grids) and costs `mean endpoint weight × length`.
pub fn generate_synthetic_instance(kind: SyntheticKind, params: &SyntheticParams, seed: u64) -> Problem {
    let mut rng = stage_rng(seed, kind.label(), 0);
    let mut edges = BTreeSet::new();
    let (points, weights, kinds, size) = match kind {
        SyntheticKind::Clustered => {
            let k = params.clusters.max(1);
            let size = params.cluster_size.max(2);
            let blob = 2.5;
            let ring = if k > 1 { 4.0 * blob / (TAU / k as f64).min(2.0) } else { 0.0 };
            let mut points = Vec::new();
            let mut groups = Vec::new();
            for c in 0..k {
                let (cx, cy) = (ring * (TAU * c as f64 / k as f64).cos(), ring * (TAU * c as f64 / k as f64).sin());
                let start = points.len();
                for _ in 0..size {
                    let r = blob * rng.random::<f64>().sqrt();
                    let a = TAU * rng.random::<f64>();
                    points.push(Point::new(cx + r * a.cos(), cy + r * a.sin()));
                }
                groups.push((start..points.len()).collect::<Vec<usize>>());
            }
            for g in &groups {
                knn(&points, g, params.neighbors, &mut edges);
                emst(&points, g, &mut edges);
            }
            let mut placed = 0;
            for c in 1..k {
                if let Some((u, v)) = closest_pair(&points, &groups[c - 1], &groups[c], &edges) {
                    edges.insert(key(u, v));
                    placed += 1;
                }
            }
            while placed < params.bridges && k > 1 {
                let a = rng.random_range(0..k);
                let b = (a + rng.random_range(1..k)) % k;
                match closest_pair(&points, &groups[a], &groups[b], &edges) {
                    Some((u, v)) => {
                        edges.insert(key(u, v));
                        placed += 1;
                    }
                    None => break,
                }
            }
            let weights: Vec<f64> = points.iter().map(|_| rng.random_range(0.5..1.5)).collect();
            let mut kinds = vec![NodeKind::Waypoint; points.len()];
            let per = ((params.terminal_fraction * size as f64).round() as usize).max(1);
            for g in &groups {
                pick_terminals(&mut rng, g, per, &mut kinds);
            }
            (points, weights, kinds, points_len(&groups))
        }
        SyntheticKind::Meshed => {
            let n = params.nodes.max(3);
            let side = (n as f64).sqrt();
            let points: Vec<Point> = (0..n).map(|_| Point::new(rng.random_range(0.0..side), rng.random_range(0.0..side))).collect();
            let all: Vec<usize> = (0..n).collect();
            knn(&points, &all, params.neighbors.max(6), &mut edges);
            emst(&points, &all, &mut edges);
            let weights: Vec<f64> = points.iter().map(|_| rng.random_range(0.5..1.5)).collect();
            let mut kinds = vec![NodeKind::Waypoint; n];
            let count = ((params.terminal_fraction * n as f64).round() as usize).max(2);
            pick_terminals(&mut rng, &all, count, &mut kinds);
            (points, weights, kinds, n)
        }
        SyntheticKind::Grid => {
            let (w, h) = (params.width.max(2), params.height.max(2));
            let mut points = Vec::new();
            let mut weights = Vec::new();
            let (fx, fy) = (rng.random_range(0.2..0.8), rng.random_range(0.2..0.8));
            for y in 0..h {
                for x in 0..w {
                    points.push(Point::new(x as f64, y as f64));
                    weights.push(1.0 + 0.5 * (fx * x as f64).sin() * (fy * y as f64).cos());
                    let id = y * w + x;
                    if x + 1 < w {
                        edges.insert((id, id + 1));
                    }
                    if y + 1 < h {
                        edges.insert((id, id + w));
                    }
                }
            }
            let mut kinds = vec![NodeKind::Waypoint; w * h];
            let corners = [0, w - 1, (h - 1) * w, h * w - 1];
            for c in corners {
                kinds[c] = NodeKind::Terminal;
            }
            let rest: Vec<usize> = (0..w * h).filter(|i| !corners.contains(i)).collect();
            let count = (params.terminal_fraction * rest.len() as f64).round() as usize;
            pick_terminals(&mut rng, &rest, count, &mut kinds);
            (points, weights, kinds, w * h)
        }
    };
    let name = format!("{}-{}-s{}", kind.label(), size, seed);
    assemble(points, weights, kinds, edges, name)
}

fn points_len(groups: &[Vec<usize>]) -> usize {
    groups.iter().map(Vec::len).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate_problem;

    #[test]
    fn grid_with_corner_terminals() {
        let params = SyntheticParams {
            width: 3,
            height: 3,
            terminal_fraction: 0.0,
            ..Default::default()
        };
        let p = generate_synthetic_instance(SyntheticKind::Grid, &params, 1);
        assert_eq!(p.node_count(), 9);
        assert_eq!(p.edge_count(), 12);
        assert_eq!(p.terminals(), &[0, 2, 6, 8]);
    }

    #[test]
    fn every_kind_is_valid_and_reproducible() {
        for kind in [SyntheticKind::Clustered, SyntheticKind::Meshed, SyntheticKind::Grid] {
            for seed in 0..5 {
                let p = generate_synthetic_instance(kind, &SyntheticParams::default(), seed);
                assert!(validate_problem(&p).is_valid());
                assert!(p.terminals().len() >= 2);
                assert_eq!(p, generate_synthetic_instance(kind, &SyntheticParams::default(), seed));
            }
        }
    }

    #[test]
    fn clustered_bridges_are_the_only_cross_edges() {
        let params = SyntheticParams {
            clusters: 3,
            cluster_size: 8,
            bridges: 2,
            ..Default::default()
        };
        let p = generate_synthetic_instance(SyntheticKind::Clustered, &params, 4);
        let cross = p.edges().iter().filter(|e| e.u / 8 != e.v / 8).count();
        assert_eq!(cross, 2);
        assert_eq!(p.terminals().len(), 3);
    }
}
