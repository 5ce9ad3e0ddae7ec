use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{repair, Partition, PartitionError};
use crate::graph::Problem;
use crate::rng::{rng_from_seed, StageRng};

/// How the cluster count is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KMode {
    Explicit(usize),
    Eigengap,
    #[default]
    Guess,
}

/// Which end of the spectrum provides the embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigSelection {
    #[default]
    Smallest,
    Largest,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectralParams {
    pub eigs: EigSelection,
    pub restarts: usize,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for SpectralParams {
    fn default() -> Self {
        Self {
            eigs: EigSelection::Smallest,
            restarts: 10,
            max_iter: 300,
            seed: 0,
        }
    }
}

/// `⌈m/7⌉ + 1`.
pub fn educated_guess_k(m: usize) -> usize {
    m.div_ceil(7) + 1
}

/// Index of the largest gap `λ_{k+1} − λ_k` (1-based, ties to the smaller
/// k), searched over `k ≤ min(len − 1, 32)`.
pub fn eigengap_k(spectrum: &[f64]) -> usize {
    let cap = spectrum.len().saturating_sub(1).min(32);
    let mut best = (1, f64::NEG_INFINITY);
    for k in 1..=cap {
        let gap = spectrum[k] - spectrum[k - 1];
        if gap > best.1 + 1e-12 {
            best = (k, gap);
        }
    }
    best.0
}

fn affinity_degrees(p: &Problem) -> (Vec<(usize, usize, f64)>, Vec<f64>) {
    let m = p.edge_count();
    let mean = if m == 0 { 0.0 } else { p.total_cost() / m as f64 };
    let mut degree = vec![0.0; p.node_count()];
    let weights = p
        .edges()
        .iter()
        .map(|e| {
            let w = if mean > 0.0 { (-e.cost / mean).exp() } else { 1.0 };
            degree[e.u] += w;
            degree[e.v] += w;
            (e.u, e.v, w)
        })
        .collect();
    (weights, degree)
}

/// Eigen-decomposition of `L_rw = D⁻¹(D − W)` via the similar symmetric
/// matrix `L_sym`. Returns ascending eigenvalues and the matching `L_rw`
/// eigenvectors as columns.
fn rw_eigen(p: &Problem) -> (Vec<f64>, DMatrix<f64>) {
    let n = p.node_count();
    let (weights, degree) = affinity_degrees(p);
    let inv_sqrt: Vec<f64> = degree
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
        .collect();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        if degree[i] > 0.0 {
            l[(i, i)] = 1.0;
        }
    }
    for &(u, v, w) in &weights {
        let x = w * inv_sqrt[u] * inv_sqrt[v];
        l[(u, v)] -= x;
        l[(v, u)] -= x;
    }
    let eig = SymmetricEigen::new(l);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let mut vectors = DMatrix::<f64>::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        for r in 0..n {
            let scale = if inv_sqrt[r] > 0.0 { inv_sqrt[r] } else { 1.0 };
            vectors[(r, col)] = eig.eigenvectors[(r, i)] * scale;
        }
    }
    (values, vectors)
}

/// Ascending spectrum of the random-walk Laplacian with the affinity weights
/// used for clustering.
pub fn laplacian_spectrum(p: &Problem) -> Vec<f64> {
    rw_eigen(p).0
}

pub fn resolve_k(p: &Problem, mode: KMode) -> Result<usize, PartitionError> {
    let n = p.node_count();
    let k = match mode {
        KMode::Explicit(k) => k,
        KMode::Eigengap => eigengap_k(&laplacian_spectrum(p)),
        KMode::Guess => educated_guess_k(p.terminals().len()),
    };
    if k == 0 || k > n {
        return Err(PartitionError::KOutOfRange { k, max: n });
    }
    Ok(k)
}

/// Spectral clustering on the `k` selected eigenvectors, then repair.
/// Heuristic modes clamp k into `1..=|V|`; an explicit k out of range fails.
pub fn spectral_partition(p: &Problem, mode: KMode, params: &SpectralParams) -> Result<Partition, PartitionError> {
    let n = p.node_count();
    let k = match mode {
        KMode::Explicit(_) => resolve_k(p, mode)?,
        _ => resolve_k(p, mode).unwrap_or(n).clamp(1, n.max(1)),
    };
    if k == 1 {
        return Ok(repair(p, &vec![0; n]));
    }
    let (_, vectors) = rw_eigen(p);
    let cols: Vec<usize> = match params.eigs {
        EigSelection::Smallest => (0..k).collect(),
        EigSelection::Largest => (n - k..n).collect(),
    };
    let points: Vec<Vec<f64>> = (0..n)
        .map(|r| cols.iter().map(|&c| vectors[(r, c)]).collect())
        .collect();
    let mut rng = rng_from_seed(params.seed);
    let labels = kmeans(&points, k, params.restarts.max(1), params.max_iter, &mut rng);
    Ok(repair(p, &labels))
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd's k-means with k-means++ seeding; best inertia over `restarts`.
pub fn kmeans(points: &[Vec<f64>], k: usize, restarts: usize, max_iter: usize, rng: &mut StageRng) -> Vec<usize> {
    let n = points.len();
    if n == 0 || k == 0 {
        return vec![0; n];
    }
    let k = k.min(n);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..restarts {
        let mut centers = seed_centers(points, k, rng);
        let mut labels = vec![0; n];
        for iter in 0..max_iter.max(1) {
            let mut changed = false;
            for (i, pt) in points.iter().enumerate() {
                let c = nearest(&centers, pt);
                if c != labels[i] || iter == 0 {
                    changed |= c != labels[i];
                    labels[i] = c;
                }
            }
            if iter > 0 && !changed {
                break;
            }
            let dim = points[0].len();
            let mut sums = vec![vec![0.0; dim]; k];
            let mut counts = vec![0usize; k];
            for (pt, &l) in points.iter().zip(&labels) {
                counts[l] += 1;
                for (s, x) in sums[l].iter_mut().zip(pt) {
                    *s += x;
                }
            }
            for c in 0..k {
                if counts[c] > 0 {
                    centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
                }
            }
        }
        let inertia: f64 = points
            .iter()
            .zip(&labels)
            .map(|(pt, &l)| sq_dist(pt, &centers[l]))
            .sum();
        if best.as_ref().is_none_or(|(b, _)| inertia < *b) {
            best = Some((inertia, labels));
        }
    }
    best.expect("at least one restart").1
}

fn nearest(centers: &[Vec<f64>], pt: &[f64]) -> usize {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.iter().enumerate() {
        let d = sq_dist(center, pt);
        if d < best.1 {
            best = (c, d);
        }
    }
    best.0
}

fn seed_centers(points: &[Vec<f64>], k: usize, rng: &mut StageRng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centers = vec![points[rng.random_range(0..n)].clone()];
    let mut d2: Vec<f64> = points.iter().map(|pt| sq_dist(pt, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let idx = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if target < d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        centers.push(points[idx].clone());
        for (d, pt) in d2.iter_mut().zip(points) {
            *d = d.min(sq_dist(pt, &points[idx]));
        }
    }
    centers
}
