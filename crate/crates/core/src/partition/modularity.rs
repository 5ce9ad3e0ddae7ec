use std::collections::BTreeMap;

use super::{repair, Partition};
use crate::graph::Problem;

/// Newman modularity `Σ_i (e_ii − a_i²)` from unweighted edge fractions.
pub fn modularity(p: &Problem, partition: &Partition) -> f64 {
    let m = p.edge_count();
    if m == 0 {
        return 0.0;
    }
    let k = partition.k();
    let mut intra = vec![0usize; k];
    let mut degree = vec![0usize; k];
    for e in p.edges() {
        let (cu, cv) = (partition.cluster_of(e.u), partition.cluster_of(e.v));
        if cu == cv {
            intra[cu] += 1;
        }
        degree[cu] += 1;
        degree[cv] += 1;
    }
    let m = m as f64;
    (0..k)
        .map(|c| {
            let a = degree[c] as f64 / (2.0 * m);
            intra[c] as f64 / m - a * a
        })
        .sum()
}

/// Agglomerative (Clauset–Newman–Moore) modularity maximization. Returns the
/// best partition on the merge trajectory, before any repair, together with
/// its modularity.
pub fn greedy_modularity(p: &Problem) -> (Partition, f64) {
    let n = p.node_count();
    let m = p.edge_count();
    if m == 0 {
        let part = Partition::from_labels(&(0..n).collect::<Vec<_>>());
        return (part, 0.0);
    }
    let m2 = 2.0 * m as f64;
    // e[i][j] for i != j holds half the fraction of edges between i and j.
    let mut e: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
    let mut a = vec![0.0; n];
    for edge in p.edges() {
        *e[edge.u].entry(edge.v).or_default() += 1.0 / m2;
        *e[edge.v].entry(edge.u).or_default() += 1.0 / m2;
        a[edge.u] += 1.0 / m2;
        a[edge.v] += 1.0 / m2;
    }
    let mut q: f64 = -a.iter().map(|x| x * x).sum::<f64>();
    let mut label: Vec<usize> = (0..n).collect();
    let mut best_q = q;
    let mut best_label = label.clone();
    loop {
        let mut pick: Option<(f64, usize, usize)> = None;
        for i in 0..n {
            for (&j, &eij) in e[i].range(i + 1..) {
                let gain = 2.0 * (eij - a[i] * a[j]);
                if pick.is_none_or(|(g, _, _)| gain > g) {
                    pick = Some((gain, i, j));
                }
            }
        }
        let Some((gain, i, j)) = pick else { break };
        // Fold j into i.
        let row_j = std::mem::take(&mut e[j]);
        for (&l, &w) in &row_j {
            e[l].remove(&j);
            if l != i {
                *e[i].entry(l).or_default() += w;
                *e[l].entry(i).or_default() += w;
            }
        }
        e[i].remove(&j);
        a[i] += a[j];
        a[j] = 0.0;
        for lab in label.iter_mut() {
            if *lab == j {
                *lab = i;
            }
        }
        q += gain;
        if q > best_q + 1e-12 {
            best_q = q;
            best_label = label.clone();
        }
    }
    (Partition::from_labels(&best_label), best_q)
}

/// Greedy modularity clustering followed by terminal repair.
pub fn greedy_modularity_partition(p: &Problem) -> Partition {
    let (part, _) = greedy_modularity(p);
    repair(p, part.assignment())
}
