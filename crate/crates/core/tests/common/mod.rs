//! Independent oracles and instance generators shared by the integration tests.
#![allow(dead_code)]

use rand::seq::index::sample;
use rand::Rng;
use steiner_core::graph::{Edge, NodeKind, NodeRecord, Problem};
use steiner_core::rng::rng_from_seed;

/// Random connected instance: a random recursive spanning tree plus extra
/// edges with probability `extra`, costs uniform in `[1, 10)` rounded to
/// two decimals, `terminals` distinct terminals.
pub fn random_instance(seed: u64, n: usize, terminals: usize, extra: f64) -> Problem {
    let mut rng = rng_from_seed(seed);
    let mut pairs = Vec::new();
    for v in 1..n {
        pairs.push((rng.random_range(0..v), v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !pairs.iter().any(|&(a, b)| (a.min(b), a.max(b)) == (u, v)) && rng.random_bool(extra) {
                pairs.push((u, v));
            }
        }
    }
    let chosen: Vec<usize> = sample(&mut rng, n, terminals).into_vec();
    let nodes = (0..n)
        .map(|i| {
            let (x, y) = (rng.random_range(0.0..10.0), rng.random_range(0.0..10.0));
            let kind = if chosen.contains(&i) { NodeKind::Terminal } else { NodeKind::Waypoint };
            NodeRecord::new(x, y, 1.0, kind)
        })
        .collect();
    let edges = pairs
        .into_iter()
        .map(|(u, v)| Edge::new(u, v, (rng.random_range(1.0..10.0_f64) * 100.0).round() / 100.0))
        .collect();
    Problem::new(nodes, edges).expect("generator builds valid problems")
}

/// All-pairs shortest distances (Floyd–Warshall).
pub fn floyd_warshall(p: &Problem) -> Vec<Vec<f64>> {
    let n = p.node_count();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for e in p.edges() {
        d[e.u][e.v] = d[e.u][e.v].min(e.cost);
        d[e.v][e.u] = d[e.v][e.u].min(e.cost);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Optimal Steiner tree cost by the Dreyfus–Wagner recursion over
/// terminal subsets.
pub fn dreyfus_wagner(p: &Problem) -> f64 {
    let t = p.terminals();
    if t.len() <= 1 {
        return 0.0;
    }
    let d = floyd_warshall(p);
    let n = p.node_count();
    let full = (1usize << t.len()) - 1;
    let mut dp = vec![vec![f64::INFINITY; n]; full + 1];
    for (i, &ti) in t.iter().enumerate() {
        dp[1 << i][..n].copy_from_slice(&d[ti][..n]);
    }
    for mask in 1..=full {
        if mask.count_ones() < 2 {
            continue;
        }
        for v in 0..n {
            let mut sub = (mask - 1) & mask;
            while sub > 0 {
                let c = dp[sub][v] + dp[mask ^ sub][v];
                if c < dp[mask][v] {
                    dp[mask][v] = c;
                }
                sub = (sub - 1) & mask;
            }
        }
        let row = dp[mask].clone();
        for v in 0..n {
            dp[mask][v] = (0..n).map(|u| row[u] + d[u][v]).fold(f64::INFINITY, f64::min);
        }
    }
    dp[full][t[0]]
}

/// Modularity straight from the definition
/// `Q = 1/(2m) Σ_ij [A_ij − k_i k_j / (2m)] δ(c_i, c_j)`.
pub fn modularity_by_definition(p: &Problem, labels: &[usize]) -> f64 {
    let n = p.node_count();
    let m = p.edge_count() as f64;
    if m == 0.0 {
        return 0.0;
    }
    let mut a = vec![vec![0.0; n]; n];
    for e in p.edges() {
        a[e.u][e.v] = 1.0;
        a[e.v][e.u] = 1.0;
    }
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += a[i][j] - k[i] * k[j] / (2.0 * m);
            }
        }
    }
    q / (2.0 * m)
}

/// Every set partition of `0..n` as a restricted growth string.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn grow(prefix: &mut Vec<usize>, n: usize, max: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for label in 0..=max + 1 {
            prefix.push(label);
            grow(prefix, n, max.max(label), out);
            prefix.pop();
        }
    }
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    grow(&mut vec![0], n, 0, &mut out);
    out
}

/// Calls `visit` on every set partition of `0..n` without storing them.
pub fn for_each_set_partition(n: usize, mut visit: impl FnMut(&[usize])) {
    fn grow(prefix: &mut Vec<usize>, n: usize, max: usize, visit: &mut dyn FnMut(&[usize])) {
        if prefix.len() == n {
            visit(prefix);
            return;
        }
        for label in 0..=max + 1 {
            prefix.push(label);
            grow(prefix, n, max.max(label), visit);
            prefix.pop();
        }
    }
    if n > 0 {
        grow(&mut vec![0], n, 0, &mut visit);
    }
}

/// Minimum of `Σ linear_i x_i + Σ quadratic_ij x_i x_j + offset` by plain
/// enumeration of all assignments (no Gray code).
pub fn brute_force_qubo(n: usize, linear: &[f64], quadratic: &[((usize, usize), f64)], offset: f64) -> f64 {
    let mut best = f64::INFINITY;
    for mask in 0u64..(1u64 << n) {
        let bit = |i: usize| (mask >> i) & 1 == 1;
        let mut e = offset;
        for (i, &l) in linear.iter().enumerate() {
            if bit(i) {
                e += l;
            }
        }
        for &((i, j), q) in quadratic {
            if bit(i) && bit(j) {
                e += q;
            }
        }
        best = best.min(e);
    }
    best
}
