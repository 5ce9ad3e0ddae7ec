use std::collections::BTreeMap;

use super::{repair, Partition, PartitionError};
use crate::graph::{Problem, ShortestPaths};

/// Graph Voronoi regions around the terminals, then repeated merging of the
/// smallest region into its nearest neighbor while the merged region stays
/// within `node_limit` nodes, until `k_target` regions remain.
///
/// Region distance is the shortest terminal-to-terminal route through a
/// shared boundary edge: `min d(u) + c(u, v) + d(v)` over cut edges. If the
/// smallest region has no admissible neighbor the next smallest is tried.
pub fn voronoi_partition(p: &Problem, k_target: usize, node_limit: usize) -> Result<Partition, PartitionError> {
    let t = p.terminals().len();
    if k_target == 0 || k_target > t {
        return Err(PartitionError::KOutOfRange { k: k_target, max: t });
    }
    let sp = ShortestPaths::from_sources(p, p.terminals(), None);
    let mut region: Vec<usize> = sp.origin.clone();
    let mut size = vec![0usize; t];
    for &r in &region {
        size[r] += 1;
    }
    let mut alive: Vec<bool> = vec![true; t];
    let mut count = t;
    while count > k_target {
        let mut adjacency: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for e in p.edges() {
            let (a, b) = (region[e.u], region[e.v]);
            if a != b {
                let d = sp.dist[e.u] + e.cost + sp.dist[e.v];
                let key = (a.min(b), a.max(b));
                let slot = adjacency.entry(key).or_insert(f64::INFINITY);
                *slot = slot.min(d);
            }
        }
        let mut order: Vec<usize> = (0..t).filter(|&r| alive[r]).collect();
        order.sort_by_key(|&r| (size[r], r));
        let mut chosen = None;
        for &r in &order {
            let mut neighbors: Vec<(f64, usize)> = adjacency
                .iter()
                .filter_map(|(&(a, b), &d)| {
                    if a == r {
                        Some((d, b))
                    } else if b == r {
                        Some((d, a))
                    } else {
                        None
                    }
                })
                .collect();
            neighbors.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
            if let Some(&(_, s)) = neighbors.iter().find(|&&(_, s)| size[r] + size[s] <= node_limit) {
                chosen = Some((r, s));
                break;
            }
        }
        let Some((small, into)) = chosen else { break };
        for x in region.iter_mut() {
            if *x == small {
                *x = into;
            }
        }
        size[into] += size[small];
        size[small] = 0;
        alive[small] = false;
        count -= 1;
    }
    Ok(repair(p, &region))
}
