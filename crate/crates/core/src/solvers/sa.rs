use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{SolverError, RANDOM_SELECT_P};
use crate::graph::{tree_from_keys, NodeId, PathCache, SteinerTree};
use crate::rng::{rng_from_seed, StageRng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SaParams {
    pub beta_0: f64,
    pub beta_factor: f64,
    pub steps_per_level: usize,
    pub levels: usize,
    pub flip_count: usize,
    pub seed: u64,
}

impl Default for SaParams {
    fn default() -> Self {
        Self {
            beta_0: 1.0,
            beta_factor: 1.25,
            steps_per_level: 200,
            levels: 40,
            flip_count: 1,
            seed: 0,
        }
    }
}

/// A point of the chain: which non-terminals are selected, and the tree they
/// induce. The selection, not the pruned tree, is the chain state.
#[derive(Debug, Clone, PartialEq)]
pub struct SaState {
    pub selection: Vec<bool>,
    pub tree: SteinerTree,
}

impl SaState {
    /// `candidates[i]` is the node toggled by `selection[i]`.
    pub fn new(cache: &mut PathCache<'_>, candidates: &[NodeId], selection: Vec<bool>) -> Result<Self, SolverError> {
        let keys: Vec<NodeId> = candidates
            .iter()
            .zip(&selection)
            .filter_map(|(&v, &s)| s.then_some(v))
            .collect();
        let tree = tree_from_keys(cache, &keys)?;
        Ok(Self { selection, tree })
    }
}

/// Flips `flip_count` distinct uniformly chosen selection bits and rebuilds
/// the tree. Flipping the same bits again returns to the original state.
pub fn sa_propose(
    cache: &mut PathCache<'_>,
    candidates: &[NodeId],
    state: &SaState,
    flip_count: usize,
    rng: &mut StageRng,
) -> Result<SaState, SolverError> {
    let n = candidates.len();
    let flips = flip_count.min(n);
    if flips == 0 {
        return Ok(state.clone());
    }
    let mut selection = state.selection.clone();
    for i in sample(rng, n, flips) {
        selection[i] = !selection[i];
    }
    SaState::new(cache, candidates, selection)
}

/// Metropolis rule: accept with probability `min(1, exp(−β·Δ))`.
pub fn sa_accept(cost_current: f64, cost_proposal: f64, beta: f64, rng: &mut StageRng) -> bool {
    let delta = cost_proposal - cost_current;
    if delta <= 0.0 {
        return true;
    }
    rng.random::<f64>() < (-beta * delta).exp()
}

/// Geometric annealing over `levels` temperature levels; returns the best
/// tree visited.
pub fn solve_sa(p: &crate::graph::Problem, params: &SaParams) -> Result<SteinerTree, SolverError> {
    let mut rng = rng_from_seed(params.seed);
    let mut cache = PathCache::new(p);
    let candidates = p.steiner_nodes();
    let selection: Vec<bool> = candidates.iter().map(|_| rng.random_bool(RANDOM_SELECT_P)).collect();
    let mut state = SaState::new(&mut cache, &candidates, selection)?;
    let mut best = state.tree.clone();
    let mut beta = params.beta_0;
    for _ in 0..params.levels {
        for _ in 0..params.steps_per_level {
            let proposal = sa_propose(&mut cache, &candidates, &state, params.flip_count, &mut rng)?;
            if sa_accept(state.tree.cost(), proposal.tree.cost(), beta, &mut rng) {
                state = proposal;
                if state.tree.cost() < best.cost() {
                    best = state.tree.clone();
                }
            }
        }
        beta *= params.beta_factor;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{check_tree_edges, Edge, NodeRecord, Problem};

    fn ladder() -> Problem {
        let mut nodes = Vec::new();
        for i in 0..8 {
            let (x, y) = ((i % 4) as f64, (i / 4) as f64);
            nodes.push(if i == 0 || i == 7 || i == 3 {
                NodeRecord::terminal(x, y)
            } else {
                NodeRecord::waypoint(x, y, 1.0)
            });
        }
        let mut edges = Vec::new();
        for i in 0..3 {
            edges.push(Edge::new(i, i + 1, 1.0 + i as f64 * 0.1));
            edges.push(Edge::new(i + 4, i + 5, 0.7));
        }
        for i in 0..4 {
            edges.push(Edge::new(i, i + 4, 0.9));
        }
        Problem::new(nodes, edges).unwrap()
    }

    #[test]
    fn improving_moves_always_accepted() {
        let mut rng = rng_from_seed(0);
        assert!((0..1000).all(|_| sa_accept(2.0, 1.0, 5.0, &mut rng)));
        assert!((0..1000).all(|_| sa_accept(2.0, 2.0, 5.0, &mut rng)));
    }

    #[test]
    fn zero_flips_and_involution() {
        let p = ladder();
        let mut cache = PathCache::new(&p);
        let cands = p.steiner_nodes();
        let start = SaState::new(&mut cache, &cands, vec![true, false, true, false, false]).unwrap();
        let mut rng = rng_from_seed(3);
        assert_eq!(sa_propose(&mut cache, &cands, &start, 0, &mut rng).unwrap(), start);
        let prop = sa_propose(&mut cache, &cands, &start, 2, &mut rng).unwrap();
        let flipped: Vec<usize> = (0..cands.len()).filter(|&i| prop.selection[i] != start.selection[i]).collect();
        assert_eq!(flipped.len(), 2);
        let mut back = prop.selection.clone();
        for i in flipped {
            back[i] = !back[i];
        }
        assert_eq!(SaState::new(&mut cache, &cands, back).unwrap(), start);
        assert!(check_tree_edges(&p, prop.tree.edges()).unwrap().is_valid());
    }

    #[test]
    fn chain_matches_gibbs_weights_on_a_toy_space() {
        // Three states on a ring with uniform symmetric proposals.
        let costs = [0.0, 0.5, 1.5];
        let beta = 1.2;
        let mut rng = rng_from_seed(17);
        let mut counts = [0usize; 3];
        let mut s = 0;
        for _ in 0..100_000 {
            let t = (s + rng.random_range(1..3)) % 3;
            if sa_accept(costs[s], costs[t], beta, &mut rng) {
                s = t;
            }
            counts[s] += 1;
        }
        let z: f64 = costs.iter().map(|c| (-beta * c).exp()).sum();
        let tv: f64 = (0..3)
            .map(|i| (counts[i] as f64 / 100_000.0 - (-beta * costs[i]).exp() / z).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 0.05, "{tv}");
    }

    #[test]
    fn best_is_never_worse_than_start_and_runs_repeat() {
        let p = ladder();
        let params = SaParams {
            levels: 10,
            steps_per_level: 30,
            seed: 5,
            ..Default::default()
        };
        let a = solve_sa(&p, &params).unwrap();
        assert_eq!(a, solve_sa(&p, &params).unwrap());
        let mut rng = rng_from_seed(5);
        let mut cache = PathCache::new(&p);
        let cands = p.steiner_nodes();
        let sel = cands.iter().map(|_| rng.random_bool(RANDOM_SELECT_P)).collect();
        let start = SaState::new(&mut cache, &cands, sel).unwrap();
        assert!(a.cost() <= start.tree.cost());
    }
}
