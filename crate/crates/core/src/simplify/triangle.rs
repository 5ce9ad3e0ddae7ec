//! Evolutionary selection of non-terminals whose triangulation best
//! reproduces the node weight field.

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::delaunay::{chain_edges, delaunay, interpolate};
use super::{weighted_problem, SimplifiedProblem, SimplifyError};
use crate::graph::{NodeId, Point, Problem};
use crate::rng::{stage_rng, StageRng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TriangleParams {
    pub alpha: f64,
    pub beta: f64,
    /// Cap on selected non-terminals; `None` means no cap.
    pub max_nonterminals: Option<usize>,
    pub population: usize,
    pub elite: usize,
    pub tournament: usize,
    /// Per-bit flip probability.
    pub flip_rate: f64,
    pub generations: usize,
}

impl Default for TriangleParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            max_nonterminals: None,
            population: 40,
            elite: 4,
            tournament: 3,
            flip_rate: 0.02,
            generations: 200,
        }
    }
}

/// A selection over `p.steiner_nodes()` and its fitness within the
/// population it was last ranked in.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleIndividual {
    pub selection: Vec<bool>,
    pub fitness: f64,
}

fn key_nodes(p: &Problem, steiner: &[NodeId], selection: &[bool]) -> Vec<NodeId> {
    let mut keys: Vec<NodeId> = p.terminals().to_vec();
    keys.extend(steiner.iter().zip(selection).filter_map(|(&v, &s)| s.then_some(v)));
    keys.sort_unstable();
    keys
}

/// Mean absolute difference between every node's weight and the weight
/// interpolated from the triangulation of `terminals ∪ selection`.
pub fn triangle_error(p: &Problem, selection: &[NodeId]) -> Result<f64, SimplifyError> {
    let mut keys: Vec<NodeId> = p.terminals().to_vec();
    keys.extend_from_slice(selection);
    keys.sort_unstable();
    keys.dedup();
    error_of_keys(p, &keys)
}

fn error_of_keys(p: &Problem, keys: &[NodeId]) -> Result<f64, SimplifyError> {
    let points: Vec<Point> = keys.iter().map(|&v| p.position(v)).collect();
    let weights: Vec<f64> = keys.iter().map(|&v| p.node(v).weight).collect();
    let tri = delaunay(&points).ok_or(SimplifyError::Degenerate)?;
    let total: f64 = p
        .nodes()
        .iter()
        .map(|n| (interpolate(&points, &weights, &tri, n.position) - n.weight).abs())
        .sum();
    Ok(total / p.node_count() as f64)
}

fn enforce_cap(selection: &mut [bool], cap: usize, rng: &mut StageRng) {
    let on: Vec<usize> = (0..selection.len()).filter(|&i| selection[i]).collect();
    if on.len() > cap {
        for k in sample(rng, on.len(), on.len() - cap) {
            selection[on[k]] = false;
        }
    }
}

fn min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn normalized(v: f64, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        (v - lo) / (hi - lo)
    } else {
        0.0
    }
}

/// Ranks a population: fitness `−(α·err̂ + β·size̅)` with both terms min-max
/// normalized over the population; degenerate selections rank last.
fn rank(errors: &[f64], sizes: &[usize], alpha: f64, beta: f64) -> Vec<f64> {
    let err_range = min_max(errors.iter().copied().filter(|e| e.is_finite()));
    let size_range = min_max(sizes.iter().map(|&s| s as f64));
    errors
        .iter()
        .zip(sizes)
        .map(|(&e, &s)| {
            if e.is_finite() {
                -(alpha * normalized(e, err_range) + beta * normalized(s as f64, size_range))
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleOutcome {
    pub simplified: SimplifiedProblem,
    pub best: TriangleIndividual,
    /// Interpolation error of the returned selection (infinite if degenerate).
    pub error: f64,
    /// Lowest error in the initial population.
    pub initial_best_error: f64,
}

pub fn triangle_simplify(p: &Problem, params: &TriangleParams, seed: u64) -> Result<SimplifiedProblem, SimplifyError> {
    Ok(triangle_simplify_detailed(p, params, seed)?.simplified)
}

pub fn triangle_simplify_detailed(p: &Problem, params: &TriangleParams, seed: u64) -> Result<TriangleOutcome, SimplifyError> {
    if params.population == 0 || params.tournament == 0 {
        return Err(SimplifyError::InvalidParams("population and tournament must be positive".into()));
    }
    let steiner = p.steiner_nodes();
    let m = steiner.len();
    let cap = params.max_nonterminals.unwrap_or(m).min(m);
    let mut rng = stage_rng(seed, "triangle", 0);
    let evaluate = |pop: &[Vec<bool>]| -> (Vec<f64>, Vec<usize>) {
        let errors: Vec<f64> = pop
            .par_iter()
            .map(|s| error_of_keys(p, &key_nodes(p, &steiner, s)).unwrap_or(f64::INFINITY))
            .collect();
        let sizes = pop.iter().map(|s| s.iter().filter(|&&b| b).count()).collect();
        (errors, sizes)
    };

    let mut pop: Vec<Vec<bool>> = (0..params.population)
        .map(|_| {
            let mut s: Vec<bool> = (0..m).map(|_| rng.random_bool(0.5)).collect();
            enforce_cap(&mut s, cap, &mut rng);
            s
        })
        .collect();
    let (mut errors, mut sizes) = evaluate(&pop);
    let initial_best_error = errors.iter().copied().fold(f64::INFINITY, f64::min);
    let mut fitness = rank(&errors, &sizes, params.alpha, params.beta);

    for _ in 0..params.generations {
        let mut order: Vec<usize> = (0..pop.len()).collect();
        order.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]).then(a.cmp(&b)));
        let mut next: Vec<Vec<bool>> = order.iter().take(params.elite.min(pop.len())).map(|&i| pop[i].clone()).collect();
        let pick = |rng: &mut StageRng| -> usize {
            (0..params.tournament)
                .map(|_| rng.random_range(0..pop.len()))
                .reduce(|a, b| if fitness[b] > fitness[a] || (fitness[b] == fitness[a] && b < a) { b } else { a })
                .expect("tournament size positive")
        };
        while next.len() < params.population {
            let (a, b) = (pick(&mut rng), pick(&mut rng));
            let mut child: Vec<bool> = (0..m).map(|i| if rng.random_bool(0.5) { pop[a][i] } else { pop[b][i] }).collect();
            for bit in child.iter_mut() {
                if rng.random_bool(params.flip_rate.clamp(0.0, 1.0)) {
                    *bit = !*bit;
                }
            }
            enforce_cap(&mut child, cap, &mut rng);
            next.push(child);
        }
        pop = next;
        (errors, sizes) = evaluate(&pop);
        fitness = rank(&errors, &sizes, params.alpha, params.beta);
    }

    let best = (0..pop.len())
        .reduce(|a, b| if fitness[b] > fitness[a] { b } else { a })
        .expect("population non-empty");
    let keys = key_nodes(p, &steiner, &pop[best]);
    let points: Vec<Point> = keys.iter().map(|&v| p.position(v)).collect();
    let edges = match delaunay(&points) {
        Some(t) => t.edges,
        None => chain_edges(&points),
    };
    let simplified = weighted_problem(p, &keys, &edges)?;
    Ok(TriangleOutcome {
        simplified,
        best: TriangleIndividual {
            selection: pop[best].clone(),
            fitness: fitness[best],
        },
        error: errors[best],
        initial_best_error,
    })
}
