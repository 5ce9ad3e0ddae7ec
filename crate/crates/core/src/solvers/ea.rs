use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{random_tree, SolverError, RANDOM_SELECT_P};
use crate::graph::{repair_tree, tree_from_keys, EdgeId, NodeId, PathCache, Problem, SteinerTree};
use crate::rng::{rng_from_seed, StageRng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EaParams {
    pub population: usize,
    pub elitism: usize,
    /// Weight of the normalized cost term.
    pub alpha: f64,
    /// Weight of the normalized size term.
    pub beta: f64,
    /// Probability that mutation replaces an individual by a fresh random tree.
    pub gamma: f64,
    pub seed_with_baseline: bool,
    pub generations: usize,
    pub tournament: usize,
    pub seed: u64,
}

impl Default for EaParams {
    fn default() -> Self {
        Self {
            population: 60,
            elitism: 6,
            alpha: 1.0,
            beta: 1.0,
            gamma: 0.05,
            seed_with_baseline: true,
            generations: 300,
            tournament: 3,
            seed: 0,
        }
    }
}

/// Population-wide cost and size ranges used to normalize fitness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationStats {
    pub cost_min: f64,
    pub cost_max: f64,
    pub size_min: usize,
    pub size_max: usize,
}

impl PopulationStats {
    pub fn new(population: &[SteinerTree]) -> Self {
        let mut s = Self {
            cost_min: f64::INFINITY,
            cost_max: f64::NEG_INFINITY,
            size_min: usize::MAX,
            size_max: 0,
        };
        for t in population {
            s.cost_min = s.cost_min.min(t.cost());
            s.cost_max = s.cost_max.max(t.cost());
            s.size_min = s.size_min.min(t.node_count());
            s.size_max = s.size_max.max(t.node_count());
        }
        s
    }

    /// Normalized cost in `[0, 1]`; 0 when the population is flat.
    pub fn cost_hat(&self, x: &SteinerTree) -> f64 {
        let span = self.cost_max - self.cost_min;
        if span > 0.0 {
            ((x.cost() - self.cost_min) / span).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }

    pub fn size_hat(&self, x: &SteinerTree) -> f64 {
        if self.size_max > self.size_min {
            (x.node_count().saturating_sub(self.size_min)) as f64 / (self.size_max - self.size_min) as f64
        } else {
            0.0
        }
    }

    /// `−(α·cost̂ + β·sizê)`; larger is better.
    pub fn fitness(&self, x: &SteinerTree, alpha: f64, beta: f64) -> f64 {
        -(alpha * self.cost_hat(x) + beta * self.size_hat(x))
    }
}

/// A tree hung from its smallest terminal.
struct Rooted {
    root: NodeId,
    parent: Vec<Option<(NodeId, EdgeId)>>,
    children: Vec<Vec<NodeId>>,
    order: Vec<NodeId>,
}

impl Rooted {
    fn new(p: &Problem, t: &SteinerTree) -> Self {
        let n = p.node_count();
        let root = p.terminals()[0];
        let mut adj: Vec<Vec<(NodeId, EdgeId)>> = vec![Vec::new(); n];
        for &e in t.edges() {
            let edge = p.edge(e);
            adj[edge.u].push((edge.v, e));
            adj[edge.v].push((edge.u, e));
        }
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut seen = vec![false; n];
        let mut order = vec![root];
        seen[root] = true;
        let mut i = 0;
        while i < order.len() {
            let u = order[i];
            i += 1;
            adj[u].sort_unstable();
            for &(w, e) in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some((u, e));
                    children[u].push(w);
                    order.push(w);
                }
            }
        }
        Self {
            root,
            parent,
            children,
            order,
        }
    }

    fn subtree(&self, u: NodeId) -> Vec<NodeId> {
        let mut out = vec![u];
        let mut i = 0;
        while i < out.len() {
            out.extend(self.children[out[i]].iter().copied());
            i += 1;
        }
        out
    }

    /// Edges strictly inside the subtree of `u`.
    fn subtree_edges(&self, u: NodeId) -> Vec<EdgeId> {
        self.subtree(u)
            .into_iter()
            .filter(|&v| v != u)
            .map(|v| self.parent[v].expect("non-root has a parent").1)
            .collect()
    }
}

/// Child of `a` with a random subtree replaced by the largest subtree of `b`
/// lying entirely outside what remains of `a`; the link to its parent is kept
/// when that parent survives in `a`.
fn graft(p: &Problem, a: &SteinerTree, b: &SteinerTree, rng: &mut StageRng) -> Result<SteinerTree, SolverError> {
    let ra = Rooted::new(p, a);
    if ra.order.len() < 2 {
        return Ok(a.clone());
    }
    let cut = ra.order[rng.random_range(1..ra.order.len())];
    let removed: BTreeSet<NodeId> = ra.subtree(cut).into_iter().collect();
    let kept_nodes: BTreeSet<NodeId> = ra.order.iter().copied().filter(|v| !removed.contains(v)).collect();
    let mut edges: BTreeSet<EdgeId> = a
        .edges()
        .iter()
        .copied()
        .filter(|&e| kept_nodes.contains(&p.edge(e).u) && kept_nodes.contains(&p.edge(e).v))
        .collect();
    let rb = Rooted::new(p, b);
    let mut donor: Option<(usize, NodeId, Vec<NodeId>)> = None;
    for &w in rb.order.iter().filter(|&&w| w != rb.root) {
        let nodes = rb.subtree(w);
        if nodes.iter().any(|v| kept_nodes.contains(v)) {
            continue;
        }
        if donor.as_ref().is_none_or(|(size, root, _)| nodes.len() > *size || (nodes.len() == *size && w < *root)) {
            donor = Some((nodes.len(), w, nodes));
        }
    }
    if let Some((_, w, _)) = donor {
        edges.extend(rb.subtree_edges(w));
        if let Some((parent, e)) = rb.parent[w] {
            if kept_nodes.contains(&parent) {
                edges.insert(e);
            }
        }
    }
    let edges: Vec<EdgeId> = edges.into_iter().collect();
    Ok(repair_tree(p, &edges)?)
}

/// Subtree-exchange crossover; both children are repaired to valid trees.
pub fn ea_crossover(
    p: &Problem,
    a: &SteinerTree,
    b: &SteinerTree,
    rng: &mut StageRng,
) -> Result<(SteinerTree, SteinerTree), SolverError> {
    let c1 = graft(p, a, b, rng)?;
    let c2 = graft(p, b, a, rng)?;
    Ok((c1, c2))
}

/// With probability `gamma` a fresh random tree; otherwise one of: add a
/// non-terminal, remove a Steiner node, or cut a random subtree and reconnect.
pub fn ea_mutate(
    cache: &mut PathCache<'_>,
    x: &SteinerTree,
    gamma: f64,
    rng: &mut StageRng,
) -> Result<SteinerTree, SolverError> {
    let p = cache.problem();
    let steiner = p.steiner_nodes();
    if steiner.is_empty() {
        return Ok(x.clone());
    }
    if rng.random_bool(gamma.clamp(0.0, 1.0)) {
        return Ok(random_tree(cache, &steiner, RANDOM_SELECT_P, rng)?);
    }
    let inside = x.steiner_nodes(p);
    let outside: Vec<NodeId> = steiner.iter().copied().filter(|&v| !x.contains_node(v)).collect();
    match rng.random_range(0..3) {
        0 if !outside.is_empty() => {
            let mut keys = inside;
            keys.push(*outside.choose(rng).expect("non-empty"));
            Ok(tree_from_keys(cache, &keys)?)
        }
        1 if !inside.is_empty() => {
            let drop = *inside.choose(rng).expect("non-empty");
            let keys: Vec<NodeId> = inside.into_iter().filter(|&v| v != drop).collect();
            Ok(tree_from_keys(cache, &keys)?)
        }
        _ => {
            let rooted = Rooted::new(p, x);
            if rooted.order.len() < 2 {
                return Ok(random_tree(cache, &steiner, RANDOM_SELECT_P, rng)?);
            }
            let cut = rooted.order[rng.random_range(1..rooted.order.len())];
            let removed: BTreeSet<NodeId> = rooted.subtree(cut).into_iter().collect();
            let edges: Vec<EdgeId> = x
                .edges()
                .iter()
                .copied()
                .filter(|&e| !removed.contains(&p.edge(e).u) && !removed.contains(&p.edge(e).v))
                .collect();
            Ok(repair_tree(p, &edges)?)
        }
    }
}

fn tournament<'a>(pop: &'a [SteinerTree], fitness: &[f64], size: usize, rng: &mut StageRng) -> &'a SteinerTree {
    let mut best = rng.random_range(0..pop.len());
    for _ in 1..size.max(1) {
        let c = rng.random_range(0..pop.len());
        if fitness[c] > fitness[best] {
            best = c;
        }
    }
    &pop[best]
}

/// Generational EA with elitism; returns the cheapest tree ever seen.
pub fn solve_ea(p: &Problem, params: &EaParams) -> Result<SteinerTree, SolverError> {
    let mut rng = rng_from_seed(params.seed);
    let mut cache = PathCache::new(p);
    let size = params.population.max(2);
    let elitism = params.elitism.min(size - 1);
    let steiner = p.steiner_nodes();
    let mut pop = Vec::with_capacity(size);
    if params.seed_with_baseline {
        let base = tree_from_keys(&mut cache, &[])?;
        pop.extend(std::iter::repeat_n(base, (size / 10).max(1)));
    }
    while pop.len() < size {
        pop.push(random_tree(&mut cache, &steiner, RANDOM_SELECT_P, &mut rng)?);
    }
    let mut best = cheapest(&pop).clone();
    for _ in 0..params.generations {
        let stats = PopulationStats::new(&pop);
        let fitness: Vec<f64> = pop.iter().map(|t| stats.fitness(t, params.alpha, params.beta)).collect();
        let mut ranked: Vec<usize> = (0..pop.len()).collect();
        ranked.sort_by(|&i, &j| fitness[j].total_cmp(&fitness[i]).then(i.cmp(&j)));
        let mut next: Vec<SteinerTree> = ranked[..elitism].iter().map(|&i| pop[i].clone()).collect();
        while next.len() < size {
            let a = tournament(&pop, &fitness, params.tournament, &mut rng);
            let b = tournament(&pop, &fitness, params.tournament, &mut rng);
            let (c1, c2) = ea_crossover(p, a, b, &mut rng)?;
            next.push(ea_mutate(&mut cache, &c1, params.gamma, &mut rng)?);
            if next.len() < size {
                next.push(ea_mutate(&mut cache, &c2, params.gamma, &mut rng)?);
            }
        }
        pop = next;
        let gen_best = cheapest(&pop);
        if gen_best.cost() < best.cost() {
            best = gen_best.clone();
        }
    }
    Ok(best)
}

fn cheapest(pop: &[SteinerTree]) -> &SteinerTree {
    pop.iter()
        .min_by(|a, b| a.cost().total_cmp(&b.cost()))
        .expect("population is non-empty")
}
