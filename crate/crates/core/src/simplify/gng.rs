//! Growing Neural Gas over the node weight field, with optional iso-level
//! biased sampling, followed by terminal snapping.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::delaunay::bridge_components;
use super::{SimplifiedProblem, SimplifyError};
use crate::graph::{Edge, NodeId, NodeRecord, Point, Problem};
use crate::rng::{stage_rng, StageRng};

/// Number of equal-width weight bins used for iso-level sampling.
pub const ISO_LEVELS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GngParams {
    pub max_nodes: usize,
    pub lambda_insert: usize,
    pub eps_b: f64,
    pub eps_n: f64,
    pub age_max: usize,
    pub alpha_split: f64,
    pub d_decay: f64,
    pub iso_level: bool,
    /// Per-level sampling weights; empty means proportional to bin midpoints.
    pub iso_level_probs: Vec<f64>,
    /// Signal budget; `None` means `2 · lambda_insert · max_nodes`.
    pub max_signals: Option<usize>,
}

impl Default for GngParams {
    fn default() -> Self {
        Self {
            max_nodes: 40,
            lambda_insert: 100,
            eps_b: 0.05,
            eps_n: 0.006,
            age_max: 50,
            alpha_split: 0.5,
            d_decay: 0.995,
            iso_level: false,
            iso_level_probs: Vec::new(),
            max_signals: None,
        }
    }
}

impl GngParams {
    pub fn validate(&self) -> Result<(), SimplifyError> {
        if !(0.0 < self.eps_n && self.eps_n <= self.eps_b && self.eps_b < 1.0) {
            return Err(SimplifyError::InvalidParams("need 0 < eps_n <= eps_b < 1".into()));
        }
        if self.max_nodes < 2 {
            return Err(SimplifyError::InvalidParams("max_nodes must be at least 2".into()));
        }
        if self.lambda_insert == 0 {
            return Err(SimplifyError::InvalidParams("lambda_insert must be positive".into()));
        }
        Ok(())
    }
}

/// Sampling distribution over weighted positions.
#[derive(Debug, Clone)]
pub struct IsoField {
    positions: Vec<Point>,
    /// Level of each position.
    pub levels: Vec<usize>,
    dist: Option<WeightedIndex<f64>>,
}

impl IsoField {
    /// `iso = false` samples positions uniformly; otherwise each position is
    /// weighted by `iso_probs[level]` (bin midpoints if `iso_probs` is
    /// `None`).
    pub fn new(field: &[(Point, f64)], iso: bool, iso_probs: Option<&[f64]>) -> Result<Self, SimplifyError> {
        if field.is_empty() {
            return Err(SimplifyError::InvalidParams("empty weight field".into()));
        }
        let (lo, hi) = field
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, w)| (lo.min(w), hi.max(w)));
        let width = (hi - lo) / ISO_LEVELS as f64;
        let levels: Vec<usize> = field
            .iter()
            .map(|&(_, w)| if width > 0.0 { (((w - lo) / width) as usize).min(ISO_LEVELS - 1) } else { 0 })
            .collect();
        let positions = field.iter().map(|&(q, _)| q).collect();
        if !iso {
            return Ok(Self { positions, levels, dist: None });
        }
        let probs: Vec<f64> = match iso_probs {
            Some(probs) => {
                if probs.len() != ISO_LEVELS {
                    return Err(SimplifyError::InvalidParams(format!("expected {ISO_LEVELS} iso-level weights, got {}", probs.len())));
                }
                probs.to_vec()
            }
            None if width > 0.0 => (0..ISO_LEVELS).map(|k| lo + (k as f64 + 0.5) * width).collect(),
            None => vec![1.0; ISO_LEVELS],
        };
        let weights: Vec<f64> = levels.iter().map(|&l| probs[l]).collect();
        let dist = WeightedIndex::new(&weights).map_err(|e| SimplifyError::InvalidParams(format!("iso-level weights: {e}")))?;
        Ok(Self {
            positions,
            levels,
            dist: Some(dist),
        })
    }

    pub fn sample(&self, rng: &mut StageRng) -> Point {
        let i = match &self.dist {
            Some(d) => d.sample(rng),
            None => rng.random_range(0..self.positions.len()),
        };
        self.positions[i]
    }
}

/// Draws one signal position; see [`IsoField::new`].
pub fn sample_signal(field: &[(Point, f64)], iso: bool, iso_probs: &[f64], rng: &mut StageRng) -> Result<Point, SimplifyError> {
    if iso && iso_probs.is_empty() {
        return Err(SimplifyError::InvalidParams("iso-level sampling needs level weights".into()));
    }
    Ok(IsoField::new(field, iso, iso.then_some(iso_probs))?.sample(rng))
}

/// Gas state. Removed units stay in the vectors with `alive = false`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gng {
    pub units: Vec<Point>,
    pub error: Vec<f64>,
    pub alive: Vec<bool>,
    /// Edge ages keyed by `(a, b)` with `a < b`.
    pub edges: BTreeMap<(usize, usize), usize>,
    pub signals: usize,
    params: GngParams,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Gng {
    pub fn new(a: Point, b: Point, params: &GngParams) -> Self {
        let mut edges = BTreeMap::new();
        edges.insert((0, 1), 0);
        Self {
            units: vec![a, b],
            error: vec![0.0, 0.0],
            alive: vec![true, true],
            edges,
            signals: 0,
            params: params.clone(),
        }
    }

    pub fn alive_count(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    pub fn neighbors(&self, u: usize) -> Vec<usize> {
        self.edges
            .keys()
            .filter_map(|&(a, b)| if a == u { Some(b) } else if b == u { Some(a) } else { None })
            .collect()
    }

    fn nearest_two(&self, xi: Point) -> (usize, usize) {
        let mut best = (usize::MAX, f64::INFINITY);
        let mut second = (usize::MAX, f64::INFINITY);
        for (i, u) in self.units.iter().enumerate() {
            if !self.alive[i] {
                continue;
            }
            let d = u.distance(&xi);
            if d < best.1 {
                second = best;
                best = (i, d);
            } else if d < second.1 {
                second = (i, d);
            }
        }
        (best.0, second.0)
    }

    /// One adaptation step for signal `xi`, including a possible insertion
    /// and the global error decay.
    pub fn step(&mut self, xi: Point) {
        let (eps_b, eps_n, age_max) = (self.params.eps_b, self.params.eps_n, self.params.age_max);
        let (s1, s2) = self.nearest_two(xi);
        for ((a, b), age) in self.edges.iter_mut() {
            if *a == s1 || *b == s1 {
                *age += 1;
            }
        }
        let d = self.units[s1].distance(&xi);
        self.error[s1] += d * d;
        let move_towards = |u: &mut Point, rate: f64| {
            u.x += rate * (xi.x - u.x);
            u.y += rate * (xi.y - u.y);
        };
        move_towards(&mut self.units[s1], eps_b);
        for n in self.neighbors(s1) {
            move_towards(&mut self.units[n], eps_n);
        }
        self.edges.insert(key(s1, s2), 0);
        self.edges.retain(|_, age| *age <= age_max);
        for u in 0..self.units.len() {
            if self.alive[u] && self.alive_count() > 2 && self.neighbors(u).is_empty() {
                self.alive[u] = false;
            }
        }
        self.signals += 1;
        if self.signals.is_multiple_of(self.params.lambda_insert) && self.alive_count() < self.params.max_nodes {
            self.insert();
        }
        let decay = self.params.d_decay;
        for e in self.error.iter_mut() {
            *e *= decay;
        }
    }

    fn insert(&mut self) {
        let Some(q) = (0..self.units.len())
            .filter(|&u| self.alive[u])
            .reduce(|a, b| if self.error[b] > self.error[a] { b } else { a })
        else {
            return;
        };
        let Some(f) = self
            .neighbors(q)
            .into_iter()
            .reduce(|a, b| if self.error[b] > self.error[a] { b } else { a })
        else {
            return;
        };
        let r = self.units.len();
        let (uq, uf) = (self.units[q], self.units[f]);
        self.units.push(Point::new((uq.x + uf.x) / 2.0, (uq.y + uf.y) / 2.0));
        self.alive.push(true);
        self.edges.remove(&key(q, f));
        self.edges.insert(key(q, r), 0);
        self.edges.insert(key(r, f), 0);
        self.error[q] *= self.params.alpha_split;
        self.error[f] *= self.params.alpha_split;
        self.error.push(self.error[q]);
    }

    /// Alive units and their edges, renumbered densely.
    pub fn compact(&self) -> (Vec<Point>, Vec<(usize, usize)>) {
        let mut index = vec![usize::MAX; self.units.len()];
        let mut units = Vec::new();
        for (i, u) in self.units.iter().enumerate() {
            if self.alive[i] {
                index[i] = units.len();
                units.push(*u);
            }
        }
        let edges = self.edges.keys().map(|&(a, b)| key(index[a], index[b])).collect();
        (units, edges)
    }
}

fn nearest_node(p: &Problem, candidates: &[NodeId], q: Point) -> NodeId {
    *candidates
        .iter()
        .min_by(|&&a, &&b| p.position(a).distance(&q).total_cmp(&p.position(b).distance(&q)).then(a.cmp(&b)))
        .expect("non-empty candidates")
}

/// Runs the gas over the non-terminal weight field (all nodes if there are
/// no non-terminals), bridges gas components, then snaps every terminal to
/// its nearest gas unit.
pub fn gng_simplify(p: &Problem, params: &GngParams, seed: u64) -> Result<SimplifiedProblem, SimplifyError> {
    params.validate()?;
    let mut sources: Vec<NodeId> = p.steiner_nodes();
    if sources.is_empty() {
        sources = (0..p.node_count()).collect();
    }
    let field: Vec<(Point, f64)> = sources.iter().map(|&v| (p.position(v), p.node(v).weight)).collect();
    let probs = (!params.iso_level_probs.is_empty()).then_some(params.iso_level_probs.as_slice());
    let sampler = IsoField::new(&field, params.iso_level, probs)?;
    let mut rng = stage_rng(seed, "gng", 0);
    let (a, b) = (sampler.sample(&mut rng), sampler.sample(&mut rng));
    let mut gas = Gng::new(a, b, params);
    let budget = params.max_signals.unwrap_or(2 * params.lambda_insert * params.max_nodes);
    for _ in 0..budget {
        gas.step(sampler.sample(&mut rng));
    }
    let (units, mut gas_edges) = gas.compact();
    bridge_components(&units, &mut gas_edges);

    let gas_map: Vec<NodeId> = units.iter().map(|&u| nearest_node(p, &sources, u)).collect();
    let mut nodes: Vec<NodeRecord> = units
        .iter()
        .zip(&gas_map)
        .map(|(u, &src)| NodeRecord::waypoint(u.x, u.y, p.node(src).weight))
        .collect();
    let mut node_map = gas_map;
    let cost = |a: &NodeRecord, b: &NodeRecord| 0.5 * (a.weight + b.weight) * a.position.distance(&b.position);
    let mut edges: Vec<Edge> = gas_edges.iter().map(|&(a, b)| Edge::new(a, b, cost(&nodes[a], &nodes[b]))).collect();
    for &t in p.terminals() {
        let q = p.position(t);
        let g = (0..units.len())
            .min_by(|&a, &b| units[a].distance(&q).total_cmp(&units[b].distance(&q)).then(a.cmp(&b)))
            .expect("gas has units");
        let record = *p.node(t);
        let id = nodes.len();
        edges.push(Edge::new(g, id, cost(&nodes[g], &record)));
        nodes.push(record);
        node_map.push(t);
    }
    let problem = Problem::new(nodes, edges)?.with_meta(p.meta().clone());
    Ok(SimplifiedProblem { problem, node_map })
}
