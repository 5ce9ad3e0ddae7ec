//! Physarum (slime mould) dynamics: conductivities grow with flux and decay
//! otherwise; low-flux edges are cut until a tree-like network remains.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::SolverError;
use crate::graph::{finalize_tree, repair_tree, EdgeId, NodeId, Problem, SteinerTree, UnionFind};
use crate::rng::{stage_rng, StageRng};

/// Conductivity kept on edges the guard refuses to cut.
pub const GUARD_FLOOR: f64 = 1e-6;
/// Alive-node count above which the pressure system is solved iteratively.
pub const DIRECT_SOLVE_LIMIT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PressureMode {
    /// Terminal values are net current injections (Kirchhoff system).
    #[default]
    Injection,
    /// Terminal pressures are clamped to the same values; interior solved.
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateMode {
    /// Edges alive after the final iteration.
    #[default]
    Final,
    /// Edges alive after any iteration.
    Union,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhysarumParams {
    pub alpha: f64,
    pub mu: f64,
    pub epsilon: f64,
    pub i0: f64,
    pub iterations: usize,
    pub initializations: usize,
    pub seed: u64,
    pub pressure_mode: PressureMode,
    pub candidates: CandidateMode,
    /// Never cut an edge whose removal would disconnect terminals.
    pub guard: bool,
}

impl Default for PhysarumParams {
    fn default() -> Self {
        Self {
            alpha: 0.15,
            mu: 1.0,
            epsilon: 0.001,
            i0: 1.0,
            iterations: 200,
            initializations: 5,
            seed: 0,
            pressure_mode: PressureMode::Injection,
            candidates: CandidateMode::Final,
            guard: true,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PhysarumError {
    #[error("pressure system is singular: sources and sinks are not connected")]
    Singular,
    #[error("need at least two terminals, got {0}")]
    TooFewTerminals(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysarumState {
    pub conductivity: Vec<f64>,
    pub alive: Vec<bool>,
    pub pressure: Vec<f64>,
}

impl PhysarumState {
    pub fn fresh(p: &Problem) -> Self {
        Self {
            conductivity: vec![1.0; p.edge_count()],
            alive: vec![true; p.edge_count()],
            pressure: vec![0.0; p.node_count()],
        }
    }

    pub fn alive_edges(&self) -> Vec<EdgeId> {
        (0..self.alive.len()).filter(|&e| self.alive[e]).collect()
    }
}

/// One row of the optional dynamics trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub initialization: usize,
    pub iteration: usize,
    pub alive_edges: usize,
    pub total_conductivity: f64,
}

pub fn trace_csv(rows: &[TraceRow]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("write to memory");
    }
    w.into_inner().expect("flush to memory")
}

/// Edge lengths used in `D/C`; zero costs are lifted to a small positive
/// floor so zero-cost edges conduct strongly without dividing by zero.
pub fn effective_costs(p: &Problem) -> Vec<f64> {
    let positive: Vec<f64> = p.edges().iter().map(|e| e.cost).filter(|&c| c > 0.0).collect();
    let floor = if positive.is_empty() {
        1.0
    } else {
        1e-6 * positive.iter().sum::<f64>() / positive.len() as f64
    };
    p.edges().iter().map(|e| e.cost.max(floor)).collect()
}

/// Uniform random proper bipartition of the terminals into sources and sinks.
pub fn select_sources_sinks(terminals: &[NodeId], rng: &mut StageRng) -> Result<(Vec<NodeId>, Vec<NodeId>), PhysarumError> {
    if terminals.len() < 2 {
        return Err(PhysarumError::TooFewTerminals(terminals.len()));
    }
    loop {
        let side: Vec<bool> = terminals.iter().map(|_| rng.random_bool(0.5)).collect();
        if side.iter().any(|&s| s) && side.iter().any(|&s| !s) {
            let sources = terminals.iter().zip(&side).filter_map(|(&t, &s)| s.then_some(t)).collect();
            let sinks = terminals.iter().zip(&side).filter_map(|(&t, &s)| (!s).then_some(t)).collect();
            return Ok((sources, sinks));
        }
    }
}

/// Node pressures from `Σ_j (D_ij/C_ij)(P_i − P_j) = b_i` with `b = −i0/n` at
/// the `n` sources and `+i0/m` at the `m` sinks, first sink grounded. Nodes
/// outside the alive component of the first sink get pressure 0.
pub fn physarum_pressures(
    p: &Problem,
    conductivity: &[f64],
    alive: &[bool],
    costs: &[f64],
    sources: &[NodeId],
    sinks: &[NodeId],
    i0: f64,
    mode: PressureMode,
) -> Result<Vec<f64>, PhysarumError> {
    let n = p.node_count();
    let mut uf = UnionFind::new(n);
    for e in 0..p.edge_count() {
        if alive[e] && conductivity[e] > 0.0 {
            uf.union(p.edge(e).u, p.edge(e).v);
        }
    }
    let ground = sinks[0];
    let root = uf.find(ground);
    if sources.iter().chain(sinks).any(|&t| uf.find(t) != root) {
        return Err(PhysarumError::Singular);
    }
    let (src_b, sink_b) = (-i0 / sources.len() as f64, i0 / sinks.len() as f64);
    let mut fixed: Vec<Option<f64>> = vec![None; n];
    let mut rhs_full = vec![0.0; n];
    match mode {
        PressureMode::Injection => {
            for &s in sources {
                rhs_full[s] = src_b;
            }
            for &t in sinks {
                rhs_full[t] = sink_b;
            }
            fixed[ground] = Some(0.0);
        }
        PressureMode::Dirichlet => {
            for &s in sources {
                fixed[s] = Some(src_b);
            }
            for &t in sinks {
                fixed[t] = Some(sink_b);
            }
        }
    }
    let mut index = vec![usize::MAX; n];
    let mut unknowns = Vec::new();
    for v in 0..n {
        if uf.find(v) == root && fixed[v].is_none() {
            index[v] = unknowns.len();
            unknowns.push(v);
        }
    }
    let mut pressure: Vec<f64> = fixed.iter().map(|f| f.unwrap_or(0.0)).collect();
    if unknowns.is_empty() {
        return Ok(pressure);
    }
    let m = unknowns.len();
    let mut diag = vec![0.0; m];
    let mut off: Vec<(usize, usize, f64)> = Vec::new();
    let mut rhs: Vec<f64> = unknowns.iter().map(|&v| rhs_full[v]).collect();
    for e in 0..p.edge_count() {
        if !alive[e] || conductivity[e] <= 0.0 {
            continue;
        }
        let edge = p.edge(e);
        if uf.find(edge.u) != root {
            continue;
        }
        let g = conductivity[e] / costs[e];
        let (iu, iv) = (index[edge.u], index[edge.v]);
        if iu != usize::MAX {
            diag[iu] += g;
            match fixed[edge.v] {
                Some(pv) => rhs[iu] += g * pv,
                None => off.push((iu, iv, g)),
            }
        }
        if iv != usize::MAX {
            diag[iv] += g;
            if let Some(pu) = fixed[edge.u] {
                rhs[iv] += g * pu;
            }
        }
    }
    let solution = if m <= DIRECT_SOLVE_LIMIT {
        let mut a = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            a[(i, i)] = diag[i];
        }
        for &(i, j, g) in &off {
            a[(i, j)] -= g;
            a[(j, i)] -= g;
        }
        let b = DVector::from_vec(rhs);
        match a.clone().cholesky() {
            Some(ch) => ch.solve(&b),
            None => a.lu().solve(&b).ok_or(PhysarumError::Singular)?,
        }
        .iter()
        .copied()
        .collect::<Vec<f64>>()
    } else {
        conjugate_gradient(&diag, &off, &rhs, 1e-10)
    };
    for (k, &v) in unknowns.iter().enumerate() {
        pressure[v] = solution[k];
    }
    Ok(pressure)
}

/// Jacobi-preconditioned CG for `(diag − off) x = b` with symmetric `off`.
fn conjugate_gradient(diag: &[f64], off: &[(usize, usize, f64)], b: &[f64], tol: f64) -> Vec<f64> {
    let m = diag.len();
    let apply = |x: &[f64], out: &mut [f64]| {
        for i in 0..m {
            out[i] = diag[i] * x[i];
        }
        for &(i, j, g) in off {
            out[i] -= g * x[j];
            out[j] -= g * x[i];
        }
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut x = vec![0.0; m];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(ri, d)| ri / d).collect();
    let mut dir = z.clone();
    let mut rz = dot(&r, &z);
    let bnorm = dot(b, b).sqrt().max(f64::MIN_POSITIVE);
    let mut ad = vec![0.0; m];
    for _ in 0..10 * m.max(100) {
        if dot(&r, &r).sqrt() <= tol * bnorm {
            break;
        }
        apply(&dir, &mut ad);
        let step = rz / dot(&dir, &ad);
        for i in 0..m {
            x[i] += step * dir[i];
            r[i] -= step * ad[i];
        }
        for i in 0..m {
            z[i] = r[i] / diag[i];
        }
        let rz_next = dot(&r, &z);
        let ratio = rz_next / rz;
        rz = rz_next;
        for i in 0..m {
            dir[i] = z[i] + ratio * dir[i];
        }
    }
    x
}

/// Signed flux `Q_ij = (D_ij/C_ij)(P_i − P_j)` per edge (`i = u`, `j = v`).
pub fn fluxes(p: &Problem, state: &PhysarumState, costs: &[f64]) -> Vec<f64> {
    (0..p.edge_count())
        .map(|e| {
            if !state.alive[e] {
                return 0.0;
            }
            let edge = p.edge(e);
            state.conductivity[e] / costs[e] * (state.pressure[edge.u] - state.pressure[edge.v])
        })
        .collect()
}

fn terminals_connected(p: &Problem, alive: &[bool]) -> bool {
    let mut uf = UnionFind::new(p.node_count());
    for e in 0..p.edge_count() {
        if alive[e] {
            uf.union(p.edge(e).u, p.edge(e).v);
        }
    }
    let t = p.terminals();
    let r = uf.find(t[0]);
    t.iter().all(|&x| uf.find(x) == r)
}

/// Updates conductivities from the fluxes of `state.pressure` and cuts edges
/// whose |Q| fell below ε. With the guard on, a cut that would separate
/// terminals is skipped (cuts are tried in ascending |Q|) and the edge keeps
/// at least [`GUARD_FLOOR`] conductivity.
pub fn physarum_step(p: &Problem, state: &mut PhysarumState, costs: &[f64], params: &PhysarumParams) {
    let q = fluxes(p, state, costs);
    let mut candidates = Vec::new();
    for e in 0..p.edge_count() {
        if !state.alive[e] {
            continue;
        }
        let d = state.conductivity[e] + params.alpha * q[e].abs() - params.mu * state.conductivity[e];
        state.conductivity[e] = d.max(0.0);
        if q[e].abs() < params.epsilon {
            candidates.push(e);
        }
    }
    if candidates.is_empty() {
        return;
    }
    let cut = |state: &mut PhysarumState, e: EdgeId| {
        state.alive[e] = false;
        state.conductivity[e] = 0.0;
    };
    if !params.guard {
        for e in candidates {
            cut(state, e);
        }
        return;
    }
    let mut trial = state.alive.clone();
    for &e in &candidates {
        trial[e] = false;
    }
    if terminals_connected(p, &trial) {
        for e in candidates {
            cut(state, e);
        }
        return;
    }
    candidates.sort_by(|&a, &b| q[a].abs().total_cmp(&q[b].abs()).then(a.cmp(&b)));
    for e in candidates {
        state.alive[e] = false;
        if terminals_connected(p, &state.alive) {
            state.conductivity[e] = 0.0;
        } else {
            state.alive[e] = true;
            state.conductivity[e] = state.conductivity[e].max(GUARD_FLOOR);
        }
    }
}

/// Outcome of one initialization of the dynamics.
#[derive(Debug, Clone)]
pub struct Dynamics {
    pub state: PhysarumState,
    /// Edges alive after any iteration.
    pub ever_alive: Vec<bool>,
    pub trace: Vec<TraceRow>,
    /// True if a singular pressure system stopped the run early.
    pub stalled: bool,
}

/// Runs `params.iterations` rounds of (resample sources/sinks, solve
/// pressures, step) from a fresh state.
pub fn run_dynamics(p: &Problem, params: &PhysarumParams, rng: &mut StageRng, init: usize, trace: bool) -> Result<Dynamics, PhysarumError> {
    let costs = effective_costs(p);
    let mut state = PhysarumState::fresh(p);
    let mut ever_alive = vec![false; p.edge_count()];
    let mut rows = Vec::new();
    let mut stalled = false;
    for it in 0..params.iterations {
        let (sources, sinks) = select_sources_sinks(p.terminals(), rng)?;
        match physarum_pressures(
            p,
            &state.conductivity,
            &state.alive,
            &costs,
            &sources,
            &sinks,
            params.i0,
            params.pressure_mode,
        ) {
            Ok(pr) => state.pressure = pr,
            Err(PhysarumError::Singular) => {
                stalled = true;
                break;
            }
            Err(e) => return Err(e),
        }
        physarum_step(p, &mut state, &costs, params);
        for (seen, &a) in ever_alive.iter_mut().zip(&state.alive) {
            *seen |= a;
        }
        if trace {
            rows.push(TraceRow {
                initialization: init,
                iteration: it,
                alive_edges: state.alive.iter().filter(|&&a| a).count(),
                total_conductivity: state.conductivity.iter().sum(),
            });
        }
    }
    Ok(Dynamics {
        state,
        ever_alive,
        trace: rows,
        stalled,
    })
}

#[derive(Debug, Clone)]
pub struct PhysarumOutcome {
    pub tree: SteinerTree,
    pub trace: Vec<TraceRow>,
}

/// Best of `initializations` independent runs, each finalized by MST and
/// pruning of its candidate edges.
pub fn solve_physarum(p: &Problem, params: &PhysarumParams) -> Result<SteinerTree, SolverError> {
    Ok(solve_physarum_traced(p, params, false)?.tree)
}

pub fn solve_physarum_traced(p: &Problem, params: &PhysarumParams, trace: bool) -> Result<PhysarumOutcome, SolverError> {
    if p.terminals().len() < 2 {
        return Ok(PhysarumOutcome {
            tree: finalize_tree(p, &[])?,
            trace: Vec::new(),
        });
    }
    let runs: Vec<Result<(SteinerTree, Vec<TraceRow>), SolverError>> = (0..params.initializations.max(1))
        .into_par_iter()
        .map(|i| {
            let mut rng = stage_rng(params.seed, "physarum-init", i as u64);
            let dynamics = run_dynamics(p, params, &mut rng, i, trace)?;
            let alive = match params.candidates {
                CandidateMode::Final => &dynamics.state.alive,
                CandidateMode::Union => &dynamics.ever_alive,
            };
            let edges: Vec<EdgeId> = (0..alive.len()).filter(|&e| alive[e]).collect();
            let tree = match finalize_tree(p, &edges) {
                Ok(t) => t,
                Err(_) => repair_tree(p, &edges)?,
            };
            Ok((tree, dynamics.trace))
        })
        .collect();
    let mut best: Option<SteinerTree> = None;
    let mut rows = Vec::new();
    for run in runs {
        let (tree, trace_rows) = run?;
        rows.extend(trace_rows);
        if best.as_ref().is_none_or(|b| tree.cost() < b.cost()) {
            best = Some(tree);
        }
    }
    Ok(PhysarumOutcome {
        tree: best.expect("at least one initialization"),
        trace: rows,
    })
}
