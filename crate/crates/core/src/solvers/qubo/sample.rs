use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Qubo, QuboError};
use crate::rng::stage_rng;

/// Largest model [`exhaustive_qubo_min`] will enumerate.
pub const EXHAUSTIVE_GUARD: usize = 24;

/// Energies closer than this (relative to the coefficient scale) tie.
const TIE_EPS: f64 = 1e-9;

fn scale(q: &Qubo) -> f64 {
    let lin = q.linear.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let quad = q.quadratic.values().map(|v| v.abs()).fold(0.0, f64::max);
    1.0 + lin.max(quad)
}

fn lex_less(a: &[bool], b: &[bool]) -> bool {
    a < b
}

/// Exact ground state by Gray-code enumeration. Ties resolve to the
/// lexicographically smallest assignment (variable 0 most significant,
/// `false < true`). The returned energy is recomputed from scratch.
pub fn exhaustive_qubo_min(q: &Qubo) -> Result<(Vec<bool>, f64), QuboError> {
    let n = q.n_vars();
    if n > EXHAUSTIVE_GUARD {
        return Err(QuboError::GuardExceeded {
            n_vars: n,
            limit: EXHAUSTIVE_GUARD,
        });
    }
    let adj = q.adjacency();
    let eps = TIE_EPS * scale(q);
    let mut x = vec![false; n];
    let mut field = q.linear.clone();
    let mut e = q.offset;
    let mut best = x.clone();
    let mut best_e = e;
    for k in 1u64..(1u64 << n) {
        let i = k.trailing_zeros() as usize;
        let on = !x[i];
        e += if on { field[i] } else { -field[i] };
        x[i] = on;
        let sign = if on { 1.0 } else { -1.0 };
        for &(j, w) in &adj[i] {
            field[j] += sign * w;
        }
        if e < best_e - eps || (e <= best_e + eps && lex_less(&x, &best)) {
            best.copy_from_slice(&x);
            best_e = e;
        }
    }
    let exact = q.energy(&best);
    Ok((best, exact))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerParams {
    pub sweeps: usize,
    pub restarts: usize,
    /// `(hot, cold)` inverse temperatures; `None` derives them from the
    /// coefficients.
    pub beta_range: Option<(f64, f64)>,
    pub seed: u64,
}

impl Default for SamplerParams {
    fn default() -> Self {
        Self {
            sweeps: 500,
            restarts: 4,
            beta_range: None,
            seed: 0,
        }
    }
}

/// Hot end accepts the largest single-flip uphill move with probability
/// 1/2; cold end accepts the smallest one with probability 1/100.
fn auto_beta(q: &Qubo, adj: &[Vec<(usize, f64)>]) -> (f64, f64) {
    let mut max_delta: f64 = 0.0;
    let mut min_delta = f64::INFINITY;
    for i in 0..q.n_vars() {
        let span = q.linear[i].abs() + adj[i].iter().map(|(_, w)| w.abs()).sum::<f64>();
        max_delta = max_delta.max(span);
        if q.linear[i].abs() > 0.0 {
            min_delta = min_delta.min(q.linear[i].abs());
        }
        for &(_, w) in &adj[i] {
            min_delta = min_delta.min(w.abs());
        }
    }
    if max_delta == 0.0 {
        return (1.0, 1.0);
    }
    if !min_delta.is_finite() {
        min_delta = max_delta;
    }
    (2f64.ln() / max_delta, 100f64.ln() / min_delta)
}

fn anneal(q: &Qubo, adj: &[Vec<(usize, f64)>], betas: (f64, f64), sweeps: usize, seed: u64, restart: usize) -> (Vec<bool>, f64) {
    let n = q.n_vars();
    let mut rng = stage_rng(seed, "qubo-restart", restart as u64);
    let mut x: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    let mut field = q.linear.clone();
    for i in 0..n {
        if x[i] {
            for &(j, w) in &adj[i] {
                field[j] += w;
            }
        }
    }
    let mut e = q.energy(&x);
    let mut best = x.clone();
    let mut best_e = e;
    let (hot, cold) = betas;
    let ratio = if sweeps > 1 { (cold / hot).powf(1.0 / (sweeps - 1) as f64) } else { 1.0 };
    let mut beta = hot;
    for _ in 0..sweeps {
        for i in 0..n {
            let delta = if x[i] { -field[i] } else { field[i] };
            if delta <= 0.0 || rng.random::<f64>() < (-beta * delta).exp() {
                x[i] = !x[i];
                e += delta;
                let sign = if x[i] { 1.0 } else { -1.0 };
                for &(j, w) in &adj[i] {
                    field[j] += sign * w;
                }
                if e < best_e {
                    best.copy_from_slice(&x);
                    best_e = e;
                }
            }
        }
        beta *= ratio;
    }
    let exact = q.energy(&best);
    (best, exact)
}

/// Single-flip Metropolis annealing with a geometric inverse-temperature
/// ramp. Restarts run in parallel with seeds derived per restart; the best
/// visited assignment wins (ties to the lowest restart index).
pub fn sample_qubo_sa(q: &Qubo, params: &SamplerParams) -> (Vec<bool>, f64) {
    let adj = q.adjacency();
    let betas = params.beta_range.unwrap_or_else(|| auto_beta(q, &adj));
    let runs: Vec<(Vec<bool>, f64)> = (0..params.restarts.max(1))
        .into_par_iter()
        .map(|r| anneal(q, &adj, betas, params.sweeps, params.seed, r))
        .collect();
    runs.into_iter()
        .reduce(|a, b| if b.1 < a.1 { b } else { a })
        .expect("at least one restart")
}
