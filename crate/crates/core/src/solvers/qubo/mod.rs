//! Depth-indexed QUBO formulation of the Steiner tree problem, an exhaustive
//! minimizer for tiny models, a classical annealing sampler, decoding and
//! component repair. The term list is documented in `docs/qubo-encoding.md`.

mod build;
mod decode;
mod sample;

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeId, NodeId};

pub use build::{build_stp_qubo, default_max_depth, QuboBuildParams};
pub use decode::{decode_assignment, repair_components, solve_qubo, solve_qubo_detailed, Decoded, QuboOutcome, QuboParams, QuboViolation, SamplerChoice};
pub use sample::{exhaustive_qubo_min, sample_qubo_sa, SamplerParams, EXHAUSTIVE_GUARD};

#[derive(Debug, Error, PartialEq)]
pub enum QuboError {
    #[error("{n_vars} variables exceed the exhaustive guard of {limit}")]
    GuardExceeded { n_vars: usize, limit: usize },
    #[error("penalty {penalty_a} does not dominate cost weight × largest edge cost ({bound})")]
    WeakPenalty { penalty_a: f64, bound: f64 },
    #[error("problem has no terminals")]
    NoTerminals,
    #[error("max_depth must be at least 1")]
    ZeroDepth,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Meaning of a binary variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarTag {
    /// Terminal `node` is the root (its depth-0 slot).
    Root { node: NodeId },
    /// `node` sits at `depth >= 1`.
    NodeDepth { node: NodeId, depth: usize },
    /// Non-terminal `node` is not in the tree.
    Absent { node: NodeId },
    /// Edge used from `from` (depth − 1) to `to` (depth).
    EdgeDepth { edge: EdgeId, from: NodeId, to: NodeId, depth: usize },
    /// Edge is part of the tree.
    EdgeUsed { edge: EdgeId },
}

/// `offset + Σ linear_i x_i + Σ_{i<j} quadratic_ij x_i x_j` over binary x.
#[derive(Debug, Clone, PartialEq)]
pub struct Qubo {
    pub linear: Vec<f64>,
    pub quadratic: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
    pub var_map: Vec<VarTag>,
    pub max_depth: usize,
    pub penalty_a: f64,
    pub cost_b: f64,
}

impl Qubo {
    pub fn new(n_vars: usize) -> Self {
        Self {
            linear: vec![0.0; n_vars],
            quadratic: BTreeMap::new(),
            offset: 0.0,
            var_map: Vec::new(),
            max_depth: 0,
            penalty_a: 0.0,
            cost_b: 0.0,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.linear.len()
    }

    pub fn add_linear(&mut self, i: usize, v: f64) {
        self.linear[i] += v;
    }

    /// Adds `v·x_i·x_j`; `i == j` folds into the linear term.
    pub fn add_quadratic(&mut self, i: usize, j: usize, v: f64) {
        if i == j {
            self.linear[i] += v;
        } else {
            *self.quadratic.entry((i.min(j), i.max(j))).or_default() += v;
        }
    }

    /// Adds `weight·(Σ c_k x_k + constant)²`.
    pub fn add_square(&mut self, terms: &[(usize, f64)], constant: f64, weight: f64) {
        for (a, &(i, ci)) in terms.iter().enumerate() {
            self.add_linear(i, weight * (ci * ci + 2.0 * constant * ci));
            for &(j, cj) in &terms[a + 1..] {
                self.add_quadratic(i, j, 2.0 * weight * ci * cj);
            }
        }
        self.offset += weight * constant * constant;
    }

    pub fn energy(&self, x: &[bool]) -> f64 {
        let mut e = self.offset;
        for (i, &l) in self.linear.iter().enumerate() {
            if x[i] {
                e += l;
            }
        }
        for (&(i, j), &q) in &self.quadratic {
            if x[i] && x[j] {
                e += q;
            }
        }
        e
    }

    /// Symmetric neighbor lists `(j, J_ij)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.n_vars()];
        for (&(i, j), &q) in &self.quadratic {
            if q != 0.0 {
                adj[i].push((j, q));
                adj[j].push((i, q));
            }
        }
        adj
    }

    /// Plain-text coordinate list: `i j value` per line, linear terms as
    /// `i i value`, preceded by a comment line carrying the constant offset.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# offset {}", self.offset);
        for (i, &l) in self.linear.iter().enumerate() {
            if l != 0.0 {
                let _ = writeln!(s, "{i} {i} {l}");
            }
        }
        for (&(i, j), &q) in &self.quadratic {
            if q != 0.0 {
                let _ = writeln!(s, "{i} {j} {q}");
            }
        }
        s
    }
}

/// Logical qubit estimate `|V|·((|V|+1) + 4 + 2|E|)/2 + |E|`.
pub fn qubit_count(v: u64, e: u64) -> u64 {
    v * ((v + 1) + 4 + 2 * e) / 2 + e
}

/// Parses one assignment per line (`0`/`1` characters, whitespace ignored;
/// blank lines and `#` comments skipped).
pub fn parse_assignments(text: &str, n_vars: usize) -> Result<Vec<Vec<bool>>, QuboError> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bits: Result<Vec<bool>, QuboError> = line
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(QuboError::Parse {
                    line: no + 1,
                    message: format!("unexpected character {other:?}"),
                }),
            })
            .collect();
        let bits = bits?;
        if bits.len() != n_vars {
            return Err(QuboError::Parse {
                line: no + 1,
                message: format!("expected {n_vars} bits, found {}", bits.len()),
            });
        }
        out.push(bits);
    }
    Ok(out)
}
