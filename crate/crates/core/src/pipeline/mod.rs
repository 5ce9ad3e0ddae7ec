//! End-to-end runs: simplify, partition, solve per part, merge, lift and
//! validate; benchmarking sweeps and synthetic instances.

mod bench;
mod config;
mod synthetic;

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::graph::{check_tree_edges, EdgeId, Problem, SteinerTree};
use crate::io::ReportRow;
use crate::partition::{
    greedy_modularity_partition, merge_center_of_mass, merge_sph, resolve_k, spectral_partition, split_subproblems,
    voronoi_partition, MergeStrategy, PartTree, Partition, PartitionError, SpectralParams,
};
use crate::rng::derive_seed;
use crate::simplify::{lift_solution, simplify, SimplifiedProblem, Simplifier};
use crate::solvers::qubo::solve_qubo_detailed;
use crate::solvers::{solve_baseline, solve_ea, solve_exact, solve_physarum, solve_sa, EaParams, PhysarumParams, SaParams, SolverError};

pub use bench::{config_label, improvement_percent, run_benchmark, sweep_configs, Benchmark, BenchmarkSummary, DEFAULT_REPEATS};
pub use config::{ConfigError, PartitionerKind, PipelineConfig, SolverKind};
pub use synthetic::{generate_synthetic_instance, SyntheticKind, SyntheticParams};

/// Wall-clock milliseconds per stage.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct StageTimings {
    pub simplify_ms: f64,
    pub partition_ms: f64,
    pub solve_ms: f64,
    pub merge_ms: f64,
    pub lift_ms: f64,
    pub validate_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageFailure {
    pub stage: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub problem: String,
    pub config: PipelineConfig,
    pub seed: u64,
    /// Cost on the original problem; NaN when a stage failed.
    pub cost: f64,
    /// Whether the final tree is a Steiner tree of the original problem.
    pub valid: bool,
    /// Tree edges in original edge ids.
    pub tree_edges: Vec<EdgeId>,
    pub timings: StageTimings,
    pub simplified_nodes: usize,
    pub simplified_edges: usize,
    pub clusters: usize,
    /// Terminal count of each solved subproblem.
    pub subproblem_terminals: Vec<usize>,
    pub qubo_violations: usize,
    pub failure: Option<StageFailure>,
}

impl PipelineReport {
    pub fn row(&self) -> ReportRow {
        ReportRow {
            problem: self.problem.clone(),
            simplifier: self.config.simplifier.label().into(),
            partitioner: self.config.partitioner.label().into(),
            solver: self.config.solver.label().into(),
            merger: self.config.merger_label().into(),
            cost: self.cost,
            valid: self.valid,
            wall_ms: self.timings.total_ms,
            seed: self.seed,
        }
    }

    /// The report with timings zeroed, for comparisons across runs.
    pub fn without_timings(&self) -> Self {
        Self {
            timings: StageTimings::default(),
            ..self.clone()
        }
    }

    /// Rebuilds the stored tree on `p`.
    pub fn tree(&self, p: &Problem) -> Option<SteinerTree> {
        SteinerTree::from_edges(p, &self.tree_edges).ok()
    }
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1000.0
}

/// Solves `p` with the configured solver family, seeding it with `seed`.
/// Returns the tree and the number of QUBO constraint violations found when
/// decoding (zero for other solvers).
pub fn solve_with(p: &Problem, cfg: &PipelineConfig, seed: u64) -> Result<(SteinerTree, usize), SolverError> {
    let tree = match cfg.solver {
        SolverKind::Baseline => solve_baseline(p)?,
        SolverKind::Exact => solve_exact(p)?,
        SolverKind::Ea => solve_ea(p, &EaParams { seed, ..cfg.ea.clone() })?,
        SolverKind::Sa => solve_sa(p, &SaParams { seed, ..cfg.sa.clone() })?,
        SolverKind::Physarum => solve_physarum(p, &PhysarumParams { seed, ..cfg.physarum.clone() })?,
        SolverKind::Qubo => {
            let mut params = cfg.qubo.clone();
            params.anneal.seed = seed;
            let out = solve_qubo_detailed(p, &params)?;
            return Ok((out.tree, out.decoded.violations.len()));
        }
    };
    Ok((tree, 0))
}

/// Partitions `p` with the configured partitioner.
pub fn partition_with(p: &Problem, cfg: &PipelineConfig, seed: u64) -> Result<Partition, PartitionError> {
    match cfg.partitioner {
        PartitionerKind::None => Ok(Partition::single(p.node_count())),
        PartitionerKind::Gm => Ok(greedy_modularity_partition(p)),
        PartitionerKind::Sc => spectral_partition(p, cfg.k, &SpectralParams { seed, ..cfg.spectral }),
        PartitionerKind::Voronoi => {
            let t = p.terminals().len();
            let k = match cfg.k {
                crate::partition::KMode::Explicit(k) => k,
                mode => resolve_k(p, mode).unwrap_or(t).clamp(1, t.max(1)),
            };
            voronoi_partition(p, k, cfg.voronoi_node_limit.unwrap_or(usize::MAX))
        }
    }
}

struct Failure(&'static str, String);

fn solve_parts(
    work: &Problem,
    cfg: &PipelineConfig,
    partition: &Partition,
    report: &mut PipelineReport,
) -> Result<SteinerTree, Failure> {
    let t = Instant::now();
    let subs = split_subproblems(work, partition);
    report.subproblem_terminals = subs.iter().map(|s| s.problem.terminals().len()).collect();
    let solve_one = |(i, s): (usize, &crate::partition::Subproblem)| {
        solve_with(&s.problem, cfg, derive_seed(cfg.seed, "solve", i as u64)).map(|(tree, v)| (s.lift_tree(work, &tree), v))
    };
    let results: Vec<Result<(PartTree, usize), SolverError>> = if cfg.parallelism == 1 {
        subs.iter().enumerate().map(solve_one).collect()
    } else if cfg.parallelism == 0 {
        subs.par_iter().enumerate().map(solve_one).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.parallelism)
            .build()
            .map_err(|e| Failure("solve", e.to_string()))?;
        pool.install(|| subs.par_iter().enumerate().map(solve_one).collect())
    };
    let mut parts = Vec::with_capacity(results.len());
    for r in results {
        let (part, violations) = r.map_err(|e| Failure("solve", e.to_string()))?;
        report.qubo_violations += violations;
        parts.push(part);
    }
    report.timings.solve_ms = ms(t);

    let t = Instant::now();
    let tree = if parts.len() == 1 && cfg.partitioner == PartitionerKind::None {
        SteinerTree::from_edges(work, &parts[0].edges).map_err(|e| Failure("solve", e.to_string()))?
    } else {
        let merged = match cfg.merger.unwrap_or_default() {
            MergeStrategy::Sph => merge_sph(work, &parts, &cfg.sph),
            MergeStrategy::CenterOfMass => merge_center_of_mass(work, &parts),
        };
        merged.map_err(|e| Failure("merge", e.to_string()))?
    };
    report.timings.merge_ms = ms(t);
    Ok(tree)
}

fn run_stages(p: &Problem, cfg: &PipelineConfig, report: &mut PipelineReport) -> Result<SteinerTree, Failure> {
    let t = Instant::now();
    let sp = if cfg.simplifier == Simplifier::None {
        SimplifiedProblem::identity(p)
    } else {
        simplify(p, cfg.simplifier, &cfg.simplify, derive_seed(cfg.seed, "simplify", 0)).map_err(|e| Failure("simplify", e.to_string()))?
    };
    report.simplified_nodes = sp.problem.node_count();
    report.simplified_edges = sp.problem.edge_count();
    report.timings.simplify_ms = ms(t);

    let t = Instant::now();
    let partition =
        partition_with(&sp.problem, cfg, derive_seed(cfg.seed, "partition", 0)).map_err(|e| Failure("partition", e.to_string()))?;
    report.clusters = partition.k();
    report.timings.partition_ms = ms(t);

    let tree = solve_parts(&sp.problem, cfg, &partition, report)?;

    let t = Instant::now();
    let lifted = if cfg.simplifier == Simplifier::None {
        tree
    } else {
        lift_solution(p, &sp, &tree).map_err(|e| Failure("lift", e.to_string()))?
    };
    report.timings.lift_ms = ms(t);
    Ok(lifted)
}

/// Runs every stage on `p`. Failures are recorded in the report (with
/// `valid = false`) rather than returned.
pub fn run_pipeline(p: &Problem, cfg: &PipelineConfig) -> PipelineReport {
    let start = Instant::now();
    let mut report = PipelineReport {
        problem: p.meta().name.clone(),
        config: cfg.clone(),
        seed: cfg.seed,
        cost: f64::NAN,
        valid: false,
        tree_edges: Vec::new(),
        timings: StageTimings::default(),
        simplified_nodes: p.node_count(),
        simplified_edges: p.edge_count(),
        clusters: 0,
        subproblem_terminals: Vec::new(),
        qubo_violations: 0,
        failure: None,
    };
    match cfg.validate().map_err(|e| Failure("config", e.to_string())).and_then(|_| run_stages(p, cfg, &mut report)) {
        Ok(tree) => {
            let t = Instant::now();
            report.valid = check_tree_edges(p, tree.edges()).is_ok_and(|c| c.is_valid());
            report.cost = tree.cost();
            report.tree_edges = tree.edges().to_vec();
            report.timings.validate_ms = ms(t);
        }
        Err(Failure(stage, message)) => {
            report.failure = Some(StageFailure {
                stage: stage.into(),
                message,
            });
        }
    }
    report.timings.total_ms = ms(start);
    report
}
