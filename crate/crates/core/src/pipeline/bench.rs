use rayon::prelude::*;
use serde::Serialize;

use super::{run_pipeline, PartitionerKind, PipelineConfig, PipelineReport, SolverKind};
use crate::graph::Problem;
use crate::partition::MergeStrategy;
use crate::rng::derive_seed;
use crate::simplify::Simplifier;
use crate::solvers::solve_baseline;

/// Repeats per configuration when none are requested.
pub const DEFAULT_REPEATS: usize = 5;

/// `100 · (best − baseline) / baseline`; negative means `best` is cheaper.
pub fn improvement_percent(best: f64, baseline: f64) -> f64 {
    100.0 * (best - baseline) / baseline
}

/// `simplifier+partitioner+solver[+merger]`.
pub fn config_label(cfg: &PipelineConfig) -> String {
    let mut s = format!("{}+{}+{}", cfg.simplifier.label(), cfg.partitioner.label(), cfg.solver.label());
    let m = cfg.merger_label();
    if !m.is_empty() {
        s.push('+');
        s.push_str(m);
    }
    s
}

/// Every simplifier × partitioner × solver × merger combination built on
/// `base`. Unpartitioned runs take no merger, so they appear once.
pub fn sweep_configs(base: &PipelineConfig, solvers: &[SolverKind]) -> Vec<PipelineConfig> {
    let mut out = Vec::new();
    for simplifier in Simplifier::ALL {
        for partitioner in PartitionerKind::ALL {
            for &solver in solvers {
                let mergers: &[Option<MergeStrategy>] = if partitioner == PartitionerKind::None {
                    &[None]
                } else {
                    &[Some(MergeStrategy::Sph), Some(MergeStrategy::CenterOfMass)]
                };
                for &merger in mergers {
                    out.push(PipelineConfig {
                        simplifier,
                        partitioner,
                        solver,
                        merger,
                        ..base.clone()
                    });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkSummary {
    pub problem: String,
    pub best_config: String,
    pub best_cost: f64,
    pub best_seed: u64,
    pub baseline_cost: f64,
    pub improvement_percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Benchmark {
    /// Ordered by (problem, config, repeat).
    pub reports: Vec<PipelineReport>,
    pub summary: Vec<BenchmarkSummary>,
}

/// Runs every configuration `repeats` times on every problem. Repeat `r`
/// of a configuration uses the seed derived from its own seed and `r`. The
/// summary names the cheapest valid run per problem and compares it with
/// the plain baseline.
pub fn run_benchmark(problems: &[Problem], configs: &[PipelineConfig], repeats: usize) -> Benchmark {
    let jobs: Vec<(usize, PipelineConfig)> = problems
        .iter()
        .enumerate()
        .flat_map(|(pi, _)| {
            configs.iter().flat_map(move |cfg| {
                (0..repeats.max(1)).map(move |r| {
                    (
                        pi,
                        PipelineConfig {
                            seed: derive_seed(cfg.seed, "bench", r as u64),
                            ..cfg.clone()
                        },
                    )
                })
            })
        })
        .collect();
    let reports: Vec<PipelineReport> = jobs.par_iter().map(|(pi, cfg)| run_pipeline(&problems[*pi], cfg)).collect();
    let per_problem = configs.len() * repeats.max(1);
    let summary = problems
        .iter()
        .enumerate()
        .map(|(pi, p)| {
            let baseline_cost = solve_baseline(p).map(|t| t.cost()).unwrap_or(f64::NAN);
            let runs = &reports[pi * per_problem..(pi + 1) * per_problem];
            let best = runs
                .iter()
                .filter(|r| r.valid)
                .reduce(|a, b| if b.cost < a.cost { b } else { a });
            match best {
                Some(b) => BenchmarkSummary {
                    problem: p.meta().name.clone(),
                    best_config: config_label(&b.config),
                    best_cost: b.cost,
                    best_seed: b.seed,
                    baseline_cost,
                    improvement_percent: improvement_percent(b.cost, baseline_cost),
                },
                None => BenchmarkSummary {
                    problem: p.meta().name.clone(),
                    best_config: String::new(),
                    best_cost: f64::NAN,
                    best_seed: 0,
                    baseline_cost,
                    improvement_percent: f64::NAN,
                },
            }
        })
        .collect();
    Benchmark { reports, summary }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::fixtures::two_cliques;

    #[test]
    fn improvement_sign_and_value() {
        assert!((improvement_percent(162.0, 164.0) + 1.219_512_195_121_951).abs() < 1e-12);
        assert_eq!(improvement_percent(5.0, 5.0), 0.0);
    }

    #[test]
    fn baseline_only_benchmark_improves_by_zero() {
        let p = two_cliques(4, 4, &[0, 5]);
        let b = run_benchmark(std::slice::from_ref(&p), &[PipelineConfig::default()], 1);
        assert_eq!(b.reports.len(), 1);
        assert_eq!(b.summary[0].best_config, "none+none+baseline");
        assert_eq!(b.summary[0].improvement_percent, 0.0);
    }

    #[test]
    fn repeats_get_distinct_seeds() {
        let p = two_cliques(4, 4, &[0, 1, 5]);
        let cfg = PipelineConfig {
            solver: SolverKind::Sa,
            ..Default::default()
        };
        let b = run_benchmark(&[p], &[cfg], 3);
        let seeds: std::collections::BTreeSet<u64> = b.reports.iter().map(|r| r.seed).collect();
        assert_eq!(seeds.len(), 3);
    }

    #[test]
    fn sweep_dedupes_the_merger_for_unpartitioned_runs() {
        let all = [SolverKind::Baseline, SolverKind::Ea, SolverKind::Sa, SolverKind::Physarum, SolverKind::Qubo];
        let configs = sweep_configs(&PipelineConfig::default(), &all);
        assert_eq!(configs.len(), 4 * (1 + 3 * 2) * 5);
        assert!(configs.iter().all(|c| c.validate().is_ok()));
        let labels: std::collections::BTreeSet<String> = configs.iter().map(config_label).collect();
        assert_eq!(labels.len(), configs.len());
    }
}
