//! Acceptance suite: one check per criterion, each printed as a PASS/FAIL
//! line with its measured value, pinned tolerance and wall-clock budget.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

mod common;

use std::time::{Duration, Instant};

use common::{dreyfus_wagner, floyd_warshall, for_each_set_partition, modularity_by_definition, random_instance};
use rand::Rng;
use steiner_core::graph::{check_tree_edges, Problem, SteinerTree};
use steiner_core::partition::{
    educated_guess_k, greedy_modularity_partition, modularity, spectral_partition, voronoi_partition, KMode, MergeStrategy,
    Partition, SpectralParams,
};
use steiner_core::pipeline::{
    generate_synthetic_instance, run_benchmark, run_pipeline, sweep_configs, PartitionerKind, PipelineConfig, SolverKind,
    SyntheticKind, SyntheticParams,
};
use steiner_core::rng::{derive_seed, rng_from_seed};
use steiner_core::simplify::{simplify, Simplifier, SimplifyParams};
use steiner_core::solvers::qubo::{
    build_stp_qubo, decode_assignment, exhaustive_qubo_min, qubit_count, sample_qubo_sa, QuboBuildParams, SamplerChoice,
    SamplerParams,
};
use steiner_core::solvers::{
    sa_accept, solve_baseline, solve_ea, solve_exact, solve_physarum, solve_qubo, solve_sa, EaParams, PhysarumParams, QuboParams,
    SaParams,
};

const MASTER_SEED: u64 = 20_240_601;
/// Absolute tolerance for cost equalities.
const COST_TOL: f64 = 1e-9;

// 1. Qubit count.
const QUBIT_V: u64 = 158;
const QUBIT_E: u64 = 458;
const QUBIT_EXPECTED: u64 = 85_699;
const QUBIT_BUDGET: Duration = Duration::from_millis(1);

// 2. Approximation bound.
const APPROX_INSTANCES: usize = 200;
const APPROX_MAX_NODES: usize = 10;
const APPROX_TERMINALS: (usize, usize) = (2, 5);
const APPROX_BUDGET: Duration = Duration::from_secs(30);

// 3. QUBO oracle agreement.
const QUBO_INSTANCES: usize = 20;
const QUBO_NODES: [usize; 2] = [3, 4];
const QUBO_MAX_VARS: usize = 24;
const QUBO_BUDGET: Duration = Duration::from_secs(120);

// 4. Physarum with two terminals.
const PHYSARUM_INSTANCES: usize = 50;
const PHYSARUM_MAX_NODES: usize = 10;
const PHYSARUM_ITERATIONS: usize = 200;
const PHYSARUM_INITS: usize = 3;
const PHYSARUM_MIN_OPTIMAL_RATE: f64 = 0.90;
const PHYSARUM_BUDGET: Duration = Duration::from_secs(120);

// 5. Metropolis statistics.
const SA_TRIALS: usize = 10_000;
const SA_TARGET: f64 = 0.5;
const SA_TOL: f64 = 0.02;
const SA_BUDGET: Duration = Duration::from_secs(1);

// 6. Modularity.
const MODULARITY_GRAPHS: usize = 5;
const MODULARITY_MAX_NODES: usize = 7;
const MODULARITY_TOL: f64 = 1e-12;
const BLOB_SIZE_EXHAUSTIVE: usize = 4;
const BLOB_SIZE: usize = 12;
const MODULARITY_BUDGET: Duration = Duration::from_secs(60);

// 8. Pipeline sweep.
const SWEEP_CLUSTER_SIZE: usize = 40;
const SWEEP_BUDGET: Duration = Duration::from_secs(15 * 60);

// 9. EA seeded dominance.
const EA_INSTANCES: usize = 50;
const EA_BUDGET: Duration = Duration::from_secs(5 * 60);

// 10. Determinism.
const DETERMINISM_BUDGET: Duration = Duration::from_secs(5 * 60);

struct Outcome {
    id: usize,
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
    budget: Duration,
}

fn run(id: usize, name: &'static str, budget: Duration, check: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (ok, detail) = check();
    let elapsed = start.elapsed();
    let outcome = Outcome {
        id,
        name,
        pass: ok && elapsed <= budget,
        detail,
        elapsed,
        budget,
    };
    println!(
        "criterion {:>2} [{}] {}: {} ({:.3} s, budget {:.3} s)",
        outcome.id,
        if outcome.pass { "PASS" } else { "FAIL" },
        outcome.name,
        outcome.detail,
        outcome.elapsed.as_secs_f64(),
        outcome.budget.as_secs_f64()
    );
    outcome
}

fn is_valid(p: &Problem, t: &SteinerTree) -> bool {
    check_tree_edges(p, t.edges()).is_ok_and(|c| c.is_valid())
}

fn qubit_formula() -> (bool, String) {
    let got = qubit_count(QUBIT_V, QUBIT_E);
    (got == QUBIT_EXPECTED, format!("qubit_count({QUBIT_V}, {QUBIT_E}) = {got}, expected {QUBIT_EXPECTED}"))
}

fn approximation_bound() -> (bool, String) {
    let mut rng = rng_from_seed(derive_seed(MASTER_SEED, "approx", 0));
    let mut worst_ratio: f64 = 0.0;
    let mut failures = Vec::new();
    for i in 0..APPROX_INSTANCES {
        let n = rng.random_range(APPROX_TERMINALS.1..=APPROX_MAX_NODES);
        let t = rng.random_range(APPROX_TERMINALS.0..=APPROX_TERMINALS.1);
        let p = random_instance(derive_seed(MASTER_SEED, "approx-instance", i as u64), n, t, 0.3);
        let oracle = dreyfus_wagner(&p);
        let exact = solve_exact(&p).expect("within guard");
        let base = solve_baseline(&p).expect("connected");
        let factor = 2.0 - 2.0 / t as f64;
        worst_ratio = worst_ratio.max(base.cost() / exact.cost() / factor);
        if (exact.cost() - oracle).abs() > COST_TOL || base.cost() > factor * exact.cost() + COST_TOL || !is_valid(&p, &base) {
            failures.push(i);
        }
    }
    (
        failures.is_empty(),
        format!(
            "{} instances, exact = Dreyfus-Wagner and baseline <= (2-2/t)*exact on all but {:?}; worst baseline/(bound) = {worst_ratio:.4}",
            APPROX_INSTANCES, failures
        ),
    )
}

fn qubo_oracle() -> (bool, String) {
    let mut accepted = 0;
    let mut attempts = 0;
    let mut failures = Vec::new();
    let mut rng = rng_from_seed(derive_seed(MASTER_SEED, "qubo", 0));
    while accepted < QUBO_INSTANCES && attempts < 10_000 {
        attempts += 1;
        let n = QUBO_NODES[attempts % QUBO_NODES.len()];
        let t = rng.random_range(2..=n);
        let p = random_instance(derive_seed(MASTER_SEED, "qubo-instance", attempts as u64), n, t, 0.5);
        let params = QuboBuildParams {
            max_depth: Some(n - 1),
            ..Default::default()
        };
        let q = build_stp_qubo(&p, &params).expect("buildable");
        if q.n_vars() > QUBO_MAX_VARS {
            continue;
        }
        accepted += 1;
        let (x, _) = exhaustive_qubo_min(&q).expect("within guard");
        let decoded = decode_assignment(&q, &p, &x);
        let cost = SteinerTree::from_edges(&p, &decoded.edges).map(|t| (t.cost(), is_valid(&p, &t)));
        let exact = solve_exact(&p).expect("tiny").cost();
        let ok = decoded.violations.is_empty()
            && matches!(cost, Ok((c, true)) if (c - exact).abs() <= COST_TOL && (c - dreyfus_wagner(&p)).abs() <= COST_TOL);
        if !ok {
            failures.push(attempts);
        }
    }
    (
        accepted == QUBO_INSTANCES && failures.is_empty(),
        format!(
            "{accepted} instances with |V| in {QUBO_NODES:?}, D = |V|-1, <= {QUBO_MAX_VARS} vars ({attempts} drawn); zero violations and cost = exact within {COST_TOL:e}; mismatches {failures:?}"
        ),
    )
}

fn physarum_two_terminals() -> (bool, String) {
    let mut rng = rng_from_seed(derive_seed(MASTER_SEED, "physarum", 0));
    let (mut optimal, mut valid) = (0, 0);
    for i in 0..PHYSARUM_INSTANCES {
        let n = rng.random_range(3..=PHYSARUM_MAX_NODES);
        let p = random_instance(derive_seed(MASTER_SEED, "physarum-instance", i as u64), n, 2, 0.35);
        let params = PhysarumParams {
            iterations: PHYSARUM_ITERATIONS,
            initializations: PHYSARUM_INITS,
            seed: derive_seed(MASTER_SEED, "physarum-run", i as u64),
            ..Default::default()
        };
        let Ok(tree) = solve_physarum(&p, &params) else { continue };
        let d = floyd_warshall(&p);
        let (a, b) = (p.terminals()[0], p.terminals()[1]);
        if is_valid(&p, &tree) {
            valid += 1;
        }
        if (tree.cost() - d[a][b]).abs() <= COST_TOL {
            optimal += 1;
        }
    }
    let rate = optimal as f64 / PHYSARUM_INSTANCES as f64;
    (
        rate >= PHYSARUM_MIN_OPTIMAL_RATE && valid == PHYSARUM_INSTANCES,
        format!(
            "shortest path in {optimal}/{PHYSARUM_INSTANCES} ({:.0}%, need >= {:.0}%), valid {valid}/{PHYSARUM_INSTANCES} (k={PHYSARUM_ITERATIONS}, l={PHYSARUM_INITS})",
            100.0 * rate,
            100.0 * PHYSARUM_MIN_OPTIMAL_RATE
        ),
    )
}

fn metropolis() -> (bool, String) {
    let mut rng = rng_from_seed(derive_seed(MASTER_SEED, "metropolis", 0));
    let delta = std::f64::consts::LN_2;
    let accepted = (0..SA_TRIALS).filter(|_| sa_accept(10.0, 10.0 + delta, 1.0, &mut rng)).count();
    let rate = accepted as f64 / SA_TRIALS as f64;
    let improving = [0.0, 0.5, 1.0, 1e3, 1e9]
        .iter()
        .all(|&beta| (0..SA_TRIALS / 5).all(|_| sa_accept(10.0, 9.0, beta, &mut rng)));
    (
        (rate - SA_TARGET).abs() <= SA_TOL && improving,
        format!("acceptance at beta*delta = ln 2: {rate:.4} (target {SA_TARGET} +/- {SA_TOL}); improving moves always accepted: {improving}"),
    )
}

fn blob_instance(size: usize) -> Problem {
    let params = SyntheticParams {
        clusters: 3,
        cluster_size: size,
        bridges: 2,
        neighbors: 3,
        terminal_fraction: 0.25,
        ..Default::default()
    };
    generate_synthetic_instance(SyntheticKind::Clustered, &params, MASTER_SEED)
}

fn modularity_checks() -> (bool, String) {
    let mut worst: f64 = 0.0;
    let mut partitions = 0usize;
    for g in 0..MODULARITY_GRAPHS {
        let n = MODULARITY_MAX_NODES - g % 2;
        let p = random_instance(derive_seed(MASTER_SEED, "modularity", g as u64), n, 2, 0.4);
        for_each_set_partition(p.node_count(), |labels| {
            partitions += 1;
            let got = modularity(&p, &Partition::from_labels(labels));
            worst = worst.max((got - modularity_by_definition(&p, labels)).abs());
        });
    }
    let formula_ok = worst <= MODULARITY_TOL;

    // Small blobs: the bridge cut must be the unique exhaustive optimum.
    let small = blob_instance(BLOB_SIZE_EXHAUSTIVE);
    let small_cut: Vec<usize> = (0..small.node_count()).map(|v| v / BLOB_SIZE_EXHAUSTIVE).collect();
    let cut_q = modularity_by_definition(&small, &small_cut);
    let mut best_other = f64::NEG_INFINITY;
    for_each_set_partition(small.node_count(), |labels| {
        if Partition::from_labels(labels) != Partition::from_labels(&small_cut) {
            best_other = best_other.max(modularity_by_definition(&small, labels));
        }
    });
    let unique_opt = cut_q > best_other + MODULARITY_TOL;
    let small_greedy = greedy_modularity_partition(&small) == Partition::from_labels(&small_cut);

    let big = blob_instance(BLOB_SIZE);
    let big_cut: Vec<usize> = (0..big.node_count()).map(|v| v / BLOB_SIZE).collect();
    let big_greedy = greedy_modularity_partition(&big) == Partition::from_labels(&big_cut);
    (
        formula_ok && unique_opt && small_greedy && big_greedy,
        format!(
            "max |Q - Q_def| = {worst:.2e} over {partitions} partitions (tol {MODULARITY_TOL:e}); bridge cut unique optimum on 3x{BLOB_SIZE_EXHAUSTIVE} blobs: {unique_opt} (Q {cut_q:.6} vs {best_other:.6}); greedy cuts exactly the bridges: 3x{BLOB_SIZE_EXHAUSTIVE} {small_greedy}, 3x{BLOB_SIZE} {big_greedy}"
        ),
    )
}

fn educated_guess() -> (bool, String) {
    let got = [educated_guess_k(7), educated_guess_k(8), educated_guess_k(1)];
    (got == [2, 3, 2], format!("k(7), k(8), k(1) = {got:?}, expected [2, 3, 2]"))
}

fn sweep_instance() -> Problem {
    let params = SyntheticParams {
        clusters: 3,
        cluster_size: SWEEP_CLUSTER_SIZE,
        bridges: 2,
        ..Default::default()
    };
    generate_synthetic_instance(SyntheticKind::Clustered, &params, MASTER_SEED)
}

fn pipeline_sweep() -> (bool, String) {
    let p = sweep_instance();
    let base = PipelineConfig {
        seed: MASTER_SEED,
        ..Default::default()
    };
    let solvers = [SolverKind::Baseline, SolverKind::Ea, SolverKind::Sa, SolverKind::Physarum, SolverKind::Qubo];
    let configs = sweep_configs(&base, &solvers);
    let bench = run_benchmark(std::slice::from_ref(&p), &configs, 1);
    let invalid: Vec<String> = bench
        .reports
        .iter()
        .filter(|r| {
            !r.valid || r.tree(&p).is_none_or(|t| (t.cost() - r.cost).abs() > COST_TOL) || r.failure.is_some()
        })
        .map(|r| steiner_core::pipeline::config_label(&r.config))
        .collect();
    let baseline_alone = bench
        .reports
        .iter()
        .find(|r| {
            r.config.simplifier == Simplifier::None && r.config.partitioner == PartitionerKind::None && r.config.solver == SolverKind::Baseline
        })
        .map(|r| r.cost)
        .unwrap_or(f64::NAN);
    let s = &bench.summary[0];
    (
        invalid.is_empty() && s.best_cost <= baseline_alone + COST_TOL,
        format!(
            "|V| = {}, {} combinations, invalid {:?}; best {} = {:.4} vs baseline alone {:.4} ({:+.3}%)",
            p.node_count(),
            configs.len(),
            invalid,
            s.best_config,
            s.best_cost,
            baseline_alone,
            s.improvement_percent
        ),
    )
}

fn ea_dominance() -> (bool, String) {
    let mut rng = rng_from_seed(derive_seed(MASTER_SEED, "ea", 0));
    let mut worse = Vec::new();
    let mut better = 0;
    for i in 0..EA_INSTANCES {
        let n = rng.random_range(6..=20);
        let t = rng.random_range(2..=6.min(n));
        let p = random_instance(derive_seed(MASTER_SEED, "ea-instance", i as u64), n, t, 0.25);
        let base = solve_baseline(&p).expect("connected").cost();
        let params = EaParams {
            seed_with_baseline: true,
            seed: derive_seed(MASTER_SEED, "ea-run", i as u64),
            ..Default::default()
        };
        let tree = solve_ea(&p, &params).expect("solvable");
        if tree.cost() > base + COST_TOL || !is_valid(&p, &tree) {
            worse.push(i);
        } else if tree.cost() < base - COST_TOL {
            better += 1;
        }
    }
    (
        worse.is_empty(),
        format!("{EA_INSTANCES} instances: EA never above baseline (violations {worse:?}); strictly better on {better}"),
    )
}

fn twice<T: PartialEq>(f: impl Fn() -> T) -> bool {
    f() == f()
}

fn determinism() -> (bool, String) {
    let p = random_instance(derive_seed(MASTER_SEED, "determinism", 0), 14, 4, 0.3);
    let blobs = blob_instance(10);
    let seed = derive_seed(MASTER_SEED, "determinism-run", 0);
    let mut checks: Vec<(&str, bool)> = vec![
        ("synthetic", twice(|| generate_synthetic_instance(SyntheticKind::Meshed, &SyntheticParams::default(), seed))),
        ("sa_accept", twice(|| {
            let mut rng = rng_from_seed(seed);
            (0..1000).map(|_| sa_accept(0.0, 1.0, 0.7, &mut rng)).collect::<Vec<_>>()
        })),
        ("ea", twice(|| solve_ea(&p, &EaParams { seed, generations: 40, ..Default::default() }).unwrap())),
        ("sa", twice(|| solve_sa(&p, &SaParams { seed, ..Default::default() }).unwrap())),
        ("physarum", twice(|| solve_physarum(&p, &PhysarumParams { seed, iterations: 60, ..Default::default() }).unwrap())),
        ("qubo", twice(|| {
            let params = QuboParams {
                sampler: SamplerChoice::Anneal,
                anneal: SamplerParams { seed, sweeps: 100, ..Default::default() },
                ..Default::default()
            };
            solve_qubo(&p, &params).unwrap()
        })),
        ("qubo sampler", twice(|| {
            let q = build_stp_qubo(&p, &QuboBuildParams::default()).unwrap();
            sample_qubo_sa(&q, &SamplerParams { seed, sweeps: 100, ..Default::default() }).0
        })),
        ("spectral", twice(|| spectral_partition(&blobs, KMode::Eigengap, &SpectralParams { seed, ..Default::default() }).unwrap())),
        ("voronoi", twice(|| voronoi_partition(&blobs, 3, usize::MAX).unwrap())),
    ];
    for kind in [Simplifier::Triangle, Simplifier::Gng, Simplifier::Physarum] {
        let ok = twice(|| simplify(&blobs, kind, &SimplifyParams::default(), seed).map(|s| (s.problem, s.node_map)).ok());
        checks.push((kind.label(), ok));
    }
    let config = PipelineConfig {
        seed,
        simplifier: Simplifier::Gng,
        partitioner: PartitionerKind::Sc,
        k: KMode::Eigengap,
        solver: SolverKind::Sa,
        merger: Some(MergeStrategy::Sph),
        ..Default::default()
    };
    checks.push(("pipeline", twice(|| run_pipeline(&blobs, &config).without_timings())));
    let parallel = PipelineConfig { parallelism: 2, ..config.clone() };
    let sequential = PipelineConfig { parallelism: 1, ..config.clone() };
    checks.push((
        "parallel = sequential",
        run_pipeline(&blobs, &parallel).tree_edges == run_pipeline(&blobs, &sequential).tree_edges,
    ));
    checks.push(("benchmark", twice(|| {
        let b = run_benchmark(std::slice::from_ref(&p), std::slice::from_ref(&config), 2);
        (b.reports.iter().map(|r| r.without_timings()).collect::<Vec<_>>(), b.summary)
    })));
    let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    (
        failed.is_empty(),
        format!("{} stochastic operations repeated with the same seed; differing: {failed:?}", checks.len()),
    )
}

#[test]
fn acceptance() {
    let outcomes = [
        run(1, "qubit-count formula", QUBIT_BUDGET, qubit_formula),
        run(2, "baseline approximation bound", APPROX_BUDGET, approximation_bound),
        run(3, "QUBO exhaustive minimum = exact", QUBO_BUDGET, qubo_oracle),
        run(4, "Physarum optimal at t=2", PHYSARUM_BUDGET, physarum_two_terminals),
        run(5, "Metropolis acceptance statistics", SA_BUDGET, metropolis),
        run(6, "modularity correctness", MODULARITY_BUDGET, modularity_checks),
        run(7, "educated-guess k", Duration::from_millis(1), educated_guess),
        run(8, "pipeline validity sweep", SWEEP_BUDGET, pipeline_sweep),
        run(9, "EA seeded dominance", EA_BUDGET, ea_dominance),
        run(10, "determinism", DETERMINISM_BUDGET, determinism),
    ];
    let failed: Vec<usize> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    println!("acceptance: {}/{} criteria passed", outcomes.len() - failed.len(), outcomes.len());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
