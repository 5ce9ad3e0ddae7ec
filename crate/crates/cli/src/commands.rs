use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;
use steiner_core::graph::Problem;
use steiner_core::io::{
    decode_raster, export_report, export_svg, import_pixel_image, load_problem, save_problem, Connectivity, PixelImportRules,
    SvgOverlays,
};
use steiner_core::pipeline::{
    config_label, generate_synthetic_instance, partition_with, run_benchmark, run_pipeline, sweep_configs, PipelineConfig,
    SyntheticParams,
};
use steiner_core::rng::derive_seed;
use steiner_core::simplify::{simplify, SimplifiedProblem, Simplifier};
use steiner_core::solvers::physarum::{solve_physarum_traced, trace_csv};
use steiner_core::solvers::PhysarumParams;

use crate::args::{BenchArgs, GenArgs, InspectArgs, RunArgs, SourceArgs};

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid problem input.
    Input(String),
    /// Invalid configuration file or flag combination.
    Config(String),
    /// A pipeline stage failed or produced an invalid tree.
    Stage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) => 2,
            Self::Config(_) => 3,
            Self::Stage(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Self::Input(m) | Self::Config(m) | Self::Stage(m) => m,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

/// Config file (if any) with command-line flags applied on top.
pub fn resolve_config(args: &RunArgs) -> Result<PipelineConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            PipelineConfig::from_toml_str(&text).map_err(|e| CliError::Config(e.to_string()))?
        }
        None => PipelineConfig::default(),
    };
    apply_source(&mut cfg, &args.source);
    if let Some(v) = args.simplifier {
        cfg.simplifier = v;
    }
    if let Some(v) = args.partitioner {
        cfg.partitioner = v;
    }
    if let Some(v) = args.k {
        cfg.k = v;
    }
    if let Some(v) = args.solver {
        cfg.solver = v;
    }
    if let Some(v) = args.merger {
        cfg.merger = Some(v);
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.spectral_eigs {
        cfg.spectral.eigs = v;
    }
    if let Some(v) = args.physarum_pressure_mode {
        cfg.physarum.pressure_mode = v;
        cfg.simplify.physarum.pressure_mode = v;
    }
    if let Some(v) = args.parallelism {
        cfg.parallelism = v;
    }
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(cfg)
}

fn apply_source(cfg: &mut PipelineConfig, src: &SourceArgs) {
    if let Some(p) = &src.problem {
        cfg.problem = Some(p.clone());
        cfg.image = None;
    }
    if let Some(p) = &src.image {
        cfg.image = Some(p.clone());
        if src.problem.is_none() {
            cfg.problem = None;
        }
    }
    if let Some(c) = src.pixel_connectivity {
        cfg.pixel_connectivity = c;
    }
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Loads the problem named by the configuration.
pub fn load_source(cfg: &PipelineConfig) -> Result<Problem> {
    match (&cfg.problem, &cfg.image) {
        (Some(path), None) => {
            let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
            let p = load_problem(&bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            if p.meta().name.is_empty() {
                let mut meta = p.meta().clone();
                meta.name = stem(path);
                return Ok(p.with_meta(meta));
            }
            Ok(p)
        }
        (None, Some(path)) => {
            let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
            let raster = decode_raster(&bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            let rules = PixelImportRules {
                connectivity: Connectivity::from_degree(cfg.pixel_connectivity)
                    .ok_or_else(|| CliError::Config("pixel connectivity must be 4 or 8".into()))?,
                ..Default::default()
            };
            let p = import_pixel_image(&raster, &rules).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            let mut meta = p.meta().clone();
            meta.name = stem(path);
            Ok(p.with_meta(meta))
        }
        (Some(_), Some(_)) => Err(CliError::Config("give either --problem or --image, not both".into())),
        (None, None) => Err(CliError::Input("no problem given (use --problem or --image)".into())),
    }
}

fn out_dir(out: &Option<PathBuf>) -> Result<PathBuf> {
    let dir = out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
    Ok(dir)
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

fn to_json<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable");
    bytes.push(b'\n');
    bytes
}

fn simplified(p: &Problem, cfg: &PipelineConfig) -> Result<SimplifiedProblem> {
    if cfg.simplifier == Simplifier::None {
        return Ok(SimplifiedProblem::identity(p));
    }
    simplify(p, cfg.simplifier, &cfg.simplify, derive_seed(cfg.seed, "simplify", 0)).map_err(|e| CliError::Stage(format!("simplify: {e}")))
}

pub fn solve(args: &RunArgs) -> Result<()> {
    let cfg = resolve_config(args)?;
    let p = load_source(&cfg)?;
    let report = run_pipeline(&p, &cfg);
    let wants_files = args.out.is_some() || args.svg || args.csv;
    if wants_files {
        let dir = out_dir(&args.out)?;
        write(&dir, "report.json", &to_json(&report))?;
        if args.csv {
            write(&dir, "report.csv", &export_report(std::slice::from_ref(&report)))?;
        }
        if args.svg {
            let tree = report.tree(&p);
            let overlays = SvgOverlays {
                tree: tree.as_ref(),
                ..Default::default()
            };
            write(&dir, "solution.svg", &export_svg(&p, &overlays))?;
        }
    }
    println!(
        "{} {} cost={:.6} valid={} clusters={} wall_ms={:.3}",
        report.problem,
        config_label(&cfg),
        report.cost,
        report.valid,
        report.clusters,
        report.timings.total_ms
    );
    if let Some(f) = &report.failure {
        return Err(CliError::Stage(format!("{} stage failed: {}", f.stage, f.message)));
    }
    if !report.valid {
        return Err(CliError::Stage("final tree is not a valid Steiner tree".into()));
    }
    Ok(())
}

pub fn simplify_cmd(args: &RunArgs) -> Result<()> {
    let cfg = resolve_config(args)?;
    let p = load_source(&cfg)?;
    let sp = simplified(&p, &cfg)?;
    let dir = out_dir(&args.out)?;
    write(&dir, "simplified.json", &save_problem(&sp.problem))?;
    write(&dir, "node_map.json", &to_json(&sp.node_map))?;
    if args.svg {
        let overlays = SvgOverlays {
            simplified: Some(&sp.problem),
            ..Default::default()
        };
        write(&dir, "simplified.svg", &export_svg(&p, &overlays))?;
    }
    println!(
        "{} {}: {} nodes / {} edges -> {} nodes / {} edges",
        p.meta().name,
        cfg.simplifier.label(),
        p.node_count(),
        p.edge_count(),
        sp.problem.node_count(),
        sp.problem.edge_count()
    );
    Ok(())
}

pub fn partition_cmd(args: &RunArgs) -> Result<()> {
    let cfg = resolve_config(args)?;
    let p = load_source(&cfg)?;
    let sp = simplified(&p, &cfg)?;
    let partition =
        partition_with(&sp.problem, &cfg, derive_seed(cfg.seed, "partition", 0)).map_err(|e| CliError::Stage(format!("partition: {e}")))?;
    let dir = out_dir(&args.out)?;
    let doc = json!({
        "problem": p.meta().name,
        "partitioner": cfg.partitioner.label(),
        "k": partition.k(),
        "assignment": partition.assignment(),
    });
    write(&dir, "partition.json", &to_json(&doc))?;
    if cfg.simplifier != Simplifier::None {
        write(&dir, "simplified.json", &save_problem(&sp.problem))?;
    }
    if args.svg {
        let overlays = SvgOverlays {
            partition: Some(&partition),
            ..Default::default()
        };
        write(&dir, "partition.svg", &export_svg(&sp.problem, &overlays))?;
    }
    let sizes: Vec<usize> = partition.clusters().iter().map(Vec::len).collect();
    println!("{} {}: k={} sizes={:?}", p.meta().name, cfg.partitioner.label(), partition.k(), sizes);
    Ok(())
}

pub fn bench(args: &BenchArgs) -> Result<()> {
    let cfg = resolve_config(&args.run)?;
    let p = load_source(&cfg)?;
    let configs = if args.sweep { sweep_configs(&cfg, &args.solvers) } else { vec![cfg] };
    let bench = run_benchmark(std::slice::from_ref(&p), &configs, args.repeats);
    let dir = out_dir(&args.run.out)?;
    write(&dir, "bench.csv", &export_report(&bench.reports))?;
    write(&dir, "summary.json", &to_json(&bench.summary))?;
    for s in &bench.summary {
        println!(
            "{} best={} cost={:.6} seed={} baseline={:.6} improvement={:+.3}%",
            s.problem, s.best_config, s.best_cost, s.best_seed, s.baseline_cost, s.improvement_percent
        );
    }
    let failed = bench.reports.iter().filter(|r| !r.valid).count();
    if failed > 0 {
        return Err(CliError::Stage(format!("{failed} of {} runs failed or were invalid", bench.reports.len())));
    }
    Ok(())
}

pub fn gen(args: &GenArgs) -> Result<()> {
    let d = SyntheticParams::default();
    let params = SyntheticParams {
        clusters: args.clusters.unwrap_or(d.clusters),
        cluster_size: args.cluster_size.unwrap_or(d.cluster_size),
        bridges: args.bridges.unwrap_or(d.bridges),
        neighbors: d.neighbors,
        nodes: args.nodes.unwrap_or(d.nodes),
        width: args.width.unwrap_or(d.width),
        height: args.height.unwrap_or(d.height),
        terminal_fraction: args.terminal_fraction.unwrap_or(d.terminal_fraction),
    };
    if !(0.0..=1.0).contains(&params.terminal_fraction) {
        return Err(CliError::Config("terminal fraction must lie in [0, 1]".into()));
    }
    let p = generate_synthetic_instance(args.kind, &params, args.seed);
    let dir = out_dir(&args.out)?;
    let name = p.meta().name.clone();
    let path = write(&dir, &format!("{name}.json"), &save_problem(&p))?;
    if args.svg {
        write(&dir, &format!("{name}.svg"), &export_svg(&p, &SvgOverlays::default()))?;
    }
    println!("{}", path.display());
    Ok(())
}

pub fn inspect(args: &InspectArgs) -> Result<()> {
    let mut cfg = PipelineConfig::default();
    apply_source(&mut cfg, &args.source);
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let p = load_source(&cfg)?;
    let degrees: Vec<usize> = (0..p.node_count()).map(|v| p.degree(v)).collect();
    let stats = json!({
        "name": p.meta().name,
        "source": p.meta().source,
        "nodes": p.node_count(),
        "edges": p.edge_count(),
        "terminals": p.terminals().len(),
        "distributors": p.distributors().len(),
        "steiner_nodes": p.steiner_nodes().len(),
        "components": p.component_labels().1,
        "total_cost": p.total_cost(),
        "max_degree": degrees.iter().max().copied().unwrap_or(0),
        "mean_degree": if p.node_count() == 0 { 0.0 } else { 2.0 * p.edge_count() as f64 / p.node_count() as f64 },
    });
    println!("{}", serde_json::to_string_pretty(&stats).expect("serializable"));
    if args.physarum_trace || args.svg {
        let dir = out_dir(&args.out)?;
        if args.svg {
            write(&dir, "problem.svg", &export_svg(&p, &SvgOverlays::default()))?;
        }
        if args.physarum_trace {
            let d = PhysarumParams::default();
            let params = PhysarumParams {
                seed: args.seed,
                pressure_mode: args.physarum_pressure_mode.unwrap_or(d.pressure_mode),
                ..d
            };
            let out = solve_physarum_traced(&p, &params, true).map_err(|e| CliError::Stage(format!("physarum: {e}")))?;
            write(&dir, "physarum_trace.csv", &trace_csv(&out.trace))?;
        }
    }
    Ok(())
}
