use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use steiner_core::partition::{EigSelection, KMode, MergeStrategy};
use steiner_core::pipeline::{PartitionerKind, SolverKind, SyntheticKind};
use steiner_core::simplify::Simplifier;
use steiner_core::solvers::physarum::PressureMode;

/// Steiner tree planning toolkit: simplify, partition, solve, merge and benchmark.
#[derive(Parser, Debug)]
#[command(name = "steiner", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the full pipeline on one problem.
    Solve(RunArgs),
    /// Simplify a problem and write the reduced graph.
    Simplify(RunArgs),
    /// Partition a (possibly simplified) problem and write the clusters.
    Partition(RunArgs),
    /// Run configurations repeatedly and summarize costs against the baseline.
    Bench(BenchArgs),
    /// Generate a synthetic problem file.
    Gen(GenArgs),
    /// Print statistics of a problem.
    Inspect(InspectArgs),
}

/// Parses a snake_case label through the type's serde representation.
fn parse_label<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_owned())).map_err(|_| format!("unknown value `{s}`"))
}

fn parse_k(s: &str) -> Result<KMode, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("k must be positive".into()),
        Ok(k) => Ok(KMode::Explicit(k)),
        Err(_) => parse_label(s).map_err(|_| format!("expected an integer, `eigengap` or `guess`, got `{s}`")),
    }
}

fn parse_connectivity(s: &str) -> Result<u8, String> {
    match s {
        "4" => Ok(4),
        "8" => Ok(8),
        _ => Err(format!("pixel connectivity must be 4 or 8, got `{s}`")),
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct SourceArgs {
    /// Problem file (JSON).
    #[arg(long, value_name = "PATH")]
    pub problem: Option<PathBuf>,
    /// Raster image (PNG or PPM) to import.
    #[arg(long, value_name = "PATH")]
    pub image: Option<PathBuf>,
    #[arg(long, value_name = "4|8", value_parser = parse_connectivity)]
    pub pixel_connectivity: Option<u8>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct RunArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// TOML configuration; flags override its values.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_label::<Simplifier>)]
    pub simplifier: Option<Simplifier>,
    #[arg(long, value_parser = parse_label::<PartitionerKind>)]
    pub partitioner: Option<PartitionerKind>,
    /// Cluster count: an integer, `eigengap` or `guess`.
    #[arg(long, value_parser = parse_k)]
    pub k: Option<KMode>,
    #[arg(long, value_parser = parse_label::<SolverKind>)]
    pub solver: Option<SolverKind>,
    /// `sph` or `com`.
    #[arg(long, value_parser = parse_label::<MergeStrategy>)]
    pub merger: Option<MergeStrategy>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (created if missing).
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Write an SVG rendering.
    #[arg(long)]
    pub svg: bool,
    /// Write a CSV report.
    #[arg(long)]
    pub csv: bool,
    #[arg(long, value_parser = parse_label::<EigSelection>)]
    pub spectral_eigs: Option<EigSelection>,
    #[arg(long, value_parser = parse_label::<PressureMode>)]
    pub physarum_pressure_mode: Option<PressureMode>,
    /// Concurrent subproblem solves; 0 uses every core.
    #[arg(long)]
    pub parallelism: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = steiner_core::pipeline::DEFAULT_REPEATS)]
    pub repeats: usize,
    /// Run every simplifier, partitioner and merger combination for each solver.
    #[arg(long)]
    pub sweep: bool,
    /// Solvers swept with `--sweep`.
    #[arg(long, value_delimiter = ',', value_parser = parse_label::<SolverKind>, default_value = "baseline,ea,sa,physarum,qubo")]
    pub solvers: Vec<SolverKind>,
}

#[derive(Args, Debug, Clone)]
pub struct GenArgs {
    #[arg(long, value_parser = parse_label::<SyntheticKind>, default_value = "clustered")]
    pub kind: SyntheticKind,
    #[arg(long)]
    pub clusters: Option<usize>,
    #[arg(long)]
    pub cluster_size: Option<usize>,
    #[arg(long)]
    pub bridges: Option<usize>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
    #[arg(long)]
    pub terminal_fraction: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: bool,
}

#[derive(Args, Debug, Clone)]
pub struct InspectArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Run Physarum dynamics and write the per-iteration trace CSV.
    #[arg(long)]
    pub physarum_trace: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_parser = parse_label::<PressureMode>)]
    pub physarum_pressure_mode: Option<PressureMode>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_parse_through_serde_names() {
        assert_eq!(parse_label::<MergeStrategy>("com"), Ok(MergeStrategy::CenterOfMass));
        assert_eq!(parse_label::<SolverKind>("qubo"), Ok(SolverKind::Qubo));
        assert!(parse_label::<SolverKind>("magic").is_err());
        assert_eq!(parse_k("4"), Ok(KMode::Explicit(4)));
        assert_eq!(parse_k("eigengap"), Ok(KMode::Eigengap));
        assert!(parse_k("0").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
