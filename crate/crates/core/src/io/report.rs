//! CSV benchmark reports.

use serde::Serialize;

use crate::pipeline::PipelineReport;

pub const REPORT_HEADER: &str = "problem,simplifier,partitioner,solver,merger,cost,valid,wall_ms,seed";

/// One CSV line of a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub problem: String,
    pub simplifier: String,
    pub partitioner: String,
    pub solver: String,
    pub merger: String,
    pub cost: f64,
    pub valid: bool,
    pub wall_ms: f64,
    pub seed: u64,
}

pub fn export_rows(rows: &[ReportRow]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(REPORT_HEADER.split(',')).expect("write to memory");
    for r in rows {
        w.write_record([
            r.problem.clone(),
            r.simplifier.clone(),
            r.partitioner.clone(),
            r.solver.clone(),
            r.merger.clone(),
            format!("{:.6}", r.cost),
            r.valid.to_string(),
            format!("{:.3}", r.wall_ms),
            r.seed.to_string(),
        ])
        .expect("write to memory");
    }
    w.into_inner().expect("flush to memory")
}

pub fn export_report(reports: &[PipelineReport]) -> Vec<u8> {
    let rows: Vec<ReportRow> = reports.iter().map(PipelineReport::row).collect();
    export_rows(&rows)
}
