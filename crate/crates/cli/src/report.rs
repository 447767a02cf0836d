//! CSV renderings of run records and statistics.

use std::fmt::Write as _;

use serde::Deserialize;
use tct_core::portfolio::{
    CdfPoint, PortfolioAssignment, RunRecord, TrialOutcome, TrialStatistics,
};

use crate::error::{CliError, CliResult};

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub const STATS_HEADER: &str =
    "trials,uncensored,censored,success_fraction,mean,variance,variance_defined";

fn stats_fields(s: &TrialStatistics) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        s.trials,
        s.uncensored,
        s.censored,
        s.success_fraction(),
        opt(s.mean),
        s.variance,
        s.variance_defined
    )
}

pub fn stats_csv(s: &TrialStatistics) -> String {
    format!("{STATS_HEADER}\n{}\n", stats_fields(s))
}

pub fn cdf_csv(points: &[CdfPoint]) -> String {
    let mut out = String::from("x,p\n");
    for pt in points {
        let _ = writeln!(out, "{},{}", pt.x, pt.p);
    }
    out
}

/// Wide per-generation AQ trace: merged AQ then one column per worker slot.
pub fn trace_csv(record: &RunRecord) -> String {
    let workers = record.assignment.processors();
    let mut out = String::from("trial,generation,merged_aq");
    for w in 0..workers {
        let _ = write!(out, ",w{w}");
    }
    out.push('\n');
    for t in &record.trials {
        for g in t.trace.iter().flatten() {
            let _ = write!(out, "{},{},{}", t.trial, g.generation, opt(g.merged_aq));
            for aq in &g.worker_aq {
                let _ = write!(out, ",{}", opt(*aq));
            }
            out.push('\n');
        }
    }
    out
}

pub struct SummaryRow {
    pub instance: String,
    pub assignment: PortfolioAssignment,
    pub stats: TrialStatistics,
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = format!("instance,assignment,{STATS_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            r.instance,
            r.assignment,
            stats_fields(&r.stats)
        );
    }
    out
}

#[derive(Deserialize)]
struct RecordRow {
    trial: usize,
    iterations: usize,
    censored: bool,
}

/// Reads the `trial,iterations,censored` CSV written for each assignment.
pub fn parse_record_csv(text: &str) -> CliResult<Vec<TrialOutcome>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<RecordRow>().enumerate() {
        let row = row.map_err(|e| CliError::usage(format!("record row {}: {e}", i + 2)))?;
        out.push(TrialOutcome {
            trial: row.trial,
            iterations: row.iterations,
            censored: row.censored,
            final_aq: None,
            trace: None,
        });
    }
    if out.is_empty() {
        return Err(CliError::usage("record has no trials"));
    }
    Ok(out)
}
