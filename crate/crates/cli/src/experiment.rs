//! Batch experiments: calibrate each instance, run every configured
//! portfolio assignment for the configured number of trials, then rank the
//! assignments with AHP across instances.
//!
//! Report layout under the output root:
//!
//! ```text
//! config.toml  summary.csv  ahp_input.csv  ranks.csv  ranks.json
//! <instance>/frame.json  <instance>/calibration.json
//! <instance>/<a-b-c-d>/record.csv  stats.csv  cdf.csv  cdf_conditional.csv  [trace.csv]
//! ```
//!
//! Nothing time- or machine-dependent is written, so reruns of the same
//! config produce identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;
use tct_core::ahp::{rank_with_audit, ObjectiveTable, RankVector};
use tct_core::portfolio::{
    calibrate_best_aq, run_portfolio, trial_statistics, Execution, PortfolioAssignment,
    PortfolioContext, RunOptions, TerminationRule,
};
use tct_core::quality::ReferenceFrame;

use crate::config::{ExperimentConfig, InstanceSource, ReportFormat};
use crate::error::{CliError, CliResult};
use crate::report::{cdf_csv, stats_csv, summary_csv, trace_csv, SummaryRow};

pub struct ExperimentOutcome {
    pub root: PathBuf,
    pub summary: Vec<SummaryRow>,
    /// Instances whose section was aborted, with the reason.
    pub failures: Vec<(String, String)>,
    pub ranks: Option<RankVector>,
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, contents)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))
}

/// Runs the whole experiment. Instance-level failures are collected in the
/// outcome rather than returned, so the other instances still complete.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    sources: &[(String, InstanceSource)],
    out: &Path,
    workers: usize,
) -> CliResult<ExperimentOutcome> {
    let assignments = cfg.assignment_list()?;
    let workers = workers.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(CliError::runtime)?;
    write(&out.join("config.toml"), cfg.to_toml())?;

    let mut summary = Vec::new();
    let mut failures = Vec::new();
    let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
    for (label, source) in sources {
        log::info!("instance {label}");
        let dir = out.join(label);
        let result = pool.install(|| run_instance(cfg, source, &assignments, &dir, workers));
        match result {
            Ok(rows) => {
                let _ = fs::remove_file(dir.join("error.txt"));
                let col = rows
                    .iter()
                    .map(|(_, s)| s.mean.unwrap_or(cfg.params.max_generations as f64))
                    .collect();
                columns.push((label.clone(), col));
                summary.extend(rows.into_iter().map(|(assignment, stats)| SummaryRow {
                    instance: label.clone(),
                    assignment,
                    stats,
                }));
            }
            Err(e) => {
                log::error!("instance {label}: {e}");
                write(&dir.join("error.txt"), format!("{e}\n"))?;
                failures.push((label.clone(), e.to_string()));
            }
        }
    }
    write(&out.join("summary.csv"), summary_csv(&summary))?;
    if cfg.formats.contains(&ReportFormat::Json) {
        let rows: Vec<_> = summary
            .iter()
            .map(|r| json!({"instance": r.instance, "assignment": r.assignment, "stats": r.stats}))
            .collect();
        write(&out.join("summary.json"), to_json(&rows))?;
    }

    let ranks = if columns.is_empty() {
        None
    } else {
        let table = ObjectiveTable {
            alternatives: assignments.iter().map(|a| a.to_string()).collect(),
            attributes: columns.iter().map(|(l, _)| l.clone()).collect(),
            values: (0..assignments.len())
                .map(|i| columns.iter().map(|(_, c)| c[i]).collect())
                .collect(),
        };
        write(&out.join("ahp_input.csv"), table.to_csv())?;
        let matrix = table.decision_matrix().map_err(CliError::runtime)?;
        let audit = rank_with_audit(&matrix, None).map_err(CliError::runtime)?;
        write(&out.join("ranks.csv"), audit.result.to_csv())?;
        write(&out.join("ranks.json"), audit.to_json())?;
        Some(audit.result)
    };

    Ok(ExperimentOutcome {
        root: out.to_path_buf(),
        summary,
        failures,
        ranks,
    })
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes") + "\n"
}

type Section = Vec<(PortfolioAssignment, tct_core::portfolio::TrialStatistics)>;

fn run_instance(
    cfg: &ExperimentConfig,
    source: &InstanceSource,
    assignments: &[PortfolioAssignment],
    dir: &Path,
    workers: usize,
) -> CliResult<Section> {
    let net = source.load()?;
    let frame = ReferenceFrame::estimate(&net, cfg.rho);
    write(&dir.join("frame.json"), frame.to_json() + "\n")?;
    let ctx = PortfolioContext::new(&net, cfg.roster.clone(), cfg.params.clone(), frame)
        .map_err(CliError::usage)?;
    let cal = calibrate_best_aq(&ctx, cfg.calibration_trials, cfg.seed_base)
        .map_err(CliError::runtime)?;
    let rule = TerminationRule::new(cal.best_aq, cfg.slack, cfg.params.max_generations)
        .map_err(CliError::usage)?;
    write(
        &dir.join("calibration.json"),
        to_json(&json!({
            "best_aq": cal.best_aq,
            "source": cal.source,
            "slack": cfg.slack,
            "threshold": rule.threshold(),
        })),
    )?;
    log::info!("best AQ {} ({:?})", cal.best_aq, cal.source);

    let opts = RunOptions {
        execution: Execution::Threaded,
        max_workers: workers,
        record_trace: cfg.record_trace,
    };
    let mut rows = Vec::with_capacity(assignments.len());
    for a in assignments {
        let record = run_portfolio(&ctx, a, &rule, cfg.trials, cfg.seed_base, opts)
            .map_err(CliError::runtime)?;
        let stats = trial_statistics(&record);
        log::info!(
            "  {a}: mean {:?}, censored {}/{}",
            stats.mean,
            stats.censored,
            stats.trials
        );
        let sub = dir.join(a.slug());
        write(&sub.join("record.csv"), record.to_csv())?;
        write(&sub.join("stats.csv"), stats_csv(&stats))?;
        write(&sub.join("cdf.csv"), cdf_csv(&stats.cdf))?;
        write(
            &sub.join("cdf_conditional.csv"),
            cdf_csv(&stats.conditional_cdf),
        )?;
        if cfg.record_trace {
            write(&sub.join("trace.csv"), trace_csv(&record))?;
        }
        if cfg.formats.contains(&ReportFormat::Json) {
            write(&sub.join("record.json"), record.to_json() + "\n")?;
            write(&sub.join("stats.json"), to_json(&stats))?;
        }
        rows.push((a.clone(), stats));
    }
    Ok(rows)
}
