//! Algorithm portfolios: several independent MOEA runs advanced in lockstep
//! on separate workers. After every global generation their archives are
//! merged, and a trial ends as soon as the merged archive's AQ is close
//! enough to a calibrated best value.

mod assignment;
mod run;
mod stats;

pub use assignment::{
    assignment_count, enumerate_assignments, table4_assignments, PortfolioAssignment, TABLE4,
};
pub use run::{
    calibrate_best_aq, run_portfolio, run_trial, run_trials, worker_seed, Calibration,
    CalibrationSource, Execution, GenerationTrace, PortfolioContext, RunOptions, RunRecord,
    TerminationRule, TrialOutcome, DEFAULT_SLACK,
};
pub use stats::{statistics_of, trial_statistics, CdfPoint, TrialStatistics};

use crate::moea::InvalidParams;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PortfolioError {
    #[error("roster is empty")]
    EmptyRoster,
    #[error("assignment has no workers")]
    NoWorkers,
    #[error("malformed assignment `{0}` (expected counts like 2/1/0/1)")]
    BadAssignment(String),
    #[error(
        "assignment {assignment} does not fit a roster of {roster_size} on {processors} processors"
    )]
    AssignmentMismatch {
        assignment: String,
        roster_size: usize,
        processors: usize,
    },
    #[error("termination rule has no calibrated best AQ")]
    Uncalibrated,
    #[error("slack must be positive, got {0}")]
    BadSlack(f64),
    #[error("max_generations must be positive")]
    NoGenerations,
    #[error("calibration needs at least one trial")]
    NoCalibrationBudget,
    #[error("no feasible schedule found, AQ is undefined")]
    NoFeasibleSchedule,
    #[error("cannot start worker pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Params(#[from] InvalidParams),
}
