use std::sync::mpsc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::assignment::PortfolioAssignment;
use super::PortfolioError;
use crate::moea::{
    new_optimizer, run_algorithm, Algorithm, AlgorithmParams, Control, Optimizer, ParetoArchive,
};
use crate::project::{brute_force_pareto, is_enumerable, ProjectNetwork, DEFAULT_ORACLE_CAP};
use crate::quality::{average_quality, ReferenceFrame, WeightVectorSet};

/// Default relative slack of the termination threshold.
pub const DEFAULT_SLACK: f64 = 0.10;

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of worker slot `worker` in trial `trial`. Each argument is mixed in
/// turn with SplitMix64, so streams of existing slots do not depend on how
/// many workers a portfolio has.
pub fn worker_seed(seed_base: u64, trial: u64, worker: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed_base) ^ trial) ^ worker)
}

/// Stop once the merged archive's AQ is within `slack` of the calibrated
/// best value, or after `max_generations`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TerminationRule {
    pub best_aq: f64,
    pub slack: f64,
    pub max_generations: usize,
}

impl TerminationRule {
    pub fn new(best_aq: f64, slack: f64, max_generations: usize) -> Result<Self, PortfolioError> {
        if !best_aq.is_finite() {
            return Err(PortfolioError::Uncalibrated);
        }
        if !(slack > 0.0 && slack.is_finite()) {
            return Err(PortfolioError::BadSlack(slack));
        }
        if max_generations == 0 {
            return Err(PortfolioError::NoGenerations);
        }
        Ok(TerminationRule {
            best_aq,
            slack,
            max_generations,
        })
    }

    /// `best_aq + slack * |best_aq|`, which is `(1 + slack) * best_aq` for
    /// the usual non-negative values.
    pub fn threshold(&self) -> f64 {
        self.best_aq + self.slack * self.best_aq.abs()
    }

    pub fn is_met(&self, aq: Option<f64>) -> bool {
        aq.is_some_and(|v| v <= self.threshold())
    }
}

/// Everything shared by the workers of a portfolio on one instance.
#[derive(Clone, Debug)]
pub struct PortfolioContext<'a> {
    network: &'a ProjectNetwork,
    roster: Vec<Algorithm>,
    params: AlgorithmParams,
    frame: ReferenceFrame,
    weights: WeightVectorSet,
}

impl<'a> PortfolioContext<'a> {
    pub fn new(
        network: &'a ProjectNetwork,
        roster: Vec<Algorithm>,
        params: AlgorithmParams,
        frame: ReferenceFrame,
    ) -> Result<Self, PortfolioError> {
        if roster.is_empty() {
            return Err(PortfolioError::EmptyRoster);
        }
        params.validate()?;
        Ok(PortfolioContext {
            network,
            roster,
            params,
            weights: frame.weights(),
            frame,
        })
    }

    pub fn network(&self) -> &'a ProjectNetwork {
        self.network
    }

    pub fn roster(&self) -> &[Algorithm] {
        &self.roster
    }

    pub fn params(&self) -> &AlgorithmParams {
        &self.params
    }

    pub fn frame(&self) -> &ReferenceFrame {
        &self.frame
    }

    pub fn weights(&self) -> &WeightVectorSet {
        &self.weights
    }

    /// AQ of `archive` in this frame, `None` without feasible members.
    pub fn aq(&self, archive: &ParetoArchive) -> Option<f64> {
        average_quality(archive, &self.frame, &self.weights).ok()
    }
}

/// How the workers of one trial are scheduled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Execution {
    /// One thread per worker, synchronized after every generation.
    #[default]
    Threaded,
    /// All workers stepped in turn on the calling thread.
    RoundRobin,
}

/// AQ values seen by the coordinator after one global generation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationTrace {
    pub generation: usize,
    pub merged_aq: Option<f64>,
    pub worker_aq: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub iterations: usize,
    pub censored: bool,
    pub final_aq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace: Option<Vec<GenerationTrace>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub execution: Execution,
    /// Upper bound on concurrently running workers across trials.
    pub max_workers: usize,
    pub record_trace: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            execution: Execution::Threaded,
            max_workers: 1,
            record_trace: false,
        }
    }
}

struct Coordinator<'c, 'a> {
    ctx: &'c PortfolioContext<'a>,
    rule: &'c TerminationRule,
    trace: Option<Vec<GenerationTrace>>,
}

impl Coordinator<'_, '_> {
    /// Merges the workers' archives after `generation`; returns the merged
    /// AQ and whether the trial is over.
    fn observe(&mut self, generation: usize, archives: &[ParetoArchive]) -> (Option<f64>, bool) {
        let merged = ParetoArchive::merge(archives);
        let aq = self.ctx.aq(&merged);
        if let Some(trace) = self.trace.as_mut() {
            trace.push(GenerationTrace {
                generation,
                merged_aq: aq,
                worker_aq: archives.iter().map(|a| self.ctx.aq(a)).collect(),
            });
        }
        (aq, self.rule.is_met(aq))
    }
}

/// Runs one trial of `assignment` and reports the global generation at which
/// the merged archive met `rule`.
pub fn run_trial(
    ctx: &PortfolioContext<'_>,
    assignment: &PortfolioAssignment,
    rule: &TerminationRule,
    seed_base: u64,
    trial: usize,
    execution: Execution,
    record_trace: bool,
) -> Result<TrialOutcome, PortfolioError> {
    if assignment.roster_size() != ctx.roster.len() {
        return Err(PortfolioError::AssignmentMismatch {
            assignment: assignment.to_string(),
            roster_size: ctx.roster.len(),
            processors: assignment.processors(),
        });
    }
    let workers: Vec<(Algorithm, AlgorithmParams)> = assignment
        .worker_slots()
        .into_iter()
        .enumerate()
        .map(|(slot, alg)| {
            let seed = worker_seed(seed_base, trial as u64, slot as u64);
            (ctx.roster[alg], ctx.params.with_seed(seed))
        })
        .collect();
    let mut coord = Coordinator {
        ctx,
        rule,
        trace: record_trace.then(Vec::new),
    };
    let (iterations, censored, final_aq) = match execution {
        Execution::RoundRobin => round_robin(ctx.network, &workers, &mut coord),
        Execution::Threaded => threaded(ctx.network, &workers, &mut coord),
    };
    Ok(TrialOutcome {
        trial,
        iterations,
        censored,
        final_aq,
        trace: coord.trace,
    })
}

fn round_robin(
    network: &ProjectNetwork,
    workers: &[(Algorithm, AlgorithmParams)],
    coord: &mut Coordinator<'_, '_>,
) -> (usize, bool, Option<f64>) {
    let mut opts: Vec<Box<dyn Optimizer + '_>> = workers
        .iter()
        .map(|(alg, params)| new_optimizer(*alg, network, params))
        .collect();
    let max = coord.rule.max_generations;
    let mut last = None;
    for g in 1..=max {
        let archives: Vec<ParetoArchive> = opts
            .iter_mut()
            .map(|o| {
                o.step();
                o.archive()
            })
            .collect();
        let (aq, done) = coord.observe(g, &archives);
        last = aq;
        if done {
            return (g, false, aq);
        }
    }
    (max, true, last)
}

fn threaded(
    network: &ProjectNetwork,
    workers: &[(Algorithm, AlgorithmParams)],
    coord: &mut Coordinator<'_, '_>,
) -> (usize, bool, Option<f64>) {
    let max = coord.rule.max_generations;
    std::thread::scope(|scope| {
        let (result_tx, result_rx) = mpsc::channel::<(usize, ParetoArchive)>();
        let mut step_txs = Vec::with_capacity(workers.len());
        for (slot, (alg, params)) in workers.iter().enumerate() {
            let (step_tx, step_rx) = mpsc::channel::<()>();
            let result_tx = result_tx.clone();
            scope.spawn(move || {
                let mut opt = new_optimizer(*alg, network, params);
                while step_rx.recv().is_ok() {
                    opt.step();
                    if result_tx.send((slot, opt.archive())).is_err() {
                        break;
                    }
                }
            });
            step_txs.push(step_tx);
        }
        drop(result_tx);

        let mut last = None;
        for g in 1..=max {
            for tx in &step_txs {
                tx.send(()).expect("worker alive");
            }
            let mut archives = vec![ParetoArchive::new(); workers.len()];
            for _ in 0..workers.len() {
                let (slot, archive) = result_rx.recv().expect("worker alive");
                archives[slot] = archive;
            }
            let (aq, done) = coord.observe(g, &archives);
            last = aq;
            if done {
                return (g, false, aq);
            }
        }
        (max, true, last)
    })
}

/// Results of all trials of one assignment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub assignment: PortfolioAssignment,
    pub seed_base: u64,
    pub trials: Vec<TrialOutcome>,
}

impl RunRecord {
    pub fn iterations(&self) -> Vec<usize> {
        self.trials.iter().map(|t| t.iterations).collect()
    }

    pub fn censored_count(&self) -> usize {
        self.trials.iter().filter(|t| t.censored).count()
    }

    /// CSV with header `trial,iterations,censored`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,iterations,censored\n");
        for t in &self.trials {
            out.push_str(&format!("{},{},{}\n", t.trial, t.iterations, t.censored));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }
}

/// Runs `trials` independent trials; trial `t` seeds its workers from
/// `(seed_base, t)`. Results are in trial order whatever the parallelism.
pub fn run_trials(
    ctx: &PortfolioContext<'_>,
    assignment: &PortfolioAssignment,
    rule: &TerminationRule,
    trials: usize,
    seed_base: u64,
    opts: RunOptions,
) -> Result<Vec<TrialOutcome>, PortfolioError> {
    let per_trial = match opts.execution {
        Execution::Threaded => assignment.processors(),
        Execution::RoundRobin => 1,
    };
    let parallel = (opts.max_workers / per_trial.max(1))
        .max(1)
        .min(trials.max(1));
    let one = |t: usize| {
        run_trial(
            ctx,
            assignment,
            rule,
            seed_base,
            t,
            opts.execution,
            opts.record_trace,
        )
    };
    if parallel <= 1 {
        return (0..trials).map(one).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallel)
        .build()
        .map_err(|e| PortfolioError::ThreadPool(e.to_string()))?;
    pool.install(|| (0..trials).into_par_iter().map(one).collect())
}

pub fn run_portfolio(
    ctx: &PortfolioContext<'_>,
    assignment: &PortfolioAssignment,
    rule: &TerminationRule,
    trials: usize,
    seed_base: u64,
    opts: RunOptions,
) -> Result<RunRecord, PortfolioError> {
    let trials = run_trials(ctx, assignment, rule, trials, seed_base, opts)?;
    Ok(RunRecord {
        assignment: assignment.clone(),
        seed_base,
        trials,
    })
}

/// Where a calibrated best AQ came from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CalibrationSource {
    ExactFront { front_size: usize },
    Search { runs: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub best_aq: f64,
    pub source: CalibrationSource,
}

const CALIBRATION_SALT: u64 = 0xCA11_B4A7_E000_0001;

/// Best AQ reference for the termination rule.
///
/// Enumerable instances use the exact Pareto front. Otherwise every roster
/// algorithm runs `budget_trials` full-length runs and the lowest AQ seen at
/// any generation wins.
pub fn calibrate_best_aq(
    ctx: &PortfolioContext<'_>,
    budget_trials: usize,
    seed: u64,
) -> Result<Calibration, PortfolioError> {
    if is_enumerable(ctx.network, DEFAULT_ORACLE_CAP) {
        let front =
            brute_force_pareto(ctx.network, DEFAULT_ORACLE_CAP).expect("enumerability checked");
        let best_aq = ctx.aq(&front).ok_or(PortfolioError::NoFeasibleSchedule)?;
        return Ok(Calibration {
            best_aq,
            source: CalibrationSource::ExactFront {
                front_size: front.len(),
            },
        });
    }
    if budget_trials == 0 {
        return Err(PortfolioError::NoCalibrationBudget);
    }
    let jobs: Vec<(usize, usize)> = (0..ctx.roster.len())
        .flat_map(|a| (0..budget_trials).map(move |t| (a, t)))
        .collect();
    let best = jobs
        .par_iter()
        .map(|&(a, t)| {
            let params =
                ctx.params
                    .with_seed(worker_seed(seed ^ CALIBRATION_SALT, t as u64, a as u64));
            let mut best = f64::INFINITY;
            run_algorithm(ctx.roster[a], ctx.network, &params, |_, archive| {
                if let Some(v) = ctx.aq(archive) {
                    best = best.min(v);
                }
                Control::Continue
            })
            .map(|_| best)
        })
        .collect::<Result<Vec<f64>, _>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return Err(PortfolioError::NoFeasibleSchedule);
    }
    Ok(Calibration {
        best_aq: best,
        source: CalibrationSource::Search { runs: jobs.len() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_differ_per_slot_and_trial() {
        let a = worker_seed(1, 0, 0);
        assert_ne!(a, worker_seed(1, 0, 1));
        assert_ne!(a, worker_seed(1, 1, 0));
        assert_ne!(a, worker_seed(2, 0, 0));
        assert_eq!(a, worker_seed(1, 0, 0));
    }

    #[test]
    fn threshold() {
        let r = TerminationRule::new(2.0, 0.1, 10).unwrap();
        assert!((r.threshold() - 2.2).abs() < 1e-12);
        assert!(r.is_met(Some(2.2)));
        assert!(!r.is_met(Some(2.3)));
        assert!(!r.is_met(None));
        assert!(TerminationRule::new(f64::NAN, 0.1, 10).is_err());
        assert!(TerminationRule::new(1.0, 0.0, 10).is_err());
    }
}
