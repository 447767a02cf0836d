use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use tct_core::ahp::{parse_objective_csv, rank_with_audit};
use tct_core::moea::{run_algorithm, Algorithm, AlgorithmParams, Control, ParetoArchive};
use tct_core::portfolio::{
    calibrate_best_aq, run_portfolio, trial_statistics, Calibration, CalibrationSource, Execution,
    PortfolioAssignment, PortfolioContext, RunOptions, RunRecord, TerminationRule, DEFAULT_SLACK,
};
use tct_core::project::{
    brute_force_pareto, format_instance, format_manifest, generate_instance, load_manifest,
    manifest_path, Assignment, GeneratorParams, Manifest, DEFAULT_ORACLE_CAP, DEFAULT_PATH_CAP,
};
use tct_core::quality::{average_quality, ReferenceFrame, Rho};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::experiment::run_experiment;
use crate::instances;
use crate::report::{cdf_csv, parse_record_csv, stats_csv};

#[derive(Parser, Debug)]
#[command(
    name = "tct",
    version,
    about = "Time-cost trade-off solvers, portfolios and ranking"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Seed for every random choice; overrides `seed_base` in configs.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Machine-readable output on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    /// Directory for report files.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Cap on concurrently running workers. Defaults to the number of cores.
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

impl Global {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn workers(&self) -> CliResult<usize> {
        match self.workers {
            Some(0) => Err(CliError::usage("--workers must be at least 1")),
            Some(n) => Ok(n),
            None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate one mode assignment.
    Eval {
        instance: String,
        /// Zero-based mode index per activity, comma or space separated.
        #[arg(required = true, num_args = 1..)]
        modes: Vec<String>,
    },
    /// List source-to-sink paths.
    Paths {
        instance: String,
        #[arg(long, default_value_t = DEFAULT_PATH_CAP)]
        cap: usize,
    },
    /// Count schedules and paths, and check them against the manifest.
    Count { instance: String },
    /// Exact Pareto front, or the archive of one algorithm run.
    Pareto {
        instance: String,
        #[arg(long, conflicts_with = "alg", required_unless_present = "alg")]
        exact: bool,
        #[arg(long)]
        alg: Option<Algorithm>,
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        cap: u64,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Generate a random instance.
    Gen {
        #[arg(long)]
        activities: usize,
        #[arg(long, default_value_t = 2)]
        min_modes: usize,
        #[arg(long, default_value_t = 4)]
        max_modes: usize,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        /// File stem when writing to `--out`.
        #[arg(long, default_value = "generated")]
        name: String,
    },
    /// Run trials of one portfolio assignment on one instance.
    Run {
        instance: String,
        /// Workers per roster algorithm, e.g. `2/1/0/1`.
        #[arg(long, conflicts_with = "alg", required_unless_present = "alg")]
        assignment: Option<PortfolioAssignment>,
        /// Shorthand for a one-worker portfolio of this algorithm.
        #[arg(long)]
        alg: Option<Algorithm>,
        #[arg(long, value_delimiter = ',', default_value = "nsga2,paes,npga2,spea2")]
        roster: Vec<Algorithm>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SLACK)]
        slack: f64,
        /// Skip calibration and use this best AQ.
        #[arg(long)]
        best_aq: Option<f64>,
        #[arg(long, default_value_t = 5)]
        calibration_trials: usize,
        #[arg(long, default_value_t = Rho::DEFAULT)]
        rho: Rho,
        /// Run all workers of a trial on one thread.
        #[arg(long)]
        round_robin: bool,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Run a batch experiment from a TOML config.
    Experiment { config: PathBuf },
    /// Summarize a `record.csv`.
    Stats {
        record: PathBuf,
        /// Print the CDF over all trials instead of the summary.
        #[arg(long, conflicts_with = "conditional_cdf")]
        cdf: bool,
        /// Print the CDF over uncensored trials instead of the summary.
        #[arg(long)]
        conditional_cdf: bool,
    },
    /// AHP ranking of `alternative,attribute,obj_value` rows.
    Rank {
        input: PathBuf,
        /// Attribute weights in order of first appearance, summing to 1.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct ParamArgs {
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub mutation_rate: Option<f64>,
}

impl ParamArgs {
    fn resolve(&self, seed: u64) -> CliResult<AlgorithmParams> {
        let mut p = AlgorithmParams::default();
        if let Some(n) = self.population {
            p.population_size = n;
        }
        if let Some(g) = self.generations {
            p.max_generations = g;
        }
        if let Some(m) = self.mutation_rate {
            p.mutation_rate = m;
        }
        p.seed = seed;
        p.validate().map_err(CliError::usage)?;
        Ok(p)
    }
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, contents)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes") + "\n"
}

fn archive_json(archive: &ParetoArchive) -> serde_json::Value {
    archive
        .members()
        .iter()
        .map(|m| {
            json!({
                "duration": m.objectives.duration,
                "total_cost": m.objectives.total_cost.to_string(),
                "feasible": m.objectives.is_feasible(),
                "modes": m.assignment.modes(),
            })
        })
        .collect()
}

/// Runs one parsed command, writing its primary output to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    let g = &cli.global;
    let text = match &cli.command {
        Command::Eval { instance, modes } => eval(g, instance, modes)?,
        Command::Paths { instance, cap } => paths(g, instance, *cap)?,
        Command::Count { instance } => count(g, instance)?,
        Command::Pareto {
            instance,
            exact,
            alg,
            cap,
            params,
        } => pareto(g, instance, *exact, *alg, *cap, params)?,
        Command::Gen {
            activities,
            min_modes,
            max_modes,
            density,
            name,
        } => gen(g, *activities, (*min_modes, *max_modes), *density, name)?,
        Command::Run { .. } => run(g, &cli.command)?,
        Command::Experiment { config } => experiment(g, config)?,
        Command::Stats {
            record,
            cdf,
            conditional_cdf,
        } => stats(g, record, *cdf, *conditional_cdf)?,
        Command::Rank { input, weights } => rank(g, input, weights.as_deref())?,
    };
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::runtime(format!("cannot write output: {e}")))
}

fn eval(g: &Global, instance: &str, modes: &[String]) -> CliResult<String> {
    let (_, net) = instances::load(instance)?;
    let indices = modes
        .iter()
        .flat_map(|m| m.split([',', ' ']))
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| CliError::usage(format!("invalid mode index `{s}`")))
        })
        .collect::<CliResult<Vec<usize>>>()?;
    let p = net
        .evaluate(&Assignment::new(indices))
        .map_err(CliError::usage)?;
    Ok(if g.json {
        pretty(&json!({
            "duration": p.duration,
            "total_cost": p.total_cost.to_string(),
            "feasible_time": p.feasible_time,
            "feasible_cost": p.feasible_cost,
            "feasible": p.is_feasible(),
        }))
    } else {
        format!(
            "duration {}\ntotal_cost {}\nfeasible_time {}\nfeasible_cost {}\n",
            p.duration, p.total_cost, p.feasible_time, p.feasible_cost
        )
    })
}

fn paths(g: &Global, instance: &str, cap: usize) -> CliResult<String> {
    let (_, net) = instances::load(instance)?;
    let paths = net.enumerate_paths(cap).map_err(CliError::runtime)?;
    Ok(if g.json {
        pretty(&json!({ "count": paths.len(), "paths": paths }))
    } else {
        let mut s = String::new();
        for p in &paths {
            let ids: Vec<String> = p.iter().map(|id| id.to_string()).collect();
            s.push_str(&ids.join(" "));
            s.push('\n');
        }
        s
    })
}

fn count(g: &Global, instance: &str) -> CliResult<String> {
    let (path, net) = instances::load(instance)?;
    let actual = Manifest::of(&net);
    let mpath = manifest_path(&path);
    let status = if mpath.is_file() {
        let declared = load_manifest(&mpath).map_err(CliError::usage)?;
        if declared == actual {
            "match"
        } else {
            "mismatch"
        }
    } else {
        "absent"
    };
    let text = if g.json {
        pretty(&json!({
            "activities": net.activity_count(),
            "schedules": actual.schedules.to_string(),
            "paths": actual.paths.to_string(),
            "manifest": status,
        }))
    } else {
        format!(
            "activities {}\nschedules {}\npaths {}\nmanifest {status}\n",
            net.activity_count(),
            actual.schedules,
            actual.paths
        )
    };
    if status == "mismatch" {
        print!("{text}");
        return Err(CliError::runtime(format!(
            "counts disagree with {}",
            mpath.display()
        )));
    }
    Ok(text)
}

fn pareto(
    g: &Global,
    instance: &str,
    exact: bool,
    alg: Option<Algorithm>,
    cap: u64,
    params: &ParamArgs,
) -> CliResult<String> {
    let (_, net) = instances::load(instance)?;
    let archive = if exact {
        brute_force_pareto(&net, cap).map_err(CliError::usage)?
    } else {
        let alg = alg.expect("clap requires --exact or --alg");
        let p = params.resolve(g.seed())?;
        run_algorithm(alg, &net, &p, |_, _| Control::Continue)
            .map_err(CliError::usage)?
            .archive
    };
    let frame = ReferenceFrame::estimate(&net, Rho::DEFAULT);
    let aq = average_quality(&archive, &frame, &frame.weights()).ok();
    match aq {
        Some(v) => eprintln!("aq {v}"),
        None => eprintln!("aq undefined (no feasible points)"),
    }
    if let Some(dir) = &g.out {
        write_file(&dir.join("pareto.csv"), archive.to_csv())?;
    }
    Ok(if g.json {
        pretty(&json!({ "aq": aq, "points": archive_json(&archive) }))
    } else {
        archive.to_csv()
    })
}

fn gen(
    g: &Global,
    activities: usize,
    mode_range: (usize, usize),
    density: f64,
    name: &str,
) -> CliResult<String> {
    let net = generate_instance(&GeneratorParams {
        n_activities: activities,
        mode_range,
        density,
        seed: g.seed(),
    })
    .map_err(CliError::usage)?;
    let text = format_instance(&net);
    if let Some(dir) = &g.out {
        let path = dir.join(format!("{name}.tct"));
        write_file(&path, &text)?;
        write_file(&manifest_path(&path), format_manifest(&Manifest::of(&net)))?;
    }
    Ok(text)
}

fn run(g: &Global, cmd: &Command) -> CliResult<String> {
    let Command::Run {
        instance,
        assignment,
        alg,
        roster,
        trials,
        slack,
        best_aq,
        calibration_trials,
        rho,
        round_robin,
        params,
    } = cmd
    else {
        unreachable!("run called with another command");
    };
    if *trials == 0 {
        return Err(CliError::usage("--trials must be at least 1"));
    }
    let (roster, assignment) = match alg {
        Some(a) => (
            vec![*a],
            PortfolioAssignment::new(vec![1]).expect("one worker"),
        ),
        None => (
            roster.clone(),
            assignment.clone().expect("clap requires one"),
        ),
    };
    if assignment.roster_size() != roster.len() {
        return Err(CliError::usage(format!(
            "assignment {assignment} has {} entries for a roster of {}",
            assignment.roster_size(),
            roster.len()
        )));
    }
    let seed = g.seed();
    let p = params.resolve(0)?;
    let workers = g.workers()?;
    let (_, net) = instances::load(instance)?;
    let frame = ReferenceFrame::estimate(&net, *rho);
    let frame_json = frame.to_json();
    let ctx = PortfolioContext::new(&net, roster, p.clone(), frame).map_err(CliError::usage)?;
    let cal = match best_aq {
        Some(v) => Calibration {
            best_aq: *v,
            source: CalibrationSource::Search { runs: 0 },
        },
        None => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(CliError::runtime)?;
            pool.install(|| calibrate_best_aq(&ctx, *calibration_trials, seed))
                .map_err(CliError::runtime)?
        }
    };
    let rule =
        TerminationRule::new(cal.best_aq, *slack, p.max_generations).map_err(CliError::usage)?;
    let opts = RunOptions {
        execution: if *round_robin {
            Execution::RoundRobin
        } else {
            Execution::Threaded
        },
        max_workers: workers,
        record_trace: false,
    };
    let record: RunRecord =
        run_portfolio(&ctx, &assignment, &rule, *trials, seed, opts).map_err(CliError::runtime)?;
    let stats = trial_statistics(&record);
    if let Some(dir) = &g.out {
        write_file(&dir.join("frame.json"), frame_json + "\n")?;
        write_file(&dir.join("record.csv"), record.to_csv())?;
        write_file(&dir.join("stats.csv"), stats_csv(&stats))?;
        write_file(&dir.join("cdf.csv"), cdf_csv(&stats.cdf))?;
        write_file(
            &dir.join("cdf_conditional.csv"),
            cdf_csv(&stats.conditional_cdf),
        )?;
    }
    Ok(if g.json {
        pretty(&json!({
            "best_aq": cal.best_aq,
            "threshold": rule.threshold(),
            "record": record,
            "stats": stats,
        }))
    } else {
        eprintln!("best_aq {} threshold {}", cal.best_aq, rule.threshold());
        record.to_csv()
    })
}

fn experiment(g: &Global, config: &Path) -> CliResult<String> {
    let mut cfg = ExperimentConfig::load(config)?;
    if let Some(s) = g.seed {
        cfg.seed_base = s;
    }
    let base = config.parent().filter(|d| !d.as_os_str().is_empty());
    let sources = cfg.validate(base)?;
    let out = match (&g.out, &cfg.output) {
        (Some(o), _) => o.clone(),
        (None, Some(o)) => base.map_or_else(|| o.clone(), |b| b.join(o)),
        (None, None) => PathBuf::from("report"),
    };
    let outcome = run_experiment(&cfg, &sources, &out, g.workers()?)?;
    let text = if g.json {
        pretty(&json!({
            "report": outcome.root,
            "failures": outcome.failures.iter().map(|(i, e)| json!({"instance": i, "error": e})).collect::<Vec<_>>(),
            "ranks": outcome.ranks,
        }))
    } else {
        let mut s = format!("report written to {}\n", outcome.root.display());
        if let Some(r) = &outcome.ranks {
            s.push_str(&r.to_csv());
        }
        s
    };
    if !outcome.failures.is_empty() {
        print!("{text}");
        let names: Vec<&str> = outcome.failures.iter().map(|(i, _)| i.as_str()).collect();
        return Err(CliError::runtime(format!(
            "{} instance(s) failed: {}",
            names.len(),
            names.join(", ")
        )));
    }
    Ok(text)
}

fn stats(g: &Global, record: &Path, cdf: bool, conditional: bool) -> CliResult<String> {
    let trials = parse_record_csv(&read_file(record)?)?;
    let rec = RunRecord {
        assignment: PortfolioAssignment::new(vec![1]).expect("one worker"),
        seed_base: 0,
        trials,
    };
    let s = trial_statistics(&rec);
    Ok(if g.json {
        serde_json::to_string_pretty(&s).expect("stats serialize") + "\n"
    } else if cdf {
        cdf_csv(&s.cdf)
    } else if conditional {
        cdf_csv(&s.conditional_cdf)
    } else {
        stats_csv(&s)
    })
}

fn rank(g: &Global, input: &Path, weights: Option<&[f64]>) -> CliResult<String> {
    let table = parse_objective_csv(&read_file(input)?).map_err(CliError::usage)?;
    let matrix = table.decision_matrix().map_err(CliError::usage)?;
    let audit = rank_with_audit(&matrix, weights).map_err(CliError::usage)?;
    if let Some(dir) = &g.out {
        write_file(&dir.join("ranks.csv"), audit.result.to_csv())?;
        write_file(&dir.join("ranks.json"), audit.to_json())?;
    }
    Ok(if g.json {
        audit.to_json() + "\n"
    } else {
        audit.result.to_csv()
    })
}
