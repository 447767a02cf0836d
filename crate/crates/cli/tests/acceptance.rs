//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Run with `cargo test --test acceptance`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use tct_core::ahp::{decision_matrix, priority_vector, rank_alternatives, DecisionMatrix};
use tct_core::moea::{
    fast_nondominated_sort, random_assignment, run_algorithm, Algorithm, AlgorithmParams, Control,
    Individual, ParetoArchive,
};
use tct_core::portfolio::{
    calibrate_best_aq, enumerate_assignments, run_trial, statistics_of, table4_assignments,
    Execution, PortfolioAssignment, PortfolioContext, TerminationRule,
};
use tct_core::project::{
    brute_force_pareto, is_enumerable, load_instance, Money, ObjectivePoint, ProjectNetwork,
    DEFAULT_ORACLE_CAP,
};
use tct_core::quality::{average_quality, weight_vectors, ReferenceFrame, Rho};

type Outcome = Result<String, String>;

const ALGORITHMS: [Algorithm; 4] = [
    Algorithm::Nsga2,
    Algorithm::Paes,
    Algorithm::Npga2,
    Algorithm::Spea2,
];

fn instance_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances")
}

/// Bundled instances small enough for the exhaustive oracle, by name.
fn enumerable_instances() -> Vec<(String, ProjectNetwork)> {
    let mut out = Vec::new();
    let mut paths: Vec<PathBuf> = fs::read_dir(instance_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "tct"))
        .collect();
    paths.sort();
    for p in paths {
        let net = load_instance(&p).unwrap();
        if is_enumerable(&net, DEFAULT_ORACLE_CAP) {
            out.push((p.file_stem().unwrap().to_string_lossy().into_owned(), net));
        }
    }
    out
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------- criterion 1

fn criterion_1() -> Outcome {
    let instances = enumerable_instances();
    check(instances.len() >= 2, || {
        format!("only {} enumerable instances", instances.len())
    })?;
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    for (name, net) in &instances {
        let frame = ReferenceFrame::estimate(net, Rho::DEFAULT);
        let weights = frame.weights();
        let exact = average_quality(
            &brute_force_pareto(net, DEFAULT_ORACLE_CAP).unwrap(),
            &frame,
            &weights,
        )
        .unwrap();
        let bound = 1.10 * exact;
        let jobs: Vec<(Algorithm, u64)> = ALGORITHMS
            .iter()
            .flat_map(|&a| (0..50).map(move |t| (a, t)))
            .collect();
        let results: Vec<(Algorithm, Option<f64>, Duration)> = jobs
            .par_iter()
            .map(|&(alg, trial)| {
                let params = AlgorithmParams {
                    population_size: 100,
                    max_generations: 500,
                    ..AlgorithmParams::default()
                }
                .with_seed(trial);
                let start = Instant::now();
                let run = run_algorithm(alg, net, &params, |_, _| Control::Continue).unwrap();
                let elapsed = start.elapsed();
                (
                    alg,
                    average_quality(&run.archive, &frame, &weights).ok(),
                    elapsed,
                )
            })
            .collect();
        for alg in ALGORITHMS {
            let mine: Vec<_> = results.iter().filter(|r| r.0 == alg).collect();
            let hits = mine
                .iter()
                .filter(|r| r.1.is_some_and(|aq| aq <= bound))
                .count();
            let time: Duration = mine.iter().map(|r| r.2).sum();
            let worst = mine
                .iter()
                .filter_map(|r| r.1)
                .fold(f64::NEG_INFINITY, f64::max);
            notes.push(format!(
                "{name}/{}: {hits}/50 within 1.10x (exact {exact:.6}, worst {worst:.6}), {:.1}s",
                alg.id(),
                time.as_secs_f64()
            ));
            if hits < 45 || time > Duration::from_secs(60) {
                failures.push(format!("{name}/{}", alg.id()));
            }
        }
    }
    for n in &notes {
        println!("    {n}");
    }
    if failures.is_empty() {
        Ok(format!("{} instances x 4 algorithms", instances.len()))
    } else {
        Err(format!("failed: {}", failures.join(", ")))
    }
}

// ---------------------------------------------------------------- criterion 2

fn random_point(rng: &mut ChaCha8Rng, spread: u64) -> ObjectivePoint {
    let mut p = ObjectivePoint::new(
        rng.random_range(0..spread),
        Money::from_units(rng.random_range(0..spread as i64)),
    );
    if rng.random_ratio(1, 5) {
        p.feasible_time = false;
        p.violation = rng.random_range(1..4);
    }
    p
}

fn naive_dominates(a: &ObjectivePoint, b: &ObjectivePoint) -> bool {
    let (fa, fb) = (
        a.feasible_time && a.feasible_cost,
        b.feasible_time && b.feasible_cost,
    );
    if fa != fb {
        return fa;
    }
    if !fa && a.violation != b.violation {
        return a.violation < b.violation;
    }
    let (ac, bc) = (a.total_cost.cents(), b.total_cost.cents());
    a.duration <= b.duration && ac <= bc && (a.duration < b.duration || ac < bc)
}

/// Peels fronts by comparing each remaining point with every other one.
fn naive_sort(points: &[ObjectivePoint]) -> Vec<Vec<usize>> {
    let mut left: Vec<usize> = (0..points.len()).collect();
    let mut fronts = Vec::new();
    while !left.is_empty() {
        let front: Vec<usize> = left
            .iter()
            .copied()
            .filter(|&i| {
                !left
                    .iter()
                    .any(|&j| naive_dominates(&points[j], &points[i]))
            })
            .collect();
        left.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..1000 {
        let n = rng.random_range(0..=300);
        let spread = [5, 30, 1000][case % 3];
        let pts: Vec<ObjectivePoint> = (0..n).map(|_| random_point(&mut rng, spread)).collect();
        let mut fast = fast_nondominated_sort(&pts);
        for f in &mut fast {
            f.sort_unstable();
        }
        check(fast == naive_sort(&pts), || {
            format!("partition mismatch in case {case} (n = {n})")
        })?;
    }
    Ok("1000 populations, exact partition match".into())
}

// ---------------------------------------------------------------- criterion 3

/// AQ straight from the definition in floating point, with double loops over
/// weights and points.
fn aq_double_loop(points: &[ObjectivePoint], frame: &ReferenceFrame) -> f64 {
    let r_d = if frame.ranges.duration == 0 {
        1.0
    } else {
        frame.ranges.duration as f64
    };
    let r_c = if frame.ranges.cost.cents() == 0 {
        1.0
    } else {
        frame.ranges.cost.to_f64()
    };
    let rho = frame.rho.to_f64();
    let mut total = 0.0;
    for k in 0..50 {
        let w = [k as f64 / 49.0, (49 - k) as f64 / 49.0];
        let mut best = f64::INFINITY;
        for z in points.iter().filter(|z| z.is_feasible()) {
            let t0 = w[0] * (z.duration as f64 - frame.reference_point.duration as f64) / r_d;
            let t1 = w[1] * (z.total_cost.to_f64() - frame.reference_point.cost.to_f64()) / r_c;
            best = best.min(t0.max(t1) + rho * (t0 + t1));
        }
        total += best;
    }
    total / 50.0
}

fn criterion_3() -> Outcome {
    let w = weight_vectors(2, 50);
    check(w.len() == 50 && w.l() == 49, || {
        format!("{} vectors with l = {}", w.len(), w.l())
    })?;
    check(
        w.vectors()
            .iter()
            .all(|v| v.numerators().iter().sum::<u32>() == 49),
        || "weights do not sum to 1".into(),
    )?;
    let mut checked = 0;
    let mut worst_rel: f64 = 0.0;
    for (name, net) in enumerable_instances() {
        let frame = ReferenceFrame::estimate(&net, Rho::DEFAULT);
        let weights = frame.weights();
        let front = brute_force_pareto(&net, DEFAULT_ORACLE_CAP).unwrap();
        let exact = average_quality(&front, &frame, &weights).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 0..200 {
            // Half purely random archives, half random subsets of the exact
            // front mixed with random schedules.
            let size = rng.random_range(1..=60);
            let mut cands: Vec<Individual> = (0..size)
                .map(|_| Individual::evaluated(&net, random_assignment(&net, &mut rng)))
                .collect();
            if i % 2 == 1 {
                cands.extend(
                    front
                        .members()
                        .iter()
                        .filter(|_| rng.random_bool(0.5))
                        .cloned(),
                );
            }
            let archive = ParetoArchive::from_candidates(cands);
            let Ok(aq) = average_quality(&archive, &frame, &weights) else {
                continue;
            };
            check(exact <= aq, || {
                format!("{name}: archive {i} beats the exact front ({aq} < {exact})")
            })?;
            let pts: Vec<ObjectivePoint> = archive.points().cloned().collect();
            let oracle = aq_double_loop(&pts, &frame);
            let rel = (aq - oracle).abs() / aq.abs().max(oracle.abs()).max(f64::MIN_POSITIVE);
            worst_rel = worst_rel.max(rel);
            check(rel <= 1e-9, || {
                format!("{name}: archive {i} AQ {aq} vs double loop {oracle}")
            })?;
            checked += 1;
        }
        let pts: Vec<ObjectivePoint> = front.points().cloned().collect();
        let oracle = aq_double_loop(&pts, &frame);
        check(
            (exact - oracle).abs() <= 1e-9 * exact.abs().max(1e-300),
            || format!("{name}: exact front AQ {exact} vs double loop {oracle}"),
        )?;
    }
    Ok(format!(
        "50 weights (l = 49); {checked} archives, worst relative AQ error {worst_rel:.1e}"
    ))
}

// ---------------------------------------------------------------- criterion 4

/// Number of ways to place `p` identical processors on `r` algorithms.
fn stars_and_bars(r: usize, p: usize) -> usize {
    let mut count = 0;
    let mut counts = vec![0usize; r];
    fn go(i: usize, left: usize, counts: &mut Vec<usize>, count: &mut usize) {
        if i + 1 == counts.len() {
            *count += 1;
            return;
        }
        for c in 0..=left {
            counts[i] = c;
            go(i + 1, left - c, counts, count);
        }
    }
    go(0, p, &mut counts, &mut count);
    count
}

fn criterion_4(trees: &[PathBuf]) -> Outcome {
    for (r, p, want) in [(2, 2, 3), (2, 4, 5), (4, 4, 35)] {
        let got = enumerate_assignments(r, p, None)
            .map_err(|e| e.to_string())?
            .len();
        check(got == want && got == stars_and_bars(r, p), || {
            format!("{r} algorithms on {p} processors: {got} assignments, expected {want}")
        })?;
    }

    let mut rows = 0;
    for tree in trees {
        for trace in files_named(tree, "trace.csv") {
            let text = fs::read_to_string(&trace).unwrap();
            for line in text.lines().skip(1) {
                let cells: Vec<&str> = line.split(',').collect();
                let workers: Vec<f64> = cells[3..].iter().filter_map(|c| c.parse().ok()).collect();
                if workers.is_empty() {
                    continue;
                }
                let merged: f64 = cells[2]
                    .parse()
                    .map_err(|_| format!("{}: merged AQ missing in `{line}`", trace.display()))?;
                check(workers.iter().all(|&w| merged <= w), || {
                    format!(
                        "{}: merged AQ worse than a worker in `{line}`",
                        trace.display()
                    )
                })?;
                rows += 1;
            }
        }
    }
    check(rows > 0, || "no trace rows found".into())?;

    let net = load_instance(instance_dir().join("p5.tct")).unwrap();
    let params = AlgorithmParams {
        max_generations: 60,
        ..AlgorithmParams::default()
    };
    let ctx = PortfolioContext::new(
        &net,
        ALGORITHMS.to_vec(),
        params,
        ReferenceFrame::estimate(&net, Rho::DEFAULT),
    )
    .map_err(|e| e.to_string())?;
    let best = calibrate_best_aq(&ctx, 1, 0)
        .map_err(|e| e.to_string())?
        .best_aq;
    let rule = TerminationRule::new(best, 0.02, 60).map_err(|e| e.to_string())?;
    let table = table4_assignments();
    for run in 0..20u64 {
        let asg: &PortfolioAssignment = &table[run as usize % table.len()];
        let t = run_trial(
            &ctx,
            asg,
            &rule,
            100 + run,
            run as usize,
            Execution::Threaded,
            true,
        )
        .map_err(|e| e.to_string())?;
        let rr = run_trial(
            &ctx,
            asg,
            &rule,
            100 + run,
            run as usize,
            Execution::RoundRobin,
            true,
        )
        .map_err(|e| e.to_string())?;
        check(t == rr, || {
            format!("run {run} ({asg}): round-robin differs from threaded")
        })?;
    }
    Ok(format!(
        "3/5/35 assignments; {rows} trace rows; 20 round-robin runs identical"
    ))
}

// ---------------------------------------------------------------- criterion 5

fn criterion_5(trees: &[PathBuf]) -> Outcome {
    let s = statistics_of(&[10, 20], 2);
    check(s.mean == Some(15.0) && s.variance == 50.0, || {
        format!("{{10,20}} gave {:?} / {}", s.mean, s.variance)
    })?;
    let mut files = 0;
    for tree in trees {
        for name in ["cdf.csv", "cdf_conditional.csv"] {
            for f in files_named(tree, name) {
                let text = fs::read_to_string(&f).unwrap();
                let mut prev = (f64::NEG_INFINITY, 0.0);
                for line in text.lines().skip(1) {
                    let (x, p) = line.split_once(',').unwrap();
                    let (x, p): (f64, f64) = (x.parse().unwrap(), p.parse().unwrap());
                    check(x > prev.0 && p >= prev.1 && p <= 1.0, || {
                        format!("{}: not monotone at `{line}`", f.display())
                    })?;
                    prev = (x, p);
                }
                files += 1;
            }
        }
    }
    check(files > 0, || "no CDF files found".into())?;
    Ok(format!("mean 15, variance 50; {files} CDF files monotone"))
}

// ---------------------------------------------------------------- criterion 6

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn matrix(values: &[Vec<f64>]) -> DecisionMatrix {
    decision_matrix(
        values,
        &labels("a", values.len()),
        &labels("x", values[0].len()),
    )
    .unwrap()
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for case in 0..1000 {
        let n = rng.random_range(1..=30);
        let col: Vec<f64> = (0..n)
            .map(|_| 10f64.powf(rng.random_range(-3.0..6.0)))
            .collect();
        let rows: Vec<Vec<f64>> = col.iter().map(|&v| vec![v]).collect();
        let pv = priority_vector(&matrix(&rows), 0).map_err(|e| e.to_string())?;
        let total: f64 = col.iter().sum();
        for (p, v) in pv.iter().zip(&col) {
            let want = v / total;
            check((p - want).abs() <= 1e-9 * want, || {
                format!("case {case}: {p} vs {want}")
            })?;
        }
    }
    for case in 0..1000 {
        let n = rng.random_range(1..=12);
        let g = rng.random_range(1..=4);
        let values: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..g).map(|_| rng.random_range(0.5..500.0)).collect())
            .collect();
        let scales: Vec<f64> = (0..g)
            .map(|_| 10f64.powf(rng.random_range(-3.0..3.0)))
            .collect();
        let scaled: Vec<Vec<f64>> = values
            .iter()
            .map(|row| row.iter().zip(&scales).map(|(v, s)| v * s).collect())
            .collect();
        let a = rank_alternatives(&matrix(&values), None).map_err(|e| e.to_string())?;
        let b = rank_alternatives(&matrix(&scaled), None).map_err(|e| e.to_string())?;
        check(a.ranks == b.ranks, || {
            format!("case {case}: ranks changed under scaling")
        })?;
    }
    let r =
        rank_alternatives(&matrix(&[vec![100.0], vec![300.0]]), None).map_err(|e| e.to_string())?;
    check(r.priorities == vec![0.25, 0.75], || {
        format!("(100, 300) gave {:?}", r.priorities)
    })?;
    Ok("identity and scale invariance on 1000 cases each; (100,300) -> (0.25,0.75)".into())
}

// ------------------------------------------------------ experiments (7 and 8)

fn files_named(root: &Path, name: &str) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.file_name().is_some_and(|n| n == name) {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

fn tree_hashes(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, Sha256::digest(fs::read(&p).unwrap()).to_vec());
            }
        }
    }
    out
}

fn run_experiment(config: &Path, out: &Path, workers: usize) -> Result<Duration, String> {
    let start = Instant::now();
    let o = Command::new(env!("CARGO_BIN_EXE_tct"))
        .args(["--workers", &workers.to_string(), "--out"])
        .arg(out)
        .arg("experiment")
        .arg(config)
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(o.status.success(), || {
        format!(
            "experiment exited with {:?}: {}",
            o.status.code(),
            String::from_utf8_lossy(&o.stderr)
        )
    })?;
    Ok(elapsed)
}

fn desk_config(instance: &Path) -> String {
    format!(
        r#"seed_base = 2026
trials = 50
roster = ["nsga2", "paes", "npga2", "spea2"]
processors = 4
assignments = "table4"
record_trace = true

[[instance]]
path = "{}"
"#,
        instance.display()
    )
}

fn mixed_config(instance: &Path) -> String {
    format!(
        r#"seed_base = 7
trials = 50
roster = ["spea2", "paes"]
processors = 2
assignments = "all"
record_trace = true
formats = ["csv", "json"]

[params]
population_size = 40
max_generations = 100

[[instance]]
path = "{}"

[[instance]]
name = "generated"
generate = {{ activities = 8, modes = [2, 3], density = 0.3, seed = 11 }}
"#,
        instance.display()
    )
}

struct Experiments {
    desk: PathBuf,
    desk_elapsed: Duration,
    trees: Vec<(PathBuf, PathBuf)>,
}

fn run_experiments(tmp: &Path) -> Result<Experiments, String> {
    let desk_cfg = tmp.join("desk.toml");
    fs::write(&desk_cfg, desk_config(&instance_dir().join("p5.tct"))).unwrap();
    let mixed_cfg = tmp.join("mixed.toml");
    fs::write(&mixed_cfg, mixed_config(&instance_dir().join("p6.tct"))).unwrap();

    let desk = tmp.join("desk-a");
    let desk_elapsed = run_experiment(&desk_cfg, &desk, 4)?;
    run_experiment(&desk_cfg, &tmp.join("desk-b"), 1)?;
    run_experiment(&mixed_cfg, &tmp.join("mixed-a"), 2)?;
    run_experiment(&mixed_cfg, &tmp.join("mixed-b"), 3)?;
    Ok(Experiments {
        desk: desk.clone(),
        desk_elapsed,
        trees: vec![
            (desk, tmp.join("desk-b")),
            (tmp.join("mixed-a"), tmp.join("mixed-b")),
        ],
    })
}

fn criterion_7(exp: &Experiments) -> Outcome {
    let mut files = 0;
    for (a, b) in &exp.trees {
        let (ha, hb) = (tree_hashes(a), tree_hashes(b));
        check(ha.keys().eq(hb.keys()), || {
            format!("{} and {} hold different files", a.display(), b.display())
        })?;
        for (k, v) in &ha {
            check(hb[k] == *v, || format!("{k} differs between reruns"))?;
        }
        files += ha.len();
    }
    Ok(format!(
        "{files} files identical by SHA-256 across reruns with different worker counts"
    ))
}

fn criterion_8(exp: &Experiments) -> Outcome {
    let limit = Duration::from_secs(30 * 60);
    check(exp.desk_elapsed <= limit, || {
        format!("took {:.0}s", exp.desk_elapsed.as_secs_f64())
    })?;
    let text = fs::read_to_string(exp.desk.join("ranks.json")).map_err(|e| e.to_string())?;
    let audit: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let priorities: Vec<f64> = audit["result"]["priorities"]
        .as_array()
        .ok_or("ranks.json has no priorities")?
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    check(priorities.len() == 16, || {
        format!("{} ranked alternatives", priorities.len())
    })?;
    let sum: f64 = priorities.iter().sum();
    check((sum - 1.0).abs() <= 1e-9, || {
        format!("priorities sum to {sum}")
    })?;
    let ranks = fs::read_to_string(exp.desk.join("ranks.csv")).map_err(|e| e.to_string())?;
    check(ranks.lines().count() == 17, || {
        "ranks.csv does not have 16 rows".into()
    })?;
    let summary = fs::read_to_string(exp.desk.join("summary.csv")).map_err(|e| e.to_string())?;
    check(summary.lines().count() == 17, || {
        "summary.csv does not have 16 rows".into()
    })?;
    for rec in files_named(&exp.desk, "record.csv") {
        let n = fs::read_to_string(&rec).unwrap().lines().count();
        check(n == 51, || {
            format!("{} has {} trials", rec.display(), n - 1)
        })?;
    }
    Ok(format!(
        "16 assignments x 50 trials on p5 in {:.1}s; priorities sum to 1 (error {:.1e})",
        exp.desk_elapsed.as_secs_f64(),
        (sum - 1.0).abs()
    ))
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().unwrap();
    let experiments = run_experiments(tmp.path());
    let trees: Vec<PathBuf> = match &experiments {
        Ok(e) => e
            .trees
            .iter()
            .flat_map(|(a, b)| [a.clone(), b.clone()])
            .collect(),
        Err(_) => Vec::new(),
    };
    let from_experiments = |f: fn(&Experiments) -> Outcome| match &experiments {
        Ok(e) => f(e),
        Err(msg) => Err(msg.clone()),
    };

    let results: Vec<(&str, Outcome)> = vec![
        ("1 oracle equivalence", criterion_1()),
        ("2 sorting oracle", criterion_2()),
        ("3 AQ machinery", criterion_3()),
        ("4 portfolio protocol", criterion_4(&trees)),
        ("5 statistics", criterion_5(&trees)),
        ("6 AHP", criterion_6()),
        ("7 determinism", from_experiments(criterion_7)),
        ("8 desk-scale experiment", from_experiments(criterion_8)),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(detail) => println!("criterion {name}: PASS ({detail})"),
            Err(detail) => {
                failed += 1;
                println!("criterion {name}: FAIL ({detail})");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
