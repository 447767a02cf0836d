mod common;

use common::{bundled, feasible_point, naive_dominates, point, small_network};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tct_core::moea::{
    crossover_at, crossover_two_point, dominates, mutate_mode_flip, niche_count, paes_grid_locate,
    random_assignment, run_algorithm, spea2_fitness, spea2_truncate, Algorithm, AlgorithmParams,
    Control, GridBounds, ParetoArchive,
};
use tct_core::project::{brute_force_pareto, Assignment, DEFAULT_ORACLE_CAP};

fn quick(seed: u64) -> AlgorithmParams {
    AlgorithmParams {
        population_size: 20,
        archive_size: 20,
        max_generations: 15,
        seed,
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dominance_is_a_strict_order(a in point(), b in point(), c in point()) {
        prop_assert!(!dominates(&a, &a));
        prop_assert!(!(dominates(&a, &b) && dominates(&b, &a)));
        if dominates(&a, &b) && dominates(&b, &c) {
            prop_assert!(dominates(&a, &c));
        }
        prop_assert_eq!(dominates(&a, &b), naive_dominates(&a, &b));
    }

    #[test]
    fn spea2_raw_fitness_matches_definition(points in prop::collection::vec(point(), 1..60)) {
        let f = spea2_fitness(&points);
        let n = points.len();
        let strength: Vec<usize> = (0..n)
            .map(|i| (0..n).filter(|&j| naive_dominates(&points[i], &points[j])).count())
            .collect();
        for i in 0..n {
            let raw: usize = (0..n)
                .filter(|&j| naive_dominates(&points[j], &points[i]))
                .map(|j| strength[j])
                .sum();
            prop_assert_eq!(f.strength[i], strength[i]);
            prop_assert_eq!(f.raw[i], raw);
            prop_assert!(f.density[i] > 0.0 && f.density[i] <= 0.5);
            if raw == 0 {
                prop_assert!(f.value(i) < 1.0);
            }
        }
    }

    #[test]
    fn spea2_truncation_keeps_extremes(
        points in prop::collection::vec(feasible_point(), 3..80),
        cap in 2usize..20,
    ) {
        let kept = spea2_truncate(&points, cap);
        prop_assert_eq!(kept.len(), cap.min(points.len()));
        prop_assert!(kept.windows(2).all(|w| w[0] < w[1]));
        let min_d = points.iter().map(|p| p.duration).min().unwrap();
        let min_c = points.iter().map(|p| p.total_cost).min().unwrap();
        prop_assert!(kept.iter().any(|&i| points[i].duration == min_d));
        prop_assert!(kept.iter().any(|&i| points[i].total_cost == min_c));
    }

    #[test]
    fn niche_count_is_bounded_and_symmetric(
        a in (0.0f64..1.0, 0.0f64..1.0),
        b in (0.0f64..1.0, 0.0f64..1.0),
        sigma in 0.01f64..1.0,
    ) {
        let (a, b) = ([a.0, a.1], [b.0, b.1]);
        let ab = niche_count(&a, &[b], sigma);
        let ba = niche_count(&b, &[a], sigma);
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((niche_count(&a, &[a], sigma) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_cells_stay_in_range(
        points in prop::collection::vec(feasible_point(), 1..50),
        depth in 1u32..8,
    ) {
        let bounds = GridBounds::of(&points);
        let per_axis = 1u64 << depth;
        for p in &points {
            let id = paes_grid_locate(p, &bounds, depth);
            prop_assert!(id < per_axis * per_axis);
        }
        // Ordering along an axis is preserved by the cell index.
        for p in &points {
            for q in &points {
                if p.duration < q.duration {
                    let ip = paes_grid_locate(p, &bounds, depth) >> depth;
                    let iq = paes_grid_locate(q, &bounds, depth) >> depth;
                    prop_assert!(ip <= iq);
                }
            }
        }
    }

    #[test]
    fn operators_keep_assignments_valid(net in small_network(), seed in any::<u64>(), rate in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_assignment(&net, &mut rng);
        let b = random_assignment(&net, &mut rng);
        prop_assert!(net.check_assignment(&a).is_ok());
        let (c1, c2) = crossover_two_point(&a, &b, 1.0, &mut rng);
        let m = mutate_mode_flip(&c1, &net, rate, &mut rng);
        for x in [&c1, &c2, &m] {
            prop_assert!(net.check_assignment(x).is_ok());
        }
        // Crossover only exchanges genes: each locus of a child comes from a parent
        // and the two children together hold both parents' genes.
        for i in 0..a.len() {
            let pair = (c1.modes()[i], c2.modes()[i]);
            prop_assert!(pair == (a.modes()[i], b.modes()[i]) || pair == (b.modes()[i], a.modes()[i]));
        }
    }
}

#[test]
fn crossover_swaps_exactly_the_segment() {
    let a = Assignment::new(vec![0, 0, 0, 0, 0]);
    let b = Assignment::new(vec![1, 1, 1, 1, 1]);
    let (c1, c2) = crossover_at(&a, &b, 1, 3);
    assert_eq!(c1.modes(), &[0, 1, 1, 0, 0]);
    assert_eq!(c2.modes(), &[1, 0, 0, 1, 1]);
}

#[test]
fn full_mutation_changes_every_multi_mode_locus() {
    let net = bundled("p6");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = random_assignment(&net, &mut rng);
    let m = mutate_mode_flip(&a, &net, 1.0, &mut rng);
    for (i, n) in net.mode_counts().enumerate() {
        assert_eq!(a.modes()[i] != m.modes()[i], n > 1);
    }
}

#[test]
fn same_seed_same_archive() {
    let net = bundled("p5");
    for alg in Algorithm::ALL {
        let a = run_algorithm(alg, &net, &quick(9), |_, _| Control::Continue).unwrap();
        let b = run_algorithm(alg, &net, &quick(9), |_, _| Control::Continue).unwrap();
        assert_eq!(a, b, "{alg}");
        assert!(!a.archive.is_empty(), "{alg}");
    }
}

#[test]
fn archives_never_beat_the_exact_front() {
    let net = bundled("p6");
    let front = brute_force_pareto(&net, DEFAULT_ORACLE_CAP).unwrap();
    for alg in Algorithm::ALL {
        for seed in 0..3 {
            let out = run_algorithm(alg, &net, &quick(seed), |_, _| Control::Continue).unwrap();
            let members = out.archive.members();
            for m in members {
                assert!(net.check_assignment(&m.assignment).is_ok());
                assert_eq!(net.evaluate_unchecked(m.assignment.modes()), m.objectives);
                // Nothing found can dominate a true Pareto-optimal point.
                for f in front.members() {
                    assert!(!dominates(&m.objectives, &f.objectives), "{alg}");
                }
                for o in members {
                    assert!(
                        !dominates(&o.objectives, &m.objectives),
                        "{alg}: archive not mutually non-dominated"
                    );
                }
            }
        }
    }
}

#[test]
fn stop_hook_ends_the_run() {
    let net = bundled("p6");
    let mut seen = Vec::new();
    let out = run_algorithm(Algorithm::Nsga2, &net, &quick(1), |g, _| {
        seen.push(g);
        if g == 4 {
            Control::Stop
        } else {
            Control::Continue
        }
    })
    .unwrap();
    assert_eq!(out.generations, 4);
    assert_eq!(seen, vec![1, 2, 3, 4]);
}

#[test]
fn invalid_params_rejected() {
    let net = bundled("p6");
    let bad = AlgorithmParams {
        population_size: 0,
        ..Default::default()
    };
    assert!(run_algorithm(Algorithm::Paes, &net, &bad, |_, _| Control::Continue).is_err());
}

#[test]
fn merged_archive_is_nondominated_union() {
    let net = bundled("p5");
    let a = run_algorithm(Algorithm::Paes, &net, &quick(1), |_, _| Control::Continue).unwrap();
    let b = run_algorithm(Algorithm::Nsga2, &net, &quick(2), |_, _| Control::Continue).unwrap();
    let merged = ParetoArchive::merge([&a.archive, &b.archive]);
    for m in a.archive.members().iter().chain(b.archive.members()) {
        let covered = merged
            .members()
            .iter()
            .any(|x| x.objectives == m.objectives || dominates(&x.objectives, &m.objectives));
        assert!(covered);
    }
}
