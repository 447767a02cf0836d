use proptest::prelude::*;
use tct_core::ahp::{
    decision_matrix, parse_objective_csv, priority_vector, rank_alternatives, rank_with_audit,
    AhpError,
};

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn matrix(obj: &[Vec<f64>]) -> tct_core::ahp::DecisionMatrix {
    decision_matrix(obj, &labels("a", obj.len()), &labels("x", obj[0].len())).unwrap()
}

#[test]
fn worked_two_alternative_case() {
    let m = matrix(&[vec![100.0], vec![300.0]]);
    let r = rank_alternatives(&m, None).unwrap();
    assert_eq!(r.priorities, vec![0.25, 0.75]);
    assert_eq!(r.ranks, vec![1, 2]);
    assert_eq!(
        r.to_csv(),
        "alternative,priority,rank\na0,0.2500000000,1\na1,0.7500000000,2\n"
    );
}

#[test]
fn identical_alternatives_all_tie_first() {
    let m = matrix(&[vec![5.0, 2.0], vec![5.0, 2.0], vec![5.0, 2.0]]);
    let r = rank_alternatives(&m, None).unwrap();
    assert_eq!(r.ranks, vec![1, 1, 1]);
    assert!(r.tied.iter().all(|&t| t));
}

#[test]
fn competition_ranking_skips_after_ties() {
    let m = matrix(&[vec![3.0], vec![1.0], vec![1.0], vec![2.0]]);
    assert_eq!(rank_alternatives(&m, None).unwrap().ranks, vec![4, 1, 1, 3]);
}

#[test]
fn non_positive_values_rejected() {
    let e = decision_matrix(&[vec![1.0], vec![0.0]], &labels("a", 2), &labels("x", 1)).unwrap_err();
    assert!(matches!(e, AhpError::NonPositive { .. }));
}

#[test]
fn explicit_weights_checked() {
    let m = matrix(&[vec![1.0, 4.0], vec![3.0, 4.0]]);
    assert!(rank_alternatives(&m, Some(&[0.5])).is_err());
    assert!(rank_alternatives(&m, Some(&[0.7, 0.7])).is_err());
    let r = rank_with_audit(&m, Some(&[1.0, 0.0])).unwrap();
    assert_eq!(r.priority_vectors.len(), 2);
    assert!((r.result.priorities[0] - 0.25).abs() < 1e-12);
}

#[test]
fn csv_input_round_trip() {
    let text = "alternative,attribute,obj_value\n2/0,p5,8\n2/0,p6,4\n0/2,p5,6\n0/2,p6,4\n";
    let table = parse_objective_csv(text).unwrap();
    assert_eq!(table.alternatives, ["2/0", "0/2"]);
    assert_eq!(table.to_csv(), text);
    let missing = "alternative,attribute,obj_value\na,x,1\na,y,1\nb,x,1\n";
    assert!(matches!(
        parse_objective_csv(missing).and_then(|t| t.decision_matrix()),
        Err(AhpError::MissingCell { .. })
    ));
}

fn positive_matrix(max_n: usize, max_g: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..=max_n, 1..=max_g)
        .prop_flat_map(|(n, g)| prop::collection::vec(prop::collection::vec(0.5f64..500.0, g), n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn priority_vector_of_consistent_matrix_is_the_normalized_column(
        col in prop::collection::vec(1e-3f64..1e6, 1..30),
    ) {
        let obj: Vec<Vec<f64>> = col.iter().map(|&v| vec![v]).collect();
        let m = matrix(&obj);
        let pv = priority_vector(&m, 0).unwrap();
        let total: f64 = col.iter().sum();
        for (p, v) in pv.iter().zip(&col) {
            prop_assert!((p - v / total).abs() <= 1e-9 * (v / total).max(1e-300), "{p} vs {}", v / total);
        }
    }

    #[test]
    fn ranks_invariant_under_column_scaling(
        obj in positive_matrix(12, 4),
        scales in prop::collection::vec(1e-3f64..1e3, 4),
    ) {
        let scaled: Vec<Vec<f64>> = obj
            .iter()
            .map(|row| row.iter().zip(&scales).map(|(v, s)| v * s).collect())
            .collect();
        let a = rank_alternatives(&matrix(&obj), None).unwrap();
        let b = rank_alternatives(&matrix(&scaled), None).unwrap();
        prop_assert_eq!(a.ranks, b.ranks);
        let sum: f64 = b.priorities.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-9);
    }
}
