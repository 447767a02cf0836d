#![allow(dead_code)]

use std::path::PathBuf;

use proptest::prelude::*;
use tct_core::project::{
    generate_instance, load_instance, GeneratorParams, Money, ObjectivePoint, ProjectNetwork,
};

pub fn instance_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances")
}

pub fn bundled(name: &str) -> ProjectNetwork {
    load_instance(instance_dir().join(format!("{name}.tct"))).expect("bundled instance loads")
}

pub fn p(d: u64, c: i64) -> ObjectivePoint {
    ObjectivePoint::new(d, Money::from_units(c))
}

/// Constrained dominance written out case by case, independently of the
/// library version.
pub fn naive_dominates(a: &ObjectivePoint, b: &ObjectivePoint) -> bool {
    let fa = a.feasible_time && a.feasible_cost;
    let fb = b.feasible_time && b.feasible_cost;
    if fa && !fb {
        return true;
    }
    if !fa && fb {
        return false;
    }
    if !fa && !fb && a.violation != b.violation {
        return a.violation < b.violation;
    }
    let no_worse = a.duration <= b.duration && a.total_cost.cents() <= b.total_cost.cents();
    let better = a.duration < b.duration || a.total_cost.cents() < b.total_cost.cents();
    no_worse && better
}

/// Points on a small grid so ties and duplicates are common; about one in
/// five is infeasible with a small violation.
pub fn point() -> impl Strategy<Value = ObjectivePoint> {
    (0u64..20, 0i64..20, 0u8..5, 0u128..3).prop_map(|(d, c, f, v)| {
        let mut pt = p(d, c);
        if f == 0 {
            pt.feasible_time = false;
            pt.violation = v + 1;
        }
        pt
    })
}

pub fn feasible_point() -> impl Strategy<Value = ObjectivePoint> {
    (0u64..60, 0i64..60).prop_map(|(d, c)| p(d, c))
}

/// Small random networks, at most 4096 schedules.
pub fn small_network() -> impl Strategy<Value = ProjectNetwork> {
    (1usize..7, 1usize..4, 0usize..3, 1u32..10, any::<u64>()).prop_map(|(n, lo, extra, d, seed)| {
        let hi = lo + extra;
        generate_instance(&GeneratorParams {
            n_activities: n,
            mode_range: (lo, hi.min(4)),
            density: d as f64 / 10.0,
            seed,
        })
        .expect("valid generator parameters")
    })
}
