//! Exhaustive Pareto front for small instances.

use std::collections::BTreeMap;

use num_bigint::BigUint;

use super::money::Money;
use super::network::{Assignment, ProjectNetwork};
use crate::moea::{Individual, ParetoArchive};

/// Default largest schedule count the oracle will sweep.
pub const DEFAULT_ORACLE_CAP: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("instance has {schedules} schedules, above the oracle cap of {cap}")]
pub struct OracleRefused {
    pub schedules: BigUint,
    pub cap: u64,
}

/// Whether `brute_force_pareto` accepts the network under `cap`.
pub fn is_enumerable(network: &ProjectNetwork, cap: u64) -> bool {
    network.count_schedules() <= BigUint::from(cap)
}

/// Exact non-dominated set over all feasible assignments, minimizing
/// (duration, total cost).
///
/// One assignment is kept per non-dominated objective point: the
/// lexicographically smallest mode vector reaching it. Members are ordered by
/// ascending duration.
pub fn brute_force_pareto(
    network: &ProjectNetwork,
    cap: u64,
) -> Result<ParetoArchive, OracleRefused> {
    let schedules = network.count_schedules();
    if schedules > BigUint::from(cap) {
        return Err(OracleRefused { schedules, cap });
    }
    let counts: Vec<usize> = network.mode_counts().collect();
    let n = counts.len();
    // cheapest (cost, assignment) seen per duration
    let mut best: BTreeMap<u64, (Money, Vec<usize>)> = BTreeMap::new();
    let mut modes = vec![0usize; n];
    let mut any_feasible = false;
    'sweep: loop {
        let z = network.evaluate_unchecked(&modes);
        if z.is_feasible() {
            any_feasible = true;
            match best.get_mut(&z.duration) {
                Some(slot) => {
                    if z.total_cost < slot.0 || (z.total_cost == slot.0 && modes < slot.1) {
                        *slot = (z.total_cost, modes.clone());
                    }
                }
                None => {
                    best.insert(z.duration, (z.total_cost, modes.clone()));
                }
            }
        }
        // odometer increment, last activity fastest
        for k in (0..n).rev() {
            modes[k] += 1;
            if modes[k] < counts[k] {
                continue 'sweep;
            }
            modes[k] = 0;
        }
        break;
    }
    if !any_feasible {
        log::warn!("no feasible assignment; exact front is empty");
    }
    // sweep by ascending duration keeping strictly decreasing cost
    let mut members = Vec::new();
    let mut lowest: Option<Money> = None;
    for (duration, (cost, modes)) in best {
        if lowest.is_none_or(|c| cost < c) {
            lowest = Some(cost);
            let assignment = Assignment::new(modes);
            let objectives = network.point(duration, cost);
            members.push(Individual {
                assignment,
                objectives,
            });
        }
    }
    Ok(ParetoArchive::from_sorted_front(members))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::project::{Activity, ExecutionMode};

    fn one_activity(modes: &[(u32, i64)], rate: i64) -> ProjectNetwork {
        ProjectNetwork::new(
            vec![Activity {
                id: 1,
                successors: vec![],
                modes: modes
                    .iter()
                    .map(|&(d, c)| ExecutionMode::new(d, Money::from_units(c)))
                    .collect(),
            }],
            Money::from_units(rate),
            None,
            None,
        )
        .unwrap()
    }

    #[test]
    fn strict_trade_off_keeps_both() {
        let front = brute_force_pareto(&one_activity(&[(5, 100), (3, 200)], 0), 100).unwrap();
        let pts: Vec<_> = front
            .members()
            .iter()
            .map(|m| m.objectives.values())
            .collect();
        assert_eq!(pts, vec![[3, 20000], [5, 10000]]);
    }

    #[test]
    fn dominated_twin_dropped() {
        let front = brute_force_pareto(&one_activity(&[(5, 100), (5, 200)], 0), 100).unwrap();
        assert_eq!(front.len(), 1);
        assert_eq!(front.members()[0].assignment.modes(), &[0]);
    }

    #[test]
    fn refuses_over_cap() {
        let net = one_activity(&[(5, 100), (3, 200), (2, 300)], 0);
        assert!(brute_force_pareto(&net, 2).is_err());
        assert!(!is_enumerable(&net, 2));
    }

    #[test]
    fn infeasible_everywhere_gives_empty_front() {
        let net = ProjectNetwork::new(
            vec![Activity {
                id: 1,
                successors: vec![],
                modes: vec![ExecutionMode::new(5, Money::from_units(1))],
            }],
            Money::ZERO,
            Some(3),
            None,
        )
        .unwrap();
        assert!(brute_force_pareto(&net, 10).unwrap().is_empty());
    }
}
