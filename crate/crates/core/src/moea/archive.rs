use std::collections::HashSet;
use std::fmt::Write as _;

use super::dominance::{dominates, nondominated_indices};
use crate::project::{Assignment, ObjectivePoint, ProjectNetwork};

/// A solution together with its image in objective space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Individual {
    pub assignment: Assignment,
    pub objectives: ObjectivePoint,
}

impl Individual {
    /// Evaluates `assignment` on `network`. The assignment must be valid.
    pub fn evaluated(network: &ProjectNetwork, assignment: Assignment) -> Self {
        let objectives = network.evaluate_unchecked(assignment.modes());
        Individual {
            assignment,
            objectives,
        }
    }

    fn canonical_key(&self) -> (u64, i64, &[usize]) {
        (
            self.objectives.duration,
            self.objectives.total_cost.cents(),
            self.assignment.modes(),
        )
    }
}

/// A set of mutually non-dominated individuals in canonical order
/// (ascending duration, then cost, then mode vector).
///
/// Distinct assignments mapping to the same objective point may coexist;
/// repeated assignments never do.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParetoArchive {
    members: Vec<Individual>,
}

impl ParetoArchive {
    pub fn new() -> Self {
        Self::default()
    }

    /// Non-dominated, de-duplicated subset of `candidates`.
    pub fn from_candidates(candidates: impl IntoIterator<Item = Individual>) -> Self {
        let mut seen = HashSet::new();
        let unique: Vec<Individual> = candidates
            .into_iter()
            .filter(|ind| seen.insert(ind.assignment.clone()))
            .collect();
        let points: Vec<ObjectivePoint> = unique.iter().map(|i| i.objectives).collect();
        let mut keep = vec![false; unique.len()];
        for i in nondominated_indices(&points) {
            keep[i] = true;
        }
        let mut members: Vec<Individual> = unique
            .into_iter()
            .zip(keep)
            .filter_map(|(ind, k)| k.then_some(ind))
            .collect();
        members.sort_by(|a, b| a.canonical_key().cmp(&b.canonical_key()));
        ParetoArchive { members }
    }

    /// Wraps members already known to form a canonical non-dominated set.
    pub(crate) fn from_sorted_front(members: Vec<Individual>) -> Self {
        debug_assert!(members
            .windows(2)
            .all(|w| w[0].canonical_key() <= w[1].canonical_key()));
        ParetoArchive { members }
    }

    /// Non-dominated union of several archives.
    pub fn merge<'a>(archives: impl IntoIterator<Item = &'a ParetoArchive>) -> Self {
        Self::from_candidates(archives.into_iter().flat_map(|a| a.members.iter().cloned()))
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn into_members(self) -> Vec<Individual> {
        self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = &ObjectivePoint> {
        self.members.iter().map(|m| &m.objectives)
    }

    /// Feasible member points only.
    pub fn feasible_points(&self) -> impl Iterator<Item = &ObjectivePoint> {
        self.points().filter(|p| p.is_feasible())
    }

    /// Adds `ind` unless an existing member dominates it or has the same
    /// assignment. Members dominated by `ind` are removed.
    pub fn insert(&mut self, ind: Individual) -> bool {
        if self
            .members
            .iter()
            .any(|m| m.assignment == ind.assignment || dominates(&m.objectives, &ind.objectives))
        {
            return false;
        }
        self.members
            .retain(|m| !dominates(&ind.objectives, &m.objectives));
        let pos = self
            .members
            .partition_point(|m| m.canonical_key() < ind.canonical_key());
        self.members.insert(pos, ind);
        true
    }

    /// CSV with header `duration,cost,modes`; modes are space separated.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("duration,cost,modes\n");
        for m in &self.members {
            let _ = writeln!(
                out,
                "{},{},{}",
                m.objectives.duration, m.objectives.total_cost, m.assignment
            );
        }
        out
    }
}
