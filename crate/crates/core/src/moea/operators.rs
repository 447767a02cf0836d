//! Variation operators on the mode-index encoding.

use rand::Rng;

use crate::project::{Assignment, ProjectNetwork};

pub fn random_assignment<R: Rng>(network: &ProjectNetwork, rng: &mut R) -> Assignment {
    Assignment::new(
        network
            .mode_counts()
            .map(|n| rng.random_range(0..n))
            .collect(),
    )
}

/// Two-point crossover applied with probability `rate`.
///
/// Cut points `i <= j` are drawn uniformly from `0..=len` and the children
/// swap the segment `[i, j)`. Parents shorter than 2 are returned unchanged.
pub fn crossover_two_point<R: Rng>(
    p1: &Assignment,
    p2: &Assignment,
    rate: f64,
    rng: &mut R,
) -> (Assignment, Assignment) {
    let n = p1.len();
    debug_assert_eq!(n, p2.len());
    if n < 2 || !rng.random_bool(rate) {
        return (p1.clone(), p2.clone());
    }
    let a = rng.random_range(0..=n);
    let b = rng.random_range(0..=n);
    crossover_at(p1, p2, a.min(b), a.max(b))
}

/// Swaps the segment `[start, end)` between two parents.
pub fn crossover_at(
    p1: &Assignment,
    p2: &Assignment,
    start: usize,
    end: usize,
) -> (Assignment, Assignment) {
    let mut c1 = p1.clone();
    let mut c2 = p2.clone();
    c1.modes_mut()[start..end].copy_from_slice(&p2.modes()[start..end]);
    c2.modes_mut()[start..end].copy_from_slice(&p1.modes()[start..end]);
    (c1, c2)
}

/// Each locus is, with probability `rate`, resampled uniformly among the
/// activity's other modes. Single-mode activities never change.
pub fn mutate_mode_flip<R: Rng>(
    a: &Assignment,
    network: &ProjectNetwork,
    rate: f64,
    rng: &mut R,
) -> Assignment {
    let mut out = a.clone();
    for (slot, n) in out.modes_mut().iter_mut().zip(network.mode_counts()) {
        if rng.random_bool(rate) && n > 1 {
            *slot = resample_other(*slot, n, rng);
        }
    }
    out
}

/// A different mode index in `0..n`, uniformly. Requires `n > 1`.
pub(crate) fn resample_other<R: Rng>(current: usize, n: usize, rng: &mut R) -> usize {
    let r = rng.random_range(0..n - 1);
    if r >= current {
        r + 1
    } else {
        r
    }
}
