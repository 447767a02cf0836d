//! Seeded random instances with a standard time-cost trade-off shape.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::money::Money;
use super::network::{Activity, ExecutionMode, ProjectNetwork};

/// Edges only join activities at most this many positions apart.
pub const EDGE_WINDOW: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorParams {
    pub n_activities: usize,
    /// Inclusive range of mode counts per activity.
    pub mode_range: (usize, usize),
    /// Probability of each candidate forward edge, in `(0, 1]`.
    pub density: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenerateError {
    #[error("need at least one activity")]
    NoActivities,
    #[error("invalid mode range [{0}, {1}]: need 1 <= min <= max <= 32")]
    ModeRange(usize, usize),
    #[error("density {0} is outside (0, 1]")]
    Density(f64),
}

/// Random DAG over activities `1..=n` (edges only point forward) with a
/// uniformly drawn mode count per activity.
pub fn generate_instance(params: &GeneratorParams) -> Result<ProjectNetwork, GenerateError> {
    let (lo, hi) = params.mode_range;
    if lo == 0 || lo > hi || hi > 32 {
        return Err(GenerateError::ModeRange(lo, hi));
    }
    if params.n_activities == 0 {
        return Err(GenerateError::NoActivities);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let counts: Vec<usize> = (0..params.n_activities)
        .map(|_| rng.random_range(lo..=hi))
        .collect();
    build(&counts, params.density, &mut rng)
}

/// Like [`generate_instance`] but with the mode count of every activity fixed.
pub fn generate_with_mode_counts(
    mode_counts: &[usize],
    density: f64,
    seed: u64,
) -> Result<ProjectNetwork, GenerateError> {
    if mode_counts.is_empty() {
        return Err(GenerateError::NoActivities);
    }
    if let Some(&bad) = mode_counts.iter().find(|&&c| c == 0 || c > 32) {
        return Err(GenerateError::ModeRange(bad, bad));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    build(mode_counts, density, &mut rng)
}

fn build(
    counts: &[usize],
    density: f64,
    rng: &mut ChaCha8Rng,
) -> Result<ProjectNetwork, GenerateError> {
    if !(density > 0.0 && density <= 1.0) {
        return Err(GenerateError::Density(density));
    }
    let n = counts.len();
    let mut successors = vec![Vec::new(); n];
    for j in 1..n {
        for succ in &mut successors[j.saturating_sub(EDGE_WINDOW)..j] {
            if rng.random_bool(density) {
                succ.push(j + 1);
            }
        }
    }
    let activities = counts
        .iter()
        .zip(successors)
        .enumerate()
        .map(|(i, (&count, successors))| Activity {
            id: i + 1,
            modes: trade_off_modes(count, rng),
            successors,
        })
        .collect();
    let indirect_rate = Money::from_units(rng.random_range(100..=300));
    Ok(ProjectNetwork::new(activities, indirect_rate, None, None)
        .expect("forward-only edges always form a valid DAG"))
}

/// Modes ordered from slowest/cheapest to fastest/most expensive. Durations
/// strictly decrease and crash slopes increase, giving a convex cost curve.
fn trade_off_modes(count: usize, rng: &mut ChaCha8Rng) -> Vec<ExecutionMode> {
    let longest: u32 = rng.random_range((2 * count as u32).max(8)..=(4 * count as u32).max(30));
    let mut durations = vec![longest];
    for k in 1..count {
        let prev = durations[k - 1];
        let remaining = (count - k) as u32;
        // leave room for the remaining modes to stay >= 1 day
        let max_step = ((prev - remaining) / 2).max(1);
        durations.push(prev - rng.random_range(1..=max_step));
    }
    let mut slopes: Vec<i64> = (1..count).map(|_| rng.random_range(40..=400)).collect();
    slopes.sort_unstable();
    let mut cost = rng.random_range(500..=5000i64);
    let mut modes = vec![ExecutionMode::new(durations[0], Money::from_units(cost))];
    for k in 1..count {
        cost += slopes[k - 1] * (durations[k - 1] - durations[k]) as i64;
        modes.push(ExecutionMode::new(durations[k], Money::from_units(cost)));
    }
    modes
}
