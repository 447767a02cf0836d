//! Multi-objective evolutionary algorithms over the mode-index encoding:
//! NSGA-II, SPEA-II, NPGA-II and PAES.
//!
//! Every algorithm implements [`Optimizer`], which advances one iteration at a
//! time. One iteration costs `population_size` evaluations for all four
//! algorithms (one generation for the population methods, `population_size`
//! mutation trials for PAES), so iteration counts are comparable.

mod archive;
mod dominance;
mod npga2;
mod nsga2;
mod operators;
mod paes;
mod sorting;
mod spea2;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use archive::{Individual, ParetoArchive};
pub use dominance::{dominates, nondominated_indices, pareto_dominates};
pub use npga2::{niche_count, Npga2};
pub use nsga2::Nsga2;
pub use operators::{crossover_at, crossover_two_point, mutate_mode_flip, random_assignment};
pub use paes::{paes_grid_locate, GridBounds, Paes};
pub use sorting::{crowding_distance, fast_nondominated_sort, front_ranks, Normalizer};
pub use spea2::{spea2_fitness, spea2_truncate, Spea2};

use crate::project::ProjectNetwork;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "nsga2")]
    Nsga2,
    #[serde(rename = "spea2")]
    Spea2,
    #[serde(rename = "npga2")]
    Npga2,
    #[serde(rename = "paes")]
    Paes,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Nsga2,
        Algorithm::Spea2,
        Algorithm::Npga2,
        Algorithm::Paes,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::Nsga2 => "nsga2",
            Algorithm::Spea2 => "spea2",
            Algorithm::Npga2 => "npga2",
            Algorithm::Paes => "paes",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Nsga2 => "NSGA2",
            Algorithm::Spea2 => "SPEA2",
            Algorithm::Npga2 => "NPGA2",
            Algorithm::Paes => "PAES",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown algorithm `{0}` (expected nsga2, spea2, npga2 or paes)")]
pub struct UnknownAlgorithm(pub String);

impl FromStr for Algorithm {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "nsga2" | "nsgaii" => Ok(Algorithm::Nsga2),
            "spea2" | "speaii" => Ok(Algorithm::Spea2),
            "npga2" | "npgaii" => Ok(Algorithm::Npga2),
            "paes" => Ok(Algorithm::Paes),
            _ => Err(UnknownAlgorithm(s.to_string())),
        }
    }
}

/// Parameters shared by all algorithms of a portfolio.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlgorithmParams {
    pub population_size: usize,
    pub archive_size: usize,
    pub crossover_rate: f64,
    /// Probability that each activity's mode is resampled.
    pub mutation_rate: f64,
    pub max_generations: usize,
    pub paes_grid_depth: u32,
    pub npga2_tournament_dom_set: usize,
    pub npga2_sigma_share: f64,
    pub seed: u64,
}

impl Default for AlgorithmParams {
    fn default() -> Self {
        AlgorithmParams {
            population_size: 100,
            archive_size: 100,
            crossover_rate: 0.9,
            mutation_rate: 0.3,
            max_generations: 500,
            paes_grid_depth: 5,
            npga2_tournament_dom_set: 10,
            npga2_sigma_share: 0.1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid algorithm parameters: {0}")]
pub struct InvalidParams(pub String);

impl AlgorithmParams {
    pub fn validate(&self) -> Result<(), InvalidParams> {
        let bad = |m: &str| Err(InvalidParams(m.to_string()));
        if self.population_size < 2 {
            return bad("population_size must be at least 2");
        }
        if self.archive_size < 2 {
            return bad("archive_size must be at least 2");
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return bad("crossover_rate must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return bad("mutation_rate must lie in [0, 1]");
        }
        if self.max_generations == 0 {
            return bad("max_generations must be positive");
        }
        if !(1..=16).contains(&self.paes_grid_depth) {
            return bad("paes_grid_depth must lie in 1..=16");
        }
        if self.npga2_tournament_dom_set == 0 {
            return bad("npga2_tournament_dom_set must be positive");
        }
        if !(self.npga2_sigma_share > 0.0 && self.npga2_sigma_share.is_finite()) {
            return bad("npga2_sigma_share must be positive");
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        AlgorithmParams {
            seed,
            ..self.clone()
        }
    }
}

/// An algorithm run that can be advanced one iteration at a time.
pub trait Optimizer: Send {
    fn algorithm(&self) -> Algorithm;

    /// Runs one iteration (`population_size` evaluations).
    fn step(&mut self);

    /// Current non-dominated set of everything the run holds.
    fn archive(&self) -> ParetoArchive;
}

/// Builds and initializes an optimizer. Parameters must already be valid.
pub fn new_optimizer<'a>(
    algorithm: Algorithm,
    network: &'a ProjectNetwork,
    params: &AlgorithmParams,
) -> Box<dyn Optimizer + 'a> {
    match algorithm {
        Algorithm::Nsga2 => Box::new(Nsga2::new(network, params)),
        Algorithm::Spea2 => Box::new(Spea2::new(network, params)),
        Algorithm::Npga2 => Box::new(Npga2::new(network, params)),
        Algorithm::Paes => Box::new(Paes::new(network, params)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    pub archive: ParetoArchive,
    pub generations: usize,
}

/// Runs `algorithm` until `stop_hook` returns [`Control::Stop`] or
/// `max_generations` iterations have run.
///
/// The hook sees the iteration number (starting at 1) and the current
/// non-dominated set after every iteration.
pub fn run_algorithm(
    algorithm: Algorithm,
    network: &ProjectNetwork,
    params: &AlgorithmParams,
    mut stop_hook: impl FnMut(usize, &ParetoArchive) -> Control,
) -> Result<RunOutcome, InvalidParams> {
    params.validate()?;
    let mut opt = new_optimizer(algorithm, network, params);
    let mut archive = ParetoArchive::new();
    for generation in 1..=params.max_generations {
        opt.step();
        archive = opt.archive();
        if stop_hook(generation, &archive) == Control::Stop {
            return Ok(RunOutcome {
                archive,
                generations: generation,
            });
        }
    }
    Ok(RunOutcome {
        archive,
        generations: params.max_generations,
    })
}
