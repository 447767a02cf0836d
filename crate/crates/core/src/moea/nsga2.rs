use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::archive::{Individual, ParetoArchive};
use super::operators::{crossover_two_point, mutate_mode_flip, random_assignment};
use super::sorting::{crowding_distance, fast_nondominated_sort};
use super::{Algorithm, AlgorithmParams, Optimizer};
use crate::project::{ObjectivePoint, ProjectNetwork};

/// Elitist non-dominated sorting GA with crowding-distance diversity.
pub struct Nsga2<'a> {
    network: &'a ProjectNetwork,
    params: AlgorithmParams,
    rng: ChaCha8Rng,
    population: Vec<Individual>,
    rank: Vec<usize>,
    crowding: Vec<f64>,
}

impl<'a> Nsga2<'a> {
    pub fn new(network: &'a ProjectNetwork, params: &AlgorithmParams) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let initial: Vec<Individual> = (0..2 * params.population_size)
            .map(|_| Individual::evaluated(network, random_assignment(network, &mut rng)))
            .collect();
        let (population, rank, crowding) = select(initial, params.population_size);
        Nsga2 {
            network,
            params: params.clone(),
            rng,
            population,
            rank,
            crowding,
        }
    }

    pub fn population(&self) -> &[Individual] {
        &self.population
    }

    fn tournament(&mut self) -> usize {
        let n = self.population.len();
        let a = self.rng.random_range(0..n);
        let b = self.rng.random_range(0..n);
        if self.rank[b] < self.rank[a]
            || (self.rank[b] == self.rank[a] && self.crowding[b] > self.crowding[a])
        {
            b
        } else {
            a
        }
    }
}

/// Keeps `n` members of `pool`: whole fronts while they fit, then the most
/// spread-out members of the first front that does not. Returns the survivors
/// with their front rank and crowding distance.
fn select(pool: Vec<Individual>, n: usize) -> (Vec<Individual>, Vec<usize>, Vec<f64>) {
    let points: Vec<ObjectivePoint> = pool.iter().map(|i| i.objectives).collect();
    let mut chosen = Vec::with_capacity(n);
    let mut rank = Vec::with_capacity(n);
    let mut crowding = Vec::with_capacity(n);
    for (r, front) in fast_nondominated_sort(&points).into_iter().enumerate() {
        if chosen.len() >= n {
            break;
        }
        let front_pts: Vec<ObjectivePoint> = front.iter().map(|&i| points[i]).collect();
        let dist = crowding_distance(&front_pts);
        let mut order: Vec<usize> = (0..front.len()).collect();
        if chosen.len() + front.len() > n {
            // Copies of an objective point already represented come last, so
            // duplicates of the boundary points cannot crowd out the interior.
            let mut first_seen = HashSet::new();
            let repeat: Vec<bool> = front_pts
                .iter()
                .map(|p| !first_seen.insert(p.values()))
                .collect();
            order.sort_by(|&x, &y| {
                repeat[x]
                    .cmp(&repeat[y])
                    .then(dist[y].total_cmp(&dist[x]))
                    .then(x.cmp(&y))
            });
            order.truncate(n - chosen.len());
        }
        for k in order {
            chosen.push(front[k]);
            rank.push(r);
            crowding.push(dist[k]);
        }
    }
    let mut slots: Vec<Option<Individual>> = pool.into_iter().map(Some).collect();
    let population = chosen
        .into_iter()
        .map(|i| slots[i].take().expect("each index chosen once"))
        .collect();
    (population, rank, crowding)
}

/// Drops repeated assignments from `pool` while at least `n` members remain.
fn without_clones(pool: Vec<Individual>, n: usize) -> Vec<Individual> {
    let mut seen = HashSet::new();
    let (unique, clones): (Vec<Individual>, Vec<Individual>) = pool
        .into_iter()
        .partition(|ind| seen.insert(ind.assignment.clone()));
    let missing = n.saturating_sub(unique.len());
    unique
        .into_iter()
        .chain(clones.into_iter().take(missing))
        .collect()
}

impl Optimizer for Nsga2<'_> {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Nsga2
    }

    fn step(&mut self) {
        let n = self.params.population_size;
        let mut offspring = Vec::with_capacity(n);
        while offspring.len() < n {
            let p1 = self.tournament();
            let p2 = self.tournament();
            let (c1, c2) = crossover_two_point(
                &self.population[p1].assignment,
                &self.population[p2].assignment,
                self.params.crossover_rate,
                &mut self.rng,
            );
            for child in [c1, c2] {
                if offspring.len() < n {
                    let child = mutate_mode_flip(
                        &child,
                        self.network,
                        self.params.mutation_rate,
                        &mut self.rng,
                    );
                    offspring.push(Individual::evaluated(self.network, child));
                }
            }
        }
        let mut pool = std::mem::take(&mut self.population);
        pool.extend(offspring);
        let (population, rank, crowding) = select(without_clones(pool, n), n);
        self.population = population;
        self.rank = rank;
        self.crowding = crowding;
    }

    fn archive(&self) -> ParetoArchive {
        ParetoArchive::from_candidates(self.population.iter().cloned())
    }
}
