use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::archive::{Individual, ParetoArchive};
use super::dominance::dominates;
use super::operators::{crossover_two_point, mutate_mode_flip, random_assignment};
use super::sorting::{euclidean, fast_nondominated_sort, Normalizer};
use super::{Algorithm, AlgorithmParams, Optimizer};
use crate::project::{ObjectivePoint, ProjectNetwork};

/// Sum of the triangular sharing function `1 - d / sigma` over the points of
/// `others` closer than `sigma` to `point`.
pub fn niche_count(point: &[f64; 2], others: &[[f64; 2]], sigma_share: f64) -> f64 {
    others
        .iter()
        .map(|q| euclidean(point, q))
        .filter(|&d| d < sigma_share)
        .map(|d| 1.0 - d / sigma_share)
        .sum()
}

/// Niched Pareto GA with Pareto domination tournaments and elitist
/// replacement.
pub struct Npga2<'a> {
    network: &'a ProjectNetwork,
    params: AlgorithmParams,
    rng: ChaCha8Rng,
    population: Vec<Individual>,
}

impl<'a> Npga2<'a> {
    pub fn new(network: &'a ProjectNetwork, params: &AlgorithmParams) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let population = (0..params.population_size)
            .map(|_| Individual::evaluated(network, random_assignment(network, &mut rng)))
            .collect();
        Npga2 {
            network,
            params: params.clone(),
            rng,
            population,
        }
    }

    pub fn population(&self) -> &[Individual] {
        &self.population
    }

    /// Fills a mating pool by domination tournaments. A candidate loses if a
    /// member of the random comparison set dominates it; when both or neither
    /// lose, the one with the smaller niche count in the pool so far wins.
    fn mating_pool(&mut self) -> Vec<usize> {
        let n = self.population.len();
        let t_dom = self.params.npga2_tournament_dom_set.min(n);
        let sigma = self.params.npga2_sigma_share;
        let norm = Normalizer::fit(self.population.iter().map(|i| &i.objectives));
        let coords: Vec<[f64; 2]> = self
            .population
            .iter()
            .map(|i| norm.coords(&i.objectives))
            .collect();
        let mut pool = Vec::with_capacity(n);
        let mut pool_coords: Vec<[f64; 2]> = Vec::with_capacity(n);
        for _ in 0..n {
            let a = self.rng.random_range(0..n);
            let b = self.rng.random_range(0..n);
            let set = sample(&mut self.rng, n, t_dom);
            let beaten = |c: usize| {
                set.iter().any(|s| {
                    dominates(
                        &self.population[s].objectives,
                        &self.population[c].objectives,
                    )
                })
            };
            let winner = match (beaten(a), beaten(b)) {
                (false, true) => a,
                (true, false) => b,
                _ => {
                    let na = niche_count(&coords[a], &pool_coords, sigma);
                    let nb = niche_count(&coords[b], &pool_coords, sigma);
                    if nb < na {
                        b
                    } else {
                        a
                    }
                }
            };
            pool.push(winner);
            pool_coords.push(coords[winner]);
        }
        pool
    }
}

/// Elitist replacement: whole fronts of `pool` while they fit; the overflow
/// front is thinned by binary tournaments on niche count against the
/// partially filled next generation.
fn replace<R: Rng>(pool: Vec<Individual>, n: usize, sigma: f64, rng: &mut R) -> Vec<Individual> {
    let points: Vec<ObjectivePoint> = pool.iter().map(|i| i.objectives).collect();
    let norm = Normalizer::fit(&points);
    let coords: Vec<[f64; 2]> = points.iter().map(|p| norm.coords(p)).collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    for front in fast_nondominated_sort(&points) {
        if chosen.len() + front.len() <= n {
            chosen.extend(front);
            continue;
        }
        let mut candidates = front;
        let mut chosen_coords: Vec<[f64; 2]> = chosen.iter().map(|&i| coords[i]).collect();
        while chosen.len() < n {
            let x = rng.random_range(0..candidates.len());
            let y = rng.random_range(0..candidates.len());
            let nx = niche_count(&coords[candidates[x]], &chosen_coords, sigma);
            let ny = niche_count(&coords[candidates[y]], &chosen_coords, sigma);
            let win = if ny < nx { y } else { x };
            let idx = candidates.swap_remove(win);
            chosen.push(idx);
            chosen_coords.push(coords[idx]);
        }
        break;
    }
    let mut slots: Vec<Option<Individual>> = pool.into_iter().map(Some).collect();
    chosen
        .into_iter()
        .map(|i| slots[i].take().expect("each index chosen once"))
        .collect()
}

impl Optimizer for Npga2<'_> {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Npga2
    }

    fn step(&mut self) {
        let n = self.params.population_size;
        let parents = self.mating_pool();
        let mut offspring = Vec::with_capacity(n);
        for pair in parents.chunks(2) {
            let p1 = &self.population[pair[0]].assignment;
            let p2 = &self.population[pair[pair.len() - 1]].assignment;
            let (c1, c2) = crossover_two_point(p1, p2, self.params.crossover_rate, &mut self.rng);
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
        self.population = replace(pool, n, self.params.npga2_sigma_share, &mut self.rng);
    }

    fn archive(&self) -> ParetoArchive {
        ParetoArchive::from_candidates(self.population.iter().cloned())
    }
}
