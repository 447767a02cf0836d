use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::archive::{Individual, ParetoArchive};
use super::dominance::dominates;
use super::operators::{crossover_two_point, mutate_mode_flip, random_assignment};
use super::sorting::{euclidean, Normalizer};
use super::{Algorithm, AlgorithmParams, Optimizer};
use crate::project::{ObjectivePoint, ProjectNetwork};

/// Strength-based fitness components of a population.
#[derive(Clone, Debug, PartialEq)]
pub struct Spea2Fitness {
    /// Number of points each point dominates.
    pub strength: Vec<usize>,
    /// Sum of the strengths of a point's dominators; 0 means non-dominated.
    pub raw: Vec<usize>,
    /// `1 / (sigma_k + 2)` with `sigma_k` the distance to the k-th nearest
    /// neighbour in normalized objective space, `k = floor(sqrt(n))`.
    pub density: Vec<f64>,
}

impl Spea2Fitness {
    pub fn value(&self, i: usize) -> f64 {
        self.raw[i] as f64 + self.density[i]
    }
}

pub fn spea2_fitness(points: &[ObjectivePoint]) -> Spea2Fitness {
    let n = points.len();
    let mut strength = vec![0usize; n];
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i != j && dominates(&points[i], &points[j]) {
                strength[i] += 1;
                dominated_by[j].push(i);
            }
        }
    }
    let raw = dominated_by
        .iter()
        .map(|ds| ds.iter().map(|&i| strength[i]).sum())
        .collect();

    let norm = Normalizer::fit(points);
    let coords: Vec<[f64; 2]> = points.iter().map(|p| norm.coords(p)).collect();
    let k = ((n as f64).sqrt().floor() as usize).clamp(1, n.saturating_sub(1).max(1));
    let density = (0..n)
        .map(|i| {
            let mut d: Vec<f64> = (0..n)
                .filter(|&j| j != i)
                .map(|j| euclidean(&coords[i], &coords[j]))
                .collect();
            if d.is_empty() {
                return 0.5;
            }
            d.sort_by(f64::total_cmp);
            1.0 / (d[k - 1] + 2.0)
        })
        .collect();
    Spea2Fitness {
        strength,
        raw,
        density,
    }
}

/// Reduces a non-dominated set to `capacity` members.
///
/// The members with the smallest duration and the smallest cost are always
/// kept. The remaining points are grouped by average-linkage clustering in
/// normalized objective space, and each cluster contributes the member
/// nearest its centroid. Returns the kept indices in ascending order.
pub fn spea2_truncate(points: &[ObjectivePoint], capacity: usize) -> Vec<usize> {
    let n = points.len();
    if n <= capacity {
        return (0..n).collect();
    }
    let argmin = |obj: usize| {
        (0..n)
            .min_by_key(|&i| (points[i].values()[obj], points[i].values()[1 - obj], i))
            .expect("non-empty")
    };
    let mut extremes = vec![argmin(0), argmin(1)];
    extremes.sort_unstable();
    extremes.dedup();
    extremes.truncate(capacity);

    let rest: Vec<usize> = (0..n).filter(|i| !extremes.contains(i)).collect();
    let slots = capacity - extremes.len();
    let norm = Normalizer::fit(points);
    let coords: Vec<[f64; 2]> = rest.iter().map(|&i| norm.coords(&points[i])).collect();

    let mut kept = extremes;
    for cluster in average_linkage(&coords, slots) {
        let mut centroid = [0.0; 2];
        for &m in &cluster {
            centroid[0] += coords[m][0];
            centroid[1] += coords[m][1];
        }
        centroid[0] /= cluster.len() as f64;
        centroid[1] /= cluster.len() as f64;
        let rep = cluster
            .iter()
            .copied()
            .min_by(|&a, &b| {
                euclidean(&coords[a], &centroid)
                    .total_cmp(&euclidean(&coords[b], &centroid))
                    .then(a.cmp(&b))
            })
            .expect("clusters are non-empty");
        kept.push(rest[rep]);
    }
    kept.sort_unstable();
    kept
}

/// Agglomerative clustering down to `target` clusters, merging the closest
/// pair (lowest indices on ties) and updating distances by Lance-Williams.
fn average_linkage(coords: &[[f64; 2]], target: usize) -> Vec<Vec<usize>> {
    let n = coords.len();
    if target == 0 {
        return Vec::new();
    }
    let mut clusters: Vec<Option<Vec<usize>>> = (0..n).map(|i| Some(vec![i])).collect();
    let mut dist = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = euclidean(&coords[i], &coords[j]);
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    let mut alive: Vec<usize> = (0..n).collect();
    while alive.len() > target {
        let mut best = (f64::INFINITY, 0, 0);
        for (x, &a) in alive.iter().enumerate() {
            for &b in &alive[x + 1..] {
                if dist[a][b] < best.0 {
                    best = (dist[a][b], a, b);
                }
            }
        }
        let (_, a, b) = best;
        let size_a = clusters[a].as_ref().map_or(0, Vec::len) as f64;
        let size_b = clusters[b].as_ref().map_or(0, Vec::len) as f64;
        for &c in &alive {
            if c != a && c != b {
                let d = (size_a * dist[c][a] + size_b * dist[c][b]) / (size_a + size_b);
                dist[a][c] = d;
                dist[c][a] = d;
            }
        }
        let moved = clusters[b].take().unwrap_or_default();
        clusters[a].as_mut().expect("alive").extend(moved);
        alive.retain(|&c| c != b);
    }
    clusters.into_iter().flatten().collect()
}

/// Strength Pareto EA with a bounded external archive.
pub struct Spea2<'a> {
    network: &'a ProjectNetwork,
    params: AlgorithmParams,
    rng: ChaCha8Rng,
    population: Vec<Individual>,
    archive: Vec<Individual>,
    archive_fitness: Vec<f64>,
}

impl<'a> Spea2<'a> {
    pub fn new(network: &'a ProjectNetwork, params: &AlgorithmParams) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let population = (0..params.population_size)
            .map(|_| Individual::evaluated(network, random_assignment(network, &mut rng)))
            .collect();
        Spea2 {
            network,
            params: params.clone(),
            rng,
            population,
            archive: Vec::new(),
            archive_fitness: Vec::new(),
        }
    }

    pub fn external_archive(&self) -> &[Individual] {
        &self.archive
    }

    fn environmental_selection(&mut self) {
        let mut seen = HashSet::new();
        let union: Vec<Individual> = std::mem::take(&mut self.archive)
            .into_iter()
            .chain(self.population.iter().cloned())
            .filter(|ind| seen.insert(ind.assignment.clone()))
            .collect();
        let points: Vec<ObjectivePoint> = union.iter().map(|i| i.objectives).collect();
        let fit = spea2_fitness(&points);
        let cap = self.params.archive_size;

        let nondominated: Vec<usize> = (0..union.len()).filter(|&i| fit.raw[i] == 0).collect();
        let chosen: Vec<usize> = if nondominated.len() > cap {
            let nd_points: Vec<ObjectivePoint> = nondominated.iter().map(|&i| points[i]).collect();
            spea2_truncate(&nd_points, cap)
                .into_iter()
                .map(|k| nondominated[k])
                .collect()
        } else {
            let mut dominated: Vec<usize> = (0..union.len()).filter(|&i| fit.raw[i] > 0).collect();
            dominated.sort_by(|&a, &b| fit.value(a).total_cmp(&fit.value(b)).then(a.cmp(&b)));
            dominated.truncate(cap - nondominated.len());
            nondominated.into_iter().chain(dominated).collect()
        };
        self.archive_fitness = chosen.iter().map(|&i| fit.value(i)).collect();
        self.archive = chosen.iter().map(|&i| union[i].clone()).collect();
    }

    fn tournament(&mut self) -> usize {
        let n = self.archive.len();
        let a = self.rng.random_range(0..n);
        let b = self.rng.random_range(0..n);
        if self.archive_fitness[b] < self.archive_fitness[a] {
            b
        } else {
            a
        }
    }
}

impl Optimizer for Spea2<'_> {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Spea2
    }

    fn step(&mut self) {
        self.environmental_selection();
        let n = self.params.population_size;
        let mut offspring = Vec::with_capacity(n);
        while offspring.len() < n {
            let p1 = self.tournament();
            let p2 = self.tournament();
            let (c1, c2) = crossover_two_point(
                &self.archive[p1].assignment,
                &self.archive[p2].assignment,
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
        self.population = offspring;
    }

    fn archive(&self) -> ParetoArchive {
        ParetoArchive::from_candidates(self.archive.iter().chain(&self.population).cloned())
    }
}
