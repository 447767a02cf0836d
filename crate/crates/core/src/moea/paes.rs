use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::archive::{Individual, ParetoArchive};
use super::dominance::dominates;
use super::operators::{mutate_mode_flip, random_assignment, resample_other};
use super::{Algorithm, AlgorithmParams, Optimizer};
use crate::project::{ObjectivePoint, ProjectNetwork};

/// Extent of objective space covered by the adaptive grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridBounds {
    pub lo: [i64; 2],
    pub hi: [i64; 2],
}

impl GridBounds {
    pub fn of<'p>(points: impl IntoIterator<Item = &'p ObjectivePoint>) -> Self {
        let mut lo = [i64::MAX; 2];
        let mut hi = [i64::MIN; 2];
        for p in points {
            for (j, v) in p.values().into_iter().enumerate() {
                lo[j] = lo[j].min(v);
                hi[j] = hi[j].max(v);
            }
        }
        for j in 0..2 {
            if lo[j] > hi[j] {
                lo[j] = 0;
                hi[j] = 0;
            }
        }
        GridBounds { lo, hi }
    }
}

/// Grid cell of `point` after `depth` bisections of each objective range.
///
/// Each objective gets an index in `0..2^depth`; the cell id packs them as
/// `duration_index << depth | cost_index`. Points outside the bounds are
/// clamped to the edge cells and a zero-width range maps to index 0.
pub fn paes_grid_locate(point: &ObjectivePoint, bounds: &GridBounds, depth: u32) -> u64 {
    let cells = 1i128 << depth;
    let v = point.values();
    let mut id = 0u64;
    for ((&x, &lo), &hi) in v.iter().zip(&bounds.lo).zip(&bounds.hi) {
        let lo = lo as i128;
        let span = hi as i128 - lo;
        let idx = if span <= 0 {
            0
        } else {
            ((x as i128 - lo) * cells / span).clamp(0, cells - 1)
        };
        id = (id << depth) | idx as u64;
    }
    id
}

/// (1+1) Pareto archived evolution strategy.
pub struct Paes<'a> {
    network: &'a ProjectNetwork,
    params: AlgorithmParams,
    rng: ChaCha8Rng,
    current: Individual,
    archive: Vec<Individual>,
}

impl<'a> Paes<'a> {
    pub fn new(network: &'a ProjectNetwork, params: &AlgorithmParams) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let current = Individual::evaluated(network, random_assignment(network, &mut rng));
        Paes {
            network,
            params: params.clone(),
            rng,
            archive: vec![current.clone()],
            current,
        }
    }

    pub fn current(&self) -> &Individual {
        &self.current
    }

    fn mutant(&mut self) -> Individual {
        let mut child = mutate_mode_flip(
            &self.current.assignment,
            self.network,
            self.params.mutation_rate,
            &mut self.rng,
        );
        if child == self.current.assignment {
            let movable: Vec<(usize, usize)> = self
                .network
                .mode_counts()
                .enumerate()
                .filter(|&(_, n)| n > 1)
                .collect();
            if !movable.is_empty() {
                let (locus, n) = movable[self.rng.random_range(0..movable.len())];
                let slot = &mut child.modes_mut()[locus];
                *slot = resample_other(*slot, n, &mut self.rng);
            }
        }
        Individual::evaluated(self.network, child)
    }

    fn cells(&self, extra: &ObjectivePoint) -> (GridBounds, Vec<u64>) {
        let bounds = GridBounds::of(self.archive.iter().map(|m| &m.objectives).chain([extra]));
        let depth = self.params.paes_grid_depth;
        let cells = self
            .archive
            .iter()
            .map(|m| paes_grid_locate(&m.objectives, &bounds, depth))
            .collect();
        (bounds, cells)
    }

    /// Offers `cand` to the archive. Dominated members are dropped; when the
    /// archive is full a random member of the most crowded cell is evicted,
    /// provided `cand` would land in a less crowded cell.
    fn archive_try_add(&mut self, cand: &Individual) -> bool {
        if self
            .archive
            .iter()
            .any(|m| m.assignment == cand.assignment || dominates(&m.objectives, &cand.objectives))
        {
            return false;
        }
        self.archive
            .retain(|m| !dominates(&cand.objectives, &m.objectives));
        if self.archive.len() < self.params.archive_size {
            self.archive.push(cand.clone());
            return true;
        }
        let (bounds, cells) = self.cells(&cand.objectives);
        let cand_cell = paes_grid_locate(&cand.objectives, &bounds, self.params.paes_grid_depth);
        let count = |c: u64| cells.iter().filter(|&&x| x == c).count();
        let max_count = cells.iter().map(|&c| count(c)).max().unwrap_or(0);
        if count(cand_cell) >= max_count {
            return false;
        }
        let crowded_cell = *cells
            .iter()
            .filter(|&&c| count(c) == max_count)
            .min()
            .expect("archive is full");
        let victims: Vec<usize> = (0..cells.len())
            .filter(|&i| cells[i] == crowded_cell)
            .collect();
        let victim = victims[self.rng.random_range(0..victims.len())];
        self.archive.swap_remove(victim);
        self.archive.push(cand.clone());
        true
    }

    fn trial(&mut self) {
        let mutant = self.mutant();
        if dominates(&self.current.objectives, &mutant.objectives) {
            return;
        }
        if dominates(&mutant.objectives, &self.current.objectives) {
            self.archive_try_add(&mutant);
            self.current = mutant;
            return;
        }
        if self
            .archive
            .iter()
            .any(|m| dominates(&m.objectives, &mutant.objectives))
        {
            return;
        }
        self.archive_try_add(&mutant);
        let (bounds, cells) = self.cells(&mutant.objectives);
        let depth = self.params.paes_grid_depth;
        let count = |p: &ObjectivePoint| {
            let c = paes_grid_locate(p, &bounds, depth);
            cells.iter().filter(|&&x| x == c).count()
        };
        // Ties favour the mutant so the search keeps drifting along the front
        // while the archive is sparse and most cells hold a single member.
        if count(&mutant.objectives) <= count(&self.current.objectives) {
            self.current = mutant;
        }
    }
}

impl Optimizer for Paes<'_> {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Paes
    }

    fn step(&mut self) {
        for _ in 0..self.params.population_size {
            self.trial();
        }
    }

    fn archive(&self) -> ParetoArchive {
        ParetoArchive::from_candidates(
            self.archive
                .iter()
                .cloned()
                .chain(std::iter::once(self.current.clone())),
        )
    }
}
