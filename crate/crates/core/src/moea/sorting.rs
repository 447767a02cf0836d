use super::dominance::dominates;
use crate::project::ObjectivePoint;

/// Partitions `points` into non-domination fronts using the
/// domination-count / dominated-set bookkeeping of NSGA-II, `O(M N^2)`.
///
/// Each returned front lists indices in ascending order.
pub fn fast_nondominated_sort(points: &[ObjectivePoint]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates_set: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates(&points[i], &points[j]) {
                dominates_set[i].push(j);
                dominated_by_count[j] += 1;
            } else if dominates(&points[j], &points[i]) {
                dominates_set[j].push(i);
                dominated_by_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_set[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Front index (0 = best) of every point.
pub fn front_ranks(fronts: &[Vec<usize>], n: usize) -> Vec<usize> {
    let mut rank = vec![usize::MAX; n];
    for (r, front) in fronts.iter().enumerate() {
        for &i in front {
            rank[i] = r;
        }
    }
    rank
}

/// Crowding distance of each member of a front.
///
/// Per objective, a point holding the minimum or maximum value is a boundary
/// and gets `+inf`; otherwise it accumulates the gap between the nearest
/// distinct values below and above it, divided by the objective's range.
/// Working on distinct values makes the result independent of input order.
pub fn crowding_distance(front: &[ObjectivePoint]) -> Vec<f64> {
    let n = front.len();
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let mut dist = vec![0.0f64; n];
    for obj in 0..2 {
        let values: Vec<i64> = front.iter().map(|p| p.values()[obj]).collect();
        let mut distinct = values.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let lo = distinct[0];
        let hi = distinct[distinct.len() - 1];
        let range = (hi - lo) as f64;
        for (i, &v) in values.iter().enumerate() {
            if v == lo || v == hi {
                dist[i] = f64::INFINITY;
                continue;
            }
            let pos = distinct.binary_search(&v).expect("value is present");
            dist[i] += (distinct[pos + 1] - distinct[pos - 1]) as f64 / range;
        }
    }
    dist
}

/// Min-max scaling of objective values to `[0, 1]` over a reference set.
/// Objectives with zero spread map to 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Normalizer {
    lo: [f64; 2],
    span: [f64; 2],
}

impl Normalizer {
    pub fn fit<'a>(points: impl IntoIterator<Item = &'a ObjectivePoint>) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in points {
            for (j, v) in p.values().into_iter().enumerate() {
                lo[j] = lo[j].min(v as f64);
                hi[j] = hi[j].max(v as f64);
            }
        }
        let mut span = [0.0; 2];
        for j in 0..2 {
            if !lo[j].is_finite() {
                lo[j] = 0.0;
            }
            span[j] = if hi[j] > lo[j] { hi[j] - lo[j] } else { 0.0 };
        }
        Normalizer { lo, span }
    }

    pub fn coords(&self, p: &ObjectivePoint) -> [f64; 2] {
        let v = p.values();
        let mut out = [0.0; 2];
        for j in 0..2 {
            if self.span[j] > 0.0 {
                out[j] = (v[j] as f64 - self.lo[j]) / self.span[j];
            }
        }
        out
    }
}

pub fn euclidean(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}
