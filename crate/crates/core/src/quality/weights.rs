use serde::{Deserialize, Serialize};

/// A normalized weight vector stored as integer numerators over `l`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightVector {
    numerators: Vec<u32>,
    l: u32,
}

impl WeightVector {
    pub fn new(numerators: Vec<u32>, l: u32) -> Option<Self> {
        let sum: u64 = numerators.iter().map(|&k| k as u64).sum();
        (l > 0 && sum == l as u64).then_some(WeightVector { numerators, l })
    }

    pub fn numerators(&self) -> &[u32] {
        &self.numerators
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.numerators
            .iter()
            .map(|&k| k as f64 / self.l as f64)
            .collect()
    }
}

/// The full lattice of weight vectors with entries in `{0, 1/l, ..., 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightVectorSet {
    l: u32,
    dims: usize,
    vectors: Vec<WeightVector>,
}

impl WeightVectorSet {
    /// All vectors of dimension `dims` with numerators summing to `l`,
    /// ordered lexicographically by numerators.
    pub fn lattice(dims: usize, l: u32) -> Self {
        assert!(dims >= 1 && l >= 1, "lattice needs dims >= 1 and l >= 1");
        let mut vectors = Vec::new();
        let mut current = Vec::with_capacity(dims);
        fill(dims, l, &mut current, &mut vectors, l);
        WeightVectorSet { l, dims, vectors }
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[WeightVector] {
        &self.vectors
    }
}

fn fill(dims: usize, remaining: u32, current: &mut Vec<u32>, out: &mut Vec<WeightVector>, l: u32) {
    if current.len() + 1 == dims {
        current.push(remaining);
        out.push(WeightVector {
            numerators: current.clone(),
            l,
        });
        current.pop();
        return;
    }
    for k in 0..=remaining {
        current.push(k);
        fill(dims, remaining - k, current, out, l);
        current.pop();
    }
}

/// Number of lattice vectors, `C(l + dims - 1, dims - 1)`, saturating.
pub fn lattice_size(dims: usize, l: u32) -> u128 {
    let n = l as u128 + dims as u128 - 1;
    let k = dims as u128 - 1;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Smallest lattice over `dims` objectives holding at least `min_count`
/// vectors.
pub fn weight_vectors(dims: usize, min_count: usize) -> WeightVectorSet {
    assert!(dims >= 2, "weight vectors need at least two objectives");
    let mut l = 1u32;
    while lattice_size(dims, l) < min_count as u128 {
        l += 1;
    }
    WeightVectorSet::lattice(dims, l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_objectives_fifty_vectors() {
        let w = weight_vectors(2, 50);
        assert_eq!(w.l(), 49);
        assert_eq!(w.len(), 50);
        assert!(w
            .vectors()
            .iter()
            .all(|v| v.numerators().iter().sum::<u32>() == 49));
    }

    #[test]
    fn small_lattices() {
        let w = weight_vectors(2, 2);
        let v: Vec<Vec<f64>> = w.vectors().iter().map(WeightVector::to_f64).collect();
        assert_eq!(v, vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let w = weight_vectors(2, 3);
        let v: Vec<Vec<f64>> = w.vectors().iter().map(WeightVector::to_f64).collect();
        assert_eq!(v, vec![vec![0.0, 1.0], vec![0.5, 0.5], vec![1.0, 0.0]]);
    }

    #[test]
    fn lattice_count_matches_binomial() {
        for dims in 2..5 {
            for l in 1..8 {
                assert_eq!(
                    WeightVectorSet::lattice(dims, l).len() as u128,
                    lattice_size(dims, l)
                );
            }
        }
    }
}
