use super::frame::{ReferenceFrame, Rho};
use super::weights::{WeightVector, WeightVectorSet};
use super::QualityError;
use crate::moea::ParetoArchive;
use crate::project::ObjectivePoint;

/// Exact integer form of the scalarizing functions for one frame.
///
/// With weights `k_j / l`, ranges `R_j` and `rho = a / b`, every achievement
/// value equals `S / D` where
/// `S = b * max_j(k_j d_j P_j) + a * sum_j(k_j d_j P_j)`, `d_j = z_j - z0_j`,
/// `P_j` is the product of the other ranges and `D = l * b * R_0 * R_1`.
#[derive(Clone, Copy, Debug)]
struct ExactFrame {
    z0: [i128; 2],
    cross: [i128; 2],
    range_product: i128,
}

impl ExactFrame {
    fn new(frame: &ReferenceFrame) -> Self {
        let r = frame.effective_ranges();
        ExactFrame {
            z0: [
                frame.reference_point.duration as i128,
                frame.reference_point.cost.cents() as i128,
            ],
            cross: [r[1], r[0]],
            range_product: r[0] * r[1],
        }
    }

    fn terms(&self, z: &ObjectivePoint, lambda: &WeightVector) -> [i128; 2] {
        let v = [z.duration as i128, z.total_cost.cents() as i128];
        let k = lambda.numerators();
        [0, 1].map(|j| k[j] as i128 * (v[j] - self.z0[j]) * self.cross[j])
    }

    fn achievement_numerator(&self, z: &ObjectivePoint, lambda: &WeightVector, rho: Rho) -> i128 {
        let t = self.terms(z, lambda);
        rho.den() as i128 * t[0].max(t[1]) + rho.num() as i128 * (t[0] + t[1])
    }

    fn denominator(&self, l: u32, rho: Rho) -> i128 {
        l as i128 * rho.den() as i128 * self.range_product
    }
}

fn check_lambda(lambda: &WeightVector) {
    assert_eq!(lambda.numerators().len(), 2, "two objectives expected");
}

/// Weighted Tchebycheff distance `max_j lambda_j Pi_j (z_j - z0_j)`.
pub fn scalarize_tchebycheff(
    z: &ObjectivePoint,
    frame: &ReferenceFrame,
    lambda: &WeightVector,
) -> f64 {
    check_lambda(lambda);
    let ex = ExactFrame::new(frame);
    let t = ex.terms(z, lambda);
    t[0].max(t[1]) as f64 / (lambda.l() as i128 * ex.range_product) as f64
}

/// Tchebycheff term plus `rho * sum_j lambda_j Pi_j (z_j - z0_j)`.
pub fn scalarize_achievement(
    z: &ObjectivePoint,
    frame: &ReferenceFrame,
    lambda: &WeightVector,
) -> f64 {
    check_lambda(lambda);
    let ex = ExactFrame::new(frame);
    ex.achievement_numerator(z, lambda, frame.rho) as f64
        / ex.denominator(lambda.l(), frame.rho) as f64
}

/// Mean over the weight vectors of the best achievement value in `points`.
///
/// Lower is better. Only feasible points take part; the sum is exact and
/// converted to floating point once at the end.
pub fn average_quality_of<'p>(
    points: impl IntoIterator<Item = &'p ObjectivePoint>,
    frame: &ReferenceFrame,
    weights: &WeightVectorSet,
) -> Result<f64, QualityError> {
    let feasible: Vec<&ObjectivePoint> = points.into_iter().filter(|p| p.is_feasible()).collect();
    if feasible.is_empty() {
        return Err(QualityError::NoFeasiblePoints);
    }
    if weights.dims() != 2 || weights.is_empty() {
        return Err(QualityError::WeightDimension(weights.dims()));
    }
    let ex = ExactFrame::new(frame);
    let total: i128 = weights
        .vectors()
        .iter()
        .map(|lambda| {
            feasible
                .iter()
                .map(|p| ex.achievement_numerator(p, lambda, frame.rho))
                .min()
                .expect("non-empty")
        })
        .sum();
    let den = ex.denominator(weights.l(), frame.rho) * weights.len() as i128;
    Ok(total as f64 / den as f64)
}

pub fn average_quality(
    archive: &ParetoArchive,
    frame: &ReferenceFrame,
    weights: &WeightVectorSet,
) -> Result<f64, QualityError> {
    if archive.is_empty() {
        return Err(QualityError::EmptyArchive);
    }
    average_quality_of(archive.points(), frame, weights)
}
