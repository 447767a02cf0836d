//! Average quality (AQ) of a non-dominated set: the mean, over a lattice of
//! weight vectors, of the best achievement scalarizing value in the set,
//! measured from an estimated ideal point with range-equalized objectives.
//!
//! Objectives are minimized, so every scalarizing term is `z_j - z0_j`.

mod aq;
mod frame;
mod weights;

pub use aq::{average_quality, average_quality_of, scalarize_achievement, scalarize_tchebycheff};
pub use frame::{
    equalization_factors, ideal_point_estimate, ObjectiveVector, ReferenceFrame, Rho,
    DEFAULT_MIN_WEIGHTS,
};
pub use weights::{lattice_size, weight_vectors, WeightVector, WeightVectorSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QualityError {
    #[error("cannot compute average quality of an empty archive")]
    EmptyArchive,
    #[error("archive holds no feasible point")]
    NoFeasiblePoints,
    #[error("weight vectors must have 2 components, got {0}")]
    WeightDimension(usize),
    #[error("rho must be a decimal in [0, 1), got `{0}`")]
    InvalidRho(String),
}
