//! Discrete time-cost trade-off scheduling: project networks, multi-objective
//! evolutionary solvers, the average-quality metric, algorithm portfolios and
//! AHP ranking of portfolio configurations.

pub mod ahp;
pub mod moea;
pub mod portfolio;
pub mod project;
pub mod quality;
