//! Project network model: activities with discrete execution modes, a
//! precedence DAG with implicit dummy source and sink, and the two objectives
//! (project duration and total cost).
//!
//! Duration is the longest source-to-sink path under the chosen mode
//! durations. Total cost is the sum of chosen direct costs plus
//! `duration * indirect_rate`.

mod format;
mod generate;
mod money;
mod network;
mod oracle;

pub use format::{
    format_instance, format_manifest, load_instance, load_manifest, manifest_path, parse_instance,
    parse_manifest, save_instance, save_manifest, FormatError, Manifest,
};
pub use generate::{
    generate_instance, generate_with_mode_counts, GenerateError, GeneratorParams, EDGE_WINDOW,
};
pub use money::{Money, ParseMoneyError};
pub use network::{
    Activity, Assignment, AssignmentError, CostDecomposition, ExecutionMode, NetworkError,
    ObjectivePoint, PathExplosion, ProjectNetwork, DEFAULT_PATH_CAP,
};
pub use oracle::{brute_force_pareto, is_enumerable, OracleRefused, DEFAULT_ORACLE_CAP};
