//! Test statistics, their simulated null laws, and simulation helpers.

mod config;
pub mod ks;
mod null;
mod power;
mod report;
mod sampling;
mod statistic;

pub use config::{Space, TestConfig, Variant, MIN_NULL_DRAWS};
pub use null::{
    critical_value, exhaustive_null, null_distribution, null_from_grids, p_value, read_null_table,
    rejection_budget, rejects, write_null_table, NullCache, NULL_TABLE_MAGIC,
};
pub use power::{fixed_rotation, power_study, PowerRow, Scenario, MIN_REPLICATIONS};
pub use report::{compute_statistic, run_test, TestReport, SPHERE_INPUT_TOL};
pub use sampling::{sample_gaussian, sample_uniform_sphere, sample_vmf};
pub use statistic::{
    canonical_sphere_grid, data_free_grids, directional_dcov, directional_dcov_with,
    euclidean_label_embeddings, rank_dcov_euclidean, ScoredGrids, SphereMargin, Statistic,
};
