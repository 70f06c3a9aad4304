//! Distribution-free tests of independence built on measure-transportation
//! ranks and distance covariance, for data in R^d and on hyperspheres.
//!
//! The pipeline for each margin is: optimal pairing of the sample with a
//! structured grid ([`center_outward`] in R^d, [`directional`] on spheres),
//! scoring of the resulting ranks and signs ([`scores`]), and a V-statistic
//! distance covariance between the two scored margins ([`dcov`]). Because the
//! statistic depends on the data only through the pairing of grid labels, its
//! null law is simulated exactly by permuting labels ([`testkit`]).

pub mod assignment;
pub mod center_outward;
pub mod dcov;
pub mod directional;
pub mod error;
pub mod geometry;
pub mod matrix;
mod numeric;
pub mod rng;
pub mod scores;
pub mod testkit;

pub use assignment::{cost_matrix, solve_assignment, CostKind, TransportMap};
pub use center_outward::{
    apply_score, center_outward, direction_set, factorize_n, random_ball_transport, BallGrid,
    CenterOutwardRecord,
};
pub use dcov::{dcor_sq, dcov_sq, double_center, pairwise_distances, DoubleCenteredMatrix, Metric};
pub use directional::{
    build_sphere_grid, chart_embed, chart_inverse, latitude_longitude, step1_transport,
    step2_transport, tangent_embed, Chart, DirectionalRankSign, SphereGrid, Step1Result,
};
pub use error::{Error, Result};
pub use geometry::{
    cap_cdf, cap_quantile, exp_map, frechet_mean, geodesic_distance, log_map, rotation_to,
    transport_cost, FrechetMean, Rotation, TangentVector, UnitDirection,
};
pub use matrix::SquareMatrix;
pub use scores::{biloop_curve, chi2_cdf, chi2_quantile, RadialScore, ScoreSpec};
