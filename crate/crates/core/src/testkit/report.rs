use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::UnitDirection;

use super::config::{Space, TestConfig};
use super::null::{critical_value, null_from_grids, p_value, rejects, NullCache};
use super::statistic::{directional_dcov, rank_dcov_euclidean, Statistic};

/// Inputs on the sphere must have unit norm to this tolerance.
pub const SPHERE_INPUT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    /// n dCov^2 of the scored margins.
    pub statistic: f64,
    pub p_value: f64,
    /// Reject when the statistic exceeds this value; `None` when alpha is
    /// below the p-value resolution 1 / (M + 1).
    pub critical_value: Option<f64>,
    pub reject: bool,
    pub n: usize,
    pub dims: (usize, usize),
    pub alpha: f64,
    pub null_draws: usize,
    pub config: TestConfig,
    pub fingerprint: String,
    pub seed: u64,
    pub flags: Vec<String>,
}

pub(crate) fn to_unit(sample: &[Vec<f64>], side: &str) -> Result<Vec<UnitDirection>> {
    sample
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let len = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !len.is_finite() || (len - 1.0).abs() > SPHERE_INPUT_TOL {
                return Err(Error::invalid(format!(
                    "{side} observation {i} has norm {len}, expected a unit vector"
                )));
            }
            UnitDirection::new(row.clone())
        })
        .collect()
}

/// The statistic configured by `cfg`, for samples given as coordinate rows.
pub fn compute_statistic(x: &[Vec<f64>], y: &[Vec<f64>], cfg: &TestConfig) -> Result<Statistic> {
    match cfg.space {
        Space::Euclidean => rank_dcov_euclidean(x, y, cfg),
        Space::Sphere => directional_dcov(&to_unit(x, "x")?, &to_unit(y, "y")?, cfg),
    }
}

/// Statistic, simulated null, p-value and decision.
///
/// Data-free null tables are looked up in (and added to) `cache` when one is
/// given; the step1_only sphere null is always simulated afresh.
pub fn run_test(x: &[Vec<f64>], y: &[Vec<f64>], cfg: &TestConfig, cache: Option<&NullCache>) -> Result<TestReport> {
    cfg.validate()?;
    let stat = compute_statistic(x, y, cfg)?;
    report_from_statistic(stat, x[0].len(), y[0].len(), cfg, cache)
}

pub(crate) fn report_from_statistic(
    stat: Statistic,
    d1: usize,
    d2: usize,
    cfg: &TestConfig,
    cache: Option<&NullCache>,
) -> Result<TestReport> {
    let n = stat.labels_x.len();
    let simulate = || null_from_grids(&stat.grids, cfg.n_null_draws, cfg.seed);
    let draws = match cache {
        Some(cache) if cfg.null_is_cacheable() => {
            cache.get_or_compute(&cfg.null_fingerprint(n, d1, d2), cfg.n_null_draws, simulate)?
        }
        _ => simulate()?.into(),
    };
    Ok(TestReport {
        statistic: stat.value,
        p_value: p_value(stat.value, &draws)?,
        critical_value: critical_value(&draws, cfg.alpha)?,
        reject: rejects(stat.value, &draws, cfg.alpha),
        n,
        dims: (d1, d2),
        alpha: cfg.alpha,
        null_draws: draws.len(),
        config: cfg.clone(),
        fingerprint: cfg.fingerprint(),
        seed: cfg.seed,
        flags: stat.flags,
    })
}
