//! Rejection-rate simulations.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Rotation, UnitDirection};
use crate::rng::stream;

use super::config::{Space, TestConfig};
use super::null::NullCache;
use super::report::run_test;
use super::sampling::{vmf_beta, vmf_draw};

pub const MIN_REPLICATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    /// X and Y independent: standard Gaussian in R^d, uniform on spheres.
    Independent,
    /// Y = R X with noise: Gaussian with variance 1/kappa in R^d, von
    /// Mises–Fisher around R X on spheres. `None` means no noise.
    RotationDependence { kappa: Option<f64> },
    /// Gaussian dependence with correlation r between matching coordinates
    /// (normalized to unit length on spheres).
    Copula { r: f64 },
}

impl FromStr for Scenario {
    type Err = Error;

    /// `independent`, `rotation`, `rotation:<kappa>`, `copula:<r>`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        let (name, arg) = match lower.split_once(':') {
            Some((a, b)) => (a.to_string(), Some(b.to_string())),
            None => (lower.clone(), None),
        };
        let number = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad scenario parameter '{v}'")))
        };
        let scenario = match (name.replace('-', "_").as_str(), arg) {
            ("independent" | "independence", None) => Scenario::Independent,
            ("rotation" | "rotation_dependence", None) => Scenario::RotationDependence { kappa: None },
            ("rotation" | "rotation_dependence", Some(k)) => Scenario::RotationDependence {
                kappa: Some(number(&k)?),
            },
            ("copula", Some(r)) => Scenario::Copula { r: number(&r)? },
            _ => return Err(Error::invalid(format!("unknown scenario '{s}'"))),
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::Independent => f.write_str("independent"),
            Scenario::RotationDependence { kappa: None } => f.write_str("rotation"),
            Scenario::RotationDependence { kappa: Some(k) } => write!(f, "rotation:{k}"),
            Scenario::Copula { r } => write!(f, "copula:{r}"),
        }
    }
}

impl Scenario {
    fn validate(&self) -> Result<()> {
        match *self {
            Scenario::RotationDependence { kappa: Some(k) } if !(k.is_finite() && k > 0.0) => {
                Err(Error::invalid(format!("rotation noise kappa must be positive, got {k}")))
            }
            Scenario::Copula { r } if !(-1.0..=1.0).contains(&r) => {
                Err(Error::invalid(format!("copula correlation must lie in [-1, 1], got {r}")))
            }
            _ => Ok(()),
        }
    }

    /// One dataset of size n, drawn from the stream `(seed, tag, index)`.
    pub fn generate(
        &self,
        space: Space,
        n: usize,
        d1: usize,
        d2: usize,
        seed: u64,
        index: u64,
    ) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
        self.validate()?;
        if let Scenario::RotationDependence { .. } = self {
            if d1 != d2 {
                return Err(Error::invalid("rotation dependence needs d1 = d2"));
            }
        }
        if space == Space::Sphere && d1.min(d2) < 2 {
            return Err(Error::invalid("sphere scenarios need d >= 2"));
        }
        let mut rng = stream(seed, &format!("scenario-n{n}"), index);
        let gauss = |rng: &mut rand_chacha::ChaCha8Rng, d: usize| -> Vec<f64> {
            (0..d).map(|_| rng.sample(StandardNormal)).collect()
        };
        let unit = |v: Vec<f64>| -> Result<Vec<f64>> { Ok(UnitDirection::new(v)?.into_vec()) };
        let sphere = space == Space::Sphere;
        let mut xs = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        match *self {
            Scenario::Independent => {
                for _ in 0..n {
                    let x = gauss(&mut rng, d1);
                    let y = gauss(&mut rng, d2);
                    if sphere {
                        xs.push(unit(x)?);
                        ys.push(unit(y)?);
                    } else {
                        xs.push(x);
                        ys.push(y);
                    }
                }
            }
            Scenario::RotationDependence { kappa } => {
                let rot = fixed_rotation(d1);
                let beta = vmf_beta(d1)?;
                for _ in 0..n {
                    let mut x = gauss(&mut rng, d1);
                    if sphere {
                        x = unit(x)?;
                    }
                    let rx = rot.apply(&x);
                    let y = match (kappa, sphere) {
                        (None, true) => unit(rx)?,
                        (None, false) => rx,
                        (Some(k), true) => vmf_draw(&mut rng, &UnitDirection::new(rx)?, k, &beta)?.into_vec(),
                        (Some(k), false) => {
                            let sd = 1.0 / k.sqrt();
                            rx.iter().map(|v| v + sd * rng.sample::<f64, _>(StandardNormal)).collect()
                        }
                    };
                    xs.push(x);
                    ys.push(y);
                }
            }
            Scenario::Copula { r } => {
                let s = (1.0 - r * r).max(0.0).sqrt();
                for _ in 0..n {
                    let x = gauss(&mut rng, d1);
                    let e = gauss(&mut rng, d2);
                    let y: Vec<f64> = e
                        .iter()
                        .enumerate()
                        .map(|(k, ek)| if k < d1 { r * x[k] + s * ek } else { *ek })
                        .collect();
                    if sphere {
                        xs.push(unit(x)?);
                        ys.push(unit(y)?);
                    } else {
                        xs.push(x);
                        ys.push(y);
                    }
                }
            }
        }
        Ok((xs, ys))
    }
}

/// Rotation by pi/3 in the (e_1, e_2) plane.
pub fn fixed_rotation(d: usize) -> Rotation {
    let mut m = Rotation::identity(d).as_row_major().to_vec();
    if d >= 2 {
        let (s, c) = (std::f64::consts::FRAC_PI_3).sin_cos();
        m[0] = c;
        m[1] = -s;
        m[d] = s;
        m[d + 1] = c;
    }
    Rotation::from_row_major(d, m).expect("plane rotation is orthogonal")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    pub scenario: String,
    pub n: usize,
    pub rejections: usize,
    pub reps: usize,
    pub rate: f64,
    /// Binomial standard error sqrt(rate (1 - rate) / reps).
    pub stderr: f64,
}

/// Rejection rates of the test configured by `cfg` over `reps` simulated
/// datasets per sample size.
///
/// Replicate i at size n draws its data from stream
/// `(cfg.seed, "scenario-n<n>", i)`; the grids and the null table come from
/// `cfg.seed` and are shared across replicates.
pub fn power_study(
    scenario: Scenario,
    n_values: &[usize],
    dims: (usize, usize),
    cfg: &TestConfig,
    reps: usize,
    cache: Option<&NullCache>,
) -> Result<Vec<PowerRow>> {
    if reps < MIN_REPLICATIONS {
        return Err(Error::invalid(format!(
            "power studies need at least {MIN_REPLICATIONS} replications, got {reps}"
        )));
    }
    cfg.validate()?;
    let local = NullCache::in_memory();
    let cache = cache.unwrap_or(&local);
    let (d1, d2) = dims;
    n_values
        .iter()
        .map(|&n| {
            // fill the cache once before the replicates run in parallel
            let (x0, y0) = scenario.generate(cfg.space, n, d1, d2, cfg.seed, 0)?;
            run_test(&x0, &y0, cfg, Some(cache))?;
            let decisions: Vec<bool> = (0..reps)
                .into_par_iter()
                .map(|i| {
                    let (x, y) = scenario.generate(cfg.space, n, d1, d2, cfg.seed, i as u64)?;
                    Ok(run_test(&x, &y, cfg, Some(cache))?.reject)
                })
                .collect::<Result<_>>()?;
            let rejections = decisions.iter().filter(|r| **r).count();
            let rate = rejections as f64 / reps as f64;
            Ok(PowerRow {
                scenario: scenario.to_string(),
                n,
                rejections,
                reps,
                rate,
                stderr: (rate * (1.0 - rate) / reps as f64).sqrt(),
            })
        })
        .collect()
}
