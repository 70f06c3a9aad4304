use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::directional::Chart;
use crate::error::{Error, Result};
use crate::scores::{RadialScore, ScoreSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    Euclidean,
    Sphere,
}

impl FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" | "rd" => Ok(Space::Euclidean),
            "sphere" | "spherical" => Ok(Space::Sphere),
            other => Err(Error::invalid(format!("unknown space '{other}'"))),
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::Euclidean => "euclidean",
            Space::Sphere => "sphere",
        })
    }
}

/// Which spherical statistic to compute. Ignored in Euclidean space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Structured Step-2 grid, tangent-space scores.
    TwoStep,
    /// Chart of the Step-1 images; cheaper, but its null depends on the
    /// estimated pole and is simulated per dataset.
    Step1Only,
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "two_step" | "twostep" => Ok(Variant::TwoStep),
            "step1" | "step1_only" => Ok(Variant::Step1Only),
            other => Err(Error::invalid(format!("unknown variant '{other}'"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::TwoStep => "two_step",
            Variant::Step1Only => "step1_only",
        })
    }
}

pub const MIN_NULL_DRAWS: usize = 99;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    pub space: Space,
    pub scores_x: ScoreSpec,
    pub scores_y: ScoreSpec,
    pub chart: Chart,
    pub variant: Variant,
    pub n_null_draws: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl TestConfig {
    /// Wilcoxon scores on both margins, two-step variant, 999 draws,
    /// alpha = 0.05, seed 0.
    pub fn new(space: Space) -> Self {
        TestConfig {
            space,
            scores_x: ScoreSpec::plain(RadialScore::Wilcoxon),
            scores_y: ScoreSpec::plain(RadialScore::Wilcoxon),
            chart: Chart::AzimuthalEquidistant,
            variant: Variant::TwoStep,
            n_null_draws: 999,
            alpha: 0.05,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_null_draws < MIN_NULL_DRAWS {
            return Err(Error::invalid(format!(
                "at least {MIN_NULL_DRAWS} null draws are required, got {}",
                self.n_null_draws
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.space == Space::Sphere {
            for spec in [&self.scores_x, &self.scores_y] {
                if !matches!(spec, ScoreSpec::Plain { .. }) {
                    return Err(Error::invalid(format!(
                        "score '{spec}' is not available on the sphere; use wilcoxon, vdw or sign"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Whether the null law is data-free and can be tabulated once per
    /// (n, dimensions, scores, seed, draws).
    pub fn null_is_cacheable(&self) -> bool {
        self.space == Space::Euclidean || self.variant == Variant::TwoStep
    }

    /// SHA-256 over every field of the configuration.
    pub fn fingerprint(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        sha256_hex(canonical.as_bytes())
    }

    /// Key of the null table for samples of size n in dimensions (d1, d2):
    /// everything the null law depends on, and nothing else.
    pub fn null_fingerprint(&self, n: usize, d1: usize, d2: usize) -> String {
        let variant = match self.space {
            Space::Euclidean => "-".to_string(),
            Space::Sphere => self.variant.to_string(),
        };
        let canonical = format!(
            "otdcov-null|space={}|variant={}|n={n}|d1={d1}|d2={d2}|x={}|y={}|draws={}|seed={}",
            self.space, variant, self.scores_x, self.scores_y, self.n_null_draws, self.seed
        );
        sha256_hex(canonical.as_bytes())
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
