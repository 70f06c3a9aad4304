//! Score functions applied to center-outward ranks and signs: Wilcoxon,
//! van der Waerden (chi-square quantile), sign-test, and the biloop
//! composition that maps a radial score onto a bounded planar curve.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{bisect_increasing, regularized_gamma_p};

/// The radial part J(u) of a score, u = rank / (n_R + 1) in [0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialScore {
    Wilcoxon,
    VanDerWaerden,
    Sign,
}

impl RadialScore {
    /// J(u); `dof` is the chi-square degrees of freedom for van der Waerden.
    pub fn radial(self, u: f64, dof: usize) -> Result<f64> {
        if !(0.0..1.0).contains(&u) {
            return Err(Error::invalid(format!("radial score argument {u} outside [0, 1)")));
        }
        match self {
            RadialScore::Wilcoxon => Ok(u),
            RadialScore::VanDerWaerden => Ok(chi2_quantile(u, dof)?.sqrt()),
            RadialScore::Sign => Ok(1.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RadialScore::Wilcoxon => "wilcoxon",
            RadialScore::VanDerWaerden => "van_der_waerden",
            RadialScore::Sign => "sign",
        }
    }
}

impl FromStr for RadialScore {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "wilcoxon" => Ok(RadialScore::Wilcoxon),
            "van_der_waerden" | "vdw" | "gaussian" => Ok(RadialScore::VanDerWaerden),
            "sign" | "sign_test" => Ok(RadialScore::Sign),
            other => Err(Error::invalid(format!("unknown score kind '{other}'"))),
        }
    }
}

/// A full score specification for center-outward records in R^d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScoreSpec {
    Plain { radial: RadialScore },
    /// psi_inf^+ composed with a plain radial score; doubles the dimension.
    Biloop { base: RadialScore, c: f64 },
}

pub const DEFAULT_BILOOP_C: f64 = 1.0;

impl ScoreSpec {
    pub fn plain(radial: RadialScore) -> Self {
        ScoreSpec::Plain { radial }
    }

    pub fn biloop(base: RadialScore, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::invalid(format!("biloop constant must be positive, got {c}")));
        }
        Ok(ScoreSpec::Biloop { base, c })
    }

    pub fn base(&self) -> RadialScore {
        match *self {
            ScoreSpec::Plain { radial } => radial,
            ScoreSpec::Biloop { base, .. } => base,
        }
    }

    /// Dimension of the scored embedding for data in R^d.
    pub fn output_dim(&self, d: usize) -> usize {
        match self {
            ScoreSpec::Plain { .. } => d,
            ScoreSpec::Biloop { .. } => 2 * d,
        }
    }

    /// Parses `wilcoxon`, `vdw`, `sign`, or `biloop-<base>`; `c` is used for
    /// biloop kinds only.
    pub fn parse(s: &str, c: f64) -> Result<Self> {
        let lower = s.to_ascii_lowercase().replace('-', "_");
        if let Some(base) = lower.strip_prefix("biloop_") {
            ScoreSpec::biloop(base.parse()?, c)
        } else if lower == "biloop" {
            ScoreSpec::biloop(RadialScore::Wilcoxon, c)
        } else {
            Ok(ScoreSpec::plain(lower.parse()?))
        }
    }
}

impl fmt::Display for ScoreSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScoreSpec::Plain { radial } => write!(f, "{}", radial.name()),
            ScoreSpec::Biloop { base, c } => write!(f, "biloop_{}(c={c:?})", base.name()),
        }
    }
}

/// psi_inf^+(v) = (c (1 + cos(2 pi tanh(v/c) + pi)), sin(2 pi tanh(v/c))).
///
/// Bounded by sqrt(4c^2 + 1); returns to (0, 0) as v grows.
pub fn biloop_curve(v: f64, c: f64) -> (f64, f64) {
    let t = 2.0 * PI * (v / c).tanh();
    (c * (1.0 + (t + PI).cos()), t.sin())
}

/// Chi-square distribution function with `dof` degrees of freedom.
pub fn chi2_cdf(x: f64, dof: usize) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    regularized_gamma_p(dof as f64 / 2.0, x / 2.0)
}

/// Chi-square quantile by bisection on the distribution function.
pub fn chi2_quantile(p: f64, dof: usize) -> Result<f64> {
    if dof == 0 {
        return Err(Error::invalid("chi-square needs at least one degree of freedom"));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(Error::invalid(format!("chi-square quantile level {p} outside [0, 1)")));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let mut hi = (dof as f64).max(1.0);
    while chi2_cdf(hi, dof) < p {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Numerical("chi-square quantile bracket overflow".into()));
        }
    }
    Ok(bisect_increasing(|x| chi2_cdf(x, dof), p, 0.0, hi, 1e-15))
}

/// Scores a (rank, sign) pair from a grid with `n_r` radii.
///
/// `sign` is the unit direction (zero for origin copies); the returned
/// vector is J(u) * sign for plain scores and
/// (psi_1(J(u)) * sign, psi_2(J(u)) * sign) for biloop scores.
pub fn score_rank_sign(rank: usize, sign: &[f64], spec: &ScoreSpec, n_r: usize, dof: usize) -> Result<Vec<f64>> {
    if rank > n_r {
        return Err(Error::invalid(format!("rank {rank} exceeds the number of radii {n_r}")));
    }
    let u = rank as f64 / (n_r as f64 + 1.0);
    let j = spec.base().radial(u, dof)?;
    // Sign vectors of origin copies are zero, which zeroes every score.
    let out = match *spec {
        ScoreSpec::Plain { .. } => sign.iter().map(|s| j * s).collect(),
        ScoreSpec::Biloop { c, .. } => {
            let (p1, p2) = biloop_curve(j, c);
            sign.iter().map(|s| p1 * s).chain(sign.iter().map(|s| p2 * s)).collect()
        }
    };
    Ok(out)
}
