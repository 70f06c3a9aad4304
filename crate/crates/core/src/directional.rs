//! Directional ranks and signs on S^{d-1}.
//!
//! Step 1 pairs the sample with n i.i.d. uniform points under the
//! half-squared geodesic cost and reads off a data-driven pole: the image of
//! the observation closest to the sample Fréchet mean. Step 2 pairs the
//! sample with a structured grid around that pole, made of n_R parallels
//! (placed at cap-probability levels r / (n_R + 1)) crossed with n_S
//! meridians, plus n_0 copies of the pole. The parallel index of an
//! observation's image is its rank; the image's longitude is its sign.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::assignment::{cost_matrix, solve_assignment, CostKind, TransportMap};
use crate::center_outward::{factorize_n, uniform_direction};
use crate::error::{Error, Result};
use crate::geometry::{
    cap_quantile, exp_map, frechet_mean, geodesic_distance, log_map, pole_frame, FrechetMean,
    Rotation, TangentVector, UnitDirection, ANTIPODAL_THRESHOLD,
};
use crate::numeric::{dot, norm};
use crate::rng::stream;
use crate::scores::RadialScore;

/// Grid factorization on S^{d-1}. On the circle (d = 2) there are only two
/// meridians, so n_S = 2 and n_0 = n mod 2.
pub fn sphere_factorization(n: usize, d: usize) -> Result<(usize, usize, usize)> {
    if d < 2 {
        return Err(Error::invalid(format!("sphere grids need d >= 2, got {d}")));
    }
    if d == 2 {
        if n < 4 {
            return Err(Error::invalid(format!("grid factorization needs n >= 4, got {n}")));
        }
        return Ok((n / 2, 2, n % 2));
    }
    factorize_n(n)
}

/// n i.i.d. uniform points on S^{d-1} (normalized Gaussian vectors).
pub fn uniform_sphere_points(n: usize, d: usize, seed: u64, tag: &str) -> Result<Vec<UnitDirection>> {
    if d < 2 {
        return Err(Error::invalid(format!("sphere dimension must be >= 2, got {d}")));
    }
    let mut rng = stream(seed, tag, d as u64);
    (0..n)
        .map(|_| UnitDirection::new(uniform_direction(&mut rng, d)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step1Result {
    /// Image of each observation in the random uniform grid.
    pub images: Vec<UnitDirection>,
    /// The data-driven pole.
    pub pole: UnitDirection,
    /// Index of the observation whose image defines the pole.
    pub anchor: usize,
    pub grid: Vec<UnitDirection>,
    pub map: TransportMap,
    pub frechet: FrechetMean,
}

fn check_sample(sample: &[UnitDirection]) -> Result<usize> {
    let d = sample
        .first()
        .ok_or_else(|| Error::invalid("empty sample"))?
        .dim();
    if let Some(i) = sample.iter().position(|z| z.dim() != d) {
        return Err(Error::invalid(format!("observation {i} has a different dimension")));
    }
    Ok(d)
}

/// Step 1 against a freshly drawn uniform grid.
pub fn step1_transport(sample: &[UnitDirection], seed: u64) -> Result<Step1Result> {
    let d = check_sample(sample)?;
    let grid = uniform_sphere_points(sample.len(), d, seed, "sphere-step1-grid")?;
    step1_transport_with_grid(sample, grid)
}

/// Step 1 against a caller-supplied grid of the same size.
pub fn step1_transport_with_grid(
    sample: &[UnitDirection],
    grid: Vec<UnitDirection>,
) -> Result<Step1Result> {
    if sample.len() < 2 {
        return Err(Error::invalid(format!(
            "step 1 needs at least 2 observations, got {}",
            sample.len()
        )));
    }
    let d = check_sample(sample)?;
    if grid.len() != sample.len() || grid.iter().any(|g| g.dim() != d) {
        return Err(Error::invalid("step-1 grid does not match the sample"));
    }
    let cost = cost_matrix(sample, &grid, CostKind::GeodesicSqHalf)?;
    let map = solve_assignment(&cost)?;
    let images: Vec<UnitDirection> = map.perm.iter().map(|&j| grid[j].clone()).collect();

    let frechet = frechet_mean(sample, None)?;
    let mut anchor = 0;
    let mut best = f64::INFINITY;
    for (i, z) in sample.iter().enumerate() {
        let dist = geodesic_distance(z, &frechet.mean)?;
        if dist < best {
            best = dist;
            anchor = i;
        }
    }
    let pole = images[anchor].clone();
    Ok(Step1Result {
        images,
        pole,
        anchor,
        grid,
        map,
        frechet,
    })
}

/// Latitude 1 - <image, pole> in [0, 2] and the longitude: the unit vector
/// along the component of `image` orthogonal to `pole`. The longitude is
/// `None` when `image = ±pole`.
pub fn latitude_longitude(image: &UnitDirection, pole: &UnitDirection) -> Result<(f64, Option<Vec<f64>>)> {
    if image.dim() != pole.dim() {
        return Err(Error::invalid("image and pole differ in dimension"));
    }
    let c = image.dot(pole).clamp(-1.0, 1.0);
    let latitude = 1.0 - c;
    let ortho: Vec<f64> = image
        .as_slice()
        .iter()
        .zip(pole.as_slice())
        .map(|(z, p)| z - c * p)
        .collect();
    let len = norm(&ortho);
    if len <= 1e-12 {
        return Ok((latitude, None));
    }
    Ok((latitude, Some(ortho.into_iter().map(|v| v / len).collect())))
}

/// Meridian/parallel grid around a pole.
///
/// Labels run parallel-major: (r - 1) n_S + s, then the n_0 pole copies.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    pole: UnitDirection,
    n_r: usize,
    n_s: usize,
    n_0: usize,
    /// <point, pole> on parallel r (index r - 1).
    latitudes: Vec<f64>,
    /// Unit vectors orthogonal to the pole, one per meridian.
    longitudes: Vec<Vec<f64>>,
    points: Vec<UnitDirection>,
}

/// Builds the Step-2 grid. Parallels sit at u_r = F_*^{-1}(1 - r/(n_R+1)) so
/// the cap above parallel r carries uniform probability r/(n_R+1). Meridians
/// are equispaced for d = 3, the two half-circles for d = 2 (n_S <= 2), and
/// i.i.d. uniform on the equatorial sphere for d > 3.
pub fn build_sphere_grid(
    pole: &UnitDirection,
    n_r: usize,
    n_s: usize,
    n_0: usize,
    seed: u64,
) -> Result<SphereGrid> {
    let d = pole.dim();
    if n_r == 0 || n_s == 0 {
        return Err(Error::invalid("sphere grid needs n_R >= 1 and n_S >= 1"));
    }
    if n_0 >= n_r.min(n_s) {
        return Err(Error::invalid(format!(
            "n_0 = {n_0} must be smaller than min(n_R, n_S) = {}",
            n_r.min(n_s)
        )));
    }
    if d == 2 && n_s > 2 {
        return Err(Error::invalid("on the circle there are at most two meridians"));
    }

    // Longitudes in the equator of the canonical pole e_d.
    let canonical: Vec<Vec<f64>> = match d {
        2 => [vec![1.0, 0.0], vec![-1.0, 0.0]][..n_s].to_vec(),
        3 => (0..n_s)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / n_s as f64;
                vec![a.cos(), a.sin(), 0.0]
            })
            .collect(),
        _ => {
            let mut rng = stream(seed, "sphere-meridians", d as u64);
            (0..n_s)
                .map(|_| {
                    let mut v = uniform_direction(&mut rng, d - 1);
                    v.push(0.0);
                    v
                })
                .collect()
        }
    };
    let frame = pole_frame(pole)?;
    let longitudes: Vec<Vec<f64>> = canonical
        .iter()
        .map(|v| {
            let w = frame.apply(v);
            let t = TangentVector::project(pole.clone(), &w)?;
            let len = t.norm();
            Ok(t.components().iter().map(|c| c / len).collect())
        })
        .collect::<Result<_>>()?;

    let mut latitudes = Vec::with_capacity(n_r);
    for r in 1..=n_r {
        latitudes.push(cap_quantile(1.0 - r as f64 / (n_r as f64 + 1.0), d)?);
    }

    let mut points = Vec::with_capacity(n_r * n_s + n_0);
    for &u in &latitudes {
        let s = (1.0 - u * u).max(0.0).sqrt();
        for lon in &longitudes {
            let coords = pole
                .as_slice()
                .iter()
                .zip(lon)
                .map(|(p, l)| u * p + s * l)
                .collect();
            points.push(UnitDirection::new(coords)?);
        }
    }
    points.extend(std::iter::repeat_n(pole.clone(), n_0));

    Ok(SphereGrid {
        pole: pole.clone(),
        n_r,
        n_s,
        n_0,
        latitudes,
        longitudes,
        points,
    })
}

impl SphereGrid {
    /// Grid for a sample of size n around `pole`, factorized by
    /// [`sphere_factorization`].
    pub fn for_sample_size(pole: &UnitDirection, n: usize, seed: u64) -> Result<Self> {
        let (n_r, n_s, n_0) = sphere_factorization(n, pole.dim())?;
        build_sphere_grid(pole, n_r, n_s, n_0, seed)
    }

    pub fn pole(&self) -> &UnitDirection {
        &self.pole
    }

    pub fn dim(&self) -> usize {
        self.pole.dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_s(&self) -> usize {
        self.n_s
    }

    pub fn n_0(&self) -> usize {
        self.n_0
    }

    pub fn points(&self) -> &[UnitDirection] {
        &self.points
    }

    pub fn parallel_latitudes(&self) -> &[f64] {
        &self.latitudes
    }

    pub fn meridian_longitudes(&self) -> &[Vec<f64>] {
        &self.longitudes
    }

    pub fn rank_of(&self, label: usize) -> usize {
        if label >= self.n_r * self.n_s {
            0
        } else {
            label / self.n_s + 1
        }
    }

    pub fn sign_of(&self, label: usize) -> Vec<f64> {
        if label >= self.n_r * self.n_s {
            vec![0.0; self.dim()]
        } else {
            self.longitudes[label % self.n_s].clone()
        }
    }

    /// The same grid moved by a rotation (pole, meridians and points).
    pub fn rotated(&self, rotation: &Rotation) -> Result<SphereGrid> {
        if rotation.dim() != self.dim() {
            return Err(Error::invalid("rotation dimension does not match the grid"));
        }
        Ok(SphereGrid {
            pole: rotation.apply_unit(&self.pole),
            n_r: self.n_r,
            n_s: self.n_s,
            n_0: self.n_0,
            latitudes: self.latitudes.clone(),
            longitudes: self.longitudes.iter().map(|l| rotation.apply(l)).collect(),
            points: self.points.iter().map(|p| rotation.apply_unit(p)).collect(),
        })
    }

    pub fn record(&self, label: usize) -> DirectionalRankSign {
        let rank = self.rank_of(label);
        let latitude = if rank == 0 {
            0.0
        } else {
            1.0 - self.latitudes[rank - 1]
        };
        DirectionalRankSign {
            label,
            rank,
            sign: self.sign_of(label),
            image: self.points[label].clone(),
            latitude,
            pole: self.pole.clone(),
        }
    }

    /// Tangent-space embedding of every label, in label order.
    pub fn tangent_points(&self, radial: RadialScore) -> Result<Vec<Vec<f64>>> {
        (0..self.len())
            .map(|label| tangent_embed(&self.record(label), radial, self))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalRankSign {
    pub label: usize,
    /// 1..=n_R, or 0 for pole copies.
    pub rank: usize,
    /// Unit vector orthogonal to the pole; zero for pole copies.
    pub sign: Vec<f64>,
    pub image: UnitDirection,
    /// 1 - <image, pole>.
    pub latitude: f64,
    pub pole: UnitDirection,
}

/// Step 2: optimal pairing with the structured grid.
pub fn step2_transport(
    sample: &[UnitDirection],
    grid: &SphereGrid,
) -> Result<(Vec<DirectionalRankSign>, TransportMap)> {
    if sample.len() != grid.len() {
        return Err(Error::invalid(format!(
            "sample size {} differs from grid size {}",
            sample.len(),
            grid.len()
        )));
    }
    let d = check_sample(sample)?;
    if d != grid.dim() {
        return Err(Error::invalid("sample and grid differ in dimension"));
    }
    let cost = cost_matrix(sample, grid.points(), CostKind::GeodesicSqHalf)?;
    let map = solve_assignment(&cost)?;
    let records = map.perm.iter().map(|&label| grid.record(label)).collect();
    Ok((records, map))
}

/// Radial score of u = rank / (n_R + 1) times the sign, as a vector of the
/// tangent space at the pole. Van der Waerden scores use d - 1 degrees of
/// freedom, the dimension of that tangent space.
pub fn tangent_embed(rs: &DirectionalRankSign, radial: RadialScore, grid: &SphereGrid) -> Result<Vec<f64>> {
    if rs.rank > grid.n_r() || rs.sign.len() != grid.dim() {
        return Err(Error::invalid("record does not belong to this grid"));
    }
    if rs.rank == 0 {
        return Ok(vec![0.0; grid.dim()]);
    }
    let u = rs.rank as f64 / (grid.n_r() as f64 + 1.0);
    let j = radial.radial(u, grid.dim() - 1)?;
    Ok(rs.sign.iter().map(|s| j * s).collect())
}

/// Chart from S^{d-1} minus the antipode of the pole onto an open ball of
/// the tangent space at the pole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    /// Logarithm map; range is the open ball of radius pi.
    AzimuthalEquidistant,
    /// Logarithm map divided by pi; range is the open unit ball.
    AzimuthalEquidistantNormalized,
}

impl Chart {
    pub fn name(self) -> &'static str {
        match self {
            Chart::AzimuthalEquidistant => "azimuthal_equidistant",
            Chart::AzimuthalEquidistantNormalized => "azimuthal_equidistant_normalized",
        }
    }

    fn scale(self) -> f64 {
        match self {
            Chart::AzimuthalEquidistant => 1.0,
            Chart::AzimuthalEquidistantNormalized => 1.0 / std::f64::consts::PI,
        }
    }
}

impl FromStr for Chart {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "azimuthal_equidistant" | "log" => Ok(Chart::AzimuthalEquidistant),
            "azimuthal_equidistant_normalized" | "log_normalized" => {
                Ok(Chart::AzimuthalEquidistantNormalized)
            }
            other => Err(Error::invalid(format!("unknown chart '{other}'"))),
        }
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Coordinates of log_pole(image) in the orthonormal basis
/// (F e_1, ..., F e_{d-1}) of the tangent space, F = [`pole_frame`].
pub fn chart_embed(image: &UnitDirection, pole: &UnitDirection, chart: Chart) -> Result<Vec<f64>> {
    if image.dim() != pole.dim() {
        return Err(Error::invalid("image and pole differ in dimension"));
    }
    if geodesic_distance(image, pole)? >= ANTIPODAL_THRESHOLD {
        return Err(Error::domain("chart is undefined at the antipode of the pole"));
    }
    let v = log_map(pole, image)?;
    let frame = pole_frame(pole)?;
    let scale = chart.scale();
    Ok((0..pole.dim() - 1)
        .map(|k| scale * dot(&frame.column(k), v.components()))
        .collect())
}

/// Inverse of [`chart_embed`].
pub fn chart_inverse(coords: &[f64], pole: &UnitDirection, chart: Chart) -> Result<UnitDirection> {
    let d = pole.dim();
    if coords.len() + 1 != d {
        return Err(Error::invalid("chart coordinates have the wrong length"));
    }
    let frame = pole_frame(pole)?;
    let scale = chart.scale();
    let mut ambient = vec![0.0; d];
    for (k, c) in coords.iter().enumerate() {
        for (a, f) in ambient.iter_mut().zip(frame.column(k)) {
            *a += c / scale * f;
        }
    }
    let v = TangentVector::project(pole.clone(), &ambient)?;
    exp_map(pole, &v)
}
