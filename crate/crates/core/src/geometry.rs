//! Spherical primitives on S^{d-1}: geodesic distance, the half-squared
//! geodesic transport cost, exponential and logarithm maps, the Fréchet
//! mean, the cap distribution function and its inverse, and rotations.
//!
//! Every function here is pure.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::{adaptive_simpson, bisect_increasing, dot, norm, unit_angle};

/// Points closer than this (in geodesic distance) to the antipode of a base
/// point are outside every chart domain.
pub const ANTIPODAL_THRESHOLD: f64 = PI - 1e-9;

/// A unit vector of R^d, d >= 2. Renormalized on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitDirection {
    coords: Vec<f64>,
}

impl UnitDirection {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::invalid(format!(
                "unit directions need dimension >= 2, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("non-finite coordinate"));
        }
        let len = norm(&coords);
        if len == 0.0 {
            return Err(Error::invalid("cannot normalize the zero vector"));
        }
        Ok(Self {
            coords: coords.into_iter().map(|c| c / len).collect(),
        })
    }

    /// The k-th canonical basis vector of R^d.
    pub fn basis(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return Err(Error::invalid(format!("basis index {k} out of range for d = {d}")));
        }
        let mut coords = vec![0.0; d];
        coords[k] = 1.0;
        Self::new(coords)
    }

    /// The "north pole" e_d used as the canonical frame.
    pub fn north_pole(d: usize) -> Result<Self> {
        Self::basis(d, d.saturating_sub(1))
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coords
    }

    pub fn dot(&self, other: &UnitDirection) -> f64 {
        dot(&self.coords, &other.coords)
    }

    pub fn antipode(&self) -> UnitDirection {
        UnitDirection {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

impl AsRef<[f64]> for UnitDirection {
    fn as_ref(&self) -> &[f64] {
        &self.coords
    }
}

/// A vector of the tangent space at `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    base: UnitDirection,
    components: Vec<f64>,
}

impl TangentVector {
    /// Checks orthogonality to `base` (|<v, base>| <= 1e-10).
    pub fn new(base: UnitDirection, components: Vec<f64>) -> Result<Self> {
        check_same_dim(base.dim(), components.len())?;
        let inner = dot(base.as_slice(), &components);
        if inner.abs() > 1e-10 {
            return Err(Error::invalid(format!(
                "tangent components are not orthogonal to the base point (inner product {inner:e})"
            )));
        }
        Ok(Self { base, components })
    }

    /// Orthogonal projection of an ambient vector onto the tangent space at `base`.
    pub fn project(base: UnitDirection, ambient: &[f64]) -> Result<Self> {
        check_same_dim(base.dim(), ambient.len())?;
        let inner = dot(base.as_slice(), ambient);
        let components = ambient
            .iter()
            .zip(base.as_slice())
            .map(|(v, b)| v - inner * b)
            .collect();
        Ok(Self { base, components })
    }

    pub fn zero(base: UnitDirection) -> Self {
        let components = vec![0.0; base.dim()];
        Self { base, components }
    }

    pub fn base(&self) -> &UnitDirection {
        &self.base
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn norm(&self) -> f64 {
        norm(&self.components)
    }
}

fn check_same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::invalid(format!("dimension mismatch: {a} vs {b}")));
    }
    Ok(())
}

/// Great-circle distance, in [0, pi].
pub fn geodesic_distance(z1: &UnitDirection, z2: &UnitDirection) -> Result<f64> {
    check_same_dim(z1.dim(), z2.dim())?;
    Ok(unit_angle(z1.as_slice(), z2.as_slice()).clamp(0.0, PI))
}

/// Half-squared geodesic distance, the transport cost on the sphere.
pub fn transport_cost(z1: &UnitDirection, z2: &UnitDirection) -> Result<f64> {
    let d = geodesic_distance(z1, z2)?;
    Ok(0.5 * d * d)
}

/// Riemannian logarithm: the tangent vector at `base` pointing towards `z`
/// with length equal to their geodesic distance.
pub fn log_map(base: &UnitDirection, z: &UnitDirection) -> Result<TangentVector> {
    let theta = geodesic_distance(base, z)?;
    if theta >= ANTIPODAL_THRESHOLD {
        return Err(Error::domain(
            "logarithm map is undefined at the antipode of the base point",
        ));
    }
    let c = base.dot(z).clamp(-1.0, 1.0);
    // Component of z orthogonal to base.
    let mut w: Vec<f64> = z
        .as_slice()
        .iter()
        .zip(base.as_slice())
        .map(|(zi, bi)| zi - c * bi)
        .collect();
    let wn = norm(&w);
    if wn == 0.0 || theta == 0.0 {
        return Ok(TangentVector::zero(base.clone()));
    }
    for wi in &mut w {
        *wi *= theta / wn;
    }
    Ok(TangentVector {
        base: base.clone(),
        components: w,
    })
}

/// Riemannian exponential: cos|v| base + sin|v| v/|v|.
pub fn exp_map(base: &UnitDirection, v: &TangentVector) -> Result<UnitDirection> {
    check_same_dim(base.dim(), v.components.len())?;
    let len = v.norm();
    if len >= PI {
        return Err(Error::domain(format!(
            "tangent vector norm {len} is not below pi"
        )));
    }
    if len == 0.0 {
        return Ok(base.clone());
    }
    let (s, c) = len.sin_cos();
    let coords = base
        .as_slice()
        .iter()
        .zip(&v.components)
        .map(|(b, vi)| c * b + s * vi / len)
        .collect();
    UnitDirection::new(coords)
}

/// Outcome of the Fréchet-mean iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct FrechetMean {
    pub mean: UnitDirection,
    pub iterations: usize,
    pub converged: bool,
    /// Number of points skipped in the final gradient because they sat at
    /// the antipode of the current estimate.
    pub skipped_antipodal: usize,
}

const FRECHET_STEP_TOL: f64 = 1e-10;
const FRECHET_MAX_ITER: usize = 1000;

/// Weighted Fréchet mean under the half-squared geodesic cost.
///
/// Riemannian gradient descent with unit step: at each iterate the weighted
/// average of the logarithms of the points is computed and exponentiated.
/// Starts from the normalized extrinsic mean, or from `points[0]` when the
/// extrinsic mean is shorter than 1e-8. When several local minimizers exist
/// the one reached from that start is returned.
pub fn frechet_mean(points: &[UnitDirection], weights: Option<&[f64]>) -> Result<FrechetMean> {
    let first = points
        .first()
        .ok_or_else(|| Error::invalid("Fréchet mean of an empty set"))?;
    let d = first.dim();
    if points.iter().any(|p| p.dim() != d) {
        return Err(Error::invalid("points have mixed dimensions"));
    }
    let uniform;
    let w = match weights {
        Some(w) => {
            if w.len() != points.len() {
                return Err(Error::invalid("weights and points differ in length"));
            }
            if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::invalid("weights must be finite and nonnegative"));
            }
            w
        }
        None => {
            uniform = vec![1.0; points.len()];
            &uniform[..]
        }
    };
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return Err(Error::invalid("weights must have a positive sum"));
    }

    let mut extrinsic = vec![0.0; d];
    for (p, wi) in points.iter().zip(w) {
        for (e, c) in extrinsic.iter_mut().zip(p.as_slice()) {
            *e += wi * c;
        }
    }
    let mut estimate = if norm(&extrinsic) / total < 1e-8 {
        first.clone()
    } else {
        UnitDirection::new(extrinsic)?
    };

    let mut skipped = 0;
    for iter in 1..=FRECHET_MAX_ITER {
        let mut grad = vec![0.0; d];
        skipped = 0;
        let mut used = 0.0;
        for (p, wi) in points.iter().zip(w) {
            if *wi == 0.0 {
                continue;
            }
            match log_map(&estimate, p) {
                Ok(v) => {
                    for (g, c) in grad.iter_mut().zip(v.components()) {
                        *g += wi * c;
                    }
                    used += wi;
                }
                Err(_) => skipped += 1,
            }
        }
        if used == 0.0 {
            break;
        }
        for g in &mut grad {
            *g /= total;
        }
        let step = TangentVector::project(estimate.clone(), &grad)?;
        let step_norm = step.norm();
        if step_norm < FRECHET_STEP_TOL {
            return Ok(FrechetMean {
                mean: estimate,
                iterations: iter,
                converged: true,
                skipped_antipodal: skipped,
            });
        }
        estimate = exp_map(&estimate, &step)?;
    }
    Ok(FrechetMean {
        mean: estimate,
        iterations: FRECHET_MAX_ITER,
        converged: false,
        skipped_antipodal: skipped,
    })
}

/// Distribution function of <U, theta> for U uniform on S^{d-1}.
///
/// Closed forms for d = 2 (arcsine) and d = 3 (affine); for larger d the
/// ratio of integrals is evaluated by adaptive quadrature after the change of
/// variables s = -cos t, which turns the integrand into sin^{d-2} t.
pub fn cap_cdf(u: f64, d: usize) -> Result<f64> {
    if !(-1.0..=1.0).contains(&u) {
        return Err(Error::invalid(format!("cap_cdf argument {u} outside [-1, 1]")));
    }
    if d < 2 {
        return Err(Error::invalid(format!("cap_cdf needs d >= 2, got {d}")));
    }
    if u == -1.0 {
        return Ok(0.0);
    }
    if u == 1.0 {
        return Ok(1.0);
    }
    let value = match d {
        2 => 0.5 + u.asin() / PI,
        3 => 0.5 * (u + 1.0),
        _ => {
            let power = (d - 2) as i32;
            let integrand = |t: f64| t.sin().powi(power);
            let upper = (-u).acos();
            let num = adaptive_simpson(&integrand, 0.0, upper, 1e-13);
            let den = adaptive_simpson(&integrand, 0.0, PI, 1e-13);
            num / den
        }
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Inverse of [`cap_cdf`] by bisection on [-1, 1].
pub fn cap_quantile(p: f64, d: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("cap_quantile probability {p} outside [0, 1]")));
    }
    if d < 2 {
        return Err(Error::invalid(format!("cap_quantile needs d >= 2, got {d}")));
    }
    if p == 0.0 {
        return Ok(-1.0);
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    Ok(bisect_increasing(
        |u| cap_cdf(u, d).unwrap_or(f64::NAN),
        p,
        -1.0,
        1.0,
        1e-16,
    ))
}

/// A proper rotation of R^d stored as a dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    dim: usize,
    m: Vec<f64>,
}

impl Rotation {
    pub fn identity(dim: usize) -> Self {
        let mut m = vec![0.0; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = 1.0;
        }
        Self { dim, m }
    }

    /// Wraps a row-major matrix. Orthogonality is the caller's responsibility.
    pub fn from_row_major(dim: usize, m: Vec<f64>) -> Result<Self> {
        if m.len() != dim * dim {
            return Err(Error::invalid("rotation matrix has the wrong number of entries"));
        }
        Ok(Self { dim, m })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.m[i * self.dim + j]
    }

    pub fn as_row_major(&self) -> &[f64] {
        &self.m
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.dim);
        self.m
            .chunks_exact(self.dim)
            .map(|row| dot(row, v))
            .collect()
    }

    pub fn apply_unit(&self, z: &UnitDirection) -> UnitDirection {
        UnitDirection::new(self.apply(z.as_slice())).expect("rotations preserve unit norm")
    }

    pub fn transpose(&self) -> Rotation {
        let d = self.dim;
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                m[j * d + i] = self.m[i * d + j];
            }
        }
        Rotation { dim: d, m }
    }

    /// `self * other` (apply `other` first).
    pub fn compose(&self, other: &Rotation) -> Rotation {
        let d = self.dim;
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.m[i * d + k];
                for j in 0..d {
                    m[i * d + j] += a * other.m[k * d + j];
                }
            }
        }
        Rotation { dim: d, m }
    }

    /// Image of the k-th basis vector (the k-th column).
    pub fn column(&self, k: usize) -> Vec<f64> {
        (0..self.dim).map(|i| self.m[i * self.dim + k]).collect()
    }
}

/// The rotation in the plane spanned by `from` and `to` taking `from` to
/// `to`, acting as the identity on the orthogonal complement.
pub fn rotation_to(from: &UnitDirection, to: &UnitDirection) -> Result<Rotation> {
    check_same_dim(from.dim(), to.dim())?;
    if geodesic_distance(from, to)? >= ANTIPODAL_THRESHOLD {
        return Err(Error::domain("rotation between antipodal directions is not unique"));
    }
    let d = from.dim();
    let a = from.as_slice();
    let b = to.as_slice();
    let c = dot(a, b);
    // K = b a^T - a b^T ; R = I + K + K^2 / (1 + c)
    let mut k = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            k[i * d + j] = b[i] * a[j] - a[i] * b[j];
        }
    }
    let mut r = Rotation::identity(d);
    let scale = 1.0 / (1.0 + c);
    for i in 0..d {
        for j in 0..d {
            let mut k2 = 0.0;
            for l in 0..d {
                k2 += k[i * d + l] * k[l * d + j];
            }
            r.m[i * d + j] += k[i * d + j] + scale * k2;
        }
    }
    Ok(r)
}

/// A rotation taking the canonical pole e_d to `pole`. For `pole = -e_d`
/// it is the half-turn in the (e_1, e_d) plane.
pub fn pole_frame(pole: &UnitDirection) -> Result<Rotation> {
    let north = UnitDirection::north_pole(pole.dim())?;
    match rotation_to(&north, pole) {
        Ok(r) => Ok(r),
        Err(Error::Domain(_)) => {
            let d = pole.dim();
            let mut r = Rotation::identity(d);
            r.m[0] = -1.0;
            r.m[d * d - 1] = -1.0;
            Ok(r)
        }
        Err(e) => Err(e),
    }
}
