//! Seeded samplers for simulations.

use rand::Rng;
use rand_distr::{Beta, Distribution, StandardNormal};

use crate::directional::uniform_sphere_points;
use crate::error::{Error, Result};
use crate::geometry::UnitDirection;
use crate::rng::stream;

/// n i.i.d. uniform points on S^{d-1}.
pub fn sample_uniform_sphere(n: usize, d: usize, seed: u64) -> Result<Vec<UnitDirection>> {
    uniform_sphere_points(n, d, seed, "uniform-sphere")
}

/// n i.i.d. standard Gaussian vectors in R^d.
pub fn sample_gaussian(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = stream(seed, "gaussian", d as u64);
    (0..n)
        .map(|_| (0..d).map(|_| rng.sample(StandardNormal)).collect())
        .collect()
}

/// One von Mises–Fisher draw, by rejection sampling of the cosine
/// w = <X, mu> and a uniform direction orthogonal to mu.
pub(crate) fn vmf_draw<R: Rng + ?Sized>(rng: &mut R, mu: &UnitDirection, kappa: f64, beta: &Beta<f64>) -> Result<UnitDirection> {
    let d = mu.dim();
    let dm1 = (d - 1) as f64;
    let b = dm1 / (2.0 * kappa + (4.0 * kappa * kappa + dm1 * dm1).sqrt());
    let x0 = (1.0 - b) / (1.0 + b);
    let c = kappa * x0 + dm1 * (1.0 - x0 * x0).ln();
    let w = loop {
        let z: f64 = beta.sample(rng);
        let w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
        let u: f64 = rng.random();
        if kappa * w + dm1 * (1.0 - x0 * w).ln() - c >= u.ln() {
            break w;
        }
    };
    let m = mu.as_slice();
    let v = loop {
        let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let along: f64 = g.iter().zip(m).map(|(a, b)| a * b).sum();
        let t: Vec<f64> = g.iter().zip(m).map(|(a, b)| a - along * b).collect();
        let len = t.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-12 {
            break t.into_iter().map(|x| x / len).collect::<Vec<_>>();
        }
    };
    let s = (1.0 - w * w).max(0.0).sqrt();
    UnitDirection::new(m.iter().zip(&v).map(|(a, b)| w * a + s * b).collect())
}

pub(crate) fn vmf_beta(d: usize) -> Result<Beta<f64>> {
    let a = (d as f64 - 1.0) / 2.0;
    Beta::new(a, a).map_err(|e| Error::Numerical(format!("beta sampler: {e}")))
}

/// n i.i.d. von Mises–Fisher(mu, kappa) points; kappa = 0 is uniform.
pub fn sample_vmf(n: usize, mu: &UnitDirection, kappa: f64, seed: u64) -> Result<Vec<UnitDirection>> {
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(Error::invalid(format!("kappa must be finite and >= 0, got {kappa}")));
    }
    let d = mu.dim();
    let beta = vmf_beta(d)?;
    let mut rng = stream(seed, "vmf", d as u64);
    (0..n).map(|_| vmf_draw(&mut rng, mu, kappa, &beta)).collect()
}
