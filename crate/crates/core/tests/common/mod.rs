#![allow(dead_code)]

use rand::Rng;
use rand_distr::StandardNormal;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Uniform point on S^{d-1} from a normalized Gaussian vector.
pub fn uniform_direction<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let len = norm(&v);
        if len > 1e-12 {
            return v.into_iter().map(|x| x / len).collect();
        }
    }
}
