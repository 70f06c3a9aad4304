//! Empirical (V-statistic) distance covariance and correlation.
//!
//! Row reductions run in a fixed order and are combined by pairwise tree
//! summation, so results do not depend on the rayon pool size.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{pairwise_sum, SquareMatrix};
use crate::numeric::{euclidean_distance, norm, unit_angle};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Euclidean,
    /// Great-circle distance; points must be unit vectors.
    Geodesic,
}

const UNIT_TOL: f64 = 1e-9;

pub fn pairwise_distances<P: AsRef<[f64]> + Sync>(
    sample: &[P],
    metric: Metric,
) -> Result<SquareMatrix> {
    let n = sample.len();
    if n == 0 {
        return Err(Error::invalid("pairwise distances of an empty sample"));
    }
    let d = sample[0].as_ref().len();
    for (i, p) in sample.iter().enumerate() {
        let p = p.as_ref();
        if p.len() != d {
            return Err(Error::invalid(format!(
                "point {i} has dimension {}, expected {d}",
                p.len()
            )));
        }
        if metric == Metric::Geodesic && (norm(p) - 1.0).abs() > UNIT_TOL {
            return Err(Error::invalid(format!(
                "point {i} is not a unit vector (geodesic metric)"
            )));
        }
    }
    let mut out = SquareMatrix::zeros(n);
    out.as_mut_slice()
        .par_chunks_mut(n)
        .enumerate()
        .for_each(|(i, row)| {
            let a = sample[i].as_ref();
            for (j, slot) in row.iter_mut().enumerate() {
                if i == j {
                    continue;
                }
                let b = sample[j].as_ref();
                *slot = match metric {
                    Metric::Euclidean => euclidean_distance(a, b),
                    Metric::Geodesic => unit_angle(a, b),
                };
            }
        });
    // exact symmetry regardless of rounding in the two orders
    for i in 0..n {
        for j in 0..i {
            let v = out.get(i, j);
            out.set(j, i, v);
        }
    }
    Ok(out)
}

/// A double-centered distance matrix: all row and column sums vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleCenteredMatrix(SquareMatrix);

impl DoubleCenteredMatrix {
    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.as_slice().iter().all(|v| *v == 0.0)
    }
}

/// A_ij = D_ij - rowmean_i - colmean_j + grandmean.
pub fn double_center(distances: &SquareMatrix) -> Result<DoubleCenteredMatrix> {
    let n = distances.n();
    if n == 0 {
        return Err(Error::invalid("cannot center an empty matrix"));
    }
    let nf = n as f64;
    let row_means: Vec<f64> = (0..n)
        .map(|i| pairwise_sum(distances.row(i)) / nf)
        .collect();
    let col_means: Vec<f64> = (0..n)
        .map(|j| {
            let col: Vec<f64> = (0..n).map(|i| distances.get(i, j)).collect();
            pairwise_sum(&col) / nf
        })
        .collect();
    let grand = pairwise_sum(&row_means) / nf;
    let mut out = SquareMatrix::zeros(n);
    out.as_mut_slice()
        .par_chunks_mut(n)
        .enumerate()
        .for_each(|(i, row)| {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = distances.get(i, j) - row_means[i] - col_means[j] + grand;
            }
        });
    Ok(DoubleCenteredMatrix(out))
}

/// Builds and centers the distance matrix of a sample in one call.
pub fn centered_distances<P: AsRef<[f64]> + Sync>(
    sample: &[P],
    metric: Metric,
) -> Result<DoubleCenteredMatrix> {
    double_center(&pairwise_distances(sample, metric)?)
}

fn check_sizes(a: &DoubleCenteredMatrix, b: &DoubleCenteredMatrix) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::invalid(format!(
            "sample sizes differ: {} vs {}",
            a.n(),
            b.n()
        )));
    }
    Ok(())
}

/// (1/n^2) sum_ij A_ij B_ij, clamped at zero.
pub fn dcov_sq(a: &DoubleCenteredMatrix, b: &DoubleCenteredMatrix) -> Result<f64> {
    check_sizes(a, b)?;
    let n = a.n();
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0;
            for (x, y) in a.0.row(i).iter().zip(b.0.row(i)) {
                acc += x * y;
            }
            acc
        })
        .collect();
    Ok((pairwise_sum(&rows) / (n * n) as f64).max(0.0))
}

/// dCov^2 between A and B with B's labels relabeled by `sigma`:
/// (1/n^2) sum_ab A_ab B_{sigma(a) sigma(b)}.
///
/// With `sigma` the identity this equals [`dcov_sq`] bit for bit. Runs
/// sequentially; callers parallelize across permutations.
pub fn dcov_sq_relabeled(
    a: &DoubleCenteredMatrix,
    b: &DoubleCenteredMatrix,
    sigma: &[usize],
) -> Result<f64> {
    check_sizes(a, b)?;
    let n = a.n();
    if sigma.len() != n {
        return Err(Error::invalid("relabeling has the wrong length"));
    }
    let mut rows = Vec::with_capacity(n);
    for (i, &si) in sigma.iter().enumerate() {
        let arow = a.0.row(i);
        let brow = b.0.row(si);
        let mut acc = 0.0;
        for (x, &sj) in arow.iter().zip(sigma) {
            acc += x * brow[sj];
        }
        rows.push(acc);
    }
    Ok((pairwise_sum(&rows) / (n * n) as f64).max(0.0))
}

/// Squared distance correlation; 0 when either sample has zero distance
/// variance.
pub fn dcor_sq(a: &DoubleCenteredMatrix, b: &DoubleCenteredMatrix) -> Result<f64> {
    let ab = dcov_sq(a, b)?;
    let aa = dcov_sq(a, a)?;
    let bb = dcov_sq(b, b)?;
    let denom = (aa * bb).sqrt();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok((ab / denom).clamp(0.0, 1.0))
}
