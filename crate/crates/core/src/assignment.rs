//! Exact linear assignment: the empirical optimal transport between two
//! point clouds of equal size.
//!
//! The solver is the shortest-augmenting-path scheme with dual potentials
//! (Hungarian / Jonker–Volgenant family), O(n^3) in the worst case. Rows are
//! inserted in index order and ties in the Dijkstra-like scan are resolved
//! towards the lowest column index, so the output is a deterministic
//! function of the cost matrix.

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::numeric::{norm, unit_angle};

/// Optimal pairing of row indices (sample) to column indices (grid).
#[derive(Debug, Clone, PartialEq)]
pub struct TransportMap {
    /// `perm[i]` is the grid index assigned to sample point `i`.
    pub perm: Vec<usize>,
    pub total_cost: f64,
}

impl TransportMap {
    /// Inverse permutation: grid index -> sample index.
    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.perm.len()];
        for (i, &j) in self.perm.iter().enumerate() {
            inv[j] = i;
        }
        inv
    }
}

pub fn solve_assignment(cost: &SquareMatrix) -> Result<TransportMap> {
    let n = cost.n();
    if let Some(bad) = cost.as_slice().iter().find(|c| !c.is_finite() || **c < 0.0) {
        return Err(Error::invalid(format!(
            "assignment costs must be finite and nonnegative, found {bad}"
        )));
    }
    if n == 0 {
        return Ok(TransportMap {
            perm: Vec::new(),
            total_cost: 0.0,
        });
    }

    // 1-based arrays; column 0 is the virtual source.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut owner = vec![0usize; n + 1]; // owner[j] = row matched to column j
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![f64::INFINITY; n + 1];
    let mut used = vec![false; n + 1];

    for row in 1..=n {
        owner[0] = row;
        let mut j0 = 0usize;
        minv.iter_mut().for_each(|m| *m = f64::INFINITY);
        used.iter_mut().for_each(|f| *f = false);
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            let crow = cost.row(i0 - 1);
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = crow[j - 1] - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if j1 == 0 {
                return Err(Error::Numerical(
                    "assignment solver failed to find an augmenting path".into(),
                ));
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut perm = vec![0usize; n];
    for j in 1..=n {
        perm[owner[j] - 1] = j - 1;
    }
    let total_cost = perm
        .iter()
        .enumerate()
        .map(|(i, &j)| cost.get(i, j))
        .sum();
    Ok(TransportMap { perm, total_cost })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostKind {
    /// |x - y|^2 / 2 in R^d.
    EuclideanSqHalf,
    /// d_S(x, y)^2 / 2 on the unit sphere.
    GeodesicSqHalf,
}

pub fn cost_matrix<P: AsRef<[f64]>, Q: AsRef<[f64]>>(
    sample: &[P],
    grid: &[Q],
    kind: CostKind,
) -> Result<SquareMatrix> {
    let n = sample.len();
    if grid.len() != n {
        return Err(Error::invalid(format!(
            "sample has {n} points but the grid has {}",
            grid.len()
        )));
    }
    if n == 0 {
        return Ok(SquareMatrix::zeros(0));
    }
    let d = sample[0].as_ref().len();
    for (label, set) in [("sample", sample.iter().map(|p| p.as_ref()).collect::<Vec<_>>()),
        ("grid", grid.iter().map(|p| p.as_ref()).collect::<Vec<_>>())]
    {
        for (i, p) in set.iter().enumerate() {
            if p.len() != d {
                return Err(Error::invalid(format!(
                    "{label} point {i} has dimension {}, expected {d}",
                    p.len()
                )));
            }
            if kind == CostKind::GeodesicSqHalf && (norm(p) - 1.0).abs() > 1e-9 {
                return Err(Error::invalid(format!("{label} point {i} is not a unit vector")));
            }
        }
    }
    let mut out = SquareMatrix::zeros(n);
    for (i, p) in sample.iter().enumerate() {
        let p = p.as_ref();
        for (j, q) in grid.iter().enumerate() {
            let q = q.as_ref();
            let c = match kind {
                CostKind::EuclideanSqHalf => {
                    0.5 * p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
                }
                CostKind::GeodesicSqHalf => {
                    let t = unit_angle(p, q);
                    0.5 * t * t
                }
            };
            out.set(i, j, c);
        }
    }
    Ok(out)
}
