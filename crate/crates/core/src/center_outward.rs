//! Center-outward ranks and signs in R^d.
//!
//! A sample of size n = n_R n_S + n_0 is optimally paired (half squared
//! Euclidean cost) with a grid made of n_R concentric spheres of radii
//! r / (n_R + 1) along n_S directions, plus n_0 copies of the origin. The
//! rank of an observation is the radius index of its grid image and its sign
//! is the image's direction.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::assignment::{cost_matrix, solve_assignment, CostKind, TransportMap};
use crate::error::{Error, Result};
use crate::numeric::norm;
use crate::rng::stream;
use crate::scores::{score_rank_sign, ScoreSpec};

/// Factorization n = n_R n_S + n_0 with 0 <= n_0 < min(n_R, n_S).
///
/// Starts from n_R = n_S = floor(sqrt n) and grows n_S until the remainder
/// fits.
pub fn factorize_n(n: usize) -> Result<(usize, usize, usize)> {
    if n < 4 {
        return Err(Error::invalid(format!("grid factorization needs n >= 4, got {n}")));
    }
    let n_r = n.isqrt();
    let mut n_s = n_r;
    loop {
        let n_0 = n - n_r * n_s;
        if n_0 < n_r.min(n_s) {
            return Ok((n_r, n_s, n_0));
        }
        n_s += 1;
    }
}

/// n_S unit directions in R^d.
///
/// d = 1 alternates +1, -1; d = 2 uses equispaced angles starting at 0;
/// d >= 3 draws i.i.d. uniform directions from the seeded stream.
pub fn direction_set(n_s: usize, d: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if n_s == 0 || d == 0 {
        return Err(Error::invalid("direction set needs n_S >= 1 and d >= 1"));
    }
    let dirs = match d {
        1 => (0..n_s)
            .map(|k| vec![if k % 2 == 0 { 1.0 } else { -1.0 }])
            .collect(),
        2 => (0..n_s)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / n_s as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        _ => {
            let mut rng = stream(seed, "ball-directions", d as u64);
            (0..n_s).map(|_| uniform_direction(&mut rng, d)).collect()
        }
    };
    Ok(dirs)
}

pub(crate) fn uniform_direction<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let len = norm(&v);
        if len > 1e-12 {
            return v.into_iter().map(|x| x / len).collect();
        }
    }
}

/// Structured target grid in the open unit ball.
///
/// Point labels run radius-major: label (r - 1) n_S + s for r = 1..n_R and
/// s = 0..n_S, followed by the n_0 origin copies.
#[derive(Debug, Clone, PartialEq)]
pub struct BallGrid {
    n_r: usize,
    n_s: usize,
    n_0: usize,
    dim: usize,
    directions: Vec<Vec<f64>>,
    points: Vec<Vec<f64>>,
}

impl BallGrid {
    pub fn new(n_r: usize, n_s: usize, n_0: usize, d: usize, seed: u64) -> Result<Self> {
        if n_r == 0 || n_s == 0 {
            return Err(Error::invalid("ball grid needs n_R >= 1 and n_S >= 1"));
        }
        if n_0 >= n_r.min(n_s) {
            return Err(Error::invalid(format!(
                "n_0 = {n_0} must be smaller than min(n_R, n_S) = {}",
                n_r.min(n_s)
            )));
        }
        let directions = direction_set(n_s, d, seed)?;
        let mut points = Vec::with_capacity(n_r * n_s + n_0);
        for r in 1..=n_r {
            let radius = r as f64 / (n_r as f64 + 1.0);
            for s in &directions {
                points.push(s.iter().map(|c| radius * c).collect());
            }
        }
        points.extend(std::iter::repeat_n(vec![0.0; d], n_0));
        Ok(Self {
            n_r,
            n_s,
            n_0,
            dim: d,
            directions,
            points,
        })
    }

    /// Grid for a sample of size n, factorized by [`factorize_n`].
    pub fn for_sample_size(n: usize, d: usize, seed: u64) -> Result<Self> {
        let (n_r, n_s, n_0) = factorize_n(n)?;
        Self::new(n_r, n_s, n_0, d, seed)
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

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    /// Rank level of a label (0 for origin copies).
    pub fn rank_of(&self, label: usize) -> usize {
        if label >= self.n_r * self.n_s {
            0
        } else {
            label / self.n_s + 1
        }
    }

    /// Sign of a label (zero vector for origin copies).
    pub fn sign_of(&self, label: usize) -> Vec<f64> {
        if label >= self.n_r * self.n_s {
            vec![0.0; self.dim]
        } else {
            self.directions[label % self.n_s].clone()
        }
    }

    /// The record an observation receives when mapped to `label`.
    pub fn record(&self, label: usize) -> CenterOutwardRecord {
        CenterOutwardRecord {
            label,
            rank: self.rank_of(label),
            sign: self.sign_of(label),
            image: self.points[label].clone(),
        }
    }

    /// Scored embedding of every grid label, in label order.
    pub fn scored_points(&self, spec: &ScoreSpec) -> Result<Vec<Vec<f64>>> {
        (0..self.len())
            .map(|label| apply_score(&self.record(label), spec, self.n_r))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CenterOutwardRecord {
    /// Grid label of the image.
    pub label: usize,
    /// 1..=n_R, or 0 for origin copies.
    pub rank: usize,
    pub sign: Vec<f64>,
    pub image: Vec<f64>,
}

/// Empirical center-outward distribution function evaluated at the sample.
pub fn center_outward<P: AsRef<[f64]>>(
    sample: &[P],
    grid: &BallGrid,
) -> Result<(Vec<CenterOutwardRecord>, TransportMap)> {
    if sample.len() != grid.len() {
        return Err(Error::invalid(format!(
            "sample size {} differs from grid size {}",
            sample.len(),
            grid.len()
        )));
    }
    let cost = cost_matrix(sample, grid.points(), CostKind::EuclideanSqHalf)?;
    let map = solve_assignment(&cost)?;
    let records = map.perm.iter().map(|&label| grid.record(label)).collect();
    Ok((records, map))
}

/// Transport of the sample to n i.i.d. spherical-uniform points
/// (uniform radius times uniform direction); returns the image of each
/// observation together with the generated grid.
pub fn random_ball_transport<P: AsRef<[f64]>>(
    sample: &[P],
    seed: u64,
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let n = sample.len();
    if n == 0 {
        return Err(Error::invalid("empty sample"));
    }
    let d = sample[0].as_ref().len();
    if d == 0 {
        return Err(Error::invalid("zero-dimensional sample"));
    }
    let mut rng = stream(seed, "random-ball-grid", d as u64);
    let grid: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let dir = if d == 1 {
                vec![if rng.random::<bool>() { 1.0 } else { -1.0 }]
            } else {
                uniform_direction(&mut rng, d)
            };
            let radius: f64 = rng.random();
            dir.into_iter().map(|c| radius * c).collect()
        })
        .collect();
    let cost = cost_matrix(sample, &grid, CostKind::EuclideanSqHalf)?;
    let map = solve_assignment(&cost)?;
    let images = map.perm.iter().map(|&j| grid[j].clone()).collect();
    Ok((images, grid))
}

/// Scored embedding of one record; the dimension of the sign sets the
/// chi-square degrees of freedom for van der Waerden scores.
pub fn apply_score(record: &CenterOutwardRecord, spec: &ScoreSpec, n_r: usize) -> Result<Vec<f64>> {
    score_rank_sign(record.rank, &record.sign, spec, n_r, record.sign.len())
}
