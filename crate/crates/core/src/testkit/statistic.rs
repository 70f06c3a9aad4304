//! The rank-based distance covariance statistics.
//!
//! Every observation is mapped to a grid label on each margin, and every
//! label has a fixed scored embedding. The statistic is therefore
//! n dCov^2 between the label embeddings, with the Y labels relabeled by the
//! pairing sigma(a) = label_y(observation with label_x = a). The null draws
//! use the same formula with a uniform random sigma, so a dataset and a null
//! draw that realize the same pairing give bit-identical values.

use crate::center_outward::{center_outward, BallGrid};
use crate::dcov::{double_center, dcov_sq, dcov_sq_relabeled, pairwise_distances, DoubleCenteredMatrix, Metric};
use crate::directional::{
    build_sphere_grid, chart_embed, sphere_factorization, step1_transport_with_grid,
    step2_transport, uniform_sphere_points, SphereGrid,
};
use crate::error::{Error, Result};
use crate::geometry::{geodesic_distance, pole_frame, Rotation, UnitDirection, ANTIPODAL_THRESHOLD};
use crate::rng::derive_seed;
use crate::scores::{RadialScore, ScoreSpec};

use super::config::{Space, TestConfig, Variant};

/// Double-centered distance matrices of the two label embeddings.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredGrids {
    pub a: DoubleCenteredMatrix,
    pub b: DoubleCenteredMatrix,
}

impl ScoredGrids {
    pub fn from_embeddings(x: &[Vec<f64>], y: &[Vec<f64>]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::invalid("label embeddings differ in size"));
        }
        Ok(ScoredGrids {
            a: double_center(&pairwise_distances(x, Metric::Euclidean)?)?,
            b: double_center(&pairwise_distances(y, Metric::Euclidean)?)?,
        })
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    /// n dCov^2 for the pairing `sigma` of X labels to Y labels.
    pub fn statistic(&self, sigma: &[usize]) -> Result<f64> {
        Ok(self.n() as f64 * dcov_sq_relabeled(&self.a, &self.b, sigma)?)
    }

    /// True when one margin has zero distance variance, which makes the
    /// statistic identically zero.
    pub fn degenerate(&self) -> Result<bool> {
        Ok(dcov_sq(&self.a, &self.a)? == 0.0 || dcov_sq(&self.b, &self.b)? == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statistic {
    /// n dCov^2 of the scored margins.
    pub value: f64,
    pub labels_x: Vec<usize>,
    pub labels_y: Vec<usize>,
    /// sigma(a) = label_y of the observation whose X label is a.
    pub pairing: Vec<usize>,
    /// Scored embedding of each observation, in sample order.
    pub embedding_x: Vec<Vec<f64>>,
    pub embedding_y: Vec<Vec<f64>>,
    /// Estimated poles (sphere only).
    pub poles: Option<(UnitDirection, UnitDirection)>,
    pub flags: Vec<String>,
    pub grids: ScoredGrids,
}

pub(crate) fn pairing(labels_x: &[usize], labels_y: &[usize]) -> Vec<usize> {
    let mut sigma = vec![0; labels_x.len()];
    for (&lx, &ly) in labels_x.iter().zip(labels_y) {
        sigma[lx] = ly;
    }
    sigma
}

/// Reassigns labels within each class of identical grid points so that the
/// observations of a class take its labels in increasing order. Which of
/// several coincident points an observation is paired with is a tie of the
/// assignment; after this step the labels depend only on the ranks and signs.
pub(crate) fn canonical_labels<P: AsRef<[f64]>>(labels: &[usize], points: &[P]) -> Vec<usize> {
    let mut classes: std::collections::BTreeMap<Vec<u64>, Vec<usize>> = Default::default();
    for (label, p) in points.iter().enumerate() {
        let key = p.as_ref().iter().map(|v| (v + 0.0).to_bits()).collect();
        classes.entry(key).or_default().push(label);
    }
    let mut out = labels.to_vec();
    for members in classes.values().filter(|m| m.len() > 1) {
        let mut slots = members.iter();
        for (obs, label) in labels.iter().enumerate() {
            if members.binary_search(label).is_ok() {
                out[obs] = *slots.next().expect("class sizes match");
            }
        }
    }
    out
}

fn grid_seed(cfg: &TestConfig, side: &str) -> u64 {
    derive_seed(cfg.seed, &format!("grid-{side}"), 0)
}

fn check_pair_sizes(nx: usize, ny: usize) -> Result<usize> {
    if nx != ny {
        return Err(Error::invalid(format!("samples differ in size: {nx} vs {ny}")));
    }
    if nx < 4 {
        return Err(Error::invalid(format!("the test needs n >= 4, got {nx}")));
    }
    Ok(nx)
}

fn sample_dim<P: AsRef<[f64]>>(sample: &[P], side: &str) -> Result<usize> {
    let d = sample[0].as_ref().len();
    if d == 0 {
        return Err(Error::invalid(format!("{side} sample has no coordinates")));
    }
    if let Some(i) = sample.iter().position(|p| p.as_ref().len() != d) {
        return Err(Error::invalid(format!("{side} observation {i} has the wrong dimension")));
    }
    Ok(d)
}

fn sign_flag(spec: &ScoreSpec, n_0: usize, side: &str) -> Option<String> {
    (spec.base() == RadialScore::Sign && n_0 > 0).then(|| {
        format!("sign scores send the {n_0} center copies of the {side} grid to the zero vector")
    })
}

fn degenerate_flag(grids: &ScoredGrids, flags: &mut Vec<String>) -> Result<()> {
    if grids.degenerate()? {
        flags.push("a scored margin has zero distance variance; the statistic is identically 0".into());
    }
    Ok(())
}

fn assemble(
    grids: ScoredGrids,
    label_embeddings: (Vec<Vec<f64>>, Vec<Vec<f64>>),
    labels_x: Vec<usize>,
    labels_y: Vec<usize>,
    poles: Option<(UnitDirection, UnitDirection)>,
    mut flags: Vec<String>,
) -> Result<Statistic> {
    let sigma = pairing(&labels_x, &labels_y);
    let value = grids.statistic(&sigma)?;
    degenerate_flag(&grids, &mut flags)?;
    let embedding_x = labels_x.iter().map(|&l| label_embeddings.0[l].clone()).collect();
    let embedding_y = labels_y.iter().map(|&l| label_embeddings.1[l].clone()).collect();
    Ok(Statistic {
        value,
        labels_x,
        labels_y,
        pairing: sigma,
        embedding_x,
        embedding_y,
        poles,
        flags,
        grids,
    })
}

/// The grid-label embeddings for Euclidean data.
pub fn euclidean_label_embeddings(
    cfg: &TestConfig,
    n: usize,
    d1: usize,
    d2: usize,
) -> Result<(BallGrid, BallGrid, Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let gx = BallGrid::for_sample_size(n, d1, grid_seed(cfg, "x"))?;
    let gy = BallGrid::for_sample_size(n, d2, grid_seed(cfg, "y"))?;
    let ex = gx.scored_points(&cfg.scores_x)?;
    let ey = gy.scored_points(&cfg.scores_y)?;
    Ok((gx, gy, ex, ey))
}

/// Scored center-outward ranks and signs of both margins, then n dCov^2.
pub fn rank_dcov_euclidean<P, Q>(x: &[P], y: &[Q], cfg: &TestConfig) -> Result<Statistic>
where
    P: AsRef<[f64]>,
    Q: AsRef<[f64]>,
{
    if cfg.space != Space::Euclidean {
        return Err(Error::invalid("rank_dcov_euclidean needs a Euclidean configuration"));
    }
    cfg.validate()?;
    let n = check_pair_sizes(x.len(), y.len())?;
    let d1 = sample_dim(x, "x")?;
    let d2 = sample_dim(y, "y")?;
    let (gx, gy, ex, ey) = euclidean_label_embeddings(cfg, n, d1, d2)?;
    let (_, mx) = center_outward(x, &gx)?;
    let (_, my) = center_outward(y, &gy)?;
    let labels_x = canonical_labels(&mx.perm, gx.points());
    let labels_y = canonical_labels(&my.perm, gy.points());
    let mut flags = Vec::new();
    flags.extend(sign_flag(&cfg.scores_x, gx.n_0(), "x"));
    flags.extend(sign_flag(&cfg.scores_y, gy.n_0(), "y"));
    let grids = ScoredGrids::from_embeddings(&ex, &ey)?;
    assemble(grids, (ex, ey), labels_x, labels_y, None, flags)
}

/// The random ingredients of one spherical margin: the uniform Step-1 grid
/// and the orientation of the Step-2 meridians.
///
/// The Step-2 grid around a pole p is the canonical grid (pole e_d) moved by
/// `orientation * F(orientation^T p)`, F = [`pole_frame`]. Rotating the
/// sample, the Step-1 grid and the orientation by the same R rotates every
/// grid by R, which leaves the labels and the statistic unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereMargin {
    pub step1_grid: Vec<UnitDirection>,
    pub orientation: Rotation,
}

impl SphereMargin {
    pub fn seeded(cfg: &TestConfig, side: &str, n: usize, d: usize) -> Result<Self> {
        Ok(SphereMargin {
            step1_grid: uniform_sphere_points(n, d, cfg.seed, &format!("step1-{side}"))?,
            orientation: Rotation::identity(d),
        })
    }

    pub fn rotated(&self, r: &Rotation) -> Self {
        SphereMargin {
            step1_grid: self.step1_grid.iter().map(|g| r.apply_unit(g)).collect(),
            orientation: r.compose(&self.orientation),
        }
    }

    fn frame_for(&self, pole: &UnitDirection) -> Result<Rotation> {
        let local = self.orientation.transpose().apply_unit(pole);
        Ok(self.orientation.compose(&pole_frame(&local)?))
    }
}

/// The canonical Step-2 grid (pole e_d) for samples of size n on S^{d-1}.
pub fn canonical_sphere_grid(cfg: &TestConfig, side: &str, n: usize, d: usize) -> Result<SphereGrid> {
    let (n_r, n_s, n_0) = sphere_factorization(n, d)?;
    build_sphere_grid(&UnitDirection::north_pole(d)?, n_r, n_s, n_0, grid_seed(cfg, side))
}

struct MarginOutcome {
    labels: Vec<usize>,
    label_embedding: Vec<Vec<f64>>,
    pole: UnitDirection,
    flags: Vec<String>,
}

fn sphere_margin(
    sample: &[UnitDirection],
    margin: &SphereMargin,
    cfg: &TestConfig,
    spec: &ScoreSpec,
    side: &'static str,
) -> Result<MarginOutcome> {
    let n = sample.len();
    let d = sample[0].dim();
    if d < 2 {
        return Err(Error::invalid(format!("{side} sample must lie on S^(d-1) with d >= 2")));
    }
    if margin.orientation.dim() != d {
        return Err(Error::invalid(format!("{side} orientation has the wrong dimension")));
    }
    let step1 = step1_transport_with_grid(sample, margin.step1_grid.clone())?;
    let pole = step1.pole.clone();
    for (i, z) in sample.iter().enumerate() {
        if geodesic_distance(z, &pole)? >= ANTIPODAL_THRESHOLD {
            return Err(Error::PoleCollision { side, index: i });
        }
    }
    let mut flags = Vec::new();
    if !step1.frechet.converged {
        flags.push(format!(
            "Fréchet mean of the {side} sample did not converge in {} iterations",
            step1.frechet.iterations
        ));
    }
    if step1.frechet.skipped_antipodal > 0 {
        flags.push(format!(
            "{} {side} observations were antipodal to the Fréchet mean",
            step1.frechet.skipped_antipodal
        ));
    }
    let radial = spec.base();
    match cfg.variant {
        Variant::TwoStep => {
            let canonical = canonical_sphere_grid(cfg, side, n, d)?;
            let grid = canonical.rotated(&margin.frame_for(&pole)?)?;
            let (_, map) = step2_transport(sample, &grid)?;
            flags.extend(sign_flag(spec, canonical.n_0(), side));
            Ok(MarginOutcome {
                labels: canonical_labels(&map.perm, canonical.points()),
                label_embedding: canonical.tangent_points(radial)?,
                pole,
                flags,
            })
        }
        Variant::Step1Only => {
            let inverse = step1.map.inverse();
            let label_embedding = step1
                .grid
                .iter()
                .enumerate()
                .map(|(j, g)| match chart_embed(g, &pole, cfg.chart) {
                    Err(Error::Domain(_)) => Err(Error::PoleCollision { side, index: inverse[j] }),
                    other => other,
                })
                .collect::<Result<Vec<_>>>()?;
            if radial != RadialScore::Wilcoxon {
                flags.push(format!(
                    "the step1_only variant uses the chart directly; {side} scores are ignored"
                ));
            }
            Ok(MarginOutcome {
                labels: step1.map.perm,
                label_embedding,
                pole,
                flags,
            })
        }
    }
}

/// Directional distance covariance with seeded grids.
pub fn directional_dcov(x: &[UnitDirection], y: &[UnitDirection], cfg: &TestConfig) -> Result<Statistic> {
    let n = check_pair_sizes(x.len(), y.len())?;
    let mx = SphereMargin::seeded(cfg, "x", n, x[0].dim())?;
    let my = SphereMargin::seeded(cfg, "y", n, y[0].dim())?;
    directional_dcov_with(x, y, cfg, &mx, &my)
}

/// Directional distance covariance with caller-supplied grids.
pub fn directional_dcov_with(
    x: &[UnitDirection],
    y: &[UnitDirection],
    cfg: &TestConfig,
    margin_x: &SphereMargin,
    margin_y: &SphereMargin,
) -> Result<Statistic> {
    if cfg.space != Space::Sphere {
        return Err(Error::invalid("directional_dcov needs a sphere configuration"));
    }
    cfg.validate()?;
    check_pair_sizes(x.len(), y.len())?;
    sample_dim(x, "x")?;
    sample_dim(y, "y")?;
    let ox = sphere_margin(x, margin_x, cfg, &cfg.scores_x, "x")?;
    let oy = sphere_margin(y, margin_y, cfg, &cfg.scores_y, "y")?;
    let grids = ScoredGrids::from_embeddings(&ox.label_embedding, &oy.label_embedding)?;
    let mut flags = ox.flags;
    flags.extend(oy.flags);
    assemble(
        grids,
        (ox.label_embedding, oy.label_embedding),
        ox.labels,
        oy.labels,
        Some((ox.pole, oy.pole)),
        flags,
    )
}

/// The scored label grids that calibrate `cfg` at sample size n, when they
/// do not depend on the data.
pub fn data_free_grids(cfg: &TestConfig, n: usize, d1: usize, d2: usize) -> Result<ScoredGrids> {
    cfg.validate()?;
    if !cfg.null_is_cacheable() {
        return Err(Error::invalid(
            "the step-1 null depends on the estimated pole and has no data-free grid",
        ));
    }
    match cfg.space {
        Space::Euclidean => {
            let (_, _, ex, ey) = euclidean_label_embeddings(cfg, n, d1, d2)?;
            ScoredGrids::from_embeddings(&ex, &ey)
        }
        Space::Sphere => {
            let ex = canonical_sphere_grid(cfg, "x", n, d1)?.tangent_points(cfg.scores_x.base())?;
            let ey = canonical_sphere_grid(cfg, "y", n, d2)?.tangent_points(cfg.scores_y.base())?;
            ScoredGrids::from_embeddings(&ex, &ey)
        }
    }
}
