mod common;

use common::*;
use otdcov::*;
use otdcov::directional::*;
use otdcov::geometry::rotation_to;
use otdcov::scores::chi2_quantile;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn u(v: &[f64]) -> UnitDirection {
    UnitDirection::new(v.to_vec()).unwrap()
}

fn random_rotation(rng: &mut ChaCha8Rng, d: usize) -> Rotation {
    let mut r = Rotation::identity(d);
    for _ in 0..3 {
        let a = UnitDirection::new(uniform_direction(rng, d)).unwrap();
        let b = UnitDirection::new(uniform_direction(rng, d)).unwrap();
        r = rotation_to(&a, &b).unwrap().compose(&r);
    }
    r
}

fn concentrated(seed: u64, n: usize, d: usize) -> Vec<UnitDirection> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut v = uniform_direction(&mut rng, d);
            v[d - 1] += 1.5;
            UnitDirection::new(v).unwrap()
        })
        .collect()
}

#[test]
fn step1_properties() {
    let sample = concentrated(1, 25, 3);
    let a = step1_transport(&sample, 9).unwrap();
    let b = step1_transport(&sample, 9).unwrap();
    assert_eq!(a, b);
    let mut used = vec![false; 25];
    for &j in &a.map.perm {
        assert!(!used[j]);
        used[j] = true;
    }
    assert!(a.images.iter().all(|img| a.grid.contains(img)));
    let identity: f64 = sample
        .iter()
        .zip(&a.grid)
        .map(|(z, g)| crate::geometry::transport_cost(z, g).unwrap())
        .sum();
    assert!(a.map.total_cost <= identity + 1e-12);
    assert_eq!(a.pole, a.images[a.anchor]);
    assert!(step1_transport(&sample[..1], 0).is_err());
}

#[test]
fn latitude_longitude_examples() {
    let pole = u(&[0.0, 0.0, 1.0]);
    let (lat, lon) = latitude_longitude(&pole, &pole).unwrap();
    assert_eq!(lat, 0.0);
    assert!(lon.is_none());
    let e1 = u(&[1.0, 0.0, 0.0]);
    let (lat, lon) = latitude_longitude(&e1, &pole).unwrap();
    assert_eq!(lat, 1.0);
    assert_eq!(lon.unwrap(), vec![1.0, 0.0, 0.0]);
    let (lat, lon) = latitude_longitude(&pole.antipode(), &pole).unwrap();
    assert_eq!(lat, 2.0);
    assert!(lon.is_none());
}

#[test]
fn grid_construction_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for d in [2usize, 3, 4, 6] {
        let pole = UnitDirection::new(uniform_direction(&mut rng, d)).unwrap();
        let g = SphereGrid::for_sample_size(&pole, 27, 5).unwrap();
        assert_eq!(g.len(), 27);
        for (label, p) in g.points().iter().enumerate() {
            assert!((norm(p.as_slice()) - 1.0).abs() < 1e-14);
            let r = g.rank_of(label);
            if r > 0 {
                assert!((p.dot(&pole) - g.parallel_latitudes()[r - 1]).abs() < 1e-12);
            }
        }
        let lons = g.meridian_longitudes();
        for (i, a) in lons.iter().enumerate() {
            assert!(dot(a, pole.as_slice()).abs() < 1e-12);
            assert!((norm(a) - 1.0).abs() < 1e-12);
            for b in &lons[..i] {
                assert!(euclidean_distance(a, b) > 1e-6);
            }
        }
        // latitudes decrease outwards
        assert!(g.parallel_latitudes().windows(2).all(|w| w[0] > w[1]));
    }
    let pole = u(&[0.0, 1.0]);
    assert!(build_sphere_grid(&pole, 3, 3, 0, 0).is_err());
    assert!(build_sphere_grid(&u(&[0.0, 0.0, 1.0]), 2, 2, 2, 0).is_err());
}

#[test]
fn grid_at_south_pole() {
    let south = u(&[0.0, 0.0, -1.0]);
    let g = build_sphere_grid(&south, 3, 4, 1, 0).unwrap();
    for p in &g.points()[..12] {
        assert!(p.dot(&south) < 1.0);
    }
    assert_eq!(g.points()[12], south);
}

#[test]
fn cap_mass_of_first_parallel_by_monte_carlo() {
    let pole = u(&[0.0, 0.0, 1.0]);
    let g = build_sphere_grid(&pole, 2, 3, 0, 0).unwrap();
    let u1 = g.parallel_latitudes()[0];
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let draws = 1_000_000;
    let mut inside = 0usize;
    for _ in 0..draws {
        let v = uniform_direction(&mut rng, 3);
        if v[2] >= u1 {
            inside += 1;
        }
    }
    let mass = inside as f64 / draws as f64;
    assert!((mass - 1.0 / 3.0).abs() < 0.005, "mass = {mass}");
}

#[test]
fn step2_identity_and_rank_counts() {
    let pole = u(&[0.3, -0.2, 0.9]);
    let g = SphereGrid::for_sample_size(&pole, 20, 0).unwrap();
    let (records, map) = step2_transport(g.points(), &g).unwrap();
    assert_eq!(map.perm, (0..20).collect::<Vec<_>>());
    assert!(map.total_cost.abs() < 1e-20);

    let sample = concentrated(4, 20, 3);
    let (records2, _) = step2_transport(&sample, &g).unwrap();
    for recs in [&records, &records2] {
        let mut counts = vec![0usize; g.n_r() + 1];
        for r in recs.iter() {
            counts[r.rank] += 1;
            if r.rank > 0 {
                let (lat, lon) = latitude_longitude(&r.image, &pole).unwrap();
                assert!((lat - r.latitude).abs() < 1e-12);
                let lon = lon.unwrap();
                for (a, b) in lon.iter().zip(&r.sign) {
                    assert!((a - b).abs() < 1e-10);
                }
            }
        }
        assert_eq!(counts[0], g.n_0());
        assert!(counts[1..].iter().all(|&c| c == g.n_s()));
    }
}

#[test]
fn step2_joint_rotation_equivariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for d in [3usize, 4] {
        let sample = concentrated(d as u64, 30, d);
        let pole = frechet_mean(&sample, None).unwrap().mean;
        let g = SphereGrid::for_sample_size(&pole, 30, 1).unwrap();
        let (base, _) = step2_transport(&sample, &g).unwrap();
        let r = random_rotation(&mut rng, d);
        let rotated: Vec<UnitDirection> = sample.iter().map(|z| r.apply_unit(z)).collect();
        let rg = g.rotated(&r).unwrap();
        let (moved, _) = step2_transport(&rotated, &rg).unwrap();
        for (a, b) in base.iter().zip(&moved) {
            assert_eq!(a.rank, b.rank);
            let ra = r.apply(&a.sign);
            for (x, y) in ra.iter().zip(&b.sign) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn tangent_embed_examples() {
    let pole = u(&[0.0, 0.0, 1.0]);
    let g = SphereGrid::for_sample_size(&pole, 16, 0).unwrap();
    let pts = g.tangent_points(RadialScore::Wilcoxon).unwrap();
    for (label, p) in pts.iter().enumerate() {
        assert!(norm(p) < 1.0);
        assert!(dot(p, pole.as_slice()).abs() < 1e-12);
        if g.rank_of(label) == 0 {
            assert!(p.iter().all(|v| *v == 0.0));
        }
    }
    let v = g.tangent_points(RadialScore::VanDerWaerden).unwrap();
    for (label, p) in v.iter().enumerate() {
        let r = g.rank_of(label);
        let uu = r as f64 / (g.n_r() as f64 + 1.0);
        let closed = (-2.0 * (1.0 - uu).ln()).sqrt();
        assert!((norm(p) - closed).abs() < 1e-10);
        assert!((closed - chi2_quantile(uu, 2).unwrap().sqrt()).abs() < 1e-10);
    }
    let s = g.tangent_points(RadialScore::Sign).unwrap();
    assert!(s.iter().enumerate().all(|(l, p)| g.rank_of(l) == 0 || (norm(p) - 1.0).abs() < 1e-12));
}

#[test]
fn chart_examples_and_round_trip() {
    let pole = u(&[0.0, 0.0, 1.0]);
    let c = chart_embed(&pole, &pole, Chart::AzimuthalEquidistant).unwrap();
    assert!(c.iter().all(|v| v.abs() < 1e-15));
    assert_eq!(c.len(), 2);
    let e1 = u(&[1.0, 0.0, 0.0]);
    let c = chart_embed(&e1, &pole, Chart::AzimuthalEquidistant).unwrap();
    assert!((norm(&c) - PI / 2.0).abs() < 1e-14);
    let c = chart_embed(&e1, &pole, Chart::AzimuthalEquidistantNormalized).unwrap();
    assert!((norm(&c) - 0.5).abs() < 1e-14);
    assert!(matches!(
        chart_embed(&pole.antipode(), &pole, Chart::AzimuthalEquidistant),
        Err(Error::Domain(_))
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for chart in [Chart::AzimuthalEquidistant, Chart::AzimuthalEquidistantNormalized] {
        for d in [2usize, 3, 5] {
            let pole = UnitDirection::new(uniform_direction(&mut rng, d)).unwrap();
            for _ in 0..100 {
                let z = UnitDirection::new(uniform_direction(&mut rng, d)).unwrap();
                if geodesic_distance(&z, &pole).unwrap() > PI - 1e-6 {
                    continue;
                }
                let c = chart_embed(&z, &pole, chart).unwrap();
                let back = chart_inverse(&c, &pole, chart).unwrap();
                assert!(geodesic_distance(&back, &z).unwrap() < 1e-9);
            }
        }
    }
}

#[test]
fn circle_factorization() {
    assert_eq!(sphere_factorization(9, 2).unwrap(), (4, 2, 1));
    assert_eq!(sphere_factorization(10, 2).unwrap(), (5, 2, 0));
    assert_eq!(sphere_factorization(10, 3).unwrap(), (3, 3, 1));
    assert!(sphere_factorization(3, 2).is_err());
}
