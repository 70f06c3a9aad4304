mod common;

use common::*;
use otdcov::*;
use rand_distr::StandardNormal;
use otdcov::scores::{chi2_quantile, RadialScore};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gaussian_sample(seed: u64, n: usize, d: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..d).map(|_| rng.sample::<f64, _>(StandardNormal) * 2.0 + 1.0).collect())
        .collect()
}

#[test]
fn factorize_examples() {
    assert_eq!(factorize_n(100).unwrap(), (10, 10, 0));
    assert_eq!(factorize_n(10).unwrap(), (3, 3, 1));
    assert_eq!(factorize_n(6).unwrap(), (2, 3, 0));
    assert!(factorize_n(3).is_err());
}

#[test]
fn factorize_constraint_exhaustive() {
    for n in 4..=10_000 {
        let (r, s, z) = factorize_n(n).unwrap();
        assert_eq!(r * s + z, n);
        assert!(z < r.min(s), "n = {n}");
    }
}

#[test]
fn direction_examples() {
    let dirs = direction_set(4, 2, 0).unwrap();
    let expected = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
    for (d, (x, y)) in dirs.iter().zip(expected) {
        assert!((d[0] - x).abs() < 1e-15 && (d[1] - y).abs() < 1e-15);
    }
    assert_eq!(direction_set(3, 1, 0).unwrap(), vec![vec![1.0], vec![-1.0], vec![1.0]]);
    assert_eq!(direction_set(7, 3, 42).unwrap(), direction_set(7, 3, 42).unwrap());
    assert_ne!(direction_set(7, 3, 42).unwrap(), direction_set(7, 3, 43).unwrap());
}

#[test]
fn direction_mean_vanishes() {
    let dirs = direction_set(10_000, 3, 5).unwrap();
    let mut mean = [0.0; 3];
    for d in &dirs {
        assert!((norm(d) - 1.0).abs() < 1e-12);
        for k in 0..3 {
            mean[k] += d[k] / 10_000.0;
        }
    }
    assert!(norm(&mean) < 0.05);
}

#[test]
fn grid_structure() {
    let g = BallGrid::for_sample_size(10, 2, 0).unwrap();
    assert_eq!((g.n_r(), g.n_s(), g.n_0()), (3, 3, 1));
    let mut radii: Vec<f64> = g.points().iter().map(|p| norm(p)).collect();
    radii.sort_by(f64::total_cmp);
    assert_eq!(radii[0], 0.0);
    for (k, r) in radii[1..].iter().enumerate() {
        let expected = (k / 3 + 1) as f64 / 4.0;
        assert!((r - expected).abs() < 1e-15);
    }
    assert!(BallGrid::new(2, 2, 2, 2, 0).is_err());
}

#[test]
fn identity_when_sample_is_the_grid() {
    let g = BallGrid::for_sample_size(12, 2, 0).unwrap();
    let (records, map) = center_outward(g.points(), &g).unwrap();
    assert_eq!(map.perm, (0..12).collect::<Vec<_>>());
    assert_eq!(map.total_cost, 0.0);
    for (i, r) in records.iter().enumerate() {
        assert_eq!(r.label, i);
    }
}

#[test]
fn one_dimensional_transport_is_monotone() {
    // grid {-2/3, -1/3, 1/3, 2/3}; sorted data receive sorted grid points
    let g = BallGrid::new(2, 2, 0, 1, 0).unwrap();
    let sample = vec![vec![3.1], vec![-0.4], vec![10.0], vec![0.2]];
    let (records, _) = center_outward(&sample, &g).unwrap();
    let images: Vec<f64> = records.iter().map(|r| r.image[0]).collect();
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| sample[a][0].total_cmp(&sample[b][0]));
    let sorted_images: Vec<f64> = order.iter().map(|&i| images[i]).collect();
    let expected = [-2.0 / 3.0, -1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0];
    for (a, b) in sorted_images.iter().zip(expected) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn one_dimensional_ranks_match_sorting_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for n in [9usize, 10, 21, 40] {
        let n_r = n / 2;
        let n_0 = n % 2;
        let g = BallGrid::new(n_r, 2, n_0, 1, 0).unwrap();
        let sample: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.sample::<f64, _>(StandardNormal)]).collect();
        let (records, _) = center_outward(&sample, &g).unwrap();

        // classical center-outward ranks: order by |2 F_hat - 1|
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| sample[a][0].total_cmp(&sample[b][0]));
        let mut oracle = vec![0usize; n];
        for (pos, &i) in order.iter().enumerate() {
            let below = pos;
            let above = n - 1 - pos;
            // grid levels counted outwards from the middle order statistic
            let level = if n % 2 == 1 {
                below.abs_diff(above) / 2
            } else {
                (below.abs_diff(above) + 1) / 2
            };
            oracle[i] = level;
        }
        for (r, o) in records.iter().zip(&oracle) {
            assert_eq!(r.rank, *o, "n = {n}");
        }
    }
}

#[test]
fn rank_multiset_and_signs() {
    for seed in 0..10 {
        let sample = gaussian_sample(seed, 23, 3);
        let g = BallGrid::for_sample_size(23, 3, seed).unwrap();
        let (records, map) = center_outward(&sample, &g).unwrap();
        let mut counts = vec![0usize; g.n_r() + 1];
        for r in &records {
            counts[r.rank] += 1;
            if r.rank > 0 {
                let expected_rank = ((g.n_r() + 1) as f64 * norm(&r.image)).round() as usize;
                assert_eq!(expected_rank, r.rank);
                let len = norm(&r.image);
                for (s, x) in r.sign.iter().zip(&r.image) {
                    assert!((s - x / len).abs() < 1e-12);
                }
            }
        }
        assert_eq!(counts[0], g.n_0());
        assert!(counts[1..].iter().all(|&c| c == g.n_s()));
        let recomputed: f64 = map
            .perm
            .iter()
            .enumerate()
            .map(|(i, &j)| 0.5 * sample[i].iter().zip(&g.points()[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>())
            .sum();
        assert!((recomputed - map.total_cost).abs() < 1e-9);
    }
}

#[test]
fn joint_translation_leaves_records_unchanged() {
    let sample = gaussian_sample(4, 16, 2);
    let g = BallGrid::for_sample_size(16, 2, 0).unwrap();
    let (records, _) = center_outward(&sample, &g).unwrap();
    let shift = [3.0, -7.5];
    let moved: Vec<Vec<f64>> = sample.iter().map(|p| vec![p[0] + shift[0], p[1] + shift[1]]).collect();
    let moved_grid: Vec<Vec<f64>> = g.points().iter().map(|p| vec![p[0] + shift[0], p[1] + shift[1]]).collect();
    let cost = cost_matrix(&moved, &moved_grid, CostKind::EuclideanSqHalf).unwrap();
    let map = solve_assignment(&cost).unwrap();
    for (r, &label) in records.iter().zip(&map.perm) {
        assert_eq!(r.label, label);
    }
}

#[test]
fn random_ball_transport_properties() {
    let sample = gaussian_sample(8, 15, 2);
    let (images, grid) = random_ball_transport(&sample, 3).unwrap();
    let (images2, _) = random_ball_transport(&sample, 3).unwrap();
    assert_eq!(images, images2);
    let mut a = images.clone();
    let mut b = grid.clone();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    assert_eq!(a, b);
    assert!(grid.iter().all(|p| norm(p) < 1.0));

    let (one, g1) = random_ball_transport(&[vec![5.0, 5.0]], 1).unwrap();
    assert_eq!(one, g1);
}

#[test]
fn score_norms() {
    let g = BallGrid::for_sample_size(30, 3, 1).unwrap();
    let w = g.scored_points(&ScoreSpec::plain(RadialScore::Wilcoxon)).unwrap();
    assert!(w.iter().all(|p| norm(p) < 1.0));
    let v = g.scored_points(&ScoreSpec::plain(RadialScore::VanDerWaerden)).unwrap();
    for (label, p) in v.iter().enumerate() {
        let r = g.rank_of(label);
        let expected = chi2_quantile(r as f64 / (g.n_r() + 1) as f64, 3).unwrap().sqrt();
        assert!((norm(p) - expected).abs() < 1e-12);
    }
    let c = 1.5;
    let b = g.scored_points(&ScoreSpec::biloop(RadialScore::VanDerWaerden, c).unwrap()).unwrap();
    assert!(b.iter().all(|p| p.len() == 6 && norm(p) <= (4.0 * c * c + 1.0).sqrt() + 1e-12));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rank_multiset_any_sample(seed in any::<u64>(), n in 4usize..40, d in 1usize..4) {
        let sample = gaussian_sample(seed, n, d);
        let g = BallGrid::for_sample_size(n, d, seed).unwrap();
        let (records, _) = center_outward(&sample, &g).unwrap();
        let mut counts = vec![0usize; g.n_r() + 1];
        for r in &records {
            counts[r.rank] += 1;
        }
        prop_assert_eq!(counts[0], g.n_0());
        prop_assert!(counts[1..].iter().all(|&c| c == g.n_s()));
    }
}
