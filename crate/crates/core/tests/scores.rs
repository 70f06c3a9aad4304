use otdcov::*;
use otdcov::scores::*;
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[test]
fn chi2_examples() {
    assert_eq!(chi2_quantile(0.0, 3).unwrap(), 0.0);
    let p = 1.0 - (-1.0f64).exp();
    assert!((chi2_quantile(p, 2).unwrap() - 2.0).abs() < 1e-12);
    for &p in &[0.05, 0.3, 0.9, 0.999] {
        let expected = -2.0 * (1.0 - p as f64).ln();
        assert!((chi2_quantile(p, 2).unwrap() - expected).abs() < 1e-10 * expected.max(1.0));
    }
    assert!(chi2_quantile(1.0, 2).is_err());
    assert!(chi2_quantile(0.5, 0).is_err());
}

#[test]
fn chi2_cdf_agrees_with_statrs() {
    for dof in 1..=10 {
        let dist = ChiSquared::new(dof as f64).unwrap();
        for i in 1..60 {
            let x = i as f64 * 0.4;
            assert!((chi2_cdf(x, dof) - dist.cdf(x)).abs() < 1e-12, "dof={dof} x={x}");
        }
    }
}

#[test]
fn biloop_examples() {
    assert_eq!(biloop_curve(0.0, 1.0), (0.0, 0.0));
    let v = 0.25f64.atanh();
    let (a, b) = biloop_curve(v, 1.0);
    assert!((a - 1.0).abs() < 1e-15);
    assert!((b - 1.0).abs() < 1e-15);
    let (a, b) = biloop_curve(100.0, 1.0);
    assert!(a.hypot(b) < 1e-3);
}

#[test]
fn score_examples() {
    let sign = [0.6, 0.8];
    let zero = [0.0, 0.0];
    let w = ScoreSpec::plain(RadialScore::Wilcoxon);
    assert_eq!(score_rank_sign(0, &zero, &w, 4, 2).unwrap(), vec![0.0, 0.0]);
    let s = score_rank_sign(2, &sign, &w, 4, 2).unwrap();
    assert!((s[0] - 0.24).abs() < 1e-15 && (s[1] - 0.32).abs() < 1e-15);

    let sg = ScoreSpec::plain(RadialScore::Sign);
    assert_eq!(score_rank_sign(3, &sign, &sg, 4, 2).unwrap(), sign.to_vec());
    assert_eq!(score_rank_sign(0, &zero, &sg, 4, 2).unwrap(), vec![0.0, 0.0]);

    let vdw = ScoreSpec::plain(RadialScore::VanDerWaerden);
    let s = score_rank_sign(1, &sign, &vdw, 4, 2).unwrap();
    let radial = (-2.0 * (1.0f64 - 0.2).ln()).sqrt();
    assert!((s[0] - 0.6 * radial).abs() < 1e-10);

    let b = ScoreSpec::biloop(RadialScore::Wilcoxon, 1.0).unwrap();
    let s = score_rank_sign(2, &sign, &b, 4, 2).unwrap();
    assert_eq!(s.len(), 4);
    let (p1, p2) = biloop_curve(0.4, 1.0);
    assert!((s[0] - p1 * 0.6).abs() < 1e-15 && (s[3] - p2 * 0.8).abs() < 1e-15);

    assert!(score_rank_sign(5, &sign, &w, 4, 2).is_err());
    assert!(ScoreSpec::biloop(RadialScore::Sign, 0.0).is_err());
}

#[test]
fn parse_and_display() {
    assert_eq!(ScoreSpec::parse("wilcoxon", 1.0).unwrap(), ScoreSpec::plain(RadialScore::Wilcoxon));
    assert_eq!(ScoreSpec::parse("vdw", 1.0).unwrap(), ScoreSpec::plain(RadialScore::VanDerWaerden));
    assert_eq!(
        ScoreSpec::parse("biloop-sign", 2.0).unwrap(),
        ScoreSpec::Biloop { base: RadialScore::Sign, c: 2.0 }
    );
    assert!(ScoreSpec::parse("spatial", 1.0).is_err());
    assert_eq!(ScoreSpec::plain(RadialScore::Sign).to_string(), "sign");
}

proptest! {
    #[test]
    fn chi2_round_trip(p in 0.0f64..0.9999, dof in 1usize..=10) {
        let q = chi2_quantile(p, dof).unwrap();
        prop_assert!((chi2_cdf(q, dof) - p).abs() < 1e-9);
    }

    #[test]
    fn biloop_bounded(v in 0.0f64..1e3, c in 0.1f64..5.0) {
        let (a, b) = biloop_curve(v, c);
        prop_assert!(a.hypot(b) <= (4.0 * c * c + 1.0).sqrt() + 1e-12);
    }
}
