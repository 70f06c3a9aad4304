//! Kolmogorov–Smirnov goodness-of-fit tests with asymptotic p-values.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Kolmogorov survival function Q(t) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 t^2).
pub fn kolmogorov_q(t: f64) -> f64 {
    if t < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = (-2.0 * jf * jf * t * t).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn p_from(d: f64, en: f64) -> f64 {
    kolmogorov_q((en + 0.12 + 0.11 / en) * d)
}

fn sorted(sample: &[f64]) -> Result<Vec<f64>> {
    if sample.is_empty() {
        return Err(Error::invalid("KS test of an empty sample"));
    }
    if sample.iter().any(|v| v.is_nan()) {
        return Err(Error::invalid("KS test sample contains NaN"));
    }
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

/// One-sample test of `sample` against the continuous distribution `cdf`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<KsResult> {
    let s = sorted(sample)?;
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in s.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    Ok(KsResult {
        statistic: d,
        p_value: p_from(d, n.sqrt()),
    })
}

/// Two-sample test; ties across samples are handled by stepping both
/// empirical distribution functions past each distinct value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    let a = sorted(a)?;
    let b = sorted(b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(KsResult {
        statistic: d,
        p_value: p_from(d, (na * nb / (na + nb)).sqrt()),
    })
}
