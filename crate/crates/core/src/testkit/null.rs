//! Exact null laws by grid-label permutation, Monte-Carlo p-values, and the
//! null-table cache.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::stream;

use super::config::TestConfig;
use super::statistic::{data_free_grids, ScoredGrids};

pub const NULL_TABLE_MAGIC: &str = "otdcov-null v1";

/// `draws` statistics under uniformly random pairings, sorted ascending.
/// Draw k uses its own stream `(seed, "null", k)`.
pub fn null_from_grids(grids: &ScoredGrids, draws: usize, seed: u64) -> Result<Vec<f64>> {
    let n = grids.n();
    let mut out: Vec<f64> = (0..draws)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream(seed, "null", k as u64);
            let mut sigma: Vec<usize> = (0..n).collect();
            sigma.shuffle(&mut rng);
            grids.statistic(&sigma)
        })
        .collect::<Result<_>>()?;
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Null law of the statistic configured by `cfg` at sample size n, for
/// configurations whose null does not depend on the data.
pub fn null_distribution(cfg: &TestConfig, n: usize, dims: (usize, usize)) -> Result<Vec<f64>> {
    let grids = data_free_grids(cfg, n, dims.0, dims.1)?;
    null_from_grids(&grids, cfg.n_null_draws, cfg.seed)
}

/// The statistic under every one of the n! pairings, sorted ascending.
pub fn exhaustive_null(grids: &ScoredGrids) -> Result<Vec<f64>> {
    let n = grids.n();
    if n > 9 {
        return Err(Error::invalid(format!("exhaustive enumeration is limited to n <= 9, got {n}")));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out = vec![grids.statistic(&perm)?];
    // Heap's algorithm
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            out.push(grids.statistic(&perm)?);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// (1 + #{draws >= statistic}) / (M + 1) for ascending `sorted_draws`.
pub fn p_value(statistic: f64, sorted_draws: &[f64]) -> Result<f64> {
    if sorted_draws.is_empty() {
        return Err(Error::invalid("p-value from an empty null sample"));
    }
    let below = sorted_draws.partition_point(|&v| v < statistic);
    let at_or_above = sorted_draws.len() - below;
    Ok((1 + at_or_above) as f64 / (sorted_draws.len() + 1) as f64)
}

/// The k-th largest draw, k = floor(alpha (M + 1)); `None` when k = 0.
///
/// With this c, `p_value <= alpha` holds exactly when `statistic > c`.
pub fn critical_value(sorted_draws: &[f64], alpha: f64) -> Result<Option<f64>> {
    if sorted_draws.is_empty() {
        return Err(Error::invalid("critical value from an empty null sample"));
    }
    let m = sorted_draws.len();
    let k = rejection_budget(m, alpha);
    if k == 0 {
        return Ok(None);
    }
    Ok(Some(sorted_draws[m - k.min(m)]))
}

/// floor(alpha (M + 1)): a statistic is rejected when at most k - 1 draws
/// reach it. A relative slack of 1e-12 keeps products such as 0.05 * 1000
/// from flooring to 49.
pub fn rejection_budget(m: usize, alpha: f64) -> usize {
    ((alpha * (m + 1) as f64) * (1.0 + 1e-12)).floor() as usize
}

/// Rejection decision on the count lattice, consistent with
/// [`critical_value`] and with `p_value <= alpha`.
pub fn rejects(statistic: f64, sorted_draws: &[f64], alpha: f64) -> bool {
    let at_or_above = sorted_draws.len() - sorted_draws.partition_point(|&v| v < statistic);
    at_or_above < rejection_budget(sorted_draws.len(), alpha)
}

pub fn write_null_table(path: &Path, fingerprint: &str, sorted_draws: &[f64]) -> Result<()> {
    let mut text = String::with_capacity(26 * (sorted_draws.len() + 1));
    text.push_str(NULL_TABLE_MAGIC);
    text.push(' ');
    text.push_str(fingerprint);
    text.push('\n');
    for v in sorted_draws {
        text.push_str(&format!("{v:.16e}\n"));
    }
    let io = |e: std::io::Error| Error::invalid(format!("cannot write {}: {e}", path.display()));
    let mut file = fs::File::create(path).map_err(io)?;
    file.write_all(text.as_bytes()).map_err(io)?;
    Ok(())
}

/// Reads a null table, returning its fingerprint and draws.
pub fn read_null_table(path: &Path) -> Result<(String, Vec<f64>)> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    let fingerprint = header
        .strip_prefix(NULL_TABLE_MAGIC)
        .and_then(|rest| rest.strip_prefix(' '))
        .ok_or_else(|| Error::invalid(format!("{}: not an {NULL_TABLE_MAGIC} file", path.display())))?
        .to_string();
    let draws = lines
        .enumerate()
        .map(|(i, line)| {
            line.trim().parse::<f64>().map_err(|_| {
                Error::invalid(format!("{}:{}: bad value '{line}'", path.display(), i + 2))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if draws.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid(format!("{}: draws are not sorted", path.display())));
    }
    Ok((fingerprint, draws))
}

/// Null tables keyed by [`TestConfig::null_fingerprint`], held in memory
/// and optionally mirrored to `<dir>/<fingerprint>.null`.
#[derive(Debug, Default)]
pub struct NullCache {
    dir: Option<PathBuf>,
    tables: Mutex<HashMap<String, Arc<Vec<f64>>>>,
}

impl NullCache {
    pub fn in_memory() -> Self {
        NullCache::default()
    }

    pub fn with_dir(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)
            .map_err(|e| Error::invalid(format!("cannot create {}: {e}", dir.display())))?;
        Ok(NullCache {
            dir: Some(dir),
            tables: Mutex::default(),
        })
    }

    pub fn len(&self) -> usize {
        self.tables.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn file_for(&self, fingerprint: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{fingerprint}.null")))
    }

    /// The table for `fingerprint`, computed by `make` on a miss.
    ///
    /// A file whose header names another fingerprint or whose length differs
    /// from `expected_len` is ignored and overwritten.
    pub fn get_or_compute<F>(&self, fingerprint: &str, expected_len: usize, make: F) -> Result<Arc<Vec<f64>>>
    where
        F: FnOnce() -> Result<Vec<f64>>,
    {
        if let Some(hit) = self.tables.lock().expect("cache lock").get(fingerprint) {
            return Ok(Arc::clone(hit));
        }
        let file = self.file_for(fingerprint);
        let from_disk = file
            .as_deref()
            .filter(|p| p.exists())
            .and_then(|p| read_null_table(p).ok())
            .filter(|(fp, draws)| fp == fingerprint && draws.len() == expected_len)
            .map(|(_, draws)| draws);
        let table = match from_disk {
            Some(draws) => draws,
            None => {
                let draws = make()?;
                if let Some(p) = &file {
                    write_null_table(p, fingerprint, &draws)?;
                }
                draws
            }
        };
        let table = Arc::new(table);
        self.tables
            .lock()
            .expect("cache lock")
            .entry(fingerprint.to_string())
            .or_insert_with(|| Arc::clone(&table));
        Ok(table)
    }
}
