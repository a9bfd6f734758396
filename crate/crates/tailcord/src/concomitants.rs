//! Order-statistic machinery: concomitant vectors, split maxima, and the
//! multi-replicate simulation harness.
//!
//! For a bivariate sample, sort by the first coordinate and let each second
//! coordinate travel with its partner. `V1` is the maximum of the
//! concomitants of the top `k` order statistics, `V2` the maximum of the
//! remaining `n - k`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::models::{marginal_transform, ModelSpec, Scale};
use crate::sampler::{sample_model, SeedSpec};

/// The pair of split maxima for one sample and one `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcomitantSplit {
    pub k: usize,
    pub v1: f64,
    pub v2: f64,
    pub n: usize,
}

/// All requested splits of a single replicate, with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateRecord {
    pub replicate_index: usize,
    pub splits: Vec<ConcomitantSplit>,
    pub seed: SeedSpec,
    pub model: ModelSpec,
    pub scale: Scale,
}

impl ReplicateRecord {
    /// Split for a given `k`, if it was requested.
    pub fn split_for(&self, k: usize) -> Option<&ConcomitantSplit> {
        self.splits.iter().find(|s| s.k == k)
    }
}

/// Pairs sorted ascending in x, each y keeping its original partner.
/// Ties in x are broken by original index.
pub fn concomitant_order(xs: &[f64], ys: &[f64]) -> Result<Vec<(f64, f64)>> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.is_empty() {
        return Err(Error::Domain("need at least one pair".into()));
    }
    let mut pairs: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0)); // stable sort keeps index order on ties
    Ok(pairs)
}

/// Split maxima of an ordered concomitant vector: `v1` over the last `k`
/// concomitants, `v2` over the first `n - k`.
pub fn split_maxima(ordered: &[(f64, f64)], k: usize) -> Result<ConcomitantSplit> {
    let n = ordered.len();
    if k < 1 || k > n.saturating_sub(1) {
        return Err(Error::Domain(format!(
            "split size k = {k} must lie in [1, {}]",
            n.saturating_sub(1)
        )));
    }
    let max_y = |s: &[(f64, f64)]| s.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    Ok(ConcomitantSplit {
        k,
        v1: max_y(&ordered[n - k..]),
        v2: max_y(&ordered[..n - k]),
        n,
    })
}

/// Simulates `replicate_count` independent replicates of size `n` and
/// records the split maxima for every `k` in `k_list`.
///
/// Replicate `r` draws from stream `r`, so output is independent of the
/// execution schedule; records are ordered by `replicate_index`. Samples of
/// families 1-2 are converted to the unit Fréchet scale before splitting
/// (family 1 is generated on the Pareto scale). `parallelism_hint = 1`
/// forces sequential execution; any other value defers to the ambient
/// thread pool.
pub fn run_replicates(
    model: &ModelSpec,
    n: usize,
    k_list: &[usize],
    replicate_count: usize,
    master_seed: u64,
    parallelism_hint: usize,
) -> Result<Vec<ReplicateRecord>> {
    model.validate()?;
    if replicate_count == 0 {
        return Err(Error::Domain("replicate count must be >= 1".into()));
    }
    if k_list.is_empty() {
        return Err(Error::Domain("k list must not be empty".into()));
    }
    for &k in k_list {
        if k < 1 || k + 1 > n {
            return Err(Error::Domain(format!(
                "k = {k} invalid for sample size {n}"
            )));
        }
    }

    let one = |r: usize| -> Result<ReplicateRecord> {
        let seed = SeedSpec::new(master_seed, r as u64);
        let batch = sample_model(model, n, &seed)?;
        let (xs, ys, scale) = to_working_scale(model, batch.xs, batch.ys)?;
        let ordered = concomitant_order(&xs, &ys)?;
        let splits = k_list
            .iter()
            .map(|&k| split_maxima(&ordered, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(ReplicateRecord {
            replicate_index: r,
            splits,
            seed,
            model: *model,
            scale,
        })
    };

    if parallelism_hint == 1 {
        (0..replicate_count).map(one).collect()
    } else {
        (0..replicate_count).into_par_iter().map(one).collect()
    }
}

/// Parses two-column numeric text (comma or whitespace separated) into
/// paired samples. A single leading non-numeric line is treated as a
/// header and skipped.
pub fn pairs_from_text(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        let parsed: Option<(f64, f64)> = match fields.as_slice() {
            [a, b] => a.parse().ok().zip(b.parse().ok()),
            _ => None,
        };
        match parsed {
            Some((x, y)) => {
                xs.push(x);
                ys.push(y);
            }
            None if i == 0 => continue, // header
            None => {
                return Err(Error::Domain(format!(
                    "line {}: expected two numeric columns, got {line:?}",
                    i + 1
                )))
            }
        }
    }
    if xs.is_empty() {
        return Err(Error::Domain("no data rows".into()));
    }
    Ok((xs, ys))
}

/// [`pairs_from_text`] applied to a file on disk.
pub fn read_pairs_file(path: &std::path::Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Domain(format!("reading {}: {e}", path.display())))?;
    pairs_from_text(&text)
}

fn to_working_scale(
    model: &ModelSpec,
    xs: Vec<f64>,
    ys: Vec<f64>,
) -> Result<(Vec<f64>, Vec<f64>, Scale)> {
    let from = model.native_scale();
    let to = model.working_scale();
    if from == to {
        return Ok((xs, ys, to));
    }
    let conv = |v: Vec<f64>| -> Result<Vec<f64>> {
        v.into_iter().map(|x| marginal_transform(x, from, to)).collect()
    };
    Ok((conv(xs)?, conv(ys)?, to))
}
