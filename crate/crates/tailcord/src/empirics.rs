//! Empirical distribution machinery and validation reports: bivariate
//! ecdfs, the empirical upper-tail dependence coefficient, and
//! empirical-vs-theoretical error summaries for the replicate harness.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{finite_sample_surface, limit_surface};
use crate::concomitants::ReplicateRecord;
use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::quad::QuadratureConfig;
use crate::sampler::BivariateBatch;

/// Bivariate ecdf of `points` evaluated at `eval_at`:
/// `(1/R) #\{i : v1_i ≤ a, v2_i ≤ b\}` (closed inequalities).
pub fn ecdf_bivariate(points: &[(f64, f64)], eval_at: &[(f64, f64)]) -> Vec<f64> {
    assert!(!points.is_empty(), "ecdf needs at least one point");
    let r = points.len() as f64;
    eval_at
        .iter()
        .map(|&(a, b)| {
            points.iter().filter(|&&(x, y)| x <= a && y <= b).count() as f64 / r
        })
        .collect()
}

/// Empirical upper-tail dependence coefficient at level `q`: with
/// `x_q, y_q` the `⌈qR⌉`-th order statistics, the fraction of joint
/// exceedances among the `X`-exceedances.
pub fn lambda_u_hat(batch: &BivariateBatch, q: f64) -> Result<f64> {
    let r = batch.len();
    if q.is_nan() || q <= 0.0 || q >= 1.0 {
        return Err(Error::Domain(format!("q must lie in (0, 1), got {q}")));
    }
    if (r as f64) < 1.0 / (1.0 - q) {
        return Err(Error::Estimation(format!(
            "sample size {r} too small for level {q}"
        )));
    }
    let rank = (q * r as f64).ceil() as usize; // 1-indexed order statistic
    let order_stat = |v: &[f64]| {
        let mut copy = v.to_vec();
        let (_, val, _) = copy.select_nth_unstable_by(rank - 1, f64::total_cmp);
        *val
    };
    let x_q = order_stat(&batch.xs);
    let y_q = order_stat(&batch.ys);
    let n_x = batch.xs.iter().filter(|&&x| x > x_q).count();
    if n_x == 0 {
        return Err(Error::Estimation(
            "empty conditioning set: no exceedances above the x threshold".into(),
        ));
    }
    let n_xy = batch
        .xs
        .iter()
        .zip(&batch.ys)
        .filter(|(&x, &y)| x > x_q && y > y_q)
        .count();
    Ok(n_xy as f64 / n_x as f64)
}

/// Linear-interpolation quantile of a sorted slice.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Source of theoretical cdf values at arbitrary points.
pub trait SurfaceProvider: Sync {
    fn cdf_at(&self, points: &[(f64, f64)]) -> Result<Vec<f64>>;
}

/// The asymptotic joint law as a provider.
pub struct AsymptoticSurfaceProvider {
    pub model: ModelSpec,
    pub k: usize,
    pub quad: QuadratureConfig,
}

impl SurfaceProvider for AsymptoticSurfaceProvider {
    fn cdf_at(&self, points: &[(f64, f64)]) -> Result<Vec<f64>> {
        let surf = limit_surface(&self.model, self.k, points, &self.quad)?;
        if surf.failed_points() > 0 {
            return Err(Error::Validation(format!(
                "{} grid points failed to meet the quadrature tolerance",
                surf.failed_points()
            )));
        }
        Ok(surf.values)
    }
}

/// The exact finite-sample law as a provider. Points are expected on the
/// rescaled axis used by [`validate_against_limit`] and are mapped back to
/// the working scale (by `n` for the Fréchet-scale families; the Gaussian
/// family is never rescaled).
pub struct FiniteSampleSurfaceProvider {
    pub model: ModelSpec,
    pub n: usize,
    pub k: usize,
    pub quad: QuadratureConfig,
}

impl SurfaceProvider for FiniteSampleSurfaceProvider {
    fn cdf_at(&self, points: &[(f64, f64)]) -> Result<Vec<f64>> {
        let nf = match self.model {
            ModelSpec::GaussianBivariate { .. } => 1.0,
            _ => self.n as f64,
        };
        let raw: Vec<(f64, f64)> = points.iter().map(|&(a, b)| (nf * a, nf * b)).collect();
        let surf = finite_sample_surface(&self.model, self.n, self.k, &raw, &self.quad)?;
        if surf.failed_points() > 0 {
            return Err(Error::Validation(format!(
                "{} grid points failed to meet the quadrature tolerance",
                surf.failed_points()
            )));
        }
        Ok(surf.values)
    }
}

/// The ecdf of a fixed point cloud as a provider (self-test mode).
pub struct EcdfSurfaceProvider {
    pub points: Vec<(f64, f64)>,
}

impl SurfaceProvider for EcdfSurfaceProvider {
    fn cdf_at(&self, points: &[(f64, f64)]) -> Result<Vec<f64>> {
        Ok(ecdf_bivariate(&self.points, points))
    }
}

/// One evaluation point of a validation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointError {
    pub v1: f64,
    pub v2: f64,
    pub empirical: f64,
    pub theoretical: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
}

/// One point of a marginal error curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginalPoint {
    pub v: f64,
    pub l1_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub model: ModelSpec,
    pub n: usize,
    pub k: usize,
    pub replicate_count: usize,
    pub master_seed: u64,
}

/// Empirical-vs-theoretical error summary over a replicate set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub point_errors: Vec<PointError>,
    pub max_abs_error: f64,
    pub mean_abs_error: f64,
    pub quartiles: Quartiles,
    pub marginal_l1_v1: Vec<MarginalPoint>,
    pub marginal_l1_v2: Vec<MarginalPoint>,
    pub metadata: ReportMetadata,
}

const MARGINAL_GRID: usize = 100;
/// Argument used to push the other coordinate to its upper endpoint when
/// reading marginals off a joint surface.
const MARGINAL_INF: f64 = 1e6;

/// Split maxima for `k` rescaled to the limit axis: families 1-2 divide
/// `(V1, V2)` by `(n, n)` (the norming `ã_n = n`); the Gaussian family
/// keeps raw coordinates. Also checks the records are consistent.
pub fn rescaled_split_points(
    records: &[ReplicateRecord],
    k: usize,
) -> Result<Vec<(f64, f64)>> {
    if records.is_empty() {
        return Err(Error::Validation("no replicate records".into()));
    }
    let model = records[0].model;
    let n = records[0].splits[0].n;
    for r in records {
        if r.model != model {
            return Err(Error::Validation("records mix different models".into()));
        }
        if r.splits.iter().any(|s| s.n != n) {
            return Err(Error::Validation("records mix different sample sizes".into()));
        }
        if r.split_for(k).is_none() {
            return Err(Error::Validation(format!(
                "replicate {} carries no split for k = {k}",
                r.replicate_index
            )));
        }
    }
    let rescale = match model {
        ModelSpec::GaussianBivariate { .. } => 1.0,
        _ => {
            // the norming ã_n = n is the equality case of ã_n = O(n^{(1-α)/β})
            let ts = model.tail_summary();
            if ((1.0 - ts.alpha) / ts.beta - 1.0).abs() > 1e-12 {
                return Err(Error::Validation(format!(
                    "rescaling by n requires (1-α)/β = 1; model has α = {}, β = {}",
                    ts.alpha, ts.beta
                )));
            }
            n as f64
        }
    };
    Ok(records
        .iter()
        .map(|r| {
            let s = r.split_for(k).expect("checked above");
            (s.v1 / rescale, s.v2 / rescale)
        })
        .collect())
}

/// Rescales the recorded split maxima, evaluates the bivariate ecdf at the
/// rescaled sample points, queries `provider` at the same points, and
/// assembles the error report (including 100-point marginal error curves).
pub fn validate_against_limit(
    records: &[ReplicateRecord],
    provider: &dyn SurfaceProvider,
    k: usize,
) -> Result<ValidationReport> {
    let points = rescaled_split_points(records, k)?;
    let model = records[0].model;
    let n = records[0].splits[0].n;

    let empirical = ecdf_bivariate(&points, &points);
    let theoretical = provider.cdf_at(&points)?;

    let point_errors: Vec<PointError> = points
        .iter()
        .zip(empirical.iter().zip(&theoretical))
        .map(|(&(v1, v2), (&e, &t))| PointError {
            v1,
            v2,
            empirical: e,
            theoretical: t,
            abs_error: (e - t).abs(),
        })
        .collect();

    let mut errs: Vec<f64> = point_errors.iter().map(|p| p.abs_error).collect();
    errs.sort_by(f64::total_cmp);
    let max_abs_error = *errs.last().expect("nonempty");
    let mean_abs_error = errs.iter().sum::<f64>() / errs.len() as f64;
    let quartiles = Quartiles {
        q25: quantile_sorted(&errs, 0.25),
        q50: quantile_sorted(&errs, 0.50),
        q75: quantile_sorted(&errs, 0.75),
    };

    let marginal_l1_v1 = marginal_curve(&points, provider, true)?;
    let marginal_l1_v2 = marginal_curve(&points, provider, false)?;

    Ok(ValidationReport {
        point_errors,
        max_abs_error,
        mean_abs_error,
        quartiles,
        marginal_l1_v1,
        marginal_l1_v2,
        metadata: ReportMetadata {
            model,
            n,
            k,
            replicate_count: records.len(),
            master_seed: records[0].seed.master_seed,
        },
    })
}

fn marginal_curve(
    points: &[(f64, f64)],
    provider: &dyn SurfaceProvider,
    first_axis: bool,
) -> Result<Vec<MarginalPoint>> {
    let coord = |p: &(f64, f64)| if first_axis { p.0 } else { p.1 };
    let lo = points.iter().map(coord).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(coord).fold(f64::NEG_INFINITY, f64::max);
    let grid: Vec<f64> = if lo > 0.0 && hi > lo {
        // log-spaced for positive (Fréchet-scale) data
        let (la, lb) = (lo.ln(), hi.ln());
        (0..MARGINAL_GRID)
            .map(|i| (la + (lb - la) * i as f64 / (MARGINAL_GRID - 1) as f64).exp())
            .collect()
    } else {
        (0..MARGINAL_GRID)
            .map(|i| lo + (hi - lo) * i as f64 / (MARGINAL_GRID - 1) as f64)
            .collect()
    };
    let eval: Vec<(f64, f64)> = grid
        .iter()
        .map(|&v| {
            if first_axis {
                (v, MARGINAL_INF)
            } else {
                (MARGINAL_INF, v)
            }
        })
        .collect();
    let theo = provider.cdf_at(&eval)?;
    let r = points.len() as f64;
    Ok(grid
        .iter()
        .zip(&theo)
        .map(|(&v, &t)| {
            let emp = points.iter().filter(|p| coord(p) <= v).count() as f64 / r;
            MarginalPoint {
                v,
                l1_error: (emp - t).abs(),
            }
        })
        .collect())
}
