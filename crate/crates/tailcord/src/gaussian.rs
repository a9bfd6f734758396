//! Gaussian norming constants and conditional tail limits.
//!
//! For a bivariate normal pair the unit-Fréchet joint-tail machinery
//! degenerates, but on the unit *exponential* scale the conditional
//! exceedance `P(Y_E > ã_{n,E} y + b̃_{n,E} | X_E > log n)` has the
//! nondegenerate limit `(y √(2π))⁻¹ exp(-(ρy)²/2)`. This module computes
//! the classical Gumbel norming constants, their exponential-scale
//! counterparts, the Wadsworth-Tawn joint decay exponent `κ` and slowly
//! varying factor `L₁`, and validates the limit against exact
//! tail-conditioned simulation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::{sample_tail_conditioned_gaussian, SeedSpec};
use crate::special;

/// Norming sequences for sample size `n` and correlation `rho`.
///
/// `a_n, b_n` norm the Gaussian sample maximum; `a_tilde_n, b_tilde_n` norm
/// the concomitant maximum; `a_tilde_ne, b_tilde_ne` are the exponential-
/// scale counterparts (`a_tilde_ne = a_tilde_n · b_tilde_n` and
/// `b_tilde_ne = ½ b_tilde_n²`, expanded to three terms in `log n`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormingConstants {
    pub n: u64,
    pub rho: f64,
    pub a_n: f64,
    pub b_n: f64,
    pub a_tilde_n: f64,
    pub b_tilde_n: f64,
    pub a_tilde_ne: f64,
    pub b_tilde_ne: f64,
}

impl NormingConstants {
    pub fn new(n: u64, rho: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("need n >= 2, got {n}")));
        }
        check_rho(rho)?;
        let log_n = (n as f64).ln();
        let (a_n, b_n) = gumbel_norming(log_n);
        let (a_tilde_ne, b_tilde_ne) = exponential_scale_norming(log_n, rho);
        Ok(Self {
            n,
            rho,
            a_n,
            b_n,
            a_tilde_n: (1.0 - rho * rho).sqrt(),
            b_tilde_n: rho * b_n,
            a_tilde_ne,
            b_tilde_ne,
        })
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho.is_nan() || rho <= 0.0 || rho >= 1.0 {
        return Err(Error::Domain(format!("need rho in (0, 1), got {rho}")));
    }
    Ok(())
}

/// Gumbel norming of the standard normal maximum:
/// `a_n = (2 log n)^{-1/2}`, `b_n = √(2 log n) - ½ log(4π log n)/√(2 log n)`.
pub fn gumbel_norming(log_n: f64) -> (f64, f64) {
    let two_l = 2.0 * log_n;
    let a = two_l.sqrt().recip();
    let b = two_l.sqrt() - 0.5 * (4.0 * std::f64::consts::PI * log_n).ln() / two_l.sqrt();
    (a, b)
}

/// Exponential-scale norming `(ã_{n,E}, b̃_{n,E})`, parametrized by `log n`
/// directly so the tail-conditioned validation never needs `n` as an actual
/// sample size.
pub fn exponential_scale_norming(log_n: f64, rho: f64) -> (f64, f64) {
    let llog = (4.0 * std::f64::consts::PI * log_n).ln();
    let (_, b_n) = gumbel_norming(log_n);
    let a = rho * (1.0 - rho * rho).sqrt() * b_n;
    let b = rho * rho * log_n - 0.5 * rho * rho * llog + rho * rho / 16.0 * llog * llog / log_n;
    (a, b)
}

/// Joint tail decay exponent `κ(ζ₁, 1) = (ζ₁ + 1 - 2ρ√ζ₁)/(1 - ρ²)`,
/// valid for `ρ² < min(ζ₁, 1)`; at the boundary `ζ₁ = ρ²` it equals 1.
pub fn wt_kappa(rho: f64, zeta1: f64) -> Result<f64> {
    check_wt_region(rho, zeta1)?;
    Ok((zeta1 + 1.0 - 2.0 * rho * zeta1.sqrt()) / (1.0 - rho * rho))
}

/// Slowly varying factor `L₁(n; ζ₁, 1)` of the joint tail model.
pub fn wt_l1(n: u64, rho: f64, zeta1: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("need n >= 2, got {n}")));
    }
    check_wt_region(rho, zeta1)?;
    let log_n = (n as f64).ln();
    let r2 = rho * rho;
    let s = zeta1.sqrt();
    let four_pi_log = 4.0 * std::f64::consts::PI * log_n;
    let exponent = (2.0 * r2 - rho * (s + 1.0 / s)) / (2.0 * (1.0 - r2));
    Ok(four_pi_log.powf(exponent) * zeta1.powf((1.0 - rho / s) / (2.0 * (1.0 - r2)))
        * (1.0 - r2).powf(1.5)
        / ((s - rho) * (1.0 - rho * s)))
}

fn check_wt_region(rho: f64, zeta1: f64) -> Result<()> {
    check_rho(rho)?;
    if zeta1.is_nan() || rho * rho >= zeta1.min(1.0) {
        return Err(Error::Domain(format!(
            "joint tail representation needs rho^2 < min(zeta1, 1); rho = {rho}, zeta1 = {zeta1}"
        )));
    }
    Ok(())
}

/// Limit of `P(Y_E > ã_{n,E} y + b̃_{n,E} | X_E > log n)` as `n → ∞`:
/// `(y √(2π))⁻¹ e^{-(ρy)²/2}`.
pub fn conditional_tail_limit(rho: f64, y: f64) -> f64 {
    (-0.5 * (rho * y) * (rho * y)).exp() / (y * special::SQRT_2PI)
}

/// Mill's-ratio form of the same limit, `ρ (1 - Φ(ρy))`. The sandwich
/// `φ(z)/z (1 - 1/z²) ≤ 1 - Φ(z) ≤ φ(z)/z` pins the relative gap to
/// [`conditional_tail_limit`] at `1/(ρy)²`, so 5% agreement needs
/// `ρy ≥ √20 ≈ 4.5`.
pub fn mills_approx(rho: f64, y: f64) -> f64 {
    rho * special::norm_sf(rho * y)
}

/// One grid point of the tail validation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailValidationRow {
    pub y: f64,
    pub empirical: f64,
    pub limit: f64,
    pub mills: f64,
    pub rel_gap: f64,
}

/// Monte Carlo check of the conditional tail limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailValidationReport {
    pub rho: f64,
    pub threshold_u: f64,
    pub sample_count: usize,
    pub master_seed: u64,
    pub rows: Vec<TailValidationRow>,
}

/// Draws `sample_count` pairs conditioned on `X_E > threshold_u` per grid
/// point (independent stream per point) and compares the empirical
/// exceedance frequency of `{Y_E > ã_{n,E} y + b̃_{n,E}}` (with
/// `log n := threshold_u`) against [`conditional_tail_limit`].
///
/// The limit expression must not exceed 1 on the grid: it is not a
/// probability for small `y`, so the admissible range is enforced rather
/// than guessed.
pub fn validate_gaussian_limit(
    rho: f64,
    threshold_u: f64,
    y_grid: &[f64],
    sample_count: usize,
    master_seed: u64,
) -> Result<TailValidationReport> {
    check_rho(rho)?;
    if threshold_u.is_nan() || threshold_u <= 0.0 {
        return Err(Error::Domain(format!(
            "threshold must be positive, got {threshold_u}"
        )));
    }
    for &y in y_grid {
        if y.is_nan() || y <= 0.0 {
            return Err(Error::Domain(format!("grid value {y} must be positive")));
        }
        let lim = conditional_tail_limit(rho, y);
        if lim > 1.0 {
            return Err(Error::Domain(format!(
                "limit expression {lim} exceeds 1 at y = {y}; outside the admissible grid"
            )));
        }
    }

    let (a_e, b_e) = exponential_scale_norming(threshold_u, rho);
    let rows: Vec<TailValidationRow> = y_grid
        .par_iter()
        .enumerate()
        .map(|(i, &y)| -> Result<TailValidationRow> {
            let seed = SeedSpec::new(master_seed, i as u64);
            let batch = sample_tail_conditioned_gaussian(rho, threshold_u, sample_count, &seed)?;
            let level = a_e * y + b_e;
            let hits = batch.ys.iter().filter(|&&v| v > level).count();
            let empirical = hits as f64 / sample_count as f64;
            let limit = conditional_tail_limit(rho, y);
            Ok(TailValidationRow {
                y,
                empirical,
                limit,
                mills: mills_approx(rho, y),
                rel_gap: (empirical - limit).abs() / limit,
            })
        })
        .collect::<Result<_>>()?;

    Ok(TailValidationReport {
        rho,
        threshold_u,
        sample_count,
        master_seed,
        rows,
    })
}
