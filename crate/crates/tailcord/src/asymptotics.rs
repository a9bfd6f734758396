//! Limit theory for the split maxima `(V1, V2)`.
//!
//! For asymptotically dependent families the rescaled pair
//! `(V1/ã_n, V2/n)` (with `ã_n = n` here) converges to the joint law
//!
//! `F(v1, v2) = ∫₀^∞ H1(v1|x)^k H2(v2|x) x^{-k-2} e^{-1/x} / k! dx`,
//!
//! where `H1(y|x) = 1 - c̃(x, y) x^{1-α} y^{-β}` is the conditional limit of
//! the top-set concomitants and `H2` is the product of the scaled limits of
//! `F2^n` and `F3`. The exact finite-sample law integrates
//! `F1^k F2^{n-k-1} F3` against the density of the `(n-k)`-th order
//! statistic and serves as the oracle the asymptotics are validated
//! against.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::quad::{integrate_adaptive, integrate_zero_inf, Quadrature, QuadratureConfig};

/// Log-space floor below which integrands are flushed to zero.
const LOG_FLOOR: f64 = -745.0;

/// Provenance of a cdf surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurfaceKind {
    /// The `n → ∞` joint law, by adaptive quadrature.
    Asymptotic,
    /// The exact law at finite `n`, by the order-statistic integral.
    FiniteSample,
}

/// A cdf evaluated over a point set, with per-point quadrature errors.
///
/// A negative entry in `quad_errors` flags a point where the quadrature
/// did not meet its tolerance; `values` then holds the best estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitSurface {
    pub grid: Vec<(f64, f64)>,
    pub values: Vec<f64>,
    pub quad_errors: Vec<f64>,
    pub provenance: SurfaceKind,
    pub model: ModelSpec,
    pub k: usize,
    pub n: Option<usize>,
    pub quad_tolerance: f64,
}

impl LimitSurface {
    /// Number of grid points whose quadrature failed to converge.
    pub fn failed_points(&self) -> usize {
        self.quad_errors.iter().filter(|&&e| e < 0.0).count()
    }
}

fn require_dependent_family(model: &ModelSpec) -> Result<()> {
    if matches!(model, ModelSpec::GaussianBivariate { .. }) {
        return Err(Error::UnsupportedFamily(
            "the scaling-limit condition fails for the Gaussian family".into(),
        ));
    }
    Ok(())
}

fn require_positive(y: f64, x: f64) -> Result<()> {
    if x.is_nan() || y.is_nan() || x <= 0.0 || y <= 0.0 {
        return Err(Error::Domain(format!(
            "limit conditionals need x, y > 0, got ({x}, {y})"
        )));
    }
    Ok(())
}

/// `log H1(y | x)` through the generic scaling-limit path.
fn h1_log(model: &ModelSpec, y: f64, x: f64) -> Result<f64> {
    let ts = model.tail_summary();
    let u = model.bsv_limit(x, y)? * x.powf(1.0 - ts.alpha) * y.powf(-ts.beta);
    if u >= 1.0 {
        Ok(f64::NEG_INFINITY)
    } else {
        Ok((-u).ln_1p())
    }
}

/// Conditional limit of the top-set concomitant cdf,
/// `H1(y | x) = 1 - c̃(x, y) x^{1-α} y^{-β}` (generic path).
pub fn h1(model: &ModelSpec, y: f64, x: f64) -> Result<f64> {
    require_dependent_family(model)?;
    require_positive(y, x)?;
    Ok(h1_log(model, y, x)?.exp())
}

/// Family-specific closed form of `H1`.
pub fn h1_closed_form(model: &ModelSpec, y: f64, x: f64) -> Result<f64> {
    require_positive(y, x)?;
    match *model {
        ModelSpec::SurvivalClaytonPareto { theta, .. } => {
            Ok(1.0 - (1.0 + (y / x).powf(theta)).powf(-1.0 / theta))
        }
        ModelSpec::LogisticFrechet { gamma } => {
            let v = (x.powf(-1.0 / gamma) + y.powf(-1.0 / gamma)).powf(gamma);
            Ok(x * (v - 1.0 / y))
        }
        ModelSpec::GaussianBivariate { .. } => Err(Error::UnsupportedFamily(
            "no closed-form H1 for the Gaussian family".into(),
        )),
    }
}

/// Scaled limit of `F2^n`: `exp{-(1/y)(1 - λ_u r(x,y) (y/x)^α · 1_dep)}`.
/// With the dependence indicator off this is `e^{-1/y}`.
pub fn f2_limit(model: &ModelSpec, y: f64, x: f64) -> Result<f64> {
    require_positive(y, x)?;
    let ts = model.tail_summary();
    if !ts.asymptotically_dependent {
        return Ok(f2_limit_independent(y));
    }
    // λ_u r = c̃
    let c = model.bsv_limit(x, y)?;
    Ok((-(1.0 - c * (y / x).powf(ts.alpha)) / y).exp())
}

/// Limit of `F3`: `1 + λ_u x^{2-α} y^{α-1} (∂r/∂x - (α/x) r) · 1_dep`,
/// which is 1 with the dependence indicator off.
pub fn f3_limit(model: &ModelSpec, y: f64, x: f64) -> Result<f64> {
    require_positive(y, x)?;
    let ts = model.tail_summary();
    if !ts.asymptotically_dependent {
        return Ok(f3_limit_independent());
    }
    let c = model.bsv_limit(x, y)?;
    let dc = model.bsv_limit_dx(x, y)?;
    Ok(1.0 + x.powf(2.0 - ts.alpha) * y.powf(ts.alpha - 1.0) * (dc - ts.alpha / x * c))
}

/// Independence reduction of [`f2_limit`].
pub fn f2_limit_independent(y: f64) -> f64 {
    (-1.0 / y).exp()
}

/// Independence reduction of [`f3_limit`].
pub fn f3_limit_independent() -> f64 {
    1.0
}

/// `H2(y | x)`: the product of the two conditional limits above.
pub fn h2(model: &ModelSpec, y: f64, x: f64) -> Result<f64> {
    require_dependent_family(model)?;
    Ok(f2_limit(model, y, x)? * f3_limit(model, y, x)?)
}

/// Family-specific closed form of `H2`.
///
/// The survival-Clayton form matches the generic path only on the section
/// `x = 1` (its exponent drops the `1/x` factor that the generic limit
/// carries); the logistic form matches everywhere.
pub fn h2_closed_form(model: &ModelSpec, y: f64, x: f64) -> Result<f64> {
    require_positive(y, x)?;
    match *model {
        ModelSpec::SurvivalClaytonPareto { theta, .. } => {
            // (1 + (y/x)^θ)^{-1/θ-1} = t^{1+θ} for t = (1 + (y/x)^θ)^{-1/θ}
            let t = (1.0 + (y / x).powf(theta)).powf(-1.0 / theta);
            Ok((1.0 - t.powf(1.0 + theta)) * (-1.0 / y + t).exp())
        }
        ModelSpec::LogisticFrechet { gamma } => {
            let w = 1.0 + (y / x).powf(-1.0 / gamma);
            Ok(w.powf(gamma - 1.0) * (-(w.powf(gamma) - 1.0) / x).exp())
        }
        ModelSpec::GaussianBivariate { .. } => Err(Error::UnsupportedFamily(
            "no closed-form H2 for the Gaussian family".into(),
        )),
    }
}

/// Joint limit cdf of the rescaled `(V1, V2)` at `(v1, v2)`:
/// adaptive quadrature of `H1^k H2 x^{-k-2} e^{-1/x} / k!` over `(0, ∞)`.
pub fn joint_limit_cdf(
    model: &ModelSpec,
    k: usize,
    v1: f64,
    v2: f64,
    cfg: &QuadratureConfig,
) -> Result<Quadrature> {
    require_dependent_family(model)?;
    require_positive(v1, v2)?;
    if k < 1 {
        return Err(Error::Domain("split size k must be >= 1".into()));
    }
    let kf = k as f64;
    let ln_kfac = ln_gamma(kf + 1.0);
    let m = *model;
    let integrand = move |x: f64| {
        if 1.0 / x > -LOG_FLOOR {
            return 0.0;
        }
        let lh1 = match h1_log(&m, v1, x) {
            Ok(v) => v,
            Err(_) => return 0.0,
        };
        let h2v = match h2(&m, v2, x) {
            Ok(v) => v,
            Err(_) => return 0.0,
        };
        if h2v <= 0.0 {
            return 0.0;
        }
        let ln = kf * lh1 + h2v.ln() - (kf + 2.0) * x.ln() - 1.0 / x - ln_kfac;
        if ln < LOG_FLOOR {
            0.0
        } else {
            ln.exp()
        }
    };
    // the order-statistic density peaks at x ~ 1/(k+2); the conditional
    // limits turn over near x ~ v1 and x ~ v2
    let mode = 1.0 / (kf + 2.0);
    let breaks = [
        mode / 8.0,
        mode,
        8.0 * mode,
        1.0,
        0.1 * v1.min(v2),
        v1,
        v2,
        10.0 * v1.max(v2),
    ];
    let quad = integrate_zero_inf(integrand, &breaks, cfg)?;
    Ok(Quadrature {
        value: quad.value.clamp(0.0, 1.0),
        abs_error: quad.abs_error,
    })
}

/// Exact finite-sample cdf of `(V1, V2)` at `(v1, v2)` on the model's
/// working scale: `E[F1^k(v1|X_{(n-k)}) F2^{n-k-1}(v2|X_{(n-k)}) F3(v2|X_{(n-k)})]`.
///
/// The expectation over the order statistic is taken in probability space
/// (`p = F_X(x)`), where its density is `Beta(n-k, k+1)`; all powers are
/// assembled in log space.
pub fn finite_sample_cdf(
    model: &ModelSpec,
    n: usize,
    k: usize,
    v1: f64,
    v2: f64,
    cfg: &QuadratureConfig,
) -> Result<Quadrature> {
    if k < 1 || k + 1 > n {
        return Err(Error::Domain(format!(
            "split size k = {k} invalid for sample size {n}"
        )));
    }
    let scale = model.working_scale();
    if !scale.support_contains(v1) || !scale.support_contains(v2) {
        return Err(Error::Domain(format!(
            "({v1}, {v2}) outside the support of {scale:?}"
        )));
    }
    let nf = n as f64;
    let kf = k as f64;
    let ln_binom = ln_gamma(nf + 1.0) - ln_gamma(nf - kf) - ln_gamma(kf + 1.0);
    let m = *model;
    let integrand = move |p: f64| {
        if p <= 0.0 || p >= 1.0 {
            return 0.0;
        }
        let x = scale.quantile_pair(p, 1.0 - p);
        let f1c = match m.f1(v1, x) {
            Ok(v) => 1.0 - v,
            Err(_) => return 0.0,
        };
        let lf1 = if f1c >= 1.0 {
            return 0.0;
        } else {
            (-f1c).ln_1p()
        };
        let lf2 = match m.f2_log(v2, x) {
            Ok(v) => v,
            Err(_) => return 0.0,
        };
        let f3v = match m.f3(v2, x) {
            Ok(v) => v,
            Err(_) => return 0.0,
        };
        if f3v <= 0.0 {
            return 0.0;
        }
        let ln = ln_binom
            + (nf - kf - 1.0) * p.ln()
            + kf * (-p).ln_1p()
            + kf * lf1
            + (nf - kf - 1.0) * lf2
            + f3v.ln();
        if ln < LOG_FLOOR {
            0.0
        } else {
            ln.exp()
        }
    };
    // Beta(n-k, k+1) mode and spread seed the segmentation
    let p_star = (nf - kf - 1.0) / (nf - 1.0);
    let w = (p_star * (1.0 - p_star) / nf).sqrt();
    let breaks: Vec<f64> = [-8.0, -3.0, 0.0, 3.0, 8.0]
        .iter()
        .map(|c| p_star + c * w)
        .filter(|p| *p > 0.0 && *p < 1.0)
        .collect();
    let quad = integrate_adaptive(integrand, 0.0, 1.0, &breaks, cfg)?;
    Ok(Quadrature {
        value: quad.value.clamp(0.0, 1.0),
        abs_error: quad.abs_error,
    })
}

/// Evaluates the asymptotic law over a grid; grid points are independent
/// and run data-parallel. Non-convergent points keep their best estimate
/// and are flagged with a negative quadrature error.
pub fn limit_surface(
    model: &ModelSpec,
    k: usize,
    grid: &[(f64, f64)],
    cfg: &QuadratureConfig,
) -> Result<LimitSurface> {
    let results: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&(v1, v2)| match joint_limit_cdf(model, k, v1, v2, cfg) {
            Ok(q) => Ok((q.value, q.abs_error)),
            Err(Error::Quadrature { estimate, .. }) => Ok((estimate.clamp(0.0, 1.0), -1.0)),
            Err(other) => Err(other),
        })
        .collect::<Result<_>>()?;
    Ok(LimitSurface {
        grid: grid.to_vec(),
        values: results.iter().map(|r| r.0).collect(),
        quad_errors: results.iter().map(|r| r.1).collect(),
        provenance: SurfaceKind::Asymptotic,
        model: *model,
        k,
        n: None,
        quad_tolerance: cfg.abs_tol,
    })
}

/// Evaluates the finite-sample law over a grid, as [`limit_surface`].
pub fn finite_sample_surface(
    model: &ModelSpec,
    n: usize,
    k: usize,
    grid: &[(f64, f64)],
    cfg: &QuadratureConfig,
) -> Result<LimitSurface> {
    let results: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&(v1, v2)| match finite_sample_cdf(model, n, k, v1, v2, cfg) {
            Ok(q) => Ok((q.value, q.abs_error)),
            Err(Error::Quadrature { estimate, .. }) => Ok((estimate.clamp(0.0, 1.0), -1.0)),
            Err(other) => Err(other),
        })
        .collect::<Result<_>>()?;
    Ok(LimitSurface {
        grid: grid.to_vec(),
        values: results.iter().map(|r| r.0).collect(),
        quad_errors: results.iter().map(|r| r.1).collect(),
        provenance: SurfaceKind::FiniteSample,
        model: *model,
        k,
        n: Some(n),
        quad_tolerance: cfg.abs_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian;
    use crate::models::Scale;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_distr::Distribution;

    fn clayton2() -> ModelSpec {
        ModelSpec::survival_clayton(2.0, 1.0).unwrap()
    }

    fn logistic_half() -> ModelSpec {
        ModelSpec::logistic(0.5).unwrap()
    }

    #[test]
    fn h1_frozen_values() {
        // symmetry point of the survival-Clayton closed form
        for &x in &[0.5, 1.0, 3.0] {
            assert_abs_diff_eq!(
                h1(&clayton2(), x, x).unwrap(),
                1.0 - 2f64.powf(-0.5),
                epsilon = 1e-12
            );
        }
        assert_abs_diff_eq!(
            h1(&logistic_half(), 1.0, 1.0).unwrap(),
            2f64.sqrt() - 1.0,
            epsilon = 1e-12
        );
        // upper endpoint
        assert!(h1(&clayton2(), 1e12, 1.0).unwrap() > 1.0 - 1e-9);
        assert!(h1(&logistic_half(), 1e12, 1.0).unwrap() > 1.0 - 1e-9);
        assert!(h1(&ModelSpec::gaussian(0.5).unwrap(), 1.0, 1.0).is_err());
    }

    #[test]
    fn h1_generic_equals_closed_form() {
        // 20x20 log-spaced grid, tolerance 1e-10
        let grid: Vec<f64> = (0..20).map(|i| 0.05 * 1.5f64.powi(i)).collect();
        for m in [clayton2(), logistic_half()] {
            for &x in &grid {
                for &y in &grid {
                    let a = h1(&m, y, x).unwrap();
                    let b = h1_closed_form(&m, y, x).unwrap();
                    assert!(
                        (a - b).abs() < 1e-10,
                        "{m:?} H1({y}|{x}): generic {a}, closed {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn conditional_limits_frozen_values() {
        // independence reduction
        assert_abs_diff_eq!(f2_limit_independent(1.0), (-1.0f64).exp(), epsilon = 1e-15);
        assert_eq!(f3_limit_independent(), 1.0);
        // the Gaussian family takes the independent branch
        let g = ModelSpec::gaussian(0.5).unwrap();
        assert_abs_diff_eq!(f2_limit(&g, 1.0, 1.0).unwrap(), (-1.0f64).exp(), epsilon = 1e-15);
        assert_eq!(f3_limit(&g, 1.0, 1.0).unwrap(), 1.0);

        assert_abs_diff_eq!(
            f3_limit(&clayton2(), 1.0, 1.0).unwrap(),
            1.0 - 2f64.powf(-1.5),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            f2_limit(&logistic_half(), 1.0, 1.0).unwrap(),
            (-(2f64.sqrt() - 1.0)).exp(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn h2_frozen_values() {
        assert_abs_diff_eq!(
            h2(&clayton2(), 1.0, 1.0).unwrap(),
            0.482_314_982_812_587_5,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            h2(&logistic_half(), 1.0, 1.0).unwrap(),
            0.467_298_446_988_363_1,
            epsilon = 1e-12
        );
        // upper endpoint in y
        for m in [clayton2(), logistic_half()] {
            for &x in &[0.3, 1.0, 4.0] {
                assert!(h2(&m, 1e12, x).unwrap() > 1.0 - 1e-9);
            }
        }
    }

    #[test]
    fn h2_generic_vs_closed_forms() {
        let grid: Vec<f64> = (0..20).map(|i| 0.05 * 1.5f64.powi(i)).collect();
        // logistic: agreement everywhere
        let l = logistic_half();
        for &x in &grid {
            for &y in &grid {
                let a = h2(&l, y, x).unwrap();
                let b = h2_closed_form(&l, y, x).unwrap();
                assert!((a - b).abs() < 1e-10, "logistic H2({y}|{x}): {a} vs {b}");
            }
        }
        // survival-Clayton: agreement on the section x = 1
        let c = clayton2();
        for &y in &grid {
            let a = h2(&c, y, 1.0).unwrap();
            let b = h2_closed_form(&c, y, 1.0).unwrap();
            assert!((a - b).abs() < 1e-10, "clayton H2({y}|1): {a} vs {b}");
        }
    }

    #[test]
    fn h2_nondecreasing_in_y() {
        for m in [clayton2(), logistic_half()] {
            for &x in &[0.4, 1.0, 2.7] {
                let mut prev = -1.0;
                let mut y = 0.05;
                while y < 1e4 {
                    let v = h2(&m, y, x).unwrap();
                    assert!((0.0..=1.0 + 1e-12).contains(&v));
                    assert!(v >= prev - 1e-12, "{m:?} H2 dropped at y={y}, x={x}");
                    prev = v;
                    y *= 1.7;
                }
            }
        }
    }

    #[test]
    fn joint_limit_cdf_normalizes() {
        // the exact corner value is e^{-1/v} (the law of the overall
        // maximum), a hair inside the 1e-6 band; resolving it needs a
        // tighter quadrature than the default
        let cfg = QuadratureConfig {
            abs_tol: 1e-13,
            rel_tol: 1e-13,
            max_subdivisions: 400,
            ..QuadratureConfig::default()
        };
        for m in [clayton2(), logistic_half()] {
            for k in [1, 10] {
                let q = joint_limit_cdf(&m, k, 1e6, 1e6, &cfg).unwrap();
                assert!(
                    (q.value - 1.0).abs() < 1e-6,
                    "{m:?} k={k}: corner mass {}",
                    q.value
                );
            }
        }
    }

    #[test]
    fn joint_limit_cdf_monotone_and_rectangle_positive() {
        let cfg = QuadratureConfig::default();
        let m = clayton2();
        let k = 10;
        let pts = [0.5, 1.0, 2.0, 5.0, 20.0];
        let eval = |v1: f64, v2: f64| joint_limit_cdf(&m, k, v1, v2, &cfg).unwrap().value;
        for &v1 in &pts {
            for &v2 in &pts {
                let f = eval(v1, v2);
                assert!((0.0..=1.0).contains(&f));
                assert!(eval(2.0 * v1, v2) >= f - 1e-9);
                assert!(eval(v1, 2.0 * v2) >= f - 1e-9);
            }
        }
        // rectangle inequality on a few boxes
        for &(a1, a2, b1, b2) in &[(0.5, 0.5, 2.0, 2.0), (1.0, 0.5, 5.0, 2.0)] {
            let mass = eval(b1, b2) - eval(a1, b2) - eval(b1, a2) + eval(a1, a2);
            assert!(mass >= -1e-9, "rectangle mass {mass}");
        }
    }

    /// Independent integration oracle: the joint limit cdf at a point is the
    /// expectation of `H1^k H2` under `1/X ~ Gamma(k+1, 1)`.
    #[test]
    fn joint_limit_cdf_matches_gamma_expectation() {
        let cfg = QuadratureConfig::default();
        let m = clayton2();
        let k = 10;
        let (v1, v2) = (50.0, 2.0);
        let quad_value = joint_limit_cdf(&m, k, v1, v2, &cfg).unwrap().value;

        let gamma = rand_distr::Gamma::new(k as f64 + 1.0, 1.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4242);
        let reps = 1_000_000usize;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..reps {
            let t: f64 = gamma.sample(&mut rng);
            let x = 1.0 / t;
            let val = h1(&m, v1, x).unwrap().powi(k as i32) * h2(&m, v2, x).unwrap();
            sum += val;
            sumsq += val * val;
        }
        let mean = sum / reps as f64;
        let sd = ((sumsq / reps as f64 - mean * mean) / reps as f64).sqrt();
        assert!(
            (quad_value - mean).abs() < 3.0 * sd + 1e-6,
            "quadrature {quad_value} vs MC {mean} (3σ = {})",
            3.0 * sd
        );
    }

    /// End-to-end simulation oracle at a fixed point: the empirical
    /// frequency of {V1/n <= 50, V2/n <= 2} over independent replicates
    /// matches the quadrature of the joint limit (desk-scale protocol).
    #[test]
    fn joint_limit_cdf_matches_concomitant_simulation() {
        use crate::concomitants::run_replicates;
        let m = clayton2();
        let (n, k, reps) = (10_000usize, 10usize, 1_200usize);
        let (v1, v2) = (50.0, 2.0);
        let theory = joint_limit_cdf(&m, k, v1, v2, &QuadratureConfig::default())
            .unwrap()
            .value;
        let records = run_replicates(&m, n, &[k], reps, 271_828, 0).unwrap();
        let nf = n as f64;
        let hits = records
            .iter()
            .filter(|r| r.splits[0].v1 <= v1 * nf && r.splits[0].v2 <= v2 * nf)
            .count();
        let emp = hits as f64 / reps as f64;
        // binomial 3σ plus the residual n = 10^4 bias (~2e-4 at these points)
        let sigma = (theory * (1.0 - theory) / reps as f64).sqrt();
        assert!(
            (emp - theory).abs() <= 3.0 * sigma + 1e-3,
            "limit {theory} vs simulation {emp} (3σ = {})",
            3.0 * sigma
        );
    }

    #[test]
    fn finite_sample_cdf_total_mass() {
        let cfg = QuadratureConfig::default();
        let m = clayton2();
        // k = n-1 and both arguments at the upper end: all mass
        let q = finite_sample_cdf(&m, 20, 19, 1e9, 1e9, &cfg).unwrap();
        assert_abs_diff_eq!(q.value, 1.0, epsilon = 1e-6);
        let q = finite_sample_cdf(&m, 200, 5, 1e9, 1e9, &cfg).unwrap();
        assert_abs_diff_eq!(q.value, 1.0, epsilon = 1e-6);
    }

    /// Under independence (Gaussian ρ = 0 pushed to the Fréchet scale) the
    /// split maxima factorize into independent Fréchet maxima:
    /// `P(V1 ≤ w1) P(V2 ≤ w2) = e^{-k/w1} e^{-(n-k)/w2}`.
    #[test]
    fn finite_sample_cdf_independence_factorization() {
        let cfg = QuadratureConfig::default();
        let m = ModelSpec::gaussian(0.0).unwrap();
        let (n, k) = (40, 7);
        let to_normal = |w: f64| {
            Scale::StandardNormal.quantile_pair((-1.0 / w).exp(), -(-1.0 / w).exp_m1())
        };
        for &(w1, w2) in &[(10.0, 40.0), (5.0, 30.0), (20.0, 60.0)] {
            // Fréchet grid point mapped to the normal working scale; the
            // maxima factorize into independent Fréchet maxima of sizes k
            // and n - k
            let got = finite_sample_cdf(&m, n, k, to_normal(w1), to_normal(w2), &cfg)
                .unwrap()
                .value;
            let want = (-(k as f64) / w1).exp() * (-((n - k) as f64) / w2).exp();
            assert!(
                (got - want).abs() < 1e-6,
                "factorization at ({w1},{w2}): {got} vs {want}"
            );
        }
    }

    /// Brute-force simulation oracle for the finite-sample integral.
    #[test]
    fn finite_sample_cdf_matches_direct_monte_carlo() {
        use crate::concomitants::run_replicates;
        let cfg = QuadratureConfig::default();
        let m = clayton2();
        let (n, k) = (50, 5);
        let (v1, v2) = (5.0, 3.0);
        let theory = finite_sample_cdf(&m, n, k, v1, v2, &cfg).unwrap().value;

        let reps = 200_000;
        let recs = run_replicates(&m, n, &[k], reps, 31_337, 0).unwrap();
        let hits = recs
            .iter()
            .filter(|r| r.splits[0].v1 <= v1 && r.splits[0].v2 <= v2)
            .count();
        let emp = hits as f64 / reps as f64;
        let sigma = (theory * (1.0 - theory) / reps as f64).sqrt();
        assert!(
            (emp - theory).abs() <= 3.0 * sigma,
            "finite-sample cdf {theory} vs MC {emp} (3σ = {})",
            3.0 * sigma
        );
    }

    /// The finite-sample law at scale-n arguments approaches the limit law.
    #[test]
    fn finite_sample_converges_to_limit() {
        let cfg = QuadratureConfig::default();
        let m = clayton2();
        let k = 10;
        let grid = [0.5, 1.0, 2.0, 5.0, 10.0];
        let mut prev_gap = f64::INFINITY;
        for &n in &[100usize, 1_000, 10_000] {
            let mut max_gap = 0.0f64;
            for &v1 in &grid {
                for &v2 in &grid {
                    let fin = finite_sample_cdf(&m, n, k, n as f64 * v1, n as f64 * v2, &cfg)
                        .unwrap()
                        .value;
                    let lim = joint_limit_cdf(&m, k, v1, v2, &cfg).unwrap().value;
                    max_gap = max_gap.max((fin - lim).abs());
                }
            }
            assert!(
                max_gap < prev_gap,
                "gap {max_gap} at n={n} did not shrink (prev {prev_gap})"
            );
            prev_gap = max_gap;
        }
    }

    /// With vanishing tail dependence the conditional `F3` at the Gumbel
    /// norming drifts to 1 (the asymptotic-independence degeneracy).
    #[test]
    fn gaussian_f3_degenerates_under_norming() {
        let m = ModelSpec::gaussian(0.5).unwrap();
        let (x, y) = (1.0, 1.0);
        let mut prev_gap = f64::INFINITY;
        for &n in &[1e3f64, 1e6] {
            let (a_n, b_n) = gaussian::gumbel_norming(n.ln());
            let f3 = m.f3(a_n * y + b_n, a_n * x + b_n).unwrap();
            let gap = 1.0 - f3;
            assert!(gap < prev_gap, "F3 gap {gap} at n={n} did not shrink");
            prev_gap = gap;
        }
        assert!(prev_gap < 0.2);
    }

    #[test]
    fn surfaces_run_batch_grids() {
        let cfg = QuadratureConfig::default();
        let grid: Vec<(f64, f64)> = [0.5, 1.0, 2.0]
            .iter()
            .flat_map(|&a| [0.5, 1.0, 2.0].iter().map(move |&b| (a, b)))
            .collect();
        let s = limit_surface(&clayton2(), 10, &grid, &cfg).unwrap();
        assert_eq!(s.values.len(), 9);
        assert_eq!(s.failed_points(), 0);
        assert!(s.values.iter().all(|v| (0.0..=1.0).contains(v)));

        let f = finite_sample_surface(&clayton2(), 100, 10, &grid, &cfg).unwrap();
        assert_eq!(f.provenance, SurfaceKind::FiniteSample);
        assert_eq!(f.n, Some(100));
    }

    #[test]
    fn rejects_invalid_inputs() {
        let cfg = QuadratureConfig::default();
        assert!(joint_limit_cdf(&clayton2(), 0, 1.0, 1.0, &cfg).is_err());
        assert!(joint_limit_cdf(&clayton2(), 1, -1.0, 1.0, &cfg).is_err());
        assert!(joint_limit_cdf(&ModelSpec::gaussian(0.3).unwrap(), 1, 1.0, 1.0, &cfg).is_err());
        assert!(finite_sample_cdf(&clayton2(), 10, 10, 1.0, 1.0, &cfg).is_err());
        assert!(finite_sample_cdf(&clayton2(), 10, 0, 1.0, 1.0, &cfg).is_err());
    }
}
