//! Exact probabilistic description of the three bivariate families.
//!
//! Families 1 and 2 live on the unit Fréchet working scale after the
//! probability-integral transform; family 3 lives on the standard normal
//! scale. The joint tail of families 1-2 admits the representation
//! `F̄(x, y) = ℒ(x, y) x^{-α} y^{-β}` with `ℒ` bivariate slowly varying,
//! whose scaling limit `c̃(x, y) = lim ℒ(nx, ny)` drives all the
//! asymptotics downstream.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special;

/// Guard for probabilities fed to inverse-cdf transforms.
const PROB_CLAMP: f64 = 1e-15;
/// Conditioning probabilities below this are treated as degenerate.
const COND_GUARD: f64 = 1e-300;

/// Marginal scale of a univariate coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scale", rename_all = "kebab-case")]
pub enum Scale {
    ParetoLomax { nu: f64 },
    UnitFrechet,
    StandardNormal,
    UnitExponential,
}

impl Scale {
    pub fn support_contains(&self, v: f64) -> bool {
        if !v.is_finite() {
            return false;
        }
        match self {
            Scale::ParetoLomax { .. } | Scale::UnitExponential => v >= 0.0,
            Scale::UnitFrechet => v > 0.0,
            Scale::StandardNormal => true,
        }
    }

    /// Cdf and survival evaluated together, each accurate on its own side.
    pub fn cdf_pair(&self, v: f64) -> (f64, f64) {
        match *self {
            Scale::ParetoLomax { nu } => {
                let ln_s = -nu * v.ln_1p();
                (-ln_s.exp_m1(), ln_s.exp())
            }
            Scale::UnitFrechet => {
                let p = (-1.0 / v).exp();
                (p, -(-1.0 / v).exp_m1())
            }
            Scale::StandardNormal => (special::norm_cdf(v), special::norm_sf(v)),
            Scale::UnitExponential => (-(-v).exp_m1(), (-v).exp()),
        }
    }

    pub fn cdf(&self, v: f64) -> f64 {
        self.cdf_pair(v).0
    }

    pub fn pdf(&self, v: f64) -> f64 {
        match *self {
            Scale::ParetoLomax { nu } => nu * ((-nu - 1.0) * v.ln_1p()).exp(),
            Scale::UnitFrechet => (-1.0 / v).exp() / (v * v),
            Scale::StandardNormal => special::norm_pdf(v),
            Scale::UnitExponential => (-v).exp(),
        }
    }

    /// Quantile from a `(p, 1 - p)` pair, using whichever side is accurate.
    pub fn quantile_pair(&self, p: f64, q: f64) -> f64 {
        match *self {
            Scale::ParetoLomax { nu } => {
                if p <= q {
                    ((-1.0 / nu) * (-p).ln_1p()).exp_m1()
                } else {
                    ((-1.0 / nu) * q.ln()).exp() - 1.0
                }
            }
            Scale::UnitFrechet => {
                let ln_p = if p <= q { p.ln() } else { (-q).ln_1p() };
                -1.0 / ln_p
            }
            Scale::StandardNormal => {
                if p <= q {
                    special::norm_quantile(p)
                } else {
                    special::norm_quantile_upper(q)
                }
            }
            Scale::UnitExponential => {
                if p <= q {
                    -(-p).ln_1p()
                } else {
                    -q.ln()
                }
            }
        }
    }

    pub fn quantile(&self, p: f64) -> f64 {
        self.quantile_pair(p, 1.0 - p)
    }
}

/// Probability-integral transform between marginal scales.
///
/// Probabilities are clamped to `[1e-15, 1 - 1e-15]` before the inverse cdf
/// so the Fréchet map `-1/log F` stays finite.
pub fn marginal_transform(value: f64, from: Scale, to: Scale) -> Result<f64> {
    if !from.support_contains(value) {
        return Err(Error::Domain(format!(
            "{value} outside the support of {from:?}"
        )));
    }
    let (mut p, mut q) = from.cdf_pair(value);
    if p < PROB_CLAMP {
        p = PROB_CLAMP;
        q = 1.0 - PROB_CLAMP;
    }
    if q < PROB_CLAMP {
        q = PROB_CLAMP;
        p = 1.0 - PROB_CLAMP;
    }
    Ok(to.quantile_pair(p, q))
}

/// Tail-dependence summary of a model.
///
/// `alpha + beta = 1/eta`; the pair is asymptotically dependent exactly when
/// `alpha + beta = 1` and `lambda_u > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailSummary {
    pub alpha: f64,
    pub beta: f64,
    pub eta: f64,
    pub lambda_u: f64,
    pub asymptotically_dependent: bool,
}

/// One of the three bivariate families with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ModelSpec {
    /// Survival-Clayton(θ) copula with Pareto-Lomax(ν, 1) marginals,
    /// handled on the unit Fréchet scale.
    SurvivalClaytonPareto { theta: f64, nu: f64 },
    /// Bivariate symmetric logistic extremal dependence with unit Fréchet
    /// marginals: `F(x, y) = exp(-V(x, y))`, `V = (x^{-1/γ} + y^{-1/γ})^γ`.
    LogisticFrechet { gamma: f64 },
    /// Bivariate standard normal with correlation ρ.
    GaussianBivariate { rho: f64 },
}

impl ModelSpec {
    pub fn survival_clayton(theta: f64, nu: f64) -> Result<Self> {
        let m = ModelSpec::SurvivalClaytonPareto { theta, nu };
        m.validate()?;
        Ok(m)
    }

    pub fn logistic(gamma: f64) -> Result<Self> {
        let m = ModelSpec::LogisticFrechet { gamma };
        m.validate()?;
        Ok(m)
    }

    pub fn gaussian(rho: f64) -> Result<Self> {
        let m = ModelSpec::GaussianBivariate { rho };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelSpec::SurvivalClaytonPareto { theta, nu } => {
                if !theta.is_finite() || theta <= 0.0 {
                    return Err(Error::InvalidModel(format!("theta must be > 0, got {theta}")));
                }
                if !nu.is_finite() || nu <= 0.0 {
                    return Err(Error::InvalidModel(format!("nu must be > 0, got {nu}")));
                }
            }
            ModelSpec::LogisticFrechet { gamma } => {
                if gamma.is_nan() || gamma <= 0.0 || gamma >= 1.0 {
                    return Err(Error::InvalidModel(format!(
                        "gamma must lie in (0, 1), got {gamma}"
                    )));
                }
            }
            // rho = 0 is admitted: the independent Gaussian pair is the
            // reference model for the factorization oracle.
            ModelSpec::GaussianBivariate { rho } => {
                if !(0.0..1.0).contains(&rho) {
                    return Err(Error::InvalidModel(format!(
                        "rho must lie in [0, 1), got {rho}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Scale all conditional/joint operations are expressed on.
    pub fn working_scale(&self) -> Scale {
        match self {
            ModelSpec::SurvivalClaytonPareto { .. } | ModelSpec::LogisticFrechet { .. } => {
                Scale::UnitFrechet
            }
            ModelSpec::GaussianBivariate { .. } => Scale::StandardNormal,
        }
    }

    /// Scale the exact sampler emits (Pareto for family 1).
    pub fn native_scale(&self) -> Scale {
        match *self {
            ModelSpec::SurvivalClaytonPareto { nu, .. } => Scale::ParetoLomax { nu },
            ModelSpec::LogisticFrechet { .. } => Scale::UnitFrechet,
            ModelSpec::GaussianBivariate { .. } => Scale::StandardNormal,
        }
    }

    fn check_support(&self, x: f64, y: f64) -> Result<()> {
        let s = self.working_scale();
        if !s.support_contains(x) || !s.support_contains(y) {
            return Err(Error::Domain(format!(
                "({x}, {y}) outside the support of {s:?}"
            )));
        }
        Ok(())
    }

    /// `P(X > x, Y > y)` on the working scale.
    pub fn joint_survival(&self, x: f64, y: f64) -> Result<f64> {
        self.validate()?;
        self.check_support(x, y)?;
        Ok(match *self {
            ModelSpec::SurvivalClaytonPareto { theta, .. } => {
                clayton_joint_survival(theta, x, y)
            }
            ModelSpec::LogisticFrechet { gamma } => {
                let gx = frechet_sf(x);
                let gy = frechet_sf(y);
                let gv = -(-logistic_v(gamma, x, y)).exp_m1();
                (gx + gy - gv).clamp(0.0, 1.0)
            }
            ModelSpec::GaussianBivariate { rho } => special::bvn_sf(x, y, rho),
        })
    }

    /// `P(X ≤ x, Y ≤ y)` on the working scale.
    pub fn joint_cdf(&self, x: f64, y: f64) -> Result<f64> {
        self.validate()?;
        self.check_support(x, y)?;
        Ok(match *self {
            ModelSpec::SurvivalClaytonPareto { theta, .. } => {
                let gx = frechet_sf(x);
                let gy = frechet_sf(y);
                (1.0 - (gx + gy - clayton_joint_survival(theta, x, y))).clamp(0.0, 1.0)
            }
            ModelSpec::LogisticFrechet { gamma } => (-logistic_v(gamma, x, y)).exp(),
            ModelSpec::GaussianBivariate { rho } => special::bvn_cdf(x, y, rho),
        })
    }

    /// `F1(y | x) = P(Y ≤ y | X > x)`.
    pub fn f1(&self, y: f64, x: f64) -> Result<f64> {
        self.check_support(x, y)?;
        let (surv_x, joint) = match *self {
            ModelSpec::GaussianBivariate { rho } => {
                (special::norm_sf(x), special::bvn_sf(x, y, rho))
            }
            _ => (frechet_sf(x), self.joint_survival(x, y)?),
        };
        if surv_x < COND_GUARD {
            return Err(Error::ConditioningDegenerate(format!(
                "P(X > {x}) below guard threshold"
            )));
        }
        Ok((1.0 - joint / surv_x).clamp(0.0, 1.0))
    }

    /// `F2(y | x) = P(Y ≤ y | X ≤ x)`.
    pub fn f2(&self, y: f64, x: f64) -> Result<f64> {
        match *self {
            ModelSpec::LogisticFrechet { .. } => Ok(self.f2_log(y, x)?.exp()),
            _ => Ok((1.0 - self.f2_complement(y, x)?).clamp(0.0, 1.0)),
        }
    }

    /// `P(Y > y | X ≤ x)`, accurate when it is small.
    pub fn f2_complement(&self, y: f64, x: f64) -> Result<f64> {
        self.check_support(x, y)?;
        match *self {
            ModelSpec::LogisticFrechet { .. } => Ok(-self.f2_log(y, x)?.exp_m1()),
            ModelSpec::SurvivalClaytonPareto { theta, .. } => {
                let cdf_x = (-1.0 / x).exp();
                if cdf_x < COND_GUARD {
                    return Err(Error::ConditioningDegenerate(format!(
                        "P(X <= {x}) below guard threshold"
                    )));
                }
                let num = frechet_sf(y) - clayton_joint_survival(theta, x, y);
                Ok((num / cdf_x).clamp(0.0, 1.0))
            }
            ModelSpec::GaussianBivariate { rho } => {
                let cdf_x = special::norm_cdf(x);
                if cdf_x < COND_GUARD {
                    return Err(Error::ConditioningDegenerate(format!(
                        "P(X <= {x}) below guard threshold"
                    )));
                }
                let num = special::norm_sf(y) - special::bvn_sf(x, y, rho);
                Ok((num / cdf_x).clamp(0.0, 1.0))
            }
        }
    }

    /// `log F2(y | x)`, exact for the logistic family and `log1p`-based
    /// otherwise; feeds the `F2^{n-k-1}` powers of the finite-sample oracle.
    pub fn f2_log(&self, y: f64, x: f64) -> Result<f64> {
        match *self {
            ModelSpec::LogisticFrechet { gamma } => {
                self.check_support(x, y)?;
                Ok(1.0 / x - logistic_v(gamma, x, y))
            }
            _ => Ok((-self.f2_complement(y, x)?).ln_1p()),
        }
    }

    /// `F3(y | x) = P(Y ≤ y | X = x)`, from the analytic `∂F/∂x`.
    pub fn f3(&self, y: f64, x: f64) -> Result<f64> {
        self.check_support(x, y)?;
        Ok(match *self {
            ModelSpec::SurvivalClaytonPareto { theta, .. } => {
                let tx = frechet_sf(x).powf(-theta);
                let ty = frechet_sf(y).powf(-theta);
                let s = (ty - 1.0) / tx;
                1.0 - (1.0 + s).powf(-(1.0 + 1.0 / theta))
            }
            ModelSpec::LogisticFrechet { gamma } => {
                let a = x.powf(-1.0 / gamma);
                let b = y.powf(-1.0 / gamma);
                let v = (a + b).powf(gamma);
                (1.0 / x - v).exp() * (a / (a + b)).powf(1.0 - gamma)
            }
            ModelSpec::GaussianBivariate { rho } => {
                special::norm_cdf((y - rho * x) / (1.0 - rho * rho).sqrt())
            }
        })
    }

    /// Bivariate slowly varying factor `ℒ(x, y)` of the joint tail.
    pub fn bsv_factor(&self, x: f64, y: f64) -> Result<f64> {
        self.require_positive(x, y)?;
        match *self {
            ModelSpec::SurvivalClaytonPareto { theta, .. } => {
                let base = x.powf(theta) + y.powf(theta) - 1.0;
                if base <= 0.0 {
                    return Err(Error::Domain(format!(
                        "({x}, {y}) below the joint-tail regime of the factorization"
                    )));
                }
                Ok(base.powf(-1.0 / theta) * (x * y).sqrt())
            }
            ModelSpec::LogisticFrechet { gamma } => {
                Ok((x + y) / (x * y).sqrt() - (x * y).sqrt() * logistic_v(gamma, x, y))
            }
            ModelSpec::GaussianBivariate { .. } => Err(Error::UnsupportedFamily(
                "the Gaussian slowly varying factor has no nondegenerate limit".into(),
            )),
        }
    }

    /// Scaling limit `c̃(x, y) = lim_n ℒ(nx, ny)`; homogeneous of degree 0.
    pub fn bsv_limit(&self, x: f64, y: f64) -> Result<f64> {
        self.require_positive(x, y)?;
        match *self {
            ModelSpec::SurvivalClaytonPareto { theta, .. } => {
                Ok((x.powf(theta) + y.powf(theta)).powf(-1.0 / theta) * (x * y).sqrt())
            }
            ModelSpec::LogisticFrechet { gamma } => {
                Ok((x + y) / (x * y).sqrt() - (x * y).sqrt() * logistic_v(gamma, x, y))
            }
            ModelSpec::GaussianBivariate { .. } => Err(Error::UnsupportedFamily(
                "the Gaussian slowly varying factor has no nondegenerate limit".into(),
            )),
        }
    }

    /// Analytic `∂c̃/∂x`.
    pub fn bsv_limit_dx(&self, x: f64, y: f64) -> Result<f64> {
        self.require_positive(x, y)?;
        match *self {
            ModelSpec::SurvivalClaytonPareto { theta, .. } => {
                let c = self.bsv_limit(x, y)?;
                Ok(c / x * (0.5 - 1.0 / (1.0 + (y / x).powf(theta))))
            }
            ModelSpec::LogisticFrechet { gamma } => {
                let a = x.powf(-1.0 / gamma);
                let b = y.powf(-1.0 / gamma);
                let s = a + b;
                let v = s.powf(gamma);
                Ok(0.5 / (x * y).sqrt()
                    * (1.0 - y / x - y * v + 2.0 * y * a * s.powf(gamma - 1.0)))
            }
            ModelSpec::GaussianBivariate { .. } => Err(Error::UnsupportedFamily(
                "the Gaussian slowly varying factor has no nondegenerate limit".into(),
            )),
        }
    }

    /// Normalized limit `r(x, y) = c̃(x, y) / λ_u`; satisfies `r(x, x) = 1`.
    pub fn bsv_ratio(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.bsv_limit(x, y)? / self.tail_summary().lambda_u)
    }

    /// Analytic `∂r/∂x`.
    pub fn bsv_ratio_dx(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.bsv_limit_dx(x, y)? / self.tail_summary().lambda_u)
    }

    pub fn tail_summary(&self) -> TailSummary {
        match *self {
            ModelSpec::SurvivalClaytonPareto { theta, .. } => TailSummary {
                alpha: 0.5,
                beta: 0.5,
                eta: 1.0,
                lambda_u: 2f64.powf(-1.0 / theta),
                asymptotically_dependent: true,
            },
            ModelSpec::LogisticFrechet { gamma } => TailSummary {
                alpha: 0.5,
                beta: 0.5,
                eta: 1.0,
                lambda_u: 2.0 - 2f64.powf(gamma),
                asymptotically_dependent: true,
            },
            ModelSpec::GaussianBivariate { rho } => TailSummary {
                alpha: 1.0 / (1.0 + rho),
                beta: 1.0 / (1.0 + rho),
                eta: (1.0 + rho) / 2.0,
                lambda_u: 0.0,
                asymptotically_dependent: false,
            },
        }
    }

    fn require_positive(&self, x: f64, y: f64) -> Result<()> {
        if x.is_nan() || y.is_nan() || x <= 0.0 || y <= 0.0 {
            return Err(Error::Domain(format!(
                "slowly varying factor needs x, y > 0, got ({x}, {y})"
            )));
        }
        Ok(())
    }
}

/// Fréchet marginal survival `1 - e^{-1/x}`, accurate for large `x`.
#[inline]
fn frechet_sf(x: f64) -> f64 {
    -(-1.0 / x).exp_m1()
}

/// Joint survival of the survival-Clayton pair on the Fréchet scale.
#[inline]
fn clayton_joint_survival(theta: f64, x: f64, y: f64) -> f64 {
    let a = frechet_sf(x).powf(-theta) + frechet_sf(y).powf(-theta) - 1.0;
    a.powf(-1.0 / theta)
}

/// Logistic exponent measure `V(x, y) = (x^{-1/γ} + y^{-1/γ})^γ`.
#[inline]
fn logistic_v(gamma: f64, x: f64, y: f64) -> f64 {
    let s = x.powf(-1.0 / gamma) + y.powf(-1.0 / gamma);
    if s == 0.0 {
        0.0
    } else {
        s.powf(gamma)
    }
}
