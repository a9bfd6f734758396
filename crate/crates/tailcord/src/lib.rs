//! Simulation and asymptotic validation of concomitants of order statistics
//! under bivariate extremal dependence.
//!
//! Given an i.i.d. bivariate sample, order the first coordinates and carry
//! each second coordinate along with its partner (the *concomitants*). For a
//! split size `k`, `V1` is the maximum of the concomitants of the top-`k`
//! order statistics and `V2` the maximum of the remaining `n - k`. This crate
//! provides:
//!
//! * exact joint/conditional distributions for three bivariate families
//!   (survival-Clayton with Pareto-Lomax margins, symmetric logistic with
//!   unit Fréchet margins, bivariate Gaussian) — [`models`];
//! * deterministic, stream-splittable samplers for all three families,
//!   including a positive-stable construction and exact tail-conditioned
//!   Gaussian sampling — [`sampler`];
//! * the order-statistic / concomitant machinery and a multi-replicate
//!   harness — [`concomitants`];
//! * the asymptotic joint law of `(V1, V2)` via adaptive quadrature and the
//!   exact finite-sample oracle — [`asymptotics`];
//! * Gaussian norming constants and conditional tail limits — [`gaussian`];
//! * empirical cdfs, tail-dependence estimation and validation reports —
//!   [`empirics`].

pub mod asymptotics;
pub mod concomitants;
pub mod empirics;
mod error;
pub mod gaussian;
pub mod models;
pub mod quad;
pub mod sampler;
pub mod special;

pub use error::{Error, Result};
pub use models::{ModelSpec, Scale, TailSummary};
pub use quad::{Quadrature, QuadratureConfig, Substitution};
pub use sampler::{BivariateBatch, SeedSpec};
