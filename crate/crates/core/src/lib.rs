//! Moment formulas and moment-ratio functions for the Weibull, Gamma and
//! Log-normal families.
//!
//! For each family the root moment `E(X^i)^(1/i)` is non-decreasing in `i`.
//! The quantities that carry this ordering,
//!
//! * `ln R = m ln E(X^n) - n ln E(X^m)` for Weibull and Gamma, and
//! * `ln G = ln E(X^n)^(1/n) - ln E(X^m)^(1/m)` for Log-normal,
//!
//! depend on a single parameter (the shape `k`/`alpha`, or `sigma`), because
//! the scale `lambda`/`beta` and the log-location `mu` cancel. The crate
//! exposes those functions ([`ratio`]), numerical sweeps that check the
//! ordering and its supporting inequalities ([`verification`]), and
//! estimators that invert the single-parameter ratio by monotone bisection
//! and back-solve the cancelled parameter ([`estimation`]).

pub mod distributions;
pub mod error;
pub mod estimation;
pub mod quadrature;
pub mod ratio;
pub mod specfn;
pub mod verification;

pub use distributions::{
    DistributionParams, Family, GammaParams, LogNormalParams, OrderPair, WeibullParams,
};
pub use error::{Error, Result};
pub use estimation::{BisectionConfig, EstimateResult, SampleMoments};
pub use quadrature::QuadratureConfig;
pub use ratio::RatioDiagnostics;
pub use verification::{FullSweepReport, SweepGrid, SweepReport, SweepSettings, ViolationRecord};
