//! Moment-ratio functions.
//!
//! For Weibull and Gamma the ratio `R = E(X^n)^m / E(X^m)^n` is handled as
//! `ln R`; the scale parameter drops out, leaving a function of the shape
//! only. For the Log-normal the gap `G = E(X^n)^(1/n) / E(X^m)^(1/m)` is used
//! and `mu` drops out. `ln R >= 0` (resp. `ln G >= 0`) is exactly the
//! statement that the root moment is non-decreasing in the order.

use serde::{Deserialize, Serialize};

use crate::distributions::{log_moment, DistributionParams, Family, OrderPair};
use crate::error::{Error, Result};
use crate::specfn::{
    digamma_unchecked, log_gamma_ratio_unchecked, log_gamma_unchecked,
    stirling_log_gamma_ratio_unchecked,
};

/// Smallest `alpha` accepted by [`gamma_stirling_log_ratio`].
pub const STIRLING_MIN_ALPHA: f64 = 10.0;

/// Ratio value and shape-derivative at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioDiagnostics {
    pub family: Family,
    /// `ln R` (Weibull, Gamma) or `ln G` (Log-normal).
    pub log_ratio: f64,
    /// Derivative of `log_ratio` with respect to `shape_value`.
    pub derivative: f64,
    /// `k`, `alpha` or `sigma`.
    pub shape_value: f64,
    pub orders: OrderPair,
}

fn check_shape(function: &'static str, shape: f64, orders: &OrderPair) -> Result<()> {
    if !(shape.is_finite() && shape > 0.0) {
        return Err(Error::domain(function, shape, "shape parameter must be positive"));
    }
    orders.validate()
}

/// `ln R = m ln Γ(1 + n/k) - n ln Γ(1 + m/k)`. No `lambda` argument: it
/// cancels.
pub fn weibull_log_ratio(k: f64, orders: OrderPair) -> Result<f64> {
    check_shape("weibull_log_ratio", k, &orders)?;
    let OrderPair { n, m } = orders;
    Ok(m * log_gamma_unchecked(1.0 + n / k) - n * log_gamma_unchecked(1.0 + m / k))
}

/// `d(ln R)/dk = (mn / k²) [ψ(1 + m/k) - ψ(1 + n/k)]`.
///
/// Same sign as `dR/dk` because `R > 0`.
pub fn weibull_ratio_derivative(k: f64, orders: OrderPair) -> Result<f64> {
    let margin = digamma_inequality_margin(k, orders)?;
    let OrderPair { n, m } = orders;
    Ok(m * n / (k * k) * margin)
}

/// `ψ(1 + m/k) - ψ(1 + n/k)`.
///
/// This is `Γ(1+n/k)Γ′(1+m/k) - Γ(1+m/k)Γ′(1+n/k)` divided by the positive
/// product `Γ(1+n/k)Γ(1+m/k)`, so both have the same sign.
pub fn digamma_inequality_margin(k: f64, orders: OrderPair) -> Result<f64> {
    check_shape("digamma_inequality_margin", k, &orders)?;
    let OrderPair { n, m } = orders;
    Ok(digamma_unchecked(1.0 + m / k) - digamma_unchecked(1.0 + n / k))
}

/// `ln R = m ln Γ(n + alpha) - n ln Γ(m + alpha) + (n - m) ln Γ(alpha)`.
/// No `beta` argument: it cancels.
///
/// Evaluated as `m D(n) - n D(m)` with `D(h) = ln Γ(alpha + h) - ln Γ(alpha)`
/// so large `alpha` does not cancel digits between terms of size
/// `alpha ln alpha`.
pub fn gamma_log_ratio(alpha: f64, orders: OrderPair) -> Result<f64> {
    check_shape("gamma_log_ratio", alpha, &orders)?;
    let OrderPair { n, m } = orders;
    Ok(m * log_gamma_ratio_unchecked(alpha, n) - n * log_gamma_ratio_unchecked(alpha, m))
}

/// `m ψ(n + alpha) - n ψ(m + alpha) + (n - m) ψ(alpha)`, which is
/// `d(ln R)/d(alpha)`.
pub fn gamma_log_ratio_derivative(alpha: f64, orders: OrderPair) -> Result<f64> {
    check_shape("gamma_log_ratio_derivative", alpha, &orders)?;
    let OrderPair { n, m } = orders;
    Ok(m * digamma_unchecked(n + alpha) - n * digamma_unchecked(m + alpha)
        + (n - m) * digamma_unchecked(alpha))
}

/// [`gamma_log_ratio`] with every Γ replaced by the leading Stirling form
/// `s(x) = ln(2π)/2 + (x - 1/2) ln x - x`. Only defined for
/// `alpha >= 10`.
pub fn gamma_stirling_log_ratio(alpha: f64, orders: OrderPair) -> Result<f64> {
    if !(alpha.is_finite() && alpha >= STIRLING_MIN_ALPHA) {
        return Err(Error::domain(
            "gamma_stirling_log_ratio",
            alpha,
            "Stirling regime requires alpha >= 10",
        ));
    }
    orders.validate()?;
    let OrderPair { n, m } = orders;
    Ok(m * stirling_log_gamma_ratio_unchecked(alpha, n)
        - n * stirling_log_gamma_ratio_unchecked(alpha, m))
}

/// `ln G = sigma² (n - m) / 2`. No `mu` argument: it cancels.
pub fn lognormal_log_gap(sigma: f64, orders: OrderPair) -> Result<f64> {
    check_shape("lognormal_log_gap", sigma, &orders)?;
    let OrderPair { n, m } = orders;
    Ok(0.5 * sigma * sigma * (n - m))
}

/// The family's single-parameter ratio function.
pub fn log_ratio(family: Family, shape: f64, orders: OrderPair) -> Result<f64> {
    match family {
        Family::Weibull => weibull_log_ratio(shape, orders),
        Family::Gamma => gamma_log_ratio(shape, orders),
        Family::LogNormal => lognormal_log_gap(shape, orders),
    }
}

/// Derivative of [`log_ratio`] with respect to the shape parameter.
pub fn log_ratio_derivative(family: Family, shape: f64, orders: OrderPair) -> Result<f64> {
    match family {
        Family::Weibull => weibull_ratio_derivative(shape, orders),
        Family::Gamma => gamma_log_ratio_derivative(shape, orders),
        Family::LogNormal => {
            check_shape("lognormal_log_gap", shape, &orders)?;
            Ok(shape * (orders.n - orders.m))
        }
    }
}

/// The same statistic as [`log_ratio`], rebuilt from the two full log-moments
/// (nuisance parameter included).
pub fn moment_log_ratio(params: &DistributionParams, orders: OrderPair) -> Result<f64> {
    orders.validate()?;
    let OrderPair { n, m } = orders;
    let ln_n = log_moment(params, n)?;
    let ln_m = log_moment(params, m)?;
    Ok(match params.family() {
        Family::Weibull | Family::Gamma => m * ln_n - n * ln_m,
        Family::LogNormal => ln_n / n - ln_m / m,
    })
}

pub fn diagnostics(family: Family, shape: f64, orders: OrderPair) -> Result<RatioDiagnostics> {
    Ok(RatioDiagnostics {
        family,
        log_ratio: log_ratio(family, shape, orders)?,
        derivative: log_ratio_derivative(family, shape, orders)?,
        shape_value: shape,
        orders,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{LN_2, PI};

    fn pair(n: f64, m: f64) -> OrderPair {
        OrderPair::new(n, m).unwrap()
    }

    fn central_difference<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn weibull_log_ratio_examples() {
        assert_relative_eq!(weibull_log_ratio(1.0, pair(2.0, 1.0)).unwrap(), LN_2, epsilon = 1e-14);
        assert!(weibull_log_ratio(1e8, pair(3.0, 2.0)).unwrap().abs() <= 1e-6);
        // Γ(1.5) = sqrt(pi)/2, so ln(Γ(2) / Γ(1.5)²) = ln(4/pi).
        assert_relative_eq!(
            weibull_log_ratio(2.0, pair(2.0, 1.0)).unwrap(),
            (4.0 / PI).ln(),
            epsilon = 1e-14
        );
        assert!((weibull_log_ratio(2.0, pair(2.0, 1.0)).unwrap() - 0.241_564_475_2).abs() < 1e-10);
    }

    #[test]
    fn weibull_derivative_examples() {
        assert!((weibull_ratio_derivative(1.0, pair(2.0, 1.0)).unwrap() + 1.0).abs() < 1e-13);
        let orders = pair(3.0, 1.0);
        let fd = central_difference(|k| weibull_log_ratio(k, orders).unwrap(), 2.0, 1e-6);
        assert!((weibull_ratio_derivative(2.0, orders).unwrap() - fd).abs() < 1e-5);
    }

    #[test]
    fn digamma_margin_examples() {
        assert!((digamma_inequality_margin(1.0, pair(2.0, 1.0)).unwrap() + 0.5).abs() < 1e-13);
        assert!(digamma_inequality_margin(0.5, pair(4.0, 1.0)).unwrap() < 0.0);
        let near = digamma_inequality_margin(1.0, pair(1.0 + 1e-9, 1.0)).unwrap();
        assert!(near < 0.0 && near.abs() < 1e-8);
        // First order in 1/k: margin ~ -(n - m) ψ′(1) / k = -0.01645; the
        // second-order term is ~3.6e-4. mpmath: ψ(1.01) - ψ(1.02).
        let margin = digamma_inequality_margin(100.0, pair(2.0, 1.0)).unwrap();
        assert!((margin + 0.016_449_34).abs() < 5e-4, "{margin}");
        assert!((margin + 0.016_096_147_412_494_7).abs() < 1e-12, "{margin}");
    }

    #[test]
    fn gamma_log_ratio_examples() {
        // Γ(2+α)Γ(α)/Γ(1+α)² = (1+α)/α.
        assert_relative_eq!(gamma_log_ratio(1.0, pair(2.0, 1.0)).unwrap(), LN_2, epsilon = 1e-14);
        assert_relative_eq!(
            gamma_log_ratio(2.0, pair(2.0, 1.0)).unwrap(),
            1.5f64.ln(),
            epsilon = 1e-14
        );
        let alpha: f64 = 1e6;
        let expected = (1.0 / alpha).ln_1p();
        assert!((gamma_log_ratio(alpha, pair(2.0, 1.0)).unwrap() - expected).abs() < 1e-13);
    }

    #[test]
    fn gamma_derivative_examples() {
        assert!((gamma_log_ratio_derivative(1.0, pair(2.0, 1.0)).unwrap() + 0.5).abs() < 1e-13);
        let orders = pair(4.0, 2.0);
        let fd = central_difference(|a| gamma_log_ratio(a, orders).unwrap(), 3.0, 1e-6);
        assert!((gamma_log_ratio_derivative(3.0, orders).unwrap() - fd).abs() < 1e-5);
    }

    #[test]
    fn stirling_examples() {
        let orders = pair(2.0, 1.0);
        let exact = gamma_log_ratio(1e6, orders).unwrap();
        assert!((gamma_stirling_log_ratio(1e6, orders).unwrap() - exact).abs() < 1e-9);
        let at10 = (gamma_stirling_log_ratio(10.0, orders).unwrap()
            - gamma_log_ratio(10.0, orders).unwrap())
        .abs();
        assert!(at10 < 5e-3);
        let at100 = (gamma_stirling_log_ratio(100.0, orders).unwrap()
            - gamma_log_ratio(100.0, orders).unwrap())
        .abs();
        assert!(at100 < at10);
        assert!(gamma_stirling_log_ratio(9.9, orders).is_err());
    }

    #[test]
    fn lognormal_gap_examples() {
        assert_eq!(lognormal_log_gap(1.0, pair(2.0, 1.0)).unwrap(), 0.5);
        assert_eq!(lognormal_log_gap(2.0, pair(5.0, 2.0)).unwrap(), 6.0);
        assert!(lognormal_log_gap(1.0, pair(1.0 + 1e-9, 1.0)).unwrap() < 1e-9);
    }

    #[test]
    fn domain_errors() {
        let orders = pair(2.0, 1.0);
        assert!(weibull_log_ratio(0.0, orders).is_err());
        assert!(weibull_ratio_derivative(-1.0, orders).is_err());
        assert!(digamma_inequality_margin(0.0, orders).is_err());
        assert!(gamma_log_ratio(0.0, orders).is_err());
        assert!(gamma_log_ratio_derivative(-2.0, orders).is_err());
        assert!(lognormal_log_gap(0.0, orders).is_err());
        let bad = OrderPair { n: 1.0, m: 2.0 };
        assert!(matches!(weibull_log_ratio(1.0, bad), Err(Error::InvalidOrders { .. })));
    }

    #[test]
    fn moment_built_ratio_matches_shape_only_ratio() {
        let orders = pair(3.0, 1.5);
        for nuisance in [0.1, 1.0, 10.0] {
            let w = DistributionParams::weibull(0.7, nuisance).unwrap();
            let g = DistributionParams::gamma(4.0, nuisance).unwrap();
            assert!(
                (moment_log_ratio(&w, orders).unwrap() - weibull_log_ratio(0.7, orders).unwrap())
                    .abs()
                    < 1e-9
            );
            assert!(
                (moment_log_ratio(&g, orders).unwrap() - gamma_log_ratio(4.0, orders).unwrap())
                    .abs()
                    < 1e-9
            );
        }
        for mu in [-2.0, 0.0, 2.0] {
            let ln = DistributionParams::lognormal(mu, 0.8).unwrap();
            assert!(
                (moment_log_ratio(&ln, orders).unwrap() - lognormal_log_gap(0.8, orders).unwrap())
                    .abs()
                    < 1e-9
            );
        }
    }

    #[test]
    fn diagnostics_bundle() {
        let d = diagnostics(Family::Weibull, 1.0, pair(2.0, 1.0)).unwrap();
        assert_relative_eq!(d.log_ratio, LN_2, epsilon = 1e-14);
        assert!((d.derivative + 1.0).abs() < 1e-13);
        let d = diagnostics(Family::LogNormal, 2.0, pair(3.0, 1.0)).unwrap();
        assert_eq!(d.derivative, 4.0);
    }
}
