//! Shape/scale estimators built on the cancellation of the nuisance
//! parameter from the moment ratio.
//!
//! The sample statistic `t = m ln M_n - n ln M_m` depends on the shape alone,
//! and the ratio functions are strictly decreasing in the shape, so the
//! shape is found by bisection on a single monotone function. The cancelled
//! parameter is then back-solved from the lower-order moment.

use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionParams, Family, OrderPair};
use crate::error::{Error, Result};
use crate::ratio::{gamma_log_ratio, lognormal_log_gap, weibull_log_ratio};
use crate::specfn::{log_gamma_ratio_unchecked, log_gamma_unchecked};

/// Geometric growth factor per bracket expansion step.
const EXPANSION_FACTOR: f64 = 4.0;
const MAX_EXPANSIONS: usize = 60;

/// Empirical raw moments of orders `n` and `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleMoments {
    pub m_n: f64,
    pub m_m: f64,
    pub orders: OrderPair,
    pub count: usize,
}

impl SampleMoments {
    pub fn new(m_n: f64, m_m: f64, orders: OrderPair, count: usize) -> Result<Self> {
        let s = Self {
            m_n,
            m_m,
            orders,
            count,
        };
        s.validate()?;
        Ok(s)
    }

    /// Moments of a data set.
    pub fn from_data(data: &[f64], orders: OrderPair) -> Result<Self> {
        orders.validate()?;
        let m_n = empirical_moment(data, orders.n)?;
        let m_m = empirical_moment(data, orders.m)?;
        Self::new(m_n, m_m, orders, data.len())
    }

    pub fn validate(&self) -> Result<()> {
        self.orders.validate()?;
        for (name, v) in [("m_n", self.m_n), ("m_m", self.m_m)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Data(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.count < 2 {
            return Err(Error::Data(format!("need at least 2 observations, got {}", self.count)));
        }
        Ok(())
    }

    fn log_ratio_scale(&self) -> f64 {
        let OrderPair { n, m } = self.orders;
        m * self.m_n.ln().abs().max(1.0) + n * self.m_m.ln().abs().max(1.0)
    }

    fn log_gap_scale(&self) -> f64 {
        let OrderPair { n, m } = self.orders;
        self.m_n.ln().abs().max(1.0) / n + self.m_m.ln().abs().max(1.0) / m
    }

    /// `m ln M_n - n ln M_m`, the sample analogue of `ln R`.
    pub fn log_ratio_statistic(&self) -> f64 {
        let OrderPair { n, m } = self.orders;
        m * self.m_n.ln() - n * self.m_m.ln()
    }

    /// `ln M_n / n - ln M_m / m`, the sample analogue of `ln G`.
    pub fn log_gap_statistic(&self) -> f64 {
        let OrderPair { n, m } = self.orders;
        self.m_n.ln() / n - self.m_m.ln() / m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BisectionConfig {
    /// Stop once the bracket is narrower than this.
    pub abs_tol: f64,
    /// Required bound on `|g(x) - target|` at the returned point.
    pub residual_tol: f64,
    pub max_iterations: usize,
    pub initial_bracket: (f64, f64),
}

impl BisectionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.residual_tol > 0.0) {
            return Err(Error::Config("bisection tolerances must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        let (lo, hi) = self.initial_bracket;
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(Error::Config(format!(
                "initial bracket must satisfy 0 < lo < hi, got ({lo}, {hi})"
            )));
        }
        Ok(())
    }
}

impl Default for BisectionConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            residual_tol: 1e-10,
            max_iterations: 200,
            initial_bracket: (1e-2, 1e2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSolution {
    pub x: f64,
    /// `|g(x) - target|`.
    pub residual: f64,
    pub iterations: usize,
    /// Straddling bracket after expansion, before bisection.
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub params: DistributionParams,
    /// `|ratio(shape) - target|` at the fitted shape.
    pub residual: f64,
    pub iterations: usize,
    /// `None` for the closed-form Log-normal fit.
    pub bracket_used: Option<(f64, f64)>,
}

/// `(1/N) Σ x^i` with Neumaier-compensated summation.
pub fn empirical_moment(data: &[f64], i: f64) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::Data("empty data".into()));
    }
    if !(i.is_finite() && i > 0.0) {
        return Err(Error::Domain {
            function: "empirical_moment",
            value: i,
            reason: "moment order must be positive and finite",
        });
    }
    let mut sum = 0.0f64;
    let mut compensation = 0.0f64;
    for (idx, &x) in data.iter().enumerate() {
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::Data(format!(
                "entry {idx} is {x}; values must be positive and finite"
            )));
        }
        let term = x.powf(i);
        let t = sum + term;
        if sum.abs() >= term.abs() {
            compensation += (sum - t) + term;
        } else {
            compensation += (term - t) + sum;
        }
        sum = t;
    }
    Ok((sum + compensation) / data.len() as f64)
}

/// Finds `x` with `g(x) = target` for a strictly decreasing `g` on `(0, inf)`.
///
/// The initial bracket is widened geometrically (x4 per side, at most 60
/// steps) until `g(lo) >= target >= g(hi)`; the bracket is then halved,
/// geometrically while it spans more than a factor of four and
/// arithmetically after, until it is narrower than `abs_tol` or can no
/// longer be split.
pub fn solve_monotone_decreasing<G>(g: G, target: f64, cfg: &BisectionConfig) -> Result<RootSolution>
where
    G: Fn(f64) -> f64,
{
    cfg.validate()?;
    if !target.is_finite() {
        return Err(Error::Config(format!("target must be finite, got {target}")));
    }
    let (mut lo, mut hi) = cfg.initial_bracket;
    let mut g_lo = g(lo);
    let mut g_hi = g(hi);
    let mut expansions = 0;
    while !(g_lo >= target && g_hi <= target) {
        if expansions == MAX_EXPANSIONS || g_lo.is_nan() || g_hi.is_nan() {
            return Err(Error::BracketFailure { lo, hi, target });
        }
        if g_lo < target {
            lo /= EXPANSION_FACTOR;
            g_lo = g(lo);
        }
        if g_hi > target {
            hi *= EXPANSION_FACTOR;
            g_hi = g(hi);
        }
        expansions += 1;
    }
    let bracket = (lo, hi);

    let mut iterations = 0;
    loop {
        let width_ok = hi - lo <= cfg.abs_tol;
        let mid = if hi > EXPANSION_FACTOR * lo {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        let exhausted = mid <= lo || mid >= hi;
        if width_ok || exhausted {
            // Report whichever of the final points fits best.
            let (x, residual) = [lo, 0.5 * (lo + hi), hi]
                .into_iter()
                .map(|x| (x, (g(x) - target).abs()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("three candidates");
            if residual <= cfg.residual_tol {
                return Ok(RootSolution {
                    x,
                    residual,
                    iterations,
                    bracket,
                });
            }
            return Err(Error::NonConvergence {
                iterations,
                residual,
            });
        }
        if iterations >= cfg.max_iterations {
            let residual = (g(mid) - target).abs();
            return Err(Error::NonConvergence {
                iterations,
                residual,
            });
        }
        iterations += 1;
        let g_mid = g(mid);
        if g_mid == target {
            return Ok(RootSolution {
                x: mid,
                residual: 0.0,
                iterations,
                bracket,
            });
        }
        if g_mid > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Relative rounding budget for the moment statistics.
const STATISTIC_ROUNDING: f64 = 64.0 * f64::EPSILON;

/// Rejects statistics at or below zero, counting values within rounding of
/// zero (`scale` is the magnitude of the terms that cancelled) as zero:
/// constant data reach the boundary only up to the last few ulps.
fn require_identifiable(statistic: f64, scale: f64) -> Result<f64> {
    if statistic.is_finite() && statistic > STATISTIC_ROUNDING * scale {
        Ok(statistic)
    } else {
        Err(Error::NonIdentifiable { statistic })
    }
}

/// Weibull fit: `k` from `weibull_log_ratio(k) = t`, then
/// `lambda = exp[(ln M_m - ln Γ(1 + m/k)) / m]`.
pub fn fit_weibull(moments: &SampleMoments, cfg: &BisectionConfig) -> Result<EstimateResult> {
    moments.validate()?;
    let orders = moments.orders;
    let target = require_identifiable(moments.log_ratio_statistic(), moments.log_ratio_scale())?;
    let sol = solve_monotone_decreasing(
        |k| weibull_log_ratio(k, orders).unwrap_or(f64::NAN),
        target,
        cfg,
    )?;
    let k = sol.x;
    let lambda = ((moments.m_m.ln() - log_gamma_unchecked(1.0 + orders.m / k)) / orders.m).exp();
    Ok(EstimateResult {
        params: DistributionParams::weibull(k, lambda)?,
        residual: sol.residual,
        iterations: sol.iterations,
        bracket_used: Some(sol.bracket),
    })
}

/// Gamma fit: `alpha` from `gamma_log_ratio(alpha) = t`, then
/// `beta = exp[(ln M_m - ln Γ(m + alpha) + ln Γ(alpha)) / m]`.
pub fn fit_gamma(moments: &SampleMoments, cfg: &BisectionConfig) -> Result<EstimateResult> {
    moments.validate()?;
    let orders = moments.orders;
    let target = require_identifiable(moments.log_ratio_statistic(), moments.log_ratio_scale())?;
    let sol = solve_monotone_decreasing(
        |a| gamma_log_ratio(a, orders).unwrap_or(f64::NAN),
        target,
        cfg,
    )?;
    let alpha = sol.x;
    let beta = ((moments.m_m.ln() - log_gamma_ratio_unchecked(alpha, orders.m)) / orders.m).exp();
    Ok(EstimateResult {
        params: DistributionParams::gamma(alpha, beta)?,
        residual: sol.residual,
        iterations: sol.iterations,
        bracket_used: Some(sol.bracket),
    })
}

/// Log-normal fit in closed form: `sigma² = 2 ln G / (n - m)`,
/// `mu = ln M_m / m - sigma² m / 2`.
pub fn fit_lognormal(moments: &SampleMoments) -> Result<EstimateResult> {
    moments.validate()?;
    let OrderPair { n, m } = moments.orders;
    let log_gap = require_identifiable(moments.log_gap_statistic(), moments.log_gap_scale())?;
    let sigma_sq = 2.0 * log_gap / (n - m);
    let sigma = sigma_sq.sqrt();
    let mu = moments.m_m.ln() / m - 0.5 * sigma_sq * m;
    let residual = (lognormal_log_gap(sigma, moments.orders)? - log_gap).abs();
    Ok(EstimateResult {
        params: DistributionParams::lognormal(mu, sigma)?,
        residual,
        iterations: 0,
        bracket_used: None,
    })
}

pub fn fit_moments(
    family: Family,
    moments: &SampleMoments,
    cfg: &BisectionConfig,
) -> Result<EstimateResult> {
    match family {
        Family::Weibull => fit_weibull(moments, cfg),
        Family::Gamma => fit_gamma(moments, cfg),
        Family::LogNormal => fit_lognormal(moments),
    }
}

/// Empirical moments of `data` followed by the family fit.
pub fn fit_from_data(
    data: &[f64],
    family: Family,
    orders: OrderPair,
    cfg: &BisectionConfig,
) -> Result<EstimateResult> {
    let moments = SampleMoments::from_data(data, orders)?;
    fit_moments(family, &moments, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{moment, sample};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn pair(n: f64, m: f64) -> OrderPair {
        OrderPair::new(n, m).unwrap()
    }

    fn exact_moments(p: &DistributionParams, orders: OrderPair) -> SampleMoments {
        SampleMoments::new(
            moment(p, orders.n).unwrap(),
            moment(p, orders.m).unwrap(),
            orders,
            1_000,
        )
        .unwrap()
    }

    #[test]
    fn empirical_moment_examples() {
        assert_eq!(empirical_moment(&[1.0, 1.0, 1.0, 1.0], 3.0).unwrap(), 1.0);
        assert_eq!(empirical_moment(&[1.0, 2.0], 2.0).unwrap(), 2.5);
        assert_relative_eq!(
            empirical_moment(&[0.5, 2.0, 4.0], 1.0).unwrap(),
            2.166_666_666_7,
            epsilon = 1e-10
        );
    }

    #[test]
    fn empirical_moment_rejects_bad_data() {
        assert!(matches!(empirical_moment(&[], 1.0), Err(Error::Data(_))));
        assert!(matches!(empirical_moment(&[1.0, -2.0], 1.0), Err(Error::Data(_))));
        assert!(matches!(empirical_moment(&[1.0, 0.0], 1.0), Err(Error::Data(_))));
        assert!(matches!(empirical_moment(&[1.0, f64::NAN], 1.0), Err(Error::Data(_))));
        assert!(empirical_moment(&[1.0], 0.0).is_err());
    }

    #[test]
    fn compensated_sum_is_order_independent() {
        let mut data: Vec<f64> = (1..=10_000).map(|j| 1.0 + 1e-3 * j as f64).collect();
        data.push(1e8);
        let forward = empirical_moment(&data, 1.0).unwrap();
        data.reverse();
        let backward = empirical_moment(&data, 1.0).unwrap();
        assert!(((forward - backward) / forward).abs() <= 1e-14);
    }

    #[test]
    fn solver_inverts_reciprocal() {
        let cfg = BisectionConfig::default();
        let sol = solve_monotone_decreasing(|x| 1.0 / x, 0.25, &cfg).unwrap();
        assert!((sol.x - 4.0).abs() <= 1e-11);
        assert!(sol.residual <= cfg.residual_tol);
    }

    #[test]
    fn solver_expands_bracket_geometrically() {
        let cfg = BisectionConfig::default();
        // Root at 1e5, outside the default (1e-2, 1e2) bracket.
        let sol = solve_monotone_decreasing(|x| 1e5 / x, 1.0, &cfg).unwrap();
        assert!((sol.x - 1e5).abs() < 1e-6);
        assert!(sol.bracket.1 >= 1e5 && sol.bracket.1 <= 4e5);
        assert_eq!(sol.bracket.0, 1e-2);
    }

    #[test]
    fn solver_reports_unreachable_target() {
        let cfg = BisectionConfig::default();
        // exp(-x) never reaches 2 on (0, inf).
        let err = solve_monotone_decreasing(|x| (-x).exp(), 2.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::BracketFailure { .. }));
    }

    #[test]
    fn solver_reports_iteration_budget() {
        let cfg = BisectionConfig {
            max_iterations: 3,
            ..BisectionConfig::default()
        };
        let err = solve_monotone_decreasing(|x| 1.0 / x, 0.3, &cfg).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { iterations: 3, .. }));
    }

    #[test]
    fn solver_inverts_ratio_functions() {
        let cfg = BisectionConfig::default();
        let orders = pair(2.0, 1.0);
        let k = solve_monotone_decreasing(
            |k| weibull_log_ratio(k, orders).unwrap(),
            (4.0 / PI).ln(),
            &cfg,
        )
        .unwrap();
        assert!((k.x - 2.0).abs() < 1e-8);
        let a = solve_monotone_decreasing(
            |a| gamma_log_ratio(a, orders).unwrap(),
            1.5f64.ln(),
            &cfg,
        )
        .unwrap();
        assert!((a.x - 2.0).abs() < 1e-8);
    }

    #[test]
    fn fit_weibull_examples() {
        let cfg = BisectionConfig::default();
        let orders = pair(2.0, 1.0);
        let m = SampleMoments::new(1.0, PI.sqrt() / 2.0, orders, 100).unwrap();
        let fit = fit_weibull(&m, &cfg).unwrap();
        assert_relative_eq!(fit.params.shape(), 2.0, max_relative = 1e-8);
        assert_relative_eq!(fit.params.nuisance(), 1.0, max_relative = 1e-8);

        let m = SampleMoments::new(18.0, 3.0, orders, 100).unwrap();
        let fit = fit_weibull(&m, &cfg).unwrap();
        assert_relative_eq!(fit.params.shape(), 1.0, max_relative = 1e-8);
        assert_relative_eq!(fit.params.nuisance(), 3.0, max_relative = 1e-8);

        let m = SampleMoments::new(1.0, 1.0, orders, 100).unwrap();
        assert!(matches!(fit_weibull(&m, &cfg), Err(Error::NonIdentifiable { .. })));
    }

    #[test]
    fn fit_gamma_examples() {
        let cfg = BisectionConfig::default();
        let orders = pair(2.0, 1.0);
        let fit = fit_gamma(&SampleMoments::new(54.0, 6.0, orders, 10).unwrap(), &cfg).unwrap();
        assert_relative_eq!(fit.params.shape(), 2.0, max_relative = 1e-8);
        assert_relative_eq!(fit.params.nuisance(), 3.0, max_relative = 1e-8);
        let fit = fit_gamma(&SampleMoments::new(2.0, 1.0, orders, 10).unwrap(), &cfg).unwrap();
        assert_relative_eq!(fit.params.shape(), 1.0, max_relative = 1e-8);
        assert_relative_eq!(fit.params.nuisance(), 1.0, max_relative = 1e-8);
        let zero_var = SampleMoments::new(4.0, 2.0, orders, 10).unwrap();
        assert!(matches!(fit_gamma(&zero_var, &cfg), Err(Error::NonIdentifiable { .. })));
    }

    #[test]
    fn fit_lognormal_examples() {
        let m = SampleMoments::new(2f64.exp(), 0.5f64.exp(), pair(2.0, 1.0), 10).unwrap();
        let fit = fit_lognormal(&m).unwrap();
        assert_relative_eq!(fit.params.shape(), 1.0, max_relative = 1e-12);
        assert!(fit.params.nuisance().abs() < 1e-12);

        let truth = DistributionParams::lognormal(2.0, 0.5).unwrap();
        let fit = fit_lognormal(&exact_moments(&truth, pair(3.0, 1.0))).unwrap();
        assert_relative_eq!(fit.params.shape(), 0.5, max_relative = 1e-12);
        assert_relative_eq!(fit.params.nuisance(), 2.0, max_relative = 1e-12);

        // M_n^(1/n) == M_m^(1/m)
        let flat = SampleMoments::new(4.0, 2.0, pair(2.0, 1.0), 10).unwrap();
        assert!(matches!(fit_lognormal(&flat), Err(Error::NonIdentifiable { .. })));
    }

    #[test]
    fn constant_data_is_non_identifiable_for_any_value() {
        let cfg = BisectionConfig::default();
        for c in [1.0, 0.1, 0.3, 1.7, 3.0, 7.77, 1e-3, 12345.678] {
            let data = vec![c; 17];
            for family in Family::ALL {
                for orders in [pair(2.0, 1.0), pair(3.0, 1.0), pair(2.5, 0.5)] {
                    let r = fit_from_data(&data, family, orders, &cfg);
                    assert!(
                        matches!(r, Err(Error::NonIdentifiable { .. })),
                        "{family} c={c} {orders}: {r:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn shape_agrees_across_order_pairs() {
        let cfg = BisectionConfig::default();
        for truth in [
            DistributionParams::weibull(1.7, 2.5).unwrap(),
            DistributionParams::gamma(3.3, 0.4).unwrap(),
        ] {
            let a = fit_moments(truth.family(), &exact_moments(&truth, pair(2.0, 1.0)), &cfg)
                .unwrap();
            let b = fit_moments(truth.family(), &exact_moments(&truth, pair(3.0, 1.0)), &cfg)
                .unwrap();
            assert_relative_eq!(a.params.shape(), b.params.shape(), max_relative = 1e-8);
        }
    }

    #[test]
    fn fit_from_data_recovers_lognormal_sigma() {
        let truth = DistributionParams::lognormal(0.0, 1.0).unwrap();
        let data = sample(&truth, 200_000, 11).unwrap();
        let fit = fit_from_data(&data, Family::LogNormal, pair(2.0, 1.0), &BisectionConfig::default())
            .unwrap();
        assert!((fit.params.shape() - 1.0).abs() < 0.05);
    }

    #[test]
    fn fit_from_data_rejects_negative_values() {
        let err = fit_from_data(
            &[1.0, -0.5, 2.0],
            Family::Weibull,
            pair(2.0, 1.0),
            &BisectionConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Data(_)));
    }

    #[test]
    fn sample_moments_validation() {
        assert!(SampleMoments::new(1.0, 1.0, pair(2.0, 1.0), 1).is_err());
        assert!(SampleMoments::new(0.0, 1.0, pair(2.0, 1.0), 5).is_err());
        assert!(BisectionConfig {
            initial_bracket: (2.0, 1.0),
            ..BisectionConfig::default()
        }
        .validate()
        .is_err());
    }
}
