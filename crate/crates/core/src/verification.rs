//! Parameter sweeps that check the moment-ordering results numerically.
//!
//! Every check evaluates independent grid points (in parallel with the
//! `parallel` feature) and assembles its report in grid order, so identical
//! grids give identical violation lists. Violations are data, not errors.
//!
//! Each assertion also contributes a *margin*: how far the checked quantity
//! sits on the passing side of its exact bound (for the ordering checks the
//! bound is 0, so the margin is `ln R` or `ln G` itself). `worst_margin` is
//! the smallest margin seen, reported on pass as well as on failure.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::distributions::{
    log_moment, moment, moment_oracle, normalization_oracle, DistributionParams, Family,
    OrderPair,
};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;
use crate::ratio::{
    digamma_inequality_margin, gamma_log_ratio, gamma_stirling_log_ratio, log_ratio,
    log_ratio_derivative, weibull_log_ratio,
};

/// Allowed shortfall below zero for `ln R`/`ln G`, and the relative slack in
/// `root(n) >= root(m) (1 - slack)`.
pub const LOG_RATIO_SLACK: f64 = 1e-9;
/// Finite-difference step relative to the shape value.
pub const FD_RELATIVE_STEP: f64 = 1e-6;
/// Absolute agreement between analytic and finite-difference derivatives
/// while `|derivative| <= FD_ABS_RANGE`; relative `FD_REL_TOL` beyond.
pub const FD_ABS_TOL: f64 = 1e-5;
pub const FD_ABS_RANGE: f64 = 1e3;
pub const FD_REL_TOL: f64 = 1e-8;
/// Finite stand-ins for the shape -> infinity limits.
pub const WEIBULL_LIMIT_SHAPE: f64 = 1e8;
pub const GAMMA_LIMIT_SHAPE: f64 = 1e6;
pub const WEIBULL_LIMIT_TOL: f64 = 1e-6;
/// Gamma limit tolerance per unit of `n m`.
pub const GAMMA_LIMIT_TOL_PER_NM: f64 = 2e-6;
/// Shapes at which the Stirling residual must shrink.
pub const STIRLING_ALPHAS: [f64; 3] = [10.0, 100.0, 1e4];
pub const ORACLE_REL_TOL: f64 = 1e-8;
pub const NORMALIZATION_TOL: f64 = 1e-8;
/// Orders checked against the quadrature oracle.
pub const ORACLE_ORDERS: [f64; 4] = [1.0, 2.0, 3.0, 4.0];

pub const DEFAULT_SHAPE_POINTS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub shape_values: Vec<f64>,
    /// `lambda`, `beta` or `mu` values.
    pub nuisance_values: Vec<f64>,
    pub order_pairs: Vec<OrderPair>,
}

impl SweepGrid {
    pub fn new(
        shape_values: Vec<f64>,
        nuisance_values: Vec<f64>,
        order_pairs: Vec<OrderPair>,
    ) -> Result<Self> {
        let grid = Self {
            shape_values,
            nuisance_values,
            order_pairs,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.shape_values.is_empty()
            || self.nuisance_values.is_empty()
            || self.order_pairs.is_empty()
        {
            return Err(Error::Config("sweep grid dimensions must be nonempty".into()));
        }
        if self.shape_values.iter().any(|&s| !(s.is_finite() && s > 0.0)) {
            return Err(Error::Config("shape values must be positive and finite".into()));
        }
        if self.shape_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("shape values must be strictly increasing".into()));
        }
        if self.nuisance_values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("nuisance values must be finite".into()));
        }
        for p in &self.order_pairs {
            p.validate()?;
        }
        Ok(())
    }

    /// Default sweep: `points` log-spaced shapes over the family's range,
    /// three nuisance values, and [`default_order_pairs`].
    pub fn default_for(family: Family, points: usize) -> Result<Self> {
        let (lo, hi, nuisance) = match family {
            Family::Weibull => (0.2, 5.0, vec![0.1, 1.0, 10.0]),
            Family::Gamma => (0.1, 100.0, vec![0.1, 1.0, 10.0]),
            Family::LogNormal => (0.1, 3.0, vec![-2.0, 0.0, 2.0]),
        };
        Self::new(log_spaced(lo, hi, points)?, nuisance, default_order_pairs())
    }

    /// Parameter ranges where every `E(X^i)`, `i <= 4`, stays well inside the
    /// quadrature oracle's range.
    pub fn oracle_for(family: Family) -> Self {
        let (shape, nuisance) = match family {
            Family::Weibull => (vec![0.5, 1.0, 2.0, 5.0], vec![0.5, 1.0, 2.0]),
            Family::Gamma => (vec![0.5, 1.0, 2.0, 5.0], vec![0.5, 1.0, 2.0]),
            Family::LogNormal => (vec![0.25, 0.5, 1.0], vec![-1.0, 0.0, 1.0]),
        };
        Self {
            shape_values: shape,
            nuisance_values: nuisance,
            order_pairs: vec![OrderPair::default()],
        }
    }

    fn shape_pair_points(&self) -> Vec<(f64, OrderPair)> {
        self.shape_values
            .iter()
            .flat_map(|&s| self.order_pairs.iter().map(move |&p| (s, p)))
            .collect()
    }

    fn full_points(&self) -> Vec<(f64, f64, OrderPair)> {
        self.shape_values
            .iter()
            .flat_map(|&s| {
                self.nuisance_values.iter().flat_map(move |&v| {
                    self.order_pairs.iter().map(move |&p| (s, v, p))
                })
            })
            .collect()
    }
}

/// All integer pairs from `{1, ..., 6}` plus three fractional pairs.
pub fn default_order_pairs() -> Vec<OrderPair> {
    let mut pairs = Vec::new();
    for n in 2..=6 {
        for m in 1..n {
            pairs.push(OrderPair {
                n: n as f64,
                m: m as f64,
            });
        }
    }
    pairs.extend([
        OrderPair { n: 0.5, m: 0.25 },
        OrderPair { n: 1.5, m: 0.5 },
        OrderPair { n: 2.5, m: 1.5 },
    ]);
    pairs
}

/// `count` values log-spaced over `[lo, hi]`, endpoints included.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Config(format!("invalid log-spaced range [{lo}, {hi}]")));
    }
    match count {
        0 => Err(Error::Config("grid needs at least one point".into())),
        1 => Ok(vec![lo]),
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let step = (b - a) / (count - 1) as f64;
            Ok((0..count)
                .map(|j| {
                    if j == count - 1 {
                        hi
                    } else {
                        (a + step * j as f64).exp()
                    }
                })
                .collect())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationRecord {
    pub check_name: String,
    pub family: Family,
    pub point: BTreeMap<String, f64>,
    pub observed: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub check_name: String,
    pub families: Vec<Family>,
    pub total_checks: usize,
    pub violations: Vec<ViolationRecord>,
    pub worst_margin: f64,
    #[serde(rename = "elapsed_ms", with = "duration_ms")]
    pub elapsed: Duration,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

mod duration_ms {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64() * 1e3)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let ms = f64::deserialize(d)?;
        Ok(Duration::from_secs_f64(ms.max(0.0) / 1e3))
    }
}

/// Assertions made at one grid point.
#[derive(Default)]
struct Outcome {
    checks: usize,
    violations: Vec<ViolationRecord>,
    worst_margin: f64,
}

impl Outcome {
    fn new() -> Self {
        Self {
            checks: 0,
            violations: Vec::new(),
            worst_margin: f64::INFINITY,
        }
    }

    /// Records one assertion. A NaN margin counts as a failure.
    fn assert(&mut self, pass: bool, margin: f64, violation: impl FnOnce() -> ViolationRecord) {
        self.checks += 1;
        self.worst_margin = if margin.is_nan() {
            f64::NAN
        } else if self.worst_margin.is_nan() {
            self.worst_margin
        } else {
            self.worst_margin.min(margin)
        };
        if !pass {
            self.violations.push(violation());
        }
    }
}

fn run_points<T, F>(points: &[T], eval: F) -> Outcome
where
    T: Sync,
    F: Fn(&T) -> Outcome + Sync + Send,
{
    #[cfg(feature = "parallel")]
    let outcomes: Vec<Outcome> = {
        use rayon::prelude::*;
        points.par_iter().map(&eval).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<Outcome> = points.iter().map(&eval).collect();

    outcomes.into_iter().fold(Outcome::new(), |mut acc, o| {
        acc.checks += o.checks;
        acc.violations.extend(o.violations);
        acc.worst_margin = if acc.worst_margin.is_nan() || o.worst_margin.is_nan() {
            f64::NAN
        } else {
            acc.worst_margin.min(o.worst_margin)
        };
        acc
    })
}

fn finish(check_name: &str, families: Vec<Family>, outcome: Outcome, start: Instant) -> SweepReport {
    SweepReport {
        check_name: check_name.to_string(),
        families,
        total_checks: outcome.checks,
        violations: outcome.violations,
        worst_margin: outcome.worst_margin,
        elapsed: start.elapsed(),
    }
}

fn point(entries: &[(&str, f64)]) -> BTreeMap<String, f64> {
    entries.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

fn param_point(family: Family, shape: f64, nuisance: f64, orders: OrderPair) -> BTreeMap<String, f64> {
    let (s, v) = family.parameter_names();
    point(&[(s, shape), (v, nuisance), ("n", orders.n), ("m", orders.m)])
}

fn require_shape_family(family: Family, check: &str) -> Result<()> {
    if family == Family::LogNormal {
        return Err(Error::Config(format!("{check} applies to weibull and gamma only")));
    }
    Ok(())
}

/// Checks `ln R >= -LOG_RATIO_SLACK` (or `ln G`) and
/// `root(n) >= root(m) (1 - LOG_RATIO_SLACK)` at every grid point.
pub fn check_theorem_monotonicity(family: Family, grid: &SweepGrid) -> Result<SweepReport> {
    check_theorem_monotonicity_with_slack(family, grid, LOG_RATIO_SLACK)
}

/// As [`check_theorem_monotonicity`] with a caller-chosen slack. A negative
/// slack demands a strictly positive gap.
pub fn check_theorem_monotonicity_with_slack(
    family: Family,
    grid: &SweepGrid,
    slack: f64,
) -> Result<SweepReport> {
    grid.validate()?;
    if !slack.is_finite() {
        return Err(Error::Config(format!("slack must be finite, got {slack}")));
    }
    let start = Instant::now();
    let name = "theorem_monotonicity";
    let log_root_floor = if slack < 1.0 {
        (-slack).ln_1p()
    } else {
        f64::NEG_INFINITY
    };
    let outcome = run_points(&grid.full_points(), |&(shape, nuisance, orders)| {
        let mut out = Outcome::new();
        let here = || param_point(family, shape, nuisance, orders);
        let params = match DistributionParams::from_shape_nuisance(family, shape, nuisance) {
            Ok(p) => p,
            Err(_) => {
                out.assert(false, f64::NAN, || violation(name, family, here(), f64::NAN, -slack));
                return out;
            }
        };

        let lr = log_ratio(family, shape, orders).unwrap_or(f64::NAN);
        out.assert(lr >= -slack, lr, || violation(name, family, here(), lr, -slack));

        // Root moments compared in log space.
        let scale = match family {
            Family::LogNormal => 1.0,
            _ => orders.n * orders.m,
        };
        let log_root_n = log_moment(&params, orders.n).map(|v| v / orders.n);
        let log_root_m = log_moment(&params, orders.m).map(|v| v / orders.m);
        let diff = match (log_root_n, log_root_m) {
            (Ok(a), Ok(b)) => a - b,
            _ => f64::NAN,
        };
        let check = "root_moment_monotonicity";
        out.assert(diff >= log_root_floor, scale * diff, || {
            violation(check, family, here(), scale * diff, scale * log_root_floor)
        });
        out
    });
    Ok(finish(name, vec![family], outcome, start))
}

fn violation(
    check: &str,
    family: Family,
    point: BTreeMap<String, f64>,
    observed: f64,
    threshold: f64,
) -> ViolationRecord {
    ViolationRecord {
        check_name: check.to_string(),
        family,
        point,
        observed,
        threshold,
    }
}

/// Analytic shape-derivative of the log-ratio is negative and agrees in sign
/// and value with a central difference (step `shape * 1e-6`).
pub fn check_derivative_signs(family: Family, grid: &SweepGrid) -> Result<SweepReport> {
    require_shape_family(family, "check_derivative_signs")?;
    grid.validate()?;
    let start = Instant::now();
    let outcome = run_points(&grid.shape_pair_points(), |&(shape, orders)| {
        let mut out = Outcome::new();
        let (s_name, _) = family.parameter_names();
        let here = || point(&[(s_name, shape), ("n", orders.n), ("m", orders.m)]);

        let d = log_ratio_derivative(family, shape, orders).unwrap_or(f64::NAN);
        out.assert(d < 0.0, -d, || violation("derivative_negative", family, here(), d, 0.0));

        let h = shape * FD_RELATIVE_STEP;
        let g = |s: f64| log_ratio(family, s, orders).unwrap_or(f64::NAN);
        let fd = (g(shape + h) - g(shape - h)) / (2.0 * h);
        let tol = if d.abs() <= FD_ABS_RANGE {
            FD_ABS_TOL
        } else {
            FD_REL_TOL * d.abs()
        };
        let gap = (fd - d).abs();
        let pass = fd < 0.0 && gap <= tol;
        out.assert(pass, tol - gap, || {
            violation("derivative_finite_difference", family, here(), fd, d)
        });
        out
    });
    Ok(finish("derivative_signs", vec![family], outcome, start))
}

/// `ψ(1 + m/k) - ψ(1 + n/k) < 0` at every (k, n, m) of the grid.
pub fn check_digamma_inequality(grid: &SweepGrid) -> Result<SweepReport> {
    grid.validate()?;
    let start = Instant::now();
    let name = "digamma_inequality";
    let outcome = run_points(&grid.shape_pair_points(), |&(k, orders)| {
        let mut out = Outcome::new();
        let v = digamma_inequality_margin(k, orders).unwrap_or(f64::NAN);
        out.assert(v < 0.0, -v, || {
            violation(
                name,
                Family::Weibull,
                point(&[("k", k), ("n", orders.n), ("m", orders.m)]),
                v,
                0.0,
            )
        });
        out
    });
    Ok(finish(name, vec![Family::Weibull], outcome, start))
}

/// Gamma-limit tolerance at `alpha = GAMMA_LIMIT_SHAPE`.
///
/// `ln R ~ n m (n - m) / (2 alpha)` for large alpha, so the bound grows with
/// the order gap once `n - m > 2`.
pub fn gamma_limit_tolerance(orders: OrderPair) -> f64 {
    GAMMA_LIMIT_TOL_PER_NM * orders.n * orders.m * (0.5 * (orders.n - orders.m)).max(1.0)
}

/// Large-shape limits: `ln R -> 0`, and for Gamma the Stirling
/// approximant's error shrinks as alpha grows.
pub fn check_limits(family: Family, order_pairs: &[OrderPair]) -> Result<SweepReport> {
    require_shape_family(family, "check_limits")?;
    if order_pairs.is_empty() {
        return Err(Error::Config("check_limits needs at least one order pair".into()));
    }
    for p in order_pairs {
        p.validate()?;
    }
    let start = Instant::now();
    let outcome = run_points(order_pairs, |&orders| {
        let mut out = Outcome::new();
        let (s_name, _) = family.parameter_names();
        match family {
            Family::Weibull => {
                let v = weibull_log_ratio(WEIBULL_LIMIT_SHAPE, orders).unwrap_or(f64::NAN);
                let margin = WEIBULL_LIMIT_TOL - v.abs();
                out.assert(margin >= 0.0, margin, || {
                    violation(
                        "limit_log_ratio",
                        family,
                        point(&[(s_name, WEIBULL_LIMIT_SHAPE), ("n", orders.n), ("m", orders.m)]),
                        v,
                        WEIBULL_LIMIT_TOL,
                    )
                });
            }
            _ => {
                let v = gamma_log_ratio(GAMMA_LIMIT_SHAPE, orders).unwrap_or(f64::NAN);
                let tol = gamma_limit_tolerance(orders);
                let margin = tol - v.abs();
                out.assert(margin >= 0.0, margin, || {
                    violation(
                        "limit_log_ratio",
                        family,
                        point(&[(s_name, GAMMA_LIMIT_SHAPE), ("n", orders.n), ("m", orders.m)]),
                        v,
                        tol,
                    )
                });

                let residuals: Vec<f64> = STIRLING_ALPHAS
                    .iter()
                    .map(|&a| {
                        match (gamma_stirling_log_ratio(a, orders), gamma_log_ratio(a, orders)) {
                            (Ok(s), Ok(e)) => (s - e).abs(),
                            _ => f64::NAN,
                        }
                    })
                    .collect();
                for (w, alphas) in residuals.windows(2).zip(STIRLING_ALPHAS.windows(2)) {
                    let (coarse, fine) = (w[0], w[1]);
                    out.assert(fine < coarse, coarse - fine, || {
                        violation(
                            "stirling_residual_decreasing",
                            family,
                            point(&[(s_name, alphas[1]), ("n", orders.n), ("m", orders.m)]),
                            fine,
                            coarse,
                        )
                    });
                }
            }
        }
        out
    });
    Ok(finish("limits", vec![family], outcome, start))
}

/// Quadrature moments agree with the closed forms to `ORACLE_REL_TOL` for
/// `i` in 1..=4, and the density integrates to one within
/// `NORMALIZATION_TOL`. Quadrature failures are recorded as violations.
pub fn check_moment_oracle(
    family: Family,
    grid: &SweepGrid,
    cfg: &QuadratureConfig,
) -> Result<SweepReport> {
    grid.validate()?;
    cfg.validate()?;
    let start = Instant::now();
    let points: Vec<(f64, f64)> = grid
        .shape_values
        .iter()
        .flat_map(|&s| grid.nuisance_values.iter().map(move |&v| (s, v)))
        .collect();
    let outcome = run_points(&points, |&(shape, nuisance)| {
        let mut out = Outcome::new();
        let (s_name, v_name) = family.parameter_names();
        let params = match DistributionParams::from_shape_nuisance(family, shape, nuisance) {
            Ok(p) => p,
            Err(_) => {
                out.assert(false, f64::NAN, || {
                    violation(
                        "moment_oracle",
                        family,
                        point(&[(s_name, shape), (v_name, nuisance)]),
                        f64::NAN,
                        ORACLE_REL_TOL,
                    )
                });
                return out;
            }
        };
        for i in ORACLE_ORDERS {
            let rel = match (moment(&params, i), moment_oracle(&params, i, cfg)) {
                (Ok(exact), Ok(quad)) => ((quad - exact) / exact).abs(),
                _ => f64::NAN,
            };
            let margin = ORACLE_REL_TOL - rel;
            out.assert(margin >= 0.0, margin, || {
                violation(
                    "moment_oracle",
                    family,
                    point(&[(s_name, shape), (v_name, nuisance), ("i", i)]),
                    rel,
                    ORACLE_REL_TOL,
                )
            });
        }
        let err = normalization_oracle(&params, cfg)
            .map(|z| (z - 1.0).abs())
            .unwrap_or(f64::NAN);
        let margin = NORMALIZATION_TOL - err;
        out.assert(margin >= 0.0, margin, || {
            violation(
                "pdf_normalization",
                family,
                point(&[(s_name, shape), (v_name, nuisance)]),
                err,
                NORMALIZATION_TOL,
            )
        });
        out
    });
    Ok(finish("moment_oracle", vec![family], outcome, start))
}

/// Knobs for [`run_full_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSettings {
    /// Shape values per family in the theorem, derivative and digamma grids.
    pub shape_points: usize,
    /// Slack for the ordering checks; see
    /// [`check_theorem_monotonicity_with_slack`].
    pub slack: f64,
    pub quadrature: QuadratureConfig,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            shape_points: DEFAULT_SHAPE_POINTS,
            slack: LOG_RATIO_SLACK,
            quadrature: QuadratureConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullSweepReport {
    pub reports: Vec<SweepReport>,
    pub total_checks: usize,
    pub violation_count: usize,
    #[serde(rename = "elapsed_ms", with = "duration_ms")]
    pub elapsed: Duration,
}

impl FullSweepReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }

    pub fn violations(&self) -> impl Iterator<Item = &ViolationRecord> {
        self.reports.iter().flat_map(|r| r.violations.iter())
    }
}

/// Runs all five checks on the default grids.
pub fn run_full_sweep(settings: &SweepSettings) -> Result<FullSweepReport> {
    let start = Instant::now();
    let points = settings.shape_points;
    let mut reports = Vec::new();
    for family in Family::ALL {
        let grid = SweepGrid::default_for(family, points)?;
        reports.push(check_theorem_monotonicity_with_slack(family, &grid, settings.slack)?);
    }
    for family in [Family::Weibull, Family::Gamma] {
        reports.push(check_derivative_signs(family, &SweepGrid::default_for(family, points)?)?);
    }
    reports.push(check_digamma_inequality(&SweepGrid::default_for(Family::Weibull, points)?)?);
    for family in [Family::Weibull, Family::Gamma] {
        reports.push(check_limits(family, &default_order_pairs())?);
    }
    for family in Family::ALL {
        reports.push(check_moment_oracle(
            family,
            &SweepGrid::oracle_for(family),
            &settings.quadrature,
        )?);
    }
    let total_checks = reports.iter().map(|r| r.total_checks).sum();
    let violation_count = reports.iter().map(|r| r.violations.len()).sum();
    Ok(FullSweepReport {
        reports,
        total_checks,
        violation_count,
        elapsed: start.elapsed(),
    })
}
