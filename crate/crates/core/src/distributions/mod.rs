//! Parameter records, densities and moments of the three families.
//!
//! All moment arithmetic is carried out on `ln E(X^i)`; the exponentiated
//! value is produced only on request and only when it is representable.

mod sampling;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, QuadratureConfig};
use crate::specfn::{log_gamma_ratio_unchecked, log_gamma_unchecked};

pub use sampling::sample;

/// ln(f64::MAX); log-moments above this overflow.
pub const MAX_LOG_MOMENT: f64 = 709.782_712_893_384;
/// ln(f64::MIN_POSITIVE); log-moments below this leave the normal range.
pub const MIN_LOG_MOMENT: f64 = -708.396_418_532_264_1;

/// Largest |ln E(X^i)| accepted by [`moment_oracle`].
pub const ORACLE_MAX_LOG_MOMENT: f64 = 600.0;
/// Largest order accepted by [`moment_oracle`].
pub const ORACLE_MAX_ORDER: f64 = 8.0;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Weibull,
    Gamma,
    #[serde(rename = "lognormal")]
    LogNormal,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Weibull, Family::Gamma, Family::LogNormal];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Weibull => "weibull",
            Family::Gamma => "gamma",
            Family::LogNormal => "lognormal",
        }
    }

    /// Names of the (shape, nuisance) parameters, in that order.
    pub fn parameter_names(self) -> (&'static str, &'static str) {
        match self {
            Family::Weibull => ("k", "lambda"),
            Family::Gamma => ("alpha", "beta"),
            Family::LogNormal => ("sigma", "mu"),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "weibull" => Ok(Family::Weibull),
            "gamma" => Ok(Family::Gamma),
            "lognormal" | "log-normal" => Ok(Family::LogNormal),
            other => Err(Error::Config(format!("unknown family '{other}'"))),
        }
    }
}

fn check_positive_param(name: &'static str, value: f64) -> Result<()> {
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        });
    }
    Ok(())
}

/// Weibull shape `k` and scale `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeibullParams {
    pub k: f64,
    pub lambda: f64,
}

impl WeibullParams {
    pub fn new(k: f64, lambda: f64) -> Result<Self> {
        let p = Self { k, lambda };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive_param("k", self.k)?;
        check_positive_param("lambda", self.lambda)
    }
}

/// Gamma shape `alpha` and scale `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaParams {
    pub alpha: f64,
    pub beta: f64,
}

impl GammaParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let p = Self { alpha, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive_param("alpha", self.alpha)?;
        check_positive_param("beta", self.beta)
    }
}

/// Log-normal log-location `mu` and log-scale `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogNormalParams {
    pub mu: f64,
    pub sigma: f64,
}

impl LogNormalParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        let p = Self { mu, sigma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() {
            return Err(Error::InvalidParameter {
                name: "mu",
                value: self.mu,
                reason: "must be finite",
            });
        }
        check_positive_param("sigma", self.sigma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum DistributionParams {
    Weibull(WeibullParams),
    Gamma(GammaParams),
    #[serde(rename = "lognormal")]
    LogNormal(LogNormalParams),
}

impl DistributionParams {
    pub fn weibull(k: f64, lambda: f64) -> Result<Self> {
        WeibullParams::new(k, lambda).map(Self::Weibull)
    }

    pub fn gamma(alpha: f64, beta: f64) -> Result<Self> {
        GammaParams::new(alpha, beta).map(Self::Gamma)
    }

    pub fn lognormal(mu: f64, sigma: f64) -> Result<Self> {
        LogNormalParams::new(mu, sigma).map(Self::LogNormal)
    }

    /// Builds a parameter record from its surviving (shape) and cancelled
    /// (nuisance) parameter: `(k, lambda)`, `(alpha, beta)` or `(sigma, mu)`.
    pub fn from_shape_nuisance(family: Family, shape: f64, nuisance: f64) -> Result<Self> {
        match family {
            Family::Weibull => Self::weibull(shape, nuisance),
            Family::Gamma => Self::gamma(shape, nuisance),
            Family::LogNormal => Self::lognormal(nuisance, shape),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            Self::Weibull(_) => Family::Weibull,
            Self::Gamma(_) => Family::Gamma,
            Self::LogNormal(_) => Family::LogNormal,
        }
    }

    /// `k`, `alpha` or `sigma`.
    pub fn shape(&self) -> f64 {
        match self {
            Self::Weibull(p) => p.k,
            Self::Gamma(p) => p.alpha,
            Self::LogNormal(p) => p.sigma,
        }
    }

    /// `lambda`, `beta` or `mu`: the parameter that cancels from the ratio.
    pub fn nuisance(&self) -> f64 {
        match self {
            Self::Weibull(p) => p.lambda,
            Self::Gamma(p) => p.beta,
            Self::LogNormal(p) => p.mu,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Weibull(p) => p.validate(),
            Self::Gamma(p) => p.validate(),
            Self::LogNormal(p) => p.validate(),
        }
    }
}

/// Moment orders `(n, m)` with `n > m > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderPair {
    pub n: f64,
    pub m: f64,
}

impl OrderPair {
    pub fn new(n: f64, m: f64) -> Result<Self> {
        let p = Self { n, m };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.n.is_finite() && self.m.is_finite() && self.m > 0.0 && self.n > self.m;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidOrders {
                n: self.n,
                m: self.m,
            })
        }
    }
}

impl Default for OrderPair {
    fn default() -> Self {
        Self { n: 2.0, m: 1.0 }
    }
}

impl fmt::Display for OrderPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.n, self.m)
    }
}

impl FromStr for OrderPair {
    type Err = Error;

    /// Parses `"n,m"`.
    fn from_str(s: &str) -> Result<Self> {
        let (n, m) = s
            .split_once(',')
            .ok_or_else(|| Error::Config(format!("orders must be 'n,m', got '{s}'")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("invalid order '{t}'")))
        };
        OrderPair::new(parse(n)?, parse(m)?)
    }
}

fn check_order(function: &'static str, i: f64) -> Result<()> {
    if !(i.is_finite() && i > 0.0) {
        return Err(Error::domain(function, i, "moment order must be positive and finite"));
    }
    Ok(())
}

/// Probability density at `x`; zero for `x < 0` (and at `x = 0` for the
/// Log-normal).
pub fn pdf(params: &DistributionParams, x: f64) -> Result<f64> {
    params.validate()?;
    Ok(pdf_unchecked(params, x))
}

pub(crate) fn pdf_unchecked(params: &DistributionParams, x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 0.0;
    }
    match *params {
        DistributionParams::Weibull(WeibullParams { k, lambda }) => {
            if x == 0.0 {
                return edge_density(k, 1.0 / lambda);
            }
            let z = x / lambda;
            (k.ln() - lambda.ln() + (k - 1.0) * z.ln() - z.powf(k)).exp()
        }
        DistributionParams::Gamma(GammaParams { alpha, beta }) => {
            if x == 0.0 {
                return edge_density(alpha, 1.0 / beta);
            }
            ((alpha - 1.0) * x.ln() - x / beta - alpha * beta.ln() - log_gamma_unchecked(alpha))
                .exp()
        }
        DistributionParams::LogNormal(LogNormalParams { mu, sigma }) => {
            if x == 0.0 {
                return 0.0;
            }
            let z = (x.ln() - mu) / sigma;
            (-0.5 * z * z - LN_SQRT_2PI - sigma.ln() - x.ln()).exp()
        }
    }
}

/// Density at the origin for a `x^(shape - 1)` leading factor.
fn edge_density(shape: f64, at_one: f64) -> f64 {
    if shape < 1.0 {
        f64::INFINITY
    } else if shape == 1.0 {
        at_one
    } else {
        0.0
    }
}

/// `ln E(X^i)` from the closed forms:
///
/// * Weibull: `i ln lambda + ln Γ(1 + i/k)`
/// * Gamma: `i ln beta + ln Γ(alpha + i) - ln Γ(alpha)`
/// * Log-normal: `mu i + sigma² i² / 2`
pub fn log_moment(params: &DistributionParams, i: f64) -> Result<f64> {
    params.validate()?;
    check_order("log_moment", i)?;
    Ok(log_moment_unchecked(params, i))
}

pub(crate) fn log_moment_unchecked(params: &DistributionParams, i: f64) -> f64 {
    match *params {
        DistributionParams::Weibull(WeibullParams { k, lambda }) => {
            i * lambda.ln() + log_gamma_unchecked(1.0 + i / k)
        }
        DistributionParams::Gamma(GammaParams { alpha, beta }) => {
            i * beta.ln() + log_gamma_ratio_unchecked(alpha, i)
        }
        DistributionParams::LogNormal(LogNormalParams { mu, sigma }) => {
            mu * i + 0.5 * sigma * sigma * i * i
        }
    }
}

fn exp_checked(log_value: f64) -> Result<f64> {
    if !(MIN_LOG_MOMENT..=MAX_LOG_MOMENT).contains(&log_value) {
        return Err(Error::Overflow {
            log_moment: log_value,
        });
    }
    Ok(log_value.exp())
}

/// Raw moment `E(X^i)` for real `i > 0`.
pub fn moment(params: &DistributionParams, i: f64) -> Result<f64> {
    exp_checked(log_moment(params, i)?)
}

/// Root moment `E(X^i)^(1/i)`.
pub fn root_moment(params: &DistributionParams, i: f64) -> Result<f64> {
    let lm = log_moment(params, i)?;
    exp_checked(lm / i)
}

/// `E(X^i)` by quadrature of `x^i f(x)` over `[0, inf)`.
///
/// The substitution `x = e^y` turns every family's integrand into a smooth
/// bump on the real line, which is then mapped onto `(-1, 1)`. Orders up to
/// [`ORACLE_MAX_ORDER`] and log-moments up to [`ORACLE_MAX_LOG_MOMENT`] in
/// magnitude are accepted.
pub fn moment_oracle(params: &DistributionParams, i: f64, cfg: &QuadratureConfig) -> Result<f64> {
    params.validate()?;
    check_order("moment_oracle", i)?;
    if i > ORACLE_MAX_ORDER {
        return Err(Error::domain("moment_oracle", i, "order above oracle range"));
    }
    let lm = log_moment_unchecked(params, i);
    if lm.abs() > ORACLE_MAX_LOG_MOMENT {
        return Err(Error::domain("moment_oracle", lm, "log-moment outside oracle range"));
    }
    power_integral(params, i, cfg)
}

/// `∫ f(x) dx` over `[0, inf)` by the same scheme as [`moment_oracle`].
pub fn normalization_oracle(params: &DistributionParams, cfg: &QuadratureConfig) -> Result<f64> {
    params.validate()?;
    power_integral(params, 0.0, cfg)
}

fn power_integral(params: &DistributionParams, i: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let (center, width) = integrand_peak(params, i);
    let integrand = |y: f64| {
        let x = y.exp();
        if x == 0.0 || x.is_infinite() {
            return 0.0;
        }
        let density = pdf_unchecked(params, x);
        if density == 0.0 {
            return 0.0;
        }
        density * ((i + 1.0) * y).exp()
    };
    Ok(quadrature::integrate_real_line(integrand, center, width, cfg)?.value)
}

/// Location and spread, in `y = ln x`, of `x^(i+1) f(x)`.
fn integrand_peak(params: &DistributionParams, i: f64) -> (f64, f64) {
    match *params {
        DistributionParams::Weibull(WeibullParams { k, lambda }) => {
            (lambda.ln() + (i / k).ln_1p() / k, 1.0 / k)
        }
        DistributionParams::Gamma(GammaParams { alpha, beta }) => {
            (beta.ln() + (alpha + i).ln(), 1.0 / (alpha + i).sqrt())
        }
        DistributionParams::LogNormal(LogNormalParams { mu, sigma }) => {
            (mu + i * sigma * sigma, sigma)
        }
    }
}
