//! Log-gamma and digamma for positive real arguments, plus quadrature
//! oracles for Γ and ψ′ built directly from their integral definitions.

use std::f64::consts::E;

use crate::error::{Error, Result};
use crate::quadrature::{self, QuadratureConfig};

const LANCZOS_R: f64 = 10.900_511;

/// Pugh's Lanczos coefficients (r = 10.900511, 11 terms).
const LANCZOS_DK: [f64; 11] = [
    2.485_740_891_387_535_5e-5,
    1.051_423_785_817_219_7,
    -3.456_870_972_220_162_5,
    4.512_277_094_668_948,
    -2.982_852_253_235_766_4,
    1.056_397_115_771_267,
    -1.954_287_731_916_458_7e-1,
    1.709_705_434_044_412e-2,
    -5.719_261_174_043_057e-4,
    4.633_994_733_599_057e-6,
    -2.719_949_084_886_077_2e-9,
];

/// ln(2 sqrt(e / pi))
const LN_2_SQRT_E_OVER_PI: f64 = 0.620_782_237_635_245_2;

/// ln(2 pi) / 2
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_7;

/// Above this the Stirling series replaces the Lanczos sum.
const STIRLING_CUTOFF: f64 = 10.0;

/// B_{2j} / (2j (2j - 1)) for j = 1..8.
const STIRLING_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// B_{2j} / (2j) for j = 1..7.
const DIGAMMA_COEFFS: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
];

const DIGAMMA_SHIFT: f64 = 10.0;

fn check_positive(function: &'static str, x: f64) -> Result<()> {
    if x.is_nan() || x.is_infinite() {
        return Err(Error::domain(function, x, "argument must be finite"));
    }
    if x <= 0.0 {
        return Err(Error::domain(function, x, "argument must be positive"));
    }
    Ok(())
}

fn lanczos_log_gamma(x: f64) -> f64 {
    let s = LANCZOS_DK
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS_DK[0], |s, (i, d)| s + d / (x + i as f64 - 1.0));
    s.ln() + LN_2_SQRT_E_OVER_PI + (x - 0.5) * ((x - 0.5 + LANCZOS_R) / E).ln()
}

/// Asymptotic correction `ln Γ(x) - [(x - 1/2) ln x - x + ln(2π)/2]`.
fn stirling_correction(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut acc = 0.0;
    for c in STIRLING_COEFFS.iter().rev() {
        acc = acc * inv2 + c;
    }
    acc * inv
}

/// Natural log of the gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    check_positive("log_gamma", x)?;
    Ok(log_gamma_unchecked(x))
}

pub(crate) fn log_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        lanczos_log_gamma(x + 1.0) - x.ln()
    } else if x < STIRLING_CUTOFF {
        if x.fract() == 0.0 {
            // (x - 1)! is exact in f64 here, so Γ(1) = Γ(2) = 1 hold exactly.
            (2..x as u32).map(f64::from).product::<f64>().ln()
        } else {
            lanczos_log_gamma(x)
        }
    } else {
        (x - 0.5) * x.ln() - x + HALF_LN_2PI + stirling_correction(x)
    }
}

/// `ln Γ(x + h) - ln Γ(x)` without cancellation between two large values.
///
/// Needs `x > 0` and `x + h > 0`.
pub fn log_gamma_ratio(x: f64, h: f64) -> Result<f64> {
    check_positive("log_gamma_ratio", x)?;
    check_positive("log_gamma_ratio", x + h)?;
    Ok(log_gamma_ratio_unchecked(x, h))
}

pub(crate) fn log_gamma_ratio_unchecked(x: f64, h: f64) -> f64 {
    if x >= STIRLING_CUTOFF && x + h >= STIRLING_CUTOFF {
        stirling_log_gamma_ratio_unchecked(x, h)
            + (stirling_correction(x + h) - stirling_correction(x))
    } else {
        log_gamma_unchecked(x + h) - log_gamma_unchecked(x)
    }
}

/// Leading-order Stirling form `s(x) = ln(2π)/2 + (x - 1/2) ln x - x`.
pub fn stirling_log_gamma(x: f64) -> Result<f64> {
    check_positive("stirling_log_gamma", x)?;
    Ok(HALF_LN_2PI + (x - 0.5) * x.ln() - x)
}

/// `s(x + h) - s(x)` for the leading-order Stirling form, rearranged as
/// `(x - 1/2) ln(1 + h/x) + h ln(x + h) - h`.
pub(crate) fn stirling_log_gamma_ratio_unchecked(x: f64, h: f64) -> f64 {
    (x - 0.5) * (h / x).ln_1p() + h * (x + h).ln() - h
}

/// Digamma ψ(x) = Γ′(x)/Γ(x) for `x > 0`.
///
/// Shifts the argument to `x >= 10` with ψ(x) = ψ(x + 1) - 1/x, then sums the
/// asymptotic series in 1/x².
pub fn digamma(x: f64) -> Result<f64> {
    check_positive("digamma", x)?;
    Ok(digamma_unchecked(x))
}

pub(crate) fn digamma_unchecked(mut x: f64) -> f64 {
    let mut result = 0.0;
    while x < DIGAMMA_SHIFT {
        result -= 1.0 / x;
        x += 1.0;
    }
    result += x.ln() - 0.5 / x;
    let inv2 = 1.0 / (x * x);
    let mut term = inv2;
    for c in DIGAMMA_COEFFS {
        result -= c * term;
        term *= inv2;
    }
    result
}

fn check_oracle_range(function: &'static str, x: f64) -> Result<()> {
    check_positive(function, x)?;
    if !(0.1..=30.0).contains(&x) {
        return Err(Error::domain(function, x, "oracle valid only on [0.1, 30]"));
    }
    Ok(())
}

/// Γ(x) from `∫_0^∞ t^(x-1) e^(-t) dt`, split at t = 1.
///
/// On `[0, 1]` with `x < 1` the substitution `t = s^(1/x)` removes the
/// `t^(x-1)` singularity; the tail is mapped onto `[0, 1)`.
pub fn gamma_oracle(x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_oracle_range("gamma_oracle", x)?;
    let head = if x < 1.0 {
        let p = 1.0 / x;
        quadrature::integrate(|s: f64| (-s.powf(p)).exp(), 0.0, 1.0, cfg)?.value / x
    } else {
        quadrature::integrate(|t: f64| (t.powf(x - 1.0)) * (-t).exp(), 0.0, 1.0, cfg)?.value
    };
    let tail = quadrature::integrate_semi_infinite(
        |t: f64| ((x - 1.0) * t.ln() - t).exp(),
        1.0,
        cfg,
    )?
    .value;
    Ok(head + tail)
}

/// ψ′(x) from `-∫_0^1 t^(x-1) ln t / (1 - t) dt`.
///
/// With `t = s^(1/x)` this becomes `-(1/x²) ∫_0^1 ln s / (1 - s^(1/x)) ds`:
/// an integrable log singularity at s = 0 and a removable limit (-x) at
/// s = 1, evaluated through `expm1` to avoid cancellation.
pub fn trigamma_oracle(x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_oracle_range("trigamma_oracle", x)?;
    let inv = 1.0 / x;
    let integrand = |s: f64| {
        let ls = s.ln();
        ls / -(ls * inv).exp_m1()
    };
    let integral = quadrature::integrate(integrand, 0.0, 1.0, cfg)?.value;
    Ok(-integral * inv * inv)
}
