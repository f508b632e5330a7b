//! Seeded sampling. Each call owns its generator (ChaCha20 seeded from the
//! `u64`), so a given `(params, count, seed)` yields the same sequence on
//! every platform.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::{DistributionParams, GammaParams, LogNormalParams, WeibullParams};
use crate::error::{Error, Result};

/// Draws `count` variates.
///
/// * Weibull: inverse CDF, `lambda (-ln U)^(1/k)`.
/// * Gamma: Marsaglia-Tsang squeeze/rejection, with the `U^(1/alpha)` boost
///   for `alpha < 1`.
/// * Log-normal: `exp(mu + sigma Z)`.
///
/// Values that would underflow to zero are floored at `f64::MIN_POSITIVE`.
pub fn sample(params: &DistributionParams, count: usize, seed: u64) -> Result<Vec<f64>> {
    params.validate()?;
    if count == 0 {
        return Err(Error::Config("sample count must be at least 1".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| draw(params, &mut rng).max(f64::MIN_POSITIVE))
        .collect())
}

fn draw<R: Rng + ?Sized>(params: &DistributionParams, rng: &mut R) -> f64 {
    match *params {
        DistributionParams::Weibull(WeibullParams { k, lambda }) => {
            let u: f64 = rng.sample(Open01);
            lambda * (-u.ln()).powf(1.0 / k)
        }
        DistributionParams::Gamma(GammaParams { alpha, beta }) => beta * standard_gamma(rng, alpha),
        DistributionParams::LogNormal(LogNormalParams { mu, sigma }) => {
            let z: f64 = rng.sample(StandardNormal);
            (mu + sigma * z).exp()
        }
    }
}

/// Gamma(alpha, 1) variate.
fn standard_gamma<R: Rng + ?Sized>(rng: &mut R, alpha: f64) -> f64 {
    if alpha < 1.0 {
        let u: f64 = rng.sample(Open01);
        return standard_gamma(rng, alpha + 1.0) * u.powf(1.0 / alpha);
    }
    let d = alpha - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let z: f64 = rng.sample(StandardNormal);
        let t = 1.0 + c * z;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let u: f64 = rng.sample(Open01);
        let z2 = z * z;
        if u < 1.0 - 0.0331 * z2 * z2 {
            return d * v;
        }
        if u.ln() < 0.5 * z2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}
