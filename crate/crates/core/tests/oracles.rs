//! Fast special functions and closed forms against the quadrature oracles.

use momentmono_core::distributions::{moment, moment_oracle, pdf};
use momentmono_core::specfn::{digamma, gamma_oracle, log_gamma, trigamma_oracle};
use momentmono_core::verification::log_spaced;
use momentmono_core::{DistributionParams, QuadratureConfig};

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64).collect()
}

#[test]
fn gamma_oracle_matches_log_gamma_on_full_range() {
    let cfg = QuadratureConfig::default();
    for x in linspace(0.1, 30.0, 100) {
        let exact = log_gamma(x).unwrap().exp();
        let quad = gamma_oracle(x, &cfg).unwrap();
        assert!(((quad - exact) / exact).abs() <= 1e-8, "x={x}: {quad} vs {exact}");
    }
}

#[test]
fn trigamma_oracle_positive_and_matches_digamma_slope() {
    let cfg = QuadratureConfig::default();
    for x in linspace(0.1, 30.0, 60) {
        let t = trigamma_oracle(x, &cfg).unwrap();
        assert!(t > 0.0);
        let h = 1e-4 * x.max(1.0);
        let fd = (digamma(x + h).unwrap() - digamma(x - h.min(x / 2.0)).unwrap()) / (h + h.min(x / 2.0));
        // One-sided shrink near 0.1 makes the difference asymmetric; the
        // bound is relative to the curvature there.
        assert!((t - fd).abs() <= 1e-6 * t.max(1.0) * (1.0 + 1.0 / x), "x={x}: {t} vs {fd}");
    }
}

#[test]
fn trigamma_recurrence_between_oracle_values() {
    let cfg = QuadratureConfig::default();
    for x in [0.5, 1.0, 2.5, 10.0] {
        let a = trigamma_oracle(x, &cfg).unwrap();
        let b = trigamma_oracle(x + 1.0, &cfg).unwrap();
        assert!((a - b - 1.0 / (x * x)).abs() < 1e-9, "x={x}");
    }
}

#[test]
fn log_space_moment_equals_direct_evaluation() {
    // Direct evaluation is safe here: nothing near overflow.
    for k in log_spaced(0.5, 5.0, 7).unwrap() {
        for lambda in [0.5, 1.0, 3.0] {
            let p = DistributionParams::weibull(k, lambda).unwrap();
            for i in [1.0, 2.0, 3.5] {
                let direct = lambda.powf(i) * log_gamma(1.0 + i / k).unwrap().exp();
                let m = moment(&p, i).unwrap();
                assert!(((m - direct) / direct).abs() < 1e-13);
            }
        }
    }
    for (mu, sigma) in [(-1.0, 0.3), (0.0, 1.0), (0.7, 0.9)] {
        let p = DistributionParams::lognormal(mu, sigma).unwrap();
        for i in [1.0, 2.0, 4.0] {
            let direct = (mu * i).exp() * (0.5 * sigma * sigma * i * i).exp();
            assert!(((moment(&p, i).unwrap() - direct) / direct).abs() < 1e-13);
        }
    }
}

#[test]
fn moment_oracle_worked_values() {
    let cfg = QuadratureConfig::default();
    let w = DistributionParams::weibull(2.0, 1.0).unwrap();
    assert!((moment_oracle(&w, 1.0, &cfg).unwrap() - 0.886_226_925_452_758).abs() < 1e-9);
    let g = DistributionParams::gamma(2.0, 3.0).unwrap();
    assert!((moment_oracle(&g, 1.0, &cfg).unwrap() - 6.0).abs() < 1e-8);
    let l = DistributionParams::lognormal(0.0, 0.5).unwrap();
    assert!((moment_oracle(&l, 2.0, &cfg).unwrap() - 0.5f64.exp()).abs() < 1e-8);
}

#[test]
fn gamma_and_weibull_coincide_at_unit_exponential() {
    let g = DistributionParams::gamma(1.0, 1.0).unwrap();
    let w = DistributionParams::weibull(1.0, 1.0).unwrap();
    for x in linspace(0.0, 5.0, 11) {
        assert!((pdf(&g, x).unwrap() - pdf(&w, x).unwrap()).abs() < 1e-15);
    }
}
