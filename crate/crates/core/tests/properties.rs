use momentmono_core::distributions::{log_moment, moment, pdf, root_moment, sample};
use momentmono_core::estimation::{fit_from_data, fit_moments, solve_monotone_decreasing};
use momentmono_core::ratio::{log_ratio, log_ratio_derivative, moment_log_ratio};
use momentmono_core::specfn::{digamma, log_gamma};
use momentmono_core::{
    BisectionConfig, DistributionParams, EstimateResult, Family, OrderPair, SampleMoments,
};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::Weibull), Just(Family::Gamma), Just(Family::LogNormal)]
}

/// Shape ranges that keep every moment of order <= 6 representable.
fn shape_for(family: Family) -> std::ops::Range<f64> {
    match family {
        Family::Weibull => 0.2..50.0,
        Family::Gamma => 0.05..500.0,
        Family::LogNormal => 0.05..3.0,
    }
}

fn params() -> impl Strategy<Value = DistributionParams> {
    family().prop_flat_map(|f| {
        let nuisance = if f == Family::LogNormal { -3.0..3.0 } else { 0.05..20.0 };
        (shape_for(f), nuisance).prop_map(move |(s, v)| {
            DistributionParams::from_shape_nuisance(f, s, v).unwrap()
        })
    })
}

fn orders() -> impl Strategy<Value = OrderPair> {
    (0.1f64..5.0, 0.01f64..1.0).prop_map(|(m, frac)| OrderPair::new(m * (1.0 + frac) + 0.01, m).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn log_gamma_recurrence(x in 1e-3f64..1e3) {
        let lhs = log_gamma(x + 1.0).unwrap() - log_gamma(x).unwrap();
        prop_assert!((lhs - x.ln()).abs() <= 1e-12 * x.ln().abs().max(1.0));
    }

    #[test]
    fn digamma_recurrence_and_monotone(x in 1e-2f64..1e4, dx in 1e-6f64..10.0) {
        let d = digamma(x).unwrap();
        prop_assert!((digamma(x + 1.0).unwrap() - d - 1.0 / x).abs() <= 1e-10 * (1.0 / x).max(1.0));
        prop_assert!(digamma(x + dx).unwrap() > d);
    }

    #[test]
    fn pdf_is_a_density_value(p in params(), x in -5.0f64..50.0) {
        let v = pdf(&p, x).unwrap();
        prop_assert!(v >= 0.0 && v.is_finite() || (x == 0.0 && v.is_infinite()));
        if x < 0.0 {
            prop_assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn root_moment_power_recovers_moment(p in params(), i in 0.1f64..6.0) {
        let lm = log_moment(&p, i).unwrap();
        prop_assume!(lm.abs() < 700.0);
        let m = moment(&p, i).unwrap();
        let r = root_moment(&p, i).unwrap();
        prop_assert!((r.powf(i) - m).abs() <= 1e-12 * m * lm.abs().max(1.0));
    }

    #[test]
    fn root_moments_are_ordered(p in params(), o in orders()) {
        let lr = log_moment(&p, o.n).unwrap() / o.n - log_moment(&p, o.m).unwrap() / o.m;
        prop_assert!(lr >= -1e-12, "{p:?} {o:?}: {lr}");
    }

    #[test]
    fn log_ratio_nonnegative_and_nuisance_free(p in params(), o in orders()) {
        let family = p.family();
        let shape_only = log_ratio(family, p.shape(), o).unwrap();
        prop_assert!(shape_only >= -1e-9);
        let built = moment_log_ratio(&p, o).unwrap();
        let scale = log_moment(&p, o.n).unwrap().abs().max(1.0) * o.m
            + log_moment(&p, o.m).unwrap().abs().max(1.0) * o.n;
        prop_assert!((built - shape_only).abs() <= 1e-9_f64.max(1e-14 * scale));
    }

    #[test]
    fn log_ratio_decreasing_in_shape(f in prop_oneof![Just(Family::Weibull), Just(Family::Gamma)],
                                     o in orders(), s in 0.2f64..20.0, step in 1.01f64..3.0) {
        let a = log_ratio(f, s, o).unwrap();
        let b = log_ratio(f, s * step, o).unwrap();
        prop_assert!(b < a);
        prop_assert!(log_ratio_derivative(f, s, o).unwrap() < 0.0);
    }

    #[test]
    fn bisection_meets_residual(target in -3.0f64..3.0) {
        let cfg = BisectionConfig::default();
        let sol = solve_monotone_decreasing(|x: f64| -x.ln(), target, &cfg).unwrap();
        prop_assert!(sol.residual <= cfg.residual_tol);
        prop_assert!(((-sol.x.ln()) - target).abs() <= cfg.residual_tol);
    }

    #[test]
    fn params_json_round_trip(p in params()) {
        let text = serde_json::to_string(&p).unwrap();
        let back: DistributionParams = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(p, back);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fits_are_scale_equivariant(seed in any::<u64>(), c in 0.01f64..100.0,
                                  f in prop_oneof![Just(Family::Weibull), Just(Family::Gamma)]) {
        let p = DistributionParams::from_shape_nuisance(f, 1.7, 2.0).unwrap();
        let data = sample(&p, 2000, seed).unwrap();
        let scaled: Vec<f64> = data.iter().map(|x| x * c).collect();
        let orders = OrderPair::default();
        let cfg = BisectionConfig::default();
        let a = fit_from_data(&data, f, orders, &cfg).unwrap();
        let b = fit_from_data(&scaled, f, orders, &cfg).unwrap();
        prop_assert!((a.params.shape() - b.params.shape()).abs() <= 1e-9 * a.params.shape());
        prop_assert!((b.params.nuisance() / (c * a.params.nuisance()) - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn lognormal_fit_shift_equivariant(seed in any::<u64>(), c in 0.01f64..100.0) {
        let p = DistributionParams::lognormal(0.3, 0.6).unwrap();
        let data = sample(&p, 2000, seed).unwrap();
        let scaled: Vec<f64> = data.iter().map(|x| x * c).collect();
        let cfg = BisectionConfig::default();
        let a = fit_from_data(&data, Family::LogNormal, OrderPair::default(), &cfg).unwrap();
        let b = fit_from_data(&scaled, Family::LogNormal, OrderPair::default(), &cfg).unwrap();
        prop_assert!((b.params.nuisance() - a.params.nuisance() - c.ln()).abs() <= 1e-9);
        prop_assert!((b.params.shape() - a.params.shape()).abs() <= 1e-9 * a.params.shape());
    }

    #[test]
    fn order_pairs_agree_on_exact_moments(f in family(), s in 0.5f64..5.0, v in 0.5f64..2.0) {
        let p = DistributionParams::from_shape_nuisance(f, s, v).unwrap();
        let cfg = BisectionConfig::default();
        let fit = |n: f64, m: f64| -> EstimateResult {
            let o = OrderPair::new(n, m).unwrap();
            let sm = SampleMoments::new(moment(&p, n).unwrap(), moment(&p, m).unwrap(), o, 1000).unwrap();
            fit_moments(f, &sm, &cfg).unwrap()
        };
        let (a, b) = (fit(2.0, 1.0), fit(3.0, 1.0));
        prop_assert!((a.params.shape() / b.params.shape() - 1.0).abs() <= 1e-8);
    }
}
