//! Property tests for weights, moment sequences and Pick certificates.

use besov_core::pick::{kaluza_coeffs, log_convexity_check, KaluzaVerdict, PowerSeriesKernel, Precision};
use besov_core::{moment_sequence, DiscreteMeasure, Grid, RadialWeight, WeightDensity};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = WeightDensity> {
    prop_oneof![
        (-0.9f64..4.0).prop_map(|a| WeightDensity::power(a).unwrap()),
        (-0.5f64..3.0, -2.0f64..2.0).prop_map(|(a, b)| WeightDensity::power_log(a, b).unwrap()),
        (-1.0f64..2.0).prop_map(|b| WeightDensity::exp_cusp(b).unwrap()),
        (1usize..=4).prop_map(|d| RadialWeight::unit(d).unwrap().line_density().clone()),
    ]
}

fn measure() -> impl Strategy<Value = DiscreteMeasure> {
    (
        prop::collection::vec((0.0f64..=1.0, 0.01f64..3.0), 1..5),
        prop::option::of(-0.9f64..3.0),
    )
        .prop_map(|(atoms, a)| DiscreteMeasure::new(atoms, a.map(|a| WeightDensity::power(a).unwrap())).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn moment_sequences_are_positive_decreasing_log_convex(v in family()) {
        let seq = moment_sequence(&v, 96).unwrap();
        prop_assert!(seq.invariant_violations().is_empty(), "{:?}", seq.invariant_violations());
        for n in 0..seq.len() - 2 {
            let l = &seq.log_values;
            prop_assert!(l[n + 1] <= l[n]);
            prop_assert!(2.0 * l[n + 1] <= l[n] + l[n + 2] + 1e-10);
        }
    }

    #[test]
    fn densities_are_nonnegative_and_nondegenerate(v in family()) {
        let grid = Grid::dyadic(0.0, 20, 2).unwrap();
        for p in grid.points() {
            let l = v.ln_eval_pt(*p);
            prop_assert!(!l.is_nan() && l < f64::INFINITY);
        }
        // ∫_t¹ v > 0 for every t < 1: the first shift is positive.
        let hat = besov_core::shift(v.clone(), 1.0).unwrap();
        for p in grid.points() {
            prop_assert!(hat.ln_eval_pt(*p) > f64::NEG_INFINITY);
        }
    }

    #[test]
    fn measure_moments_are_decreasing_and_log_convex(mu in measure()) {
        let m: Vec<f64> = (0..64).map(|n| mu.ln_moment(n as f64).unwrap()).collect();
        for n in 0..62 {
            prop_assert!(m[n + 1] <= m[n] + 1e-12);
            prop_assert!(2.0 * m[n + 1] <= m[n] + m[n + 2] + 1e-10);
        }
    }

    #[test]
    fn moment_kernels_are_kaluza_nonnegative(mu in measure()) {
        let k = PowerSeriesKernel::from_measure(&mu, 200, "random").unwrap();
        let r = kaluza_coeffs(&k, Precision::Double);
        prop_assert_eq!(r.verdict, KaluzaVerdict::CertifiedPickUpToN);
        prop_assert!(r.reconstruction_error(&k) <= 1e-9);
        let lc = log_convexity_check(&k);
        prop_assert!(lc.pass && lc.consistent);
    }

    #[test]
    fn kaluza_reconstructs_binomial_kernels(gamma in 0.05f64..3.0) {
        let k = PowerSeriesKernel::binomial(gamma, 256).unwrap();
        let r = kaluza_coeffs(&k, Precision::Double);
        prop_assert!(r.reconstruction_error(&k) <= 1e-9);
        // Log-convexity passing certifies the recursion.
        let lc = log_convexity_check(&k);
        prop_assert!(lc.consistent);
        if gamma <= 1.0 {
            prop_assert_eq!(r.verdict, KaluzaVerdict::CertifiedPickUpToN);
        } else {
            prop_assert!(r.first_negative.is_some_and(|n| n <= 3), "{:?}", r.first_negative);
        }
    }
}
