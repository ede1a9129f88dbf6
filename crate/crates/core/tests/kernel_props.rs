//! Property tests for Besov norms and kernel coefficients.

use besov_core::kernel::{besov_inner, kernel_function, radial_derivative};
use besov_core::{besov_norm, kernel_coeffs, BesovSpace, GradedSeries, RadialWeight, WeightDensity};
use num_complex::Complex64;
use proptest::prelude::*;

fn space(dim: usize, s: f64) -> impl Strategy<Value = BesovSpace> {
    (-0.5f64..2.0).prop_map(move |a| {
        let w = RadialWeight::from_profile(dim, WeightDensity::power(a).unwrap()).unwrap();
        BesovSpace::new(&w, s, 12).unwrap()
    })
}

fn poly(dim: usize, deg: usize) -> impl Strategy<Value = GradedSeries> {
    prop::collection::vec((prop::collection::vec(0u32..=deg as u32, dim), -1.0f64..1.0, -1.0f64..1.0), 1..6).prop_map(move |terms| {
        let mut f = GradedSeries::zero(dim);
        for (idx, re, im) in terms {
            if idx.iter().sum::<u32>() as usize <= deg {
                f.add_term(idx, Complex64::new(re, im)).unwrap();
            }
        }
        f
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn radial_derivative_shifts_smoothness(sp in space(2, 1.5), f in poly(2, 6)) {
        // f with its constant term removed.
        let g = GradedSeries::from_terms(2, f.terms().filter(|(i, _)| i.iter().any(|&k| k > 0)).map(|(i, c)| (i.clone(), *c))).unwrap();
        let lhs = besov_norm(&radial_derivative(&g, 1.0), &sp.with_s(0.5)).unwrap();
        let rhs = besov_norm(&g, &sp).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1e-300));
    }

    #[test]
    fn kernel_reproduces_point_values(sp in space(1, 1.0), f in poly(1, 10), re in -0.6f64..0.6, im in -0.6f64..0.6) {
        let w = [Complex64::new(re, im)];
        let k = kernel_function(&sp, &w).unwrap();
        let got = besov_inner(&f, &k, &sp).unwrap();
        let want = f.eval(&w).unwrap();
        prop_assert!((got - want).norm() <= 1e-10 * (1.0 + want.norm()), "{got} vs {want}");
    }

    #[test]
    fn kernel_coefficients_are_positive(sp in space(3, 0.7)) {
        let kc = kernel_coeffs(&sp);
        prop_assert!(kc.b.iter().all(|b| *b > 0.0 && b.is_finite()));
    }
}
