//! Property tests for the fractional index shift.

use besov_core::shift::{hat_relation_check, pointwise_bound_check, semigroup_check};
use besov_core::{shift, Grid, RadialWeight, ShiftBase, WeightDensity};
use proptest::prelude::*;

fn builtin() -> impl Strategy<Value = WeightDensity> {
    prop_oneof![
        (-0.5f64..3.0).prop_map(|a| WeightDensity::power(a).unwrap()),
        Just(WeightDensity::power_log(0.5, 1.0).unwrap()),
        Just(WeightDensity::power_log(1.0, -1.0).unwrap()),
        Just(WeightDensity::exp_cusp(0.0).unwrap()),
        Just(RadialWeight::unit(2).unwrap().line_density().clone()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn semigroup(v in builtin(), x in 0.1f64..=3.0, y in 0.1f64..=3.0) {
        let grid = Grid::dyadic(0.0, 16, 1).unwrap();
        let r = semigroup_check(&ShiftBase::Density(v), x, y, &grid, 1e-6).unwrap();
        prop_assert!(r.pass, "max rel diff {}", r.max_rel_diff);
    }

    #[test]
    fn hat_relation(v in builtin(), x in 0.2f64..=2.5) {
        let grid = Grid::dyadic(0.0, 12, 1).unwrap();
        let r = hat_relation_check(&ShiftBase::Density(v), x, &grid, 1e-8).unwrap();
        prop_assert!(r.pass, "max rel diff {}", r.max_rel_diff);
    }

    #[test]
    fn shifts_of_order_at_least_one_are_nonincreasing(v in builtin(), x in 1.0f64..=3.0) {
        let vx = shift(v, x).unwrap();
        let grid = Grid::dyadic(0.0, 16, 2).unwrap();
        let vals: Vec<f64> = grid.points().iter().map(|p| vx.ln_eval_pt(*p)).collect();
        for w in vals.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9 * w[0].abs().max(1.0));
        }
    }

    #[test]
    fn pointwise_bound(v in builtin(), x in 0.3f64..=2.5, alpha in 0.1f64..=2.0) {
        let grid = Grid::dyadic(0.0, 16, 1).unwrap();
        let r = pointwise_bound_check(&ShiftBase::Density(v), x, alpha, &grid).unwrap();
        prop_assert!(r.pass, "max ratio {}", r.max_ratio);
    }
}
