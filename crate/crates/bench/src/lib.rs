//! Fixtures shared by the benchmarks.

use besov_core::{BesovSpace, GradedSeries, RadialWeight, WeightDensity};
use num_complex::Complex64;

/// Hardy space H²(D) with coefficients up to `n`.
pub fn hardy(n: usize) -> BesovSpace {
    BesovSpace::from_kernel(1, &vec![1.0; n + 1], "hardy").expect("valid kernel")
}

/// Weighted space on the ball in `dim` variables with weight (1 − |z|²)^alpha.
pub fn power_space(dim: usize, alpha: f64, s: f64, n: usize) -> BesovSpace {
    let w = RadialWeight::from_profile(dim, WeightDensity::power(alpha).expect("alpha > -1")).expect("valid weight");
    BesovSpace::new(&w, s, n).expect("valid space")
}

/// 1 + z/2 + z²/3 + z³/4 + z⁴/5 in one variable.
pub fn quartic() -> GradedSeries {
    let cs: Vec<Complex64> = (0..5).map(|k| Complex64::new(1.0 / (k + 1) as f64, 0.0)).collect();
    GradedSeries::from_coefficients(&cs)
}

/// z₁ + z₂ + z₁z₂ in two variables.
pub fn bilinear() -> GradedSeries {
    let one = Complex64::new(1.0, 0.0);
    GradedSeries::from_terms(2, [(vec![1, 0], one), (vec![0, 1], one), (vec![1, 1], one)]).expect("two variables")
}
