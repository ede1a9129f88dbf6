//! Log-space special functions. Gamma values off the positive axis come
//! from `statrs`.

use statrs::function::gamma as sg;

/// ln Γ(x).
///
/// Small positive integers go through the exact factorial; other positive
/// arguments are shifted to x ≥ 10 and summed by the Stirling series, which
/// keeps the result within a couple of ulps.
pub fn ln_gamma(x: f64) -> f64 {
    if x.fract() == 0.0 && (1.0..=30.0).contains(&x) {
        let mut f = 1.0f64;
        for k in 2..x as u32 {
            f *= k as f64;
        }
        return f.ln();
    }
    if !(x > 0.0) || !x.is_finite() {
        return sg::ln_gamma(x);
    }
    let mut y = x;
    let mut prod = 1.0f64;
    while y < 10.0 {
        prod *= y;
        y += 1.0;
    }
    let shift = if prod == 1.0 { 0.0 } else { prod.ln() };
    stirling(y) - shift
}

fn stirling(x: f64) -> f64 {
    const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
    // B_{2k} / (2k (2k − 1)) for k = 1..7
    const C: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
    ];
    let r = 1.0 / x;
    let r2 = r * r;
    let mut series = 0.0;
    for c in C.iter().rev() {
        series = series * r2 + c;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + series * r
}

pub fn gamma(x: f64) -> f64 {
    sg::gamma(x)
}

/// ln B(a, b) for a, b > 0.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// ln Γ(a) − ln Γ(b).
pub fn ln_gamma_ratio(a: f64, b: f64) -> f64 {
    ln_gamma(a) - ln_gamma(b)
}

pub fn ln_factorial(n: u64) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// ln of the generalized binomial coefficient Γ(n+γ)/(Γ(γ) n!), the n-th
/// coefficient of (1 − z)^{−γ} for γ > 0.
pub fn ln_rising_binom(n: u64, gamma_: f64) -> f64 {
    ln_gamma(n as f64 + gamma_) - ln_gamma(gamma_) - ln_factorial(n)
}

/// ln(e^a + e^b) without overflow.
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

pub fn ln_sum_exp(xs: &[f64]) -> f64 {
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !hi.is_finite() {
        return hi;
    }
    hi + xs.iter().map(|x| (x - hi).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_integers() {
        for n in 0..20u64 {
            let f: f64 = (1..=n).map(|k| k as f64).product();
            assert!((ln_factorial(n) - f.ln()).abs() < 1e-12 * f.ln().abs().max(1.0));
        }
    }

    /// ln n! as a sum of logs is exact to accumulated rounding; lnΓ must
    /// agree to a few ulps of the value.
    #[test]
    fn stirling_branch_matches_log_sums() {
        let mut acc = 0.0f64;
        for n in 1..=3000u64 {
            acc += (n as f64).ln();
            let l = ln_gamma(n as f64 + 1.0);
            assert!((l - acc).abs() <= 4e-16 * acc * (n as f64).sqrt().max(1.0), "n={n}");
        }
        for x in [0.1, 0.5, 1.5, 2.5, 9.999, 10.0] {
            assert!((ln_gamma(x) - sg::ln_gamma(x)).abs() < 1e-13, "x={x}");
        }
        // 30-digit reference values
        for (x, l) in [(33.3, 82.603_723_581_654_952_928), (7.25, 7.052_185_450_738_539_445), (0.1, 2.252_712_651_734_205_960)] {
            assert!((ln_gamma(x) - l).abs() <= 2.0 * f64::EPSILON * l, "x={x}");
        }
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 5e-15);
    }

    #[test]
    fn beta_half() {
        // B(1/2, 1/2) = π
        assert!((ln_beta(0.5, 0.5) - std::f64::consts::PI.ln()).abs() < 1e-14);
    }

    #[test]
    fn rising_binom_matches_recurrence() {
        let g = 1.5;
        let mut f = 1.0;
        for n in 1..40u64 {
            f *= (n as f64 - 1.0 + g) / n as f64;
            assert!((ln_rising_binom(n, g) - f.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn log_add() {
        assert!((ln_add_exp(0.0, 0.0) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(ln_add_exp(f64::NEG_INFINITY, 3.0), 3.0);
        assert!((ln_sum_exp(&[1000.0, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }
}
