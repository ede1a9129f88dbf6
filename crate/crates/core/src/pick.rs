//! Complete Pick certificates for kernels Σ F_n ⟨z,w⟩ⁿ.
//!
//! A normalized kernel is a complete Pick kernel when 1 − 1/F has
//! non-negative coefficients. The reciprocal recursion is run in double or
//! double-double arithmetic; log-convexity of F (Kaluza's lemma) is a
//! sufficient certificate and is cross-checked against the recursion.

use serde::Serialize;

use crate::classify::{construct_pairing_measure, weakly_normal_check, Band, PairingOptions, PairingReport, DEFAULT_SHIFT_ORDERS};
use crate::error::{Error, Result};
use crate::kernel::{binomial_coefficients, kernel_coeffs, BesovSpace, SpaceOrigin};
use crate::moments::ln_moment_real;
use crate::shift::{shift, ShiftBase};
use crate::special::ln_rising_binom;
use crate::weight::{DiscreteMeasure, WeightDensity};

/// Default truncation for certification.
pub const DEFAULT_PICK_N: usize = 512;
/// Relative size of the negativity tolerance ε_n.
pub const KALUZA_REL_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    /// Plain double precision, re-run in double-double when a coefficient
    /// lands within 10ε_n of zero.
    #[default]
    Double,
    /// Double-double throughout.
    Extended,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelOrigin {
    /// Kernel coefficients of a space, divided by b_0.
    Raw { label: String },
    /// Moments of a measure, divided by m_0.
    Moments { label: String },
    /// Coefficients of (1 − z)^{−γ}.
    Binomial { gamma: f64 },
}

/// A normalized power-series kernel: F_0 = 1, F_n > 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerSeriesKernel {
    pub f: Vec<f64>,
    pub origin: KernelOrigin,
}

impl PowerSeriesKernel {
    /// Normalizes positive coefficients by the first one.
    pub fn from_coefficients(b: &[f64], origin: KernelOrigin) -> Result<PowerSeriesKernel> {
        if b.is_empty() || b.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err(Error::param("F", "coefficients must be positive and finite"));
        }
        let b0 = b[0];
        Ok(PowerSeriesKernel {
            f: b.iter().map(|x| x / b0).collect(),
            origin,
        })
    }

    /// Normalized kernel coefficients of a space, F_0..F_n.
    pub fn from_space(space: &BesovSpace, n: usize) -> Result<PowerSeriesKernel> {
        if n > space.n_max() {
            return Err(Error::DegreeCap { needed: n, cap: space.n_max() });
        }
        let kc = kernel_coeffs(space);
        let origin = match space.origin() {
            SpaceOrigin::Binomial(g) => KernelOrigin::Binomial { gamma: *g },
            _ => KernelOrigin::Raw { label: space.label() },
        };
        let b0 = kc.ln_b[0];
        Ok(PowerSeriesKernel {
            f: kc.ln_b[..=n].iter().map(|l| (l - b0).exp()).collect(),
            origin,
        })
    }

    pub fn binomial(gamma: f64, n: usize) -> Result<PowerSeriesKernel> {
        if !(gamma > 0.0) {
            return Err(Error::param("gamma", "binomial exponent must be positive"));
        }
        Ok(PowerSeriesKernel {
            f: binomial_coefficients(gamma, n),
            origin: KernelOrigin::Binomial { gamma },
        })
    }

    /// m_n(μ)/m_0(μ) for n = 0..=n.
    pub fn from_measure(mu: &DiscreteMeasure, n: usize, label: &str) -> Result<PowerSeriesKernel> {
        let m0 = mu.ln_moment(0.0)?;
        let f = (0..=n)
            .map(|k| Ok((mu.ln_moment(k as f64)? - m0).exp()))
            .collect::<Result<Vec<f64>>>()?;
        if f.iter().any(|x| !(*x > 0.0)) {
            return Err(Error::Domain(format!("{label}: moments underflow before n = {n}")));
        }
        Ok(PowerSeriesKernel {
            f,
            origin: KernelOrigin::Moments { label: label.to_string() },
        })
    }

    /// The truncation N.
    pub fn n(&self) -> usize {
        self.f.len() - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum KaluzaVerdict {
    CertifiedPickUpToN,
    NegativeCoefficient,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KaluzaResult {
    pub n: usize,
    /// c_0..c_N with c_0 = 0, so that c[k] is the coefficient of z^k.
    pub c: Vec<f64>,
    /// ε_n: 1e−12 times the magnitude of the terms at step n.
    pub tolerance: Vec<f64>,
    pub first_negative: Option<usize>,
    /// The most negative c_n, or 0.
    pub min_value: f64,
    pub verdict: KaluzaVerdict,
    pub precision: Precision,
}

impl KaluzaResult {
    /// max_n |F_n − Σ_{k=1}^{n} c_k F_{n−k}| relative to the largest term.
    pub fn reconstruction_error(&self, kernel: &PowerSeriesKernel) -> f64 {
        let f = &kernel.f;
        let mut worst: f64 = (f[0] - 1.0).abs();
        for n in 1..f.len().min(self.c.len()) {
            let mut s = f[n];
            let mut scale = f[n].abs();
            for k in 1..=n {
                let term = self.c[k] * f[n - k];
                s -= term;
                scale = scale.max(term.abs());
            }
            worst = worst.max(s.abs() / scale);
        }
        worst
    }
}

/// Coefficients of 1 − 1/F up to N, with c_1 = F_1 and
/// c_n = F_n − Σ_{k<n} c_k F_{n−k}.
pub fn kaluza_coeffs(kernel: &PowerSeriesKernel, precision: Precision) -> KaluzaResult {
    match precision {
        Precision::Extended => kaluza_dd(&kernel.f),
        Precision::Double => {
            let r = kaluza_double(&kernel.f);
            let close = r.c.iter().zip(&r.tolerance).skip(1).any(|(c, e)| *c < 10.0 * e);
            if close {
                kaluza_dd(&kernel.f)
            } else {
                r
            }
        }
    }
}

fn finish(c: Vec<f64>, tolerance: Vec<f64>, precision: Precision) -> KaluzaResult {
    let first_negative = (1..c.len()).find(|&n| c[n] < -tolerance[n]);
    let min_value = c.iter().skip(1).copied().fold(0.0, f64::min);
    KaluzaResult {
        n: c.len() - 1,
        verdict: if first_negative.is_some() {
            KaluzaVerdict::NegativeCoefficient
        } else {
            KaluzaVerdict::CertifiedPickUpToN
        },
        c,
        tolerance,
        first_negative,
        min_value,
        precision,
    }
}

fn kaluza_double(f: &[f64]) -> KaluzaResult {
    let n_max = f.len() - 1;
    let mut c = vec![0.0; n_max + 1];
    let mut eps = vec![0.0; n_max + 1];
    for n in 1..=n_max {
        let mut s = 0.0;
        let mut mag = f[n].abs();
        for k in 1..n {
            let t = c[k] * f[n - k];
            s += t;
            mag += t.abs();
        }
        c[n] = f[n] - s;
        eps[n] = KALUZA_REL_EPS * mag;
    }
    finish(c, eps, Precision::Double)
}

/// Unevaluated sum hi + lo with |lo| ≤ ulp(hi)/2.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

impl Dd {
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = two_sum(s, e);
        Dd { hi, lo }
    }

    fn mul_f(self, b: f64) -> Dd {
        let p = self.hi * b;
        let e = self.hi.mul_add(b, -p) + self.lo * b;
        let (hi, lo) = two_sum(p, e);
        Dd { hi, lo }
    }
}

fn kaluza_dd(f: &[f64]) -> KaluzaResult {
    let n_max = f.len() - 1;
    let mut c = vec![Dd { hi: 0.0, lo: 0.0 }; n_max + 1];
    let mut eps = vec![0.0; n_max + 1];
    for n in 1..=n_max {
        let mut s = Dd { hi: -f[n], lo: 0.0 };
        let mut mag = f[n].abs();
        for k in 1..n {
            let t = c[k].mul_f(f[n - k]);
            s = s.add(t);
            mag += t.hi.abs();
        }
        c[n] = Dd { hi: -s.hi, lo: -s.lo };
        eps[n] = KALUZA_REL_EPS * mag;
    }
    finish(c.iter().map(|d| d.hi + d.lo).collect(), eps, Precision::Extended)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogConvexityReport {
    pub pass: bool,
    /// First n with F_{n+2}/F_{n+1} < F_{n+1}/F_n.
    pub first_violation: Option<usize>,
    pub kaluza_verdict: KaluzaVerdict,
    /// False only if log-convexity passed while the recursion found a
    /// negative coefficient.
    pub consistent: bool,
}

/// Whether F_{n+1}/F_n is nondecreasing, up to 1e−12 relative slack.
pub fn log_convexity_check(kernel: &PowerSeriesKernel) -> LogConvexityReport {
    let f = &kernel.f;
    let ratios: Vec<f64> = f.windows(2).map(|w| w[1] / w[0]).collect();
    let first_violation = (0..ratios.len().saturating_sub(1)).find(|&n| ratios[n + 1] < ratios[n] * (1.0 - 1e-12));
    let pass = first_violation.is_none() && f.iter().all(|x| *x > 0.0);
    let k = kaluza_coeffs(kernel, Precision::Double);
    LogConvexityReport {
        pass,
        first_violation,
        kaluza_verdict: k.verdict,
        consistent: !pass || k.verdict == KaluzaVerdict::CertifiedPickUpToN,
    }
}

// ---------------------------------------------------------------------------
// Pick-equivalent kernels

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalentKernelReport {
    /// α′ = 2s − d.
    pub alpha_prime: f64,
    /// The smallest shift order at which the weak-normality test passed.
    pub x: f64,
    pub kaluza_verdict: KaluzaVerdict,
    pub kaluza_min: f64,
    /// F_n / (b_n / b_0) over n = 1..=N.
    pub band: Band,
    pub pairing: PairingReport,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PickOptions {
    pub n: usize,
    pub precision: Precision,
    pub pairing: PairingOptions,
}

impl Default for PickOptions {
    fn default() -> Self {
        PickOptions {
            n: DEFAULT_PICK_N,
            precision: Precision::Double,
            pairing: PairingOptions::default(),
        }
    }
}

/// The measure μ of a weighted space at α′ = 2s − d, and the kernel built
/// from its normalized moments.
pub fn pick_equivalent_kernel(
    space: &BesovSpace,
    opts: &PickOptions,
) -> Result<(PowerSeriesKernel, DiscreteMeasure, EquivalentKernelReport)> {
    let v = match space.origin() {
        SpaceOrigin::Weight(v) => v.clone(),
        _ => return Err(Error::Precondition("the equivalent-kernel construction needs a weighted space".into())),
    };
    let n = opts.n.min(space.n_max());
    let alpha_prime = 2.0 * space.s() - space.dim() as f64;
    if !(alpha_prime > -1.0) {
        return Err(Error::Precondition(format!("2s − d = {alpha_prime} is not above −1")));
    }
    let mut x = None;
    for &cand in &DEFAULT_SHIFT_ORDERS {
        if weakly_normal_check(&v, alpha_prime, cand, &opts.pairing.envelope)?.pass {
            x = Some(cand);
            break;
        }
    }
    let x = x.ok_or_else(|| Error::Precondition(format!("weight is not weakly normal of order {alpha_prime} for any tested x")))?;
    let (mu, pairing) = construct_pairing_measure(&v, alpha_prime, x, &opts.pairing)?;
    let kernel = PowerSeriesKernel::from_measure(&mu, n, &format!("pairing measure of {}", space.label()))?;
    let kal = kaluza_coeffs(&kernel, opts.precision);
    let raw = kernel_coeffs(space);
    let ns: Vec<usize> = (1..=n).collect();
    let ln_ratio: Vec<f64> = ns.iter().map(|&k| kernel.f[k].ln() - (raw.ln_b[k] - raw.ln_b[0])).collect();
    let band = band_from_ln(&ns, &ln_ratio);
    let pass = kal.verdict == KaluzaVerdict::CertifiedPickUpToN && band.bounded && pairing.stable;
    Ok((
        kernel,
        mu,
        EquivalentKernelReport {
            alpha_prime,
            x,
            kaluza_verdict: kal.verdict,
            kaluza_min: kal.min_value,
            band,
            pairing,
            pass,
        },
    ))
}

fn band_from_ln(ns: &[usize], ln_values: &[f64]) -> Band {
    Band::from_ln(ns, ln_values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PickVerdict {
    RawPick,
    EquivalentPick,
    /// Only issued for binomial kernels, where the failure is analytic.
    Negative,
    NegativeInconclusive,
}

impl PickVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            PickVerdict::RawPick => "RAW_PICK",
            PickVerdict::EquivalentPick => "EQUIVALENT_PICK",
            PickVerdict::Negative => "NEGATIVE",
            PickVerdict::NegativeInconclusive => "NEGATIVE_INCONCLUSIVE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PickRecord {
    pub space: String,
    pub verdict: PickVerdict,
    pub n: usize,
    pub tolerance: f64,
    pub raw: KaluzaResult,
    pub raw_log_convex: bool,
    pub equivalent: Option<EquivalentKernelReport>,
    pub note: String,
}

/// Raw coefficients first, then the constructed equivalent kernel.
pub fn pick_test(space: &BesovSpace, opts: &PickOptions) -> Result<PickRecord> {
    let n = opts.n.min(space.n_max());
    let kernel = PowerSeriesKernel::from_space(space, n)?;
    let raw = kaluza_coeffs(&kernel, opts.precision);
    let lc = log_convexity_check(&kernel);
    let mut rec = PickRecord {
        space: space.label(),
        verdict: PickVerdict::RawPick,
        n,
        tolerance: KALUZA_REL_EPS,
        raw_log_convex: lc.pass,
        raw,
        equivalent: None,
        note: String::new(),
    };
    if rec.raw.verdict == KaluzaVerdict::CertifiedPickUpToN {
        rec.note = format!("normalized coefficients have 1 − 1/F ≥ 0 up to N = {n}");
        return Ok(rec);
    }
    let neg = rec.raw.first_negative.unwrap_or(0);
    match space.origin() {
        SpaceOrigin::Binomial(g) => {
            rec.verdict = PickVerdict::Negative;
            rec.note = format!("(1 − z)^{{−{g}}} has c_{neg} = {:e} < 0; binomial kernels with γ > 1 are not Pick", rec.raw.c[neg]);
        }
        SpaceOrigin::Kernel(_) => {
            rec.verdict = PickVerdict::NegativeInconclusive;
            rec.note = format!("raw c_{neg} < 0; no equivalent-norm construction for a kernel-defined space");
        }
        SpaceOrigin::Weight(_) => match pick_equivalent_kernel(space, opts) {
            Ok((_, _, eq)) => {
                rec.verdict = if eq.pass {
                    PickVerdict::EquivalentPick
                } else {
                    PickVerdict::NegativeInconclusive
                };
                rec.note = format!(
                    "raw c_{neg} < 0; equivalent kernel at α′ = {}, x = {}: band [{:.4e}, {:.4e}]",
                    eq.alpha_prime, eq.x, eq.band.min, eq.band.max
                );
                rec.equivalent = Some(eq);
            }
            Err(Error::Precondition(msg)) => {
                rec.verdict = PickVerdict::NegativeInconclusive;
                rec.note = format!(
                    "raw c_{neg} < 0 does not refute Pick under an equivalent norm; construction unavailable: {msg}"
                );
            }
            Err(e) => return Err(e),
        },
    }
    Ok(rec)
}

// ---------------------------------------------------------------------------
// Integral representation of the kernel

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepresentationReport {
    pub s0: f64,
    pub x: f64,
    pub y: f64,
    /// x + 3 + 2y
    pub exponent: f64,
    /// a_n^{rep} / b_n(s0 − y) over n = 8..=N.
    pub band: Band,
    /// a_n(x, y) / (a_n(x, 0)·(n+1)^{2y}), when y > 0.
    pub against_unshifted_y: Option<Band>,
    /// a_n(x, y) / a_n(0, y), when x > 0.
    pub against_x0: Option<Band>,
    pub pass: bool,
}

/// ln a_n^{rep} for n = 0..=n_max: binom(n+γ−1, n)·∫ tⁿ (1 − t)^x ĝ(t) dt with
/// ĝ(t) = ∫_t^1 μ([s, 1]) ds and γ = x + 3 + 2y.
pub fn representation_coefficients(mu: &DiscreteMeasure, x: f64, y: f64, n_max: usize) -> Result<Vec<f64>> {
    if !(x >= 0.0 && y >= 0.0) {
        return Err(Error::param("x", "need x, y ≥ 0"));
    }
    let gamma = x + 3.0 + 2.0 * y;
    let g_hat = shift(ShiftBase::Measure(mu.clone()), 2.0)?.into_density();
    let integrand = WeightDensity::factor(0.0, x, g_hat)?;
    (0..=n_max)
        .map(|n| Ok(ln_rising_binom(n as u64, gamma) + ln_moment_real(&integrand, n as f64)?.ln_value))
        .collect()
}

/// Compares the coefficients of ∫_0^1 (1−t)^x (1 − t⟨z,w⟩)^{−(x+3+2y)} ĝ(t) dt
/// with the kernel coefficients of the space at s0 − y.
pub fn kernel_integral_representation(
    space_s0: &BesovSpace,
    mu: &DiscreteMeasure,
    x: f64,
    y: f64,
    n_max: usize,
) -> Result<RepresentationReport> {
    let n_max = n_max.min(space_s0.n_max());
    if n_max < 16 {
        return Err(Error::param("n_max", "need N ≥ 16"));
    }
    let target = kernel_coeffs(&space_s0.with_s(space_s0.s() - y));
    let ln_a = representation_coefficients(mu, x, y, n_max)?;
    let ns: Vec<usize> = (8..=n_max).collect();
    let ratio: Vec<f64> = ns.iter().map(|&n| ln_a[n] - target.ln_b[n]).collect();
    let band = band_from_ln(&ns, &ratio);
    let against_unshifted_y = if y > 0.0 {
        let base = representation_coefficients(mu, x, 0.0, n_max)?;
        let r: Vec<f64> = ns
            .iter()
            .map(|&n| ln_a[n] - base[n] - 2.0 * y * (n as f64 + 1.0).ln())
            .collect();
        Some(band_from_ln(&ns, &r))
    } else {
        None
    };
    let against_x0 = if x > 0.0 {
        let base = representation_coefficients(mu, 0.0, y, n_max)?;
        let r: Vec<f64> = ns.iter().map(|&n| ln_a[n] - base[n]).collect();
        Some(band_from_ln(&ns, &r))
    } else {
        None
    };
    let pass = band.bounded
        && against_unshifted_y.as_ref().is_none_or(|b| b.bounded)
        && against_x0.as_ref().is_none_or(|b| b.bounded);
    Ok(RepresentationReport {
        s0: space_s0.s(),
        x,
        y,
        exponent: x + 3.0 + 2.0 * y,
        band,
        against_unshifted_y,
        against_x0,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::RadialWeight;

    fn kernel(f: Vec<f64>) -> PowerSeriesKernel {
        PowerSeriesKernel::from_coefficients(&f, KernelOrigin::Raw { label: "test".into() }).unwrap()
    }

    #[test]
    fn reciprocal_examples() {
        let k = kernel(vec![1.0; 64]);
        let r = kaluza_coeffs(&k, Precision::Double);
        assert_eq!(r.c[1], 1.0);
        assert!(r.c[2..].iter().all(|c| *c == 0.0));
        assert_eq!(r.verdict, KaluzaVerdict::CertifiedPickUpToN);

        let k = kernel((0..64).map(|n| n as f64 + 1.0).collect());
        let r = kaluza_coeffs(&k, Precision::Double);
        assert_eq!(&r.c[1..4], &[2.0, -1.0, 0.0]);
        assert_eq!(r.first_negative, Some(2));
        assert_eq!(r.min_value, -1.0);
    }

    #[test]
    fn square_root_kernel() {
        let k = PowerSeriesKernel::binomial(0.5, 512).unwrap();
        let r = kaluza_coeffs(&k, Precision::Double);
        assert!((r.c[1] - 0.5).abs() < 1e-16 && (r.c[2] - 0.125).abs() < 1e-16);
        assert_eq!(r.verdict, KaluzaVerdict::CertifiedPickUpToN);
        // 1 − √(1 − z): c_n = Γ(n − 1/2)/(2√π n!).
        for n in [3usize, 50, 512] {
            let exact = (crate::special::ln_gamma(n as f64 - 0.5) - crate::special::ln_factorial(n as u64)).exp()
                / (2.0 * std::f64::consts::PI.sqrt());
            assert!((r.c[n] / exact - 1.0).abs() < 1e-11, "n={n}");
        }
        assert!(r.reconstruction_error(&k) < 1e-13);
    }

    #[test]
    fn binomial_threshold() {
        for g in [0.1, 0.5, 1.0] {
            let r = kaluza_coeffs(&PowerSeriesKernel::binomial(g, 512).unwrap(), Precision::Double);
            assert_eq!(r.verdict, KaluzaVerdict::CertifiedPickUpToN, "γ={g}");
        }
        for g in [1.1, 1.5, 2.0, 3.0] {
            let r = kaluza_coeffs(&PowerSeriesKernel::binomial(g, 512).unwrap(), Precision::Double);
            assert!(r.first_negative.unwrap() <= 3, "γ={g}");
        }
        let r = kaluza_coeffs(&PowerSeriesKernel::binomial(1.5, 16).unwrap(), Precision::Extended);
        assert!((r.c[2] + 0.375).abs() < 1e-15);
    }

    #[test]
    fn log_convexity() {
        assert!(log_convexity_check(&kernel(vec![1.0; 32])).pass);
        let mu = DiscreteMeasure::new(vec![(0.3, 1.0), (0.9, 2.0)], Some(WeightDensity::unit())).unwrap();
        let k = PowerSeriesKernel::from_measure(&mu, 200, "mix").unwrap();
        let lc = log_convexity_check(&k);
        assert!(lc.pass && lc.consistent);

        let two_t = RadialWeight::unit(2).unwrap();
        let sp = BesovSpace::new(&two_t, 1.0, 32).unwrap();
        let k = PowerSeriesKernel::from_space(&sp, 32).unwrap();
        assert!((k.f[1] - 3.0).abs() < 1e-12 && (k.f[2] - 1.5).abs() < 1e-12);
        assert!(!log_convexity_check(&k).pass);
    }

    #[test]
    fn pick_verdicts() {
        let opts = PickOptions::default();
        let szego = BesovSpace::from_kernel(1, &[1.0; 600], "szego").unwrap();
        assert_eq!(pick_test(&szego, &opts).unwrap().verdict, PickVerdict::RawPick);
        let b = BesovSpace::binomial(0.5, 1, 600).unwrap();
        assert_eq!(pick_test(&b, &opts).unwrap().verdict, PickVerdict::RawPick);
        let b = BesovSpace::binomial(1.5, 1, 600).unwrap();
        let r = pick_test(&b, &opts).unwrap();
        assert_eq!(r.verdict, PickVerdict::Negative);
        assert!((r.raw.c[2] + 0.375).abs() < 1e-15);
    }

    #[test]
    fn drury_arveson_is_equivalent_pick() {
        let opts = PickOptions {
            n: 256,
            ..PickOptions::default()
        };
        let sp = BesovSpace::new(&RadialWeight::unit(2).unwrap(), 1.0, 256).unwrap();
        let r = pick_test(&sp, &opts).unwrap();
        assert_eq!(r.verdict, PickVerdict::EquivalentPick, "{}", r.note);
        let eq = r.equivalent.unwrap();
        assert!(eq.band.bounded && eq.band.max / eq.band.min < 10.0);
    }

    #[test]
    fn hardy_and_dirichlet_kernels() {
        let opts = PickOptions {
            n: 256,
            ..PickOptions::default()
        };
        let w = RadialWeight::unit(1).unwrap();
        let sp = BesovSpace::new(&w, 0.5, 256).unwrap();
        let (k, _, eq) = pick_equivalent_kernel(&sp, &opts).unwrap();
        assert!(k.f.iter().all(|f| (f - 1.0).abs() < 1e-12));
        for row in &eq.band.rows {
            let n = row.n as f64;
            assert!((row.value - n / (n + 1.0)).abs() < 1e-12);
        }
        assert!(eq.pass);
        let sp = BesovSpace::new(&w, 1.0, 256).unwrap();
        let (_, _, eq) = pick_equivalent_kernel(&sp, &opts).unwrap();
        assert!(eq.pass, "{:?}", (eq.band.min, eq.band.max));
    }

    #[test]
    fn integral_representation() {
        let opts = PickOptions {
            n: 256,
            ..PickOptions::default()
        };
        let sp = BesovSpace::new(&RadialWeight::unit(1).unwrap(), 0.5, 256).unwrap();
        let (_, mu, _) = pick_equivalent_kernel(&sp, &opts).unwrap();
        // μ = δ₁: ĝ = 1 − t and a_n = 1/2 exactly.
        let a = representation_coefficients(&mu, 0.0, 0.0, 64).unwrap();
        assert!(a.iter().all(|l| (l.exp() - 0.5).abs() < 1e-12));
        let r = kernel_integral_representation(&sp, &mu, 0.0, 0.0, 256).unwrap();
        assert!(r.pass && r.band.max < 0.5 + 1e-12);
        let r = kernel_integral_representation(&sp, &mu, 1.0, 0.0, 256).unwrap();
        assert!(r.pass);
        let r = kernel_integral_representation(&sp, &mu, 0.0, 0.5, 256).unwrap();
        assert!(r.pass);
    }
}
