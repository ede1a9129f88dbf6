//! Besov norms, kernel coefficients and diagonal kernel values.
//!
//! Every space here has norm ‖f‖² = Σ_n w_n ‖f_n‖²_{H²(∂B)} over homogeneous
//! components, with w_n = n^{2s} a_n for n ≥ 1 and w_0 = a_0.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::{ln_moment_real, moment_sequence, RatioRow};
use crate::series::{ln_multinomial_inverse, total_degree, GradedSeries};
use crate::shift::shift;
use crate::special::{ln_factorial, ln_sum_exp};
use crate::weight::{RadialWeight, WeightDensity};

/// ln of the squared H²(∂B_d) norm of z^α: α!(d−1)!/(|α|+d−1)!.
pub fn ln_sphere_monomial_norm(idx: &[u32]) -> f64 {
    let d = idx.len() as u64;
    idx.iter().map(|&k| ln_factorial(k as u64)).sum::<f64>() + ln_factorial(d - 1) - ln_factorial(total_degree(idx) as u64 + d - 1)
}

/// Squared H²(∂B_d) norm of z^α.
pub fn sphere_monomial_norm(idx: &[u32], d: usize) -> Result<f64> {
    if idx.len() != d || d == 0 {
        return Err(Error::param("index", format!("multi-index {idx:?} is not of length d = {d}")));
    }
    Ok(ln_sphere_monomial_norm(idx).exp())
}

/// ln c_n, where c_n = (n+d−1)!/(n!(d−1)!) is the ratio of squared
/// Drury–Arveson to squared sphere norms on degree-n polynomials.
pub fn ln_da_ratio(n: usize, d: usize) -> f64 {
    if d <= 1 {
        return 0.0;
    }
    ln_factorial((n + d - 1) as u64) - ln_factorial(n as u64) - ln_factorial((d - 1) as u64)
}

pub fn da_ratio(n: usize, d: usize) -> f64 {
    // Exact product while the binomial is representable.
    if d <= 1 {
        return 1.0;
    }
    let mut c = 1.0f64;
    for k in 1..d {
        c = c * (n + k) as f64 / k as f64;
    }
    if c.is_finite() {
        c.round()
    } else {
        ln_da_ratio(n, d).exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpaceOrigin {
    /// A radially weighted Besov space with the given line density.
    Weight(WeightDensity),
    /// A space defined directly by its kernel coefficients.
    Kernel(String),
    /// The space with kernel (1 − ⟨z,w⟩)^{−γ}.
    Binomial(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BesovSpace {
    dim: usize,
    s: f64,
    n_max: usize,
    origin: SpaceOrigin,
    /// ln w_n at s = 0: the moments a_n for weight spaces.
    ln_base: Vec<f64>,
}

impl BesovSpace {
    pub fn new(weight: &RadialWeight, s: f64, n_max: usize) -> Result<BesovSpace> {
        Self::from_line_density(weight.dim(), weight.line_density().clone(), s, n_max)
    }

    pub fn from_line_density(dim: usize, line: WeightDensity, s: f64, n_max: usize) -> Result<BesovSpace> {
        if dim == 0 {
            return Err(Error::param("dim", "ball dimension must be ≥ 1"));
        }
        if !s.is_finite() {
            return Err(Error::param("s", "smoothness must be finite"));
        }
        let seq = moment_sequence(&line, n_max)?;
        Ok(BesovSpace {
            dim,
            s,
            n_max,
            origin: SpaceOrigin::Weight(line),
            ln_base: seq.log_values,
        })
    }

    /// The space whose kernel is Σ b_n ⟨z,w⟩ⁿ.
    pub fn from_kernel(dim: usize, b: &[f64], label: &str) -> Result<BesovSpace> {
        if dim == 0 || b.is_empty() {
            return Err(Error::param("b", "need d ≥ 1 and at least one coefficient"));
        }
        if b.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
            return Err(Error::param("b", "kernel coefficients must be positive and finite"));
        }
        let ln_base = b.iter().enumerate().map(|(n, bn)| ln_da_ratio(n, dim) - bn.ln()).collect();
        Ok(BesovSpace {
            dim,
            s: 0.0,
            n_max: b.len() - 1,
            origin: SpaceOrigin::Kernel(label.to_string()),
            ln_base,
        })
    }

    /// Kernel (1 − ⟨z,w⟩)^{−γ}: b_n = Γ(n+γ)/(Γ(γ) n!).
    pub fn binomial(gamma: f64, dim: usize, n_max: usize) -> Result<BesovSpace> {
        if !(gamma > 0.0) {
            return Err(Error::param("gamma", "binomial exponent must be positive"));
        }
        let b = binomial_coefficients(gamma, n_max);
        let mut sp = Self::from_kernel(dim, &b, &format!("binomial(γ={gamma})"))?;
        sp.origin = SpaceOrigin::Binomial(gamma);
        Ok(sp)
    }

    /// The same weight at a different smoothness index.
    pub fn with_s(&self, s: f64) -> BesovSpace {
        BesovSpace { s, ..self.clone() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn origin(&self) -> &SpaceOrigin {
        &self.origin
    }

    pub fn line_density(&self) -> Option<&WeightDensity> {
        match &self.origin {
            SpaceOrigin::Weight(v) => Some(v),
            _ => None,
        }
    }

    /// ln a_n of the weight (the s = 0 norm weights for kernel-defined spaces).
    pub fn ln_moment(&self, n: usize) -> f64 {
        self.ln_base[n]
    }

    /// ln w_n, with ‖f_n‖² = w_n ‖f_n‖²_{H²(∂B)}.
    pub fn ln_norm_weight(&self, n: usize) -> f64 {
        if n == 0 {
            self.ln_base[0]
        } else {
            self.ln_base[n] + 2.0 * self.s * (n as f64).ln()
        }
    }

    /// ln ‖z^α‖².
    pub fn ln_monomial_norm_sq(&self, idx: &[u32]) -> Result<f64> {
        let n = total_degree(idx);
        if n > self.n_max {
            return Err(Error::DegreeCap { needed: n, cap: self.n_max });
        }
        Ok(self.ln_norm_weight(n) + ln_sphere_monomial_norm(idx))
    }

    pub fn label(&self) -> String {
        match &self.origin {
            SpaceOrigin::Weight(v) => format!("B^{}[{v}, d={}]", self.s, self.dim),
            SpaceOrigin::Kernel(l) => format!("{l}, d={}", self.dim),
            SpaceOrigin::Binomial(g) => format!("binomial(γ={g}), d={}", self.dim),
        }
    }
}

/// Γ(n+γ)/(Γ(γ) n!) for n = 0..=n_max, by the exact ratio recursion.
pub fn binomial_coefficients(gamma: f64, n_max: usize) -> Vec<f64> {
    let mut b = Vec::with_capacity(n_max + 1);
    let mut c = 1.0;
    for n in 0..=n_max {
        if n > 0 {
            c *= (n as f64 - 1.0 + gamma) / n as f64;
        }
        b.push(c);
    }
    b
}

fn check_series(f: &GradedSeries, space: &BesovSpace) -> Result<()> {
    if f.dim() != space.dim {
        return Err(Error::param("f", "series dimension does not match the space"));
    }
    if f.degree() > space.n_max {
        return Err(Error::DegreeCap {
            needed: f.degree(),
            cap: space.n_max,
        });
    }
    Ok(())
}

pub fn besov_norm(f: &GradedSeries, space: &BesovSpace) -> Result<f64> {
    Ok(besov_inner(f, f, space)?.re.max(0.0).sqrt())
}

/// ⟨f, g⟩ in the space; monomials are orthogonal.
pub fn besov_inner(f: &GradedSeries, g: &GradedSeries, space: &BesovSpace) -> Result<Complex64> {
    check_series(f, space)?;
    check_series(g, space)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (idx, c) in f.terms() {
        let d = g.coeff(idx);
        if d.norm_sqr() == 0.0 || c.norm_sqr() == 0.0 {
            continue;
        }
        acc += c * d.conj() * space.ln_monomial_norm_sq(idx)?.exp();
    }
    Ok(acc)
}

/// R^s: the degree-n component times n^s; the constant term is dropped for s ≠ 0.
pub fn radial_derivative(f: &GradedSeries, s: f64) -> GradedSeries {
    if s == 0.0 {
        return f.clone();
    }
    f.scale_by_degree(|n| if n == 0 { 0.0 } else { (n as f64).powf(s) })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelCoefficients {
    pub b: Vec<f64>,
    pub ln_b: Vec<f64>,
    pub dim: usize,
    pub s: f64,
}

impl KernelCoefficients {
    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    /// b_n / b_{n+1}.
    pub fn ratio(&self, n: usize) -> f64 {
        (self.ln_b[n] - self.ln_b[n + 1]).exp()
    }

    /// |b_n/b_{n+1} − 1| at each n, with the decreasing-trend verdict.
    pub fn ratio_trend(&self, n_list: &[usize], tolerance: f64) -> Result<crate::moments::TrendReport> {
        let mut rows = Vec::with_capacity(n_list.len());
        for &n in n_list {
            if n + 1 >= self.b.len() {
                return Err(Error::DegreeCap { needed: n + 1, cap: self.b.len() - 1 });
            }
            let ratio = self.ratio(n);
            rows.push(RatioRow {
                n,
                ratio,
                deviation: (ratio - 1.0).abs(),
            });
        }
        Ok(crate::moments::TrendReport::from_ratios(rows, tolerance))
    }
}

/// b_n = 1/‖z₁ⁿ‖², in log space.
pub fn kernel_coeffs(space: &BesovSpace) -> KernelCoefficients {
    let ln_b: Vec<f64> = (0..=space.n_max)
        .map(|n| ln_da_ratio(n, space.dim) - space.ln_norm_weight(n))
        .collect();
    KernelCoefficients {
        b: ln_b.iter().map(|l| l.exp()).collect(),
        ln_b,
        dim: space.dim,
        s: space.s,
    }
}

/// The truncated kernel k_w = Σ_{|α| ≤ N} b_{|α|} (|α|!/α!) w̄^α z^α.
pub fn kernel_function(space: &BesovSpace, w: &[Complex64]) -> Result<GradedSeries> {
    if w.len() != space.dim {
        return Err(Error::param("w", "point dimension does not match the space"));
    }
    let kc = kernel_coeffs(space);
    let mut k = GradedSeries::zero(space.dim);
    for idx in crate::series::monomials(space.dim, space.n_max) {
        let n = total_degree(&idx);
        let mut wa = Complex64::new(1.0, 0.0);
        for (wi, &e) in w.iter().zip(&idx) {
            wa *= wi.conj().powu(e);
        }
        let c = (kc.ln_b[n] - ln_multinomial_inverse(&idx)).exp();
        k.add_term(idx, wa * c)?;
    }
    Ok(k)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandReport {
    pub rows: Vec<RatioRow>,
    pub band_min: f64,
    pub band_max: f64,
    /// max(band_max, 1/band_min)
    pub c: f64,
    pub trend_decreasing: bool,
    pub pass: bool,
}

impl BandReport {
    pub(crate) fn from_rows(rows: Vec<RatioRow>) -> BandReport {
        let band_min = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
        let band_max = rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
        let trend_decreasing = rows.windows(2).all(|w| w[1].deviation <= w[0].deviation * (1.0 + 1e-12) + 1e-15);
        let c = band_max.max(1.0 / band_min);
        BandReport {
            pass: c.is_finite() && band_min > 0.0 && trend_decreasing,
            rows,
            band_min,
            band_max,
            c,
            trend_decreasing,
        }
    }
}

/// r_n = n^{2(s+x)} a_n(ω_x) / (n^{2s} a_n(ω)) over `n_list`.
pub fn index_shift_equivalence_check(space: &BesovSpace, x: f64, n_list: &[usize]) -> Result<BandReport> {
    if !(x >= 0.0) {
        return Err(Error::param("x", "shift must be ≥ 0"));
    }
    let v = space
        .line_density()
        .ok_or_else(|| Error::Precondition("index shift needs a weight-defined space".into()))?;
    let vx = if x == 0.0 { None } else { Some(shift(v.clone(), 2.0 * x)?.into_density()) };
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        if n == 0 {
            return Err(Error::param("n_list", "orders must be ≥ 1"));
        }
        let ratio = match &vx {
            None => 1.0,
            Some(w) => {
                let l = 2.0 * x * (n as f64).ln() + ln_moment_real(w, n as f64)?.ln_value - ln_moment_real(v, n as f64)?.ln_value;
                l.exp()
            }
        };
        rows.push(RatioRow {
            n,
            ratio,
            deviation: (ratio - 1.0).abs(),
        });
    }
    Ok(BandReport::from_rows(rows))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelDiagRow {
    pub r: f64,
    pub value: f64,
    pub ln_value: f64,
    pub tail_bound: f64,
}

/// Bound q ≥ sup_{n ≥ N} b_{n+1}/b_n from the last half of the table, when
/// the ratios are monotone there. Nondecreasing ratios are bounded by their
/// limit, which is 1 for every space built here.
fn tail_ratio_bound(kc: &KernelCoefficients) -> Option<f64> {
    let n = kc.len() - 1;
    if n < 4 {
        return None;
    }
    let q: Vec<f64> = (n / 2..n).map(|k| (kc.ln_b[k + 1] - kc.ln_b[k]).exp()).collect();
    let slack = 1e-12;
    let nonincreasing = q.windows(2).all(|w| w[1] <= w[0] * (1.0 + slack));
    let nondecreasing = q.windows(2).all(|w| w[1] >= w[0] * (1.0 - slack));
    let last = *q.last()?;
    if nonincreasing {
        Some(last)
    } else if nondecreasing {
        Some(last.max(1.0))
    } else {
        None
    }
}

/// k_z(z) = Σ b_n |z|^{2n} at each radius, with a certified truncation bound.
pub fn kernel_diag(space: &BesovSpace, radii: &[f64]) -> Result<Vec<KernelDiagRow>> {
    let kc = kernel_coeffs(space);
    let n = kc.len() - 1;
    let q = tail_ratio_bound(&kc);
    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::Domain(format!("radius {r} outside [0, 1)")));
        }
        let ln_r2 = 2.0 * r.ln();
        let terms: Vec<f64> = (0..=n)
            .map(|k| if k == 0 { kc.ln_b[0] } else { kc.ln_b[k] + k as f64 * ln_r2 })
            .collect();
        let ln_value = ln_sum_exp(&terms);
        let best_effort = ln_value.exp();
        let tail_bound = match q {
            Some(q) if q * r * r < 1.0 => {
                let qr = q * r * r;
                (terms[n]).exp() * qr / (1.0 - qr)
            }
            _ => return Err(Error::TailNotCertifiable { n, best_effort }),
        };
        out.push(KernelDiagRow {
            r,
            value: best_effort,
            ln_value,
            tail_bound,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileRow {
    pub r: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthProfile {
    pub rows: Vec<ProfileRow>,
    /// Empirical constant: the largest ratio seen.
    pub c: f64,
    pub pass: bool,
}

/// Whether a profile sampled toward the boundary looks bounded: the outer
/// third stays within 10% of the earlier maximum, or the final increments
/// contract geometrically.
pub(crate) fn looks_bounded(values: &[f64]) -> bool {
    if values.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let k = values.len();
    if k < 6 {
        return true;
    }
    let split = (2 * k) / 3;
    let early = values[..split].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let late = values[split..].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if late <= 1.1 * early {
        return true;
    }
    let inc: Vec<f64> = values[k - 4..].windows(2).map(|w| w[1] - w[0]).collect();
    inc.windows(2).all(|w| w[1] <= 0.75 * w[0].max(0.0))
}

/// k^s_z(z)·(1−|z|²)^{2(t−s)} / k^t_z(z) for s ≤ t.
pub fn kernel_growth_check(space_s: &BesovSpace, space_t: &BesovSpace, radii: &[f64]) -> Result<GrowthProfile> {
    if space_s.s > space_t.s {
        return Err(Error::param("s", "kernel growth check needs s ≤ t"));
    }
    let ks = kernel_diag(space_s, radii)?;
    let kt = kernel_diag(space_t, radii)?;
    let e = 2.0 * (space_t.s - space_s.s);
    let rows: Vec<ProfileRow> = ks
        .iter()
        .zip(&kt)
        .map(|(a, b)| {
            let omr2 = (1.0 - a.r) * (1.0 + a.r);
            ProfileRow {
                r: a.r,
                ratio: (a.ln_value + e * omr2.ln() - b.ln_value).exp(),
            }
        })
        .collect();
    let values: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let c = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(GrowthProfile {
        pass: looks_bounded(&values),
        rows,
        c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn bergman() -> BesovSpace {
        BesovSpace::new(&RadialWeight::unit(1).unwrap(), 0.0, 64).unwrap()
    }

    #[test]
    fn sphere_norms() {
        assert_relative_eq!(sphere_monomial_norm(&[7], 1).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(sphere_monomial_norm(&[5, 0], 2).unwrap(), 1.0 / 6.0, max_relative = 1e-14);
        assert_relative_eq!(sphere_monomial_norm(&[1, 1], 2).unwrap(), 1.0 / 6.0, max_relative = 1e-14);
        assert!(sphere_monomial_norm(&[1, 1], 3).is_err());
    }

    #[test]
    fn da_ratios() {
        assert_eq!(da_ratio(9, 1), 1.0);
        assert_eq!(da_ratio(3, 2), 4.0);
        assert_eq!(da_ratio(2, 3), 6.0);
    }

    #[test]
    fn norms() {
        let one = Complex64::new(1.0, 0.0);
        let sp = bergman();
        assert_relative_eq!(besov_norm(&GradedSeries::constant(1, one), &sp).unwrap(), 1.0, max_relative = 1e-15);
        let z = GradedSeries::monomial(vec![1], one);
        assert_relative_eq!(besov_norm(&z, &sp).unwrap(), 0.5f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(besov_norm(&z, &sp.with_s(0.5)).unwrap(), 0.5f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn derivative_examples() {
        let one = Complex64::new(1.0, 0.0);
        let f = GradedSeries::from_coefficients(&[one, one]);
        assert_eq!(radial_derivative(&f, 1.0), GradedSeries::monomial(vec![1], one));
        let g = GradedSeries::from_coefficients(&[0.0.into(), one, 0.0.into(), one]);
        let r = radial_derivative(&g, -1.0);
        assert_relative_eq!(r.coeff(&[3]).re, 1.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn kernel_examples() {
        let kc = kernel_coeffs(&bergman());
        for n in 0..=64 {
            assert_relative_eq!(kc.b[n], (n + 1) as f64, max_relative = 1e-13);
        }
        let da = BesovSpace::new(&RadialWeight::unit(2).unwrap(), 1.0, 32).unwrap();
        let kc = kernel_coeffs(&da);
        assert_relative_eq!(kc.b[0], 1.0, max_relative = 1e-14);
        for n in 1..=32 {
            let nf = n as f64;
            assert_relative_eq!(kc.b[n], (nf + 1.0) * (nf + 2.0) / (2.0 * nf * nf), max_relative = 1e-13);
        }
        let hardy = bergman().with_s(0.5);
        let kc = kernel_coeffs(&hardy);
        assert_relative_eq!(kc.b[10], 11.0 / 10.0, max_relative = 1e-13);
    }

    #[test]
    fn diag_examples() {
        let szego = BesovSpace::from_kernel(1, &[1.0; 600], "Szegő").unwrap();
        let rows = kernel_diag(&szego, &[0.5]).unwrap();
        assert_relative_eq!(rows[0].value, 1.0 / 0.75, max_relative = 1e-14);
        let berg = BesovSpace::new(&RadialWeight::unit(1).unwrap(), 0.0, 600).unwrap();
        let rows = kernel_diag(&berg, &[0.5]).unwrap();
        assert_relative_eq!(rows[0].value, 16.0 / 9.0, max_relative = 1e-13);
        assert!(rows[0].tail_bound < 1e-100);
    }

    #[test]
    fn reproducing_property() {
        let sp = BesovSpace::new(&RadialWeight::unit(2).unwrap(), 0.7, 12).unwrap();
        let w = [Complex64::new(0.3, -0.2), Complex64::new(-0.1, 0.4)];
        let f = GradedSeries::from_terms(
            2,
            vec![
                (vec![0, 0], Complex64::new(1.0, 2.0)),
                (vec![2, 1], Complex64::new(-0.5, 0.0)),
                (vec![0, 4], Complex64::new(0.0, 3.0)),
            ],
        )
        .unwrap();
        let k = kernel_function(&sp, &w).unwrap();
        let lhs = besov_inner(&f, &k, &sp).unwrap();
        let rhs = f.eval(&w).unwrap();
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1.0));
    }
}
