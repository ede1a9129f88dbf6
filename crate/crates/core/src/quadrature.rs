//! Adaptive Gauss–Legendre integration with panel halving.
//!
//! Each panel carries the 16-point rule on the whole panel and on its two
//! halves; the difference is the panel's error estimate and the refined sum
//! is the accepted value. The panel with the largest estimate is split until
//! the global estimate meets the tolerance or the panel cap is reached.

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const ORDER: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_panels: 1 << 14,
        }
    }
}

impl QuadOptions {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
    pub converged: bool,
}

impl Estimate {
    pub fn require(self) -> Result<Estimate> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::Convergence {
                estimate: self.value,
                error: self.error,
                panels: self.panels,
            })
        }
    }
}

/// Integral stored as a logarithm, for integrands far outside the f64 range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LnEstimate {
    pub ln_value: f64,
    pub rel_error: f64,
    pub panels: usize,
    pub converged: bool,
}

impl LnEstimate {
    pub fn zero() -> Self {
        LnEstimate {
            ln_value: f64::NEG_INFINITY,
            rel_error: 0.0,
            panels: 0,
            converged: true,
        }
    }

    pub fn require(self) -> Result<LnEstimate> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::Convergence {
                estimate: self.ln_value.exp(),
                error: self.rel_error * self.ln_value.exp(),
                panels: self.panels,
            })
        }
    }

    /// Sum of two non-negative integrals held in log form.
    pub fn add(self, other: LnEstimate) -> LnEstimate {
        let ln_value = crate::special::ln_add_exp(self.ln_value, other.ln_value);
        let w = |e: &LnEstimate| {
            if e.ln_value == f64::NEG_INFINITY {
                0.0
            } else {
                (e.ln_value - ln_value).exp()
            }
        };
        LnEstimate {
            ln_value,
            rel_error: w(&self) * self.rel_error + w(&other) * other.rel_error,
            panels: self.panels + other.panels,
            converged: self.converged && other.converged,
        }
    }
}

fn gl_rule() -> &'static ([f64; ORDER], [f64; ORDER]) {
    static RULE: OnceLock<([f64; ORDER], [f64; ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER;
        let mut nodes = [0.0; ORDER];
        let mut weights = [0.0; ORDER];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

/// Nodes of the 16-point rule mapped to [a, b].
pub fn rule_nodes(a: f64, b: f64) -> impl Iterator<Item = f64> {
    let (nodes, _) = gl_rule();
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    nodes.iter().map(move |x| c + h * x)
}

fn apply_rule<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gl_rule();
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let mut s = 0.0;
    for (x, w) in nodes.iter().zip(weights.iter()) {
        s += w * f(c + h * x);
    }
    s * h
}

struct Panel {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    err: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64) -> Panel {
        let m = 0.5 * (a + b);
        let left = apply_rule(f, a, m);
        let right = apply_rule(f, m, b);
        let err = (whole - left - right).abs();
        Panel {
            a,
            b,
            left,
            right,
            err,
        }
    }

    fn value(&self) -> f64 {
        self.left + self.right
    }

    fn splittable(&self) -> bool {
        let m = 0.5 * (self.a + self.b);
        m > self.a && m < self.b && (self.b - self.a) > 8.0 * f64::EPSILON * self.a.abs().max(self.b.abs())
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn clean_breaks(breaks: &[f64]) -> Result<Vec<f64>> {
    let mut b: Vec<f64> = breaks.to_vec();
    if b.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("non-finite integration breakpoint".into()));
    }
    b.sort_by(f64::total_cmp);
    b.dedup();
    if b.len() < 2 {
        return Err(Error::Domain("integration interval is empty".into()));
    }
    Ok(b)
}

/// Integrates `f` over [breaks[0], breaks[last]], with the given interior
/// breakpoints as initial panel boundaries.
pub fn integrate<F: Fn(f64) -> f64>(f: F, breaks: &[f64], opts: &QuadOptions) -> Result<Estimate> {
    let b = clean_breaks(breaks)?;
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    for w in b.windows(2) {
        let whole = apply_rule(&f, w[0], w[1]);
        heap.push(Panel::new(&f, w[0], w[1], whole));
    }
    let recompute = |heap: &BinaryHeap<Panel>, frozen: &[Panel]| {
        let mut v = 0.0;
        let mut e = 0.0;
        for p in heap.iter().chain(frozen.iter()) {
            v += p.value();
            e += p.err;
        }
        (v, e)
    };
    let (mut total, mut err) = recompute(&heap, &frozen);
    let mut steps = 0usize;
    loop {
        if !total.is_finite() || !err.is_finite() {
            let (v, e) = recompute(&heap, &frozen);
            if !v.is_finite() || !e.is_finite() {
                return Err(Error::Domain("integrand is not finite on the integration interval".into()));
            }
            total = v;
            err = e;
        }
        let panels = heap.len() + frozen.len();
        if err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            return Ok(Estimate {
                value: total,
                error: err,
                panels,
                converged: true,
            });
        }
        if panels >= opts.max_panels || heap.is_empty() {
            let (v, e) = recompute(&heap, &frozen);
            return Ok(Estimate {
                value: v,
                error: e,
                panels,
                converged: e <= opts.abs_tol.max(opts.rel_tol * v.abs()),
            });
        }
        let p = heap.pop().expect("heap is non-empty");
        if !p.splittable() {
            frozen.push(p);
            continue;
        }
        let m = 0.5 * (p.a + p.b);
        let l = Panel::new(&f, p.a, m, p.left);
        let r = Panel::new(&f, m, p.b, p.right);
        total += l.value() + r.value() - p.value();
        err += l.err + r.err - p.err;
        heap.push(l);
        heap.push(r);
        steps += 1;
        if steps % 512 == 0 {
            let (v, e) = recompute(&heap, &frozen);
            total = v;
            err = e;
        }
    }
}

/// Integrates exp(ln_f) over the breakpoint range, scaling by the sampled
/// maximum of `ln_f` so that integrands far below the f64 range survive.
///
/// Negative results smaller in magnitude than the error estimate are clamped
/// to the estimate.
pub fn integrate_ln<F: Fn(f64) -> f64>(ln_f: F, breaks: &[f64], opts: &QuadOptions) -> Result<LnEstimate> {
    let b = clean_breaks(breaks)?;
    let seen = Cell::new(f64::NEG_INFINITY);
    let tracked = |x: f64| {
        let v = ln_f(x);
        if v.is_finite() && v > seen.get() {
            seen.set(v);
        }
        v
    };
    // Endpoints too: steep integrands peak there, beyond the reach of the nodes.
    for &x in &b {
        tracked(x);
    }
    for w in b.windows(2) {
        for x in rule_nodes(w[0], w[1]) {
            tracked(x);
        }
    }
    let mut scale = seen.get();
    if scale == f64::NEG_INFINITY {
        scale = 0.0;
    }
    for _ in 0..4 {
        match integrate(|x| (tracked(x) - scale).exp(), &b, opts) {
            Ok(est) if est.value.is_finite() && est.error.is_finite() && seen.get() <= scale + 600.0 => {
                return Ok(finish_ln(est, scale));
            }
            Err(e) if seen.get() <= scale => return Err(e),
            _ => {}
        }
        scale = seen.get();
    }
    Err(Error::Domain("integrand overflows even after rescaling".into()))
}

fn finish_ln(est: Estimate, scale: f64) -> LnEstimate {
    let mut value = est.value;
    if value < 0.0 && -value <= est.error {
        value = est.error;
    }
    if value <= 0.0 {
        return LnEstimate {
            ln_value: f64::NEG_INFINITY,
            rel_error: if est.error > 0.0 { f64::INFINITY } else { 0.0 },
            panels: est.panels,
            converged: est.converged && est.error == 0.0,
        };
    }
    LnEstimate {
        ln_value: value.ln() + scale,
        rel_error: est.error / value,
        panels: est.panels,
        converged: est.converged,
    }
}

/// Outcome of an integral over (t, 1] computed shell by shell toward 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailIntegral {
    Converged(LnEstimate),
    Divergent { shells: usize },
}

/// ∫ h over the interval of distances y ∈ (0, y0] from the endpoint, where
/// `ln_h` takes the distance y. Dyadic shells [y0 2^{-k-1}, y0 2^{-k}] are
/// integrated in turn; a geometric tail is extrapolated once the shell ratio
/// settles, and growing shells are reported as divergence.
pub fn tail_integral_ln<F: Fn(f64) -> f64>(ln_h: F, y0: f64, opts: &QuadOptions) -> Result<TailIntegral> {
    const MAX_SHELLS: usize = 1000;
    if !(y0 > 0.0) {
        return Err(Error::Domain(format!("tail integral needs a positive length, got {y0}")));
    }
    let mut total = LnEstimate::zero();
    let mut shells: Vec<f64> = Vec::new();
    let mut hi = y0;
    for k in 0..MAX_SHELLS {
        let lo = 0.5 * hi;
        let shell = integrate_ln(&ln_h, &[lo, hi], opts)?;
        total = total.add(shell);
        shells.push(shell.ln_value);
        hi = lo;
        if k < 6 {
            continue;
        }
        let c = shell.ln_value;
        if c == f64::NEG_INFINITY && total.ln_value == f64::NEG_INFINITY && k > 60 {
            return Ok(TailIntegral::Converged(total));
        }
        if c - total.ln_value < (1e-16f64).ln() {
            return Ok(TailIntegral::Converged(total));
        }
        let r1 = c - shells[k - 1];
        let r2 = shells[k - 1] - shells[k - 2];
        let r3 = shells[k - 2] - shells[k - 3];
        if r1 >= 0.0 && r2 >= 0.0 && r3 >= 0.0 && k >= 10 {
            return Ok(TailIntegral::Divergent { shells: k + 1 });
        }
        if r1 < -1e-3 && (r1 - r2).abs() < 1e-9 && (r2 - r3).abs() < 1e-8 {
            let rho = r1.exp();
            let tail = LnEstimate {
                ln_value: c + (rho / (1.0 - rho)).ln(),
                rel_error: 1e-8,
                panels: 0,
                converged: true,
            };
            return Ok(TailIntegral::Converged(total.add(tail)));
        }
    }
    Ok(TailIntegral::Divergent { shells: MAX_SHELLS })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_is_exact_for_polynomials() {
        for deg in 0..32 {
            let est = apply_rule(&|x: f64| x.powi(deg), 0.0, 1.0);
            assert!((est - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "deg {deg}");
        }
    }

    #[test]
    fn endpoint_singularity() {
        let est = integrate(|x: f64| x.powf(-0.5), &[0.0, 1.0], &QuadOptions::default()).unwrap();
        assert!(est.converged);
        assert!((est.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn log_space_far_below_range() {
        // ∫_0^1 e^{-2000 - x} dx
        let est = integrate_ln(|x| -2000.0 - x, &[0.0, 1.0], &QuadOptions::default()).unwrap();
        let exact = -2000.0 + (1.0 - (-1.0f64).exp()).ln();
        assert!((est.ln_value - exact).abs() < 1e-12);
    }

    #[test]
    fn cap_reports_failure() {
        let opts = QuadOptions {
            max_panels: 4,
            ..QuadOptions::default()
        };
        let est = integrate(|x: f64| (1.0 / x).sin(), &[1e-6, 1.0], &opts).unwrap();
        assert!(!est.converged);
        assert!(est.require().is_err());
    }

    #[test]
    fn tail_power_law() {
        // ∫_0^{1/2} y^{-0.9} dy = 10 (1/2)^{0.1}
        let t = tail_integral_ln(|y: f64| -0.9 * y.ln(), 0.5, &QuadOptions::default()).unwrap();
        match t {
            TailIntegral::Converged(e) => {
                let exact = 10.0 * 0.5f64.powf(0.1);
                assert!((e.ln_value.exp() / exact - 1.0).abs() < 1e-7, "{}", e.ln_value.exp());
            }
            TailIntegral::Divergent { .. } => panic!("power law reported divergent"),
        }
    }

    #[test]
    fn tail_divergence() {
        let t = tail_integral_ln(|y: f64| 1.0 / y, 0.5, &QuadOptions::default()).unwrap();
        assert!(matches!(t, TailIntegral::Divergent { .. }));
        let t = tail_integral_ln(|y: f64| -1.2 * y.ln(), 0.5, &QuadOptions::default()).unwrap();
        assert!(matches!(t, TailIntegral::Divergent { .. }));
    }
}
