//! Numeric membership tests: the doubling class D̂, almost monotonicity,
//! weak normality and its order, the Bekollé–Bonami B₂(η) profile, and the
//! measure μ with a_n(v)·m_n(μ) ≈ n^{−α−1}.
//!
//! Verdicts are evidence at a stated grid resolution, not proofs. "Almost
//! decreasing" means: the comparability constant of the running-infimum
//! envelope changes by at most 5% across two successive dyadic refinements.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kernel::looks_bounded;
use crate::moments::{ln_moment_real, moment};
use crate::quadrature::{integrate_ln, tail_integral_ln, QuadOptions, TailIntegral};
use crate::shift::shift;
use crate::special::ln_add_exp;
use crate::weight::{DiscreteMeasure, PiecewiseConstant, Pt, WeightDensity};

/// Ratio level at which a growing doubling profile is called divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1e3;
const FLAT: f64 = 1.05;

/// ln v_x on the given points; x = 0 is v itself.
fn ln_shift_values(v: &WeightDensity, x: f64, pts: &[Pt]) -> Result<Vec<f64>> {
    if x == 0.0 {
        return Ok(pts.iter().map(|p| v.ln_eval_pt(*p)).collect());
    }
    let s = shift(v.clone(), x)?;
    pts.iter().map(|p| Ok(s.exact_ln(*p)?.ln_value)).collect()
}

fn span(ln_values: &[f64]) -> (f64, f64) {
    let lo = ln_values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ln_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Indices of the rows in the last two octaves of the grid.
fn tail_indices(pts: &[Pt]) -> Vec<usize> {
    let omt_min = pts.iter().map(|p| p.omt).fold(f64::INFINITY, f64::min);
    (0..pts.len()).filter(|&i| pts[i].omt <= 4.0 * omt_min * (1.0 + 1e-12)).collect()
}

// ---------------------------------------------------------------------------
// Doubling class

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DoublingVerdict {
    InDhat,
    NotDhat,
    Inconclusive,
}

impl DoublingVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            DoublingVerdict::InDhat => "IN_DHAT",
            DoublingVerdict::NotDhat => "NOT_DHAT",
            DoublingVerdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublingRow {
    pub t: f64,
    pub ln_ratio: f64,
    /// v̂(t)/v̂((1+t)/2); may overflow to +∞ while `ln_ratio` stays finite.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublingReport {
    pub rows: Vec<DoublingRow>,
    pub doubling_constant: f64,
    pub ln_doubling_constant: f64,
    pub verdict: DoublingVerdict,
    pub threshold: f64,
}

/// Sup over the grid of v̂(t)/v̂((1+t)/2).
///
/// IN_DHAT when the ratio is flat (within 5%) over the last two octaves,
/// NOT_DHAT when it is nondecreasing there and ends above 10³.
pub fn doubling_check(v: &WeightDensity, grid: &Grid) -> Result<DoublingReport> {
    doubling_check_of_shift(v, 0.0, grid)
}

/// [`doubling_check`] applied to v_x, evaluated without nesting quadratures
/// since (v_x)^ = v_{x+1}.
pub fn doubling_check_of_shift(v: &WeightDensity, x: f64, grid: &Grid) -> Result<DoublingReport> {
    if grid.is_empty() {
        return Err(Error::param("grid", "empty grid"));
    }
    let hat = shift(v.clone(), x + 1.0)?;
    let mut rows = Vec::with_capacity(grid.len());
    for p in grid.points() {
        let a = hat.exact_ln(*p)?.ln_value;
        let b = hat.exact_ln(Pt::from_omt(0.5 * p.omt))?.ln_value;
        let ln_ratio = a - b;
        rows.push(DoublingRow {
            t: p.t,
            ln_ratio,
            ratio: ln_ratio.exp(),
        });
    }
    let tail: Vec<f64> = tail_indices(grid.points()).into_iter().map(|i| rows[i].ln_ratio).collect();
    let verdict = doubling_verdict(&tail);
    let ln_c = rows.iter().map(|r| r.ln_ratio).fold(f64::NEG_INFINITY, f64::max);
    Ok(DoublingReport {
        rows,
        doubling_constant: ln_c.exp(),
        ln_doubling_constant: ln_c,
        verdict,
        threshold: DIVERGENCE_THRESHOLD,
    })
}

fn doubling_verdict(tail: &[f64]) -> DoublingVerdict {
    if tail.is_empty() || tail.iter().any(|x| x.is_nan()) {
        return DoublingVerdict::Inconclusive;
    }
    let (lo, hi) = span(tail);
    if hi.is_finite() && hi - lo <= FLAT.ln() {
        return DoublingVerdict::InDhat;
    }
    let growing = tail.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    if growing && *tail.last().unwrap() >= DIVERGENCE_THRESHOLD.ln() {
        DoublingVerdict::NotDhat
    } else {
        DoublingVerdict::Inconclusive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceRow {
    pub t: f64,
    /// (1 − t)·v̂(t) / ∫_t^1 v̂
    pub m: f64,
    pub left_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub rows: Vec<EquivalenceRow>,
    pub m_sup: f64,
    /// ∫_t^1 v̂ ≤ (1 − t)·v̂(t) at every node; this holds for every weight.
    pub left_inequality_holds: bool,
    pub m_bounded: bool,
    pub doubling_verdict: DoublingVerdict,
    /// M bounded exactly when the doubling verdict is IN_DHAT.
    pub consistent: bool,
}

/// The empirical M in (1 − t)v̂(t) ≤ M ∫_t^1 v̂, next to the doubling verdict.
pub fn doubling_equivalence_check(v: &WeightDensity, grid: &Grid) -> Result<EquivalenceReport> {
    let verdict = doubling_check(v, grid)?.verdict;
    let pts = grid.points();
    let hat = ln_shift_values(v, 1.0, pts)?;
    let two = ln_shift_values(v, 2.0, pts)?;
    let mut rows = Vec::with_capacity(pts.len());
    for (i, p) in pts.iter().enumerate() {
        let ln_m = p.ln_omt() + hat[i] - two[i];
        rows.push(EquivalenceRow {
            t: p.t,
            m: ln_m.exp(),
            left_holds: ln_m >= -1e-9,
        });
    }
    let ms: Vec<f64> = rows.iter().map(|r| r.m).collect();
    let m_sup = ms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let m_bounded = m_sup.is_finite() && looks_bounded(&ms);
    Ok(EquivalenceReport {
        left_inequality_holds: rows.iter().all(|r| r.left_holds),
        m_sup,
        m_bounded,
        consistent: m_bounded == (verdict == DoublingVerdict::InDhat),
        doubling_verdict: verdict,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioSample {
    pub t: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioBand {
    pub rows: Vec<RatioSample>,
    pub min: f64,
    pub max: f64,
    /// max(max, 1/min): the ratio lies in [1/c, c].
    pub c: f64,
    pub pass: bool,
}

impl RatioBand {
    fn from_ln(ts: &[f64], ln_ratio: &[f64]) -> RatioBand {
        let rows: Vec<RatioSample> = ts
            .iter()
            .zip(ln_ratio)
            .map(|(&t, l)| RatioSample { t, ratio: l.exp() })
            .collect();
        let vals: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
        let inv: Vec<f64> = vals.iter().map(|r| 1.0 / r).collect();
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let c = max.max(1.0 / min);
        RatioBand {
            pass: c.is_finite() && min > 0.0 && looks_bounded(&vals) && looks_bounded(&inv),
            rows,
            min,
            max,
            c,
        }
    }
}

/// v_{x+1}(t) / ((1 − t)^x v̂(t)) for v ∈ D̂.
pub fn vx_doubling_asymptotic_check(v: &WeightDensity, x: f64, grid: &Grid) -> Result<RatioBand> {
    if !(x >= 0.0) {
        return Err(Error::param("x", format!("need x ≥ 0, got {x}")));
    }
    let d = doubling_check(v, grid)?;
    if d.verdict != DoublingVerdict::InDhat {
        return Err(Error::Precondition(format!("weight is not in D̂ on this grid ({})", d.verdict.as_str())));
    }
    let pts = grid.points();
    let hat = ln_shift_values(v, 1.0, pts)?;
    let lifted = ln_shift_values(v, x + 1.0, pts)?;
    let ln_r: Vec<f64> = (0..pts.len()).map(|i| lifted[i] - x * pts[i].ln_omt() - hat[i]).collect();
    Ok(RatioBand::from_ln(&grid.t_values(), &ln_r))
}

// ---------------------------------------------------------------------------
// Almost monotone envelopes

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneEnvelope {
    pub source: String,
    pub t: Vec<f64>,
    pub ln_f: Vec<f64>,
    /// ln g with g(t) = min{f(s) : s ≤ t} over the grid.
    pub ln_g: Vec<f64>,
    /// C = max f/g, so f ≤ C·g at every node.
    pub c: f64,
    pub ln_c: f64,
}

impl MonotoneEnvelope {
    /// Envelope of f given as ln f on points ordered by increasing t.
    pub fn from_ln(source: &str, t: Vec<f64>, ln_f: Vec<f64>) -> Result<MonotoneEnvelope> {
        if t.len() != ln_f.len() || t.is_empty() {
            return Err(Error::param("grid", "need one value per grid point"));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("grid", "grid points must increase"));
        }
        if ln_f.iter().any(|x| x.is_nan() || *x == f64::INFINITY) {
            return Err(Error::Domain(format!("{source}: function is not finite and non-negative on the grid")));
        }
        let mut ln_g = Vec::with_capacity(ln_f.len());
        let mut run = f64::INFINITY;
        let mut ln_c: f64 = 0.0;
        for &lf in &ln_f {
            run = run.min(lf);
            ln_g.push(run);
            if lf > run {
                ln_c = ln_c.max(lf - run);
            }
        }
        Ok(MonotoneEnvelope {
            source: source.to_string(),
            t,
            ln_f,
            ln_g,
            c: ln_c.exp(),
            ln_c,
        })
    }

    pub fn f(&self) -> Vec<f64> {
        self.ln_f.iter().map(|x| x.exp()).collect()
    }

    pub fn g(&self) -> Vec<f64> {
        self.ln_g.iter().map(|x| x.exp()).collect()
    }
}

/// Running-infimum envelope of a non-negative f sampled on `grid`.
pub fn almost_monotone_envelope(source: &str, grid: &Grid, f: impl Fn(Pt) -> f64) -> Result<MonotoneEnvelope> {
    let mut ln_f = Vec::with_capacity(grid.len());
    for p in grid.points() {
        let y = f(*p);
        if !(y >= 0.0) {
            return Err(Error::Domain(format!("{source}: f({}) = {y} is not non-negative", p.t)));
        }
        ln_f.push(y.ln());
    }
    MonotoneEnvelope::from_ln(source, grid.t_values(), ln_f)
}

/// Resolution of the almost-decreasing test. Three nested dyadic grids are
/// used: depth k_max − 4 with `per_octave` points per octave, k_max − 2 with
/// twice as many, and k_max with four times as many.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeOptions {
    pub t0: f64,
    pub k_max: u32,
    pub per_octave: u32,
    /// Allowed relative change of C between successive refinements.
    pub stability: f64,
}

impl Default for EnvelopeOptions {
    fn default() -> Self {
        EnvelopeOptions {
            t0: 0.5,
            k_max: 20,
            per_octave: 16,
            stability: 0.05,
        }
    }
}

impl EnvelopeOptions {
    pub fn with_t0(mut self, t0: f64) -> Self {
        self.t0 = t0;
        self
    }

    /// The finest grid, on which every coarser level is a subsample.
    pub fn finest_grid(&self) -> Result<Grid> {
        if self.k_max < 5 || (1.0 - self.t0).log2() + self.k_max as f64 <= 4.0 {
            return Err(Error::param("k_max", "grid too shallow for three refinement levels"));
        }
        Grid::dyadic(self.t0, self.k_max, 4 * self.per_octave)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementLevel {
    pub k_max: u32,
    pub per_octave: u32,
    pub points: usize,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlmostDecreasingReport {
    pub levels: Vec<RefinementLevel>,
    /// C on the finest grid.
    pub c: f64,
    pub stable: bool,
    #[serde(skip)]
    pub envelope: MonotoneEnvelope,
}

/// Almost-decreasing verdict for ln f sampled on [`EnvelopeOptions::finest_grid`].
pub fn almost_decreasing_from_samples(source: &str, pts: &[Pt], ln_f: &[f64], opts: &EnvelopeOptions) -> Result<AlmostDecreasingReport> {
    let mut levels = Vec::with_capacity(3);
    let mut ln_cs = Vec::with_capacity(3);
    for j in 0..3u32 {
        let stride = 1usize << (2 - j);
        let k = opts.k_max - 2 * (2 - j);
        let floor = (-(k as f64)).exp2() * (1.0 - 1e-12);
        let idx: Vec<usize> = (0..pts.len()).step_by(stride).filter(|&i| pts[i].omt >= floor).collect();
        let env = MonotoneEnvelope::from_ln(
            source,
            idx.iter().map(|&i| pts[i].t).collect(),
            idx.iter().map(|&i| ln_f[i]).collect(),
        )?;
        ln_cs.push(env.ln_c);
        levels.push(RefinementLevel {
            k_max: k,
            per_octave: opts.per_octave << j,
            points: idx.len(),
            c: env.c,
        });
    }
    let envelope = MonotoneEnvelope::from_ln(source, pts.iter().map(|p| p.t).collect(), ln_f.to_vec())?;
    let tol = (1.0 + opts.stability).ln();
    let stable = ln_cs.iter().all(|c| c.is_finite()) && ln_cs.windows(2).all(|w| (w[1] - w[0]).abs() <= tol);
    Ok(AlmostDecreasingReport {
        levels,
        c: envelope.c,
        stable,
        envelope,
    })
}

/// Almost-decreasing verdict for f given by its logarithm.
pub fn almost_decreasing(source: &str, ln_f: impl Fn(Pt) -> f64, opts: &EnvelopeOptions) -> Result<AlmostDecreasingReport> {
    let grid = opts.finest_grid()?;
    let vals: Vec<f64> = grid.points().iter().map(|p| ln_f(*p)).collect();
    almost_decreasing_from_samples(source, grid.points(), &vals, opts)
}

// ---------------------------------------------------------------------------
// Weak normality

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeaklyNormalReport {
    pub alpha: f64,
    pub x: f64,
    pub t0: f64,
    pub c: f64,
    pub pass: bool,
    pub levels: Vec<RefinementLevel>,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(Error::param(
            "alpha",
            format!("a weight cannot be weakly normal of order α ≤ −1 (got {alpha})"),
        ));
    }
    Ok(())
}

fn ratio_samples(pts: &[Pt], ln_vx: &[f64], alpha: f64, x: f64) -> Vec<f64> {
    pts.iter().zip(ln_vx).map(|(p, l)| (alpha + x) * p.ln_omt() - l).collect()
}

fn weakly_normal_inner(v: &WeightDensity, alpha: f64, x: f64, opts: &EnvelopeOptions) -> Result<AlmostDecreasingReport> {
    check_alpha(alpha)?;
    if !(x >= 0.0) {
        return Err(Error::param("x", format!("need x ≥ 0, got {x}")));
    }
    let grid = opts.finest_grid()?;
    let ln_vx = ln_shift_values(v, x, grid.points())?;
    let ln_f = ratio_samples(grid.points(), &ln_vx, alpha, x);
    almost_decreasing_from_samples(&format!("(1-t)^{}/v_{}", alpha + x, x), grid.points(), &ln_f, opts)
}

fn weakly_normal_report(alpha: f64, x: f64, opts: &EnvelopeOptions, r: AlmostDecreasingReport) -> WeaklyNormalReport {
    WeaklyNormalReport {
        alpha,
        x,
        t0: opts.t0,
        c: r.c,
        pass: r.stable,
        levels: r.levels,
    }
}

/// Whether (1 − t)^{α+x}/v_x(t) is almost decreasing on [t0, 1).
pub fn weakly_normal_check(v: &WeightDensity, alpha: f64, x: f64, opts: &EnvelopeOptions) -> Result<WeaklyNormalReport> {
    let r = weakly_normal_inner(v, alpha, x, opts)?;
    Ok(weakly_normal_report(alpha, x, opts, r))
}

/// Default α scan for the order search: −0.75, −0.5, …, 10.
pub fn default_alpha_grid() -> Vec<f64> {
    (0..=43).map(|k| -0.75 + 0.25 * k as f64).collect()
}

pub const DEFAULT_SHIFT_ORDERS: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeaklyNormalCandidate {
    pub alpha: f64,
    pub x: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderSearch {
    /// Every passing (α, x) pair with its constant.
    pub candidates: Vec<WeaklyNormalCandidate>,
    pub tested: usize,
    /// The smallest passing α.
    pub order_estimate: Option<f64>,
}

/// Scans α × x and keeps the pairs for which the weak-normality test passes.
pub fn weak_normality_order(v: &WeightDensity, alphas: &[f64], xs: &[f64], opts: &EnvelopeOptions) -> Result<OrderSearch> {
    for &a in alphas {
        check_alpha(a)?;
    }
    let grid = opts.finest_grid()?;
    let mut candidates = Vec::new();
    for &x in xs {
        let ln_vx = ln_shift_values(v, x, grid.points())?;
        for &alpha in alphas {
            let ln_f = ratio_samples(grid.points(), &ln_vx, alpha, x);
            if ln_f.iter().any(|l| l.is_nan() || *l == f64::INFINITY) {
                continue;
            }
            let r = almost_decreasing_from_samples("order search", grid.points(), &ln_f, opts)?;
            if r.stable {
                candidates.push(WeaklyNormalCandidate { alpha, x, c: r.c });
            }
        }
    }
    let order_estimate = candidates.iter().map(|c| c.alpha).reduce(f64::min);
    Ok(OrderSearch {
        candidates,
        tested: alphas.len() * xs.len(),
        order_estimate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftPropagationReport {
    pub alpha: f64,
    pub x: f64,
    pub y: f64,
    pub c_base: f64,
    pub c_shifted: f64,
    pub shifted_stable: bool,
    /// c_shifted ≤ c_base up to the refinement tolerance.
    pub bound_holds: bool,
    pub pass: bool,
}

/// Given weak normality at (α, x), tests (1 − t)^{α+x+y}/v_{x+y} and compares
/// the two constants.
pub fn weakly_normal_shift_check(v: &WeightDensity, alpha: f64, x: f64, y: f64, opts: &EnvelopeOptions) -> Result<ShiftPropagationReport> {
    if !(y >= 0.0) {
        return Err(Error::param("y", format!("need y ≥ 0, got {y}")));
    }
    let base = weakly_normal_inner(v, alpha, x, opts)?;
    if !base.stable {
        return Err(Error::Precondition(format!("not weakly normal at α = {alpha}, x = {x}")));
    }
    let shifted = weakly_normal_inner(v, alpha, x + y, opts)?;
    let bound_holds = shifted.c <= base.c * (1.0 + opts.stability);
    Ok(ShiftPropagationReport {
        alpha,
        x,
        y,
        c_base: base.c,
        c_shifted: shifted.c,
        shifted_stable: shifted.stable,
        bound_holds,
        pass: shifted.stable && bound_holds,
    })
}

// ---------------------------------------------------------------------------
// Bekollé–Bonami

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum B2Verdict {
    InB2,
    NotB2,
    Inconclusive,
}

impl B2Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            B2Verdict::InB2 => "IN_B2",
            B2Verdict::NotB2 => "NOT_B2",
            B2Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct B2Report {
    pub eta: f64,
    /// [∫_t^1 v · ∫_t^1 (1−s)^{2η}/v] / (1 − t)^{2η+2}
    pub rows: Vec<RatioSample>,
    pub lower: f64,
    pub upper: f64,
    pub verdict: B2Verdict,
    /// Where the inner integral diverged, if it did.
    pub failing_t: Option<f64>,
}

/// The B₂(η) ratio over the grid.
pub fn bekolle_b2_profile(v: &WeightDensity, eta: f64, grid: &Grid) -> Result<B2Report> {
    if !(eta > -1.0) {
        return Err(Error::param("eta", format!("need η > −1, got {eta}")));
    }
    let opts = QuadOptions::default();
    let ln_h = |y: f64| {
        let l = 2.0 * eta * y.ln() - v.ln_eval_pt(Pt::from_omt(y));
        if l.is_nan() {
            f64::INFINITY
        } else {
            l
        }
    };
    let not_b2 = |t: f64| B2Report {
        eta,
        rows: Vec::new(),
        lower: f64::NAN,
        upper: f64::NAN,
        verdict: B2Verdict::NotB2,
        failing_t: Some(t),
    };

    // Walk from the boundary inward, accumulating J(t) = ∫_0^{1−t} h.
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| grid.points()[a].omt.total_cmp(&grid.points()[b].omt));
    let breaks: Vec<f64> = v.breakpoints().iter().map(|b| 1.0 - b).collect();
    let mut ln_j = vec![f64::NAN; grid.len()];
    let mut acc = f64::NAN;
    let mut prev = 0.0;
    for &i in &order {
        let p = grid.points()[i];
        if acc.is_nan() {
            match tail_integral_ln(ln_h, p.omt, &opts) {
                Ok(TailIntegral::Converged(e)) => acc = e.ln_value,
                Ok(TailIntegral::Divergent { .. }) | Err(_) => return Ok(not_b2(p.t)),
            }
        } else if p.omt > prev {
            let mut seg = vec![prev];
            seg.extend(breaks.iter().copied().filter(|b| *b > prev && *b < p.omt));
            seg.push(p.omt);
            match integrate_ln(ln_h, &seg, &opts) {
                Ok(e) if e.ln_value.is_finite() || e.ln_value == f64::NEG_INFINITY => acc = ln_add_exp(acc, e.ln_value),
                _ => return Ok(not_b2(p.t)),
            }
        }
        if !acc.is_finite() {
            return Ok(not_b2(p.t));
        }
        ln_j[i] = acc;
        prev = p.omt;
    }
    let hat = ln_shift_values(v, 1.0, grid.points())?;
    let ln_r: Vec<f64> = grid
        .points()
        .iter()
        .enumerate()
        .map(|(i, p)| hat[i] + ln_j[i] - (2.0 * eta + 2.0) * p.ln_omt())
        .collect();
    let band = RatioBand::from_ln(&grid.t_values(), &ln_r);
    let (lo, hi) = span(&ln_r);
    let verdict = if band.pass {
        B2Verdict::InB2
    } else if hi - lo >= DIVERGENCE_THRESHOLD.ln() {
        B2Verdict::NotB2
    } else {
        B2Verdict::Inconclusive
    };
    Ok(B2Report {
        eta,
        rows: band.rows,
        lower: band.min,
        upper: band.max,
        verdict,
        failing_t: None,
    })
}

// ---------------------------------------------------------------------------
// Pairing measure

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairingOptions {
    pub envelope: EnvelopeOptions,
    pub n_min: usize,
    pub n_max: usize,
    /// Allowed relative change of the band ends under refinement.
    pub band_stability: f64,
}

impl Default for PairingOptions {
    fn default() -> Self {
        PairingOptions {
            envelope: EnvelopeOptions::default(),
            n_min: 16,
            n_max: 256,
            band_stability: 0.10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandRow {
    pub n: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Band {
    pub rows: Vec<BandRow>,
    pub min: f64,
    pub max: f64,
    pub bounded: bool,
}

impl Band {
    pub(crate) fn from_ln(ns: &[usize], ln_values: &[f64]) -> Band {
        let rows: Vec<BandRow> = ns.iter().zip(ln_values).map(|(&n, l)| BandRow { n, value: l.exp() }).collect();
        let vals: Vec<f64> = rows.iter().map(|r| r.value).collect();
        let inv: Vec<f64> = vals.iter().map(|x| 1.0 / x).collect();
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Band {
            bounded: min > 0.0 && max.is_finite() && looks_bounded(&vals) && looks_bounded(&inv),
            rows,
            min,
            max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairingReport {
    pub alpha: f64,
    pub x_requested: f64,
    /// The shift order actually used; at least 1.
    pub x_used: f64,
    pub envelope_c: f64,
    pub total_mass: f64,
    pub atom_at_one: f64,
    /// a_n(v)·m_n(μ)·n^{α+1}
    pub band: Band,
    /// n^x·a_n(v_x)·m_n(μ)·n^{α+1}
    pub shifted_band: Band,
    /// The same band for μ built on every other grid point.
    pub coarse_band: Band,
    pub stable: bool,
    /// ∫_0^1 tⁿ g / ∫_{1−1/n}^1 g, the moment-window comparison for g.
    pub window_g: Band,
    /// ∫_0^1 tⁿ v_x / ∫_{1−1/n}^1 v_x.
    pub window_vx: Band,
    /// Set when either window comparison does not look bounded.
    pub window_flag: bool,
    pub pass: bool,
}

/// Builds μ with μ([t, 1]) = g(t) from the running-infimum envelope of
/// (1 − t)^{α+x}/v_x and verifies a_n(v)·m_n(μ) ≈ n^{−α−1} on [n_min, n_max].
///
/// Shift orders x < 1 are lifted to x = 1, which keeps weak normality.
pub fn construct_pairing_measure(
    v: &WeightDensity,
    alpha: f64,
    x: f64,
    opts: &PairingOptions,
) -> Result<(DiscreteMeasure, PairingReport)> {
    check_alpha(alpha)?;
    if opts.n_min < 1 || opts.n_max < opts.n_min + 8 {
        return Err(Error::param("n", "need 1 ≤ n_min and n_max ≥ n_min + 8"));
    }
    let x_used = x.max(1.0);
    let env_opts = opts.envelope;
    let wn = weakly_normal_inner(v, alpha, x_used, &env_opts)?;
    if !wn.stable {
        return Err(Error::Precondition(format!(
            "not weakly normal at α = {alpha}, x = {x_used} (constants {:?})",
            wn.levels.iter().map(|l| l.c).collect::<Vec<_>>()
        )));
    }
    let dgrid = Grid::dyadic(env_opts.t0, env_opts.k_max, 8)?;
    let dbl = doubling_check_of_shift(v, x_used - 1.0, &dgrid)?;
    if dbl.verdict != DoublingVerdict::InDhat {
        return Err(Error::Precondition(format!(
            "v_{} is not in D̂ ({})",
            x_used - 1.0,
            dbl.verdict.as_str()
        )));
    }

    let env = &wn.envelope;
    let all: Vec<usize> = (0..env.t.len()).collect();
    let coarse: Vec<usize> = (0..env.t.len()).step_by(2).collect();
    let mu = measure_from_envelope(env, &all)?;
    let mu_coarse = measure_from_envelope(env, &coarse)?;

    let ns: Vec<usize> = (opts.n_min..=opts.n_max).collect();
    let mut ln_a = Vec::with_capacity(ns.len());
    let mut ln_ax = Vec::with_capacity(ns.len());
    let vx = shift(v.clone(), x_used)?.into_density();
    for &n in &ns {
        ln_a.push(moment(v, n)?.ln_value);
        ln_ax.push(ln_moment_real(&vx, n as f64)?.ln_value);
    }
    let band_of = |mu: &DiscreteMeasure, ln_a: &[f64], extra: f64| -> Result<Band> {
        let mut vals = Vec::with_capacity(ns.len());
        for (k, &n) in ns.iter().enumerate() {
            let ln_n = (n as f64).ln();
            vals.push(ln_a[k] + mu.ln_moment(n as f64)? + (alpha + 1.0 + extra) * ln_n);
        }
        Ok(Band::from_ln(&ns, &vals))
    };
    let band = band_of(&mu, &ln_a, 0.0)?;
    let shifted_band = band_of(&mu, &ln_ax, x_used)?;
    let coarse_band = band_of(&mu_coarse, &ln_a, 0.0)?;
    let close = |a: f64, b: f64| (a / b - 1.0).abs() <= opts.band_stability;
    let stable = close(band.min, coarse_band.min) && close(band.max, coarse_band.max);

    // Moment-window comparisons at dyadic n.
    let wn_list: Vec<usize> = (0..)
        .map(|k| opts.n_min << k)
        .take_while(|&n| n <= opts.n_max)
        .collect();
    let g_step = envelope_step_density(env)?;
    let vx1 = shift(v.clone(), x_used + 1.0)?;
    let mut win_g = Vec::with_capacity(wn_list.len());
    let mut win_v = Vec::with_capacity(wn_list.len());
    for &n in &wn_list {
        let w = 1.0 / n as f64;
        win_g.push(g_step.ln_moment(n as f64) - ln_step_tail(env, w));
        win_v.push(ln_moment_real(&vx, n as f64)?.ln_value - vx1.exact_ln(Pt::from_omt(w))?.ln_value);
    }
    let window_g = Band::from_ln(&wn_list, &win_g);
    let window_vx = Band::from_ln(&wn_list, &win_v);
    let window_flag = !(window_g.bounded && window_vx.bounded);

    let atom_at_one = mu.atoms().iter().filter(|a| a.0 == 1.0).map(|a| a.1).sum();
    let report = PairingReport {
        alpha,
        x_requested: x,
        x_used,
        envelope_c: wn.c,
        total_mass: mu.ln_moment(0.0)?.exp(),
        atom_at_one,
        pass: band.bounded && shifted_band.bounded && stable,
        band,
        shifted_band,
        coarse_band,
        stable,
        window_g,
        window_vx,
        window_flag,
    };
    Ok((mu, report))
}

/// μ with μ([t_i, 1]) = g(t_i) at the selected nodes: density
/// (g_i − g_{i+1})/(t_{i+1} − t_i) between nodes and an atom g(t_last) at 1.
fn measure_from_envelope(env: &MonotoneEnvelope, idx: &[usize]) -> Result<DiscreteMeasure> {
    let last = *idx.last().ok_or_else(|| Error::param("grid", "empty envelope"))?;
    let mut knots = Vec::with_capacity(idx.len());
    let mut dens = Vec::with_capacity(idx.len());
    for w in idx.windows(2) {
        let (i, j) = (w[0], w[1]);
        let drop = env.ln_g[i].exp() * -(env.ln_g[j] - env.ln_g[i]).exp_m1();
        knots.push(env.t[i]);
        dens.push(drop.max(0.0) / (env.t[j] - env.t[i]));
    }
    knots.push(env.t[last]);
    let density = if dens.iter().any(|d| *d > 0.0) {
        Some(WeightDensity::PiecewiseConstant(PiecewiseConstant::new(knots, dens)?))
    } else {
        None
    };
    DiscreteMeasure::new(vec![(1.0, env.ln_g[last].exp())], density)
}

/// g as a step function on [0, 1]: g(t0) below t0, g_i on [t_i, t_{i+1}),
/// g(t_last) up to 1.
fn envelope_step_density(env: &MonotoneEnvelope) -> Result<PiecewiseConstant> {
    let mut knots = Vec::with_capacity(env.t.len() + 2);
    let mut vals = Vec::with_capacity(env.t.len() + 1);
    if env.t[0] > 0.0 {
        knots.push(0.0);
        vals.push(env.ln_g[0].exp());
    }
    for (i, &t) in env.t.iter().enumerate() {
        knots.push(t);
        vals.push(env.ln_g[i].exp());
    }
    knots.push(1.0);
    PiecewiseConstant::new(knots, vals)
}

/// ln ∫_{1−w}^1 g for the step function of [`envelope_step_density`].
fn ln_step_tail(env: &MonotoneEnvelope, w: f64) -> f64 {
    let a = 1.0 - w;
    let mut acc = f64::NEG_INFINITY;
    let n = env.t.len();
    for i in 0..n {
        let lo = env.t[i].max(a);
        let hi = if i + 1 < n { env.t[i + 1] } else { 1.0 };
        if hi > lo {
            acc = ln_add_exp(acc, env.ln_g[i] + (hi - lo).ln());
        }
    }
    if a < env.t[0] {
        acc = ln_add_exp(acc, env.ln_g[0] + (env.t[0] - a).ln());
    }
    acc
}

// ---------------------------------------------------------------------------
// The exponential cusp

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CuspRow {
    pub t: f64,
    /// (1 − t)² v(t) / v̂(t)
    pub ratio: f64,
    pub lower: f64,
    pub upper: f64,
    pub in_band: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterateBand {
    pub n: u32,
    /// v_N(t) / ((1 − t)^{2N} v(t)) over the grid.
    pub band: RatioBand,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CuspReport {
    pub beta: f64,
    pub rows: Vec<CuspRow>,
    pub band_holds: bool,
    pub iterates: Vec<IterateBand>,
    pub pass: bool,
}

/// For v = (1 − t)^β e^{−1/(1−t)}: (1 − t)²v/v̂ ∈ [1, 1 + (β+2)(1 − t)]
/// (reversed when β + 2 < 0), and v_N ≈ (1 − t)^{2N} v for N = 1, 2.
pub fn exp_example_check(beta: f64, grid: &Grid) -> Result<CuspReport> {
    let v = WeightDensity::exp_cusp(beta)?;
    let pts = grid.points();
    let hat = ln_shift_values(&v, 1.0, pts)?;
    let slack = 1e-8;
    let mut rows = Vec::with_capacity(pts.len());
    for (i, p) in pts.iter().enumerate() {
        let ratio = (2.0 * p.ln_omt() + v.ln_eval_pt(*p) - hat[i]).exp();
        let edge = 1.0 + (beta + 2.0) * p.omt;
        let (lower, upper) = if beta + 2.0 >= 0.0 { (1.0, edge) } else { (edge, 1.0) };
        rows.push(CuspRow {
            t: p.t,
            ratio,
            lower,
            upper,
            in_band: ratio >= lower * (1.0 - slack) && ratio <= upper * (1.0 + slack),
        });
    }
    let mut iterates = Vec::with_capacity(2);
    for n in [1u32, 2] {
        let vn = if n == 1 { hat.clone() } else { ln_shift_values(&v, 2.0, pts)? };
        let ln_r: Vec<f64> = pts
            .iter()
            .enumerate()
            .map(|(i, p)| vn[i] - 2.0 * n as f64 * p.ln_omt() - v.ln_eval_pt(*p))
            .collect();
        iterates.push(IterateBand {
            n,
            band: RatioBand::from_ln(&grid.t_values(), &ln_r),
        });
    }
    let band_holds = rows.iter().all(|r| r.in_band);
    Ok(CuspReport {
        beta,
        pass: band_holds && iterates.iter().all(|b| b.band.pass),
        rows,
        band_holds,
        iterates,
    })
}

// ---------------------------------------------------------------------------
// Combined report

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub name: String,
    pub t0: f64,
    pub k_max: u32,
    pub per_octave: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifyOptions {
    pub envelope: EnvelopeOptions,
    pub alphas: Vec<f64>,
    pub xs: Vec<f64>,
    pub etas: Vec<f64>,
    /// Points per octave of the doubling and B₂ grid, which starts at t = 0.
    pub profile_per_octave: u32,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            envelope: EnvelopeOptions::default(),
            alphas: default_alpha_grid(),
            xs: DEFAULT_SHIFT_ORDERS.to_vec(),
            etas: vec![0.0, 0.5, 1.0, 2.0],
            profile_per_octave: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub doubling_constant: f64,
    pub doubling_verdict: DoublingVerdict,
    pub weakly_normal_candidates: Vec<WeaklyNormalCandidate>,
    pub order_estimate: Option<f64>,
    pub b2_profile: Vec<B2Report>,
    pub grids: Vec<GridSpec>,
}

/// Doubling verdict, weak-normality order search and B₂ profiles in one pass.
pub fn classify(v: &WeightDensity, opts: &ClassifyOptions) -> Result<ClassificationReport> {
    let k_max = opts.envelope.k_max;
    let profile = Grid::dyadic(0.0, k_max, opts.profile_per_octave)?;
    let d = doubling_check(v, &profile)?;
    let search = weak_normality_order(v, &opts.alphas, &opts.xs, &opts.envelope)?;
    let b2 = opts
        .etas
        .iter()
        .map(|&eta| bekolle_b2_profile(v, eta, &profile))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassificationReport {
        doubling_constant: d.doubling_constant,
        doubling_verdict: d.verdict,
        weakly_normal_candidates: search.candidates,
        order_estimate: search.order_estimate,
        b2_profile: b2,
        grids: vec![
            GridSpec {
                name: "profile".into(),
                t0: 0.0,
                k_max,
                per_octave: opts.profile_per_octave,
            },
            GridSpec {
                name: "envelope".into(),
                t0: opts.envelope.t0,
                k_max,
                per_octave: 4 * opts.envelope.per_octave,
            },
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::ln_gamma;

    fn profile_grid() -> Grid {
        Grid::dyadic(0.0, 20, 4).unwrap()
    }

    #[test]
    fn doubling_power() {
        for alpha in [0.0, 1.0, -0.5, 2.5] {
            let r = doubling_check(&WeightDensity::power(alpha).unwrap(), &profile_grid()).unwrap();
            assert_eq!(r.verdict, DoublingVerdict::InDhat);
            let exact = 2f64.powf(alpha + 1.0);
            for row in &r.rows {
                assert!((row.ratio / exact - 1.0).abs() < 1e-12, "α={alpha} t={}: {}", row.t, row.ratio);
            }
        }
    }

    #[test]
    fn doubling_cusp_diverges() {
        let r = doubling_check(&WeightDensity::exp_cusp(0.0).unwrap(), &profile_grid()).unwrap();
        assert_eq!(r.verdict, DoublingVerdict::NotDhat);
        let first_big = r.rows.iter().find(|x| x.ratio > 1e3).unwrap();
        assert!(first_big.t < 0.9);
    }

    #[test]
    fn equivalence_constants() {
        for alpha in [0.0, 1.0, 2.5] {
            let r = doubling_equivalence_check(&WeightDensity::power(alpha).unwrap(), &profile_grid()).unwrap();
            assert!(r.left_inequality_holds && r.consistent);
            assert!((r.m_sup - (alpha + 2.0)).abs() < 1e-9, "{}", r.m_sup);
        }
        let r = doubling_equivalence_check(&WeightDensity::exp_cusp(0.0).unwrap(), &profile_grid()).unwrap();
        assert!(r.left_inequality_holds && !r.m_bounded && r.consistent);
    }

    #[test]
    fn vx_asymptotics() {
        let r = vx_doubling_asymptotic_check(&WeightDensity::unit(), 1.0, &profile_grid()).unwrap();
        assert!(r.rows.iter().all(|x| (x.ratio - 0.5).abs() < 1e-12) && r.pass);
        let alpha = 1.5;
        let exact = (ln_gamma(alpha + 2.0) - ln_gamma(alpha + 4.0)).exp();
        let r = vx_doubling_asymptotic_check(&WeightDensity::power(alpha).unwrap(), 2.0, &profile_grid()).unwrap();
        assert!(r.rows.iter().all(|x| (x.ratio / exact - 1.0).abs() < 1e-12));
        let r = vx_doubling_asymptotic_check(&WeightDensity::power_log(1.0, 1.0).unwrap(), 1.0, &profile_grid()).unwrap();
        assert!(r.pass, "{} {}", r.min, r.max);
        let e = vx_doubling_asymptotic_check(&WeightDensity::exp_cusp(0.0).unwrap(), 1.0, &profile_grid());
        assert!(matches!(e, Err(Error::Precondition(_))));
    }

    #[test]
    fn envelope_basics() {
        let g = Grid::tau_uniform(50, 0.0, 0.99).unwrap();
        let env = almost_monotone_envelope("decreasing", &g, |p| p.omt).unwrap();
        assert_eq!(env.c, 1.0);
        assert_eq!(env.ln_f, env.ln_g);
        let env = almost_monotone_envelope("bump", &g, |p| 1.0 + p.t * p.omt).unwrap();
        assert!(env.c > 1.0);
        for (f, g) in env.f().iter().zip(env.g()) {
            assert!(g <= *f);
        }
        assert!(env.ln_g.windows(2).all(|w| w[1] <= w[0]));
        assert!(almost_monotone_envelope("neg", &g, |_| -1.0).is_err());
    }

    #[test]
    fn oscillating_function_is_almost_decreasing() {
        // Dense running-minimum oracle.
        let n = 2_000_000;
        let mut run = f64::INFINITY;
        let mut c: f64 = 1.0;
        for i in 0..n {
            let t = i as f64 / n as f64;
            let f = 1.0 + 0.1 * (20.0 * t).sin();
            run = run.min(f);
            c = c.max(f / run);
        }
        assert!((c - 11.0 / 9.0).abs() < 1e-6);
        let opts = EnvelopeOptions::default().with_t0(0.0);
        let r = almost_decreasing("sin", |p| (1.0 + 0.1 * (20.0 * p.t).sin()).ln(), &opts).unwrap();
        assert!(r.stable, "{:?}", r.levels);
        assert!(r.c <= c * (1.0 + 1e-12) && r.c > c * 0.999, "{} vs {c}", r.c);

        let r = almost_decreasing("pole", |p| -p.ln_omt(), &opts).unwrap();
        assert!(!r.stable);
        assert!(r.levels.windows(2).all(|w| w[1].c > 3.0 * w[0].c));
    }

    #[test]
    fn weakly_normal_examples() {
        let opts = EnvelopeOptions::default();
        for alpha in [0.0, 1.0, -0.5] {
            let r = weakly_normal_check(&WeightDensity::power(alpha).unwrap(), alpha, 0.0, &opts).unwrap();
            assert!(r.pass && (r.c - 1.0).abs() < 1e-12);
        }
        let two_t = WeightDensity::factor(1.0, 0.0, WeightDensity::unit()).unwrap();
        let r = weakly_normal_check(&two_t, 0.0, 0.0, &opts).unwrap();
        assert!(r.pass && r.c == 1.0);
        assert!(weakly_normal_check(&two_t, -1.0, 0.0, &opts).is_err());

        let cusp = WeightDensity::exp_cusp(0.0).unwrap();
        for (alpha, x) in [(0.0, 0.0), (10.0, 4.0), (3.0, 1.0)] {
            let r = weakly_normal_check(&cusp, alpha, x, &opts).unwrap();
            assert!(!r.pass, "α={alpha} x={x}: {:?}", r.levels);
        }
    }

    #[test]
    fn order_search() {
        let opts = EnvelopeOptions::default();
        let alphas = default_alpha_grid();
        let s = weak_normality_order(&WeightDensity::power(1.0).unwrap(), &alphas, &DEFAULT_SHIFT_ORDERS, &opts).unwrap();
        assert_eq!(s.order_estimate, Some(1.0));
        let s = weak_normality_order(&WeightDensity::power_log(0.5, 1.0).unwrap(), &alphas, &[0.0, 1.0], &opts).unwrap();
        assert_eq!(s.order_estimate, Some(0.5));
        let s = weak_normality_order(&WeightDensity::exp_cusp(0.0).unwrap(), &alphas, &DEFAULT_SHIFT_ORDERS, &opts).unwrap();
        assert!(s.candidates.is_empty());
    }

    #[test]
    fn shift_propagation() {
        let opts = EnvelopeOptions::default();
        let v = WeightDensity::power(0.5).unwrap();
        for y in [1.0, 0.5] {
            let r = weakly_normal_shift_check(&v, 0.5, 0.0, y, &opts).unwrap();
            assert!(r.pass && (r.c_shifted - 1.0).abs() < 1e-9);
        }
        let r = weakly_normal_shift_check(&WeightDensity::power_log(0.0, 1.0).unwrap(), 0.0, 1.0, 1.0, &opts).unwrap();
        assert!(r.pass && r.c_shifted.is_finite(), "{r:?}");
    }

    #[test]
    fn b2_examples() {
        let g = profile_grid();
        let r = bekolle_b2_profile(&WeightDensity::unit(), 0.0, &g).unwrap();
        assert_eq!(r.verdict, B2Verdict::InB2);
        assert!(r.rows.iter().all(|x| (x.ratio - 1.0).abs() < 1e-9));
        for alpha in [0.5, 2.0] {
            let r = bekolle_b2_profile(&WeightDensity::power(alpha).unwrap(), alpha, &g).unwrap();
            let exact = 1.0 / ((alpha + 1.0) * (alpha + 1.0));
            assert!(r.rows.iter().all(|x| (x.ratio / exact - 1.0).abs() < 1e-8), "{:?}", r.rows[0]);
            assert_eq!(r.verdict, B2Verdict::InB2);
        }
        let r = bekolle_b2_profile(&WeightDensity::exp_cusp(0.0).unwrap(), 1.0, &g).unwrap();
        assert_eq!(r.verdict, B2Verdict::NotB2);
        // 1/v not integrable against (1 − s)^{2η} once 2η − α + 1 ≤ 0.
        let r = bekolle_b2_profile(&WeightDensity::power(2.0).unwrap(), 0.25, &g).unwrap();
        assert_eq!(r.verdict, B2Verdict::NotB2);
        assert!(r.failing_t.is_some());
    }

    #[test]
    fn pairing_measure_power() {
        let (mu, r) = construct_pairing_measure(&WeightDensity::unit(), 0.0, 0.0, &PairingOptions::default()).unwrap();
        assert_eq!(r.x_used, 1.0);
        assert!(mu.density().is_none());
        assert!((r.atom_at_one - 1.0).abs() < 1e-12);
        for row in &r.band.rows {
            let exact = row.n as f64 / (row.n as f64 + 1.0);
            assert!((row.value - exact).abs() < 1e-12);
        }
        assert!(r.pass && !r.window_flag);
    }

    #[test]
    fn pairing_measure_ball_unit_weight() {
        let two_t = WeightDensity::scaled(2.0, WeightDensity::factor(1.0, 0.0, WeightDensity::unit()).unwrap()).unwrap();
        let (mu, r) = construct_pairing_measure(&two_t, 0.0, 0.0, &PairingOptions::default()).unwrap();
        // g(t) = (1 − t)/(1 − t²) = 1/(1 + t): mass g(t0) = 2/3, atom ≈ 1/2.
        assert!((r.total_mass - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.atom_at_one - 0.5).abs() < 1e-6);
        assert!(mu.density().is_some());
        assert!(r.pass, "{:?} {:?}", r.band.min, r.band.max);
        let m256 = mu.moment(256).unwrap();
        assert!(m256 > 0.5 && m256 < 0.51);
    }

    #[test]
    fn pairing_measure_rejects_cusp() {
        let e = construct_pairing_measure(&WeightDensity::exp_cusp(0.0).unwrap(), 0.0, 1.0, &PairingOptions::default());
        assert!(matches!(e, Err(Error::Precondition(_))));
    }

    #[test]
    fn cusp_identity() {
        let g = Grid::from_points(&[0.5, 0.9, 0.99, 0.999]).unwrap();
        let r = exp_example_check(0.0, &g).unwrap();
        assert!(r.band_holds);
        let at = |t: f64| r.rows.iter().find(|x| x.t == t).unwrap().ratio;
        assert!((1.0..=1.2).contains(&at(0.9)));
        assert!(at(0.999) - 1.0 < 0.003);
        let r = exp_example_check(-2.0, &g).unwrap();
        assert!(r.rows.iter().all(|x| (x.ratio - 1.0).abs() < 1e-9));
        let r = exp_example_check(-3.0, &g).unwrap();
        assert!(r.band_holds);
        let r = exp_example_check(0.0, &profile_grid()).unwrap();
        assert!(r.pass, "{:?}", r.iterates.iter().map(|b| (b.band.min, b.band.max)).collect::<Vec<_>>());
    }
}
