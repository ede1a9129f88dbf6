//! Moment sequences a_n = ∫ tⁿ v(t) dt.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_ln, QuadOptions};
use crate::shift::ShiftBase;
use crate::special::{ln_beta, ln_gamma, ln_sum_exp};
use crate::weight::{Pt, WeightDensity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    ClosedForm,
    Quadrature,
}

impl Source {
    pub fn as_str(&self) -> &'static str {
        match self {
            Source::ClosedForm => "closed_form",
            Source::Quadrature => "quadrature",
        }
    }

    fn join(self, other: Source) -> Source {
        if self == Source::ClosedForm && other == Source::ClosedForm {
            Source::ClosedForm
        } else {
            Source::Quadrature
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moment {
    pub ln_value: f64,
    pub rel_error: f64,
    pub source: Source,
}

impl Moment {
    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }

    fn closed(ln_value: f64) -> Moment {
        Moment {
            ln_value,
            rel_error: 0.0,
            source: Source::ClosedForm,
        }
    }
}

/// a_n, by closed form where one exists and quadrature otherwise.
pub fn moment(v: &WeightDensity, n: usize) -> Result<Moment> {
    ln_moment_real(v, n as f64)
}

/// ∫ t^p v(t) dt for real p ≥ 0.
pub fn ln_moment_real(v: &WeightDensity, p: f64) -> Result<Moment> {
    if !(p >= 0.0) {
        return Err(Error::param("n", format!("moment order must be ≥ 0, got {p}")));
    }
    match v {
        WeightDensity::Power { alpha } => Ok(Moment::closed(ln_gamma(p + 1.0) + ln_gamma(alpha + 1.0) - ln_gamma(p + alpha + 2.0))),
        WeightDensity::Scaled { c, inner } => {
            let m = ln_moment_real(inner, p)?;
            Ok(Moment {
                ln_value: c.ln() + m.ln_value,
                ..m
            })
        }
        WeightDensity::Sum(parts) => {
            let ms = parts.iter().map(|v| ln_moment_real(v, p)).collect::<Result<Vec<_>>>()?;
            let ln_value = ln_sum_exp(&ms.iter().map(|m| m.ln_value).collect::<Vec<_>>());
            let rel_error = ms.iter().map(|m| m.rel_error * (m.ln_value - ln_value).exp()).sum();
            let source = ms.iter().fold(Source::ClosedForm, |s, m| s.join(m.source));
            Ok(Moment { ln_value, rel_error, source })
        }
        WeightDensity::Factor { t_pow, omt_pow, inner } if *omt_pow == 0.0 => ln_moment_real(inner, p + t_pow),
        WeightDensity::Factor {
            t_pow,
            omt_pow,
            inner,
        } if inner.is_closed_power().is_some() => {
            let alpha = inner.is_closed_power().unwrap();
            Ok(Moment::closed(ln_beta(p + t_pow + 1.0, alpha + omt_pow + 1.0)))
        }
        WeightDensity::PiecewiseConstant(pc) => Ok(Moment::closed(pc.ln_moment(p))),
        WeightDensity::Shifted(s) => {
            // ∫ t^p v_x = Γ(p+1)/Γ(p+x+1) · ∫ s^{p+x} dμ(s), by Fubini.
            let x = s.x();
            let base = match s.base() {
                ShiftBase::Density(d) => ln_moment_real(d, p + x)?,
                ShiftBase::Measure(m) => Moment::closed(m.ln_moment(p + x)?),
            };
            Ok(Moment {
                ln_value: ln_gamma(p + 1.0) - ln_gamma(p + x + 1.0) + base.ln_value,
                ..base
            })
        }
        _ => moment_quadrature(v, p, &QuadOptions::default()),
    }
}

/// ∫ t^p v(t) dt by adaptive quadrature in u = −ln t, whatever the family.
///
/// Panels are graded dyadically around the scale 1/(p+1) where the mass of
/// t^p v concentrates.
pub fn moment_quadrature(v: &WeightDensity, p: f64, opts: &QuadOptions) -> Result<Moment> {
    let q = p + 1.0;
    let scale = 1.0 / q;
    let mut breaks = vec![0.0];
    for k in -24..=6 {
        breaks.push(scale * 2f64.powi(k));
    }
    let u_max = scale * 64.0;
    for b in v.breakpoints() {
        let u = -b.ln();
        if u < u_max {
            breaks.push(u);
        }
    }
    let ln_f = |u: f64| {
        let pt = Pt {
            t: (-u).exp(),
            omt: -(-u).exp_m1(),
        };
        -q * u + v.ln_eval_pt(pt)
    };
    let est = integrate_ln(ln_f, &breaks, opts)?.require()?;
    if est.ln_value == f64::NEG_INFINITY {
        return Err(Error::Domain(format!("moment of {v} vanishes: density is degenerate")));
    }
    Ok(Moment {
        ln_value: est.ln_value,
        rel_error: est.rel_error,
        source: Source::Quadrature,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    pub values: Vec<f64>,
    pub log_values: Vec<f64>,
    pub sources: Vec<Source>,
    pub weight: WeightDensity,
}

impl MomentSequence {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Positivity, monotonicity and log-convexity (with 1e−10 slack).
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let l = &self.log_values;
        for (n, x) in l.iter().enumerate() {
            if !x.is_finite() {
                out.push(format!("a_{n} is not positive and finite"));
            }
        }
        for n in 0..l.len().saturating_sub(1) {
            if l[n + 1] > l[n] + 1e-12 {
                out.push(format!("a_{} > a_{}", n + 1, n));
            }
        }
        for n in 0..l.len().saturating_sub(2) {
            if 2.0 * l[n + 1] > l[n] + l[n + 2] + 1e-10 {
                out.push(format!("log-convexity fails at n = {n}"));
            }
        }
        out
    }
}

pub fn moment_sequence(v: &WeightDensity, n_max: usize) -> Result<MomentSequence> {
    let mut values = Vec::with_capacity(n_max + 1);
    let mut log_values = Vec::with_capacity(n_max + 1);
    let mut sources = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let m = moment(v, n).map_err(|e| match e {
            Error::Convergence { estimate, error, panels } => Error::Domain(format!(
                "moment a_{n} did not converge (estimate {estimate:e}, error {error:e}, {panels} panels)"
            )),
            other => other,
        })?;
        values.push(m.value());
        log_values.push(m.ln_value);
        sources.push(m.source);
    }
    Ok(MomentSequence {
        values,
        log_values,
        sources,
        weight: v.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    pub n: usize,
    pub ratio: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendReport {
    pub rows: Vec<RatioRow>,
    pub tolerance: f64,
    pub trend_decreasing: bool,
    pub pass: bool,
}

impl TrendReport {
    pub(crate) fn from_ratios(rows: Vec<RatioRow>, tolerance: f64) -> TrendReport {
        let trend_decreasing = rows.windows(2).all(|w| w[1].deviation <= w[0].deviation);
        let last_ok = rows.last().is_some_and(|r| r.deviation < tolerance);
        TrendReport {
            pass: trend_decreasing && last_ok,
            rows,
            tolerance,
            trend_decreasing,
        }
    }
}

/// Ratios ∫tⁿv / ∫tⁿw over `n_list`, for weights with v/w → 1 at 1.
pub fn moment_ratio_limit_check(v: &WeightDensity, w: &WeightDensity, n_list: &[usize], tolerance: f64) -> Result<TrendReport> {
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let ratio = (moment(v, n)?.ln_value - moment(w, n)?.ln_value).exp();
        rows.push(RatioRow {
            n,
            ratio,
            deviation: (ratio - 1.0).abs(),
        });
    }
    Ok(TrendReport::from_ratios(rows, tolerance))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let unit = WeightDensity::unit();
        assert!((moment(&unit, 3).unwrap().value() - 0.25).abs() < 1e-15);
        let s = moment_sequence(&WeightDensity::power(1.0).unwrap(), 2).unwrap();
        for (a, b) in s.values.iter().zip([0.5, 1.0 / 6.0, 1.0 / 12.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        let two_t = crate::weight::to_line_density(&crate::weight::RadialWeight::unit(2).unwrap());
        assert!((moment(&two_t, 2).unwrap().value() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn quadrature_matches_beta() {
        for alpha in [-0.5, 0.0, 1.0, 2.5] {
            let v = WeightDensity::power(alpha).unwrap();
            for n in [0usize, 1, 10, 100, 512, 4096] {
                let q = moment_quadrature(&v, n as f64, &QuadOptions::default()).unwrap();
                let c = moment(&v, n).unwrap();
                assert_eq!(c.source, Source::ClosedForm);
                assert!((q.ln_value - c.ln_value).abs() < 1e-9, "α={alpha} n={n}: {} vs {}", q.ln_value, c.ln_value);
            }
        }
    }

    #[test]
    fn exp_cusp_sequence_is_log_convex() {
        let s = moment_sequence(&WeightDensity::exp_cusp(0.0).unwrap(), 64).unwrap();
        assert!(s.sources.iter().all(|s| *s == Source::Quadrature));
        assert!(s.invariant_violations().is_empty(), "{:?}", s.invariant_violations());
    }

    #[test]
    fn ratio_check_examples() {
        let one = WeightDensity::unit();
        let r = moment_ratio_limit_check(&one, &one, &[1, 10], 1e-12).unwrap();
        assert!(r.rows.iter().all(|x| x.ratio == 1.0));

        // w(t) = 2 − t = 1 + (1 − t)
        let w = WeightDensity::sum(vec![WeightDensity::unit(), WeightDensity::power(1.0).unwrap()]).unwrap();
        let r = moment_ratio_limit_check(&one, &w, &[8, 16, 32, 64], 2e-2).unwrap();
        let exact = (1.0 / 65.0) / (2.0 / 65.0 - 1.0 / 66.0);
        assert!((r.rows[3].ratio - exact).abs() < 1e-13);
        assert!(r.pass);

        let r = moment_ratio_limit_check(
            &WeightDensity::power(1.0).unwrap(),
            &WeightDensity::power(2.0).unwrap(),
            &[8, 64, 512],
            0.05,
        )
        .unwrap();
        assert!(!r.pass);
    }
}
