//! Radial weights, their line densities on [0, 1] and finite measures.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::shift::ShiftedDensity;
use crate::special::{ln_add_exp, ln_sum_exp};

/// A point of [0, 1) carrying 1 − t separately, so that densities singular
/// or flat at 1 can be evaluated at distances far below f64 resolution of t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pt {
    pub t: f64,
    pub omt: f64,
}

impl Pt {
    pub fn new(t: f64) -> Pt {
        Pt { t, omt: 1.0 - t }
    }

    pub fn from_omt(omt: f64) -> Pt {
        Pt { t: 1.0 - omt, omt }
    }

    pub fn ln_t(&self) -> f64 {
        if self.omt < 0.5 {
            (-self.omt).ln_1p()
        } else {
            self.t.ln()
        }
    }

    pub fn ln_omt(&self) -> f64 {
        self.omt.ln()
    }

    /// τ = −ln(1 − t).
    pub fn tau(&self) -> f64 {
        -self.omt.ln()
    }
}

fn check_t(t: f64) -> Result<()> {
    if (0.0..1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::Domain(format!("density evaluated at t = {t}, outside [0, 1)")))
    }
}

/// Log-linearly interpolated table on a grid covering all of [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    t: Vec<f64>,
    ln_v: Vec<f64>,
}

impl Tabulated {
    pub fn new(t: Vec<f64>, values: Vec<f64>) -> Result<Tabulated> {
        if t.len() != values.len() || t.len() < 2 {
            return Err(Error::param("grid", "grid and values must have equal length ≥ 2"));
        }
        if t[0] != 0.0 || *t.last().unwrap() != 1.0 {
            return Err(Error::param("grid", "tabulated grid must start at 0 and end at 1 (no extrapolation)"));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("grid", "grid must be strictly increasing"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::param("values", "values must be finite and non-negative"));
        }
        let ln_v = values.iter().map(|v| v.ln()).collect();
        Ok(Tabulated { t, ln_v })
    }

    pub fn grid(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> Vec<f64> {
        self.ln_v.iter().map(|l| l.exp()).collect()
    }

    fn ln_eval(&self, t: f64) -> f64 {
        let i = match self.t.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => return self.ln_v[i],
            Err(i) => i,
        };
        let (a, b) = (self.t[i - 1], self.t[i]);
        let (la, lb) = (self.ln_v[i - 1], self.ln_v[i]);
        if la == f64::NEG_INFINITY || lb == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        let w = (t - a) / (b - a);
        la + w * (lb - la)
    }
}

/// Density `values[i]` on `[knots[i], knots[i+1])`, zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstant {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseConstant {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<PiecewiseConstant> {
        if knots.len() != values.len() + 1 || values.is_empty() {
            return Err(Error::param("knots", "need one more knot than values"));
        }
        if knots[0] < 0.0 || *knots.last().unwrap() > 1.0 || knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("knots", "knots must increase within [0, 1]"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::param("values", "densities must be finite and non-negative"));
        }
        Ok(PiecewiseConstant { knots, values })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn ln_eval(&self, t: f64) -> f64 {
        if t < self.knots[0] || t >= *self.knots.last().unwrap() {
            return f64::NEG_INFINITY;
        }
        let i = match self.knots.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        self.values[i].ln()
    }

    /// ln ∫ t^p over the density, summed exactly cell by cell.
    pub(crate) fn ln_moment(&self, p: f64) -> f64 {
        let q = p + 1.0;
        let mut terms = Vec::with_capacity(self.values.len());
        for (i, &rho) in self.values.iter().enumerate() {
            if rho == 0.0 {
                continue;
            }
            let (a, b) = (self.knots[i], self.knots[i + 1]);
            // b^q − a^q = b^q (1 − (a/b)^q)
            let ln_cell = if a == 0.0 {
                q * b.ln()
            } else {
                q * b.ln() + (-(q * ((a - b) / b).ln_1p()).exp_m1()).ln()
            };
            terms.push(rho.ln() + ln_cell - q.ln());
        }
        ln_sum_exp(&terms)
    }

    /// ∫_t^1 (s − t)^{x−1}/Γ(x) times the density, in closed form.
    pub(crate) fn shift_value(&self, x: f64, p: Pt) -> f64 {
        let g = crate::special::gamma(x + 1.0);
        let mut sum = 0.0;
        for (i, &rho) in self.values.iter().enumerate() {
            let (a, b) = (self.knots[i], self.knots[i + 1]);
            if b <= p.t || rho == 0.0 {
                continue;
            }
            let db = p.omt - (1.0 - b);
            let da = if a > p.t { p.omt - (1.0 - a) } else { 0.0 };
            sum += rho * (db.powf(x) - da.powf(x));
        }
        sum / g
    }
}

/// A non-negative integrable density v on [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub enum WeightDensity {
    /// (1 − t)^α, α > −1.
    Power { alpha: f64 },
    /// (1 − t)^α (ln 1/(1 − t))^β for t ≥ cutoff, constant below.
    PowerLog { alpha: f64, beta: f64, cutoff: f64 },
    /// (1 − t)^β e^{−1/(1−t)}.
    ExpCusp { beta: f64 },
    Tabulated(Tabulated),
    PiecewiseConstant(PiecewiseConstant),
    Sum(Vec<WeightDensity>),
    Scaled { c: f64, inner: Box<WeightDensity> },
    /// t^a (1 − t)^b times the inner density.
    Factor { t_pow: f64, omt_pow: f64, inner: Box<WeightDensity> },
    Shifted(Arc<ShiftedDensity>),
}

pub const DEFAULT_LOG_CUTOFF: f64 = 0.5;

impl WeightDensity {
    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(Error::param("alpha", format!("Power needs α > −1, got {alpha}")));
        }
        Ok(WeightDensity::Power { alpha })
    }

    pub fn power_log(alpha: f64, beta: f64) -> Result<Self> {
        Self::power_log_with_cutoff(alpha, beta, DEFAULT_LOG_CUTOFF)
    }

    pub fn power_log_with_cutoff(alpha: f64, beta: f64, cutoff: f64) -> Result<Self> {
        if !(alpha > -1.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::param("alpha", format!("PowerLog needs α > −1, got {alpha}")));
        }
        if !(cutoff > 0.0 && cutoff < 1.0) {
            return Err(Error::param("cutoff", format!("cutoff must lie in (0, 1), got {cutoff}")));
        }
        Ok(WeightDensity::PowerLog { alpha, beta, cutoff })
    }

    pub fn exp_cusp(beta: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::param("beta", "must be finite"));
        }
        Ok(WeightDensity::ExpCusp { beta })
    }

    pub fn scaled(c: f64, inner: WeightDensity) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::param("c", format!("scale must be positive, got {c}")));
        }
        Ok(WeightDensity::Scaled { c, inner: Box::new(inner) })
    }

    pub fn sum(parts: Vec<WeightDensity>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::param("parts", "empty sum"));
        }
        Ok(WeightDensity::Sum(parts))
    }

    pub fn factor(t_pow: f64, omt_pow: f64, inner: WeightDensity) -> Result<Self> {
        if !(t_pow >= 0.0) || !(omt_pow >= 0.0) {
            return Err(Error::param("factor", "powers of t and 1 − t must be non-negative"));
        }
        Ok(WeightDensity::Factor {
            t_pow,
            omt_pow,
            inner: Box::new(inner),
        })
    }

    pub fn tabulated(t: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Ok(WeightDensity::Tabulated(Tabulated::new(t, values)?))
    }

    /// The constant density 1.
    pub fn unit() -> Self {
        WeightDensity::Power { alpha: 0.0 }
    }

    /// ln v at a point; −∞ where v vanishes.
    pub fn ln_eval_pt(&self, p: Pt) -> f64 {
        match self {
            WeightDensity::Power { alpha } => {
                if *alpha == 0.0 {
                    0.0
                } else {
                    alpha * p.ln_omt()
                }
            }
            WeightDensity::PowerLog { alpha, beta, cutoff } => {
                let q = if p.t < *cutoff { Pt::new(*cutoff) } else { p };
                let l = q.ln_omt();
                alpha * l + if *beta == 0.0 { 0.0 } else { beta * (-l).ln() }
            }
            WeightDensity::ExpCusp { beta } => beta * p.ln_omt() - 1.0 / p.omt,
            WeightDensity::Tabulated(tab) => tab.ln_eval(p.t),
            WeightDensity::PiecewiseConstant(pc) => pc.ln_eval(p.t),
            WeightDensity::Sum(parts) => {
                let mut acc = f64::NEG_INFINITY;
                for v in parts {
                    acc = ln_add_exp(acc, v.ln_eval_pt(p));
                }
                acc
            }
            WeightDensity::Scaled { c, inner } => c.ln() + inner.ln_eval_pt(p),
            WeightDensity::Factor { t_pow, omt_pow, inner } => {
                let mut l = inner.ln_eval_pt(p);
                if *t_pow != 0.0 {
                    l += t_pow * p.ln_t();
                }
                if *omt_pow != 0.0 {
                    l += omt_pow * p.ln_omt();
                }
                l
            }
            WeightDensity::Shifted(s) => s.ln_eval_pt(p),
        }
    }

    pub fn ln_eval(&self, t: f64) -> Result<f64> {
        check_t(t)?;
        Ok(self.ln_eval_pt(Pt::new(t)))
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.ln_eval(t)?.exp())
    }

    /// Leading exponent e with v ≍ (1 − t)^e near 1, up to slowly varying
    /// factors; +∞ for densities vanishing faster than any power.
    pub fn endpoint_exponent(&self) -> f64 {
        match self {
            WeightDensity::Power { alpha } => *alpha,
            WeightDensity::PowerLog { alpha, .. } => *alpha,
            WeightDensity::ExpCusp { .. } => f64::INFINITY,
            WeightDensity::Tabulated(tab) => {
                if *tab.ln_v.last().unwrap() == f64::NEG_INFINITY {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            WeightDensity::PiecewiseConstant(pc) => {
                if *pc.knots.last().unwrap() == 1.0 && *pc.values.last().unwrap() > 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            WeightDensity::Sum(parts) => parts.iter().map(|v| v.endpoint_exponent()).fold(f64::INFINITY, f64::min),
            WeightDensity::Scaled { inner, .. } => inner.endpoint_exponent(),
            WeightDensity::Factor { omt_pow, inner, .. } => inner.endpoint_exponent() + omt_pow,
            WeightDensity::Shifted(s) => s.endpoint_exponent(),
        }
    }

    /// Interior points of (0, 1) where the density is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = match self {
            WeightDensity::Power { .. } | WeightDensity::ExpCusp { .. } => Vec::new(),
            WeightDensity::PowerLog { cutoff, .. } => vec![*cutoff],
            WeightDensity::Tabulated(tab) => tab.t.clone(),
            WeightDensity::PiecewiseConstant(pc) => pc.knots.clone(),
            WeightDensity::Sum(parts) => parts.iter().flat_map(|v| v.breakpoints()).collect(),
            WeightDensity::Scaled { inner, .. } | WeightDensity::Factor { inner, .. } => inner.breakpoints(),
            WeightDensity::Shifted(s) => s.breakpoints(),
        };
        out.retain(|b| *b > 0.0 && *b < 1.0);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    pub fn is_closed_power(&self) -> Option<f64> {
        match self {
            WeightDensity::Power { alpha } => Some(*alpha),
            _ => None,
        }
    }
}

impl fmt::Display for WeightDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightDensity::Power { alpha } => write!(f, "Power({alpha})"),
            WeightDensity::PowerLog { alpha, beta, cutoff } => write!(f, "PowerLog({alpha}, {beta}; t1={cutoff})"),
            WeightDensity::ExpCusp { beta } => write!(f, "ExpCusp({beta})"),
            WeightDensity::Tabulated(tab) => write!(f, "Tabulated({} nodes)", tab.t.len()),
            WeightDensity::PiecewiseConstant(pc) => write!(f, "PiecewiseConstant({} cells)", pc.values.len()),
            WeightDensity::Sum(parts) => {
                write!(f, "Sum(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
            WeightDensity::Scaled { c, inner } => write!(f, "{c}·{inner}"),
            WeightDensity::Factor { t_pow, omt_pow, inner } => {
                write!(f, "t^{t_pow}(1-t)^{omt_pow}·{inner}")
            }
            WeightDensity::Shifted(s) => write!(f, "Shift({}, x={})", s.base_label(), s.x()),
        }
    }
}

/// A radial weight on the unit ball of C^d, stored through its line density.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialWeight {
    dim: usize,
    line: WeightDensity,
}

impl RadialWeight {
    /// `profile` is u_ω as a function of t = |z|².
    pub fn from_profile(dim: usize, profile: WeightDensity) -> Result<RadialWeight> {
        if dim == 0 {
            return Err(Error::param("dim", "ball dimension must be ≥ 1"));
        }
        let line = if dim == 1 {
            profile
        } else {
            WeightDensity::scaled(dim as f64, WeightDensity::factor((dim - 1) as f64, 0.0, profile)?)?
        };
        Ok(RadialWeight { dim, line })
    }

    pub fn from_line_density(dim: usize, line: WeightDensity) -> Result<RadialWeight> {
        if dim == 0 {
            return Err(Error::param("dim", "ball dimension must be ≥ 1"));
        }
        Ok(RadialWeight { dim, line })
    }

    pub fn unit(dim: usize) -> Result<RadialWeight> {
        Self::from_profile(dim, WeightDensity::unit())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn line_density(&self) -> &WeightDensity {
        &self.line
    }

    /// ln u_ω(r) for 0 < r < 1.
    pub fn ln_profile(&self, r: f64) -> Result<f64> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Domain(format!("radius {r} outside (0, 1)")));
        }
        let t = r * r;
        let p = Pt { t, omt: (1.0 - r) * (1.0 + r) };
        Ok(self.ln_profile_pt(p))
    }

    /// ln u_ω at the point with |z|² = p.t.
    pub fn ln_profile_pt(&self, p: Pt) -> f64 {
        let d = self.dim as f64;
        self.line.ln_eval_pt(p) - d.ln() - (d - 1.0) * p.ln_t()
    }
}

/// v(t) = d·t^{d−1}·u(√t).
pub fn to_line_density(w: &RadialWeight) -> WeightDensity {
    w.line.clone()
}

/// A finite positive measure on [0, 1]: point masses plus an optional density.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    atoms: Vec<(f64, f64)>,
    density: Option<WeightDensity>,
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<(f64, f64)>, density: Option<WeightDensity>) -> Result<DiscreteMeasure> {
        for &(loc, mass) in &atoms {
            if !(0.0..=1.0).contains(&loc) {
                return Err(Error::param("atoms", format!("atom location {loc} outside [0, 1]")));
            }
            if !(mass >= 0.0 && mass.is_finite()) {
                return Err(Error::param("atoms", format!("atom mass {mass} must be finite and ≥ 0")));
            }
        }
        let atom_mass: f64 = atoms.iter().map(|a| a.1).sum();
        if atom_mass == 0.0 && density.is_none() {
            return Err(Error::param("measure", "total mass must be positive"));
        }
        let mut atoms = atoms;
        atoms.retain(|a| a.1 > 0.0);
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(DiscreteMeasure { atoms, density })
    }

    pub fn atom(loc: f64, mass: f64) -> Result<DiscreteMeasure> {
        Self::new(vec![(loc, mass)], None)
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&WeightDensity> {
        self.density.as_ref()
    }

    /// ln ∫ t^p dμ.
    pub fn ln_moment(&self, p: f64) -> Result<f64> {
        let mut acc = f64::NEG_INFINITY;
        for &(loc, mass) in &self.atoms {
            let term = if loc == 0.0 {
                if p == 0.0 {
                    mass.ln()
                } else {
                    f64::NEG_INFINITY
                }
            } else {
                mass.ln() + p * loc.ln()
            };
            acc = ln_add_exp(acc, term);
        }
        if let Some(v) = &self.density {
            acc = ln_add_exp(acc, crate::moments::ln_moment_real(v, p)?.ln_value);
        }
        Ok(acc)
    }

    pub fn moment(&self, n: usize) -> Result<f64> {
        Ok(self.ln_moment(n as f64)?.exp())
    }
}
