//! Sample grids on [0, 1), refined toward t = 1.

use crate::error::{Error, Result};
use crate::weight::Pt;

/// Default right end of classification grids: t_max = 1 − 2^{−20}.
pub const DEFAULT_K_MAX: u32 = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pts: Vec<Pt>,
}

impl Grid {
    /// Points with 1 − t = (1 − t0)·2^{−j/per_octave}, down to 1 − t = 2^{−k_max}.
    pub fn dyadic(t0: f64, k_max: u32, per_octave: u32) -> Result<Grid> {
        if !(0.0..1.0).contains(&t0) || per_octave == 0 {
            return Err(Error::param("grid", format!("need 0 ≤ t0 < 1 and per_octave ≥ 1 (t0 = {t0})")));
        }
        let omt0 = 1.0 - t0;
        let octaves = k_max as f64 + omt0.log2();
        if octaves <= 0.0 {
            return Err(Error::param("grid", "t0 already beyond t_max"));
        }
        let steps = (octaves * per_octave as f64).round() as u32;
        let pts = (0..=steps)
            .map(|j| Pt::from_omt(omt0 * (-(j as f64) / per_octave as f64).exp2()))
            .collect();
        Ok(Grid { pts })
    }

    /// `n` points uniform in τ = −ln(1 − t) over [τ(t_min), τ(t_max)].
    pub fn tau_uniform(n: usize, t_min: f64, t_max: f64) -> Result<Grid> {
        if n < 2 || !(0.0..1.0).contains(&t_min) || !(t_min..1.0).contains(&t_max) {
            return Err(Error::param("grid", "need n ≥ 2 and 0 ≤ t_min ≤ t_max < 1"));
        }
        let (a, b) = (-(1.0 - t_min).ln(), -(1.0 - t_max).ln());
        let pts = (0..n)
            .map(|i| {
                let tau = a + (b - a) * i as f64 / (n - 1) as f64;
                Pt::from_omt((-tau).exp())
            })
            .collect();
        Ok(Grid { pts })
    }

    pub fn from_points(ts: &[f64]) -> Result<Grid> {
        if ts.iter().any(|t| !(0.0..1.0).contains(t)) {
            return Err(Error::Domain("grid point outside [0, 1)".into()));
        }
        Ok(Grid {
            pts: ts.iter().map(|&t| Pt::new(t)).collect(),
        })
    }

    pub fn points(&self) -> &[Pt] {
        &self.pts
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    pub fn t_values(&self) -> Vec<f64> {
        self.pts.iter().map(|p| p.t).collect()
    }
}
