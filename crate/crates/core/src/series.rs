//! Polynomials in d variables stored by multi-index.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::ln_factorial;

pub type MultiIndex = Vec<u32>;

pub fn total_degree(idx: &[u32]) -> usize {
    idx.iter().map(|&k| k as usize).sum()
}

/// All multi-indices of length `dim` with total degree ≤ `n_max`, ordered by
/// total degree and then lexicographically.
pub fn monomials(dim: usize, n_max: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for n in 0..=n_max {
        out.extend(monomials_of_degree(dim, n));
    }
    out
}

/// Multi-indices of length `dim` and total degree exactly `n`, lexicographically.
pub fn monomials_of_degree(dim: usize, n: usize) -> Vec<MultiIndex> {
    fn rec(dim: usize, left: usize, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if prefix.len() + 1 == dim {
            prefix.push(left as u32);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k as u32);
            rec(dim, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if dim == 0 {
        return out;
    }
    rec(dim, n, &mut Vec::with_capacity(dim), &mut out);
    out
}

/// ln(α!/|α|!), the log of the squared Drury–Arveson norm of z^α.
pub fn ln_multinomial_inverse(idx: &[u32]) -> f64 {
    idx.iter().map(|&k| ln_factorial(k as u64)).sum::<f64>() - ln_factorial(total_degree(idx) as u64)
}

/// A polynomial Σ c_α z^α in `dim` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedSeries {
    dim: usize,
    coeffs: BTreeMap<MultiIndex, Complex64>,
}

impl GradedSeries {
    pub fn zero(dim: usize) -> GradedSeries {
        GradedSeries {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Complex64) -> GradedSeries {
        let mut s = GradedSeries::zero(dim);
        s.add_term(vec![0; dim], c).expect("index has the right length");
        s
    }

    pub fn monomial(idx: MultiIndex, c: Complex64) -> GradedSeries {
        let mut s = GradedSeries::zero(idx.len());
        s.coeffs.insert(idx, c);
        s
    }

    /// One-variable polynomial from coefficients c_0, c_1, ...
    pub fn from_coefficients(cs: &[Complex64]) -> GradedSeries {
        let mut s = GradedSeries::zero(1);
        for (n, &c) in cs.iter().enumerate() {
            if c != Complex64::new(0.0, 0.0) {
                s.coeffs.insert(vec![n as u32], c);
            }
        }
        s
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (MultiIndex, Complex64)>) -> Result<GradedSeries> {
        let mut s = GradedSeries::zero(dim);
        for (idx, c) in terms {
            s.add_term(idx, c)?;
        }
        Ok(s)
    }

    pub fn add_term(&mut self, idx: MultiIndex, c: Complex64) -> Result<()> {
        if idx.len() != self.dim {
            return Err(Error::param("index", format!("multi-index {idx:?} does not have length {}", self.dim)));
        }
        let e = self.coeffs.entry(idx).or_insert(Complex64::new(0.0, 0.0));
        *e += c;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeff(&self, idx: &[u32]) -> Complex64 {
        self.coeffs.get(idx).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| c.norm_sqr() == 0.0)
    }

    /// Highest total degree with a nonzero coefficient; 0 for the zero series.
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .filter(|(_, c)| c.norm_sqr() != 0.0)
            .map(|(i, _)| total_degree(i))
            .max()
            .unwrap_or(0)
    }

    /// The homogeneous component of degree n.
    pub fn component(&self, n: usize) -> GradedSeries {
        GradedSeries {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(i, _)| total_degree(i) == n)
                .map(|(i, c)| (i.clone(), *c))
                .collect(),
        }
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.dim {
            return Err(Error::param("z", "point dimension does not match the series"));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, c) in &self.coeffs {
            let mut term = *c;
            for (zi, &k) in z.iter().zip(idx) {
                term *= zi.powu(k);
            }
            acc += term;
        }
        Ok(acc)
    }

    pub fn mul(&self, other: &GradedSeries) -> Result<GradedSeries> {
        if self.dim != other.dim {
            return Err(Error::param("dim", "cannot multiply series in different dimensions"));
        }
        let mut out = GradedSeries::zero(self.dim);
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                let idx: MultiIndex = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(idx, ca * cb)?;
            }
        }
        Ok(out)
    }

    /// Multiplies the degree-n component by `f(n)`; terms mapped to zero are dropped.
    pub fn scale_by_degree(&self, f: impl Fn(usize) -> f64) -> GradedSeries {
        let coeffs = self
            .coeffs
            .iter()
            .filter_map(|(i, c)| {
                let k = f(total_degree(i));
                (k != 0.0).then(|| (i.clone(), c * k))
            })
            .collect();
        GradedSeries { dim: self.dim, coeffs }
    }
}

impl fmt::Display for GradedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (idx, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (i, &k) in idx.iter().enumerate() {
                if k > 0 {
                    write!(f, "·z{}^{}", i + 1, k)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering() {
        let m = monomials(2, 2);
        let expect: Vec<MultiIndex> = vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![0, 2], vec![1, 1], vec![2, 0]];
        assert_eq!(m, expect);
        assert_eq!(monomials(3, 4).len(), 35);
    }

    #[test]
    fn product_and_eval() {
        let one = Complex64::new(1.0, 0.0);
        let p = GradedSeries::from_coefficients(&[one, one]);
        let q = p.mul(&p).unwrap();
        assert_eq!(q.coeff(&[1]), Complex64::new(2.0, 0.0));
        assert_eq!(q.eval(&[Complex64::new(2.0, 0.0)]).unwrap(), Complex64::new(9.0, 0.0));
        assert_eq!(q.degree(), 2);
        assert_eq!(q.component(1).degree(), 1);
    }
}
