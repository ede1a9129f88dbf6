//! Finite sections of multiplication operators between weighted spaces.
//!
//! Monomials are ordered by total degree and then lexicographically, and
//! each basis vector is z^β/‖z^β‖. Symbols are polynomials, so every section
//! is exact and its norm is a lower bound for the multiplier norm.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{kernel_coeffs, radial_derivative, BesovSpace};
use crate::series::{monomials, total_degree, GradedSeries, MultiIndex};
use crate::shift::ball_shift;
use crate::weight::RadialWeight;

pub type CMatrix = DMatrix<Complex64>;

/// Relative tolerance of [`op_norm`].
pub const NORM_REL_TOL: f64 = 1e-10;
/// Slack allowed in the contraction inequalities.
pub const CONTRACTION_SLACK: f64 = 1e-9;
/// Harness band for row/column norm ratios; an empirical setting, not a theorem.
pub const DEFAULT_ROW_COL_BAND: f64 = 10.0;

const C0: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn cnorm(v: &DVector<Complex64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn cdot(a: &DVector<Complex64>, b: &DVector<Complex64>) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Largest singular value of A.
///
/// When the smaller Gram matrix G (AᴴA or AAᴴ) is cheap to form and banded,
/// λ_max(G) is found by bisection on σ with a banded Cholesky test of
/// σI − G, which is reliable even when the top singular values cluster, as
/// they do for Toeplitz-like sections. Otherwise thick-restart Lanczos on G
/// with full reorthogonalization is used, started from a random vector drawn
/// from `seed`.
pub fn op_norm(a: &CMatrix, seed: u64) -> Result<f64> {
    if a.ncols() == 0 || a.nrows() == 0 {
        return Ok(0.0);
    }
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(0.0);
    }
    if let Some(g) = BandedGram::build(a) {
        return Ok(g.lambda_max().sqrt());
    }
    lanczos_norm(a, seed)
}

/// Lower band of a Hermitian Gram matrix: `band[i * (w + 1) + (i − j)]`
/// holds G_ij for i − w ≤ j ≤ i.
struct BandedGram {
    n: usize,
    w: usize,
    band: Vec<Complex64>,
}

/// Cap on Σ|S_k|², the work of forming G from sparse rows.
const GRAM_WORK_CAP: usize = 20_000_000;
/// Cap on n·w², the work of one Cholesky test.
const CHOLESKY_WORK_CAP: usize = 4_000_000;

impl BandedGram {
    fn build(a: &CMatrix) -> Option<BandedGram> {
        // Rows of B where G = BᴴB and B is the taller of A and Aᴴ; each
        // row of B is a column of A when A is wide.
        let tall = a.nrows() >= a.ncols();
        let (n, m) = if tall { (a.ncols(), a.nrows()) } else { (a.nrows(), a.ncols()) };
        let entry = |k: usize, i: usize| if tall { a[(k, i)] } else { a[(i, k)].conj() };
        let rows: Vec<Vec<(usize, Complex64)>> = (0..m)
            .map(|k| (0..n).filter_map(|i| Some((i, entry(k, i))).filter(|(_, z)| *z != C0)).collect())
            .collect();
        let work: usize = rows.iter().map(|r| r.len() * r.len()).sum();
        if work > GRAM_WORK_CAP {
            return None;
        }
        let mut w = 0;
        for r in &rows {
            if let (Some(f), Some(l)) = (r.first(), r.last()) {
                w = w.max(l.0 - f.0);
            }
        }
        if n * w * w > CHOLESKY_WORK_CAP {
            return None;
        }
        let mut band = vec![C0; n * (w + 1)];
        for r in &rows {
            for (x, &(i, bi)) in r.iter().enumerate() {
                for &(j, bj) in &r[..=x] {
                    band[i * (w + 1) + (i - j)] += bi.conj() * bj;
                }
            }
        }
        Some(BandedGram { n, w, band })
    }

    fn get(&self, i: usize, j: usize) -> Complex64 {
        self.band[i * (self.w + 1) + (i - j)]
    }

    /// Whether σI − G admits a Cholesky factorization.
    fn shifted_is_pd(&self, sigma: f64, l: &mut [Complex64]) -> bool {
        let w1 = self.w + 1;
        for i in 0..self.n {
            let lo = i.saturating_sub(self.w);
            for j in lo..=i {
                let mut s = if i == j { Complex64::new(sigma, 0.0) } else { C0 } - self.get(i, j);
                for k in lo.max(j.saturating_sub(self.w))..j {
                    s -= l[i * w1 + (i - k)] * l[j * w1 + (j - k)].conj();
                }
                if i == j {
                    if !(s.re > 0.0) {
                        return false;
                    }
                    l[i * w1] = Complex64::new(s.re.sqrt(), 0.0);
                } else {
                    l[i * w1 + (i - j)] = s / l[j * w1].re;
                }
            }
        }
        true
    }

    fn lambda_max(&self) -> f64 {
        let mut lo = (0..self.n).map(|i| self.get(i, i).re).fold(0.0, f64::max);
        // Gershgorin row sums bound λ_max above.
        let mut hi = (0..self.n)
            .map(|i| {
                let left: f64 = (i.saturating_sub(self.w)..=i).map(|j| self.get(i, j).norm()).sum();
                let right: f64 = (i + 1..(i + self.w + 1).min(self.n)).map(|j| self.get(j, i).norm()).sum();
                left + right
            })
            .fold(0.0, f64::max);
        hi *= 1.0 + 1e-12;
        let mut l = vec![C0; self.band.len()];
        while hi - lo > 0.25 * NORM_REL_TOL * hi {
            let mid = 0.5 * (lo + hi);
            if self.shifted_is_pd(mid, &mut l) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

fn lanczos_norm(a: &CMatrix, seed: u64) -> Result<f64> {
    // G = BᴴB with B the taller of A and Aᴴ.
    let b = if a.nrows() < a.ncols() { a.adjoint() } else { a.clone() };
    let bh = b.adjoint();
    let gram = |v: &DVector<Complex64>| &bh * (&b * v);
    let n = b.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidate = DVector::from_fn(n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let krylov = n.min(120);
    let keep = krylov.min(20);
    const RESTARTS: usize = 60;
    let one = Complex64::new(1.0, 0.0);

    let mut vs: Vec<DVector<Complex64>> = Vec::with_capacity(krylov);
    let mut ws: Vec<DVector<Complex64>> = Vec::with_capacity(krylov);
    // Projected matrix Vᴴ G V, grown one column at a time.
    let mut h = DMatrix::<Complex64>::zeros(krylov, krylov);
    let mut theta = 0.0f64;
    for _ in 0..RESTARTS {
        loop {
            let before = cnorm(&candidate);
            for _ in 0..2 {
                for v in &vs {
                    let c = cdot(v, &candidate);
                    candidate.axpy(-c, v, one);
                }
            }
            let nrm = cnorm(&candidate);
            let invariant = before == 0.0 || nrm <= 1e-12 * before;
            if !invariant {
                let v = candidate.unscale(nrm);
                let wv = gram(&v);
                let k = vs.len();
                for (i, vi) in vs.iter().enumerate() {
                    let c = cdot(vi, &wv);
                    h[(i, k)] = c;
                    h[(k, i)] = c.conj();
                }
                h[(k, k)] = Complex64::new(cdot(&v, &wv).re, 0.0);
                vs.push(v);
                ws.push(wv);
            }
            let k = vs.len();
            let full = k == krylov;
            if !(invariant || full || k == n || k % 8 == 0) {
                candidate = ws[k - 1].clone();
                continue;
            }
            let eig = SymmetricEigen::new(h.view((0, 0), (k, k)).into_owned());
            let mut order: Vec<usize> = (0..k).collect();
            order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
            theta = eig.eigenvalues[order[0]].max(0.0);
            let combine = |basis: &[DVector<Complex64>], col: usize| {
                let y = eig.eigenvectors.column(col);
                let mut out = DVector::from_element(n, C0);
                for (i, bi) in basis.iter().enumerate() {
                    out.axpy(y[i], bi, one);
                }
                out
            };
            let x = combine(&vs, order[0]);
            let resid = combine(&ws, order[0]) - x.scale(theta);
            let residual = cnorm(&resid);
            if residual <= NORM_REL_TOL * theta || invariant || theta == 0.0 || k == n {
                return Ok(theta.sqrt());
            }
            if !full {
                candidate = ws[k - 1].clone();
                continue;
            }
            let new_v: Vec<_> = order[..keep].iter().map(|&c| combine(&vs, c)).collect();
            let new_w: Vec<_> = order[..keep].iter().map(|&c| combine(&ws, c)).collect();
            h.fill(C0);
            for (i, &c) in order[..keep].iter().enumerate() {
                h[(i, i)] = Complex64::new(eig.eigenvalues[c], 0.0);
            }
            vs = new_v;
            ws = new_w;
            candidate = resid;
            break;
        }
    }
    Err(Error::NormNotConverged {
        iterations: RESTARTS * krylov,
        estimate: theta.sqrt(),
    })
}

// ---------------------------------------------------------------------------
// Kacnelson conjugation

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KacnelsonReport {
    pub norm: f64,
    pub conjugated_norm: f64,
    /// ‖DTD⁻¹‖ ≤ ‖T‖(1 + 1e−9)
    pub pass: bool,
}

fn check_diagonal(d: &[f64], n: usize) -> Result<()> {
    if d.len() != n {
        return Err(Error::param("D", format!("diagonal has length {}, matrix has order {n}", d.len())));
    }
    if d.iter().any(|x| !(*x > 0.0 && x.is_finite())) || d.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::param("D", "diagonal must be positive and nonincreasing"));
    }
    Ok(())
}

fn check_lower(t: &CMatrix) -> Result<()> {
    if t.nrows() != t.ncols() {
        return Err(Error::param("T", "matrix must be square"));
    }
    for c in 0..t.ncols() {
        for r in 0..c {
            if t[(r, c)] != C0 {
                return Err(Error::param("T", format!("entry ({r}, {c}) above the diagonal is nonzero")));
            }
        }
    }
    Ok(())
}

fn conjugate(t: &CMatrix, d: &[f64]) -> CMatrix {
    CMatrix::from_fn(t.nrows(), t.ncols(), |r, c| t[(r, c)] * (d[r] / d[c]))
}

/// ‖DTD⁻¹‖ against ‖T‖ for lower-triangular T and nonincreasing D.
pub fn kacnelson_conjugation(t: &CMatrix, d: &[f64], seed: u64) -> Result<KacnelsonReport> {
    check_lower(t)?;
    check_diagonal(d, t.nrows())?;
    let norm = op_norm(t, seed)?;
    let conjugated_norm = op_norm(&conjugate(t, d), seed)?;
    Ok(KacnelsonReport {
        norm,
        conjugated_norm,
        pass: conjugated_norm <= norm * (1.0 + CONTRACTION_SLACK),
    })
}

/// The same inequality for an r×r block matrix of lower-triangular blocks
/// with a shared D.
pub fn kacnelson_block(blocks: &[Vec<CMatrix>], d: &[f64], seed: u64) -> Result<KacnelsonReport> {
    let r = blocks.len();
    if r == 0 || blocks.iter().any(|row| row.len() != r) {
        return Err(Error::param("blocks", "need a square array of blocks"));
    }
    let m = blocks[0][0].nrows();
    for b in blocks.iter().flatten() {
        if b.nrows() != m {
            return Err(Error::param("blocks", "blocks must share one order"));
        }
        check_lower(b)?;
    }
    check_diagonal(d, m)?;
    let mut big = CMatrix::zeros(r * m, r * m);
    let mut conj = CMatrix::zeros(r * m, r * m);
    for (i, row) in blocks.iter().enumerate() {
        for (j, b) in row.iter().enumerate() {
            big.view_mut((i * m, j * m), (m, m)).copy_from(b);
            conj.view_mut((i * m, j * m), (m, m)).copy_from(&conjugate(b, d));
        }
    }
    let norm = op_norm(&big, seed)?;
    let conjugated_norm = op_norm(&conj, seed)?;
    Ok(KacnelsonReport {
        norm,
        conjugated_norm,
        pass: conjugated_norm <= norm * (1.0 + CONTRACTION_SLACK),
    })
}

/// A lower-triangular n×n matrix with complex entries uniform in [−1, 1]².
pub fn random_lower_triangular(rng: &mut impl Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |r, c| {
        if r >= c {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        } else {
            C0
        }
    })
}

/// A positive nonincreasing diagonal spread over six orders of magnitude.
pub fn random_nonincreasing_diagonal(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut d: Vec<f64> = (0..n).map(|_| (rng.random_range(-7.0..0.0f64)).exp()).collect();
    d.sort_by(|a, b| b.total_cmp(a));
    d
}

// ---------------------------------------------------------------------------
// Multiplier sections

#[derive(Debug, Clone, PartialEq)]
pub struct TriangularSection {
    pub entries: CMatrix,
    pub domain_basis: Vec<MultiIndex>,
    pub codomain_basis: Vec<MultiIndex>,
    /// ln ‖z^β‖²_H for the domain basis.
    pub domain_ln_norms: Vec<f64>,
    /// ln ‖z^α‖²_K for the codomain basis.
    pub codomain_ln_norms: Vec<f64>,
}

impl TriangularSection {
    /// Whether every entry with |row| < |col| vanishes.
    pub fn is_graded_lower_triangular(&self) -> bool {
        for (c, b) in self.domain_basis.iter().enumerate() {
            for (r, a) in self.codomain_basis.iter().enumerate() {
                if total_degree(a) < total_degree(b) && self.entries[(r, c)] != C0 {
                    return false;
                }
            }
        }
        true
    }
}

fn check_caps(phi: &GradedSeries, h: &BesovSpace, k: &BesovSpace, n: usize) -> Result<()> {
    if phi.dim() != h.dim() || h.dim() != k.dim() {
        return Err(Error::param("dim", "symbol and spaces must share the dimension"));
    }
    let needed = n + phi.degree();
    let cap = h.n_max().min(k.n_max());
    if needed > cap {
        return Err(Error::DegreeCap { needed, cap });
    }
    Ok(())
}

/// The matrix of f ↦ φf from degree ≤ N in H to degree ≤ N + deg φ in K.
pub fn mult_matrix(phi: &GradedSeries, h: &BesovSpace, k: &BesovSpace, n: usize) -> Result<TriangularSection> {
    mult_matrix_to(phi, h, k, n, n + phi.degree())
}

fn mult_matrix_to(phi: &GradedSeries, h: &BesovSpace, k: &BesovSpace, n: usize, n_out: usize) -> Result<TriangularSection> {
    check_caps(phi, h, k, n)?;
    if n_out > k.n_max() {
        return Err(Error::DegreeCap { needed: n_out, cap: k.n_max() });
    }
    let d = h.dim();
    let domain_basis = monomials(d, n);
    let codomain_basis = monomials(d, n_out);
    let domain_ln_norms = domain_basis
        .iter()
        .map(|b| h.ln_monomial_norm_sq(b))
        .collect::<Result<Vec<_>>>()?;
    let codomain_ln_norms = codomain_basis
        .iter()
        .map(|b| k.ln_monomial_norm_sq(b))
        .collect::<Result<Vec<_>>>()?;
    let row_of: std::collections::HashMap<&MultiIndex, usize> = codomain_basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
    let mut entries = CMatrix::zeros(codomain_basis.len(), domain_basis.len());
    for (c, beta) in domain_basis.iter().enumerate() {
        for (gamma, coef) in phi.terms() {
            if coef.norm_sqr() == 0.0 {
                continue;
            }
            let target: MultiIndex = beta.iter().zip(gamma).map(|(x, y)| x + y).collect();
            let r = row_of[&target];
            let scale = (0.5 * (codomain_ln_norms[r] - domain_ln_norms[c])).exp();
            entries[(r, c)] += coef * scale;
        }
    }
    Ok(TriangularSection {
        entries,
        domain_basis,
        codomain_basis,
        domain_ln_norms,
        codomain_ln_norms,
    })
}

/// Norm of the degree-N section of M_φ: H → K.
pub fn mult_norm_section(phi: &GradedSeries, h: &BesovSpace, k: &BesovSpace, n: usize, seed: u64) -> Result<f64> {
    op_norm(&mult_matrix(phi, h, k, n)?.entries, seed)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InclusionReport {
    pub hypothesis_holds: bool,
    /// First n where a coefficient hypothesis fails.
    pub first_violation: Option<usize>,
    /// Section norm in the smaller multiplier space (H → H′).
    pub norm_source: Option<f64>,
    /// Section norm in the larger one (K → K′).
    pub norm_target: Option<f64>,
    pub pass: bool,
}

impl InclusionReport {
    fn failed(n: usize) -> InclusionReport {
        InclusionReport {
            hypothesis_holds: false,
            first_violation: Some(n),
            norm_source: None,
            norm_target: None,
            pass: false,
        }
    }
}

/// First n ≤ n_max where b_n/b_{n+1} ≤ a_n/a_{n+1} or b_n/a_n ≤ b′_n/a′_n fails.
fn coefficient_hypotheses(a: &[f64], a2: &[f64], b: &[f64], b2: &[f64], n_max: usize) -> Option<usize> {
    let tol = 1e-12;
    for n in 0..=n_max {
        if n < n_max && (b[n] - b[n + 1]) - (a[n] - a[n + 1]) > tol * (1.0 + a[n].abs()) {
            return Some(n);
        }
        if (b[n] - a[n]) - (b2[n] - a2[n]) > tol * (1.0 + b2[n].abs()) {
            return Some(n);
        }
    }
    None
}

/// ‖φ‖ on B^t against ‖φ‖ on B^s, for t ≤ s, after checking the
/// coefficient hypothesis b^t_n/b^t_{n+1} ≤ b^s_n/b^s_{n+1}.
pub fn inclusion_contractivity_check(phi: &GradedSeries, space: &BesovSpace, s: f64, t: f64, n: usize, seed: u64) -> Result<InclusionReport> {
    rectangular_inclusion_check(phi, space, space, s, t, s, t, n, seed)
}

/// ‖φ‖ from B^t_ω to B^{t′}_ν against ‖φ‖ from B^s_ω to B^{s′}_ν, for t ≤ s
/// and t′ − s′ ≤ t − s, after checking the coefficient hypotheses.
#[allow(clippy::too_many_arguments)]
pub fn rectangular_inclusion_check(
    phi: &GradedSeries,
    omega: &BesovSpace,
    nu: &BesovSpace,
    s: f64,
    t: f64,
    s2: f64,
    t2: f64,
    n: usize,
    seed: u64,
) -> Result<InclusionReport> {
    if t > s || t2 - s2 > t - s + 1e-15 {
        return Err(Error::param("s", "need t ≤ s and t′ − s′ ≤ t − s"));
    }
    let (h, h2, k, k2) = (omega.with_s(s), nu.with_s(s2), omega.with_s(t), nu.with_s(t2));
    check_caps(phi, &h, &h2, n)?;
    let cap = n + phi.degree();
    let a = kernel_coeffs(&h).ln_b;
    let a2 = kernel_coeffs(&h2).ln_b;
    let b = kernel_coeffs(&k).ln_b;
    let b2 = kernel_coeffs(&k2).ln_b;
    if let Some(bad) = coefficient_hypotheses(&a, &a2, &b, &b2, cap.min(a.len() - 1).min(b.len() - 1)) {
        return Ok(InclusionReport::failed(bad));
    }
    let norm_source = mult_norm_section(phi, &h, &h2, n, seed)?;
    let norm_target = mult_norm_section(phi, &k, &k2, n, seed)?;
    Ok(InclusionReport {
        hypothesis_holds: true,
        first_violation: None,
        norm_source: Some(norm_source),
        norm_target: Some(norm_target),
        pass: norm_target <= norm_source * (1.0 + CONTRACTION_SLACK),
    })
}

// ---------------------------------------------------------------------------
// Column and row operators

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnRowReport {
    pub col: f64,
    pub row: f64,
    /// row / col
    pub ratio: f64,
    /// Harness band on the ratio; empirical, not a theorem.
    pub band: f64,
    pub within_band: bool,
}

/// Sections of f ↦ (φ_1 f, …, φ_m f) and (f_1, …, f_m) ↦ Σ φ_i f_i.
pub fn column_row_norms(phis: &[GradedSeries], h: &BesovSpace, k: &BesovSpace, n: usize, seed: u64) -> Result<ColumnRowReport> {
    if phis.is_empty() {
        return Err(Error::param("phi", "need at least one symbol"));
    }
    let deg = phis.iter().map(|p| p.degree()).max().unwrap_or(0);
    let mats = phis
        .iter()
        .map(|p| Ok(mult_matrix_to(p, h, k, n, n + deg)?.entries))
        .collect::<Result<Vec<_>>>()?;
    let (r, c) = mats[0].shape();
    let m = mats.len();
    let mut col = CMatrix::zeros(m * r, c);
    let mut row = CMatrix::zeros(r, m * c);
    for (i, a) in mats.iter().enumerate() {
        col.view_mut((i * r, 0), (r, c)).copy_from(a);
        row.view_mut((0, i * c), (r, c)).copy_from(a);
    }
    let col = op_norm(&col, seed)?;
    let row = op_norm(&row, seed)?;
    let ratio = row / col;
    Ok(ColumnRowReport {
        col,
        row,
        ratio,
        band: DEFAULT_ROW_COL_BAND,
        within_band: ratio <= DEFAULT_ROW_COL_BAND,
    })
}

// ---------------------------------------------------------------------------
// Growth norms

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthOptions {
    pub angles: usize,
    pub directions: usize,
    pub seed: u64,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        GrowthOptions {
            angles: 256,
            directions: 64,
            seed: 0,
        }
    }
}

/// Radii j/512 for j < 512, then 1 − 2^{−k/4} out to 1 − 2^{−12}.
pub fn growth_radii() -> Vec<f64> {
    let mut r: Vec<f64> = (0..512).map(|j| j as f64 / 512.0).collect();
    r.extend((1..=48).map(|k| 1.0 - (-(k as f64) / 4.0).exp2()));
    r.sort_by(f64::total_cmp);
    r.dedup();
    r
}

/// sup over sampled z of (1 − |z|²)^α (Σ|φ_i(z)|²)^{1/2}; a lower bound for
/// the norm in the growth space A^{−α}(ℓ²).
pub fn growth_norm(phis: &[GradedSeries], alpha: f64, opts: &GrowthOptions) -> Result<f64> {
    if phis.is_empty() {
        return Err(Error::param("phi", "need at least one symbol"));
    }
    if !(alpha >= 0.0) {
        return Err(Error::param("alpha", "growth exponent must be ≥ 0"));
    }
    let d = phis[0].dim();
    if phis.iter().any(|p| p.dim() != d) {
        return Err(Error::param("phi", "symbols must share the dimension"));
    }
    let dirs: Vec<Vec<Complex64>> = if d == 1 {
        (0..opts.angles)
            .map(|j| vec![Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / opts.angles as f64)])
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut out: Vec<Vec<Complex64>> = (0..d)
            .map(|i| (0..d).map(|j| if i == j { Complex64::new(1.0, 0.0) } else { C0 }).collect())
            .collect();
        while out.len() < d + opts.directions {
            let v: Vec<Complex64> = (0..d)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nrm > 1e-3 {
                out.push(v.into_iter().map(|z| z / nrm).collect());
            }
        }
        out
    };
    let mut best: f64 = 0.0;
    for r in growth_radii() {
        let w = (1.0 - r * r).powf(alpha);
        for u in &dirs {
            let z: Vec<Complex64> = u.iter().map(|c| c * r).collect();
            let mut s = 0.0;
            for p in phis {
                s += p.eval(&z)?.norm_sqr();
            }
            best = best.max(w * s.sqrt());
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Radial derivatives of multipliers

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeLevel {
    pub n: u32,
    /// Section norm of f ↦ (Rⁿφ_i f)_i from B^s_ω to B^t_{ω_n}(ℓ²).
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeReport {
    pub levels: Vec<DerivativeLevel>,
    /// Growth norm of Φ with exponent s − t.
    pub growth_norm: f64,
    /// growth_norm / level-0 norm; recorded, not asserted.
    pub growth_to_section: f64,
}

/// Column section norms of RⁿΦ into the shifted weights ω_n, n = 0..=n_levels.
pub fn derivative_multiplier_report(
    phis: &[GradedSeries],
    omega: &RadialWeight,
    s: f64,
    t: f64,
    n_levels: u32,
    n: usize,
    seed: u64,
) -> Result<DerivativeReport> {
    if phis.is_empty() {
        return Err(Error::param("phi", "need at least one symbol"));
    }
    let deg = phis.iter().map(|p| p.degree()).max().unwrap_or(0);
    let cap = n + deg;
    let h = BesovSpace::new(omega, s, cap)?;
    let mut levels = Vec::with_capacity(n_levels as usize + 1);
    for lvl in 0..=n_levels {
        let k = BesovSpace::new(&ball_shift(omega, lvl as f64)?, t, cap)?;
        let rphis: Vec<GradedSeries> = phis.iter().map(|p| radial_derivative(p, lvl as f64)).collect();
        let mats = rphis
            .iter()
            .map(|p| Ok(mult_matrix_to(p, &h, &k, n, cap)?.entries))
            .collect::<Result<Vec<_>>>()?;
        let (r, c) = mats[0].shape();
        let mut col = CMatrix::zeros(mats.len() * r, c);
        for (i, a) in mats.iter().enumerate() {
            col.view_mut((i * r, 0), (r, c)).copy_from(a);
        }
        levels.push(DerivativeLevel {
            n: lvl,
            norm: op_norm(&col, seed)?,
        });
    }
    let g = growth_norm(
        phis,
        (s - t).max(0.0),
        &GrowthOptions {
            seed,
            ..GrowthOptions::default()
        },
    )?;
    Ok(DerivativeReport {
        growth_to_section: g / levels[0].norm,
        growth_norm: g,
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(rows: usize, cols: usize, v: &[f64]) -> CMatrix {
        CMatrix::from_row_slice(rows, cols, &v.iter().map(|x| Complex64::new(*x, 0.0)).collect::<Vec<_>>())
    }

    fn z1() -> GradedSeries {
        GradedSeries::monomial(vec![1], Complex64::new(1.0, 0.0))
    }

    fn svd_norm(a: &CMatrix) -> f64 {
        a.clone().svd(false, false).singular_values.max()
    }

    #[test]
    fn op_norm_examples() {
        assert!((op_norm(&CMatrix::identity(5, 5), 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((op_norm(&re(2, 2, &[0.0, 0.0, 1.0, 0.0]), 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((op_norm(&re(3, 3, &[3.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0]), 1).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(op_norm(&CMatrix::zeros(3, 4), 1).unwrap(), 0.0);
    }

    #[test]
    fn op_norm_matches_svd() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (r, c) in [(7, 5), (40, 40), (150, 120), (3, 200)] {
            let a = CMatrix::from_fn(r, c, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let x = op_norm(&a, 3).unwrap();
            let y = svd_norm(&a);
            assert!((x / y - 1.0).abs() < 1e-9, "{r}x{c}: {x} vs {y}");
            let z = lanczos_norm(&a, 3).unwrap();
            assert!((z / y - 1.0).abs() < 1e-9, "lanczos {r}x{c}: {z} vs {y}");
        }
    }

    #[test]
    fn banded_gram_on_clustered_spectrum() {
        // Section of multiplication by 1 + z on the Hardy space: bidiagonal,
        // singular values 2cos(kπ/(2n+1)), clustered just below 2.
        let n = 300;
        let a = CMatrix::from_fn(n, n, |i, j| if i == j || i == j + 1 { Complex64::new(1.0, 0.0) } else { C0 });
        assert!(BandedGram::build(&a).is_some());
        let exact = 2.0 * (std::f64::consts::PI / (2 * n + 1) as f64).cos();
        assert!((op_norm(&a, 0).unwrap() / exact - 1.0).abs() < 1e-10);
    }

    #[test]
    fn kacnelson_examples() {
        let t = re(2, 2, &[0.0, 0.0, 1.0, 0.0]);
        let r = kacnelson_conjugation(&t, &[1.0, 0.5], 0).unwrap();
        assert!((r.conjugated_norm - 0.5).abs() < 1e-12 && r.pass);
        let r = kacnelson_conjugation(&t, &[1.0, 1.0], 0).unwrap();
        assert!((r.conjugated_norm - r.norm).abs() < 1e-12);
        assert!(kacnelson_conjugation(&re(2, 2, &[0.0, 1.0, 0.0, 0.0]), &[1.0, 0.5], 0).is_err());
        assert!(kacnelson_conjugation(&t, &[0.5, 1.0], 0).is_err());

        let z = CMatrix::zeros(2, 2);
        let r = kacnelson_block(&[vec![z.clone(), t.clone()], vec![t.clone(), z]], &[1.0, 0.5], 0).unwrap();
        assert!(r.pass);
        assert!((r.norm - svd_norm(&re(4, 4, &[0., 0., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0., 1., 0., 0., 0.]))).abs() < 1e-12);
    }

    #[test]
    fn weighted_shift_sections() {
        let hardy = BesovSpace::from_kernel(1, &[1.0; 40], "hardy").unwrap();
        let m = mult_matrix(&z1(), &hardy, &hardy, 20).unwrap();
        assert!(m.is_graded_lower_triangular());
        for c in 0..=20 {
            assert!((m.entries[(c + 1, c)].re - 1.0).abs() < 1e-14);
        }
        assert!((mult_norm_section(&z1(), &hardy, &hardy, 20, 0).unwrap() - 1.0).abs() < 1e-10);

        let bergman_b: Vec<f64> = (0..60).map(|n| n as f64 + 1.0).collect();
        let bergman = BesovSpace::from_kernel(1, &bergman_b, "bergman").unwrap();
        let m = mult_matrix(&z1(), &bergman, &bergman, 30).unwrap();
        for n in 0..=30 {
            let exact = ((n as f64 + 1.0) / (n as f64 + 2.0)).sqrt();
            assert!((m.entries[(n + 1, n)].re - exact).abs() < 1e-14);
        }
        let nrm = mult_norm_section(&z1(), &bergman, &bergman, 30, 0).unwrap();
        assert!((nrm - (31.0f64 / 32.0).sqrt()).abs() < 1e-10);

        let dir_b: Vec<f64> = (0..40).map(|n| 1.0 / (n as f64 + 1.0)).collect();
        let dir = BesovSpace::from_kernel(1, &dir_b, "dirichlet").unwrap();
        assert!((mult_norm_section(&z1(), &dir, &dir, 10, 0).unwrap() - 2f64.sqrt()).abs() < 1e-10);

        let one = GradedSeries::constant(1, Complex64::new(1.0, 0.0));
        let m = mult_matrix(&one, &bergman, &bergman, 10).unwrap();
        assert!((&m.entries - CMatrix::identity(11, 11)).norm() < 1e-14);

        assert!(matches!(mult_matrix(&z1(), &hardy, &hardy, 39), Err(Error::DegreeCap { .. })));
    }

    #[test]
    fn inclusion_examples() {
        let sp = BesovSpace::new(&RadialWeight::unit(1).unwrap(), 1.0, 80).unwrap();
        let r = inclusion_contractivity_check(&z1(), &sp, 1.0, 1.0, 50, 0).unwrap();
        assert!(r.pass && (r.norm_source.unwrap() - r.norm_target.unwrap()).abs() < 1e-12);
        let r = inclusion_contractivity_check(&z1(), &sp, 1.0, 0.0, 50, 0).unwrap();
        assert!(r.hypothesis_holds && r.pass);
        assert!((r.norm_target.unwrap() - (51.0f64 / 52.0).sqrt()).abs() < 1e-10);
        assert!((r.norm_source.unwrap() - (8.0f64 / 3.0).sqrt()).abs() < 1e-10);

        let nu = BesovSpace::new(&RadialWeight::from_profile(1, crate::WeightDensity::power(1.0).unwrap()).unwrap(), 0.0, 80).unwrap();
        let r = rectangular_inclusion_check(&z1(), &sp, &nu, 1.0, 0.5, 0.5, 0.0, 40, 0).unwrap();
        assert!(r.hypothesis_holds && r.pass, "{r:?}");
    }

    #[test]
    fn column_row() {
        let hardy = BesovSpace::from_kernel(1, &[1.0; 64], "hardy").unwrap();
        let one = GradedSeries::constant(1, Complex64::new(1.0, 0.0));
        let r = column_row_norms(&[z1()], &hardy, &hardy, 20, 0).unwrap();
        assert!((r.col - r.row).abs() < 1e-12);
        let r = column_row_norms(&[one, z1()], &hardy, &hardy, 40, 0).unwrap();
        assert!((r.col - 2f64.sqrt()).abs() < 1e-10 && (r.row - 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn growth_examples() {
        let one = GradedSeries::constant(1, Complex64::new(1.0, 0.0));
        assert!((growth_norm(std::slice::from_ref(&one), 0.0, &GrowthOptions::default()).unwrap() - 1.0).abs() < 1e-15);
        // sup r (1 − r²)^{1/2} = 1/2 at r² = 1/2.
        let g = growth_norm(&[z1()], 0.5, &GrowthOptions::default()).unwrap();
        assert!((g - 0.5).abs() < 1e-6 && g <= 0.5);
        let c = GradedSeries::constant(1, Complex64::new(3.0, 0.0));
        let g = growth_norm(&[c, GradedSeries::constant(1, Complex64::new(4.0, 0.0))], 0.0, &GrowthOptions::default()).unwrap();
        assert!((g - 5.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_levels() {
        let w = RadialWeight::unit(1).unwrap();
        let one = GradedSeries::constant(1, Complex64::new(1.0, 0.0));
        let r = derivative_multiplier_report(&[one], &w, 0.5, 0.5, 2, 10, 0).unwrap();
        assert!((r.levels[0].norm - 1.0).abs() < 1e-10);
        assert!(r.levels[1..].iter().all(|l| l.norm == 0.0));
        assert!((r.growth_norm - 1.0).abs() < 1e-15);
        let z2 = GradedSeries::monomial(vec![2], Complex64::new(1.0, 0.0));
        let r = derivative_multiplier_report(&[z2], &w, 0.5, 0.5, 2, 10, 0).unwrap();
        assert!(r.levels.iter().all(|l| l.norm.is_finite() && l.norm > 0.0));
    }
}
