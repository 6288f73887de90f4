//! Folded Wiener sheet covariance kernel, Gram matrices and RKHS norms of
//! finite kernel combinations.

use faer::{Mat, MatRef, Side};

use crate::designs::Design;
use crate::errors::{Error, Result};
use crate::problem::ProblemSpec;
use crate::quadrature::gauss_legendre;

/// Largest coordinate smoothness supported by the closed-form kernel.
pub const MAX_SMOOTHNESS: u32 = 16;

/// Diagonal jitter ladder, relative to `trace(K) / n`.
pub const JITTER_LADDER: [f64; 4] = [0.0, 1e-14, 1e-12, 1e-10];

fn factorial(r: u32) -> f64 {
    (1..=r).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// One coordinate factor of the covariance kernel,
/// `∫_0^{min(t,x)} (t-s)^r (x-s)^r ds / (r!)^2`.
pub fn factor1d(t: f64, x: f64, r: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) || !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("kernel arguments ({t}, {x}) outside [0, 1]")));
    }
    if r > MAX_SMOOTHNESS {
        return Err(Error::Domain(format!("smoothness {r} exceeds {MAX_SMOOTHNESS}")));
    }
    Ok(factor_unchecked(t, x, r))
}

/// [`factor1d`] without argument validation.
#[inline]
pub(crate) fn factor_unchecked(t: f64, x: f64, r: u32) -> f64 {
    let m = t.min(x);
    if m <= 0.0 {
        return 0.0;
    }
    if r == 0 {
        return m;
    }
    // With u = min(t,x) - s the integrand is (a + u)^r u^r, a = |t - x|, whose
    // binomial expansion has only nonnegative terms.
    let a = (t - x).abs();
    let mut terms = [0.0f64; MAX_SMOOTHNESS as usize + 1];
    let norm = factorial(r).powi(2);
    for k in 0..=r {
        let e = r + k + 1;
        terms[k as usize] =
            binomial(r, k) * a.powi((r - k) as i32) * m.powi(e as i32) / f64::from(e) / norm;
    }
    let terms = &mut terms[..=r as usize];
    terms.sort_unstable_by(|p, q| q.total_cmp(p));
    terms.iter().sum()
}

/// Covariance `R(t, x)`: the product of [`factor1d`] over coordinates.
pub fn cov(t: &[f64], x: &[f64], spec: &ProblemSpec) -> Result<f64> {
    spec.check_point(t)?;
    spec.check_point(x)?;
    Ok(cov_unchecked(t, x, spec.r()))
}

#[inline]
pub(crate) fn cov_unchecked(t: &[f64], x: &[f64], r: &[u32]) -> f64 {
    let mut v = 1.0;
    for ((&tk, &xk), &rk) in t.iter().zip(x).zip(r) {
        v *= factor_unchecked(tk, xk, rk);
        if v == 0.0 {
            break;
        }
    }
    v
}

/// `∫_0^1 factor1d(t, t, r) dt = 1 / ((r!)^2 (2r+1)(2r+2))`.
pub fn diagonal_integral_1d(r: u32) -> f64 {
    let rf = f64::from(r);
    1.0 / (factorial(r).powi(2) * (2.0 * rf + 1.0) * (2.0 * rf + 2.0))
}

/// Trace of the covariance operator, `∫ R(x, x) dx` over the unit cube.
pub fn trace(spec: &ProblemSpec) -> f64 {
    spec.r().iter().map(|&r| diagonal_integral_1d(r)).product()
}

/// `∫_0^1 factor1d(a, t, r) factor1d(t, b, r) dt`, exact up to rounding
/// (the integrand is a polynomial between the breakpoints `a` and `b`).
pub fn moment1d(a: f64, b: f64, r: u32) -> f64 {
    let (nodes, weights) = gauss_legendre(2 * r as usize + 2);
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let mut total = 0.0;
    for (p, q) in [(0.0, lo), (lo, hi), (hi, 1.0)] {
        let len = q - p;
        if len <= 0.0 {
            continue;
        }
        for (x, w) in nodes.iter().zip(&weights) {
            let t = p + len * x;
            total += len * w * factor_unchecked(a, t, r) * factor_unchecked(t, b, r);
        }
    }
    total
}

/// Cholesky-factored Gram matrix `K_ij = R(x_i, x_j)` of a design.
#[derive(Debug, Clone)]
pub struct GramFactorization {
    design: Design,
    matrix: Mat<f64>,
    factor: Mat<f64>,
    jitter: f64,
}

/// Assembles and factors the Gram matrix of `design`, climbing the jitter
/// ladder until the Cholesky factorization succeeds.
pub fn gram(design: &Design, spec: &ProblemSpec) -> Result<GramFactorization> {
    if design.is_empty() {
        return Err(Error::Domain("gram matrix of an empty design".into()));
    }
    GramFactorization::build(design, spec)
}

impl GramFactorization {
    pub(crate) fn build(design: &Design, spec: &ProblemSpec) -> Result<Self> {
        if design.dim() != spec.d() {
            return Err(Error::DimensionMismatch { expected: spec.d(), got: design.dim() });
        }
        if let Some(p) = design.points().find(|p| p.iter().any(|&v| v <= 0.0)) {
            return Err(Error::Domain(format!(
                "design point {p:?} has a zero coordinate; its kernel column vanishes"
            )));
        }
        let n = design.len();
        let r = spec.r();
        let pts: Vec<&[f64]> = design.points().collect();
        let mut matrix = Mat::<f64>::zeros(n, n);
        for j in 0..n {
            for i in j..n {
                let v = cov_unchecked(pts[i], pts[j], r);
                matrix[(i, j)] = v;
                matrix[(j, i)] = v;
            }
        }
        if n == 0 {
            return Ok(Self { design: design.clone(), factor: matrix.clone(), matrix, jitter: 0.0 });
        }
        let scale = (0..n).map(|i| matrix[(i, i)]).sum::<f64>() / n as f64;
        let mut last = 0.0;
        for rel in JITTER_LADDER {
            let jitter = rel * scale;
            last = jitter;
            let mut shifted = matrix.clone();
            for i in 0..n {
                shifted[(i, i)] += jitter;
            }
            if let Ok(llt) = shifted.llt(Side::Lower) {
                let factor = llt.L().to_owned();
                return Ok(Self { design: design.clone(), matrix, factor, jitter });
            }
        }
        Err(Error::Factorization { jitter: last })
    }

    pub(crate) fn empty(d: usize) -> Self {
        Self {
            design: Design::empty(d),
            matrix: Mat::zeros(0, 0),
            factor: Mat::zeros(0, 0),
            jitter: 0.0,
        }
    }

    pub fn design(&self) -> &Design {
        &self.design
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> MatRef<'_, f64> {
        self.matrix.as_ref()
    }

    pub fn factor(&self) -> MatRef<'_, f64> {
        self.factor.as_ref()
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn trace(&self) -> f64 {
        (0..self.n()).map(|i| self.matrix[(i, i)]).sum()
    }

    /// Replaces `rhs` by `L^{-1} rhs`.
    pub fn solve_lower_in_place(&self, rhs: faer::MatMut<'_, f64>) {
        faer::linalg::triangular_solve::solve_lower_triangular_in_place(
            self.factor.as_ref(),
            rhs,
            faer::Par::Seq,
        );
    }

    /// Replaces `rhs` by `(K + jitter I)^{-1} rhs`.
    pub fn solve_in_place(&self, mut rhs: faer::MatMut<'_, f64>) {
        self.solve_lower_in_place(rhs.as_mut());
        faer::linalg::triangular_solve::solve_upper_triangular_in_place(
            self.factor.transpose(),
            rhs,
            faer::Par::Seq,
        );
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n() {
            return Err(Error::LengthMismatch { expected: self.n(), got: b.len() });
        }
        let mut m = Mat::from_fn(b.len(), 1, |i, _| b[i]);
        self.solve_in_place(m.as_mut());
        Ok((0..b.len()).map(|i| m[(i, 0)]).collect())
    }

    /// Relative Frobenius error of `L L^T` against `K + jitter I`.
    pub fn reconstruction_error(&self) -> f64 {
        let n = self.n();
        if n == 0 {
            return 0.0;
        }
        let llt = &self.factor * self.factor.transpose();
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..n {
            for i in 0..n {
                let target = self.matrix[(i, j)] + if i == j { self.jitter } else { 0.0 };
                num += (llt[(i, j)] - target).powi(2);
                den += target * target;
            }
        }
        (num / den).sqrt()
    }
}

/// `c^T K c = ‖Σ_j c_j R(·, x_j)‖²` in the reproducing kernel Hilbert space.
pub fn rkhs_norm_sq(coeffs: &[f64], factorization: &GramFactorization) -> Result<f64> {
    let n = factorization.n();
    if coeffs.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: coeffs.len() });
    }
    let k = factorization.matrix();
    let mut total = 0.0;
    for j in 0..n {
        let mut col = 0.0;
        for i in 0..n {
            col += k[(i, j)] * coeffs[i];
        }
        total += coeffs[j] * col;
    }
    Ok(total)
}

/// Kernel columns `R(x_j, y)` of a design against arbitrary evaluation points
/// (flat, `d` coordinates per point), as an `n × m` matrix.
pub(crate) fn cross_kernel(design: &Design, r: &[u32], points: &[f64]) -> Mat<f64> {
    let d = design.dim();
    let m = points.len() / d;
    let pts: Vec<&[f64]> = design.points().collect();
    Mat::from_fn(pts.len(), m, |j, q| cov_unchecked(pts[j], &points[q * d..(q + 1) * d], r))
}

/// Per-axis factor tables of a design against the nodes of a tensor grid, so
/// that kernel columns at grid points cost `d` multiplications.
pub(crate) struct TensorCrossKernel<'a> {
    n: usize,
    dims: Vec<usize>,
    tables: Vec<Vec<f64>>,
    nodes: &'a [&'a [f64]],
    r: &'a [u32],
}

impl<'a> TensorCrossKernel<'a> {
    pub(crate) fn new(design: &Design, r: &'a [u32], nodes: &'a [&'a [f64]]) -> Self {
        let n = design.len();
        let dims: Vec<usize> = nodes.iter().map(|a| a.len()).collect();
        let tables = nodes
            .iter()
            .enumerate()
            .map(|(k, axis)| {
                let mut t = Vec::with_capacity(n * axis.len());
                for p in design.points() {
                    t.extend(axis.iter().map(|&y| factor_unchecked(p[k], y, r[k])));
                }
                t
            })
            .collect();
        Self { n, dims, tables, nodes, r }
    }

    pub(crate) fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub(crate) fn decode(&self, mut linear: usize, idx: &mut [usize]) {
        for k in (0..self.dims.len()).rev() {
            idx[k] = linear % self.dims[k];
            linear /= self.dims[k];
        }
    }

    /// Kernel columns and diagonal `R(y, y)` for grid points `start..start+count`.
    pub(crate) fn chunk(&self, start: usize, count: usize) -> (Mat<f64>, Vec<f64>) {
        let d = self.dims.len();
        let mut idx = vec![0usize; d];
        let mut cols = Mat::<f64>::zeros(self.n, count);
        let mut diag = Vec::with_capacity(count);
        for c in 0..count {
            self.decode(start + c, &mut idx);
            let mut rd = 1.0;
            for k in 0..d {
                let y = self.nodes[k][idx[k]];
                rd *= factor_unchecked(y, y, self.r[k]);
            }
            diag.push(rd);
            for j in 0..self.n {
                let mut v = 1.0;
                for k in 0..d {
                    v *= self.tables[k][j * self.dims[k] + idx[k]];
                }
                cols[(j, c)] = v;
            }
        }
        (cols, diag)
    }
}
