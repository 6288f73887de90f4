//! Average-case L2 errors of linear sampling algorithms through the
//! reproducing-kernel identity, their sup-norm counterparts and the
//! all-functionals lower bound.

use std::fmt;
use std::sync::Arc;

use faer::Mat;

use crate::designs::Design;
use crate::errors::{Error, Result};
use crate::kernel::{self, cross_kernel, GramFactorization, TensorCrossKernel};
use crate::problem::ProblemSpec;
use crate::quadrature::QuadratureRule;
use crate::spectrum::Spectrum;

/// Relative two-resolution difference above which quadrature is rejected.
pub const QUADRATURE_TOLERANCE: f64 = 1e-4;

/// Cap on the number of sup-grid cells.
pub const MAX_SUP_GRID_CELLS: u128 = 1 << 24;

/// Target size of a block of kernel columns held in memory at once.
const BLOCK_ENTRIES: usize = 1 << 22;

pub type CoefficientFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// How the algorithm weights the samples at a point `x`.
#[derive(Clone)]
pub enum Coefficients {
    /// `g(x) = K^{-1} r(x)`, the conditional mean.
    SplineOptimal,
    /// User-provided `g(x)`, one weight per design point.
    Explicit(CoefficientFn),
}

impl fmt::Debug for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficients::SplineOptimal => f.write_str("SplineOptimal"),
            Coefficients::Explicit(_) => f.write_str("Explicit(..)"),
        }
    }
}

/// Nonadaptive linear algorithm `U(f)(x) = Σ_j f(x_j) g_j(x)`.
#[derive(Debug, Clone)]
pub struct LinearAlgorithm {
    spec: ProblemSpec,
    gram: GramFactorization,
    coefficients: Coefficients,
}

impl LinearAlgorithm {
    pub fn spline(design: &Design, spec: &ProblemSpec) -> Result<Self> {
        Self::with_coefficients(design, spec, Coefficients::SplineOptimal)
    }

    pub fn explicit(design: &Design, spec: &ProblemSpec, g: CoefficientFn) -> Result<Self> {
        Self::with_coefficients(design, spec, Coefficients::Explicit(g))
    }

    fn with_coefficients(design: &Design, spec: &ProblemSpec, coefficients: Coefficients) -> Result<Self> {
        if design.dim() != spec.d() {
            return Err(Error::DimensionMismatch { expected: spec.d(), got: design.dim() });
        }
        let gram = if design.is_empty() {
            GramFactorization::empty(spec.d())
        } else {
            kernel::gram(design, spec)?
        };
        Ok(Self { spec: spec.clone(), gram, coefficients })
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn design(&self) -> &Design {
        self.gram.design()
    }

    pub fn gram(&self) -> &GramFactorization {
        &self.gram
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coefficients
    }

    pub fn n(&self) -> usize {
        self.gram.n()
    }

    fn explicit_weights(&self, g: &CoefficientFn, x: &[f64]) -> Result<Vec<f64>> {
        let w = g(x);
        if w.len() != self.n() {
            return Err(Error::LengthMismatch { expected: self.n(), got: w.len() });
        }
        Ok(w)
    }

    /// Coefficient matrix `[g(y_1) … g(y_m)]` (`n × m`) at flat points.
    pub fn coefficient_matrix(&self, points: &[f64]) -> Result<Mat<f64>> {
        let d = self.spec.d();
        match &self.coefficients {
            Coefficients::SplineOptimal => {
                let mut cols = cross_kernel(self.design(), self.spec.r(), points);
                self.gram.solve_in_place(cols.as_mut());
                Ok(cols)
            }
            Coefficients::Explicit(g) => {
                let m = points.len() / d;
                let mut out = Mat::<f64>::zeros(self.n(), m);
                for q in 0..m {
                    let w = self.explicit_weights(g, &points[q * d..(q + 1) * d])?;
                    for (j, v) in w.into_iter().enumerate() {
                        out[(j, q)] = v;
                    }
                }
                Ok(out)
            }
        }
    }

    /// Squared RKHS norm of the residual representer `h*(·, y)` for each
    /// column of kernel values `cols` (with `diag = R(y, y)`).
    fn variances_from_columns(
        &self,
        mut cols: Mat<f64>,
        diag: &[f64],
        point: impl Fn(usize, &mut [f64]),
    ) -> Result<Vec<f64>> {
        let n = self.n();
        let m = diag.len();
        match &self.coefficients {
            Coefficients::SplineOptimal => {
                if n > 0 {
                    self.gram.solve_lower_in_place(cols.as_mut());
                }
                Ok((0..m)
                    .map(|q| {
                        let s: f64 = (0..n).map(|j| cols[(j, q)] * cols[(j, q)]).sum();
                        diag[q] - s
                    })
                    .collect())
            }
            Coefficients::Explicit(g) => {
                let k = self.gram.matrix();
                let mut x = vec![0.0; self.spec.d()];
                let mut out = Vec::with_capacity(m);
                for q in 0..m {
                    point(q, &mut x);
                    let w = self.explicit_weights(g, &x)?;
                    let cross: f64 = (0..n).map(|j| w[j] * cols[(j, q)]).sum();
                    let mut quad = 0.0;
                    for j in 0..n {
                        let kw: f64 = (0..n).map(|i| k[(j, i)] * w[i]).sum();
                        quad += w[j] * kw;
                    }
                    out.push(diag[q] - 2.0 * cross + quad);
                }
                Ok(out)
            }
        }
    }

    /// `‖h*(·, y)‖²` at flat evaluation points.
    pub fn variances(&self, points: &[f64]) -> Result<Vec<f64>> {
        let d = self.spec.d();
        if points.len() % d != 0 {
            return Err(Error::DimensionMismatch { expected: d, got: points.len() % d });
        }
        for p in points.chunks_exact(d) {
            self.spec.check_point(p)?;
        }
        let m = points.len() / d;
        let block = (BLOCK_ENTRIES / self.n().max(1)).max(1);
        let mut out = Vec::with_capacity(m);
        for start in (0..m).step_by(block) {
            let end = (start + block).min(m);
            let pts = &points[start * d..end * d];
            let cols = cross_kernel(self.design(), self.spec.r(), pts);
            let diag: Vec<f64> = pts
                .chunks_exact(d)
                .map(|p| kernel::cov_unchecked(p, p, self.spec.r()))
                .collect();
            out.extend(self.variances_from_columns(cols, &diag, |q, x| {
                x.copy_from_slice(&pts[q * d..(q + 1) * d])
            })?);
        }
        Ok(out)
    }

    /// Streams `(weight-free node index, variance)` over a tensor grid given
    /// by per-axis nodes, in row-major order.
    fn tensor_variances(&self, nodes: &[&[f64]], mut sink: impl FnMut(&[usize], f64)) -> Result<()> {
        let tk = TensorCrossKernel::new(self.design(), self.spec.r(), nodes);
        let total = tk.total();
        let d = nodes.len();
        let block = (BLOCK_ENTRIES / self.n().max(1)).max(1);
        let mut idx = vec![0usize; d];
        for start in (0..total).step_by(block) {
            let count = block.min(total - start);
            let (cols, diag) = tk.chunk(start, count);
            let vars = self.variances_from_columns(cols, &diag, |q, x| {
                let mut i = vec![0usize; d];
                tk.decode(start + q, &mut i);
                for k in 0..d {
                    x[k] = nodes[k][i[k]];
                }
            })?;
            for (q, v) in vars.into_iter().enumerate() {
                tk.decode(start + q, &mut idx);
                sink(&idx, v);
            }
        }
        Ok(())
    }

    /// `∫ ‖h*(·, x)‖² dx` by the given rule.
    pub fn integrated_variance(&self, quad: &QuadratureRule) -> Result<f64> {
        if quad.dim() != self.spec.d() {
            return Err(Error::DimensionMismatch { expected: self.spec.d(), got: quad.dim() });
        }
        let nodes: Vec<&[f64]> = quad.axes().iter().map(|a| a.nodes.as_slice()).collect();
        let mut total = 0.0;
        self.tensor_variances(&nodes, |idx, v| total += quad.weight(idx) * v)?;
        Ok(total)
    }
}

/// `‖h*(·, x)‖²_μ = R(x,x) - 2 g(x)ᵀ r(x) + g(x)ᵀ K g(x)`.
pub fn pointwise_variance(x: &[f64], alg: &LinearAlgorithm) -> Result<f64> {
    Ok(alg.variances(x)?[0])
}

/// Average error with its accuracy diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub n: usize,
    pub e_avg: f64,
    pub e_wor_bound: Option<f64>,
    /// Relative difference against a twice-refined rule (0 for the exact route).
    pub quad_residual: f64,
}

impl ErrorReport {
    pub const CSV_HEADER: &'static str = "n,e_avg,e_wor_bound,quad_residual";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.n,
            self.e_avg,
            self.e_wor_bound.map(|v| v.to_string()).unwrap_or_default(),
            self.quad_residual
        )
    }
}

fn sqrt_clamped(v: f64) -> f64 {
    v.max(0.0).sqrt()
}

/// `e_avg = (∫ ‖h*(·,x)‖² dx)^{1/2}` by quadrature, checked against the
/// rule with twice as many nodes per panel.
pub fn avg_error(alg: &LinearAlgorithm, quad: &QuadratureRule) -> Result<ErrorReport> {
    let coarse = sqrt_clamped(alg.integrated_variance(quad)?);
    let fine = sqrt_clamped(alg.integrated_variance(&quad.refined()?)?);
    let diff = (coarse - fine).abs();
    let rel_diff = if fine > 0.0 { diff / fine } else { diff };
    if rel_diff > QUADRATURE_TOLERANCE {
        return Err(Error::NonConvergence { rel_diff });
    }
    Ok(ErrorReport { n: alg.n(), e_avg: coarse, e_wor_bound: None, quad_residual: rel_diff })
}

/// Composite rule cut at every distinct design coordinate; the spline
/// variance is a polynomial of degree `4 r_k + 2` on every cell, so `p ≥ 2 r_max + 2`
/// integrates it exactly.
pub fn aligned_rule(alg: &LinearAlgorithm, p: usize) -> Result<QuadratureRule> {
    let d = alg.spec().d();
    QuadratureRule::composite(p, (0..d).map(|k| alg.design().axis_values(k)).collect())
}

/// Work cap `nodes · n²` below which [`avg_error_exact`] integrates on the
/// aligned rule instead of using the moment identity.
pub const ALIGNED_WORK_CAP: f64 = 8.0e9;

/// Spline-mode average error without quadrature error.
///
/// Small problems integrate the piecewise-polynomial variance on
/// [`aligned_rule`], which only cancels pointwise. Larger ones use
/// `e² = ∫R(x,x)dx - tr(K^{-1} M)` with `M_ij = ∫ R(x_i, x) R(x, x_j) dx`,
/// rejected with [`Error::NonConvergence`] when the global cancellation
/// leaves fewer than one reliable digit.
pub fn avg_error_exact(alg: &LinearAlgorithm) -> Result<ErrorReport> {
    if !matches!(alg.coefficients(), Coefficients::SplineOptimal) {
        return Err(Error::Config("exact average error needs spline-optimal coefficients".into()));
    }
    let spec = alg.spec();
    let trace = kernel::trace(spec);
    let n = alg.n();
    if n == 0 {
        return Ok(ErrorReport { n, e_avg: trace.sqrt(), e_wor_bound: None, quad_residual: 0.0 });
    }
    let p = 2 * *spec.r().iter().max().expect("d >= 1") as usize + 2;
    let nodes: f64 = (0..spec.d())
        .map(|k| ((alg.design().axis_values(k).len() + 1) * p) as f64)
        .product();
    let e_sq = if nodes * (n as f64).powi(2) <= ALIGNED_WORK_CAP {
        alg.integrated_variance(&aligned_rule(alg, p)?)?
    } else {
        let (e_sq, rounding) = moment_route(alg, trace);
        if e_sq < 10.0 * rounding {
            return Err(Error::NonConvergence { rel_diff: rounding / e_sq.abs().max(f64::MIN_POSITIVE) });
        }
        e_sq
    };
    Ok(ErrorReport { n, e_avg: sqrt_clamped(e_sq), e_wor_bound: None, quad_residual: 0.0 })
}

/// Moment identity and an estimate of its rounding error `ε κ(K) trace`.
fn moment_route(alg: &LinearAlgorithm, trace: f64) -> (f64, f64) {
    let spec = alg.spec();
    let n = alg.n();
    let design = alg.design();
    let d = spec.d();
    let mut tables = Vec::with_capacity(d);
    let mut index = vec![0usize; n * d];
    for k in 0..d {
        let values = design.axis_values(k);
        for (i, p) in design.points().enumerate() {
            index[i * d + k] = values
                .binary_search_by(|v| v.total_cmp(&p[k]))
                .expect("coordinate present");
        }
        let m = values.len();
        let rk = spec.r()[k];
        let mut t = vec![0.0; m * m];
        for a in 0..m {
            for b in a..m {
                let v = kernel::moment1d(values[a], values[b], rk);
                t[a * m + b] = v;
                t[b * m + a] = v;
            }
        }
        tables.push((m, t));
    }
    let mut x = Mat::from_fn(n, n, |i, j| {
        let mut v = 1.0;
        for (k, (m, t)) in tables.iter().enumerate() {
            v *= t[index[i * d + k] * m + index[j * d + k]];
        }
        v
    });
    alg.gram().solve_lower_in_place(x.as_mut());
    let mut y = x.transpose().to_owned();
    drop(x);
    alg.gram().solve_lower_in_place(y.as_mut());
    let explained: f64 = (0..n).map(|i| y[(i, i)]).sum();
    let l = alg.gram().factor();
    let (lo, hi) = (0..n).fold((f64::INFINITY, 0.0f64), |(lo, hi), i| {
        let v = l[(i, i)].abs();
        (lo.min(v), hi.max(v))
    });
    let kappa = (hi / lo).powi(2);
    (trace - explained, f64::EPSILON * kappa * trace)
}

/// Maximum and root-mean-square of `‖h*(·,x)‖` over cell centers of a
/// uniform grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupGridStats {
    pub max: f64,
    pub rms: f64,
}

pub fn sup_grid_stats(alg: &LinearAlgorithm, grid_resolution: usize) -> Result<SupGridStats> {
    if grid_resolution < 2 {
        return Err(Error::Domain("sup grid resolution must be at least 2".into()));
    }
    let d = alg.spec().d();
    let cells = (grid_resolution as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if cells > MAX_SUP_GRID_CELLS {
        return Err(Error::Overflow { size: cells, cap: MAX_SUP_GRID_CELLS });
    }
    let centers: Vec<f64> =
        (0..grid_resolution).map(|i| (i as f64 + 0.5) / grid_resolution as f64).collect();
    let nodes: Vec<&[f64]> = vec![centers.as_slice(); d];
    let mut max = 0.0f64;
    let mut sum = 0.0;
    alg.tensor_variances(&nodes, |_, v| {
        let v = v.max(0.0);
        max = max.max(v);
        sum += v;
    })?;
    Ok(SupGridStats { max: max.sqrt(), rms: (sum / cells as f64).sqrt() })
}

/// Odd per-axis sup-grid resolution for dimension `d`; odd counts keep the
/// cell centers off dyadic design points.
pub fn default_sup_grid(d: usize) -> usize {
    match d {
        1 => 513,
        2 => 129,
        3 => 33,
        4 => 17,
        5 => 9,
        _ => 5,
    }
}

/// Cell-center estimate of `ess sup_x ‖h*(·,x)‖_μ`; a lower estimate of
/// the true supremum.
pub fn worst_error_bound(alg: &LinearAlgorithm, grid_resolution: usize) -> Result<f64> {
    Ok(sup_grid_stats(alg, grid_resolution)?.max)
}

/// Quadrature error report paired with the sup-grid estimate.
pub fn error_report(alg: &LinearAlgorithm, quad: &QuadratureRule, grid_resolution: usize) -> Result<ErrorReport> {
    let mut report = avg_error(alg, quad)?;
    report.e_wor_bound = Some(worst_error_bound(alg, grid_resolution)?);
    Ok(report)
}

/// Optimal error with `n` arbitrary linear functionals, `(Σ_{i>n} λ_i)^{1/2}`.
pub fn all_info_error(spectrum: &Spectrum, n: usize) -> Result<f64> {
    Ok(sqrt_clamped(spectrum.tail_completed(n)?))
}

/// Applies the algorithm to sample values: `Σ_j samples_j g_j(x)` at each
/// evaluation point.
pub fn predict(alg: &LinearAlgorithm, samples: &[f64], eval_points: &[f64]) -> Result<Vec<f64>> {
    let n = alg.n();
    if samples.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: samples.len() });
    }
    let d = alg.spec().d();
    if eval_points.len() % d != 0 {
        return Err(Error::DimensionMismatch { expected: d, got: eval_points.len() % d });
    }
    for p in eval_points.chunks_exact(d) {
        alg.spec().check_point(p)?;
    }
    match alg.coefficients() {
        Coefficients::SplineOptimal => {
            let alpha = if n == 0 { Vec::new() } else { alg.gram().solve(samples)? };
            let pts: Vec<&[f64]> = alg.design().points().collect();
            Ok(eval_points
                .chunks_exact(d)
                .map(|x| {
                    pts.iter()
                        .zip(&alpha)
                        .map(|(p, a)| a * kernel::cov_unchecked(p, x, alg.spec().r()))
                        .sum()
                })
                .collect())
        }
        Coefficients::Explicit(_) => {
            let g = alg.coefficient_matrix(eval_points)?;
            Ok((0..g.ncols())
                .map(|q| (0..n).map(|j| samples[j] * g[(j, q)]).sum())
                .collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{grid, Provenance};

    fn spec(r: &[u32]) -> ProblemSpec {
        ProblemSpec::with_smoothness(r).unwrap()
    }

    fn one_point() -> LinearAlgorithm {
        let d = Design::from_points(1, vec![1.0], Provenance::Grid).unwrap();
        LinearAlgorithm::spline(&d, &spec(&[0])).unwrap()
    }

    #[test]
    fn pointwise_variance_examples() {
        let alg = one_point();
        assert!((pointwise_variance(&[0.5], &alg).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(pointwise_variance(&[0.0], &alg).unwrap(), 0.0);
        let zero: CoefficientFn = Arc::new(|_| vec![0.0]);
        let d = Design::from_points(1, vec![1.0], Provenance::Grid).unwrap();
        let alg = LinearAlgorithm::explicit(&d, &spec(&[0]), zero).unwrap();
        assert!((pointwise_variance(&[0.3], &alg).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn explicit_length_mismatch_is_reported() {
        let bad: CoefficientFn = Arc::new(|_| vec![0.0, 1.0]);
        let d = Design::from_points(1, vec![1.0], Provenance::Grid).unwrap();
        let alg = LinearAlgorithm::explicit(&d, &spec(&[0]), bad).unwrap();
        assert!(matches!(pointwise_variance(&[0.3], &alg), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn avg_error_examples() {
        let q1 = QuadratureRule::default_for(1).unwrap();
        let empty = LinearAlgorithm::spline(&Design::empty(1), &spec(&[0])).unwrap();
        let e = avg_error(&empty, &q1).unwrap().e_avg;
        assert!((e - 0.5f64.sqrt()).abs() < 1e-12);
        let e = avg_error(&one_point(), &q1).unwrap().e_avg;
        assert!((e - (1.0f64 / 6.0).sqrt()).abs() < 1e-12);
        let empty2 = LinearAlgorithm::spline(&Design::empty(2), &spec(&[0, 0])).unwrap();
        let e = avg_error(&empty2, &QuadratureRule::default_for(2).unwrap()).unwrap().e_avg;
        assert!((e - 0.5).abs() < 1e-12);
    }

    #[test]
    fn quadrature_dimension_checked() {
        let q = QuadratureRule::default_for(2).unwrap();
        assert!(matches!(avg_error(&one_point(), &q), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn plain_rule_rejects_unresolved_kinks() {
        let alg = LinearAlgorithm::spline(&grid(&[37]).unwrap(), &spec(&[0])).unwrap();
        let q = QuadratureRule::gauss_legendre(1, 8).unwrap();
        assert!(matches!(avg_error(&alg, &q), Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn exact_route_matches_grid_closed_form() {
        // Brownian motion on {i/m}: e² = 1/(6m)
        for m in [1usize, 4, 16, 100] {
            let alg = LinearAlgorithm::spline(&grid(&[m]).unwrap(), &spec(&[0])).unwrap();
            let e = avg_error_exact(&alg).unwrap().e_avg;
            assert!((e * e - 1.0 / (6.0 * m as f64)).abs() < 1e-13, "m={m}");
        }
        // Brownian sheet on the m×m grid: e² = (1/(6m))(1 - 1/(6m))
        for m in [2usize, 5, 9] {
            let alg = LinearAlgorithm::spline(&grid(&[m, m]).unwrap(), &spec(&[0, 0])).unwrap();
            let e = avg_error_exact(&alg).unwrap().e_avg;
            let h = 1.0 / (6.0 * m as f64);
            assert!((e * e - h * (1.0 - h)).abs() < 1e-13, "m={m}");
        }
    }

    #[test]
    fn moment_identity_agrees_with_aligned_rule() {
        let sp = spec(&[0, 1]);
        let design = crate::designs::random_design(30, &sp, 11).unwrap();
        let alg = LinearAlgorithm::spline(&design, &sp).unwrap();
        let (e_sq, rounding) = moment_route(&alg, kernel::trace(&sp));
        let aligned = alg.integrated_variance(&aligned_rule(&alg, 4).unwrap()).unwrap();
        assert!((e_sq - aligned).abs() < 1e-12, "{e_sq} {aligned}");
        assert!(rounding < 1e-3 * e_sq);
        // large grid: the moment identity loses every digit, the estimate says so
        let sp = spec(&[1]);
        let alg = LinearAlgorithm::spline(&grid(&[512]).unwrap(), &sp).unwrap();
        let (e_sq, rounding) = moment_route(&alg, kernel::trace(&sp));
        assert!(e_sq < 10.0 * rounding, "{e_sq} {rounding}");
        let e = avg_error_exact(&alg).unwrap().e_avg;
        let coarse = avg_error_exact(&LinearAlgorithm::spline(&grid(&[64]).unwrap(), &sp).unwrap())
            .unwrap()
            .e_avg;
        // e ~ n^{-3/2}
        assert!((coarse / e / 8f64.powf(1.5) - 1.0).abs() < 0.01, "{coarse} {e}");
    }

    #[test]
    fn worst_error_examples() {
        let w = worst_error_bound(&one_point(), 512).unwrap();
        assert!((w - 0.5).abs() < 1e-3);
        let empty = LinearAlgorithm::spline(&Design::empty(1), &spec(&[0])).unwrap();
        assert!(worst_error_bound(&empty, 512).unwrap() >= 0.999);
        assert!(worst_error_bound(&empty, 1).is_err());
        let empty3 = LinearAlgorithm::spline(&Design::empty(3), &spec(&[0, 0, 0])).unwrap();
        assert!(matches!(worst_error_bound(&empty3, 1024), Err(Error::Overflow { .. })));
    }

    #[test]
    fn predict_examples() {
        let alg = one_point();
        assert_eq!(predict(&alg, &[0.0], &[0.2, 0.7]).unwrap(), vec![0.0, 0.0]);
        assert!((predict(&alg, &[2.0], &[0.5]).unwrap()[0] - 1.0).abs() < 1e-15);
        assert!(matches!(predict(&alg, &[1.0, 2.0], &[0.5]), Err(Error::LengthMismatch { .. })));
        let d = Design::from_points(2, vec![0.3, 0.9, 0.8, 0.4, 1.0, 1.0], Provenance::Random).unwrap();
        let alg = LinearAlgorithm::spline(&d, &spec(&[1, 0])).unwrap();
        let y = [0.3, -1.2, 2.5];
        let p = predict(&alg, &y, d.coords()).unwrap();
        for (a, b) in p.iter().zip(&y) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn csv_row_format() {
        let r = ErrorReport { n: 3, e_avg: 0.5, e_wor_bound: Some(0.75), quad_residual: 0.0 };
        assert_eq!(r.csv_row(), "3,0.5,0.75,0");
        let r = ErrorReport { e_wor_bound: None, ..r };
        assert_eq!(r.csv_row(), "3,0.5,,0");
    }
}
