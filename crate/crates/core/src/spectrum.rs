//! Eigenvalues of the covariance operator, their tail sums and the fitted
//! decay exponent that decides tractability with arbitrary linear
//! functionals.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use faer::{Mat, Side};
use serde::Serialize;

use crate::errors::{Error, Result};
use crate::kernel::{self, factor_unchecked};
use crate::problem::ProblemSpec;
use crate::quadrature::gauss_legendre;

/// Cap on the number of tensor products a spectrum may hold.
pub const MAX_SPECTRUM_COUNT: usize = 10_000_000;

/// RMS log-residual above which a power-law fit is not trusted.
pub const TRACTABLE_RESIDUAL: f64 = 0.1;

/// Polynomial degree of the per-cell Galerkin basis in [`eig1d`].
pub const GALERKIN_DEGREE: usize = 3;

/// Values at `x ∈ [0,1]` of the first `GALERKIN_DEGREE + 1` Legendre
/// polynomials mapped to `[0,1]`, scaled to unit `L2[0,1]` norm.
fn legendre_row(x: f64) -> [f64; GALERKIN_DEGREE + 1] {
    let z = 2.0 * x - 1.0;
    let mut p = [0.0; GALERKIN_DEGREE + 1];
    p[0] = 1.0;
    p[1] = z;
    for k in 2..=GALERKIN_DEGREE {
        let kf = k as f64;
        p[k] = ((2.0 * kf - 1.0) * z * p[k - 1] - (kf - 1.0) * p[k - 2]) / kf;
    }
    for (k, v) in p.iter_mut().enumerate() {
        *v *= (2.0 * k as f64 + 1.0).sqrt();
    }
    p
}

/// Descending eigenvalues of the operator with kernel `factor1d(·,·,r)` on
/// `L2[0,1]`, from a symmetric Galerkin discretization with `m` unknowns:
/// `⌈m/4⌉` uniform cells carrying discontinuous cubic polynomials. The
/// discrete values are Ritz lower bounds of the true ones. Values below the
/// rounding floor `m·ε·λ_1` are dropped.
pub fn eig1d(r: u32, m: usize) -> Result<Vec<f64>> {
    if m < 8 {
        return Err(Error::Domain(format!("eig1d needs at least 8 unknowns, got {m}")));
    }
    if r > kernel::MAX_SMOOTHNESS {
        return Err(Error::Domain(format!("smoothness {r} exceeds {}", kernel::MAX_SMOOTHNESS)));
    }
    const B: usize = GALERKIN_DEGREE + 1;
    let cells = m.div_ceil(B);
    let dof = cells * B;
    let h = 1.0 / cells as f64;
    // exact for the polynomial integrands on and off the diagonal
    let (gx, gw) = gauss_legendre(r as usize + B + 2);
    let q = gx.len();
    // wphi[a][k] = w_a φ_k(x_a) on the reference cell, without the 1/√h scale
    let wphi: Vec<[f64; B]> = gx
        .iter()
        .zip(&gw)
        .map(|(&x, &w)| legendre_row(x).map(|v| v * w))
        .collect();
    let nodes: Vec<f64> = (0..cells)
        .flat_map(|i| gx.iter().map(move |x| (i as f64 + x) * h))
        .collect();
    let mut a = Mat::<f64>::zeros(dof, dof);
    let mut kk = vec![0.0; q * q];
    for j in 0..cells {
        for i in 0..j {
            for c in 0..q {
                for b in 0..q {
                    kk[c * q + b] = factor_unchecked(nodes[i * q + c], nodes[j * q + b], r);
                }
            }
            for k in 0..B {
                for l in 0..B {
                    let mut v = 0.0;
                    for c in 0..q {
                        let mut inner = 0.0;
                        for b in 0..q {
                            inner += kk[c * q + b] * wphi[b][l];
                        }
                        v += wphi[c][k] * inner;
                    }
                    // (√h)² from the measure over the 1/√h basis scaling
                    let v = v * h;
                    a[(i * B + k, j * B + l)] = v;
                    a[(j * B + l, i * B + k)] = v;
                }
            }
        }
        // diagonal cell: split along s = t, both halves are polynomial
        let left = j as f64 * h;
        let mut block = [[0.0; B]; B];
        for (b, &xb) in gx.iter().enumerate() {
            let t = left + xb * h;
            let pt = legendre_row(xb);
            let mut inner = [0.0; B];
            for (c, &xc) in gx.iter().enumerate() {
                let u = xb * xc;
                let ks = factor_unchecked(left + u * h, t, r) * gw[c] * xb;
                let ps = legendre_row(u);
                for k in 0..B {
                    inner[k] += ks * ps[k];
                }
            }
            for k in 0..B {
                for l in 0..B {
                    let sym = inner[k] * pt[l] + inner[l] * pt[k];
                    block[k][l] += gw[b] * sym;
                }
            }
        }
        for k in 0..B {
            for l in 0..B {
                a[(j * B + k, j * B + l)] = block[k][l] * h;
            }
        }
    }
    let mut ev = a
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    ev.reverse();
    let floor = dof as f64 * f64::EPSILON * ev.first().copied().unwrap_or(0.0);
    ev.retain(|&v| v > floor);
    Ok(ev)
}

/// Descending eigenvalue list of a covariance operator with its trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    per_axis: Vec<Vec<f64>>,
    trace: f64,
    /// `suffix[i] = Σ_{k ≥ i} λ_k` over the computed list, `suffix[N] = 0`.
    suffix: Vec<f64>,
}

fn check_descending_positive(list: &[f64], what: &str) -> Result<()> {
    if list.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::Domain(format!("{what} must be positive")));
    }
    if list.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::Domain(format!("{what} must be descending")));
    }
    Ok(())
}

impl Spectrum {
    /// Wraps a descending list with a known operator trace.
    pub fn from_eigenvalues(eigenvalues: Vec<f64>, trace: f64) -> Result<Self> {
        Self::assemble(eigenvalues, Vec::new(), trace)
    }

    fn assemble(eigenvalues: Vec<f64>, per_axis: Vec<Vec<f64>>, trace: f64) -> Result<Self> {
        check_descending_positive(&eigenvalues, "eigenvalues")?;
        let mut suffix = vec![0.0; eigenvalues.len() + 1];
        for i in (0..eigenvalues.len()).rev() {
            suffix[i] = suffix[i + 1] + eigenvalues[i];
        }
        if suffix[0] > trace + 1e-8 {
            return Err(Error::Domain(format!(
                "eigenvalue sum {} exceeds trace {trace}",
                suffix[0]
            )));
        }
        Ok(Self { eigenvalues, per_axis, trace, suffix })
    }

    /// Spectrum of the folded Wiener sheet covariance for `spec`: per-axis
    /// Galerkin eigenvalues on `m` cells, the `count` largest tensor
    /// products, and the exact operator trace `∫ R(x,x) dx`.
    pub fn for_problem(spec: &ProblemSpec, m: usize, count: usize) -> Result<Self> {
        let mut cache: Vec<(u32, Vec<f64>)> = Vec::new();
        let mut per_axis = Vec::with_capacity(spec.d());
        for &r in spec.r() {
            if let Some((_, l)) = cache.iter().find(|(rr, _)| *rr == r) {
                per_axis.push(l.clone());
            } else {
                let l = eig1d(r, m)?;
                cache.push((r, l.clone()));
                per_axis.push(l);
            }
        }
        let tensor = tensor_spectrum(&per_axis, count)?;
        Self::assemble(tensor.eigenvalues, per_axis, kernel::trace(spec))
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn per_axis(&self) -> &[Vec<f64>] {
        &self.per_axis
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn computed_count(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Σ_{i ≤ n} λ_i` over the computed list.
    pub fn partial_sum(&self, n: usize) -> f64 {
        let n = n.min(self.computed_count());
        self.suffix[0] - self.suffix[n]
    }

    /// `Σ_{i > n} λ_i = (trace - Σ computed) + Σ_{n < i ≤ N} λ_i` for `n ≤ N`.
    pub fn tail(&self, n: usize) -> Result<f64> {
        if n > self.computed_count() {
            return Err(Error::InsufficientSpectrum(format!(
                "tail at n = {n} beyond {} computed eigenvalues",
                self.computed_count()
            )));
        }
        Ok((self.trace - self.suffix[0]) + self.suffix[n])
    }

    /// Default fitting window `[16, N/4]`.
    pub fn default_window(&self) -> (usize, usize) {
        (16, self.computed_count() / 4)
    }

    /// Tail at any `n`, extrapolating past the computed list with the
    /// power law fitted on the default window.
    pub fn tail_completed(&self, n: usize) -> Result<f64> {
        let big_n = self.computed_count();
        if n <= big_n {
            return self.tail(n);
        }
        let verdict = tail_exponent_fit(self, self.default_window()).map_err(|e| {
            Error::InsufficientSpectrum(format!("no tail completion past n = {big_n}: {e}"))
        })?;
        if !verdict.tractable {
            return Err(Error::InsufficientSpectrum(format!(
                "tail does not follow a power law (residual {})",
                verdict.residual
            )));
        }
        Ok(self.tail(big_n)? * (big_n as f64 / n as f64).powf(2.0 * verdict.alpha))
    }

    pub const CSV_HEADER: &'static str = "index,eigenvalue,cumulative,tail";

    /// CSV rows `index,eigenvalue,cumulative,tail` (1-based index).
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for (i, v) in self.eigenvalues.iter().enumerate() {
            let tail = (self.trace - self.suffix[0]) + self.suffix[i + 1];
            out.push_str(&format!("{},{},{},{}\n", i + 1, v, self.partial_sum(i + 1), tail));
        }
        out
    }
}

#[derive(Debug, PartialEq)]
struct Candidate {
    value: f64,
    idx: Vec<usize>,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap on value, ties broken toward the smaller index tuple
        self.value.total_cmp(&other.value).then_with(|| other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The `count` largest products `λ^{(1)}_{i_1} ⋯ λ^{(d)}_{i_d}`, by best-first
/// search over the index lattice. Trace is the product of per-axis sums.
pub fn tensor_spectrum(per_axis: &[Vec<f64>], count: usize) -> Result<Spectrum> {
    if per_axis.is_empty() {
        return Err(Error::Domain("tensor spectrum needs at least one axis".into()));
    }
    for l in per_axis {
        if l.is_empty() {
            return Err(Error::Domain("per-axis eigenvalue list is empty".into()));
        }
        check_descending_positive(l, "per-axis eigenvalues")?;
    }
    if count > MAX_SPECTRUM_COUNT {
        return Err(Error::Overflow { size: count as u128, cap: MAX_SPECTRUM_COUNT as u128 });
    }
    let total = per_axis
        .iter()
        .try_fold(1usize, |acc, l| acc.checked_mul(l.len()))
        .unwrap_or(usize::MAX);
    let count = count.min(total);
    let value = |idx: &[usize]| -> f64 { idx.iter().zip(per_axis).map(|(&i, l)| l[i]).product() };
    let d = per_axis.len();
    let mut heap = BinaryHeap::new();
    let mut seen = HashSet::new();
    let start = vec![0usize; d];
    seen.insert(start.clone());
    heap.push(Candidate { value: value(&start), idx: start });
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let Some(Candidate { value: v, idx }) = heap.pop() else { break };
        out.push(v);
        for k in 0..d {
            if idx[k] + 1 < per_axis[k].len() {
                let mut next = idx.clone();
                next[k] += 1;
                if seen.insert(next.clone()) {
                    heap.push(Candidate { value: value(&next), idx: next });
                }
            }
        }
    }
    let trace = per_axis.iter().map(|l| l.iter().rev().sum::<f64>()).product();
    Spectrum::assemble(out, per_axis.to_vec(), trace)
}

/// Fitted tail decay `Σ_{i>n} λ_i ≈ C n^{-2α}` and the resulting exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TractabilityVerdict {
    pub alpha: f64,
    pub p_star: f64,
    pub residual: f64,
    pub tractable: bool,
}

/// Least-squares fit of `log tail(n) = a - 2α log n` at logarithmically
/// spaced `n` in `n_range`.
pub fn tail_exponent_fit(spectrum: &Spectrum, n_range: (usize, usize)) -> Result<TractabilityVerdict> {
    let (lo, hi) = n_range;
    if lo == 0 || hi <= lo {
        return Err(Error::Domain(format!("bad fitting window [{lo}, {hi}]")));
    }
    if (hi as f64) < 10.0 * lo as f64 {
        return Err(Error::InsufficientSpan(format!("window [{lo}, {hi}] spans less than a decade")));
    }
    if hi >= spectrum.computed_count() {
        return Err(Error::InsufficientSpectrum(format!(
            "window end {hi} not below computed count {}",
            spectrum.computed_count()
        )));
    }
    const PER_DECADE: f64 = 16.0;
    let (llo, lhi) = ((lo as f64).ln(), (hi as f64).ln());
    let steps = ((lhi - llo) / std::f64::consts::LN_10 * PER_DECADE).ceil() as usize;
    let mut ns: Vec<usize> = (0..=steps)
        .map(|s| (llo + (lhi - llo) * s as f64 / steps as f64).exp().round() as usize)
        .map(|n| n.clamp(lo, hi))
        .collect();
    ns.dedup();
    let mut xs = Vec::with_capacity(ns.len());
    let mut ys = Vec::with_capacity(ns.len());
    for &n in &ns {
        let t = spectrum.tail(n)?;
        if t <= 0.0 {
            return Err(Error::NegativeTail { n });
        }
        xs.push((n as f64).ln());
        ys.push(t.ln());
    }
    let (intercept, slope) = simple_regression(&xs, &ys);
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / xs.len() as f64)
        .sqrt();
    let alpha = -slope / 2.0;
    Ok(TractabilityVerdict {
        alpha,
        p_star: 1.0 / alpha,
        residual,
        tractable: alpha > 0.0 && residual <= TRACTABLE_RESIDUAL,
    })
}

/// Ordinary least squares `y = a + b x`, returns `(a, b)`.
pub(crate) fn simple_regression(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn tensor_examples() {
        let s = tensor_spectrum(&[vec![0.4, 0.1], vec![0.4, 0.1]], 4).unwrap();
        let want = [0.16, 0.04, 0.04, 0.01];
        for (a, b) in s.eigenvalues().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        let l = vec![0.5, 0.3, 0.2, 0.1];
        let s = tensor_spectrum(&[l.clone()], 3).unwrap();
        assert_eq!(s.eigenvalues(), &l[..3]);
        assert!((s.trace() - 1.1).abs() < 1e-15);
    }

    #[test]
    fn tensor_rejects_bad_lists() {
        assert!(tensor_spectrum(&[vec![0.1, 0.4]], 2).is_err());
        assert!(tensor_spectrum(&[vec![0.4, -0.1]], 2).is_err());
        assert!(tensor_spectrum(&[], 2).is_err());
        assert!(matches!(
            tensor_spectrum(&[vec![1.0]], MAX_SPECTRUM_COUNT + 1),
            Err(Error::Overflow { .. })
        ));
    }

    #[test]
    fn tensor_count_capped_by_lattice() {
        let s = tensor_spectrum(&[vec![0.5, 0.25], vec![0.5]], 10).unwrap();
        assert_eq!(s.computed_count(), 2);
        assert!(s.tail(2).unwrap().abs() < 1e-15);
    }

    #[test]
    fn synthetic_inverse_square_fit() {
        let n = 4096;
        let l: Vec<f64> = (1..=n).map(|i| 1.0 / (i as f64).powi(2)).collect();
        let s = Spectrum::from_eigenvalues(l, PI * PI / 6.0).unwrap();
        let v = tail_exponent_fit(&s, s.default_window()).unwrap();
        assert!((2.0 * v.alpha - 1.0).abs() < 0.02, "{v:?}");
        assert!((v.p_star - 2.0).abs() < 0.05);
        assert_eq!(v.p_star * v.alpha, 1.0);
        assert!(v.tractable);
    }

    #[test]
    fn fit_window_errors() {
        let l: Vec<f64> = (1..=100).map(|i| 1.0 / (i as f64).powi(2)).collect();
        let s = Spectrum::from_eigenvalues(l, PI * PI / 6.0).unwrap();
        assert!(matches!(tail_exponent_fit(&s, (16, 25)), Err(Error::InsufficientSpan(_))));
        assert!(matches!(tail_exponent_fit(&s, (5, 200)), Err(Error::InsufficientSpectrum(_))));
        let mut l: Vec<f64> = (1..=99).map(|i| 1.0 / (i as f64).powi(2)).collect();
        l.push(1e-12);
        let total: f64 = l.iter().sum();
        let s = Spectrum::from_eigenvalues(l, total - 5e-9).unwrap();
        assert!(matches!(tail_exponent_fit(&s, (5, 99)), Err(Error::NegativeTail { .. })));
    }

    #[test]
    fn from_eigenvalues_validates_trace() {
        assert!(Spectrum::from_eigenvalues(vec![0.5, 0.4], 0.5).is_err());
        assert!(Spectrum::from_eigenvalues(vec![0.4, 0.5], 1.0).is_err());
    }

    #[test]
    fn tail_completion_extrapolates() {
        let n = 2000;
        let l: Vec<f64> = (1..=n).map(|i| 1.0 / (i as f64).powi(2)).collect();
        let s = Spectrum::from_eigenvalues(l, PI * PI / 6.0).unwrap();
        let t = s.tail_completed(8000).unwrap();
        assert!((t * 8000.0 - 1.0).abs() < 0.02, "{t}");
        let short = Spectrum::from_eigenvalues(vec![0.5, 0.25], 1.0).unwrap();
        assert!(matches!(short.tail_completed(5), Err(Error::InsufficientSpectrum(_))));
    }

    #[test]
    fn eig1d_brownian_small() {
        let ev = eig1d(0, 256).unwrap();
        assert!((ev[0] - 4.0 / (PI * PI)).abs() / ev[0] < 1e-3);
        assert!(ev.windows(2).all(|w| w[0] >= w[1]));
        assert!(ev.iter().all(|&v| v > 0.0));
        assert!(eig1d(0, 4).is_err());
    }

    #[test]
    fn eig1d_integrated_brownian_roots() {
        // r = 1: λ_i = ω_i^{-4} with cos ω cosh ω = -1
        let ev = eig1d(1, 512).unwrap();
        for (i, v) in ev.iter().take(8).enumerate() {
            let mut w = (i as f64 + 0.5) * PI;
            for _ in 0..50 {
                let f = w.cos() * w.cosh() + 1.0;
                let df = -w.sin() * w.cosh() + w.cos() * w.sinh();
                w -= f / df;
            }
            let want = w.powi(-4);
            assert!((v - want).abs() / want < 1e-10, "i={i} {v} {want}");
        }
    }

    #[test]
    fn eig1d_refinement_stable() {
        for r in 0..=2 {
            let a = eig1d(r, 128).unwrap();
            let b = eig1d(r, 256).unwrap();
            for i in 0..10 {
                assert!((a[i] - b[i]).abs() / b[i] < 2e-3, "r={r} i={i}");
            }
        }
    }

    #[test]
    fn csv_layout() {
        let s = Spectrum::from_eigenvalues(vec![0.5, 0.25], 1.0).unwrap();
        assert_eq!(s.to_csv(), "index,eigenvalue,cumulative,tail\n1,0.5,0.5,0.5\n2,0.25,0.75,0.25\n");
    }
}
