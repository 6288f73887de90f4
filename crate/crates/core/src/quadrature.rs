//! Gauss–Legendre rules on `[0, 1]` and their tensor products over the cube.

use crate::errors::{Error, Result};

/// Gauss–Legendre nodes and weights for `p` points on `[0, 1]`, nodes ascending.
pub fn gauss_legendre(p: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(p >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; p];
    let mut weights = vec![0.0; p];
    let pf = p as f64;
    for i in 0..p.div_ceil(2) {
        // Newton iteration on P_p from the Tricomi initial guess.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (pf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (pv, dv) = legendre_with_derivative(p, z);
            dp = dv;
            let dz = pv / dv;
            z -= dz;
            if dz.abs() <= 1e-16 {
                break;
            }
        }
        let (_, dv) = legendre_with_derivative(p, z);
        if dv != 0.0 {
            dp = dv;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        // map [-1, 1] -> [0, 1]
        nodes[i] = 0.5 * (1.0 - z);
        nodes[p - 1 - i] = 0.5 * (1.0 + z);
        weights[i] = 0.5 * w;
        weights[p - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(p: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if p == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=p {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = p as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, dp)
}

/// One axis of a composite rule: `p` Gauss nodes on each panel between breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl AxisRule {
    /// Composite rule with panels `[b_i, b_{i+1}]`; `breakpoints` must contain
    /// the interior panel edges only (0 and 1 are implied).
    pub fn composite(p: usize, breakpoints: &[f64]) -> Self {
        let (gn, gw) = gauss_legendre(p);
        let mut edges = vec![0.0];
        let mut inner: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|b| *b > 0.0 && *b < 1.0)
            .collect();
        inner.sort_by(f64::total_cmp);
        inner.dedup();
        edges.extend(inner);
        edges.push(1.0);
        let mut nodes = Vec::with_capacity(p * (edges.len() - 1));
        let mut weights = Vec::with_capacity(nodes.capacity());
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            let len = b - a;
            for (x, wt) in gn.iter().zip(&gw) {
                nodes.push(a + len * x);
                weights.push(len * wt);
            }
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Tensor-product Gauss–Legendre rule over `[0, 1]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    per_axis_nodes: usize,
    breakpoints: Vec<Vec<f64>>,
    axes: Vec<AxisRule>,
}

/// Cap on the number of tensor nodes a rule may have.
pub const MAX_QUADRATURE_NODES: usize = 1 << 24;

impl QuadratureRule {
    /// Plain tensor Gauss–Legendre rule with `p` nodes per axis.
    pub fn gauss_legendre(d: usize, p: usize) -> Result<Self> {
        Self::composite(p, vec![Vec::new(); d])
    }

    /// Default resolution by dimension: 64 nodes in 1D, 32 per axis in 2D,
    /// 16 per axis in 3D and 8 per axis beyond.
    pub fn default_for(d: usize) -> Result<Self> {
        let p = match d {
            1 => 64,
            2 => 32,
            3 => 16,
            _ => 8,
        };
        Self::gauss_legendre(d, p)
    }

    /// Composite rule whose panels on axis `k` are cut at `breakpoints[k]`.
    pub fn composite(p: usize, breakpoints: Vec<Vec<f64>>) -> Result<Self> {
        if p == 0 {
            return Err(Error::Domain("quadrature needs at least one node per axis".into()));
        }
        if breakpoints.is_empty() {
            return Err(Error::Domain("quadrature dimension must be at least 1".into()));
        }
        let axes: Vec<AxisRule> = breakpoints.iter().map(|b| AxisRule::composite(p, b)).collect();
        let total = axes
            .iter()
            .try_fold(1usize, |acc, a| acc.checked_mul(a.len()))
            .unwrap_or(usize::MAX);
        if total > MAX_QUADRATURE_NODES {
            return Err(Error::Overflow { size: total as u128, cap: MAX_QUADRATURE_NODES as u128 });
        }
        Ok(Self { per_axis_nodes: p, breakpoints, axes })
    }

    /// Same panels with twice the nodes per panel.
    pub fn refined(&self) -> Result<Self> {
        Self::composite(2 * self.per_axis_nodes, self.breakpoints.clone())
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn per_axis_nodes(&self) -> usize {
        self.per_axis_nodes
    }

    pub fn axes(&self) -> &[AxisRule] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(AxisRule::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Tensor weight of the node with per-axis indices `idx`.
    pub fn weight(&self, idx: &[usize]) -> f64 {
        idx.iter().zip(&self.axes).map(|(&i, a)| a.weights[i]).product()
    }

    /// Integrates `f` over the cube.
    pub fn integrate(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        let mut total = 0.0;
        let mut x = vec![0.0; self.dim()];
        for_each_tensor_index(&self.axes.iter().map(AxisRule::len).collect::<Vec<_>>(), |idx| {
            for (k, &i) in idx.iter().enumerate() {
                x[k] = self.axes[k].nodes[i];
            }
            total += self.weight(idx) * f(&x);
        });
        total
    }
}

/// Visits all multi-indices of a tensor grid in row-major order (last axis fastest).
pub(crate) fn for_each_tensor_index(dims: &[usize], mut visit: impl FnMut(&[usize])) {
    if dims.iter().any(|&m| m == 0) {
        return;
    }
    let mut idx = vec![0usize; dims.len()];
    loop {
        visit(&idx);
        let mut k = dims.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < dims[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one_and_are_positive() {
        for p in [1, 2, 5, 16, 32, 64, 128, 257] {
            let (x, w) = gauss_legendre(p);
            assert!(w.iter().all(|&v| v > 0.0));
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-13, "p={p}");
            assert!(x.windows(2).all(|s| s[0] < s[1]));
            assert!(x.iter().all(|&v| v > 0.0 && v < 1.0));
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2p_minus_1() {
        for p in 1..12 {
            let (x, w) = gauss_legendre(p);
            for k in 0..(2 * p) {
                let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k as i32)).sum();
                assert!((q - 1.0 / (k as f64 + 1.0)).abs() < 1e-14, "p={p} k={k}");
            }
        }
    }

    #[test]
    fn composite_rule_integrates_kinked_function_exactly() {
        let a = AxisRule::composite(2, &[0.3, 0.3, 0.7]);
        let f = |x: f64| (x - 0.3).abs() + (x - 0.7).max(0.0).powi(3);
        let q: f64 = a.nodes.iter().zip(&a.weights).map(|(x, w)| w * f(*x)).sum();
        let exact = (0.3f64.powi(2) + 0.7f64.powi(2)) / 2.0 + 0.3f64.powi(4) / 4.0;
        assert!((q - exact).abs() < 1e-15);
    }

    #[test]
    fn tensor_rule_volume() {
        for d in 1..=3 {
            let rule = QuadratureRule::default_for(d).unwrap();
            let vol = rule.integrate(|_| 1.0);
            assert!((vol - 1.0).abs() < 1e-13);
            let prod = rule.integrate(|x| x.iter().product());
            assert!((prod - 0.5f64.powi(d as i32)).abs() < 1e-14);
        }
    }

    #[test]
    fn tensor_index_order() {
        let mut seen = Vec::new();
        for_each_tensor_index(&[2, 3], |i| seen.push((i[0], i[1])));
        assert_eq!(seen, vec![(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]);
        let mut none = 0;
        for_each_tensor_index(&[2, 0], |_| none += 1);
        assert_eq!(none, 0);
    }
}
