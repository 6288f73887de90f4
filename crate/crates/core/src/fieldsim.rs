//! Sample paths of the folded Wiener sheet from a discretized white-noise
//! integral, and Monte Carlo estimates of average errors.

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::avg_error::LinearAlgorithm;
use crate::errors::{Error, Result};
use crate::problem::ProblemSpec;
use crate::quadrature::{for_each_tensor_index, QuadratureRule};

/// Cap on the number of white-noise cells in one realization.
pub const MAX_FIELD_CELLS: u128 = 1 << 24;

/// One draw `f(x) = Σ_cells ∏_j (x_j − t_j)₊^{r_j}/r_j! · w_cell` with `t` the
/// cell center and `w_cell ~ N(0, m^{-d})`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldRealization {
    r: Vec<u32>,
    resolution: usize,
    noise: Vec<f64>,
    seed: u64,
}

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fill_standard_normal(rng: &mut impl Rng, out: &mut [f64]) {
    let mut chunks = out.chunks_exact_mut(2);
    for pair in &mut chunks {
        let (a, b) = box_muller(rng);
        pair[0] = a;
        pair[1] = b;
    }
    if let [last] = chunks.into_remainder() {
        *last = box_muller(rng).0;
    }
}

fn box_muller(rng: &mut impl Rng) -> (f64, f64) {
    let u1 = crate::designs::open_unit(rng);
    let u2: f64 = rng.random();
    let rad = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
    (rad * c, rad * s)
}

/// `(x − t)₊^r / r!`, with `(0)₊^0 = 0`.
fn truncated_power(x: f64, t: f64, r: u32) -> f64 {
    let z = x - t;
    if z <= 0.0 {
        return 0.0;
    }
    let mut v = 1.0;
    for k in 1..=r {
        v *= z / k as f64;
    }
    v
}

/// Draws a realization on `resolution^d` cells from the seeded stream.
pub fn sample_field(spec: &ProblemSpec, resolution: usize, seed: u64) -> Result<FieldRealization> {
    if resolution == 0 {
        return Err(Error::Domain("field resolution must be positive".into()));
    }
    let cells = (resolution as u128)
        .checked_pow(spec.d() as u32)
        .unwrap_or(u128::MAX);
    if cells > MAX_FIELD_CELLS {
        return Err(Error::Overflow { size: cells, cap: MAX_FIELD_CELLS });
    }
    let mut noise = vec![0.0; cells as usize];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    fill_standard_normal(&mut rng, &mut noise);
    let scale = (resolution as f64).powi(spec.d() as i32).recip().sqrt();
    noise.iter_mut().for_each(|w| *w *= scale);
    Ok(FieldRealization { r: spec.r().to_vec(), resolution, noise, seed })
}

impl FieldRealization {
    pub fn dim(&self) -> usize {
        self.r.len()
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn noise(&self) -> &[f64] {
        &self.noise
    }

    fn basis_row(&self, x: f64, axis: usize) -> Vec<f64> {
        let h = 1.0 / self.resolution as f64;
        (0..self.resolution)
            .map(|i| truncated_power(x, (i as f64 + 0.5) * h, self.r[axis]))
            .collect()
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        if x.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Domain(format!("point {x:?} outside [0,1]^d")));
        }
        Ok(())
    }

    /// Value at one point, contracting one axis at a time.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check(x)?;
        let m = self.resolution;
        let mut cur = self.noise.clone();
        for (axis, &xj) in x.iter().enumerate() {
            let row = self.basis_row(xj, axis);
            let rest = cur.len() / m;
            let mut next = vec![0.0; rest];
            for (i, &b) in row.iter().enumerate() {
                if b != 0.0 {
                    let block = &cur[i * rest..(i + 1) * rest];
                    next.iter_mut().zip(block).for_each(|(o, w)| *o += b * w);
                }
            }
            cur = next;
        }
        Ok(cur[0])
    }

    /// Values at flat points.
    pub fn eval_points(&self, points: &[f64]) -> Result<Vec<f64>> {
        let d = self.dim();
        if points.len() % d != 0 {
            return Err(Error::DimensionMismatch { expected: d, got: points.len() % d });
        }
        points.chunks_exact(d).map(|x| self.eval(x)).collect()
    }

    /// Values on the tensor grid `nodes[0] × … × nodes[d-1]`, row-major with
    /// the last axis fastest.
    pub fn eval_tensor(&self, nodes: &[&[f64]]) -> Result<Vec<f64>> {
        if nodes.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: nodes.len() });
        }
        for axis in nodes {
            if axis.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::Domain("tensor nodes outside [0,1]".into()));
            }
        }
        let basis = self.tensor_basis(nodes);
        Ok(self.eval_with_basis(&basis))
    }

    fn tensor_basis(&self, nodes: &[&[f64]]) -> Vec<Mat<f64>> {
        nodes
            .iter()
            .enumerate()
            .map(|(axis, xs)| {
                let mut b = Mat::<f64>::zeros(xs.len(), self.resolution);
                for (a, &x) in xs.iter().enumerate() {
                    for (i, v) in self.basis_row(x, axis).into_iter().enumerate() {
                        b[(a, i)] = v;
                    }
                }
                b
            })
            .collect()
    }

    fn eval_with_basis(&self, basis: &[Mat<f64>]) -> Vec<f64> {
        let m = self.resolution;
        let mut cur = self.noise.clone();
        // contract the leading axis, then rotate it to the back
        for b in basis {
            let rest = cur.len() / m;
            let view = faer::MatRef::from_row_major_slice(&cur, m, rest);
            let prod = b * view;
            let k = b.nrows();
            let mut next = vec![0.0; rest * k];
            for c in 0..rest {
                for a in 0..k {
                    next[c * k + a] = prod[(a, c)];
                }
            }
            cur = next;
        }
        cur
    }
}

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 64 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Monte Carlo average error: squared `L2` residual norms of `n_samples`
/// fields on the default quadrature rule. Returns `sqrt(mean)` with a
/// delta-method standard error.
pub fn mc_avg_error(
    alg: &LinearAlgorithm,
    spec: &ProblemSpec,
    n_samples: usize,
    resolution: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if n_samples < 2 {
        return Err(Error::Domain(format!("need at least 2 samples, got {n_samples}")));
    }
    if spec != alg.spec() {
        return Err(Error::Domain("algorithm was built for a different problem".into()));
    }
    let d = spec.d();
    let quad = QuadratureRule::default_for(d)?;
    let nodes: Vec<&[f64]> = quad.axes().iter().map(|a| a.nodes.as_slice()).collect();
    let dims: Vec<usize> = nodes.iter().map(|a| a.len()).collect();
    let mut flat = Vec::with_capacity(quad.len() * d);
    let mut weights = Vec::with_capacity(quad.len());
    for_each_tensor_index(&dims, |idx| {
        flat.extend(idx.iter().zip(&nodes).map(|(&i, a)| a[i]));
        weights.push(quad.weight(idx));
    });
    let n = alg.n();
    let coeff = if n > 0 { Some(alg.coefficient_matrix(&flat)?) } else { None };
    let data = alg.design().coords();
    let mut sq_norms = Vec::with_capacity(n_samples);
    let mut basis = None;
    for s in 0..n_samples {
        let field = sample_field(spec, resolution, splitmix64(seed ^ splitmix64(s as u64)))?;
        let basis = basis.get_or_insert_with(|| field.tensor_basis(&nodes));
        let mut vals = field.eval_with_basis(basis);
        if let Some(g) = &coeff {
            let y = field.eval_points(data)?;
            for (q, v) in vals.iter_mut().enumerate() {
                let pred: f64 = (0..n).map(|j| y[j] * g[(j, q)]).sum();
                *v -= pred;
            }
        }
        let terms: Vec<f64> = vals.iter().zip(&weights).map(|(v, w)| w * v * v).collect();
        sq_norms.push(pairwise_sum(&terms));
    }
    let k = n_samples as f64;
    let mean = pairwise_sum(&sq_norms) / k;
    let dev: Vec<f64> = sq_norms.iter().map(|e| (e - mean).powi(2)).collect();
    let var = pairwise_sum(&dev) / (k - 1.0);
    let estimate = mean.sqrt();
    let stderr = if estimate > 0.0 { (var / k).sqrt() / (2.0 * estimate) } else { 0.0 };
    Ok((estimate, stderr))
}
