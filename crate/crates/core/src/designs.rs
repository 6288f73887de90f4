//! Sample-point designs: tensor grids, anisotropic hyperbolic crosses, their
//! images under the folding map `h(u) = 4u(1-u)`, and random baselines.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::errors::{Error, Result};
use crate::problem::ProblemSpec;

/// Default cap on the number of points a generator may produce.
pub const DEFAULT_SIZE_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Grid,
    HyperbolicCross,
    MappedHyperbolicCross,
    Random,
}

impl Provenance {
    pub fn tag(self) -> &'static str {
        match self {
            Provenance::Grid => "grid",
            Provenance::HyperbolicCross => "hyperbolic_cross",
            Provenance::MappedHyperbolicCross => "mapped_hyperbolic_cross",
            Provenance::Random => "random",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid" => Ok(Provenance::Grid),
            "hyperbolic_cross" => Ok(Provenance::HyperbolicCross),
            "mapped_hyperbolic_cross" => Ok(Provenance::MappedHyperbolicCross),
            "random" => Ok(Provenance::Random),
            other => Err(Error::Parse(format!("unknown design provenance `{other}`"))),
        }
    }
}

/// Ordered list of distinct points in `(0, 1]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    d: usize,
    coords: Vec<f64>,
    provenance: Provenance,
    level: Option<u32>,
    seed: Option<u64>,
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

impl Design {
    /// Validates and wraps a flat coordinate list (`d` values per point).
    pub fn from_points(d: usize, coords: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("design dimension must be at least 1".into()));
        }
        if coords.len() % d != 0 {
            return Err(Error::LengthMismatch { expected: coords.len().div_ceil(d) * d, got: coords.len() });
        }
        if let Some(v) = coords.iter().find(|v| !(**v > 0.0 && **v <= 1.0)) {
            return Err(Error::Domain(format!("design coordinate {v} outside (0, 1]")));
        }
        let mut sorted: Vec<&[f64]> = coords.chunks_exact(d).collect();
        sorted.sort_by(|a, b| lex_cmp(a, b));
        if let Some(w) = sorted.windows(2).find(|w| lex_cmp(w[0], w[1]).is_eq()) {
            return Err(Error::Domain(format!("duplicate design point {:?}", w[0])));
        }
        Ok(Self { d, coords, provenance, level: None, seed: None })
    }

    pub fn empty(d: usize) -> Self {
        Self { d, coords: Vec::new(), provenance: Provenance::Grid, level: None, seed: None }
    }

    pub fn with_level(mut self, level: Option<u32>) -> Self {
        self.level = level;
        self
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn level(&self) -> Option<u32> {
        self.level
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.d)
    }

    /// Distinct coordinate values along `axis`, ascending.
    pub fn axis_values(&self, axis: usize) -> Vec<f64> {
        let mut v: Vec<f64> = self.points().map(|p| p[axis]).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Copy of this design with one more point appended.
    pub fn extended(&self, point: &[f64]) -> Result<Self> {
        let mut coords = self.coords.clone();
        coords.extend_from_slice(point);
        Design::from_points(self.d, coords, self.provenance)
    }

    /// Text form: a header line then one point per line.
    pub fn to_text(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "-".to_string());
        let mut out = format!(
            "# d={} n={} provenance={} level={} seed={}\n",
            self.d,
            self.len(),
            self.provenance,
            opt(self.level.map(|l| l.to_string())),
            opt(self.seed.map(|s| s.to_string())),
        );
        for p in self.points() {
            let line: Vec<String> = p.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty design file".into()))?;
        let header = header
            .strip_prefix("# ")
            .ok_or_else(|| Error::Parse("design header must start with `# `".into()))?;
        let mut d = None;
        let mut n = None;
        let mut provenance = None;
        let mut level = None;
        let mut seed = None;
        for field in header.split(' ') {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("malformed header field `{field}`")))?;
            let num = |v: &str| -> Result<Option<u64>> {
                if v == "-" {
                    Ok(None)
                } else {
                    v.parse().map(Some).map_err(|_| Error::Parse(format!("bad number `{v}`")))
                }
            };
            match key {
                "d" => d = num(value)?,
                "n" => n = num(value)?,
                "provenance" => provenance = Some(value.parse::<Provenance>()?),
                "level" => level = num(value)?.map(|l| l as u32),
                "seed" => seed = num(value)?,
                other => return Err(Error::Parse(format!("unknown header key `{other}`"))),
            }
        }
        let d = d.ok_or_else(|| Error::Parse("header lacks d".into()))? as usize;
        let n = n.ok_or_else(|| Error::Parse("header lacks n".into()))? as usize;
        let provenance = provenance.ok_or_else(|| Error::Parse("header lacks provenance".into()))?;
        let mut coords = Vec::with_capacity(n * d);
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let before = coords.len();
            for tok in line.split(' ') {
                coords.push(
                    tok.parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad coordinate `{tok}`")))?,
                );
            }
            if coords.len() - before != d {
                return Err(Error::Parse(format!("point line `{line}` does not have {d} coordinates")));
            }
        }
        if coords.len() != n * d {
            return Err(Error::Parse(format!("header says n={n}, found {}", coords.len() / d.max(1))));
        }
        Ok(Design::from_points(d, coords, provenance)?
            .with_level(level)
            .with_seed(seed))
    }
}

fn check_cap(size: u128, cap: u128) -> Result<()> {
    if size > cap {
        Err(Error::Overflow { size, cap })
    } else {
        Ok(())
    }
}

/// Tensor grid `{i/m_k : i = 1..m_k}` per axis, lexicographically ordered.
pub fn grid(m_per_axis: &[usize]) -> Result<Design> {
    grid_capped(m_per_axis, DEFAULT_SIZE_CAP)
}

pub fn grid_capped(m_per_axis: &[usize], cap: u128) -> Result<Design> {
    if m_per_axis.is_empty() || m_per_axis.contains(&0) {
        return Err(Error::Domain("grid needs d >= 1 axes with at least one point each".into()));
    }
    let size = m_per_axis.iter().map(|&m| m as u128).product();
    check_cap(size, cap)?;
    let d = m_per_axis.len();
    let mut coords = Vec::with_capacity(size as usize * d);
    crate::quadrature::for_each_tensor_index(m_per_axis, |idx| {
        for (k, &i) in idx.iter().enumerate() {
            coords.push((i + 1) as f64 / m_per_axis[k] as f64);
        }
    });
    Ok(Design { d, coords, provenance: Provenance::Grid, level: None, seed: None })
}

/// Per-axis dyadic level vector of one hyperbolic-cross block.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexBlock {
    pub k: Vec<u32>,
}

impl IndexBlock {
    pub fn weighted_size(&self, beta: &[f64]) -> f64 {
        self.k.iter().zip(beta).map(|(&k, b)| f64::from(k) * b).sum()
    }

    pub fn cardinality(&self) -> u128 {
        1u128 << self.k.iter().sum::<u32>()
    }
}

/// Axis weights `β_j = (r_j + 1/2) / (r_min + 1/2)`.
pub fn block_weights(spec: &ProblemSpec) -> Vec<f64> {
    let base = spec.rate_exponent();
    spec.r().iter().map(|&r| (f64::from(r) + 0.5) / base).collect()
}

const BLOCK_TOL: f64 = 1e-9;

/// All blocks with `Σ k_j β_j ≤ level`, in lexicographic order.
pub fn index_blocks(level: u32, spec: &ProblemSpec) -> Vec<IndexBlock> {
    let beta = block_weights(spec);
    let mut out = Vec::new();
    let mut k = vec![0u32; beta.len()];
    fn rec(axis: usize, budget: f64, beta: &[f64], k: &mut Vec<u32>, out: &mut Vec<IndexBlock>) {
        if axis == beta.len() {
            out.push(IndexBlock { k: k.clone() });
            return;
        }
        let mut kk = 0u32;
        while f64::from(kk) * beta[axis] <= budget + BLOCK_TOL {
            k[axis] = kk;
            rec(axis + 1, budget - f64::from(kk) * beta[axis], beta, k, out);
            kk += 1;
        }
        k[axis] = 0;
    }
    rec(0, f64::from(level), &beta, &mut k, &mut out);
    out
}

/// Odd dyadics `(2i-1) 2^{-(k+1)}`, `i = 1..2^k`.
fn dyadic_level(k: u32) -> Vec<f64> {
    let denom = (1u64 << (k + 1)) as f64;
    (1..=(1u64 << k)).map(|i| (2 * i - 1) as f64 / denom).collect()
}

/// Anisotropic dyadic hyperbolic cross of the given level.
pub fn hyperbolic_cross(level: u32, spec: &ProblemSpec) -> Result<Design> {
    hyperbolic_cross_capped(level, spec, DEFAULT_SIZE_CAP)
}

pub fn hyperbolic_cross_capped(level: u32, spec: &ProblemSpec, cap: u128) -> Result<Design> {
    if level > 60 {
        return Err(Error::Overflow { size: u128::MAX, cap });
    }
    let blocks = index_blocks(level, spec);
    let size: u128 = blocks.iter().map(IndexBlock::cardinality).sum();
    check_cap(size, cap)?;
    let d = spec.d();
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(size as usize);
    for b in &blocks {
        let sets: Vec<Vec<f64>> = b.k.iter().map(|&k| dyadic_level(k)).collect();
        let dims: Vec<usize> = sets.iter().map(Vec::len).collect();
        crate::quadrature::for_each_tensor_index(&dims, |idx| {
            points.push(idx.iter().enumerate().map(|(k, &i)| sets[k][i]).collect());
        });
    }
    points.sort_by(|a, b| lex_cmp(a, b));
    points.dedup();
    let coords = points.into_iter().flatten().collect();
    Ok(Design { d, coords, provenance: Provenance::HyperbolicCross, level: Some(level), seed: None })
}

/// Folding map `h(u) = 4u(1-u)`.
pub fn h_map(u: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain(format!("h argument {u} outside [0, 1]")));
    }
    Ok(h_unchecked(u))
}

#[inline]
fn h_unchecked(u: f64) -> f64 {
    // evaluate on the left branch so that h(u) and h(1-u) agree bitwise
    let v = if u > 0.5 { 1.0 - u } else { u };
    4.0 * v * (1.0 - v)
}

/// Left-branch inverse of [`h_map`], `(1 - sqrt(1 - t)) / 2 ∈ [0, 1/2]`.
pub fn h_inv(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("h_inv argument {t} outside [0, 1]")));
    }
    // t / (2 (1 + sqrt(1 - t))) avoids cancellation for small t.
    Ok(t / (2.0 * (1.0 + (1.0 - t).sqrt())))
}

/// Applies `h` coordinatewise, drops points with a zero coordinate and
/// removes the duplicates created by the 2-to-1 fold.
pub fn map_design(design: &Design) -> Result<Design> {
    let d = design.dim();
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(design.len());
    for p in design.points() {
        let img: Vec<f64> = p.iter().map(|&u| h_map(u)).collect::<Result<_>>()?;
        if img.iter().all(|&v| v > 0.0) {
            points.push(img);
        }
    }
    points.sort_by(|a, b| lex_cmp(a, b));
    points.dedup();
    Ok(Design {
        d,
        coords: points.into_iter().flatten().collect(),
        provenance: Provenance::MappedHyperbolicCross,
        level: design.level(),
        seed: design.seed(),
    })
}

/// `n` uniform points in `(0, 1)^d` from a ChaCha stream keyed by `seed`.
pub fn random_design(n: usize, spec: &ProblemSpec, seed: u64) -> Result<Design> {
    if n == 0 {
        return Err(Error::Domain("random design needs n >= 1".into()));
    }
    check_cap((n * spec.d()) as u128, DEFAULT_SIZE_CAP * spec.d() as u128)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = (0..n * spec.d()).map(|_| open_unit(&mut rng)).collect();
    Ok(Design { d: spec.d(), coords, provenance: Provenance::Random, level: None, seed: Some(seed) })
}

/// Uniform draw from the open interval (0, 1).
pub(crate) fn open_unit(rng: &mut impl Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}
