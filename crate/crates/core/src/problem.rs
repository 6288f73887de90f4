use serde::{Deserialize, Serialize};

use crate::errors::{Error, Result};

/// Dimension, per-coordinate smoothness and evaluation cost of an
/// approximation problem on the unit cube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    d: usize,
    r: Vec<u32>,
    c: f64,
}

impl ProblemSpec {
    pub fn new(r: Vec<u32>, c: f64) -> Result<Self> {
        if r.is_empty() {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Domain(format!("evaluation cost must be positive, got {c}")));
        }
        Ok(Self { d: r.len(), r, c })
    }

    /// Problem with unit evaluation cost.
    pub fn with_smoothness(r: &[u32]) -> Result<Self> {
        Self::new(r.to_vec(), 1.0)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn r(&self) -> &[u32] {
        &self.r
    }

    pub fn cost(&self) -> f64 {
        self.c
    }

    pub fn r_min(&self) -> u32 {
        *self.r.iter().min().expect("nonempty")
    }

    /// Number of coordinates attaining the minimal smoothness.
    pub fn k_star(&self) -> usize {
        let m = self.r_min();
        self.r.iter().filter(|&&rj| rj == m).count()
    }

    /// Lebesgue volume of the domain.
    pub fn volume(&self) -> f64 {
        1.0
    }

    /// Rate exponent `r_min + 1/2` of the optimal error in the sample size.
    pub fn rate_exponent(&self) -> f64 {
        self.r_min() as f64 + 0.5
    }

    /// Power of `log n` in the optimal error, `(k* - 1)(r_min + 1)`.
    pub fn log_power(&self) -> f64 {
        (self.k_star() as f64 - 1.0) * (self.r_min() as f64 + 1.0)
    }

    /// Tractability exponent `1 / (r_min + 1/2)`, at most 2.
    pub fn exponent(&self) -> f64 {
        1.0 / self.rate_exponent()
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: x.len() });
        }
        if let Some(v) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Domain(format!("coordinate {v} outside [0, 1]")));
        }
        Ok(())
    }
}
