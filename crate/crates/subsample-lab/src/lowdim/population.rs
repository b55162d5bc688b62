//! Deterministic population discretizations.
//!
//! Expectations over covariate laws are computed on fixed grids so every ρ
//! value is reproducible: one-dimensional laws use equal-mass quantile grids
//! (midpoints in probability space), multivariate Gaussians use a seeded
//! low-discrepancy sequence, and datasets/discrete specs are used as-is.

use crate::domain::dataset::Dataset;
use crate::error::{Error, Result};
use crate::numerics::qmc::KroneckerSequence;
use crate::numerics::special::normal_quantile;
use nalgebra::DMatrix;

/// One-dimensional covariate laws with analytic quantiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Law1d {
    /// Unif([-x_m, x_m])
    Uniform { xm: f64 },
    /// density ∝ |x|^{-alpha} on 1 ≤ |x| ≤ x_m, alpha > 3, x_m > 1
    PowerLaw { alpha: f64, xm: f64 },
    /// N(0, 1)
    Gaussian,
}

impl Law1d {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Law1d::Uniform { xm } if xm > 0.0 => Ok(()),
            Law1d::PowerLaw { alpha, xm } if alpha > 3.0 && xm > 1.0 => Ok(()),
            Law1d::Gaussian => Ok(()),
            _ => Err(Error::invalid(format!("invalid 1-d law {self:?}"))),
        }
    }

    /// Quantile function on (0,1).
    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            Law1d::Uniform { xm } => xm * (2.0 * u - 1.0),
            Law1d::PowerLaw { alpha, xm } => {
                let v = 2.0 * u - 1.0;
                let m = v.abs().clamp(1e-300, 1.0 - 1e-16);
                let x = (1.0 - m * (1.0 - xm.powf(1.0 - alpha))).powf(1.0 / (1.0 - alpha));
                if v < 0.0 {
                    -x
                } else {
                    x
                }
            }
            Law1d::Gaussian => normal_quantile(u),
        }
    }

    /// P(|X| ≥ r).
    pub fn tail_abs(&self, r: f64) -> f64 {
        match *self {
            Law1d::Uniform { xm } => {
                if r <= 0.0 {
                    1.0
                } else if r >= xm {
                    0.0
                } else {
                    1.0 - r / xm
                }
            }
            Law1d::PowerLaw { alpha, xm } => {
                if r <= 1.0 {
                    1.0
                } else if r >= xm {
                    0.0
                } else {
                    (r.powf(1.0 - alpha) - xm.powf(1.0 - alpha)) / (1.0 - xm.powf(1.0 - alpha))
                }
            }
            Law1d::Gaussian => 2.0 * (1.0 - crate::numerics::special::normal_cdf(r)),
        }
    }
}

/// A weighted point cloud standing in for a covariate distribution.
/// Weights are positive and sum to one.
#[derive(Debug, Clone)]
pub struct WeightedPopulation {
    data: Vec<f64>,
    weights: Vec<f64>,
    dim: usize,
}

impl WeightedPopulation {
    pub fn new(data: Vec<f64>, weights: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 || weights.is_empty() || data.len() != weights.len() * dim {
            return Err(Error::invalid("population shape mismatch"));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::invalid("population weights must be >= 0, sum > 0"));
        }
        let weights = weights.iter().map(|w| w / total).collect();
        Ok(WeightedPopulation { data, weights, dim })
    }

    /// Equal-mass quantile grid for a 1-d law (midpoint rule in probability).
    pub fn from_law_1d(law: Law1d, k: usize) -> Result<Self> {
        law.validate()?;
        if k < 2 {
            return Err(Error::invalid("grid needs at least 2 points"));
        }
        let data: Vec<f64> = (0..k)
            .map(|i| law.quantile((i as f64 + 0.5) / k as f64))
            .collect();
        let weights = vec![1.0 / k as f64; k];
        Ok(WeightedPopulation {
            data,
            weights,
            dim: 1,
        })
    }

    /// Fixed low-discrepancy grid for N(0, I_p).
    pub fn gaussian_qmc(p: usize, k: usize, seed: u64) -> Result<Self> {
        if p == 0 || k < 2 {
            return Err(Error::invalid("gaussian_qmc needs p >= 1 and k >= 2"));
        }
        let mut seq = KroneckerSequence::new(p, seed);
        let mut data = Vec::with_capacity(p * k);
        for _ in 0..k {
            data.extend(seq.next_gaussian());
        }
        let weights = vec![1.0 / k as f64; k];
        Ok(WeightedPopulation {
            data,
            weights,
            dim: p,
        })
    }

    /// Empirical population: every dataset row with equal weight.
    pub fn from_dataset(ds: &Dataset) -> Self {
        let n = ds.n();
        let p = ds.p();
        let mut data = Vec::with_capacity(n * p);
        for i in 0..n {
            for j in 0..p {
                data.push(ds.features[(i, j)]);
            }
        }
        WeightedPopulation {
            data,
            weights: vec![1.0 / n as f64; n],
            dim: p,
        }
    }

    /// Discrete population with explicit atoms and probabilities.
    pub fn discrete(points: Vec<Vec<f64>>, probs: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != probs.len() {
            return Err(Error::invalid("discrete population shape mismatch"));
        }
        let dim = points[0].len();
        let mut data = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.len() != dim {
                return Err(Error::invalid("discrete population ragged points"));
            }
            data.extend_from_slice(p);
        }
        WeightedPopulation::new(data, probs, dim)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    /// Weighted mean of a scalar function.
    pub fn expect(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        (0..self.len()).map(|i| self.weight(i) * f(self.point(i))).sum()
    }

    /// Σ w_i s(x_i) x_i x_iᵀ for a scalar field s.
    pub fn second_moment(&self, mut s: impl FnMut(&[f64]) -> f64) -> DMatrix<f64> {
        let p = self.dim;
        let mut m = DMatrix::zeros(p, p);
        for i in 0..self.len() {
            let x = self.point(i);
            let c = self.weight(i) * s(x);
            if c == 0.0 {
                continue;
            }
            for a in 0..p {
                let ca = c * x[a];
                for b in a..p {
                    m[(a, b)] += ca * x[b];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                m[(a, b)] = m[(b, a)];
            }
        }
        m
    }

    /// Population covariance Σ = E xxᵀ.
    pub fn sigma(&self) -> DMatrix<f64> {
        self.second_moment(|_| 1.0)
    }
}
