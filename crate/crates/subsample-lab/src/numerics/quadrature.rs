//! Gaussian quadrature rules.
//!
//! Expectations over standard normal variables are the workhorse of the
//! asymptotic formulas. Two rules are assembled via Golub–Welsch
//! (eigendecomposition of the Jacobi matrix):
//!
//! * [`gauss_hermite`] — nodes/weights for `E f(G)`, `G ~ N(0,1)`;
//! * [`gauss_legendre`] — nodes/weights for `∫_{-1}^{1} f`;
//!
//! and [`piecewise_normal_grid`] glues Legendre panels between breakpoints so
//! integrands with kinks or jumps at known locations (selection caps,
//! staircase label kernels) are still integrated at spectral accuracy.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Nodes and weights of a quadrature rule against a probability measure.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
}

impl QuadratureGrid {
    /// Expectation of `f` under the grid's measure.
    pub fn expect(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Gauss–Hermite rule normalized to the standard normal measure:
/// sums `w_i f(x_i)` approximate `E f(G)` for `G ~ N(0,1)`, exactly for
/// polynomials of degree ≤ 2·order−1.
pub fn gauss_hermite(order: usize) -> Result<QuadratureGrid> {
    if !(2..=200).contains(&order) {
        return Err(Error::invalid(format!(
            "gauss_hermite order must be in [2,200], got {order}"
        )));
    }
    // Jacobi matrix for probabilists' Hermite polynomials: off-diagonal sqrt(k).
    let offdiag = |k: usize| (k as f64).sqrt();
    let (mut nodes, weights) = golub_welsch(order, offdiag);
    // Eigenvalues of the symmetric tridiagonal matrix are the nodes directly.
    // Enforce exact symmetry about 0 to keep downstream sums well balanced.
    for i in 0..order / 2 {
        let m = 0.5 * (nodes[i].abs() + nodes[order - 1 - i].abs());
        nodes[i] = -m;
        nodes[order - 1 - i] = m;
    }
    if order % 2 == 1 {
        nodes[order / 2] = 0.0;
    }
    Ok(QuadratureGrid {
        nodes,
        weights,
        order,
    })
}

/// Gauss–Legendre rule on [-1, 1] with weight 1 (weights sum to 2).
pub fn gauss_legendre(order: usize) -> Result<QuadratureGrid> {
    if !(2..=200).contains(&order) {
        return Err(Error::invalid(format!(
            "gauss_legendre order must be in [2,200], got {order}"
        )));
    }
    let offdiag = |k: usize| {
        let k = k as f64;
        k / (4.0 * k * k - 1.0).sqrt()
    };
    let (nodes, mut weights) = golub_welsch(order, offdiag);
    // golub_welsch normalizes weights to sum 1; the Legendre measure has mass 2.
    for w in &mut weights {
        *w *= 2.0;
    }
    Ok(QuadratureGrid {
        nodes,
        weights,
        order,
    })
}

/// Nodes/weights approximating `∫ f(x) φ(x) dx` over `[lo, hi]` split at the
/// given breakpoints, with `φ` the standard normal density. Each panel gets a
/// Gauss–Legendre rule of the given order; panel weights carry the density.
/// Breakpoints outside `(lo, hi)` are ignored, duplicates merged.
pub fn piecewise_normal_grid(
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    order: usize,
) -> Result<QuadratureGrid> {
    if !(hi > lo) {
        return Err(Error::invalid("piecewise_normal_grid: hi must exceed lo"));
    }
    let mut cuts: Vec<f64> = vec![lo];
    let mut sorted: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|b| b.is_finite() && *b > lo && *b < hi)
        .collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for b in sorted {
        if b - cuts.last().unwrap() > 1e-12 {
            cuts.push(b);
        }
    }
    cuts.push(hi);

    let base = gauss_legendre(order)?;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for pair in cuts.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (&t, &w) in base.nodes.iter().zip(&base.weights) {
            let x = mid + half * t;
            nodes.push(x);
            weights.push(w * half * super::special::normal_pdf(x));
        }
    }
    Ok(QuadratureGrid {
        order,
        nodes,
        weights,
    })
}

/// Golub–Welsch: nodes are eigenvalues of the symmetric tridiagonal Jacobi
/// matrix with zero diagonal and `offdiag(k)` at (k-1,k); weights are squared
/// first components of the normalized eigenvectors (summing to 1).
fn golub_welsch(order: usize, offdiag: impl Fn(usize) -> f64) -> (Vec<f64>, Vec<f64>) {
    let mut jacobi = DMatrix::<f64>::zeros(order, order);
    for k in 1..order {
        let e = offdiag(k);
        jacobi[(k - 1, k)] = e;
        jacobi[(k, k - 1)] = e;
    }
    let eig = jacobi.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..order)
        .map(|j| {
            let node = eig.eigenvalues[j];
            let w = eig.eigenvectors[(0, j)].powi(2);
            (node, w)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}
