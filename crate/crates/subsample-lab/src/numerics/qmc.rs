//! Low-discrepancy point sets for deterministic population grids.
//!
//! The additive Kronecker recurrence `u_n = frac(n·α)` with `α` built from
//! the generalized golden ratio gives a well-distributed sequence in any
//! dimension; mapping coordinates through the normal quantile turns it into
//! a deterministic grid for isotropic Gaussian populations.

use super::special::normal_quantile;

/// Generalized-golden-ratio Kronecker sequence in `dim` dimensions.
/// `seed` offsets the index so distinct grids can be requested.
pub struct KroneckerSequence {
    alphas: Vec<f64>,
    state: Vec<f64>,
}

impl KroneckerSequence {
    pub fn new(dim: usize, seed: u64) -> Self {
        // phi_d solves x^{d+1} = x + 1; alphas are 1/phi_d^k.
        let mut phi = 1.5f64;
        for _ in 0..64 {
            phi = (1.0 + phi).powf(1.0 / (dim as f64 + 1.0));
        }
        let mut alphas = Vec::with_capacity(dim);
        let mut a = 1.0;
        for _ in 0..dim {
            a /= phi;
            alphas.push(a);
        }
        // Advance to the seed offset (plus 1/2 base shift).
        let state = alphas
            .iter()
            .map(|&al| (0.5 + al * (seed % (1 << 48)) as f64).fract())
            .collect();
        KroneckerSequence { alphas, state }
    }

    /// Next point in the unit cube.
    pub fn next_uniform(&mut self) -> Vec<f64> {
        for (s, &a) in self.state.iter_mut().zip(&self.alphas) {
            *s = (*s + a).fract();
        }
        self.state.clone()
    }

    /// Next point mapped through the standard normal quantile per coordinate.
    pub fn next_gaussian(&mut self) -> Vec<f64> {
        self.next_uniform()
            .into_iter()
            .map(|u| normal_quantile(u.clamp(1e-15, 1.0 - 1e-15)))
            .collect()
    }
}
