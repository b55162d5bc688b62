//! Conditional gradient covariance G(x) and conditional Hessian H(x).
//!
//! For every supported family both matrices are scalar multiples of xxᵀ:
//! G(x) = g(x)·xxᵀ and H(x) = h(x)·xxᵀ, which keeps score evaluation O(p²).

use super::population::WeightedPopulation;
use crate::domain::kernel::LabelKernel;
use crate::error::Result;
use crate::numerics::quadrature::piecewise_normal_grid;
use nalgebra::DMatrix;

#[derive(Debug, Clone)]
pub enum ConditionalMoments {
    /// Linear regression with homoskedastic noise: G = τ²xxᵀ, H = xxᵀ.
    LinearRegression { tau: f64 },
    /// Well-specified logistic GLM: G = H = φ''(⟨θ*, x⟩)xxᵀ.
    GlmLogistic { theta_star: Vec<f64> },
    /// Misspecified linear regression y|x ~ P(·|⟨θ₀,x⟩) fit with square
    /// loss: H = xxᵀ and G = f(⟨θ₀,x⟩)xxᵀ with
    /// f(z) = E[(y − ⟨θ*,x⟩)²|z] computed from the kernel's conditional
    /// moments about the population minimizer θ* = a*·θ₀/‖θ₀‖.
    MisspecifiedLinear {
        theta0: Vec<f64>,
        kernel: LabelKernel,
        /// a* = E[G·m₁(‖θ₀‖G)], the coefficient of θ* on θ₀/‖θ₀‖.
        a_star: f64,
    },
}

impl ConditionalMoments {
    /// Builds the misspecified family for isotropic Gaussian covariates,
    /// solving the scalar population first-order condition for a*.
    pub fn misspecified_linear(theta0: Vec<f64>, kernel: LabelKernel) -> Result<Self> {
        let norm0: f64 = theta0.iter().map(|t| t * t).sum::<f64>().sqrt();
        let breaks: Vec<f64> = kernel
            .breakpoints_z()
            .iter()
            .map(|z| z / norm0.max(1e-300))
            .collect();
        let grid = piecewise_normal_grid(-12.0, 12.0, &breaks, 60)?;
        let a_star = grid.expect(|g| g * kernel.m1(norm0 * g));
        Ok(ConditionalMoments::MisspecifiedLinear {
            theta0,
            kernel,
            a_star,
        })
    }

    /// Scalar factor of G(x).
    pub fn g_scalar(&self, x: &[f64]) -> f64 {
        match self {
            ConditionalMoments::LinearRegression { tau } => tau * tau,
            ConditionalMoments::GlmLogistic { theta_star } => {
                crate::domain::loss::phi_second(dot(theta_star, x))
            }
            ConditionalMoments::MisspecifiedLinear {
                theta0,
                kernel,
                a_star,
            } => {
                let z = dot(theta0, x);
                let norm0: f64 = theta0.iter().map(|t| t * t).sum::<f64>().sqrt();
                let pred = a_star * z / norm0;
                kernel.m2(z) - 2.0 * pred * kernel.m1(z) + pred * pred
            }
        }
    }

    /// Scalar factor of H(x).
    pub fn h_scalar(&self, x: &[f64]) -> f64 {
        match self {
            ConditionalMoments::LinearRegression { .. }
            | ConditionalMoments::MisspecifiedLinear { .. } => 1.0,
            ConditionalMoments::GlmLogistic { theta_star } => {
                crate::domain::loss::phi_second(dot(theta_star, x))
            }
        }
    }

    /// Population G = E G(x).
    pub fn g_matrix(&self, pop: &WeightedPopulation) -> DMatrix<f64> {
        pop.second_moment(|x| self.g_scalar(x))
    }

    /// Population H = E H(x).
    pub fn h_matrix(&self, pop: &WeightedPopulation) -> DMatrix<f64> {
        pop.second_moment(|x| self.h_scalar(x))
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::kernel::{DeterministicMap, KernelKind};

    #[test]
    fn cubic_kernel_population_minimizer_is_identity_coefficient() {
        // y = h(z) = z + c(z^3 - 3z) with z ~ N(0,1): a* = E[G h(G)] = 1.
        let kernel = LabelKernel::new(
            KernelKind::Deterministic(DeterministicMap::HermiteCubic { c: 0.5 }),
            1.0,
        )
        .unwrap();
        let m = ConditionalMoments::misspecified_linear(vec![1.0, 0.0], kernel).unwrap();
        match &m {
            ConditionalMoments::MisspecifiedLinear { a_star, .. } => {
                assert!((a_star - 1.0).abs() < 1e-10, "a* = {a_star}");
            }
            _ => unreachable!(),
        }
        // With a* = 1 the residual variance is f(z) = c²(z³−3z)².
        let z = 1.7f64;
        let want = 0.25 * (z.powi(3) - 3.0 * z).powi(2);
        assert!((m.g_scalar(&[z, 0.0]) - want).abs() < 1e-10);
    }

    #[test]
    fn glm_scalars_match_phi_second() {
        let m = ConditionalMoments::GlmLogistic {
            theta_star: vec![0.5, -1.0],
        };
        let x = [0.3, 0.7];
        let z = 0.5 * 0.3 - 1.0 * 0.7;
        let want = crate::domain::loss::phi_second(z);
        assert_eq!(m.g_scalar(&x), want);
        assert_eq!(m.h_scalar(&x), want);
    }
}
