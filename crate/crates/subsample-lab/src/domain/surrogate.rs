//! Surrogate models and their decomposition against the true direction.

use super::kernel::LabelKernel;
use crate::error::{Error, Result};
use nalgebra::DVector;

/// A linear-index surrogate: scores samples through ⟨θ_su, x⟩.
#[derive(Debug, Clone)]
pub struct SurrogateModel {
    pub theta_su: DVector<f64>,
    /// (β₀, β_s) against a known θ₀; only available on synthetic runs.
    pub decomposition: Option<(f64, f64)>,
    /// Kernel used when the surrogate supplies conditional expectations.
    pub label_kernel_for_scoring: LabelKernel,
}

/// Decompose θ_su against θ₀: β₀ = ⟨θ_su, θ₀⟩/‖θ₀‖ and β_s the norm of the
/// orthogonal remainder, so β₀² + β_s² = ‖θ_su‖².
pub fn surrogate_decompose(theta_su: &DVector<f64>, theta0: &DVector<f64>) -> Result<(f64, f64)> {
    let norm0 = theta0.norm();
    if norm0 <= 0.0 {
        return Err(Error::invalid("surrogate_decompose requires theta0 != 0"));
    }
    let beta0 = theta_su.dot(theta0) / norm0;
    let residual = theta_su - theta0 * (beta0 / norm0);
    Ok((beta0, residual.norm()))
}
