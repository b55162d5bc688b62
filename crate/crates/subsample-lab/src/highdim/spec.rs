//! The high-dimensional problem instance.

use super::scheme::ScalarScheme;
use crate::domain::kernel::LabelKernel;
use crate::domain::loss::{LossFunction, LossKind};
use crate::error::{Error, Result};

/// Quadrature orders per Gaussian dimension. `main` drives the smooth axes
/// (G_s, G⊥) and `panel` the per-panel Legendre order on axes split at
/// selection/kernel breakpoints.
#[derive(Debug, Clone, Copy)]
pub struct QuadOrders {
    pub main: usize,
    pub panel: usize,
}

impl Default for QuadOrders {
    fn default() -> Self {
        QuadOrders { main: 40, panel: 40 }
    }
}

impl QuadOrders {
    pub fn doubled(self) -> Self {
        QuadOrders {
            main: (2 * self.main).min(200),
            panel: (2 * self.panel).min(200),
        }
    }
}

/// Everything needed to assemble the saddle-point Lagrangian.
#[derive(Debug, Clone)]
pub struct SaddleSpec {
    pub loss: LossFunction,
    /// Conditional label law; `kernel.theta0_norm` is the signal strength.
    pub kernel: LabelKernel,
    /// Surrogate projection onto θ₀/‖θ₀‖.
    pub beta0: f64,
    /// Surrogate mass orthogonal to θ₀ (≥ 0).
    pub beta_s: f64,
    /// Full-sample samples-per-dimension N/p (the selected ratio is δ = δ₀γ).
    pub delta0: f64,
    /// Ridge penalty λ > 0.
    pub lambda: f64,
    pub selection: ScalarScheme,
    pub quad: QuadOrders,
}

impl SaddleSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta0 > 0.0) {
            return Err(Error::invalid("delta0 must be > 0"));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::invalid("lambda must be > 0"));
        }
        if self.beta_s < 0.0 {
            return Err(Error::invalid("beta_s must be >= 0"));
        }
        if self.loss.kind == LossKind::Logistic && !self.kernel.is_binary() {
            return Err(Error::invalid(
                "logistic loss requires a binary label kernel",
            ));
        }
        Ok(())
    }

    /// σ_v = ‖θ̂_su‖, the scale of the surrogate index β₀G₀ + β_sG_s.
    pub fn sigma_v(&self) -> f64 {
        self.beta0.hypot(self.beta_s)
    }
}
