//! Predicted test error, excess error, and misclassification rate.
//!
//! In the high-dimensional limit (and exactly, conditionally on θ̂, for
//! isotropic Gaussian features), predictions at a fresh point are
//! α₀G + rG' with (G, G') independent standard normals and Y ~ P(·|‖θ₀‖G);
//! every error functional reduces to low-dimensional quadrature over G.
//! Square-loss errors are reported in plain squared-error units (matching
//! the ridgeless closed forms); the misclassification rate uses
//!
//! ```text
//! R = 1/2 − (1/2)·E{(2f(‖θ₀‖G) − 1)(2Φ(qG) − 1)},  q = α₀/r,
//! ```
//!
//! with the q → ±∞ limit replacing Φ by a step when r = 0.

use super::spec::{QuadOrders, SaddleSpec};
use crate::domain::kernel::LabelKernel;
use crate::domain::loss::{LossFunction, LossKind, TestKind};
use crate::error::Result;
use crate::numerics::quadrature::{gauss_hermite, piecewise_normal_grid, QuadratureGrid};
use crate::numerics::rootfind::maximize_concave_scalar;
use crate::numerics::special::normal_cdf;
use serde::Serialize;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PredictedErrors {
    /// Test error under the spec's test kind (MSE units for square loss).
    pub test_error: f64,
    /// Test error minus the best error attainable along θ₀.
    pub excess_error: f64,
    /// Binary kernels only.
    pub misclassification: Option<f64>,
}

/// Error functionals of the pair (kernel, loss), independent of selection.
pub struct ErrorModel<'a> {
    pub kernel: &'a LabelKernel,
    pub loss: LossFunction,
    pub quad: QuadOrders,
}

impl<'a> ErrorModel<'a> {
    pub fn new(kernel: &'a LabelKernel, loss: LossFunction, quad: QuadOrders) -> Self {
        ErrorModel { kernel, loss, quad }
    }

    fn g_axis(&self) -> Result<QuadratureGrid> {
        let norm0 = self.kernel.theta0_norm;
        let breaks: Vec<f64> = if norm0 > 0.0 {
            self.kernel
                .breakpoints_z()
                .iter()
                .map(|z| z / norm0)
                .collect()
        } else {
            vec![]
        };
        piecewise_normal_grid(-12.0, 12.0, &breaks, self.quad.panel)
    }

    /// Misclassification rate for projections (α₀, r).
    pub fn misclassification(&self, alpha0: f64, r: f64) -> Result<f64> {
        let grid = self.g_axis()?;
        let norm0 = self.kernel.theta0_norm;
        let correlation = |g: f64| -> f64 {
            if r > 0.0 {
                2.0 * normal_cdf(alpha0 / r * g) - 1.0
            } else if alpha0 == 0.0 {
                0.0
            } else {
                // q → ±∞ limit: the Gaussian factor collapses to a sign.
                (alpha0 * g).signum()
            }
        };
        let e = grid.expect(|g| (2.0 * self.kernel.p_plus(norm0 * g) - 1.0) * correlation(g));
        Ok(0.5 - 0.5 * e)
    }

    /// E L(cG + rG', Y) in the train loss (MSE units for square).
    pub fn loss_error(&self, c: f64, r: f64) -> Result<f64> {
        let grid = self.g_axis()?;
        let norm0 = self.kernel.theta0_norm;
        match self.loss.kind {
            LossKind::Square => {
                // Plain squared error: E(Y − cG − rG')².
                let m2 = grid.expect(|g| self.kernel.m2(norm0 * g));
                let gm1 = grid.expect(|g| g * self.kernel.m1(norm0 * g));
                Ok(m2 - 2.0 * c * gm1 + c * c + r * r)
            }
            LossKind::Logistic => {
                let gh = gauss_hermite(self.quad.main)?;
                Ok(grid.expect(|g| {
                    let p = self.kernel.p_plus(norm0 * g);
                    gh.expect(|gp| {
                        let u = c * g + r * gp;
                        p * crate::numerics::prox::logistic_loss(u, 1.0)
                            + (1.0 - p) * crate::numerics::prox::logistic_loss(u, -1.0)
                    })
                }))
            }
        }
    }

    /// c* = argmin_c E L(cG, Y), the best one-dimensional fit along θ₀.
    pub fn best_scalar_fit(&self) -> Result<f64> {
        let grid = self.g_axis()?;
        let norm0 = self.kernel.theta0_norm;
        match self.loss.kind {
            LossKind::Square => Ok(grid.expect(|g| g * self.kernel.m1(norm0 * g))),
            LossKind::Logistic => {
                let objective = |c: f64| -> f64 {
                    grid.expect(|g| {
                        let p = self.kernel.p_plus(norm0 * g);
                        p * crate::numerics::prox::logistic_loss(c * g, 1.0)
                            + (1.0 - p) * crate::numerics::prox::logistic_loss(c * g, -1.0)
                    })
                };
                let (c, _) = maximize_concave_scalar(|c| -objective(c), -20.0, 20.0, 1e-9);
                Ok(c)
            }
        }
    }

    /// Test, excess, and misclassification for projections (α₀, r).
    pub fn summary(&self, alpha0: f64, r: f64) -> Result<PredictedErrors> {
        let mis = if self.kernel.is_binary() {
            Some(self.misclassification(alpha0, r)?)
        } else {
            None
        };
        let c_star = self.best_scalar_fit()?;
        let (test, baseline) = match self.loss.test_kind {
            TestKind::Misclassification => {
                let t = mis.expect("misclassification requires a binary kernel");
                // Any positive multiple of θ₀ gives the same sign predictions:
                // the baseline is the q→∞ limit at sign(c*).
                let b = self.misclassification(c_star.signum(), 0.0)?;
                (t, b)
            }
            TestKind::SameAsTrain => (self.loss_error(alpha0, r)?, self.loss_error(c_star, 0.0)?),
        };
        Ok(PredictedErrors {
            test_error: test,
            excess_error: test - baseline,
            misclassification: mis,
        })
    }
}

/// All predicted errors from a solved (α₀, α_s, α⊥).
pub fn predicted_errors(spec: &SaddleSpec, alpha: [f64; 3]) -> Result<PredictedErrors> {
    let r = alpha[1].hypot(alpha[2]);
    ErrorModel::new(&spec.kernel, spec.loss, spec.quad).summary(alpha[0], r)
}

/// Thm-(d) realized subsampling fraction: γ = E π(β₀G₀ + β_sG_s).
pub fn realized_gamma(spec: &SaddleSpec) -> Result<f64> {
    let sigma_v = spec.sigma_v();
    if sigma_v == 0.0 {
        return Ok(spec.selection.pi(0.0));
    }
    let breaks: Vec<f64> = spec
        .selection
        .breakpoints_v()
        .iter()
        .map(|b| b / sigma_v)
        .collect();
    let grid = piecewise_normal_grid(-12.0, 12.0, &breaks, spec.quad.panel)?;
    Ok(grid.expect(|t| spec.selection.pi(sigma_v * t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::kernel::{KernelKind, LabelKernel};
    use crate::highdim::scheme::{ScalarScheme, ScalarSchemeKind};

    fn spec_with(kernel: LabelKernel, kind: LossKind, test: TestKind) -> SaddleSpec {
        SaddleSpec {
            loss: LossFunction {
                kind,
                test_kind: test,
            },
            kernel,
            beta0: 1.0,
            beta_s: 0.0,
            delta0: 4.0,
            lambda: 0.1,
            selection: ScalarScheme::fit(ScalarSchemeKind::Const, 0.3, false, 1.0).unwrap(),
            quad: QuadOrders::default(),
        }
    }

    #[test]
    fn zero_q_is_a_coin_flip() {
        let kernel = LabelKernel::new(KernelKind::SignFlip { eta: 0.95 }, 1.0).unwrap();
        let spec = spec_with(kernel, LossKind::Logistic, TestKind::Misclassification);
        let m = ErrorModel::new(&spec.kernel, spec.loss, spec.quad);
        assert!((m.misclassification(0.0, 1.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sign_flip_q_infinity_hits_bayes() {
        // eta=0.95, q -> inf: misclassification = 1 - eta.
        let kernel = LabelKernel::new(KernelKind::SignFlip { eta: 0.95 }, 1.0).unwrap();
        let spec = spec_with(kernel, LossKind::Logistic, TestKind::Misclassification);
        let m = ErrorModel::new(&spec.kernel, spec.loss, spec.quad);
        let r = m.misclassification(1.0, 0.0).unwrap();
        assert!((r - 0.05).abs() < 1e-10, "r = {r}");
        // and large finite q approaches it from above
        let r2 = m.misclassification(100.0, 1.0).unwrap();
        assert!(r2 > r && r2 - r < 1e-2);
    }

    #[test]
    fn square_best_fit_is_linear_projection() {
        // Linear-noise kernel with ||theta0|| = 1: c* = E[G·Y] = 1.
        let kernel = LabelKernel::new(KernelKind::GaussianNoise { tau: 0.7 }, 1.0).unwrap();
        let spec = spec_with(kernel, LossKind::Square, TestKind::SameAsTrain);
        let m = ErrorModel::new(&spec.kernel, spec.loss, spec.quad);
        let c = m.best_scalar_fit().unwrap();
        assert!((c - 1.0).abs() < 1e-12);
        // test error at (c*, r=0) is the noise floor tau^2 in MSE units
        let e = predicted_errors(&spec, [1.0, 0.0, 0.0]).unwrap();
        assert!((e.test_error - 0.49).abs() < 1e-10);
        assert!(e.excess_error.abs() < 1e-12);
        assert!(e.misclassification.is_none());
    }

    #[test]
    fn realized_gamma_constant_and_alpha_family() {
        let kernel = LabelKernel::new(KernelKind::GlmLogistic, 2.0).unwrap();
        let mut spec = spec_with(kernel, LossKind::Logistic, TestKind::Misclassification);
        assert!((realized_gamma(&spec).unwrap() - 0.3).abs() < 1e-12);
        spec.selection = ScalarScheme::fit(
            ScalarSchemeKind::AlphaFamily { alpha: 2.0 },
            0.45,
            false,
            spec.sigma_v(),
        )
        .unwrap();
        assert!((realized_gamma(&spec).unwrap() - 0.45).abs() < 1e-6);
    }
}
