//! Test-error measurement for a fitted estimator.
//!
//! For isotropic Gaussian features the distribution of (⟨θ̂, x⟩, y) given θ̂
//! depends only on the projections m = ⟨θ̂, θ₀⟩/‖θ₀‖ and s = ‖P₀⊥θ̂‖, so the
//! test error has a closed form (the same formulas the saddle predictions
//! use). A fresh holdout estimate of configurable size is reported next to
//! it as a cross-check.

use crate::domain::kernel::{sample_label, LabelKernel};
use crate::domain::loss::{LossFunction, LossKind, TestKind};
use crate::domain::rng::Rng;
use crate::error::Result;
use crate::highdim::errors::ErrorModel;
use crate::highdim::spec::QuadOrders;
use nalgebra::DVector;

#[derive(Debug, Clone, Copy)]
pub struct Measured {
    /// Closed-form test error under the loss's test kind.
    pub test_error: f64,
    pub excess_error: f64,
    pub misclassification: Option<f64>,
    /// Fresh-sample estimate of `test_error` (None when holdout = 0).
    pub holdout_estimate: Option<f64>,
    /// m = ⟨θ̂, θ₀⟩/‖θ₀‖.
    pub on_signal: f64,
    /// s = ‖P₀⊥ θ̂‖.
    pub off_signal: f64,
}

/// Measure the test error of θ̂ against the true (kernel, θ₀).
pub fn measure_test_error(
    theta_hat: &DVector<f64>,
    theta0: &DVector<f64>,
    kernel: &LabelKernel,
    loss: LossFunction,
    holdout: usize,
    rng: &mut Rng,
) -> Result<Measured> {
    let norm0 = theta0.norm();
    let m = theta_hat.dot(theta0) / norm0;
    let s = (theta_hat - theta0 * (m / norm0)).norm();
    let model = ErrorModel::new(kernel, loss, QuadOrders::default());
    let summary = model.summary(m, s)?;

    // Holdout: the fresh pair (⟨θ̂,x⟩, y) is m·G + s·G' with y ~ P(·|‖θ₀‖G),
    // so scalar draws suffice.
    let holdout_estimate = if holdout > 0 {
        let mut acc = 0.0;
        for _ in 0..holdout {
            let g = rng.normal();
            let gp = rng.normal();
            let u = m * g + s * gp;
            let y = sample_label(kernel, norm0 * g, rng);
            acc += match loss.test_kind {
                TestKind::Misclassification => {
                    if y * u < 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                }
                TestKind::SameAsTrain => match loss.kind {
                    LossKind::Square => (y - u) * (y - u),
                    LossKind::Logistic => crate::numerics::prox::logistic_loss(u, y),
                },
            };
        }
        Some(acc / holdout as f64)
    } else {
        None
    };
    Ok(Measured {
        test_error: summary.test_error,
        excess_error: summary.excess_error,
        misclassification: summary.misclassification,
        holdout_estimate,
        on_signal: m,
        off_signal: s,
    })
}
