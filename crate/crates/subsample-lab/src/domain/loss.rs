//! Training and test losses.

use serde::{Deserialize, Serialize};

/// Convex scalar training losses L(u, y) in the margin/prediction u.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossKind {
    /// L(u, y) = (y − u)²/2
    Square,
    /// L(u, y) = −yu + log(e^u + e^{−u})
    Logistic,
}

/// How test error is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestKind {
    SameAsTrain,
    /// L_test(u, y) = 1{yu < 0}
    Misclassification,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LossFunction {
    pub kind: LossKind,
    pub test_kind: TestKind,
}

impl LossKind {
    #[inline]
    pub fn value(self, u: f64, y: f64) -> f64 {
        match self {
            LossKind::Square => 0.5 * (y - u) * (y - u),
            LossKind::Logistic => crate::numerics::prox::logistic_loss(u, y),
        }
    }

    /// dL/du
    #[inline]
    pub fn grad(self, u: f64, y: f64) -> f64 {
        match self {
            LossKind::Square => u - y,
            LossKind::Logistic => u.tanh() - y,
        }
    }

    /// d²L/du²
    #[inline]
    pub fn curvature(self, u: f64, y: f64) -> f64 {
        match self {
            LossKind::Square => 1.0,
            LossKind::Logistic => {
                let _ = y;
                let t = u.tanh();
                1.0 - t * t
            }
        }
    }
}

/// phi''(t) = 1 − tanh²(t), the conditional label variance of the logistic
/// model and the score inside the α-family selection probabilities.
#[inline]
pub fn phi_second(t: f64) -> f64 {
    let th = t.tanh();
    1.0 - th * th
}
