//! Estimation metrics: the weight matrix Q in ‖θ̂ − θ*‖²_Q.

use crate::error::Result;
use crate::numerics::psd::validate_psd;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    /// Q = I (plain estimation error)
    Identity,
    /// Q = Σ, the population covariance (prediction error)
    Sigma,
    /// Q = H, the population Hessian
    Hessian,
}

/// A metric kind together with its resolved matrix (filled in against a
/// concrete population by `lowdim::resolve_metric`).
#[derive(Debug, Clone)]
pub struct EstimationMetric {
    pub kind: MetricKind,
    pub q: Option<DMatrix<f64>>,
}

impl EstimationMetric {
    pub fn of_kind(kind: MetricKind) -> Self {
        EstimationMetric { kind, q: None }
    }

    pub fn explicit(kind: MetricKind, q: DMatrix<f64>) -> Result<Self> {
        validate_psd(&q)?;
        Ok(EstimationMetric { kind, q: Some(q) })
    }
}
