//! Conditional label laws P(·|z) driven by the linear index z = ⟨θ₀, x⟩.

use super::rng::Rng;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// The five supported conditional laws.
#[derive(Clone, Serialize, Deserialize)]
pub enum KernelKind {
    /// P(+1|z) = (1 + e^{-2z})^{-1}, matching phi(t) = log(e^t + e^{-t}).
    GlmLogistic,
    /// P(+1|z) = eta·1{z ≥ 0} + (1-eta)·1{z < 0}, eta in (1/2, 1].
    SignFlip { eta: f64 },
    /// P(+1|z) = (1-zeta)1{z<-0.5} + (1-eta)1{-0.5≤z<0} + eta·1{0≤z<0.5} + zeta·1{z≥0.5}.
    Staircase { eta: f64, zeta: f64 },
    /// y = z + eps with E eps = 0, E eps² = tau², tau > 0.
    GaussianNoise { tau: f64 },
    /// y = h(z) for a named deterministic map.
    Deterministic(DeterministicMap),
}

/// Deterministic label maps. Named shapes serialize; `Custom` is for
/// library callers supplying an arbitrary h.
#[derive(Clone, Serialize, Deserialize)]
pub enum DeterministicMap {
    /// h(t) = t
    Identity,
    /// h(t) = t + c(t³ − 3t)
    HermiteCubic { c: f64 },
    #[serde(skip)]
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for DeterministicMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DeterministicMap::Identity => write!(f, "Identity"),
            DeterministicMap::HermiteCubic { c } => write!(f, "HermiteCubic {{ c: {c} }}"),
            DeterministicMap::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl DeterministicMap {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            DeterministicMap::Identity => t,
            DeterministicMap::HermiteCubic { c } => t + c * (t * t * t - 3.0 * t),
            DeterministicMap::Custom(h) => h(t),
        }
    }
}

impl std::fmt::Debug for KernelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KernelKind::GlmLogistic => write!(f, "GlmLogistic"),
            KernelKind::SignFlip { eta } => write!(f, "SignFlip {{ eta: {eta} }}"),
            KernelKind::Staircase { eta, zeta } => {
                write!(f, "Staircase {{ eta: {eta}, zeta: {zeta} }}")
            }
            KernelKind::GaussianNoise { tau } => write!(f, "GaussianNoise {{ tau: {tau} }}"),
            KernelKind::Deterministic(m) => write!(f, "Deterministic({m:?})"),
        }
    }
}

/// A label kernel: the conditional law plus the signal strength ‖θ₀‖ of the
/// population it belongs to.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabelKernel {
    pub kind: KernelKind,
    pub theta0_norm: f64,
}

impl LabelKernel {
    pub fn new(kind: KernelKind, theta0_norm: f64) -> Result<Self> {
        if theta0_norm < 0.0 || !theta0_norm.is_finite() {
            return Err(Error::invalid("theta0_norm must be finite and >= 0"));
        }
        match &kind {
            KernelKind::SignFlip { eta } => {
                if !(*eta > 0.5 && *eta <= 1.0) {
                    return Err(Error::invalid("sign-flip requires eta in (1/2, 1]"));
                }
            }
            KernelKind::Staircase { eta, zeta } => {
                for v in [eta, zeta] {
                    if !(0.0..=1.0).contains(v) {
                        return Err(Error::invalid("staircase requires eta, zeta in [0,1]"));
                    }
                }
            }
            KernelKind::GaussianNoise { tau } => {
                if !(*tau > 0.0) {
                    return Err(Error::invalid("gaussian-noise requires tau > 0"));
                }
            }
            _ => {}
        }
        Ok(LabelKernel { kind, theta0_norm })
    }

    /// Whether labels live in {+1, -1}.
    pub fn is_binary(&self) -> bool {
        matches!(
            self.kind,
            KernelKind::GlmLogistic | KernelKind::SignFlip { .. } | KernelKind::Staircase { .. }
        )
    }

    /// P(y = +1 | z) for binary kinds.
    pub fn p_plus(&self, z: f64) -> f64 {
        match &self.kind {
            KernelKind::GlmLogistic => 1.0 / (1.0 + (-2.0 * z).exp()),
            KernelKind::SignFlip { eta } => {
                if z >= 0.0 {
                    *eta
                } else {
                    1.0 - *eta
                }
            }
            KernelKind::Staircase { eta, zeta } => {
                if z < -0.5 {
                    1.0 - *zeta
                } else if z < 0.0 {
                    1.0 - *eta
                } else if z < 0.5 {
                    *eta
                } else {
                    *zeta
                }
            }
            _ => panic!("p_plus is only defined for binary kernels"),
        }
    }

    /// Conditional mean E[y|z].
    pub fn m1(&self, z: f64) -> f64 {
        match &self.kind {
            KernelKind::GaussianNoise { .. } => z,
            KernelKind::Deterministic(h) => h.eval(z),
            _ => 2.0 * self.p_plus(z) - 1.0,
        }
    }

    /// Conditional second moment E[y²|z].
    pub fn m2(&self, z: f64) -> f64 {
        match &self.kind {
            KernelKind::GaussianNoise { tau } => z * z + tau * tau,
            KernelKind::Deterministic(h) => {
                let y = h.eval(z);
                y * y
            }
            _ => 1.0,
        }
    }

    /// Discontinuity locations of z ↦ P(·|z), used to split quadrature panels.
    pub fn breakpoints_z(&self) -> Vec<f64> {
        match &self.kind {
            KernelKind::SignFlip { .. } => vec![0.0],
            KernelKind::Staircase { .. } => vec![-0.5, 0.0, 0.5],
            _ => vec![],
        }
    }

    /// Sum `f(y, P(y|z))` over the label law's support (binary kinds and
    /// deterministic maps only; Gaussian noise needs the moment interface).
    pub fn for_each_y(&self, z: f64, mut f: impl FnMut(f64, f64)) {
        match &self.kind {
            KernelKind::Deterministic(h) => f(h.eval(z), 1.0),
            KernelKind::GaussianNoise { .. } => {
                panic!("gaussian-noise labels have continuous support; use m1/m2")
            }
            _ => {
                let p = self.p_plus(z);
                f(1.0, p);
                f(-1.0, 1.0 - p);
            }
        }
    }
}

/// Draw a label from P(·|z). Deterministic given the rng state.
pub fn sample_label(kernel: &LabelKernel, z: f64, rng: &mut Rng) -> f64 {
    match &kernel.kind {
        KernelKind::GaussianNoise { tau } => z + tau * rng.normal(),
        KernelKind::Deterministic(h) => h.eval(z),
        _ => {
            if rng.uniform() < kernel.p_plus(z) {
                1.0
            } else {
                -1.0
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(kind: KernelKind) -> LabelKernel {
        LabelKernel::new(kind, 1.0).unwrap()
    }

    #[test]
    fn identity_kernel_passes_z_through() {
        let kernel = k(KernelKind::Deterministic(DeterministicMap::Identity));
        let mut rng = Rng::new(0);
        assert_eq!(sample_label(&kernel, 2.0, &mut rng), 2.0);
    }

    #[test]
    fn noiseless_sign_flip() {
        let kernel = k(KernelKind::SignFlip { eta: 1.0 });
        let mut rng = Rng::new(0);
        assert_eq!(sample_label(&kernel, -3.1, &mut rng), -1.0);
        assert_eq!(sample_label(&kernel, 0.0, &mut rng), 1.0);
    }

    #[test]
    fn logistic_at_zero_is_a_coin_flip() {
        let kernel = k(KernelKind::GlmLogistic);
        let mut rng = Rng::new(5);
        let n = 100_000;
        let mut plus = 0usize;
        for _ in 0..n {
            if sample_label(&kernel, 0.0, &mut rng) > 0.0 {
                plus += 1;
            }
        }
        let freq = plus as f64 / n as f64;
        assert!((freq - 0.5).abs() < 0.01, "freq {freq}");
    }

    #[test]
    fn staircase_half_open_intervals() {
        let kernel = k(KernelKind::Staircase {
            eta: 0.95,
            zeta: 0.7,
        });
        assert_eq!(kernel.p_plus(-0.5), 0.05); // -0.5 belongs to [-0.5, 0)
        assert_eq!(kernel.p_plus(0.0), 0.95); // 0 belongs to [0, 0.5)
        assert_eq!(kernel.p_plus(0.5), 0.7); // 0.5 belongs to [0.5, inf)
        assert_eq!(kernel.p_plus(-0.6), 0.3);
    }

    #[test]
    fn sampling_is_reproducible() {
        let kernel = k(KernelKind::GlmLogistic);
        let mut a = Rng::new(17);
        let mut b = Rng::new(17);
        for i in 0..100 {
            let z = (i as f64 - 50.0) / 10.0;
            assert_eq!(sample_label(&kernel, z, &mut a), sample_label(&kernel, z, &mut b));
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(LabelKernel::new(KernelKind::SignFlip { eta: 0.4 }, 1.0).is_err());
        assert!(LabelKernel::new(KernelKind::GaussianNoise { tau: 0.0 }, 1.0).is_err());
    }
}
