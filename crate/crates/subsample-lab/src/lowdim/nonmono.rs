//! Can selection beat the full sample? The score
//!
//! ```text
//! Z_Q(x;1) = −Tr{G(x)H⁻¹QH⁻¹} + 2 Tr{H(x)H⁻¹QH⁻¹GH⁻¹}
//! ```
//!
//! is the marginal value of keeping x at γ = 1. If Z_Q(x;1) < 0 with
//! positive probability, dropping that mass strictly lowers ρ_nr near γ = 1,
//! so training on a selected subsample beats training on everything.

use super::moments::ConditionalMoments;
use super::population::WeightedPopulation;
use super::rho::{quad_form, resolve_metric, rho_from_pi};
use crate::domain::metric::EstimationMetric;
use crate::domain::rng::Rng;
use crate::domain::selection::{SchemeKind, ScoreFn};
use crate::error::{Error, Result};
use crate::numerics::psd::{min_eigenvalue, sym_inverse};
use std::sync::Arc;

/// Empirical estimate of P(Z_Q(x;1) < 0).
#[derive(Debug, Clone, Copy)]
pub struct NegativityCertificate {
    pub draws: usize,
    pub negative: usize,
    pub estimate: f64,
    /// 3σ binomial band around the estimate.
    pub three_sigma: f64,
    /// E{Z_Q 1{Z_Q < 0}}, the first-order drop rate in (1−γ).
    pub mean_negative_part: f64,
}

impl NegativityCertificate {
    /// True when the estimate is positive at 3σ binomial confidence.
    pub fn certifies(&self) -> bool {
        self.negative > 0 && self.estimate > self.three_sigma
    }
}

/// The score Z_Q(x;1) built from population moments.
pub fn zq_at_full(
    moments: &ConditionalMoments,
    metric: &EstimationMetric,
    pop: &WeightedPopulation,
) -> Result<ScoreFn> {
    let q = resolve_metric(metric, moments, pop);
    let h = moments.h_matrix(pop);
    let g = moments.g_matrix(pop);
    if min_eigenvalue(&h) <= 1e-10 {
        return Err(Error::SingularMatrix {
            min_eig: min_eigenvalue(&h),
            floor: 1e-10,
        });
    }
    let h_inv = sym_inverse(&h)?;
    let a = &h_inv * &q * &h_inv;
    let b_raw = &a * &g * &h_inv;
    let b = 0.5 * (&b_raw + b_raw.transpose());
    let moments = moments.clone();
    Ok(Arc::new(move |x: &[f64]| {
        -moments.g_scalar(x) * quad_form(&a, x) + 2.0 * moments.h_scalar(x) * quad_form(&b, x)
    }))
}

/// Monte Carlo negativity estimate of Z_Q(x;1) over standard Gaussian draws.
pub fn negativity_certificate(
    score: &ScoreFn,
    p: usize,
    draws: usize,
    seed: u64,
) -> NegativityCertificate {
    let mut rng = Rng::new(seed);
    let mut x = vec![0.0; p];
    let mut negative = 0usize;
    let mut neg_sum = 0.0;
    for _ in 0..draws {
        for xi in x.iter_mut() {
            *xi = rng.normal();
        }
        let z = score(&x);
        if z < 0.0 {
            negative += 1;
            neg_sum += z;
        }
    }
    let estimate = negative as f64 / draws as f64;
    let three_sigma = 3.0 * (estimate * (1.0 - estimate) / draws as f64).sqrt();
    NegativityCertificate {
        draws,
        negative,
        estimate,
        three_sigma,
        mean_negative_part: neg_sum / draws as f64,
    }
}

/// Greedy construction near γ = 1: drop the (1−γ) mass with the most
/// negative Z_Q(x;1) and compare ρ_nr against the full sample. Returns
/// (ρ at the greedy π, ρ at π ≡ 1).
pub fn greedy_drop_rho(
    moments: &ConditionalMoments,
    metric: &EstimationMetric,
    pop: &WeightedPopulation,
    gamma: f64,
) -> Result<(f64, f64)> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::invalid("greedy drop requires gamma in (0,1)"));
    }
    let q = resolve_metric(metric, moments, pop);
    let score = zq_at_full(moments, metric, pop)?;
    let z: Vec<f64> = (0..pop.len()).map(|i| score(pop.point(i))).collect();
    let mut order: Vec<usize> = (0..pop.len()).collect();
    order.sort_by(|&a, &b| z[a].partial_cmp(&z[b]).unwrap());
    let mut pi = vec![1.0; pop.len()];
    let mut dropped = 0.0;
    let budget = 1.0 - gamma;
    for &i in &order {
        let w = pop.weight(i);
        if dropped + w <= budget {
            pi[i] = 0.0;
            dropped += w;
        } else {
            pi[i] = 1.0 - (budget - dropped) / w;
            break;
        }
    }
    let at_gamma = rho_from_pi(
        moments,
        &pi,
        false,
        &q,
        pop,
        gamma,
        SchemeKind::NonreweightOptimal,
    )?
    .rho;
    let ones = vec![1.0; pop.len()];
    let at_one = rho_from_pi(moments, &ones, false, &q, pop, 1.0, SchemeKind::Random)?.rho;
    Ok((at_gamma, at_one))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::kernel::{DeterministicMap, KernelKind, LabelKernel};
    use crate::domain::metric::{EstimationMetric, MetricKind};

    fn cubic_moments(p: usize) -> ConditionalMoments {
        let mut theta0 = vec![0.0; p];
        theta0[0] = 1.0;
        let kernel = LabelKernel::new(
            KernelKind::Deterministic(DeterministicMap::HermiteCubic { c: 0.5 }),
            1.0,
        )
        .unwrap();
        ConditionalMoments::misspecified_linear(theta0, kernel).unwrap()
    }

    #[test]
    fn well_specified_glm_never_negative() {
        // G = H pointwise makes Z_Q(x;1) = +Tr(H(x)H^-1QH^-1) >= 0.
        let p = 4;
        let pop = WeightedPopulation::gaussian_qmc(p, 20_000, 3).unwrap();
        let mut theta = vec![0.0; p];
        theta[0] = 1.5;
        let moments = ConditionalMoments::GlmLogistic { theta_star: theta };
        let metric = EstimationMetric::of_kind(MetricKind::Hessian);
        let score = zq_at_full(&moments, &metric, &pop).unwrap();
        let cert = negativity_certificate(&score, p, 100_000, 11);
        assert_eq!(cert.negative, 0);
        assert!(!cert.certifies());
    }

    #[test]
    fn isotropic_identity_case_is_nonnegative() {
        // G(x) = H(x) = xx', Q = H: Z = ||x||^2 * const >= 0.
        let p = 3;
        let pop = WeightedPopulation::gaussian_qmc(p, 20_000, 4).unwrap();
        let moments = ConditionalMoments::LinearRegression { tau: 1.0 };
        let metric = EstimationMetric::of_kind(MetricKind::Hessian);
        let score = zq_at_full(&moments, &metric, &pop).unwrap();
        let mut rng = Rng::new(5);
        for _ in 0..200 {
            let x: Vec<f64> = (0..p).map(|_| rng.normal()).collect();
            assert!(score(&x) >= -1e-10);
        }
    }

    #[test]
    fn cubic_kernel_gives_negative_mass() {
        let p = 12;
        let pop = WeightedPopulation::gaussian_qmc(p, 100_000, 7).unwrap();
        let moments = cubic_moments(p);
        let metric = EstimationMetric::of_kind(MetricKind::Hessian);
        let score = zq_at_full(&moments, &metric, &pop).unwrap();
        let cert = negativity_certificate(&score, p, 100_000, 13);
        assert!(
            cert.certifies(),
            "estimate {} ± {}",
            cert.estimate,
            cert.three_sigma
        );
    }
}
