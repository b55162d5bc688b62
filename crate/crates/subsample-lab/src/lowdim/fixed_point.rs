//! Optimal non-reweighting selection via a damped fixed point.
//!
//! The optimal w ≡ 1 scheme keeps exactly the samples whose score
//!
//! ```text
//! Z(x;π) = −Tr{G(x) H_π⁻¹QH_π⁻¹} + 2 Tr{H(x) H_π⁻¹QH_π⁻¹ G_π H_π⁻¹}
//! ```
//!
//! exceeds a threshold, but the score itself depends on the selected-set
//! moments (H_π, G_π). The solver iterates: score under the current π,
//! re-threshold at the (1−γ)-quantile, damp, repeat; ties at the threshold
//! are kept fractionally (discrete populations only — for an absolutely
//! continuous law the tie set has measure zero and the fraction is just the
//! boundary grid atom).

use super::moments::ConditionalMoments;
use super::population::WeightedPopulation;
use super::rho::{quad_form, rank_one_update, resolve_metric, rho_from_pi, AsymptoticCoefficient};
use crate::domain::metric::EstimationMetric;
use crate::domain::selection::{RuleState, SchemeKind, ScoreFn, SelectionRule};
use crate::error::{Error, Result};
use crate::numerics::psd::{min_eigenvalue, sym_inverse};
use nalgebra::DMatrix;
use std::sync::Arc;

/// Converged fixed-point state.
#[derive(Debug, Clone)]
pub struct NonReweightFixedPoint {
    pub h_pi: DMatrix<f64>,
    pub g_pi: DMatrix<f64>,
    pub lambda_sel: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// The score Z(x;π) for given selected-set matrices.
pub fn nonreweight_score(
    moments: &ConditionalMoments,
    q: &DMatrix<f64>,
    h_pi: &DMatrix<f64>,
    g_pi: &DMatrix<f64>,
) -> Result<ScoreFn> {
    if min_eigenvalue(h_pi) <= 1e-10 {
        return Err(Error::SingularMatrix {
            min_eig: min_eigenvalue(h_pi),
            floor: 1e-10,
        });
    }
    let h_inv = sym_inverse(h_pi)?;
    let a = &h_inv * q * &h_inv;
    let b_raw = &a * g_pi * &h_inv;
    // Only the symmetric part matters in x' B x.
    let b = 0.5 * (&b_raw + b_raw.transpose());
    let moments = moments.clone();
    Ok(Arc::new(move |x: &[f64]| {
        -moments.g_scalar(x) * quad_form(&a, x) + 2.0 * moments.h_scalar(x) * quad_form(&b, x)
    }))
}

/// Weighted (1-γ)-quantile threshold with fractional boundary mass: returns
/// (λ, π) where π_i = 1 above λ, the boundary atom gets the fraction that
/// makes Σ ω_i π_i = γ exactly, and π = 0 below.
fn threshold_at_gamma(z: &[f64], pop: &WeightedPopulation, gamma: f64) -> (f64, Vec<f64>) {
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.sort_by(|&a, &b| z[b].partial_cmp(&z[a]).unwrap());
    let mut pi = vec![0.0; z.len()];
    let mut acc = 0.0;
    let mut lambda = f64::NEG_INFINITY;
    for &i in &order {
        let w = pop.weight(i);
        if acc + w <= gamma - 1e-15 {
            pi[i] = 1.0;
            acc += w;
        } else {
            let frac = ((gamma - acc) / w).clamp(0.0, 1.0);
            if frac >= 1.0 - 1e-12 {
                // The atom is effectively fully included; the threshold sits
                // strictly below it.
                pi[i] = 1.0;
                acc += w;
                continue;
            }
            pi[i] = frac;
            lambda = z[i];
            break;
        }
    }
    (lambda, pi)
}

/// Solve the non-reweighting fixed point at subsampling fraction γ.
/// Returns the converged state, the fitted hard-threshold rule, and ρ_nr.
pub fn solve_nonreweight_fixed_point(
    moments: &ConditionalMoments,
    metric: &EstimationMetric,
    pop: &WeightedPopulation,
    gamma: f64,
) -> Result<(NonReweightFixedPoint, SelectionRule, f64, AsymptoticCoefficient)> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::invalid("gamma must be in (0, 1]"));
    }
    let q = resolve_metric(metric, moments, pop);
    let p = pop.dim();
    let n = pop.len();
    let damping = 0.5;
    let mut pi = vec![gamma; n];
    let mut h_prev: Option<DMatrix<f64>> = None;
    let mut lambda = f64::NEG_INFINITY;
    let mut residual = f64::INFINITY;
    let mut iterations = 0usize;

    for t in 0..200 {
        iterations = t + 1;
        // Selected-set moments under the current (possibly fractional) π.
        let mut mass = 0.0;
        let mut h_acc = DMatrix::<f64>::zeros(p, p);
        let mut g_acc = DMatrix::<f64>::zeros(p, p);
        for i in 0..n {
            let c = pop.weight(i) * pi[i];
            if c == 0.0 {
                continue;
            }
            mass += c;
            let x = pop.point(i);
            rank_one_update(&mut h_acc, x, c * moments.h_scalar(x));
            rank_one_update(&mut g_acc, x, c * moments.g_scalar(x));
        }
        let h_pi = h_acc / mass;
        let g_pi = g_acc / mass;
        if min_eigenvalue(&h_pi) <= 1e-10 {
            return Err(Error::SingularMatrix {
                min_eig: min_eigenvalue(&h_pi),
                floor: 1e-10,
            });
        }
        if let Some(prev) = &h_prev {
            residual = (&h_pi - prev).norm();
            if residual <= 1e-8 {
                h_prev = Some(h_pi);
                break;
            }
        }
        let score = nonreweight_score(moments, &q, &h_pi, &g_pi)?;
        let z: Vec<f64> = (0..n).map(|i| score(pop.point(i))).collect();
        let (lam, hard) = threshold_at_gamma(&z, pop, gamma);
        lambda = lam;
        for i in 0..n {
            pi[i] = (1.0 - damping) * pi[i] + damping * hard[i];
        }
        h_prev = Some(h_pi);
    }
    if residual > 1e-8 && iterations >= 200 {
        return Err(Error::NonConvergence {
            what: "non-reweighting fixed point".into(),
            iterations,
            residual,
        });
    }

    // Polish: take the hard indicator of the converged smoothed score, then
    // refit (H_π, G_π, λ) once from that hard set so the stored threshold is
    // self-consistent with the stored matrices.
    let h_conv = h_prev.expect("at least one iteration ran");
    let _ = h_conv;
    let mut hard = pi.clone();
    let mut h_pi = DMatrix::<f64>::zeros(p, p);
    let mut g_pi = DMatrix::<f64>::zeros(p, p);
    let mut lambda_sel = lambda;
    for _ in 0..2 {
        let mut mass = 0.0;
        let mut h_acc = DMatrix::<f64>::zeros(p, p);
        let mut g_acc = DMatrix::<f64>::zeros(p, p);
        for i in 0..n {
            let c = pop.weight(i) * hard[i];
            if c == 0.0 {
                continue;
            }
            mass += c;
            let x = pop.point(i);
            rank_one_update(&mut h_acc, x, c * moments.h_scalar(x));
            rank_one_update(&mut g_acc, x, c * moments.g_scalar(x));
        }
        h_pi = h_acc / mass;
        g_pi = g_acc / mass;
        let score = nonreweight_score(moments, &q, &h_pi, &g_pi)?;
        let z: Vec<f64> = (0..n).map(|i| score(pop.point(i))).collect();
        let (lam, next) = threshold_at_gamma(&z, pop, gamma);
        lambda_sel = lam;
        hard = next;
    }

    // ρ_nr and the stored matrices come from the final hard indicator.
    let coef = rho_from_pi(
        moments,
        &hard,
        false,
        &q,
        pop,
        gamma,
        SchemeKind::NonreweightOptimal,
    )?;
    let e_pi: f64 = (0..n).map(|i| pop.weight(i) * hard[i]).sum();
    if (e_pi - gamma).abs() > 1e-6 {
        return Err(Error::NonConvergence {
            what: "fixed-point mass constraint".into(),
            iterations,
            residual: (e_pi - gamma).abs(),
        });
    }
    let fixed = NonReweightFixedPoint {
        h_pi: h_pi.clone(),
        g_pi: g_pi.clone(),
        lambda_sel,
        iterations,
        residual,
    };
    let rule = SelectionRule {
        kind: SchemeKind::NonreweightOptimal,
        gamma,
        alpha: None,
        reweight: false,
        state: RuleState::Threshold {
            lambda_sel,
            score: nonreweight_score(moments, &q, &h_pi, &g_pi)?,
            h_pi,
            g_pi,
        },
    };
    let rho_nr = coef.rho;
    Ok((fixed, rule, rho_nr, coef))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::metric::MetricKind;
    use crate::lowdim::population::Law1d;

    #[test]
    fn uniform_1d_fixed_point_matches_closed_form() {
        // X ~ Unif[-1,1], tau=1, Q=Sigma, gamma=0.5: pi = 1{|x| >= 0.5},
        // rho_nr = 1/(1-(1-gamma)^3) = 8/7.
        let pop = WeightedPopulation::from_law_1d(Law1d::Uniform { xm: 1.0 }, 20_000).unwrap();
        let moments = ConditionalMoments::LinearRegression { tau: 1.0 };
        let metric = EstimationMetric::of_kind(MetricKind::Sigma);
        let (fp, rule, rho_nr, _) =
            solve_nonreweight_fixed_point(&moments, &metric, &pop, 0.5).unwrap();
        assert!((rho_nr - 8.0 / 7.0).abs() < 1e-6, "rho_nr = {rho_nr}");
        // membership: |x| above 0.5 selected, below not
        assert_eq!(rule.pi(&[0.6]), 1.0);
        assert_eq!(rule.pi(&[0.4]), 0.0);
        assert_eq!(rule.pi(&[-0.7]), 1.0);
        assert!(fp.iterations < 200);
    }

    #[test]
    fn gamma_one_recovers_full_sample() {
        let pop = WeightedPopulation::from_law_1d(Law1d::Uniform { xm: 1.0 }, 5_000).unwrap();
        let moments = ConditionalMoments::LinearRegression { tau: 1.0 };
        let metric = EstimationMetric::of_kind(MetricKind::Sigma);
        let (_, _, rho_nr, _) =
            solve_nonreweight_fixed_point(&moments, &metric, &pop, 1.0).unwrap();
        // Full sample: rho = Tr(G H^-1 Q H^-1) = tau^2 = 1.
        assert!((rho_nr - 1.0).abs() < 1e-9);
    }

    #[test]
    fn constant_score_degenerates_to_random() {
        // Two symmetric atoms: Z is constant, so rho_nr = rho_rand.
        let pop =
            WeightedPopulation::discrete(vec![vec![1.0], vec![-1.0]], vec![0.5, 0.5]).unwrap();
        let moments = ConditionalMoments::LinearRegression { tau: 1.0 };
        let metric = EstimationMetric::of_kind(MetricKind::Sigma);
        let gamma = 0.5;
        let (_, _, rho_nr, _) =
            solve_nonreweight_fixed_point(&moments, &metric, &pop, gamma).unwrap();
        // For linear regression rho_rand = tau^2 Tr(Sigma Sigma^-1 Sigma Sigma^-1)/gamma... with
        // w = 1 the non-reweighting rho at constant score is (1/gamma) tau^2.
        assert!((rho_nr - 1.0 / gamma).abs() < 1e-9, "rho_nr = {rho_nr}");
    }

    #[test]
    fn self_consistency_of_converged_threshold() {
        // Re-scoring and re-thresholding reproduces the same selected set on
        // at least 99.9% of a large evaluation grid.
        let pop = WeightedPopulation::from_law_1d(Law1d::Uniform { xm: 1.0 }, 100_000).unwrap();
        let moments = ConditionalMoments::LinearRegression { tau: 1.0 };
        let metric = EstimationMetric::of_kind(MetricKind::Sigma);
        let (fp, rule, _, _) =
            solve_nonreweight_fixed_point(&moments, &metric, &pop, 0.37).unwrap();
        let q = resolve_metric(&metric, &moments, &pop);
        let score = nonreweight_score(&moments, &q, &fp.h_pi, &fp.g_pi).unwrap();
        let mut agree = 0usize;
        for i in 0..pop.len() {
            let x = pop.point(i);
            let again = if score(x) > fp.lambda_sel { 1.0 } else { 0.0 };
            if (again - rule.pi(x)).abs() < 0.5 {
                agree += 1;
            }
        }
        assert!(agree as f64 >= 0.999 * pop.len() as f64);
    }
}
