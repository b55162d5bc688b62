//! The asymptotic error coefficient ρ(S;Q) and optimal unbiased schemes.

use super::moments::ConditionalMoments;
use super::population::WeightedPopulation;
use crate::domain::metric::{EstimationMetric, MetricKind};
use crate::domain::selection::{RuleState, SchemeKind, ScoreFn, SelectionRule};
use crate::error::{Error, Result};
use crate::numerics::psd::{min_eigenvalue, sym_inverse};
use crate::numerics::rootfind::bisect_monotone;
use nalgebra::DMatrix;
use std::sync::Arc;

/// ρ(S;Q) together with the matrices it was assembled from.
#[derive(Debug, Clone)]
pub struct AsymptoticCoefficient {
    pub rho: f64,
    pub g_s: DMatrix<f64>,
    pub h_s: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub gamma: f64,
    pub scheme_kind: SchemeKind,
    /// E S² / (E S)², the variance inflation factor.
    pub s2_over_s1_sq: f64,
}

impl AsymptoticCoefficient {
    /// Recompute ρ from the stored matrices (the defining identity).
    pub fn recompute(&self) -> f64 {
        let h_inv = sym_inverse(&self.h_s).expect("stored H_S is positive definite");
        self.s2_over_s1_sq * (&self.g_s * &h_inv * &self.q * &h_inv).trace()
    }
}

/// Resolve a metric kind into its matrix for a concrete population.
pub fn resolve_metric(
    metric: &EstimationMetric,
    moments: &ConditionalMoments,
    pop: &WeightedPopulation,
) -> DMatrix<f64> {
    if let Some(q) = &metric.q {
        return q.clone();
    }
    match metric.kind {
        MetricKind::Identity => DMatrix::identity(pop.dim(), pop.dim()),
        MetricKind::Sigma => pop.sigma(),
        MetricKind::Hessian => moments.h_matrix(pop),
    }
}

/// ρ for an explicit per-point inclusion-probability vector `pi` and weight
/// map (w = 1/π for unbiased rules, w = 1 otherwise). Expectations are exact
/// sums over the population grid.
pub fn rho_from_pi(
    moments: &ConditionalMoments,
    pi: &[f64],
    reweight: bool,
    q: &DMatrix<f64>,
    pop: &WeightedPopulation,
    gamma: f64,
    scheme_kind: SchemeKind,
) -> Result<AsymptoticCoefficient> {
    if pi.len() != pop.len() {
        return Err(Error::invalid("pi vector must align with the population"));
    }
    let p = pop.dim();
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    let mut g_acc = DMatrix::<f64>::zeros(p, p);
    let mut h_acc = DMatrix::<f64>::zeros(p, p);
    for i in 0..pop.len() {
        let pi_i = pi[i];
        if pi_i <= 0.0 {
            continue;
        }
        let w = if reweight { 1.0 / pi_i } else { 1.0 };
        let om = pop.weight(i);
        let x = pop.point(i);
        let es = om * pi_i * w;
        let es2 = om * pi_i * w * w;
        s1 += es;
        s2 += es2;
        rank_one_update(&mut g_acc, x, es2 * moments.g_scalar(x));
        rank_one_update(&mut h_acc, x, es * moments.h_scalar(x));
    }
    if s1 <= 0.0 {
        return Err(Error::invalid("scheme selects nothing: E S = 0"));
    }
    let g_s = g_acc / s2;
    let h_s = h_acc / s1;
    if min_eigenvalue(&h_s) <= 1e-10 {
        return Err(Error::SingularMatrix {
            min_eig: min_eigenvalue(&h_s),
            floor: 1e-10,
        });
    }
    let h_inv = sym_inverse(&h_s)?;
    let s2_over_s1_sq = s2 / (s1 * s1);
    let rho = s2_over_s1_sq * (&g_s * &h_inv * q * &h_inv).trace();
    Ok(AsymptoticCoefficient {
        rho,
        g_s,
        h_s,
        q: q.clone(),
        gamma,
        scheme_kind,
        s2_over_s1_sq,
    })
}

/// ρ(S;Q) for a fitted selection rule evaluated over the population.
pub fn rho_coefficient(
    moments: &ConditionalMoments,
    rule: &SelectionRule,
    metric: &EstimationMetric,
    pop: &WeightedPopulation,
) -> Result<AsymptoticCoefficient> {
    let q = resolve_metric(metric, moments, pop);
    let pi: Vec<f64> = match &rule.state {
        RuleState::PerSample { pi } | RuleState::PerLevel { pi } => pi.clone(),
        _ => (0..pop.len()).map(|i| rule.pi(pop.point(i))).collect(),
    };
    rho_from_pi(moments, &pi, rule.reweight, &q, pop, rule.gamma, rule.kind)
}

/// The optimal-unbiased score Z(x) = Tr(G(x) H⁻¹QH⁻¹) = g(x)·⟨x, H⁻¹QH⁻¹ x⟩.
pub fn unbiased_score(
    moments: &ConditionalMoments,
    metric: &EstimationMetric,
    pop: &WeightedPopulation,
) -> Result<ScoreFn> {
    let q = resolve_metric(metric, moments, pop);
    let h = moments.h_matrix(pop);
    if min_eigenvalue(&h) <= 1e-10 {
        return Err(Error::SingularMatrix {
            min_eig: min_eigenvalue(&h),
            floor: 1e-10,
        });
    }
    let h_inv = sym_inverse(&h)?;
    let a = &h_inv * &q * &h_inv;
    let moments = moments.clone();
    Ok(Arc::new(move |x: &[f64]| {
        moments.g_scalar(x) * quad_form(&a, x)
    }))
}

/// Influence-function sampling rate: E{‖ψ(x,y)‖²_Q | x}^{1/2} = √Z(x).
pub fn influence_score(
    moments: &ConditionalMoments,
    metric: &EstimationMetric,
    pop: &WeightedPopulation,
) -> Result<ScoreFn> {
    let z = unbiased_score(moments, metric, pop)?;
    Ok(Arc::new(move |x: &[f64]| z(x).max(0.0).sqrt()))
}

/// Optimal unbiased scheme: π(x) = min(1, c·√Z(x)) with c solved so
/// E π = γ, w = 1/π; returns the fitted rule and ρ_unb = E max(√Z/c, Z).
pub fn optimal_unbiased_pi(
    moments: &ConditionalMoments,
    metric: &EstimationMetric,
    pop: &WeightedPopulation,
    gamma: f64,
) -> Result<(SelectionRule, f64)> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::invalid("gamma must be in (0, 1]"));
    }
    let score = unbiased_score(moments, metric, pop)?;
    let z: Vec<f64> = (0..pop.len()).map(|i| score(pop.point(i))).collect();
    let mass_pos: f64 = (0..pop.len())
        .filter(|&i| z[i] > 0.0)
        .map(|i| pop.weight(i))
        .sum();
    if mass_pos <= 0.0 {
        return Err(Error::BracketFailure {
            context: "optimal unbiased scheme: score Z is identically zero".into(),
            expansions: 0,
        });
    }
    // Mass the capped form can reach is mass_pos; any shortfall is filled on
    // the Z = 0 atoms (their weight w = 1/π contributes nothing to ρ).
    let fill_zero_score = if gamma > mass_pos {
        (gamma - mass_pos) / (1.0 - mass_pos)
    } else {
        0.0
    };
    let target = gamma.min(mass_pos);
    let expect_pi = |c: f64| -> f64 {
        (0..pop.len())
            .map(|i| {
                if z[i] > 0.0 {
                    pop.weight(i) * (c * z[i].sqrt()).min(1.0)
                } else {
                    0.0
                }
            })
            .sum()
    };
    let z_mean_sqrt: f64 = (0..pop.len())
        .map(|i| pop.weight(i) * z[i].max(0.0).sqrt())
        .sum();
    let c0 = target / z_mean_sqrt.max(1e-300);
    let c = bisect_monotone(expect_pi, target, 0.0, 2.0 * c0 + 1e-12, 1e-8 * gamma.min(1.0))?;
    let rho_unb: f64 = (0..pop.len())
        .map(|i| {
            if z[i] > 0.0 {
                pop.weight(i) * (z[i].sqrt() / c).max(z[i])
            } else {
                0.0
            }
        })
        .sum();
    let rule = SelectionRule {
        kind: SchemeKind::UnbiasedInfluence,
        gamma,
        alpha: None,
        reweight: true,
        state: RuleState::CappedSqrtScore {
            c,
            score,
            fill_zero_score,
        },
    };
    Ok((rule, rho_unb))
}

#[inline]
pub(crate) fn quad_form(a: &DMatrix<f64>, x: &[f64]) -> f64 {
    let p = x.len();
    let mut total = 0.0;
    for i in 0..p {
        let mut row = 0.0;
        for j in 0..p {
            row += a[(i, j)] * x[j];
        }
        total += x[i] * row;
    }
    total
}

#[inline]
pub(crate) fn rank_one_update(m: &mut DMatrix<f64>, x: &[f64], c: f64) {
    if c == 0.0 {
        return;
    }
    let p = x.len();
    for a in 0..p {
        let ca = c * x[a];
        for b in 0..p {
            m[(a, b)] += ca * x[b];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::metric::EstimationMetric;
    use crate::lowdim::population::Law1d;

    fn unif_pop() -> WeightedPopulation {
        WeightedPopulation::from_law_1d(Law1d::Uniform { xm: 1.0 }, 20_000).unwrap()
    }

    #[test]
    fn random_scheme_rho_is_inverse_gamma() {
        // 1-d linear regression, X ~ Unif[-1,1], tau = 1, Q = Sigma:
        // rho_rand = E(Z)/gamma with Z = x^2/Sigma, E Z = 1.
        let pop = unif_pop();
        let moments = ConditionalMoments::LinearRegression { tau: 1.0 };
        let metric = EstimationMetric::of_kind(MetricKind::Sigma);
        for gamma in [0.25, 0.5, 1.0] {
            let rule = SelectionRule::random(gamma, true);
            let coef = rho_coefficient(&moments, &rule, &metric, &pop).unwrap();
            assert!(
                (coef.rho - 1.0 / gamma).abs() < 1e-9,
                "gamma={gamma}: {}",
                coef.rho
            );
            assert!((coef.recompute() - coef.rho).abs() < 1e-10);
        }
    }

    #[test]
    fn full_sample_rho_is_population_trace() {
        // gamma = 1, pi = w = 1: rho = Tr(G H^-1 Q H^-1).
        let pop = unif_pop();
        let moments = ConditionalMoments::LinearRegression { tau: 1.3 };
        let metric = EstimationMetric::of_kind(MetricKind::Sigma);
        let rule = SelectionRule::random(1.0, false);
        let coef = rho_coefficient(&moments, &rule, &metric, &pop).unwrap();
        // G = tau^2 Sigma, H = Sigma, Q = Sigma: trace = tau^2.
        assert!((coef.rho - 1.69).abs() < 1e-9);
    }

    #[test]
    fn leverage_score_for_isotropic_linear_regression() {
        // Sigma = I, Q = Sigma, tau = 1: Z(x) = ||x||^2.
        let pop = WeightedPopulation::gaussian_qmc(3, 30_000, 5).unwrap();
        let moments = ConditionalMoments::LinearRegression { tau: 1.0 };
        let metric =
            EstimationMetric::explicit(MetricKind::Sigma, DMatrix::identity(3, 3)).unwrap();
        let z = unbiased_score(&moments, &metric, &pop).unwrap();
        // The population Sigma is only QMC-close to I, so compare loosely.
        let x = [0.5, -1.0, 2.0];
        let want = 0.25 + 1.0 + 4.0;
        assert!((z(&x) - want).abs() < 0.05, "{} vs {want}", z(&x));
        assert_eq!(z(&[0.0, 0.0, 0.0]), 0.0);
        // influence score is sqrt(Z)
        let inf = influence_score(&moments, &metric, &pop).unwrap();
        assert!((inf(&x) - z(&x).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn unbiased_constant_score_equals_random() {
        // On a constant-Z population the optimal unbiased scheme is random
        // subsampling: rho_unb = rho_rand exactly.
        let pop = WeightedPopulation::discrete(
            vec![vec![1.0], vec![-1.0]],
            vec![0.5, 0.5],
        )
        .unwrap();
        let moments = ConditionalMoments::LinearRegression { tau: 1.0 };
        let metric = EstimationMetric::of_kind(MetricKind::Sigma);
        let gamma = 0.4;
        let (_, rho_unb) = optimal_unbiased_pi(&moments, &metric, &pop, gamma).unwrap();
        let rand_rule = SelectionRule::random(gamma, true);
        let rho_rand = rho_coefficient(&moments, &rand_rule, &metric, &pop)
            .unwrap()
            .rho;
        assert!((rho_unb - rho_rand).abs() < 1e-10);
    }

    #[test]
    fn uniform_closed_form_rho_unb() {
        // X ~ Unif[-1,1], tau=1, Q=Sigma, gamma=0.5: rho_unb = 3/(4 gamma).
        let pop = unif_pop();
        let moments = ConditionalMoments::LinearRegression { tau: 1.0 };
        let metric = EstimationMetric::of_kind(MetricKind::Sigma);
        let (rule, rho_unb) = optimal_unbiased_pi(&moments, &metric, &pop, 0.5).unwrap();
        assert!((rho_unb - 1.5).abs() < 1e-6, "rho_unb = {rho_unb}");
        // gamma = 1 gives pi = 1 and rho = E Z.
        let (rule1, rho1) = optimal_unbiased_pi(&moments, &metric, &pop, 1.0).unwrap();
        // E Z = tau^2 E X^2 / Sigma = 1.
        assert!((rho1 - 1.0).abs() < 1e-8);
        assert!((rule1.pi(&[0.3]) - 1.0).abs() < 1e-9);
        let _ = rule;
    }
}
