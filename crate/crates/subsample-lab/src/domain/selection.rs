//! Selection rules: the randomized per-sample multiplier S(x).
//!
//! A simple scheme is the pair (π, w): a sample is kept with probability
//! π(x), and a kept sample enters the empirical risk with weight w(x).
//! Unbiased rules set w = 1/π so E[S(x)|x] = 1; non-reweighting rules set
//! w = 1 and are generally biased.

use super::rng::Rng;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    Random,
    UnbiasedInfluence,
    NonreweightOptimal,
    AlphaFamily,
    TopkHard,
    TopkEasy,
    MinimaxDiscrete,
}

/// Score function over covariate vectors.
pub type ScoreFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Fitted, scheme-specific state.
#[derive(Clone)]
pub enum RuleState {
    /// π ≡ γ.
    Random,
    /// π(x) = min(1, c·√Z(x)); `fill_zero_score` is the π assigned on
    /// Z(x) = 0 atoms when the capped form alone cannot reach E π = γ.
    CappedSqrtScore {
        c: f64,
        score: ScoreFn,
        fill_zero_score: f64,
    },
    /// π(x) = 1{Z(x; π) > λ_sel} with the fitted selected-set matrices.
    Threshold {
        lambda_sel: f64,
        score: ScoreFn,
        h_pi: DMatrix<f64>,
        g_pi: DMatrix<f64>,
    },
    /// π per covariate level (discrete minimax); x is a level index.
    PerLevel { pi: Vec<f64> },
    /// π per dataset row (α-family / topK fitted on a sample).
    PerSample { pi: Vec<f64> },
}

impl std::fmt::Debug for RuleState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RuleState::Random => write!(f, "Random"),
            RuleState::CappedSqrtScore { c, .. } => write!(f, "CappedSqrtScore {{ c: {c} }}"),
            RuleState::Threshold { lambda_sel, .. } => {
                write!(f, "Threshold {{ lambda_sel: {lambda_sel} }}")
            }
            RuleState::PerLevel { pi } => write!(f, "PerLevel {{ k: {} }}", pi.len()),
            RuleState::PerSample { pi } => write!(f, "PerSample {{ n: {} }}", pi.len()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SelectionRule {
    pub kind: SchemeKind,
    pub gamma: f64,
    pub alpha: Option<f64>,
    /// w = 1/π when true, w = 1 when false.
    pub reweight: bool,
    pub state: RuleState,
}

impl SelectionRule {
    pub fn random(gamma: f64, reweight: bool) -> Self {
        SelectionRule {
            kind: SchemeKind::Random,
            gamma,
            alpha: None,
            reweight,
            state: RuleState::Random,
        }
    }

    /// Selection probability at a covariate vector (functional states).
    pub fn pi(&self, x: &[f64]) -> f64 {
        match &self.state {
            RuleState::Random => self.gamma,
            RuleState::CappedSqrtScore {
                c,
                score,
                fill_zero_score,
            } => {
                let z = score(x);
                if z <= 0.0 {
                    *fill_zero_score
                } else {
                    (c * z.sqrt()).min(1.0)
                }
            }
            RuleState::Threshold {
                lambda_sel, score, ..
            } => {
                if score(x) > *lambda_sel {
                    1.0
                } else {
                    0.0
                }
            }
            RuleState::PerLevel { .. } | RuleState::PerSample { .. } => {
                panic!("indexed rule state: use pi_at")
            }
        }
    }

    /// Selection probability at a level / row index (indexed states).
    pub fn pi_at(&self, i: usize) -> f64 {
        match &self.state {
            RuleState::PerLevel { pi } | RuleState::PerSample { pi } => pi[i],
            _ => panic!("functional rule state: use pi(x)"),
        }
    }

    /// Weight attached to a kept sample with selection probability `pi`.
    pub fn weight_for(&self, pi: f64) -> f64 {
        if self.reweight {
            if pi > 0.0 {
                1.0 / pi
            } else {
                0.0
            }
        } else {
            1.0
        }
    }

    /// Draw S(x): w(x) with probability π(x), else 0.
    pub fn sample(&self, x: &[f64], rng: &mut Rng) -> f64 {
        let pi = self.pi(x);
        if rng.uniform() < pi {
            self.weight_for(pi)
        } else {
            0.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampled_multiplier_is_weight_or_zero() {
        // S(x) > 0 implies S(x) = w(x); empirical frequency of S > 0 matches
        // pi within a 3-sigma binomial band over 10^4 draws.
        let score: ScoreFn = Arc::new(|x: &[f64]| x[0] * x[0]);
        let rule = SelectionRule {
            kind: SchemeKind::UnbiasedInfluence,
            gamma: 0.4,
            alpha: None,
            reweight: true,
            state: RuleState::CappedSqrtScore {
                c: 0.8,
                score,
                fill_zero_score: 0.0,
            },
        };
        let x = [0.7];
        let pi = rule.pi(&x);
        assert!((pi - (0.8f64 * 0.7).min(1.0)).abs() < 1e-12);
        let w = rule.weight_for(pi);
        let mut rng = Rng::new(21);
        let n = 10_000;
        let mut kept = 0usize;
        for _ in 0..n {
            let s = rule.sample(&x, &mut rng);
            if s > 0.0 {
                assert_eq!(s, w);
                kept += 1;
            } else {
                assert_eq!(s, 0.0);
            }
        }
        let freq = kept as f64 / n as f64;
        let sigma = (pi * (1.0 - pi) / n as f64).sqrt();
        assert!((freq - pi).abs() < 3.0 * sigma, "freq {freq} vs pi {pi}");
        // Unbiasedness: pi * w = 1 for reweighted rules.
        assert!((pi * w - 1.0).abs() < 1e-12);
    }
}
