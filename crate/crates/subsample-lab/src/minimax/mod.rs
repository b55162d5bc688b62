//! Worst-case data selection against an imperfect surrogate, for discrete
//! covariates taking k levels.
//!
//! Labels are Bernoulli with P(y=1|x=ℓ) = θ_ℓ, estimated by log-loss ERM,
//! and the error is ‖θ̂−θ‖²_Q with diagonal Q. For a non-reweighting scheme
//! with per-level probabilities π the asymptotic error coefficient is
//!
//! ```text
//! ρ(π; θ, Q) = Σ_ℓ θ_ℓ(1−θ_ℓ) q_ℓ / (π_ℓ p_ℓ).
//! ```
//!
//! The surrogate is only trusted up to a per-coordinate box of radius ε, and
//! the minimax-optimal scheme samples proportionally to the square root of
//! the *worst-case* uncertainty in the box rather than the plugin one.

use crate::domain::selection::{RuleState, SchemeKind, SelectionRule};
use crate::error::{Error, Result};
use crate::numerics::rootfind::bisect_monotone;

/// Problem instance for the discrete-covariate minimax example.
#[derive(Debug, Clone)]
pub struct DiscreteMinimaxSpec {
    /// Level probabilities p_ℓ (sum to 1).
    pub p_x: Vec<f64>,
    /// Positive metric weights q_ℓ.
    pub q_x: Vec<f64>,
    /// Surrogate success probabilities in [0,1].
    pub theta_su: Vec<f64>,
    /// Box radius ε ≥ 0.
    pub eps: f64,
    /// Target subsampling fraction.
    pub gamma: f64,
}

impl DiscreteMinimaxSpec {
    pub fn validate(&self) -> Result<()> {
        let k = self.p_x.len();
        if k == 0 || self.q_x.len() != k || self.theta_su.len() != k {
            return Err(Error::invalid("minimax spec arrays must share length k >= 1"));
        }
        let total: f64 = self.p_x.iter().sum();
        if (total - 1.0).abs() > 1e-10 || self.p_x.iter().any(|p| *p <= 0.0) {
            return Err(Error::invalid("p_x must be positive and sum to 1"));
        }
        if self.q_x.iter().any(|q| *q <= 0.0) {
            return Err(Error::invalid("q_x must be positive"));
        }
        if self.theta_su.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(Error::invalid("theta_su must lie in [0,1]"));
        }
        if self.eps < 0.0 {
            return Err(Error::invalid("eps must be >= 0"));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::invalid("gamma must be in (0,1]"));
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.p_x.len()
    }

    /// The box [θ_su−ε, θ_su+ε] ∩ [0,1] at coordinate ℓ.
    pub fn box_at(&self, l: usize) -> (f64, f64) {
        (
            (self.theta_su[l] - self.eps).max(0.0),
            (self.theta_su[l] + self.eps).min(1.0),
        )
    }
}

/// ρ(π; θ, Q) = Σ θ(1−θ)q/(πp).
pub fn rho_discrete(spec: &DiscreteMinimaxSpec, pi: &[f64], theta: &[f64]) -> f64 {
    (0..spec.k())
        .map(|l| {
            let u = theta[l] * (1.0 - theta[l]);
            if u == 0.0 {
                return 0.0;
            }
            u * spec.q_x[l] / (pi[l].max(1e-300) * spec.p_x[l])
        })
        .sum()
}

/// Solve for c(γ): Σ_ℓ min(c√(q_ℓ θ_ℓ(1−θ_ℓ)), p_ℓ) = γ.
fn solve_cap_constant(spec: &DiscreteMinimaxSpec, theta: &[f64]) -> Result<f64> {
    let s: Vec<f64> = (0..spec.k())
        .map(|l| (spec.q_x[l] * theta[l] * (1.0 - theta[l])).max(0.0).sqrt())
        .collect();
    if s.iter().all(|v| *v <= 0.0) {
        if spec.gamma > 0.0 {
            return Err(Error::invalid(
                "all label uncertainties are zero: no scheme attains gamma > 0",
            ));
        }
        return Ok(0.0);
    }
    let f = |c: f64| -> f64 {
        (0..spec.k())
            .map(|l| (c * s[l]).min(spec.p_x[l]))
            .sum::<f64>()
    };
    // Start from the all-uncapped guess c = gamma / sum s.
    let c0 = spec.gamma / s.iter().sum::<f64>();
    bisect_monotone(f, spec.gamma, 0.0, 2.0 * c0, 1e-12)
}

/// Per-coordinate worst-case parameter: maximize
/// `max(√(q θ(1−θ))/c, (q/p)θ(1−θ))` over the box, jointly with c(γ) by
/// alternation. Both branches increase in θ(1−θ), so each coordinate's
/// maximizer is the box point closest to 1/2; the alternation settles c.
pub fn solve_theta_mm(spec: &DiscreteMinimaxSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let k = spec.k();
    let mut theta = spec.theta_su.clone();
    let mut prev = theta.clone();
    for iter in 0..50 {
        // c(γ) for the current θ (enters the objective but not, in this
        // separable box case, the per-coordinate argmax).
        let _c = solve_cap_constant(spec, &theta)?;
        for l in 0..k {
            let (lo, hi) = spec.box_at(l);
            theta[l] = if lo > 0.5 {
                lo
            } else if hi < 0.5 {
                hi
            } else {
                0.5
            };
        }
        let change = theta
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if iter > 0 && change < 1e-10 {
            return Ok(theta);
        }
        prev = theta.clone();
    }
    Err(Error::NonConvergence {
        what: "theta_MM alternation".into(),
        iterations: 50,
        residual: f64::NAN,
    })
}

/// The minimax selection probabilities
/// π_ℓ = min(c(γ)/p_ℓ · √(q_ℓ θ_ℓ(1−θ_ℓ)), 1).
pub fn minimax_pi(spec: &DiscreteMinimaxSpec, theta_mm: &[f64]) -> Result<SelectionRule> {
    spec.validate()?;
    if theta_mm.len() != spec.k() || theta_mm.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(Error::invalid("theta_MM must lie in [0,1]^k"));
    }
    let c = solve_cap_constant(spec, theta_mm)?;
    let pi: Vec<f64> = (0..spec.k())
        .map(|l| {
            let u = (spec.q_x[l] * theta_mm[l] * (1.0 - theta_mm[l])).max(0.0);
            ((c / spec.p_x[l]) * u.sqrt()).min(1.0)
        })
        .collect();
    Ok(SelectionRule {
        kind: SchemeKind::MinimaxDiscrete,
        gamma: spec.gamma,
        alpha: None,
        reweight: false,
        state: RuleState::PerLevel { pi },
    })
}

/// Plugin probabilities built from the surrogate θ_su itself.
pub fn plugin_pi(spec: &DiscreteMinimaxSpec) -> Result<SelectionRule> {
    let mut plug = spec.clone();
    plug.eps = 0.0;
    let rule = minimax_pi(&plug, &spec.theta_su)?;
    Ok(rule)
}

/// Worst-case ρ over the box for fixed π (the per-coordinate supremum is
/// attained at the box point closest to 1/2, independently across levels).
pub fn worst_case_rho(spec: &DiscreteMinimaxSpec, pi: &[f64]) -> f64 {
    let theta_worst: Vec<f64> = (0..spec.k())
        .map(|l| {
            let (lo, hi) = spec.box_at(l);
            if lo > 0.5 {
                lo
            } else if hi < 0.5 {
                hi
            } else {
                0.5
            }
        })
        .collect();
    rho_discrete(spec, pi, &theta_worst)
}
