//! Selection schemes as scalar functions of the surrogate index
//! v = ⟨θ̂_su, x⟩ = β₀G₀ + β_s G_s ~ N(0, σ_v²).

use crate::domain::loss::phi_second;
use crate::error::{Error, Result};
use crate::numerics::rootfind::bisect_monotone;
use crate::numerics::special::{normal_cdf, normal_quantile};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ScalarSchemeKind {
    /// π ≡ γ (random subsampling).
    Const,
    /// π(v) = min(c·φ''(T(v))^α, 1) with T the clip at ±10. α > 0 upsamples
    /// uncertain points, α < 0 easy points, α = 1/2 ≈ influence sampling.
    AlphaFamily { alpha: f64 },
    /// Keep the γ-fraction with the largest φ''(T(v)) (α → +∞): |v| small.
    TopkHard,
    /// Keep the γ-fraction with the smallest φ''(T(v)) (α → −∞): |v| large.
    TopkEasy,
}

/// A fitted scalar selection rule: kind, target fraction, weighting
/// convention, and the solved normalization. `clip` is the stability clamp
/// T(x) = min(max(x, −clip), clip) applied to the index before scoring.
#[derive(Debug, Clone)]
pub struct ScalarScheme {
    pub kind: ScalarSchemeKind,
    pub gamma: f64,
    pub reweight: bool,
    pub clip: f64,
    /// Cap constant (α-family) or |v| threshold (topK); unused for Const.
    pub c: f64,
}

impl ScalarScheme {
    /// Fit the normalization so E π(V) = γ for V ~ N(0, σ_v²).
    pub fn fit(
        kind: ScalarSchemeKind,
        gamma: f64,
        reweight: bool,
        sigma_v: f64,
    ) -> Result<ScalarScheme> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::invalid("gamma must be in (0,1]"));
        }
        if sigma_v < 0.0 || !sigma_v.is_finite() {
            return Err(Error::invalid("sigma_v must be finite and >= 0"));
        }
        let clip = 10.0;
        let c = match kind {
            ScalarSchemeKind::Const => 0.0,
            ScalarSchemeKind::AlphaFamily { alpha } => {
                if !alpha.is_finite() {
                    return Err(Error::invalid(
                        "alpha must be finite; use TopkHard/TopkEasy for the limits",
                    ));
                }
                if alpha == 0.0 || sigma_v == 0.0 {
                    // Constant score: pi = min(c s0, 1) = gamma.
                    let s0 = phi_second(0.0_f64.clamp(-clip, clip)).powf(alpha);
                    gamma / s0
                } else {
                    // Dense equal-mass grid over V for the monotone c-solve.
                    let k = 200_000;
                    let vs: Vec<f64> = (0..k)
                        .map(|i| sigma_v * normal_quantile((i as f64 + 0.5) / k as f64))
                        .collect();
                    let scores: Vec<f64> = vs
                        .iter()
                        .map(|v| phi_second(v.clamp(-clip, clip)).powf(alpha))
                        .collect();
                    let mean_pi = |c: f64| -> f64 {
                        scores.iter().map(|s| (c * s).min(1.0)).sum::<f64>() / k as f64
                    };
                    let c0 = gamma / (scores.iter().sum::<f64>() / k as f64);
                    bisect_monotone(mean_pi, gamma, 0.0, 2.0 * c0 + 1e-12, 1e-10)?
                }
            }
            ScalarSchemeKind::TopkHard => {
                // phi'' decreasing in |v|: keep |v| <= v_c with P(|V| <= v_c) = gamma.
                if gamma >= 1.0 || sigma_v == 0.0 {
                    f64::INFINITY
                } else {
                    sigma_v * normal_quantile(0.5 * (1.0 + gamma))
                }
            }
            ScalarSchemeKind::TopkEasy => {
                // keep |v| >= v_c with P(|V| >= v_c) = gamma.
                if gamma >= 1.0 || sigma_v == 0.0 {
                    0.0
                } else {
                    sigma_v * normal_quantile(1.0 - 0.5 * gamma)
                }
            }
        };
        Ok(ScalarScheme {
            kind,
            gamma,
            reweight,
            clip,
            c,
        })
    }

    /// Selection probability at surrogate index v.
    pub fn pi(&self, v: f64) -> f64 {
        match self.kind {
            ScalarSchemeKind::Const => self.gamma,
            ScalarSchemeKind::AlphaFamily { alpha } => {
                let s = phi_second(v.clamp(-self.clip, self.clip)).powf(alpha);
                (self.c * s).min(1.0)
            }
            ScalarSchemeKind::TopkHard => {
                if v.abs() <= self.c {
                    1.0
                } else {
                    0.0
                }
            }
            ScalarSchemeKind::TopkEasy => {
                if v.abs() >= self.c {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Kink/jump locations of v ↦ π(v), used to split quadrature panels.
    pub fn breakpoints_v(&self) -> Vec<f64> {
        let mut out = Vec::new();
        match self.kind {
            ScalarSchemeKind::Const => {}
            ScalarSchemeKind::AlphaFamily { alpha } => {
                // Cap boundary: c·phi''(v)^alpha = 1  ⇔  phi''(v) = c^{-1/alpha}.
                if alpha != 0.0 && self.c > 0.0 {
                    let target = self.c.powf(-1.0 / alpha);
                    if target > 0.0 && target < 1.0 {
                        let vstar = (1.0 - target).sqrt().atanh();
                        if vstar.is_finite() && vstar < self.clip {
                            out.push(-vstar);
                            out.push(vstar);
                        }
                    }
                    // The clip itself is a (mild) kink.
                    out.push(-self.clip);
                    out.push(self.clip);
                }
            }
            ScalarSchemeKind::TopkHard | ScalarSchemeKind::TopkEasy => {
                if self.c.is_finite() && self.c > 0.0 {
                    out.push(-self.c);
                    out.push(self.c);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::piecewise_normal_grid;

    fn realized(scheme: &ScalarScheme, sigma_v: f64) -> f64 {
        let breaks: Vec<f64> = scheme
            .breakpoints_v()
            .iter()
            .map(|b| b / sigma_v)
            .collect();
        let grid = piecewise_normal_grid(-12.0, 12.0, &breaks, 40).unwrap();
        grid.expect(|t| scheme.pi(sigma_v * t))
    }

    #[test]
    fn alpha_zero_is_constant_gamma() {
        let s = ScalarScheme::fit(ScalarSchemeKind::AlphaFamily { alpha: 0.0 }, 0.37, false, 1.0)
            .unwrap();
        for v in [-3.0, 0.0, 2.0] {
            assert!((s.pi(v) - 0.37).abs() < 1e-12);
        }
    }

    #[test]
    fn fitted_mass_matches_gamma() {
        for (kind, gamma) in [
            (ScalarSchemeKind::AlphaFamily { alpha: 0.5 }, 0.3),
            (ScalarSchemeKind::AlphaFamily { alpha: 2.0 }, 0.55),
            (ScalarSchemeKind::AlphaFamily { alpha: -1.0 }, 0.4),
            (ScalarSchemeKind::TopkHard, 0.25),
            (ScalarSchemeKind::TopkEasy, 0.6),
        ] {
            let sigma_v = 1.3;
            let s = ScalarScheme::fit(kind, gamma, false, sigma_v).unwrap();
            let got = realized(&s, sigma_v);
            assert!(
                (got - gamma).abs() < 1e-6,
                "{kind:?} gamma {gamma}: realized {got}"
            );
        }
    }

    #[test]
    fn alpha_family_monte_carlo_check() {
        // alpha=0.5, beta0=1, beta_s=0, ||theta0||=2: E pi within 3 SE of a
        // 10^6-sample Monte Carlo.
        let sigma_v = 1.0;
        let gamma = 0.45;
        let s = ScalarScheme::fit(
            ScalarSchemeKind::AlphaFamily { alpha: 0.5 },
            gamma,
            false,
            sigma_v,
        )
        .unwrap();
        let mut rng = crate::domain::rng::Rng::new(123);
        let n = 1_000_000usize;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let p = s.pi(sigma_v * rng.normal());
            sum += p;
            sumsq += p * p;
        }
        let mean = sum / n as f64;
        let se = ((sumsq / n as f64 - mean * mean).max(0.0) / n as f64).sqrt();
        assert!((mean - gamma).abs() < 3.0 * se, "mc {mean} ± {se}");
    }
}
