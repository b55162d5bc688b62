//! Closed-form one-dimensional comparisons of unbiased vs non-reweighting
//! selection for linear regression with Q = Σ (prediction error).
//!
//! With noise variance τ² and covariate law P_X:
//!
//! ```text
//! ρ_unb = (τ²/γ)·(E|X|)²/E(X²),        valid while the cap is inactive,
//! ρ_nr  = τ²·E(X²)/E(X² 1{|X| ≥ r}),   γ = P(|X| ≥ r).
//! ```

use super::population::Law1d;
use crate::error::{Error, Result};
use crate::numerics::rootfind::bisect_monotone;

#[derive(Debug, Clone, Copy)]
pub struct ClosedForm1d {
    pub rho_unb: f64,
    pub rho_nr: f64,
    pub ratio: f64,
}

/// Evaluate the closed forms at noise variance τ² = 1.
pub fn closed_form_1d(law: Law1d, gamma: f64) -> Result<ClosedForm1d> {
    law.validate()?;
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::invalid("closed_form_1d requires gamma in (0,1)"));
    }
    let (e_abs, e_sq, xm) = match law {
        Law1d::Uniform { xm } => (xm / 2.0, xm * xm / 3.0, xm),
        Law1d::PowerLaw { alpha, xm } => {
            let c = (alpha - 1.0) / (2.0 * (1.0 - xm.powf(1.0 - alpha)));
            let e_abs = 2.0 * c * (1.0 - xm.powf(2.0 - alpha)) / (alpha - 2.0);
            let e_sq = 2.0 * c * (1.0 - xm.powf(3.0 - alpha)) / (alpha - 3.0);
            (e_abs, e_sq, xm)
        }
        Law1d::Gaussian => {
            return Err(Error::invalid(
                "closed_form_1d covers the uniform and power-law examples only",
            ))
        }
    };
    // The displayed rho_unb branch requires the cap pi <= 1 to be inactive,
    // i.e. gamma <= E|X|/X_M.
    if gamma > e_abs / xm + 1e-12 {
        return Err(Error::invalid(format!(
            "gamma {gamma} outside the uncapped validity region (<= {:.6})",
            e_abs / xm
        )));
    }
    let rho_unb = e_abs * e_abs / (gamma * e_sq);

    // r solves P(|X| >= r) = gamma.
    let r = bisect_monotone(|r| law.tail_abs(r), gamma, 0.0, xm, 1e-14)?;
    let e_sq_tail = match law {
        Law1d::Uniform { xm } => (xm * xm * xm - r * r * r) / (3.0 * xm),
        Law1d::PowerLaw { alpha, xm } => {
            let c = (alpha - 1.0) / (2.0 * (1.0 - xm.powf(1.0 - alpha)));
            2.0 * c * (r.powf(3.0 - alpha) - xm.powf(3.0 - alpha)) / (alpha - 3.0)
        }
        Law1d::Gaussian => unreachable!(),
    };
    let rho_nr = e_sq / e_sq_tail;
    Ok(ClosedForm1d {
        rho_unb,
        rho_nr,
        ratio: rho_nr / rho_unb,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_ratio_at_half() {
        // ratio = 4γ/(3(1-(1-γ)^3)) = 16/21 at γ = 1/2.
        let r = closed_form_1d(Law1d::Uniform { xm: 1.0 }, 0.5).unwrap();
        assert!((r.ratio - 16.0 / 21.0).abs() < 1e-12, "ratio {}", r.ratio);
        assert!((r.rho_unb - 1.5).abs() < 1e-12);
        assert!((r.rho_nr - 8.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_small_gamma_limit() {
        // gamma -> 0: ratio -> (E X^2)^2/((E|X|)^2 X_M^2) = 4/9.
        let r = closed_form_1d(Law1d::Uniform { xm: 1.0 }, 1e-6).unwrap();
        assert!((r.ratio - 4.0 / 9.0).abs() < 1e-4, "ratio {}", r.ratio);
    }

    #[test]
    fn powerlaw_thirtyfold_suboptimality() {
        let r = closed_form_1d(
            Law1d::PowerLaw {
                alpha: 4.0,
                xm: 10.0,
            },
            1e-3,
        )
        .unwrap();
        assert!(r.ratio < 1.0 / 30.0, "ratio {}", r.ratio);
    }

    #[test]
    fn validity_region_enforced() {
        // Uniform law: the uncapped branch needs gamma <= 1/2.
        assert!(closed_form_1d(Law1d::Uniform { xm: 1.0 }, 0.6).is_err());
        assert!(closed_form_1d(Law1d::Gaussian, 0.3).is_err());
    }
}
