//! Closed-form excess risk of ridgeless (λ → 0) square-loss regression
//! after non-reweighting selection with a perfect surrogate.
//!
//! With A_π = E[G²π(G)]/γ, B_π = E[GYπ(G)]/γ, C_π = E[Y²π(G)]/γ and
//! δ = δ₀γ the selected samples-per-dimension:
//!
//! ```text
//! δ > 1:  (B₁/A₁ − B_π/A_π)² + (C_π − B_π²/A_π)/(δ − 1)
//! δ < 1:  (B₁/A₁ − B_πδ/(1−δ+A_πδ))² + (B_π²/A_π)·δ(1−δ)/(1−δ+A_πδ)²
//!          + δ/(1−δ)·(C_π − B_π²/A_π)
//! ```
//!
//! in plain squared-error units (least squares above the interpolation
//! threshold, minimum-ℓ₂-norm interpolation below it).

use super::scheme::ScalarScheme;
use crate::domain::kernel::LabelKernel;
use crate::error::{Error, Result};
use crate::numerics::quadrature::piecewise_normal_grid;

/// The six moments entering the closed forms.
#[derive(Debug, Clone, Copy)]
pub struct RidgelessInputs {
    pub a_pi: f64,
    pub b_pi: f64,
    pub c_pi: f64,
    pub a_one: f64,
    pub b_one: f64,
    pub c_one: f64,
}

/// Selected-set moments for a perfect-surrogate scalar scheme.
pub fn ridgeless_inputs(
    kernel: &LabelKernel,
    selection: &ScalarScheme,
    gamma: f64,
) -> Result<RidgelessInputs> {
    let norm0 = kernel.theta0_norm;
    let mut breaks: Vec<f64> = selection.breakpoints_v();
    if norm0 > 0.0 {
        breaks.extend(kernel.breakpoints_z().iter().map(|z| z / norm0));
    }
    let grid = piecewise_normal_grid(-12.0, 12.0, &breaks, 60)?;
    let mut acc = [0.0; 6];
    for (&g, &w) in grid.nodes.iter().zip(&grid.weights) {
        let z = norm0 * g;
        let (m1, m2) = (kernel.m1(z), kernel.m2(z));
        let pi = selection.pi(g);
        acc[0] += w * g * g * pi;
        acc[1] += w * g * m1 * pi;
        acc[2] += w * m2 * pi;
        acc[3] += w * g * g;
        acc[4] += w * g * m1;
        acc[5] += w * m2;
    }
    Ok(RidgelessInputs {
        a_pi: acc[0] / gamma,
        b_pi: acc[1] / gamma,
        c_pi: acc[2] / gamma,
        a_one: acc[3],
        b_one: acc[4],
        c_one: acc[5],
    })
}

/// Asymptotic excess risk of ridgeless regression after selection.
/// `delta0` is the full-sample N/p; the selected ratio is δ = δ₀γ.
pub fn ridgeless_closed_form(
    kernel: &LabelKernel,
    selection: &ScalarScheme,
    delta0: f64,
    gamma: f64,
) -> Result<f64> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::invalid("gamma must be in (0,1]"));
    }
    if !(delta0 > 0.0) {
        return Err(Error::invalid("delta0 must be > 0"));
    }
    let delta = delta0 * gamma;
    if (delta - 1.0).abs() < 1e-3 {
        return Err(Error::invalid(
            "delta = delta0*gamma is at the interpolation pole (within 1e-3 of 1)",
        ));
    }
    let m = ridgeless_inputs(kernel, selection, gamma)?;
    let ratio_full = m.b_one / m.a_one;
    let resid = m.c_pi - m.b_pi * m.b_pi / m.a_pi;
    let excess = if delta > 1.0 {
        let bias = ratio_full - m.b_pi / m.a_pi;
        bias * bias + resid / (delta - 1.0)
    } else {
        let denom = 1.0 - delta + m.a_pi * delta;
        let bias = ratio_full - m.b_pi * delta / denom;
        bias * bias
            + (m.b_pi * m.b_pi / m.a_pi) * delta * (1.0 - delta) / (denom * denom)
            + delta / (1.0 - delta) * resid
    };
    Ok(excess)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::kernel::{DeterministicMap, KernelKind};
    use crate::highdim::scheme::ScalarSchemeKind;

    fn noiseless_linear() -> LabelKernel {
        LabelKernel::new(KernelKind::Deterministic(DeterministicMap::Identity), 1.0).unwrap()
    }

    #[test]
    fn noiseless_interpolation_excess_is_one_minus_delta() {
        // pi ≡ gamma, Y = G, delta = 0.5: A=B=C=1 so excess = (1-δ)² + δ(1-δ) = 1-δ.
        let kernel = noiseless_linear();
        let gamma = 0.5;
        let sel = ScalarScheme::fit(ScalarSchemeKind::Const, gamma, false, 1.0).unwrap();
        let m = ridgeless_inputs(&kernel, &sel, gamma).unwrap();
        for v in [m.a_pi, m.b_pi, m.c_pi, m.a_one, m.b_one, m.c_one] {
            assert!((v - 1.0).abs() < 1e-12, "moment {v}");
        }
        let excess = ridgeless_closed_form(&kernel, &sel, 1.0, gamma).unwrap();
        assert!((excess - 0.5).abs() < 1e-12, "excess {excess}");
    }

    #[test]
    fn random_selection_recovers_ordinary_ridgeless() {
        // For pi ≡ gamma and 20 random noise kernels the formula must agree
        // with ordinary ridgeless regression at the same delta.
        let mut rng = crate::domain::rng::Rng::new(44);
        for _ in 0..20 {
            let tau = 0.2 + rng.uniform();
            let kernel =
                LabelKernel::new(KernelKind::GaussianNoise { tau }, 0.5 + rng.uniform()).unwrap();
            let gamma = 0.3 + 0.6 * rng.uniform();
            let sel = ScalarScheme::fit(ScalarSchemeKind::Const, gamma, false, 1.0).unwrap();
            // delta > 1 branch: excess = (C1 - B1^2/A1)/(delta-1) with
            // C1 - B1^2/A1 = residual variance.
            let delta0 = (1.0 + 3.0 * rng.uniform()) / gamma + 1.0 / gamma; // ensures delta>1
            let delta = delta0 * gamma;
            let got = ridgeless_closed_form(&kernel, &sel, delta0, gamma).unwrap();
            let m = ridgeless_inputs(&kernel, &sel, gamma).unwrap();
            let resid = m.c_one - m.b_one * m.b_one / m.a_one;
            assert!((got - resid / (delta - 1.0)).abs() < 1e-10);
            // delta < 1 branch against the corrected remark formula
            let delta0b = 0.7 / gamma;
            let got_b = ridgeless_closed_form(&kernel, &sel, delta0b, gamma).unwrap();
            let want_b = m.b_one * m.b_one * (1.0 - 0.7) + 0.7 / (1.0 - 0.7) * resid;
            assert!((got_b - want_b).abs() < 1e-10, "{got_b} vs {want_b}");
        }
    }

    #[test]
    fn pole_rejected() {
        let kernel = noiseless_linear();
        let sel = ScalarScheme::fit(ScalarSchemeKind::Const, 0.5, false, 1.0).unwrap();
        assert!(ridgeless_closed_form(&kernel, &sel, 2.0, 0.5).is_err());
    }

    #[test]
    fn full_knowledge_moments_for_noiseless_signal() {
        // Y = G: A1 = B1 = C1 = 1 regardless of pi.
        let kernel = noiseless_linear();
        let sel = ScalarScheme::fit(
            ScalarSchemeKind::AlphaFamily { alpha: 1.0 },
            0.4,
            false,
            1.0,
        )
        .unwrap();
        let m = ridgeless_inputs(&kernel, &sel, 0.4).unwrap();
        assert!((m.b_one / m.a_one - 1.0).abs() < 1e-12);
        assert!((m.c_one - 1.0).abs() < 1e-12);
        // and the residual term C_pi - B_pi^2/A_pi is >= 0
        assert!(m.c_pi - m.b_pi * m.b_pi / m.a_pi >= -1e-12);
    }
}
