//! Scalar proximal step for convex losses.
//!
//! Solves `min_u [ w·L(a+u, y) + (μ/2)(g − u)² ]`, the inner minimization of
//! the saddle-point Lagrangian. The caller pre-scales `g` (it is `α⊥·G⊥` in
//! the Lagrangian). Square loss has a closed form; logistic uses a damped
//! Newton iteration on the scalar stationarity condition.

use crate::domain::loss::LossKind;
use crate::error::{Error, Result};

/// Result of the scalar prox: the minimizer and the attained value.
#[derive(Debug, Clone, Copy)]
pub struct ProxResult {
    pub u: f64,
    pub value: f64,
}

/// `min_u [ L(a+u, y) + (μ/2)(g − u)² ]` with unit loss weight.
pub fn prox_loss(loss: LossKind, a: f64, y: f64, g: f64, mu: f64) -> Result<ProxResult> {
    prox_loss_weighted(loss, 1.0, a, y, g, mu)
}

/// Weighted variant: `min_u [ w·L(a+u, y) + (μ/2)(g − u)² ]`, `w > 0`.
pub fn prox_loss_weighted(
    loss: LossKind,
    w: f64,
    a: f64,
    y: f64,
    g: f64,
    mu: f64,
) -> Result<ProxResult> {
    if mu <= 0.0 {
        return Err(Error::invalid("prox requires mu > 0"));
    }
    match loss {
        LossKind::Square => {
            // Stationarity of w(y-a-u)^2/2 + mu(u-g)^2/2.
            let u = (w * (y - a) + mu * g) / (w + mu);
            let r = y - a - u;
            let value = 0.5 * w * r * r + 0.5 * mu * (u - g) * (u - g);
            Ok(ProxResult { u, value })
        }
        LossKind::Logistic => {
            // phi(t) = log(e^t + e^{-t}); L(z,y) = -yz + phi(z).
            // f'(u) = w(tanh(a+u) - y) + mu(u - g) is strictly increasing, so a
            // bracketed Newton (bisection safeguard, step halving) always lands.
            let fp = |u: f64| w * ((a + u).tanh() - y) + mu * (u - g);
            let tol = 1e-10 * (1.0 + mu.abs()).max(w);
            // Bracket the root. For y = +1, f'(g) <= 0; for y = -1, f'(g) >= 0.
            let (mut lo, mut hi) = if fp(g) <= 0.0 {
                let mut hi = g + 1.0;
                let mut span = 1.0;
                for _ in 0..200 {
                    if fp(hi) > 0.0 {
                        break;
                    }
                    span *= 2.0;
                    hi += span;
                }
                (g, hi)
            } else {
                let mut lo = g - 1.0;
                let mut span = 1.0;
                for _ in 0..200 {
                    if fp(lo) < 0.0 {
                        break;
                    }
                    span *= 2.0;
                    lo -= span;
                }
                (lo, g)
            };
            let mut u = 0.5 * (lo + hi);
            let mut converged = false;
            for _ in 0..100 {
                let grad = fp(u);
                if grad.abs() <= tol {
                    converged = true;
                    break;
                }
                if grad > 0.0 {
                    hi = u;
                } else {
                    lo = u;
                }
                let t = (a + u).tanh();
                let curv = w * (1.0 - t * t) + mu;
                let newton = u - grad / curv;
                // Keep the iterate inside the bracket (max 50 halvings).
                let mut next = newton;
                let mut halvings = 0;
                while !(next > lo && next < hi) && halvings < 50 {
                    next = 0.5 * (u + next);
                    halvings += 1;
                }
                if !(next > lo && next < hi) {
                    next = 0.5 * (lo + hi);
                }
                u = next;
            }
            if !converged {
                // Pure bisection finish.
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if fp(mid) > 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                    if hi - lo < 1e-14 * (1.0 + u.abs()) {
                        break;
                    }
                }
                u = 0.5 * (lo + hi);
                if fp(u).abs() > 1e-6 * (1.0 + mu.abs()).max(w) {
                    return Err(Error::NonConvergence {
                        what: "logistic prox Newton".into(),
                        iterations: 300,
                        residual: fp(u).abs(),
                    });
                }
            }
            let value = w * logistic_loss(a + u, y) + 0.5 * mu * (u - g) * (u - g);
            Ok(ProxResult { u, value })
        }
    }
}

/// `L(z, y) = -yz + log(e^z + e^{-z})`, evaluated overflow-safely.
#[inline]
pub fn logistic_loss(z: f64, y: f64) -> f64 {
    -y * z + log_cosh_plus_log2(z)
}

/// `log(e^z + e^{-z}) = |z| + log(1 + e^{-2|z|})`.
#[inline]
pub fn log_cosh_plus_log2(z: f64) -> f64 {
    let az = z.abs();
    az + (-2.0 * az).exp().ln_1p()
}
