//! Assembling and evaluating the saddle-point Lagrangian.
//!
//! The expectation over (G₀, G_s, G⊥, Y) tensorizes: the plane spanned by
//! (G₀, G_s) is integrated on a grid whose panels are split wherever the
//! integrand kinks (the selection cap/threshold in the surrogate direction,
//! label-kernel jumps in the θ₀ direction), the label expectation is an
//! exact two-atom sum for binary kernels (or an analytic moment identity for
//! square loss), and the G⊥ axis is Gauss–Hermite for logistic loss and
//! analytic for square loss. The Bernoulli selection randomness is always
//! integrated analytically:
//!
//! ```text
//! E_S min_u [S·L + (μ/2)(b−u)²] = π·min_u [w·L + (μ/2)(b−u)²]
//! ```
//!
//! (the unselected branch attains 0 at u = b), and for unbiased rules
//! (w = 1/π) the right-hand side equals min_u [L + (μπ/2)(b−u)²], which is
//! the numerically stable form used here.

use super::spec::SaddleSpec;
use crate::domain::loss::LossKind;
use crate::error::Result;
use crate::numerics::prox::prox_loss_weighted;
use crate::numerics::quadrature::{gauss_hermite, gauss_legendre, piecewise_normal_grid};
use crate::numerics::special::normal_pdf;

/// One integration node in the (G₀, G_s) plane, with the label law
/// pre-evaluated at z = ‖θ₀‖·g0.
#[derive(Debug, Clone, Copy)]
struct PlaneNode {
    g0: f64,
    gs: f64,
    weight: f64,
    /// Surrogate index β₀g0 + β_s gs.
    v: f64,
    /// Conditional label moments at this node.
    m1: f64,
    m2: f64,
    /// P(y = +1 | z) for binary kernels (unused otherwise).
    p_plus: f64,
}

/// A reusable Lagrangian evaluator for one spec.
pub struct LagrangianEvaluator {
    spec: SaddleSpec,
    nodes: Vec<PlaneNode>,
    /// Gauss–Hermite grid for G⊥ (logistic loss only).
    gperp: Vec<(f64, f64)>,
    binary: bool,
    /// Whether α_s is structurally zero (β_s = 0 and the caller pinned it).
    pub pinned_alpha_s: bool,
}

impl LagrangianEvaluator {
    pub fn new(spec: &SaddleSpec, pin_alpha_s: bool) -> Result<Self> {
        spec.validate()?;
        let pin = pin_alpha_s && spec.beta_s == 0.0;
        let nodes = build_plane(spec, pin)?;
        let gh = gauss_hermite(spec.quad.main)?;
        let gperp = gh.nodes.iter().copied().zip(gh.weights.iter().copied()).collect();
        Ok(LagrangianEvaluator {
            spec: spec.clone(),
            nodes,
            gperp,
            binary: spec.kernel.is_binary(),
            pinned_alpha_s: pin,
        })
    }

    pub fn spec(&self) -> &SaddleSpec {
        &self.spec
    }

    /// ℒ(α, μ) for α = (α₀, α_s, α⊥), μ ≥ 0.
    pub fn eval(&self, alpha: [f64; 3], mu: f64) -> f64 {
        let [a0, as_, aperp] = alpha;
        let lambda = self.spec.lambda;
        let ridge = 0.5 * lambda * (a0 * a0 + as_ * as_ + aperp * aperp);
        if mu <= 0.0 {
            // min_u of the loss term alone is 0 for both square and logistic,
            // and the quadratic coupling vanishes: the slice limit is the ridge.
            return ridge;
        }
        let reweight = self.spec.selection.reweight;
        let mut acc = 0.0;
        match self.spec.loss.kind {
            LossKind::Square => {
                // E_{Y,G⊥} of the prox value is analytic:
                // coef(π,μ)·[m2 − 2a·m1 + a² + α⊥²].
                for n in &self.nodes {
                    let pi = self.spec.selection.pi(n.v);
                    if pi <= 0.0 {
                        continue;
                    }
                    let coef = if reweight {
                        let mp = mu * pi;
                        0.5 * mp / (1.0 + mp)
                    } else {
                        pi * 0.5 * mu / (1.0 + mu)
                    };
                    let a = a0 * n.g0 + as_ * n.gs;
                    let msq = n.m2 - 2.0 * a * n.m1 + a * a + aperp * aperp;
                    acc += n.weight * coef * msq;
                }
            }
            LossKind::Logistic => {
                debug_assert!(self.binary);
                for n in &self.nodes {
                    let pi = self.spec.selection.pi(n.v);
                    if pi <= 0.0 {
                        continue;
                    }
                    let (mu_eff, outer) = if reweight { (mu * pi, 1.0) } else { (mu, pi) };
                    if mu_eff <= 1e-300 {
                        continue;
                    }
                    let a = a0 * n.g0 + as_ * n.gs;
                    let mut node_val = 0.0;
                    for &(gp, wp) in &self.gperp {
                        let b = aperp * gp;
                        let vp = prox_loss_weighted(LossKind::Logistic, 1.0, a, 1.0, b, mu_eff)
                            .expect("prox converges")
                            .value;
                        let vm = prox_loss_weighted(LossKind::Logistic, 1.0, a, -1.0, b, mu_eff)
                            .expect("prox converges")
                            .value;
                        node_val += wp * (n.p_plus * vp + (1.0 - n.p_plus) * vm);
                    }
                    acc += n.weight * outer * node_val;
                }
            }
        }
        ridge - 0.5 * mu * aperp * aperp / self.spec.delta0 + acc
    }

    /// max over μ ≥ 0 of the concave slice μ ↦ ℒ(α, μ). Returns
    /// (μ*, value, flat) where `flat` flags a boundary maximum at μ = 0
    /// indistinguishable from the interior search.
    pub fn mu_max(&self, alpha: [f64; 3], hint: Option<f64>) -> (f64, f64, bool) {
        let at_zero = self.eval(alpha, 0.0);
        let hi0 = match hint {
            Some(h) if h > 1e-6 => (3.0 * h).max(1.0),
            _ => 10.0,
        };
        let (mu_star, val) =
            crate::numerics::rootfind::maximize_concave_scalar(|m| self.eval(alpha, m), 0.0, hi0, 1e-6);
        if at_zero >= val {
            let flat = (at_zero - val).abs() <= 1e-12 * (1.0 + at_zero.abs());
            (0.0, at_zero, flat)
        } else {
            (mu_star, val, false)
        }
    }

    /// E π(V), the realized subsampling fraction (Bernoulli mass only).
    pub fn realized_gamma(&self) -> f64 {
        self.nodes
            .iter()
            .map(|n| n.weight * self.spec.selection.pi(n.v))
            .sum()
    }
}

/// Assemble the (G₀, G_s) plane nodes.
fn build_plane(spec: &SaddleSpec, pin: bool) -> Result<Vec<PlaneNode>> {
    let lim = 12.0;
    let norm0 = spec.kernel.theta0_norm;
    let sel_breaks = spec.selection.breakpoints_v();
    let kernel_breaks = spec.kernel.breakpoints_z();
    let sigma_v = spec.sigma_v();
    let mut nodes = Vec::new();

    let fill = |nodes: &mut Vec<PlaneNode>, g0: f64, gs: f64, weight: f64| {
        let z = norm0 * g0;
        let (m1, m2) = (spec.kernel.m1(z), spec.kernel.m2(z));
        let p_plus = if spec.kernel.is_binary() {
            spec.kernel.p_plus(z)
        } else {
            0.0
        };
        nodes.push(PlaneNode {
            g0,
            gs,
            weight,
            v: spec.beta0 * g0 + spec.beta_s * gs,
            m1,
            m2,
            p_plus,
        });
    };

    if spec.beta_s == 0.0 {
        // Selection and labels both live on the G₀ axis.
        let mut breaks: Vec<f64> = Vec::new();
        if spec.beta0 != 0.0 {
            breaks.extend(sel_breaks.iter().map(|b| b / spec.beta0));
        }
        if norm0 > 0.0 {
            breaks.extend(kernel_breaks.iter().map(|z| z / norm0));
        }
        let g0_grid = piecewise_normal_grid(-lim, lim, &breaks, spec.quad.panel)?;
        if pin {
            for (&g0, &w) in g0_grid.nodes.iter().zip(&g0_grid.weights) {
                fill(&mut nodes, g0, 0.0, w);
            }
        } else {
            let gh = gauss_hermite(spec.quad.main)?;
            for (&g0, &w0) in g0_grid.nodes.iter().zip(&g0_grid.weights) {
                for (&gs, &ws) in gh.nodes.iter().zip(&gh.weights) {
                    fill(&mut nodes, g0, gs, w0 * ws);
                }
            }
        }
        return Ok(nodes);
    }

    // β_s > 0: rotate to (V̂, Ŵ) with V̂ the (unit-variance) surrogate
    // direction. Selection kinks are vertical lines; kernel jumps are the
    // slanted lines z = ‖θ₀‖(β₀V̂ − β_sŴ)/σ_v = const, handled per-V̂-node.
    let vb: Vec<f64> = sel_breaks.iter().map(|b| b / sigma_v).collect();
    let v_grid = piecewise_normal_grid(-lim, lim, &vb, spec.quad.panel)?;
    let smooth_kernel = kernel_breaks.is_empty() || norm0 == 0.0;
    let gh = gauss_hermite(spec.quad.main)?;
    let gl = gauss_legendre(spec.quad.panel)?;
    for (&vh, &wv) in v_grid.nodes.iter().zip(&v_grid.weights) {
        if smooth_kernel {
            for (&wh, &ww) in gh.nodes.iter().zip(&gh.weights) {
                let g0 = (spec.beta0 * vh - spec.beta_s * wh) / sigma_v;
                let gs = (spec.beta_s * vh + spec.beta0 * wh) / sigma_v;
                fill(&mut nodes, g0, gs, wv * ww);
            }
        } else {
            // Ŵ-breakpoints where z crosses each kernel jump.
            let wbreaks: Vec<f64> = kernel_breaks
                .iter()
                .map(|z| (spec.beta0 * vh - z * sigma_v / norm0) / spec.beta_s)
                .collect();
            let mut cuts: Vec<f64> = vec![-lim];
            let mut sorted = wbreaks;
            sorted.retain(|b| b.is_finite() && *b > -lim && *b < lim);
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for b in sorted {
                if b - cuts.last().unwrap() > 1e-12 {
                    cuts.push(b);
                }
            }
            cuts.push(lim);
            for pair in cuts.windows(2) {
                let half = 0.5 * (pair[1] - pair[0]);
                let mid = 0.5 * (pair[0] + pair[1]);
                for (&t, &w) in gl.nodes.iter().zip(&gl.weights) {
                    let wh = mid + half * t;
                    let ww = w * half * normal_pdf(wh);
                    let g0 = (spec.beta0 * vh - spec.beta_s * wh) / sigma_v;
                    let gs = (spec.beta_s * vh + spec.beta0 * wh) / sigma_v;
                    fill(&mut nodes, g0, gs, wv * ww);
                }
            }
        }
    }
    Ok(nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::kernel::{KernelKind, LabelKernel};
    use crate::domain::loss::{LossFunction, LossKind, TestKind};
    use crate::highdim::scheme::{ScalarScheme, ScalarSchemeKind};
    use crate::highdim::spec::{QuadOrders, SaddleSpec};

    fn nr_square_spec(gamma: f64, alpha: f64, delta0: f64, lambda: f64) -> SaddleSpec {
        let kernel = LabelKernel::new(
            KernelKind::Deterministic(crate::domain::kernel::DeterministicMap::HermiteCubic {
                c: 0.3,
            }),
            1.0,
        )
        .unwrap();
        let selection =
            ScalarScheme::fit(ScalarSchemeKind::AlphaFamily { alpha }, gamma, false, 1.0).unwrap();
        SaddleSpec {
            loss: LossFunction {
                kind: LossKind::Square,
                test_kind: TestKind::SameAsTrain,
            },
            kernel,
            beta0: 1.0,
            beta_s: 0.0,
            delta0,
            lambda,
            selection,
            quad: QuadOrders::default(),
        }
    }

    /// The paper's analytic μ-max for non-reweighting square loss:
    /// ℒ_ls(α) = ½(√(E π(V)[Y−⟨α,g⟩]²) − α⊥/√δ₀)₊² + λ‖α‖²/2.
    fn l_ls(ev: &LagrangianEvaluator, alpha: [f64; 3]) -> f64 {
        let spec = ev.spec();
        let mut p = 0.0;
        for n in &ev.nodes {
            let pi = spec.selection.pi(n.v);
            let a = alpha[0] * n.g0 + alpha[1] * n.gs;
            p += n.weight * pi * (n.m2 - 2.0 * a * n.m1 + a * a + alpha[2] * alpha[2]);
        }
        let gap = p.max(0.0).sqrt() - alpha[2] / spec.delta0.sqrt();
        let ridge = 0.5
            * spec.lambda
            * (alpha[0] * alpha[0] + alpha[1] * alpha[1] + alpha[2] * alpha[2]);
        0.5 * gap.max(0.0).powi(2) + ridge
    }

    #[test]
    fn analytic_mu_max_matches_golden_section() {
        let mut rng = crate::domain::rng::Rng::new(8);
        for trial in 0..50 {
            let gamma = 0.2 + 0.7 * rng.uniform();
            let alpha_exp = -1.0 + 3.0 * rng.uniform();
            let delta0 = 0.5 + 5.0 * rng.uniform();
            let lambda = 0.01 + rng.uniform();
            let spec = nr_square_spec(gamma, alpha_exp, delta0, lambda);
            let ev = LagrangianEvaluator::new(&spec, true).unwrap();
            let alpha = [rng.normal(), 0.0, rng.uniform() * 2.0];
            let want = l_ls(&ev, alpha);
            let (_, got, _) = ev.mu_max(alpha, None);
            assert!(
                (want - got).abs() < 1e-6 * (1.0 + want.abs()),
                "trial {trial}: golden {got} vs analytic {want}"
            );
        }
    }

    #[test]
    fn mu_zero_slice_is_the_ridge() {
        let spec = nr_square_spec(0.5, 0.5, 2.0, 0.3);
        let ev = LagrangianEvaluator::new(&spec, true).unwrap();
        let alpha = [0.7, 0.0, 0.4];
        let ridge = 0.5 * 0.3 * (0.49 + 0.16);
        assert!((ev.eval(alpha, 0.0) - ridge).abs() < 1e-14);
    }

    #[test]
    fn large_mu_pins_u_to_projection() {
        // μ→∞: value → λ‖α‖²/2 − μα⊥²/(2δ₀) + E S·L(⟨α,g⟩, Y) + o(1).
        let kernel = LabelKernel::new(KernelKind::GlmLogistic, 1.0).unwrap();
        let selection = ScalarScheme::fit(ScalarSchemeKind::Const, 0.6, false, 1.0).unwrap();
        let spec = SaddleSpec {
            loss: LossFunction {
                kind: LossKind::Logistic,
                test_kind: TestKind::Misclassification,
            },
            kernel,
            beta0: 1.0,
            beta_s: 0.0,
            delta0: 3.0,
            lambda: 0.1,
            selection,
            quad: QuadOrders::default(),
        };
        let ev = LagrangianEvaluator::new(&spec, true).unwrap();
        let alpha = [0.8, 0.0, 0.5];
        let mu = 1e8;
        let got = ev.eval(alpha, mu);
        // Limit value computed directly on the same nodes.
        let mut lim = 0.5 * 0.1 * (0.64 + 0.25) - 0.5 * mu * 0.25 / 3.0;
        for n in &ev.nodes {
            let pi = 0.6;
            let a = 0.8 * n.g0;
            let mut term = 0.0;
            for &(gp, wp) in &ev.gperp {
                let u = a + 0.5 * gp;
                term += wp
                    * (n.p_plus * crate::numerics::prox::logistic_loss(u, 1.0)
                        + (1.0 - n.p_plus) * crate::numerics::prox::logistic_loss(u, -1.0));
            }
            lim += n.weight * pi * term;
        }
        assert!((got - lim).abs() < 1e-5 * (1.0 + lim.abs()), "{got} vs {lim}");
    }

    #[test]
    fn slice_concavity_and_alpha_convexity() {
        let mut rng = crate::domain::rng::Rng::new(19);
        let spec = nr_square_spec(0.4, 1.0, 2.5, 0.05);
        let ev = LagrangianEvaluator::new(&spec, true).unwrap();
        for _ in 0..100 {
            let alpha = [rng.normal(), 0.0, rng.uniform()];
            let m1 = 3.0 * rng.uniform();
            let m2 = 3.0 * rng.uniform();
            let lhs = ev.eval(alpha, 0.5 * (m1 + m2));
            let rhs = 0.5 * (ev.eval(alpha, m1) + ev.eval(alpha, m2));
            assert!(lhs >= rhs - 1e-9, "mu-slice concavity violated");
            // Convexity in alpha of ridge + expectation term at fixed mu
            // (the -mu*aperp^2/(2 delta0) coupling is handled by the mu-max).
            let a1 = [rng.normal(), 0.0, rng.uniform()];
            let a2 = [rng.normal(), 0.0, rng.uniform()];
            let mid = [0.5 * (a1[0] + a2[0]), 0.0, 0.5 * (a1[2] + a2[2])];
            let mu = 0.3 + rng.uniform();
            let body = |a: [f64; 3]| {
                ev.eval(a, mu) + 0.5 * mu * a[2] * a[2] / ev.spec().delta0
            };
            assert!(
                body(mid) <= 0.5 * (body(a1) + body(a2)) + 1e-9,
                "alpha midpoint convexity violated"
            );
        }
        // The mu-maximized envelope is convex in alpha (the solver objective).
        for _ in 0..20 {
            let a1 = [rng.normal(), 0.0, rng.uniform()];
            let a2 = [rng.normal(), 0.0, rng.uniform()];
            let mid = [0.5 * (a1[0] + a2[0]), 0.0, 0.5 * (a1[2] + a2[2])];
            let phi = |a: [f64; 3]| ev.mu_max(a, None).1;
            assert!(phi(mid) <= 0.5 * (phi(a1) + phi(a2)) + 1e-7);
        }
    }
}
