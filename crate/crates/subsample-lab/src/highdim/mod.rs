//! High-dimensional proportional asymptotics (N, p → ∞, N/p → δ₀).
//!
//! For isotropic Gaussian covariates, labels driven by the projection
//! ⟨θ₀, x⟩, and selection driven by the surrogate index ⟨θ̂_su, x⟩, the
//! post-selection ridge ERM concentrates. Its limit is characterized by the
//! scalar Lagrangian
//!
//! ```text
//! ℒ(α, μ) = λ‖α‖²/2 − μα⊥²/(2δ₀)
//!         + E min_u [ S(⟨β,g⟩)·L(α₀G₀ + α_s G_s + u, Y) + (μ/2)(α⊥G⊥ − u)² ]
//! ```
//!
//! with (G₀,G_s,G⊥) ~ N(0, I₃), Y ~ P(·|‖θ₀‖G₀), and β = (β₀, β_s, 0) the
//! surrogate's decomposition. The saddle point min over α, max over μ ≥ 0
//! yields the asymptotic estimator projections (α₀*, α_s*, α⊥*) and hence
//! test error, excess error, and misclassification rate. Selection
//! randomness is integrated analytically: the Bernoulli mixture over S
//! reduces to π-weighted prox values, never sampled.

pub mod errors;
pub mod lagrangian;
pub mod ridgeless;
pub mod scheme;
pub mod solver;
pub mod spec;

pub use errors::{predicted_errors, realized_gamma, ErrorModel, PredictedErrors};
pub use lagrangian::LagrangianEvaluator;
pub use ridgeless::{ridgeless_closed_form, RidgelessInputs};
pub use scheme::{ScalarScheme, ScalarSchemeKind};
pub use solver::{solve_saddle, PinAlphaS, SaddleSolution, SolveOptions};
pub use spec::{QuadOrders, SaddleSpec};
