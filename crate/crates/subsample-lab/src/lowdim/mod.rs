//! Low-dimensional (fixed-p) asymptotics.
//!
//! The central object is the asymptotic error coefficient
//!
//! ```text
//! ρ(S;Q) = (E S² / (E S)²) · Tr(G_S H_S⁻¹ Q H_S⁻¹),
//!   G_S = E{S² G(x)}/E S²,   H_S = E{S H(x)}/E S,
//! ```
//!
//! the limit of `N·E‖θ̂−θ*‖²_Q`. On top of it sit the optimal unbiased
//! scheme (square-root-of-score sampling with a cap), the optimal
//! non-reweighting scheme (a self-consistent hard threshold), closed-form
//! one-dimensional examples, and the negativity certificate showing that a
//! non-reweighting scheme can beat the full sample.

pub mod closed_form;
pub mod fixed_point;
pub mod moments;
pub mod nonmono;
pub mod population;
pub mod rho;

pub use closed_form::{closed_form_1d, ClosedForm1d};
pub use fixed_point::{nonreweight_score, solve_nonreweight_fixed_point, NonReweightFixedPoint};
pub use moments::ConditionalMoments;
pub use nonmono::{greedy_drop_rho, negativity_certificate, zq_at_full, NegativityCertificate};
pub use population::{Law1d, WeightedPopulation};
pub use rho::{
    influence_score, optimal_unbiased_pi, resolve_metric, rho_coefficient, rho_from_pi,
    unbiased_score, AsymptoticCoefficient,
};
