//! Data selection for weighted empirical risk minimization.
//!
//! Given `N` unlabeled feature vectors and a surrogate model that predicts
//! labels better than chance, the question is which `n = γN` samples to label
//! and train on, and with what weights. This crate implements the selection
//! schemes themselves together with two layers of theory that predict their
//! test error, plus a simulator that checks the predictions:
//!
//! * [`lowdim`] — fixed-dimension asymptotics: the error coefficient
//!   `ρ(S;Q) = lim N·E‖θ̂−θ*‖²_Q`, optimal unbiased (influence-function)
//!   schemes, optimal non-reweighting schemes via a self-consistent
//!   fixed point, and the certificate showing selection can beat the
//!   full sample.
//! * [`minimax`] — worst-case selection against an imperfect surrogate on
//!   discrete covariates.
//! * [`highdim`] — proportional asymptotics (`N/p → δ₀`): a scalar
//!   saddle-point Lagrangian whose solution gives exact predictions of test
//!   error and estimator projections, with closed forms in the ridgeless
//!   square-loss limit.
//! * [`sim`] — a seeded Monte Carlo harness (synthetic data, surrogate
//!   training, selection, weighted ERM, error measurement) used to validate
//!   every prediction.
//! * [`domain`], [`numerics`], [`io`] — shared types, numerical kernels, and
//!   file formats.
//!
//! Reported square-loss test/excess errors are in plain squared-error (MSE)
//! units; see `highdim::ridgeless` for the convention.

pub mod domain;
pub mod error;
pub mod highdim;
pub mod io;
pub mod lowdim;
pub mod minimax;
pub mod numerics;
pub mod sim;

pub use error::{Error, Result};
