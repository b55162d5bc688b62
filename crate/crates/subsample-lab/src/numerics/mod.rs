//! Shared numerical kernels: Gaussian quadrature, root finding, scalar
//! proximal solvers, concave maximization, and PSD matrix utilities.

pub mod prox;
pub mod psd;
pub mod qmc;
pub mod quadrature;
pub mod rootfind;
pub mod special;

pub use prox::prox_loss;
pub use quadrature::{gauss_hermite, gauss_legendre, piecewise_normal_grid, QuadratureGrid};
pub use rootfind::{bisect_monotone, maximize_concave_scalar};
pub use special::{normal_cdf, normal_pdf, normal_quantile};
