//! Monte Carlo harness: synthetic data generation, surrogate training,
//! selection execution, weighted ERM fitting, test-error measurement, and
//! theory-vs-simulation sweeps.

pub mod config;
pub mod erm;
pub mod generate;
pub mod measure;
pub mod select;
pub mod sweep;

pub use config::{AlphaSpec, ExperimentConfig, RidgeConfig, SelectionConfig, SurrogateMode};
pub use erm::fit_erm;
pub use generate::{generate_synthetic, make_theta0, train_surrogate};
pub use measure::{measure_test_error, Measured};
pub use select::{alpha_family_pi, sample_inclusion, topk_pi, PiResult, SelectionOutcome};
pub use sweep::{run_sweep, CellSummary, SweepResult};
