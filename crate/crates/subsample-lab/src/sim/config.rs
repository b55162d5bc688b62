//! Experiment configuration for simulate/sweep runs.

use crate::domain::kernel::LabelKernel;
use crate::domain::loss::LossFunction;
use crate::error::{Error, Result};
use serde::Serialize;

/// α-family exponent, including the topK limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum AlphaSpec {
    Finite(f64),
    /// α → +∞: hard topK (largest φ'').
    PlusInf,
    /// α → −∞: easy topK (smallest φ'').
    MinusInf,
}

impl AlphaSpec {
    pub fn label(&self) -> String {
        match self {
            AlphaSpec::Finite(a) => format!("{a}"),
            AlphaSpec::PlusInf => "inf".into(),
            AlphaSpec::MinusInf => "-inf".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub enum SurrogateMode {
    /// θ̂_su = θ₀/‖θ₀‖ (β₀ = 1, β_s = 0).
    Perfect,
    /// Ridge ERM on `n_su` fresh samples, disjoint from training.
    Fitted { n_su: usize, lambda: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub enum RidgeConfig {
    Fixed(f64),
    /// Pick λ per cell by validation error over the grid (the validation
    /// split is carved from training before selection).
    Grid(Vec<f64>),
}

#[derive(Debug, Clone, Serialize)]
pub struct SelectionConfig {
    pub gammas: Vec<f64>,
    pub alphas: Vec<AlphaSpec>,
    pub reweight: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub p: usize,
    pub seed: u64,
    pub replicates: usize,
    /// Fresh holdout size for the sampled test-error estimate.
    pub holdout: usize,
    pub kernel: LabelKernel,
    pub loss: LossFunction,
    pub selection: SelectionConfig,
    pub surrogate: SurrogateMode,
    pub ridge: RidgeConfig,
    /// Attach saddle-point predictions to each cell.
    pub theory: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.p == 0 {
            return Err(Error::invalid("experiment needs n >= 1 and p >= 1"));
        }
        if self.replicates == 0 {
            return Err(Error::invalid("replicates must be >= 1"));
        }
        for (i, g) in self.selection.gammas.iter().enumerate() {
            if !(*g > 0.0 && *g <= 1.0) {
                return Err(Error::Config {
                    pointer: format!("/selection/gamma/{i}"),
                    message: format!("gamma must be in (0,1], got {g}"),
                });
            }
        }
        if self.selection.gammas.is_empty() || self.selection.alphas.is_empty() {
            return Err(Error::invalid("selection grids must be nonempty"));
        }
        if let SurrogateMode::Fitted { n_su, lambda } = &self.surrogate {
            if *n_su == 0 || !(*lambda > 0.0) {
                return Err(Error::invalid(
                    "fitted surrogate needs n_su >= 1 and lambda > 0",
                ));
            }
        }
        match &self.ridge {
            RidgeConfig::Fixed(l) if !(*l > 0.0) => {
                return Err(Error::invalid("ridge lambda must be > 0"))
            }
            RidgeConfig::Grid(g) if g.is_empty() || g.iter().any(|l| !(*l > 0.0)) => {
                return Err(Error::invalid("ridge grid must be nonempty and positive"))
            }
            _ => {}
        }
        Ok(())
    }
}
