//! Synthetic data generation and surrogate training.

use super::erm::fit_erm;
use crate::domain::dataset::Dataset;
use crate::domain::kernel::{sample_label, LabelKernel};
use crate::domain::loss::LossKind;
use crate::domain::rng::Rng;
use crate::domain::surrogate::{surrogate_decompose, SurrogateModel};
use crate::error::Result;
use nalgebra::{DMatrix, DVector};

/// θ₀ with the given norm and a seeded random direction.
pub fn make_theta0(p: usize, norm: f64, direction_seed: u64) -> DVector<f64> {
    let mut rng = Rng::new(direction_seed);
    let mut v = DVector::from_fn(p, |_, _| rng.normal());
    let n = v.norm();
    if n > 0.0 {
        v *= norm / n;
    }
    v
}

/// Isotropic Gaussian covariates with labels drawn from P(·|⟨θ₀, x⟩).
pub fn generate_synthetic(
    n: usize,
    kernel: &LabelKernel,
    theta0: &DVector<f64>,
    rng: &mut Rng,
) -> Result<Dataset> {
    let p = theta0.len();
    let mut x = DMatrix::zeros(n, p);
    let mut y = DVector::zeros(n);
    for i in 0..n {
        let mut z = 0.0;
        for j in 0..p {
            let g = rng.normal();
            x[(i, j)] = g;
            z += g * theta0[j];
        }
        y[i] = sample_label(kernel, z, rng);
    }
    Dataset::new(x, Some(y))
}

/// Ridge-regularized ERM surrogate on a fresh disjoint sample; records
/// (β₀, β_s) against the known θ₀.
pub fn train_surrogate(
    n_su: usize,
    kernel: &LabelKernel,
    theta0: &DVector<f64>,
    loss: LossKind,
    lambda_su: f64,
    rng: &mut Rng,
) -> Result<SurrogateModel> {
    let data = generate_synthetic(n_su, kernel, theta0, rng)?;
    let s = vec![1.0; n_su];
    let theta_su = fit_erm(
        &data.features,
        data.labels.as_ref().expect("synthetic data is labeled"),
        &s,
        loss,
        lambda_su,
    )?;
    let decomposition = surrogate_decompose(&theta_su, theta0)?;
    Ok(SurrogateModel {
        theta_su,
        decomposition: Some(decomposition),
        label_kernel_for_scoring: kernel.clone(),
    })
}

/// The perfect surrogate θ̂_su = θ₀/‖θ₀‖.
pub fn perfect_surrogate(kernel: &LabelKernel, theta0: &DVector<f64>) -> SurrogateModel {
    let theta_su = theta0 / theta0.norm();
    SurrogateModel {
        theta_su,
        decomposition: Some((1.0, 0.0)),
        label_kernel_for_scoring: kernel.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::kernel::KernelKind;

    #[test]
    fn gaussian_columns_have_unit_moments() {
        let kernel = LabelKernel::new(KernelKind::GlmLogistic, 1.0).unwrap();
        let theta0 = make_theta0(3, 1.0, 0);
        let mut rng = Rng::new(10);
        let n = 10_000;
        let ds = generate_synthetic(n, &kernel, &theta0, &mut rng).unwrap();
        for j in 0..3 {
            let col = ds.features.column(j);
            let mean = col.sum() / n as f64;
            let var = col.iter().map(|v| v * v).sum::<f64>() / n as f64 - mean * mean;
            assert!(mean.abs() < 4.0 / (n as f64).sqrt());
            assert!((var - 1.0).abs() < 0.1);
        }
        ds.validate_binary_labels().unwrap();
    }

    #[test]
    fn surrogate_alignment_improves_with_sample_size() {
        // beta_s/beta0 decreases as N_su doubles (consistency trend).
        let kernel = LabelKernel::new(KernelKind::GlmLogistic, 2.0).unwrap();
        let theta0 = make_theta0(20, 2.0, 3);
        let mut ratios = Vec::new();
        for (i, n_su) in [200usize, 800, 3200].iter().enumerate() {
            let mut rng = Rng::new(100 + i as u64);
            let su = train_surrogate(*n_su, &kernel, &theta0, LossKind::Logistic, 1e-3, &mut rng)
                .unwrap();
            let (b0, bs) = su.decomposition.unwrap();
            assert!(b0 > 0.0);
            ratios.push(bs / b0);
        }
        assert!(ratios[0] > ratios[1] && ratios[1] > ratios[2], "{ratios:?}");
    }
}
