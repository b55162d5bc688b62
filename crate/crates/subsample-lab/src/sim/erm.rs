//! Weighted ridge-regularized empirical risk minimization.
//!
//! Minimizes `(1/N)·Σ_i S_i·L(⟨θ, x_i⟩, y_i) + (λ/2)‖θ‖²` where S_i is the
//! selection multiplier (0 for dropped samples, the weight w_i otherwise)
//! and N is the *full* sample size. Square loss solves the normal equations
//! directly; logistic runs a damped Newton iteration with exact Hessians.

use crate::domain::loss::{phi_second, LossKind};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

pub fn fit_erm(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    s: &[f64],
    loss: LossKind,
    lambda: f64,
) -> Result<DVector<f64>> {
    let n = x.nrows();
    let p = x.ncols();
    if s.len() != n || y.len() != n {
        return Err(Error::invalid("fit_erm: S and y must have length N"));
    }
    if !(lambda > 0.0) {
        return Err(Error::invalid("fit_erm requires lambda > 0"));
    }
    let selected: Vec<usize> = (0..n).filter(|&i| s[i] != 0.0).collect();
    if selected.is_empty() {
        return Err(Error::invalid("fit_erm: no selected samples"));
    }
    let n_f = n as f64;
    match loss {
        LossKind::Square => {
            let mut a = DMatrix::<f64>::zeros(p, p);
            let mut b = DVector::<f64>::zeros(p);
            for &i in &selected {
                let xi = x.row(i);
                let w = s[i] / n_f;
                for r in 0..p {
                    b[r] += w * y[i] * xi[r];
                    let wr = w * xi[r];
                    for c in r..p {
                        a[(r, c)] += wr * xi[c];
                    }
                }
            }
            for r in 0..p {
                for c in 0..r {
                    a[(r, c)] = a[(c, r)];
                }
                a[(r, r)] += lambda;
            }
            a.cholesky()
                .map(|ch| ch.solve(&b))
                .ok_or_else(|| Error::SingularMatrix {
                    min_eig: 0.0,
                    floor: lambda,
                })
        }
        LossKind::Logistic => {
            let mut theta = DVector::<f64>::zeros(p);
            let grad = |theta: &DVector<f64>, margins: &DVector<f64>| -> DVector<f64> {
                let mut g = theta * lambda;
                for (k, &i) in selected.iter().enumerate() {
                    let coef = s[i] / n_f * (margins[k].tanh() - y[i]);
                    g.axpy(coef, &x.row(i).transpose(), 1.0);
                }
                g
            };
            let objective = |theta: &DVector<f64>, margins: &DVector<f64>| -> f64 {
                let mut obj = 0.5 * lambda * theta.norm_squared();
                for (k, &i) in selected.iter().enumerate() {
                    obj += s[i] / n_f * crate::numerics::prox::logistic_loss(margins[k], y[i]);
                }
                obj
            };
            let margins_of = |theta: &DVector<f64>| -> DVector<f64> {
                DVector::from_iterator(selected.len(), selected.iter().map(|&i| x.row(i).dot(&theta.transpose())))
            };
            let mut margins = margins_of(&theta);
            let g0_norm = grad(&theta, &margins).norm().max(1.0);
            for _iter in 0..100 {
                let g = grad(&theta, &margins);
                if g.norm() <= 1e-8 * g0_norm {
                    return Ok(theta);
                }
                // Exact Hessian.
                let mut h = DMatrix::<f64>::zeros(p, p);
                for (k, &i) in selected.iter().enumerate() {
                    let w = s[i] / n_f * phi_second(margins[k]);
                    if w == 0.0 {
                        continue;
                    }
                    let xi = x.row(i);
                    for r in 0..p {
                        let wr = w * xi[r];
                        for c in r..p {
                            h[(r, c)] += wr * xi[c];
                        }
                    }
                }
                for r in 0..p {
                    for c in 0..r {
                        h[(r, c)] = h[(c, r)];
                    }
                    h[(r, r)] += lambda;
                }
                let step = h
                    .cholesky()
                    .map(|ch| ch.solve(&g))
                    .ok_or_else(|| Error::SingularMatrix {
                        min_eig: 0.0,
                        floor: lambda,
                    })?;
                // Step halving on the objective.
                let obj = objective(&theta, &margins);
                let mut t = 1.0;
                let mut accepted = false;
                for _ in 0..50 {
                    let cand = &theta - t * &step;
                    let cand_margins = margins_of(&cand);
                    if objective(&cand, &cand_margins) < obj {
                        theta = cand;
                        margins = cand_margins;
                        accepted = true;
                        break;
                    }
                    t *= 0.5;
                }
                if !accepted {
                    break;
                }
            }
            let g = grad(&theta, &margins);
            if g.norm() <= 1e-6 * g0_norm {
                Ok(theta)
            } else {
                Err(Error::NonConvergence {
                    what: "logistic ERM Newton".into(),
                    iterations: 100,
                    residual: g.norm(),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::rng::Rng;

    #[test]
    fn large_lambda_shrinks_to_zero() {
        let mut rng = Rng::new(1);
        let x = DMatrix::from_fn(50, 3, |_, _| rng.normal());
        let y = DVector::from_fn(50, |_, _| rng.normal());
        let s = vec![1.0; 50];
        let theta = fit_erm(&x, &y, &s, LossKind::Square, 1e9).unwrap();
        assert!(theta.norm() < 1e-6);
    }

    #[test]
    fn square_normal_equations_residual() {
        let mut rng = Rng::new(2);
        let n = 80;
        let p = 4;
        let x = DMatrix::from_fn(n, p, |_, _| rng.normal());
        let y = DVector::from_fn(n, |_, _| rng.normal());
        let s: Vec<f64> = (0..n).map(|i| if i % 3 == 0 { 0.0 } else { 1.7 }).collect();
        let lambda = 0.3;
        let theta = fit_erm(&x, &y, &s, LossKind::Square, lambda).unwrap();
        // residual of (X'WX/N + λI)θ = X'Wy/N
        let mut a = DMatrix::<f64>::zeros(p, p);
        let mut b = DVector::<f64>::zeros(p);
        for i in 0..n {
            let xi = x.row(i).transpose();
            a += s[i] / n as f64 * &xi * xi.transpose();
            b += s[i] / n as f64 * y[i] * xi;
        }
        a += lambda * DMatrix::identity(p, p);
        assert!((&a * &theta - b).norm() < 1e-10);
    }

    #[test]
    fn logistic_matches_grid_search_on_tiny_instance() {
        // N = 6, p = 2: brute-force grid over theta in [-3,3]^2.
        let x = DMatrix::from_row_slice(
            6,
            2,
            &[0.9, -0.3, -1.2, 0.4, 0.5, 1.1, -0.7, -0.8, 1.5, 0.2, -0.1, -1.4],
        );
        let y = DVector::from_vec(vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0]);
        let s = vec![1.0, 1.0, 0.0, 2.0, 1.0, 1.0];
        let lambda = 0.15;
        let obj = |t0: f64, t1: f64| -> f64 {
            let mut o = 0.5 * lambda * (t0 * t0 + t1 * t1);
            for i in 0..6 {
                let u = t0 * x[(i, 0)] + t1 * x[(i, 1)];
                o += s[i] / 6.0 * crate::numerics::prox::logistic_loss(u, y[i]);
            }
            o
        };
        // Coarse-to-fine grid search down to 1e-6 spacing.
        let mut best = (f64::INFINITY, 0.0, 0.0);
        let (mut lo0, mut hi0, mut lo1, mut hi1) = (-3.0, 3.0, -3.0, 3.0);
        for _ in 0..8 {
            let steps = 40;
            for i in 0..=steps {
                for j in 0..=steps {
                    let t0 = lo0 + (hi0 - lo0) * i as f64 / steps as f64;
                    let t1 = lo1 + (hi1 - lo1) * j as f64 / steps as f64;
                    let v = obj(t0, t1);
                    if v < best.0 {
                        best = (v, t0, t1);
                    }
                }
            }
            let w0 = (hi0 - lo0) / steps as f64;
            let w1 = (hi1 - lo1) / steps as f64;
            lo0 = best.1 - 2.0 * w0;
            hi0 = best.1 + 2.0 * w0;
            lo1 = best.2 - 2.0 * w1;
            hi1 = best.2 + 2.0 * w1;
        }
        let theta = fit_erm(&x, &y, &s, LossKind::Logistic, lambda).unwrap();
        let newton_obj = obj(theta[0], theta[1]);
        assert!(
            (newton_obj - best.0).abs() < 1e-4,
            "newton {newton_obj} vs grid {}",
            best.0
        );
    }
}
