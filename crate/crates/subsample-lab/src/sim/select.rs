//! Selection execution on a concrete sample.
//!
//! The α-family scores s_i = φ''(T(⟨θ̂_su, x_i⟩))^α with the stability clip
//! T(x) = min(max(x, −10), 10) applied for every α; the cap constant is
//! solved on the empirical sample so Σ_i min(c·s_i, 1) = n. The topK limits
//! (α = ±∞) pick exactly the n largest/smallest φ'' with ties broken by
//! index.

use crate::domain::loss::phi_second;
use crate::domain::rng::Rng;
use crate::error::{Error, Result};

pub const INDEX_CLIP: f64 = 10.0;

/// Per-sample selection probabilities plus the solved cap constant.
#[derive(Debug, Clone)]
pub struct PiResult {
    pub pi: Vec<f64>,
    pub c: f64,
}

/// A realized selection: inclusion flags and the ERM multipliers S_i.
#[derive(Debug, Clone)]
pub struct SelectionOutcome {
    pub included: Vec<bool>,
    /// S_i: 0 for dropped samples, w_i for kept ones.
    pub s: Vec<f64>,
    pub realized_n: usize,
}

/// α-family probabilities π_i = min(c·φ''(T(v_i))^α, 1) with Σπ_i = γ·N.
pub fn alpha_family_pi(surrogate_index: &[f64], gamma: f64, alpha: f64) -> Result<PiResult> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::invalid("gamma must be in (0,1]"));
    }
    if !alpha.is_finite() {
        return Err(Error::invalid("alpha must be finite (use topk_pi for ±inf)"));
    }
    let n_target = gamma * surrogate_index.len() as f64;
    let scores: Vec<f64> = surrogate_index
        .iter()
        .map(|v| phi_second(v.clamp(-INDEX_CLIP, INDEX_CLIP)).powf(alpha))
        .collect();
    if scores.iter().all(|s| *s <= 0.0) {
        return Err(Error::invalid("all selection scores are zero"));
    }
    let total: f64 = scores.iter().sum();
    let c0 = n_target / total;
    let c = crate::numerics::rootfind::bisect_monotone(
        |c| scores.iter().map(|s| (c * s).min(1.0)).sum::<f64>(),
        n_target,
        0.0,
        2.0 * c0 + 1e-12,
        0.25,
    )?;
    let pi = scores.iter().map(|s| (c * s).min(1.0)).collect();
    Ok(PiResult { pi, c })
}

/// topK probabilities: exactly n ones at the largest (`hard = true`) or
/// smallest (`hard = false`) values of φ''(T(v)); ties broken by index.
pub fn topk_pi(surrogate_index: &[f64], gamma: f64, hard: bool) -> Result<PiResult> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::invalid("gamma must be in (0,1]"));
    }
    let n_all = surrogate_index.len();
    let n = (gamma * n_all as f64).round() as usize;
    if n > n_all {
        return Err(Error::invalid("target n exceeds N"));
    }
    let mut order: Vec<usize> = (0..n_all).collect();
    let key: Vec<f64> = surrogate_index
        .iter()
        .map(|v| phi_second(v.clamp(-INDEX_CLIP, INDEX_CLIP)))
        .collect();
    order.sort_by(|&a, &b| {
        let cmp = if hard {
            key[b].partial_cmp(&key[a]).unwrap()
        } else {
            key[a].partial_cmp(&key[b]).unwrap()
        };
        cmp.then(a.cmp(&b))
    });
    let mut pi = vec![0.0; n_all];
    for &i in order.iter().take(n) {
        pi[i] = 1.0;
    }
    Ok(PiResult { pi, c: f64::NAN })
}

/// Draw the Bernoulli inclusions and attach the weights
/// (w = 1/π when `reweight`, else 1).
pub fn sample_inclusion(pi: &[f64], reweight: bool, rng: &mut Rng) -> SelectionOutcome {
    let mut included = Vec::with_capacity(pi.len());
    let mut s = Vec::with_capacity(pi.len());
    let mut count = 0usize;
    for &p in pi {
        let keep = rng.uniform() < p;
        included.push(keep);
        if keep {
            count += 1;
            s.push(if reweight { 1.0 / p } else { 1.0 });
        } else {
            s.push(0.0);
        }
    }
    SelectionOutcome {
        included,
        s,
        realized_n: count,
    }
}
