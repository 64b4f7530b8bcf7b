//! Maximum-likelihood training of the logistic slot-response model.
//!
//! Full-batch gradient descent on L2-regularized log-loss with backtracking
//! line search. Deterministic given the data order and hyperparameters:
//! no stochastic minibatching, no random initialization.

use crate::core::ResponseKind;
use crate::error::{Error, Result};
use crate::models::features::FeatureSchema;
use crate::models::response::ResponseModel;
use serde::{Deserialize, Serialize};

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    /// L2 penalty on the weights.
    pub l2: f64,
    /// Initial step size; backtracking shrinks it per iteration as needed.
    pub step_size: f64,
    pub max_iters: usize,
    /// Stop when the gradient norm falls below this.
    pub tol: f64,
    /// Halve the step until the Armijo condition holds. Guarantees the
    /// loss never increases between iterations.
    pub backtracking: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            l2: 1e-4,
            step_size: 2.0,
            max_iters: 2000,
            tol: 1e-6,
            backtracking: true,
        }
    }
}

/// Outcome of a training run.
#[derive(Debug, Clone)]
pub struct TrainReport {
    pub model: ResponseModel,
    pub iterations: usize,
    pub final_loss: f64,
    pub final_gradient_norm: f64,
    /// Loss after each accepted iteration, starting with the initial loss.
    pub loss_trace: Vec<f64>,
    pub converged: bool,
}

struct Problem<'a> {
    examples: &'a [(Vec<f64>, bool)],
    dim: usize,
    l2: f64,
}

impl Problem<'_> {
    /// Mean log-loss plus L2 penalty, and its gradient.
    fn loss_and_gradient(&self, weights: &[f64]) -> (f64, Vec<f64>) {
        let n = self.examples.len() as f64;
        let mut loss = 0.0;
        let mut grad = vec![0.0; self.dim];
        for (x, label) in self.examples {
            let z: f64 = weights.iter().zip(x).map(|(w, v)| w * v).sum();
            let y = if *label { 1.0 } else { 0.0 };
            // log(1 + e^z) - y z, computed stably.
            loss += if z > 0.0 {
                z + (-z).exp().ln_1p() - y * z
            } else {
                z.exp().ln_1p() - y * z
            };
            let p = crate::core::math::sigmoid(z);
            let delta = p - y;
            for (g, v) in grad.iter_mut().zip(x) {
                *g += delta * v;
            }
        }
        loss /= n;
        for (g, w) in grad.iter_mut().zip(weights) {
            *g = *g / n + self.l2 * w;
        }
        let penalty: f64 = weights.iter().map(|w| w * w).sum::<f64>() * 0.5 * self.l2;
        (loss + penalty, grad)
    }

    fn loss(&self, weights: &[f64]) -> f64 {
        let n = self.examples.len() as f64;
        let mut loss = 0.0;
        for (x, label) in self.examples {
            let z: f64 = weights.iter().zip(x).map(|(w, v)| w * v).sum();
            let y = if *label { 1.0 } else { 0.0 };
            loss += if z > 0.0 {
                z + (-z).exp().ln_1p() - y * z
            } else {
                z.exp().ln_1p() - y * z
            };
        }
        let penalty: f64 = weights.iter().map(|w| w * w).sum::<f64>() * 0.5 * self.l2;
        loss / n + penalty
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Train a logistic model for `response` over `schema`.
///
/// Requires at least one positive and one negative label and finite
/// feature values throughout.
pub fn train(
    response: ResponseKind,
    schema: FeatureSchema,
    examples: &[(Vec<f64>, bool)],
    cfg: &TrainConfig,
) -> Result<TrainReport> {
    if examples.is_empty() {
        return Err(Error::EmptyInput("training examples"));
    }
    let positives = examples.iter().filter(|(_, y)| *y).count();
    if positives == 0 || positives == examples.len() {
        return Err(Error::SingleClass);
    }
    let dim = schema.len();
    for (x, _) in examples {
        if x.len() != dim {
            return Err(Error::SchemaMismatch {
                expected: dim,
                got: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(
                x.iter()
                    .copied()
                    .find(|v| !v.is_finite())
                    .unwrap_or(f64::NAN),
            ));
        }
    }
    if !cfg.l2.is_finite() || cfg.l2 < 0.0 || cfg.step_size <= 0.0 || !cfg.step_size.is_finite() {
        return Err(Error::InvalidConfig(
            "invalid training hyperparameters".into(),
        ));
    }

    let problem = Problem {
        examples,
        dim,
        l2: cfg.l2,
    };
    let mut weights = vec![0.0; dim];
    let (mut loss, mut grad) = problem.loss_and_gradient(&weights);
    let mut trace = vec![loss];
    let mut converged = norm(&grad) <= cfg.tol;
    let mut iterations = 0;

    const ARMIJO: f64 = 1e-4;
    // Warm-start the line search at twice the last accepted step so the
    // halving cost is paid once, not every iteration.
    let mut step_start = cfg.step_size;
    while !converged && iterations < cfg.max_iters {
        let grad_sq = grad.iter().map(|g| g * g).sum::<f64>();
        let mut step = step_start;
        let mut candidate: Vec<f64>;
        loop {
            candidate = weights
                .iter()
                .zip(&grad)
                .map(|(w, g)| w - step * g)
                .collect();
            let candidate_loss = problem.loss(&candidate);
            if !cfg.backtracking || candidate_loss <= loss - ARMIJO * step * grad_sq {
                break;
            }
            step *= 0.5;
            if step < 1e-16 {
                // Cannot make progress at floating precision.
                candidate = weights.clone();
                break;
            }
        }
        step_start = (step * 2.0).min(cfg.step_size);
        weights = candidate;
        let (l, g) = problem.loss_and_gradient(&weights);
        loss = l;
        grad = g;
        trace.push(loss);
        iterations += 1;
        converged = norm(&grad) <= cfg.tol;
    }

    let final_gradient_norm = norm(&grad);
    let model = ResponseModel::new(response, schema, weights)?;
    Ok(TrainReport {
        model,
        iterations,
        final_loss: loss,
        final_gradient_norm,
        loss_trace: trace,
        converged,
    })
}
