//! Linear combination of per-response predictions into one re-ranking score.

use crate::core::ResponseKind;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Per-response linear coefficients; skip's coefficient is typically
/// negative. At least one coefficient must be nonzero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CombinationConfig {
    coefficients: BTreeMap<ResponseKind, f64>,
}

impl CombinationConfig {
    pub fn new(coefficients: BTreeMap<ResponseKind, f64>) -> Result<Self> {
        if !coefficients.values().any(|c| *c != 0.0) {
            return Err(Error::InvalidConfig(
                "combination needs at least one nonzero coefficient".into(),
            ));
        }
        if coefficients.values().any(|c| !c.is_finite()) {
            return Err(Error::InvalidConfig(
                "combination coefficients must be finite".into(),
            ));
        }
        Ok(CombinationConfig { coefficients })
    }

    /// Single-objective combination: coefficient 1 on one response.
    pub fn single(response: ResponseKind) -> Self {
        CombinationConfig {
            coefficients: BTreeMap::from([(response, 1.0)]),
        }
    }

    pub fn coefficients(&self) -> &BTreeMap<ResponseKind, f64> {
        &self.coefficients
    }

    /// Responses that actually influence the combined score.
    pub fn active_responses(&self) -> Vec<ResponseKind> {
        self.coefficients
            .iter()
            .filter(|(_, c)| **c != 0.0)
            .map(|(k, _)| *k)
            .collect()
    }

    /// Sum of c_r * p_r over configured responses; every configured
    /// response must be present in `predictions`.
    pub fn combine(&self, predictions: &BTreeMap<ResponseKind, f64>) -> Result<f64> {
        let mut total = 0.0;
        for (kind, coeff) in &self.coefficients {
            let p = predictions.get(kind).ok_or(Error::MissingResponse(*kind))?;
            total += coeff * p;
        }
        Ok(total)
    }

    /// Combine binary labels with the same coefficients (used as the
    /// simulator's reward definition).
    pub fn combine_labels(&self, labels: &crate::core::ResponseLabels) -> f64 {
        self.coefficients
            .iter()
            .map(|(kind, coeff)| {
                let hit = labels.get(kind).copied().unwrap_or(false);
                if hit {
                    *coeff
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// Reward bounds per slot given binary labels: [sum of negative
    /// coefficients, sum of positive coefficients].
    pub fn label_reward_bounds(&self) -> (f64, f64) {
        let lo = self.coefficients.values().filter(|c| **c < 0.0).sum();
        let hi = self.coefficients.values().filter(|c| **c > 0.0).sum();
        (lo, hi)
    }
}

/// Free-function form of [`CombinationConfig::combine`].
pub fn combine_scores(
    predictions: &BTreeMap<ResponseKind, f64>,
    cfg: &CombinationConfig,
) -> Result<f64> {
    cfg.combine(predictions)
}
