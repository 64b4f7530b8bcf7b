//! The slot-response model: a logistic form over the extracted features.

use crate::core::{Item, ResponseKind};
use crate::error::{Error, Result};
use crate::models::features::{extract_into, FeatureSchema, SlotContext};
use serde::{Deserialize, Serialize};

/// A trained (or hand-built) per-response predictor. Immutable once built;
/// prediction is pure and parallel-safe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseModel {
    pub response: ResponseKind,
    pub schema: FeatureSchema,
    pub weights: Vec<f64>,
}

impl ResponseModel {
    pub fn new(response: ResponseKind, schema: FeatureSchema, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != schema.len() {
            return Err(Error::SchemaMismatch {
                expected: schema.len(),
                got: weights.len(),
            });
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidConfig("model weights must be finite".into()));
        }
        if response != schema.config.response {
            return Err(Error::InvalidConfig(format!(
                "model response {response} does not match schema response {}",
                schema.config.response
            )));
        }
        Ok(ResponseModel {
            response,
            schema,
            weights,
        })
    }

    /// Zero-weight model over the schema; predicts 0.5 everywhere.
    pub fn zeros(schema: FeatureSchema) -> Self {
        let weights = vec![0.0; schema.len()];
        ResponseModel {
            response: schema.config.response,
            schema,
            weights,
        }
    }

    /// Passthrough model: unit weight on the leading SPR logit only, so
    /// prediction returns the (clamped) SPR score itself.
    pub fn spr_identity(schema: FeatureSchema) -> Result<Self> {
        let idx = schema
            .index_of(&format!("spr_logit[{}]", schema.config.response))
            .ok_or_else(|| Error::InvalidConfig("schema lacks the SPR logit feature".into()))?;
        let mut weights = vec![0.0; schema.len()];
        weights[idx] = 1.0;
        ResponseModel::new(schema.config.response, schema, weights)
    }

    /// Predict the response probability for `item` placed at the context's
    /// slot: logistic(w . features).
    pub fn predict(&self, item: &Item, ctx: &SlotContext<'_>) -> Result<f64> {
        let mut buf = Vec::with_capacity(self.schema.len());
        extract_into(item, ctx, &self.schema, &mut buf)?;
        self.score_features(&buf)
    }

    /// Score an already-extracted feature vector.
    pub fn score_features(&self, features: &[f64]) -> Result<f64> {
        if features.len() != self.weights.len() {
            return Err(Error::SchemaMismatch {
                expected: self.weights.len(),
                got: features.len(),
            });
        }
        let z: f64 = self.weights.iter().zip(features).map(|(w, x)| w * x).sum();
        Ok(crate::core::math::sigmoid(z))
    }

    /// Serialize to the on-disk JSON format.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: ResponseModel = serde_json::from_str(text)?;
        // Re-validate: files may be edited by hand.
        ResponseModel::new(model.response, model.schema, model.weights)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
