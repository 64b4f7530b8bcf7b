//! Turning logged sessions into supervised training examples.

use crate::core::{Item, ResponseKind, RESPONSE_KINDS};
use crate::error::{Error, Result};
use crate::models::{extract_features, FeatureConfig, FeatureSchema, SlotContext};
use crate::replay::LoggedSession;
use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One (features, label) pair per logged slot: the placed item featurized
/// against the items placed above it, labeled by the logged response.
pub fn training_examples(
    sessions: &[LoggedSession],
    schema: &FeatureSchema,
    response: ResponseKind,
) -> Result<Vec<(Vec<f64>, bool)>> {
    let objective = RESPONSE_KINDS
        .iter()
        .position(|k| *k == response)
        .expect("primary response");
    let mut out = Vec::new();
    for session in sessions {
        let items = session.items.items();
        let mut placed: Vec<&Item> = Vec::new();
        for (slot_index, slot) in session.slots.iter().enumerate() {
            let item = &items[slot.window[slot.action]];
            let ctx = SlotContext::from_history(
                slot_index,
                &placed,
                schema.config.horizon,
                schema.config.num_types,
            )?;
            let features = extract_features(item, &ctx, schema)?;
            out.push((features, slot.rewards[objective] > 0.0));
            placed.push(item);
        }
    }
    Ok(out)
}

/// Deterministic holdout split over whole sessions: shuffles session
/// indices with the given seed and reserves `holdout_fraction` for
/// evaluation.
pub fn split_sessions(
    sessions: &[LoggedSession],
    holdout_fraction: f64,
    seed: u64,
) -> Result<(Vec<&LoggedSession>, Vec<&LoggedSession>)> {
    if !(0.0..1.0).contains(&holdout_fraction) {
        return Err(Error::InvalidConfig(format!(
            "holdout_fraction must lie in [0, 1), got {holdout_fraction}"
        )));
    }
    let mut indices: Vec<usize> = (0..sessions.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    let holdout = ((sessions.len() as f64) * holdout_fraction).round() as usize;
    let split = sessions.len().saturating_sub(holdout).max(1);
    let train = indices[..split].iter().map(|&i| &sessions[i]).collect();
    let test = indices[split..].iter().map(|&i| &sessions[i]).collect();
    Ok((train, test))
}

/// Clone session refs into an owned slice for the extraction helpers.
pub fn owned(sessions: &[&LoggedSession]) -> Vec<LoggedSession> {
    sessions.iter().map(|s| (*s).clone()).collect()
}

/// Feature config for training against a simulator config.
pub fn feature_config(
    response: ResponseKind,
    num_types: usize,
    embedding_dim: usize,
    horizon: usize,
) -> FeatureConfig {
    FeatureConfig::new(response, num_types, embedding_dim, horizon)
}
