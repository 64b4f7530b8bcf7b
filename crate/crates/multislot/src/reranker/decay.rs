//! Exponential-decay creator-diversity re-ranker: the k-th item from the
//! same creator (in SPR order) has its score scaled by alpha^(k-1), and the
//! list is re-sorted by the adjusted score.

use crate::core::{CandidateList, CreatorId, RerankedList, RerankedSlot, ResponseKind};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecayConfig {
    /// Decay factor in (0, 1]; 1 disables the decay.
    pub alpha: f64,
    /// Which SPR score is scaled and used for the re-sort.
    pub response: ResponseKind,
}

impl Default for DecayConfig {
    fn default() -> Self {
        DecayConfig {
            alpha: 0.8,
            response: ResponseKind::Click,
        }
    }
}

impl DecayConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "decay alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Apply the exponential decay re-ranker.
///
/// Recorded per-slot predictions are the item's SPR scores with the
/// designated response replaced by its decayed value.
pub fn exp_decay_rerank(input: &CandidateList, cfg: &DecayConfig) -> Result<RerankedList> {
    cfg.validate()?;
    let mut seen: BTreeMap<CreatorId, u32> = BTreeMap::new();
    let mut scored: Vec<(usize, f64)> = Vec::with_capacity(input.len());
    for (pos, item) in input.items().iter().enumerate() {
        let k = seen.entry(item.creator_id).or_insert(0);
        let adjusted = item.spr(cfg.response)? * cfg.alpha.powi(*k as i32);
        *k += 1;
        scored.push((pos, adjusted));
    }
    // Stable sort keeps SPR order among ties, so alpha = 1 is an identity.
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("scores are finite"));

    let slots = scored
        .into_iter()
        .enumerate()
        .map(|(slot, (pos, adjusted))| {
            let item = input.items()[pos].clone();
            let mut predicted = item.spr_scores.clone();
            predicted.insert(cfg.response, adjusted);
            RerankedSlot {
                slot,
                item,
                predicted,
                original_position: pos,
            }
        })
        .collect();
    Ok(RerankedList { slots })
}
