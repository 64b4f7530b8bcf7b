//! Feature extraction for slot-response models.
//!
//! Features come in three groups:
//! - `spr`: logits of the candidate's upstream SPR scores,
//! - `current_slot`: slot index, item-type one-hot, raw embedding,
//! - `interaction`: the candidate against items already placed above it —
//!   previous-slot type one-hot, a (current type x previous type) cross
//!   one-hot, per-type counts over the context window, max/mean embedding
//!   dot products, and a same-creator indicator.

use crate::core::{logit, Item, ItemType, ResponseKind, CONTRIBUTION_PARTS};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Feature group tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureGroup {
    Spr,
    CurrentSlot,
    Interaction,
}

/// SPR-score feature toggles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SprFeatures {
    pub enabled: bool,
    /// Include logits of every primary response, not only the model's own.
    pub all_responses: bool,
    /// Include a derived contributions score (noisy-or of the contribution
    /// part scores).
    pub contributions: bool,
}

impl Default for SprFeatures {
    fn default() -> Self {
        SprFeatures {
            enabled: true,
            all_responses: false,
            contributions: false,
        }
    }
}

/// Current-slot feature toggles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CurrentSlotFeatures {
    pub enabled: bool,
    pub slot_index: bool,
    pub type_onehot: bool,
    pub embedding: bool,
}

impl Default for CurrentSlotFeatures {
    fn default() -> Self {
        CurrentSlotFeatures {
            enabled: true,
            slot_index: true,
            type_onehot: true,
            embedding: true,
        }
    }
}

/// Interaction feature toggles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InteractionFeatures {
    pub enabled: bool,
    pub prev_type: bool,
    pub type_cross: bool,
    pub type_counts: bool,
    pub embedding_dots: bool,
    pub same_creator: bool,
}

impl Default for InteractionFeatures {
    fn default() -> Self {
        InteractionFeatures {
            enabled: true,
            prev_type: true,
            type_cross: true,
            type_counts: true,
            embedding_dots: true,
            same_creator: true,
        }
    }
}

/// Declarative description of a feature space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureConfig {
    /// The response this model predicts (its SPR score leads the vector).
    pub response: ResponseKind,
    /// Total number of item types T.
    pub num_types: usize,
    pub embedding_dim: usize,
    /// Interaction horizon H: number of previous slots considered.
    pub horizon: usize,
    #[serde(default)]
    pub spr: SprFeatures,
    #[serde(default)]
    pub current_slot: CurrentSlotFeatures,
    #[serde(default)]
    pub interaction: InteractionFeatures,
}

impl FeatureConfig {
    pub fn new(
        response: ResponseKind,
        num_types: usize,
        embedding_dim: usize,
        horizon: usize,
    ) -> Self {
        FeatureConfig {
            response,
            num_types,
            embedding_dim,
            horizon,
            spr: SprFeatures::default(),
            current_slot: CurrentSlotFeatures::default(),
            interaction: InteractionFeatures::default(),
        }
    }

    pub fn without_interaction(mut self) -> Self {
        self.interaction.enabled = false;
        self
    }

    pub fn without_embedding_dots(mut self) -> Self {
        self.interaction.embedding_dots = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_types == 0 {
            return Err(Error::InvalidConfig("num_types must be >= 1".into()));
        }
        Ok(())
    }
}

/// Materialized feature space: ordered names with group tags, plus the
/// config that generated them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub config: FeatureConfig,
    names: Vec<String>,
    groups: Vec<FeatureGroup>,
}

impl FeatureSchema {
    pub fn build(config: FeatureConfig) -> Result<Self> {
        config.validate()?;
        let mut names = Vec::new();
        let mut groups = Vec::new();
        let mut push = |name: String, group: FeatureGroup| {
            names.push(name);
            groups.push(group);
        };
        let t = config.num_types;

        if config.spr.enabled {
            push(format!("spr_logit[{}]", config.response), FeatureGroup::Spr);
            if config.spr.all_responses {
                for kind in crate::core::RESPONSE_KINDS {
                    if kind != config.response {
                        push(format!("spr_logit[{kind}]"), FeatureGroup::Spr);
                    }
                }
            }
            if config.spr.contributions {
                push("spr_logit[contributions]".into(), FeatureGroup::Spr);
            }
        }
        if config.current_slot.enabled {
            if config.current_slot.slot_index {
                push("slot_index".into(), FeatureGroup::CurrentSlot);
            }
            if config.current_slot.type_onehot {
                for ty in 0..t {
                    push(format!("type[{ty}]"), FeatureGroup::CurrentSlot);
                }
            }
            if config.current_slot.embedding {
                for j in 0..config.embedding_dim {
                    push(format!("emb[{j}]"), FeatureGroup::CurrentSlot);
                }
            }
        }
        if config.interaction.enabled {
            if config.interaction.prev_type {
                for ty in 0..t {
                    push(format!("prev_type[{ty}]"), FeatureGroup::Interaction);
                }
            }
            if config.interaction.type_cross {
                for cur in 0..t {
                    for prev in 0..t {
                        push(format!("cross[{cur}x{prev}]"), FeatureGroup::Interaction);
                    }
                }
            }
            if config.interaction.type_counts {
                for ty in 0..t {
                    push(format!("type_count[{ty}]"), FeatureGroup::Interaction);
                }
            }
            if config.interaction.embedding_dots {
                push("max_dot".into(), FeatureGroup::Interaction);
                push("mean_dot".into(), FeatureGroup::Interaction);
            }
            if config.interaction.same_creator {
                push("same_creator".into(), FeatureGroup::Interaction);
            }
        }
        Ok(FeatureSchema {
            config,
            names,
            groups,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn groups(&self) -> &[FeatureGroup] {
        &self.groups
    }

    /// Index of a named feature, if present.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Two schemas are compatible when they emit the same feature names in
    /// the same order.
    pub fn compatible(&self, other: &FeatureSchema) -> bool {
        self.names == other.names
    }
}

/// The placement context a candidate is scored against: the slot it would
/// fill and the items already placed in the preceding slots (truncated to
/// the schema's horizon by [`SlotContext::from_history`]).
#[derive(Debug, Clone)]
pub struct SlotContext<'a> {
    pub slot_index: usize,
    /// Considered previous items in slot order; the last entry sits at
    /// slot `slot_index - 1`.
    pub previous: Vec<&'a Item>,
    /// Per-type counts over `previous`; sums to `previous.len()`.
    pub type_counts: Vec<u32>,
}

impl<'a> SlotContext<'a> {
    /// Empty context for the top slot.
    pub fn empty(num_types: usize) -> Self {
        SlotContext {
            slot_index: 0,
            previous: Vec::new(),
            type_counts: vec![0; num_types],
        }
    }

    /// Context at `slot_index` given the full placement history, keeping
    /// only the last `horizon` items.
    pub fn from_history(
        slot_index: usize,
        placed: &[&'a Item],
        horizon: usize,
        num_types: usize,
    ) -> Result<Self> {
        let start = placed.len().saturating_sub(horizon);
        let previous: Vec<&Item> = placed[start..].to_vec();
        let mut type_counts = vec![0u32; num_types];
        for item in &previous {
            let ItemType(ty) = item.item_type;
            if ty >= num_types {
                return Err(Error::TypeIndex {
                    index: ty,
                    num_types,
                });
            }
            type_counts[ty] += 1;
        }
        Ok(SlotContext {
            slot_index,
            previous,
            type_counts,
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Derived contributions SPR score: noisy-or of the contribution parts.
fn contributions_spr(item: &Item) -> Result<f64> {
    let mut none = 1.0;
    for kind in CONTRIBUTION_PARTS {
        none *= 1.0 - item.spr(kind)?;
    }
    Ok(1.0 - none)
}

/// Extract the feature vector for `item` placed at `ctx.slot_index`.
///
/// An empty context (top slot) zeroes the interaction block; it is not an
/// error. The item must not already appear among the context's previous
/// items.
pub fn extract_features(
    item: &Item,
    ctx: &SlotContext<'_>,
    schema: &FeatureSchema,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(schema.len());
    extract_into(item, ctx, schema, &mut out)?;
    Ok(out)
}

pub(crate) fn extract_into(
    item: &Item,
    ctx: &SlotContext<'_>,
    schema: &FeatureSchema,
    out: &mut Vec<f64>,
) -> Result<()> {
    debug_assert!(
        ctx.previous.iter().all(|p| p.id != item.id),
        "candidate already placed in context"
    );
    let cfg = &schema.config;
    let t = cfg.num_types;
    let ItemType(cur_ty) = item.item_type;
    if cur_ty >= t {
        return Err(Error::TypeIndex {
            index: cur_ty,
            num_types: t,
        });
    }
    if cfg.current_slot.enabled
        && cfg.current_slot.embedding
        && item.embedding.len() != cfg.embedding_dim
    {
        return Err(Error::EmbeddingDim {
            expected: cfg.embedding_dim,
            got: item.embedding.len(),
        });
    }
    out.clear();

    if cfg.spr.enabled {
        out.push(logit(item.spr(cfg.response)?)?);
        if cfg.spr.all_responses {
            for kind in crate::core::RESPONSE_KINDS {
                if kind != cfg.response {
                    out.push(logit(item.spr(kind)?)?);
                }
            }
        }
        if cfg.spr.contributions {
            out.push(logit(contributions_spr(item)?)?);
        }
    }
    if cfg.current_slot.enabled {
        if cfg.current_slot.slot_index {
            out.push(ctx.slot_index as f64);
        }
        if cfg.current_slot.type_onehot {
            for ty in 0..t {
                out.push(if ty == cur_ty { 1.0 } else { 0.0 });
            }
        }
        if cfg.current_slot.embedding {
            out.extend_from_slice(&item.embedding);
        }
    }
    if cfg.interaction.enabled {
        let prev_ty = ctx.previous.last().map(|p| p.item_type.0);
        if cfg.interaction.prev_type {
            for ty in 0..t {
                out.push(if prev_ty == Some(ty) { 1.0 } else { 0.0 });
            }
        }
        if cfg.interaction.type_cross {
            for a in 0..t {
                for b in 0..t {
                    let hit = a == cur_ty && prev_ty == Some(b);
                    out.push(if hit { 1.0 } else { 0.0 });
                }
            }
        }
        if cfg.interaction.type_counts {
            if ctx.type_counts.len() != t {
                return Err(Error::TypeIndex {
                    index: ctx.type_counts.len(),
                    num_types: t,
                });
            }
            out.extend(ctx.type_counts.iter().map(|&c| c as f64));
        }
        if cfg.interaction.embedding_dots {
            let mut max_dot: Option<f64> = None;
            let mut sum_dot = 0.0f64;
            for prev in &ctx.previous {
                if prev.embedding.len() != item.embedding.len() {
                    return Err(Error::EmbeddingDim {
                        expected: item.embedding.len(),
                        got: prev.embedding.len(),
                    });
                }
                let d = dot(&item.embedding, &prev.embedding);
                sum_dot += d;
                max_dot = Some(max_dot.map_or(d, |m| m.max(d)));
            }
            let mean_dot = if ctx.previous.is_empty() {
                0.0
            } else {
                sum_dot / ctx.previous.len() as f64
            };
            out.push(max_dot.unwrap_or(0.0));
            out.push(mean_dot);
        }
        if cfg.interaction.same_creator {
            let same = ctx.previous.iter().any(|p| p.creator_id == item.creator_id);
            out.push(if same { 1.0 } else { 0.0 });
        }
    }
    debug_assert_eq!(out.len(), schema.len());
    Ok(())
}
