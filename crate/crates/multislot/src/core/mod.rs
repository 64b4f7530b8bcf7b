//! Shared domain types and deterministic numeric utilities.

pub mod math;
pub mod types;

pub use math::{clamp_probability, logistic, logit, PROB_CLAMP};
pub use types::{
    contributions_label, CandidateList, CreatorId, Item, ItemId, ItemType, RerankedList,
    RerankedSlot, ResponseKind, ResponseLabels, CONTRIBUTION_PARTS, RESPONSE_KINDS,
};
