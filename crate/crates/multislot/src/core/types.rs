//! Domain types shared by every other module: responses, items, candidate
//! lists and re-ranked slates. All types are immutable after construction
//! and safe to share across parallel workers.

use crate::core::math::clamp_probability;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// A user response a slot-level model can predict.
///
/// The five kinds here are primary label dimensions. "Contributions" is
/// derived, never logged: it is positive when any of like/comment/share/skip
/// is positive (see [`contributions_label`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResponseKind {
    Click,
    Like,
    Comment,
    Share,
    Skip,
}

/// All primary response kinds, in canonical order.
pub const RESPONSE_KINDS: [ResponseKind; 5] = [
    ResponseKind::Click,
    ResponseKind::Like,
    ResponseKind::Comment,
    ResponseKind::Share,
    ResponseKind::Skip,
];

/// The response kinds that feed the derived contributions label.
pub const CONTRIBUTION_PARTS: [ResponseKind; 4] = [
    ResponseKind::Like,
    ResponseKind::Comment,
    ResponseKind::Share,
    ResponseKind::Skip,
];

impl ResponseKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ResponseKind::Click => "click",
            ResponseKind::Like => "like",
            ResponseKind::Comment => "comment",
            ResponseKind::Share => "share",
            ResponseKind::Skip => "skip",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        RESPONSE_KINDS
            .iter()
            .copied()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown response kind: {s}")))
    }
}

impl fmt::Display for ResponseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Binary labels for one slot, one per primary response.
pub type ResponseLabels = BTreeMap<ResponseKind, bool>;

/// Derived contributions label: positive when any contribution part is.
pub fn contributions_label(labels: &ResponseLabels) -> bool {
    CONTRIBUTION_PARTS
        .iter()
        .any(|k| labels.get(k).copied().unwrap_or(false))
}

/// Item type tag. The set of types is run configuration (the count `T` is
/// carried by whatever schema or config interprets the tag), so this is an
/// index rather than a closed enum.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct ItemType(pub usize);

/// Opaque item identity, compared only for equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ItemId(pub u64);

/// Opaque creator identity, compared only for equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CreatorId(pub u64);

/// A candidate with its upstream second-pass-ranking (SPR) scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub id: ItemId,
    pub creator_id: CreatorId,
    pub item_type: ItemType,
    pub embedding: Vec<f64>,
    /// Per-response SPR probabilities, each strictly inside (0, 1) after
    /// clamping.
    pub spr_scores: BTreeMap<ResponseKind, f64>,
}

impl Item {
    /// Build an item, clamping SPR scores away from 0/1 and rejecting
    /// anything outside [0, 1].
    pub fn new(
        id: ItemId,
        creator_id: CreatorId,
        item_type: ItemType,
        embedding: Vec<f64>,
        spr_scores: BTreeMap<ResponseKind, f64>,
    ) -> Result<Self> {
        let mut clamped = BTreeMap::new();
        for (kind, p) in spr_scores {
            clamped.insert(kind, clamp_probability(p)?);
        }
        Ok(Item {
            id,
            creator_id,
            item_type,
            embedding,
            spr_scores: clamped,
        })
    }

    /// SPR score for one response; absent responses are a data error.
    pub fn spr(&self, kind: ResponseKind) -> Result<f64> {
        self.spr_scores
            .get(&kind)
            .copied()
            .ok_or(Error::MissingResponse(kind))
    }
}

/// An ordered list of candidates, sorted non-increasing by the designated
/// primary SPR score.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidateList {
    items: Vec<Item>,
    primary: ResponseKind,
}

impl CandidateList {
    /// Validate an already-sorted list.
    pub fn new(items: Vec<Item>, primary: ResponseKind) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::EmptyInput("candidate list"));
        }
        let dim = items[0].embedding.len();
        for item in &items {
            if item.embedding.len() != dim {
                return Err(Error::EmbeddingDim {
                    expected: dim,
                    got: item.embedding.len(),
                });
            }
            item.spr(primary)?;
        }
        for pair in items.windows(2) {
            if pair[0].spr(primary)? < pair[1].spr(primary)? {
                return Err(Error::InvalidConfig(
                    "candidate list not sorted by primary SPR score".into(),
                ));
            }
        }
        Ok(CandidateList { items, primary })
    }

    /// Sort (stable, descending by the primary SPR score) and wrap.
    pub fn from_unsorted(mut items: Vec<Item>, primary: ResponseKind) -> Result<Self> {
        for item in &items {
            item.spr(primary)?;
        }
        items.sort_by(|a, b| {
            let sa = a.spr_scores[&primary];
            let sb = b.spr_scores[&primary];
            sb.partial_cmp(&sa).expect("SPR scores are finite")
        });
        Self::new(items, primary)
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn primary(&self) -> ResponseKind {
        self.primary
    }
}

/// One slot of a re-ranked slate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RerankedSlot {
    pub slot: usize,
    pub item: Item,
    /// Predicted response probabilities for this item in this slot, as
    /// evaluated when the slot was chosen.
    pub predicted: BTreeMap<ResponseKind, f64>,
    /// Rank of the item in the input candidate list.
    pub original_position: usize,
}

/// Output of a re-ranker: a permutation of the input candidates with
/// per-slot predicted responses and provenance back to the input order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RerankedList {
    pub slots: Vec<RerankedSlot>,
}

impl RerankedList {
    /// Check the permutation invariant against the input list.
    pub fn is_permutation_of(&self, input: &CandidateList) -> bool {
        if self.slots.len() != input.len() {
            return false;
        }
        let mut ids: Vec<ItemId> = self.slots.iter().map(|s| s.item.id).collect();
        let mut expected: Vec<ItemId> = input.items().iter().map(|i| i.id).collect();
        ids.sort();
        expected.sort();
        ids == expected
            && self
                .slots
                .iter()
                .enumerate()
                .all(|(idx, slot)| slot.slot == idx)
    }

    pub fn item_ids(&self) -> Vec<ItemId> {
        self.slots.iter().map(|s| s.item.id).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn spr_map(click: f64) -> BTreeMap<ResponseKind, f64> {
        let mut m = BTreeMap::new();
        for kind in RESPONSE_KINDS {
            m.insert(kind, click);
        }
        m
    }

    fn item(id: u64, click: f64) -> Item {
        Item::new(
            ItemId(id),
            CreatorId(id),
            ItemType(0),
            vec![0.0; 4],
            spr_map(click),
        )
        .unwrap()
    }

    #[test]
    fn item_clamps_spr_scores() {
        let it = item(1, 0.0);
        assert_eq!(it.spr(ResponseKind::Click).unwrap(), 1e-6);
        assert!(Item::new(
            ItemId(1),
            CreatorId(1),
            ItemType(0),
            vec![],
            BTreeMap::from([(ResponseKind::Click, 1.2)]),
        )
        .is_err());
    }

    #[test]
    fn candidate_list_requires_sorted_input() {
        let sorted = CandidateList::new(vec![item(1, 0.9), item(2, 0.5)], ResponseKind::Click);
        assert!(sorted.is_ok());
        let unsorted = CandidateList::new(vec![item(1, 0.5), item(2, 0.9)], ResponseKind::Click);
        assert!(unsorted.is_err());
    }

    #[test]
    fn from_unsorted_sorts_descending() {
        let list =
            CandidateList::from_unsorted(vec![item(1, 0.2), item(2, 0.8)], ResponseKind::Click)
                .unwrap();
        assert_eq!(list.items()[0].id, ItemId(2));
    }

    #[test]
    fn candidate_list_rejects_mixed_embedding_dims() {
        let a = item(1, 0.9);
        let mut b = item(2, 0.5);
        b.embedding = vec![0.0; 3];
        assert!(CandidateList::new(vec![a, b], ResponseKind::Click).is_err());
    }

    #[test]
    fn empty_candidate_list_rejected() {
        assert!(CandidateList::new(vec![], ResponseKind::Click).is_err());
    }

    #[test]
    fn contributions_from_any_part() {
        let mut labels = ResponseLabels::new();
        labels.insert(ResponseKind::Click, true);
        assert!(!contributions_label(&labels));
        labels.insert(ResponseKind::Skip, true);
        assert!(contributions_label(&labels));
    }

    #[test]
    fn response_kind_round_trips_names() {
        for kind in RESPONSE_KINDS {
            assert_eq!(ResponseKind::parse(kind.as_str()).unwrap(), kind);
        }
        assert!(ResponseKind::parse("vote").is_err());
    }
}
