//! The exponential-decay creator-diversity re-ranker.
//!
//! The k-th item from the same creator (by upstream score order) has its
//! score scaled by alpha^(k-1). Sweeping alpha shows how strongly repeat
//! creators get demoted.
//!
//! Run: `cargo run -p multislot --example exp_decay`

use multislot::core::{
    CandidateList, CreatorId, Item, ItemId, ItemType, ResponseKind, RESPONSE_KINDS,
};
use multislot::reranker::{exp_decay_rerank, DecayConfig};
use std::collections::BTreeMap;

fn item(id: u64, creator: u64, click: f64) -> Item {
    let mut spr = BTreeMap::new();
    for kind in RESPONSE_KINDS {
        spr.insert(kind, click);
    }
    Item::new(ItemId(id), CreatorId(creator), ItemType(0), vec![], spr).unwrap()
}

fn main() {
    // Creator 7 floods the top of the upstream ranking.
    let items = vec![
        item(0, 7, 0.90),
        item(1, 7, 0.88),
        item(2, 7, 0.86),
        item(3, 1, 0.85),
        item(4, 2, 0.80),
        item(5, 7, 0.78),
        item(6, 3, 0.75),
    ];
    let input = CandidateList::new(items, ResponseKind::Click).unwrap();

    for alpha in [1.0, 0.9, 0.6, 0.3] {
        let cfg = DecayConfig {
            alpha,
            response: ResponseKind::Click,
        };
        let out = exp_decay_rerank(&input, &cfg).unwrap();
        let order: Vec<String> = out
            .slots
            .iter()
            .map(|s| format!("{}(c{})", s.item.id.0, s.item.creator_id.0))
            .collect();
        println!("alpha={alpha:<4} -> {}", order.join(" "));
    }
}
