//! Sequential greedy re-ranking of a hand-built candidate list.
//!
//! Builds a list whose upstream scores favor four videos in a row, then
//! re-ranks it with a slot-response model that penalizes repeating the
//! previous slot's type. The deviation constraint keeps every item within
//! three positions of its upstream rank and the top slot pinned.
//!
//! Run: `cargo run -p multislot --example sga_rerank`

use multislot::core::{
    CandidateList, CreatorId, Item, ItemId, ItemType, ResponseKind, RESPONSE_KINDS,
};
use multislot::models::{CombinationConfig, FeatureConfig, FeatureSchema, ResponseModel};
use multislot::reranker::{count_model_calls, sga_rerank_traced, SgaConfig};
use std::collections::BTreeMap;

const TYPE_NAMES: [&str; 3] = ["video", "image", "job"];

fn item(id: u64, creator: u64, ty: usize, click: f64) -> Item {
    let mut spr = BTreeMap::new();
    for kind in RESPONSE_KINDS {
        spr.insert(kind, click);
    }
    Item::new(
        ItemId(id),
        CreatorId(creator),
        ItemType(ty),
        vec![0.0; 2],
        spr,
    )
    .unwrap()
}

fn main() {
    // Upstream (SPR) order: videos stacked on top.
    let items = vec![
        item(0, 1, 0, 0.62),
        item(1, 1, 0, 0.60),
        item(2, 2, 0, 0.58),
        item(3, 2, 0, 0.56),
        item(4, 3, 1, 0.54),
        item(5, 3, 1, 0.52),
        item(6, 4, 2, 0.50),
        item(7, 4, 2, 0.48),
    ];
    let input = CandidateList::new(items, ResponseKind::Click).unwrap();

    // A click model over the SPR logit plus a same-type repetition penalty.
    let schema = FeatureSchema::build(FeatureConfig::new(
        ResponseKind::Click,
        TYPE_NAMES.len(),
        2,
        3,
    ))
    .unwrap();
    let mut weights = vec![0.0; schema.len()];
    weights[schema.index_of("spr_logit[click]").unwrap()] = 1.0;
    for ty in 0..TYPE_NAMES.len() {
        weights[schema.index_of(&format!("cross[{ty}x{ty}]")).unwrap()] = -1.5;
    }
    let model = ResponseModel::new(ResponseKind::Click, schema, weights).unwrap();

    let cfg = SgaConfig {
        window: 3,
        max_deviation: Some(3),
        pin_top_slot: true,
        models: BTreeMap::from([(ResponseKind::Click, model)]),
        combination: CombinationConfig::single(ResponseKind::Click),
    };

    let (reranked, trace) = sga_rerank_traced(&input, &cfg).unwrap();

    println!("slot  item  type   spr->rank  p(click)");
    for slot in &reranked.slots {
        println!(
            "{:>4}  {:>4}  {:<6} {:>6}     {:.3}",
            slot.slot,
            slot.item.id.0,
            TYPE_NAMES[slot.item.item_type.0],
            slot.original_position,
            slot.predicted[&ResponseKind::Click],
        );
    }
    let calls = count_model_calls(&trace)[&ResponseKind::Click];
    println!(
        "\nmodel calls: {calls} (bound K*(N-1) = {})",
        cfg.window * (input.len() - 1)
    );
    println!(
        "permutation of input: {}",
        reranked.is_permutation_of(&input)
    );
}
