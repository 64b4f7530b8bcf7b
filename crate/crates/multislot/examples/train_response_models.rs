//! Train slot-response models from simulated logs and measure what the
//! interaction features buy.
//!
//! Generates random-policy episodes, trains a click model twice (with and
//! without the interaction feature group) and compares holdout AUC. Also
//! shows action-value label generation for a decayed multi-step objective.
//!
//! Run: `cargo run -p multislot --example train_response_models`

use multislot::cli::dataset::{owned, split_sessions, training_examples};
use multislot::cli::FeatureToggles;
use multislot::core::ResponseKind;
use multislot::models::{action_value_labels, compute_auc, train, TrainConfig};
use multislot::replay::sessions_from_episodes;
use multislot::simulator::policy::RandomPolicy;
use multislot::simulator::{rollout, SimConfig};

fn main() {
    let cfg = SimConfig {
        episodes: 1500,
        ..SimConfig::default()
    };
    println!("simulating {} random-policy episodes...", cfg.episodes);
    let logs = rollout(&RandomPolicy, &cfg, cfg.episodes).unwrap();
    let sessions = sessions_from_episodes(&cfg, &logs.episodes).unwrap();
    let (train_refs, test_refs) = split_sessions(&sessions, 0.2, cfg.seed).unwrap();
    let (train_sessions, test_sessions) = (owned(&train_refs), owned(&test_refs));

    for with_interaction in [true, false] {
        let mut toggles = FeatureToggles::default();
        toggles.interaction.enabled = with_interaction;
        let schema = toggles.to_schema(ResponseKind::Click, &cfg).unwrap();
        let examples = training_examples(&train_sessions, &schema, ResponseKind::Click).unwrap();
        let report = train(
            ResponseKind::Click,
            schema,
            &examples,
            &TrainConfig::default(),
        )
        .unwrap();

        let holdout =
            training_examples(&test_sessions, &report.model.schema, ResponseKind::Click).unwrap();
        let scores: Vec<f64> = holdout
            .iter()
            .map(|(x, _)| report.model.score_features(x).unwrap())
            .collect();
        let labels: Vec<bool> = holdout.iter().map(|(_, y)| *y).collect();
        let auc = compute_auc(&scores, &labels).unwrap();
        println!(
            "interaction={:<5} features={:<3} iters={:<5} holdout AUC={:.4}",
            with_interaction,
            report.model.schema.len(),
            report.iterations,
            auc
        );
    }

    // Action-value labels: decayed multi-step targets from per-slot rewards.
    let rewards: Vec<f64> = logs.episodes[0].slots.iter().map(|s| s.reward).collect();
    let labels = action_value_labels(&rewards, 0.5).unwrap();
    println!("\nper-slot rewards of episode 0: {rewards:?}");
    println!("action-value labels (lambda=0.5): {labels:?}");
}
