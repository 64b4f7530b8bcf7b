//! Driving the slate environment step by step.
//!
//! The reset/step contract is what an external agent (for example an RL
//! training loop) programs against: reset yields a fresh sorted candidate
//! list, each step places one of the top-K remaining items, returns the
//! sampled per-response labels and reward, and finishes when every slot is
//! filled. This example drives it with a small hand-rolled agent that
//! avoids repeating the previous slot's item type.
//!
//! Run: `cargo run -p multislot --example environment_loop`

use multislot::core::RESPONSE_KINDS;
use multislot::simulator::{SimConfig, SlateEnv};

fn main() {
    let cfg = SimConfig {
        num_slots: 10,
        ..SimConfig::default()
    };

    for seed in [1u64, 2] {
        let mut env = SlateEnv::reset(&cfg, seed).unwrap();
        println!("episode seed {seed}: {} candidates", env.items().len());
        let mut total = 0.0;
        while !env.done() {
            // Pick the first window item whose type differs from the last
            // placed item; fall back to the top item.
            let action = {
                let obs = env.observation();
                let prev_type = obs.placed.last().map(|p| p.item_type);
                obs.window
                    .iter()
                    .position(|item| prev_type != Some(item.item_type))
                    .unwrap_or(0)
            };
            let slot = env.slot();
            let out = env.step(action).unwrap();
            total += out.reward;
            let fired: Vec<&str> = RESPONSE_KINDS
                .iter()
                .filter(|k| out.labels[k])
                .map(|k| k.as_str())
                .collect();
            println!(
                "  slot {slot:>2}: action {action} reward {:+.1} labels [{}]",
                out.reward,
                fired.join(" ")
            );
        }
        println!("  total reward {total:.1}\n");
    }
}
