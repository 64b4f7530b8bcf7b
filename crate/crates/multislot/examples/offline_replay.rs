//! Offline policy evaluation from randomized logs.
//!
//! Logs random-bucket episodes, then estimates two deterministic target
//! policies (always-best and always-second-best of the window) with the
//! one-step and full-trajectory importance-sampling estimators, plus the
//! single-slot exact-match replay. The per-depth report shows the
//! full-trajectory weights collapsing exponentially with slot depth.
//!
//! Run: `cargo run -p multislot --example offline_replay`

use multislot::replay::{
    exact_match_replay, full_is_estimate, one_step_is_estimate, sessions_from_episodes,
    variance_report, ReplayOptions,
};
use multislot::simulator::policy::{FixedRankPolicy, RandomPolicy};
use multislot::simulator::{rollout, SimConfig};

fn main() {
    let cfg = SimConfig {
        num_slots: 8,
        episodes: 4000,
        ..SimConfig::default()
    };
    println!(
        "logging {} random-bucket episodes (N={})...",
        cfg.episodes, cfg.num_slots
    );
    let logs = rollout(&RandomPolicy, &cfg, cfg.episodes).unwrap();
    let sessions = sessions_from_episodes(&cfg, &logs.episodes).unwrap();

    let best = FixedRankPolicy::new(0);
    let second = FixedRankPolicy::new(1);
    let opts = ReplayOptions::default();

    println!(
        "\n{:<18} {:>12} {:>12} {:>10}",
        "estimator", "best-of-K", "2nd-best", "ess(best)"
    );
    let one_best = one_step_is_estimate(&sessions, &best, opts).unwrap();
    let one_second = one_step_is_estimate(&sessions, &second, opts).unwrap();
    println!(
        "{:<18} {:>12.4} {:>12.4} {:>10.0}",
        "one_step", one_best.values[0], one_second.values[0], one_best.ess
    );
    let full_best = full_is_estimate(&sessions, &best, opts).unwrap();
    let full_second = full_is_estimate(&sessions, &second, opts).unwrap();
    println!(
        "{:<18} {:>12.4} {:>12.4} {:>10.0}",
        "full_trajectory", full_best.values[0], full_second.values[0], full_best.ess
    );
    let em_best = exact_match_replay(&sessions, &best).unwrap();
    let em_second = exact_match_replay(&sessions, &second).unwrap();
    println!(
        "{:<18} {:>12.4} {:>12.4} {:>10.0}  (per matched slot)",
        "exact_match", em_best.values[0], em_second.values[0], em_best.ess
    );

    println!("\nper-depth diagnostics for the best-of-K target (click objective):");
    println!(
        "{:>5} {:>14} {:>14} {:>12} {:>12}",
        "depth", "full stderr", "one-step stderr", "full ess", "match frac"
    );
    for stats in variance_report(&sessions, &best, 0).unwrap() {
        println!(
            "{:>5} {:>14.4} {:>14.4} {:>12.1} {:>12.4}",
            stats.depth,
            stats.full_stderr,
            stats.one_step_stderr,
            stats.full_ess,
            stats.full_match_fraction
        );
    }
}
