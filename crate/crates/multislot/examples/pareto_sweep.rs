//! Trade-off sweep between click and contribution objectives with
//! Pareto-frontier analysis.
//!
//! Sweeps the contribution coefficient of the combined re-ranking score,
//! estimates each policy offline from random logs, and prints which points
//! survive dominance filtering. Hybrid mode keeps the upstream click score
//! and applies the slot models only to contribution responses; its sweep
//! always contains a point matching the pointwise baseline, so the
//! frontier covers the baseline by construction.
//!
//! Run: `cargo run -p multislot --example pareto_sweep`

use multislot::cli::{cmd_pareto, cmd_simulate, PolicySpec, RunConfig};

fn main() {
    let mut cfg = RunConfig::default();
    cfg.sim.episodes = 2000;

    let dir = std::env::temp_dir().join("multislot_pareto_sweep");
    std::fs::create_dir_all(&dir).unwrap();
    let eps = dir.join("random_episodes.jsonl");
    let summary = cmd_simulate(&cfg, PolicySpec::Random, None, &eps).unwrap();
    println!(
        "logged {} random episodes (mean reward {:.3})",
        summary.episodes, summary.mean_reward
    );

    for hybrid in [false, true] {
        let out = dir.join(format!("pareto_hybrid_{hybrid}.csv"));
        let report = cmd_pareto(&cfg, &eps, &[], hybrid, None, &out).unwrap();
        println!(
            "\nmode: {}",
            if hybrid {
                "hybrid (SPR click kept)"
            } else {
                "full model"
            }
        );
        println!(
            "{:<26} {:>8} {:>14} {:>9}",
            "label", "click", "contributions", "frontier"
        );
        for row in &report.rows {
            println!(
                "{:<26} {:>8.4} {:>14.4} {:>9}",
                row.label,
                row.click,
                row.contributions,
                if row.on_frontier { "yes" } else { "-" }
            );
        }
        println!(
            "frontier size: {} -> {}",
            report.rows.len(),
            report.frontier_size
        );
    }
}
