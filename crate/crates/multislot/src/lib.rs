//! Multi-slot slate re-ranking toolkit.
//!
//! A slate shown to a user is more than the sum of its items: what sits in
//! the slots above a candidate changes how the user responds to it. This
//! crate builds ordered slates around that observation:
//!
//! - [`reranker`] — sequential greedy list construction over a top-K
//!   candidate window, with position-deviation constraints and an
//!   exponential-decay creator-diversity baseline. Scoring cost stays
//!   linear in the list length (at most K model calls per slot).
//! - [`models`] — per-response logistic slot models over upstream-score,
//!   current-slot and interaction features; deterministic full-batch
//!   training, AUC evaluation, score combination, action-value labels.
//! - [`simulator`] — a seeded sequential-interaction environment with an
//!   oracle user-choice model, a policy zoo, and parallel rollouts whose
//!   results never depend on worker count.
//! - [`replay`] — offline off-policy evaluation of target policies from
//!   randomized logs: full-trajectory and one-step importance sampling,
//!   exact-match replay, per-depth variance diagnostics, and
//!   Pareto-frontier analysis over multi-objective estimates.
//! - [`cli`] — the batch front door used by the `multislot` binary:
//!   declarative JSON run configs and the simulate / train / benchmark /
//!   replay / pareto commands.
//!
//! ## Examples
//!
//! Each major capability has a runnable example:
//!
//! | Example | Shows |
//! |---------|-------|
//! | `sga_rerank` | greedy re-ranking with interaction models and constraints |
//! | `exp_decay` | the creator-diversity decay baseline across alpha values |
//! | `environment_loop` | the reset/step environment contract, agent-driven |
//! | `policy_benchmark` | the four-policy zoo on the simulator |
//! | `train_response_models` | model training and the interaction-feature AUC lift |
//! | `offline_replay` | importance-sampling estimators and depth diagnostics |
//! | `pareto_sweep` | click/contribution trade-off sweeps and the frontier |
//!
//! ```bash
//! cargo run -p multislot --example sga_rerank
//! cargo run -p multislot --example policy_benchmark
//! ```
//!
//! ## Command line
//!
//! ```bash
//! multislot simulate  --config run.json --out episodes.jsonl
//! multislot train     --config run.json --episodes episodes.jsonl --out models/
//! multislot benchmark --config run.json --out benchmark.csv
//! multislot replay    --config run.json --episodes episodes.jsonl --out estimates.csv
//! multislot pareto    --config run.json --episodes episodes.jsonl --out frontier.csv
//! ```
//!
//! Common flags: `--seed` overrides the configured master seed,
//! `--workers` bounds the worker pool (`MULTISLOT_WORKERS` works too), and
//! every command is byte-reproducible given (config, inputs, seed).

pub mod cli;
pub mod core;
pub mod error;
pub mod models;
pub mod replay;
pub mod reranker;
pub mod simulator;

pub use error::{Error, Result};
