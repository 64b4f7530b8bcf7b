//! Acting policies over the simulator's window observations.
//!
//! A policy sees the top-K remaining candidates (SPR order) plus the items
//! already placed, picks a window index, and exposes exact propensities
//! over the window. Deterministic policies report 1 for their choice and 0
//! elsewhere; stochastic policies report their true action distribution.
//! Policies are read-only after construction and usable from many rollout
//! workers at once.

use crate::core::Item;
use crate::error::{Error, Result};
use crate::models::CombinationConfig;
use crate::reranker::{score_candidate, ModelSet};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// What a policy observes before acting.
#[derive(Debug)]
pub struct Observation<'a> {
    pub slot_index: usize,
    /// Top-K remaining candidates in SPR order.
    pub window: Vec<&'a Item>,
    /// Items already placed, in slot order.
    pub placed: Vec<&'a Item>,
    pub num_types: usize,
}

/// A slate-construction policy.
pub trait Policy: Send + Sync {
    fn name(&self) -> &str;

    /// Choose a window index in [0, window.len()).
    fn act(&self, obs: &Observation<'_>, rng: &mut ChaCha8Rng) -> usize;

    /// Exact action distribution over the window; sums to 1.
    fn propensities(&self, obs: &Observation<'_>) -> Vec<f64>;
}

/// Uniformly random choice over the window.
pub struct RandomPolicy;

impl Policy for RandomPolicy {
    fn name(&self) -> &str {
        "random"
    }

    fn act(&self, obs: &Observation<'_>, rng: &mut ChaCha8Rng) -> usize {
        rng.random_range(0..obs.window.len())
    }

    fn propensities(&self, obs: &Observation<'_>) -> Vec<f64> {
        let w = obs.window.len();
        vec![1.0 / w as f64; w]
    }
}

/// Always take the top item by upstream SPR score: the behavior of a
/// ranking stack without a model-based re-ranker.
pub struct PointwiseGreedyPolicy;

impl Policy for PointwiseGreedyPolicy {
    fn name(&self) -> &str {
        "pointwise_greedy"
    }

    fn act(&self, _obs: &Observation<'_>, _rng: &mut ChaCha8Rng) -> usize {
        0
    }

    fn propensities(&self, obs: &Observation<'_>) -> Vec<f64> {
        let mut p = vec![0.0; obs.window.len()];
        p[0] = 1.0;
        p
    }
}

/// Always take a fixed window rank (clamped to the window); rank 0 is the
/// best remaining item, rank 1 the second best. Used to validate the
/// replay estimators.
pub struct FixedRankPolicy {
    rank: usize,
    label: String,
}

impl FixedRankPolicy {
    pub fn new(rank: usize) -> Self {
        FixedRankPolicy {
            rank,
            label: format!("fixed_rank_{rank}"),
        }
    }

    pub fn named(rank: usize, label: impl Into<String>) -> Self {
        FixedRankPolicy {
            rank,
            label: label.into(),
        }
    }
}

impl Policy for FixedRankPolicy {
    fn name(&self) -> &str {
        &self.label
    }

    fn act(&self, obs: &Observation<'_>, _rng: &mut ChaCha8Rng) -> usize {
        self.rank.min(obs.window.len() - 1)
    }

    fn propensities(&self, obs: &Observation<'_>) -> Vec<f64> {
        let mut p = vec![0.0; obs.window.len()];
        p[self.rank.min(obs.window.len() - 1)] = 1.0;
        p
    }
}

/// Greedy argmax of the combined model score over the window, conditioned
/// on the placed items. With the oracle's own models this is the oracle
/// sequential-greedy policy; with trained models, the estimated one.
pub struct SequentialGreedyPolicy {
    label: String,
    models: ModelSet,
    combination: CombinationConfig,
}

impl SequentialGreedyPolicy {
    pub fn new(
        label: impl Into<String>,
        models: ModelSet,
        combination: CombinationConfig,
    ) -> Result<Self> {
        let policy = SequentialGreedyPolicy {
            label: label.into(),
            models,
            combination,
        };
        for kind in policy.combination.active_responses() {
            if !policy.models.contains_key(&kind) {
                return Err(Error::MissingResponse(kind));
            }
        }
        Ok(policy)
    }

    fn best_action(&self, obs: &Observation<'_>) -> usize {
        let mut best = 0usize;
        let mut best_score = f64::NEG_INFINITY;
        for (idx, item) in obs.window.iter().enumerate() {
            let (score, _) = score_candidate(
                item,
                &obs.placed,
                obs.slot_index,
                obs.num_types,
                &self.models,
                &self.combination,
            )
            .expect("policy models match simulator items");
            if score > best_score {
                best_score = score;
                best = idx;
            }
        }
        best
    }
}

impl Policy for SequentialGreedyPolicy {
    fn name(&self) -> &str {
        &self.label
    }

    fn act(&self, obs: &Observation<'_>, _rng: &mut ChaCha8Rng) -> usize {
        self.best_action(obs)
    }

    fn propensities(&self, obs: &Observation<'_>) -> Vec<f64> {
        let mut p = vec![0.0; obs.window.len()];
        p[self.best_action(obs)] = 1.0;
        p
    }
}

/// Sequential form of the exponential-decay creator-diversity re-ranker:
/// each window item's designated SPR score is scaled by alpha^(items by the
/// same creator already placed), and the argmax wins.
pub struct ExpDecayPolicy {
    pub alpha: f64,
    pub response: crate::core::ResponseKind,
}

impl ExpDecayPolicy {
    fn best_action(&self, obs: &Observation<'_>) -> usize {
        let mut best = 0usize;
        let mut best_score = f64::NEG_INFINITY;
        for (idx, item) in obs.window.iter().enumerate() {
            let repeats = obs
                .placed
                .iter()
                .filter(|p| p.creator_id == item.creator_id)
                .count();
            let score = item.spr_scores.get(&self.response).copied().unwrap_or(0.0)
                * self.alpha.powi(repeats as i32);
            if score > best_score {
                best_score = score;
                best = idx;
            }
        }
        best
    }
}

impl Policy for ExpDecayPolicy {
    fn name(&self) -> &str {
        "exp_decay"
    }

    fn act(&self, obs: &Observation<'_>, _rng: &mut ChaCha8Rng) -> usize {
        self.best_action(obs)
    }

    fn propensities(&self, obs: &Observation<'_>) -> Vec<f64> {
        let mut p = vec![0.0; obs.window.len()];
        p[self.best_action(obs)] = 1.0;
        p
    }
}

/// Names of the built-in policies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyName {
    Random,
    PointwiseGreedy,
    SequentialGreedyOracle,
    SequentialGreedyEstimated,
}

impl PolicyName {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(PolicyName::Random),
            "pointwise_greedy" | "pointwise" => Ok(PolicyName::PointwiseGreedy),
            "sequential_greedy_oracle" | "sga_oracle" => Ok(PolicyName::SequentialGreedyOracle),
            "sequential_greedy_estimated" | "sga_estimated" => {
                Ok(PolicyName::SequentialGreedyEstimated)
            }
            other => Err(Error::InvalidConfig(format!("unknown policy: {other}"))),
        }
    }
}

/// Build the benchmark policy zoo.
///
/// The estimated variant needs models trained on logged episodes; passing
/// `None` is an error so the caller either trains inline or loads an
/// artifact first.
pub fn policy_zoo(
    cfg: &super::SimConfig,
    estimated_models: Option<ModelSet>,
) -> Result<Vec<Box<dyn Policy>>> {
    let oracle = cfg.oracle_models()?;
    let reward_responses = cfg.reward.active_responses();
    let oracle_subset: ModelSet = oracle
        .into_iter()
        .filter(|(k, _)| reward_responses.contains(k))
        .collect();
    let estimated = estimated_models.ok_or_else(|| {
        Error::InvalidConfig("estimated policy requires trained response models".into())
    })?;
    Ok(vec![
        Box::new(RandomPolicy),
        Box::new(PointwiseGreedyPolicy),
        Box::new(SequentialGreedyPolicy::new(
            "sequential_greedy_oracle",
            oracle_subset,
            cfg.reward.clone(),
        )?),
        Box::new(SequentialGreedyPolicy::new(
            "sequential_greedy_estimated",
            estimated,
            cfg.reward.clone(),
        )?),
    ])
}
