//! Offline off-policy evaluation over randomized-bucket logs.
//!
//! Sessions logged under a known stochastic policy are replayed against a
//! target policy by importance sampling. Two weightings are offered: the
//! full-trajectory product, which is unbiased but whose variance grows
//! exponentially with slot depth, and the one-step per-slot ratio, which is
//! slightly biased but low variance. A single-slot exact-match replay and a
//! per-depth variance report round out the toolkit, plus Pareto-frontier
//! analysis over multi-objective estimates.

pub mod pareto;

pub use pareto::{non_dominated_flags, pareto_frontier, ParetoPoint};

use crate::core::{CandidateList, Item, RESPONSE_KINDS};
use crate::error::{Error, Result};
use crate::simulator::{episode_rng, generate_candidates, Episode, Observation, Policy, SimConfig};
use serde::{Deserialize, Serialize};

/// Canonical objective order for logged reward vectors: the five primary
/// responses followed by the derived contributions indicator.
pub const OBJECTIVE_NAMES: [&str; 6] =
    ["click", "like", "comment", "share", "skip", "contributions"];

pub const NUM_OBJECTIVES: usize = OBJECTIVE_NAMES.len();

/// Index of a named objective in the canonical reward vector.
pub fn objective_index(name: &str) -> Result<usize> {
    OBJECTIVE_NAMES
        .iter()
        .position(|n| *n == name)
        .ok_or_else(|| Error::InvalidConfig(format!("unknown objective: {name}")))
}

/// One logged slot: the action taken, its logging propensity, the window it
/// was chosen from, and the observed reward vector.
#[derive(Debug, Clone)]
pub struct LoggedSlot {
    /// Window as indices into the session's candidate list, SPR order.
    pub window: Vec<usize>,
    pub action: usize,
    /// Logging policy's probability of the logged action.
    pub propensity: f64,
    /// One entry per canonical objective.
    pub rewards: [f64; NUM_OBJECTIVES],
}

/// One randomized-bucket session, with everything needed to re-run a
/// target policy slot by slot.
#[derive(Debug, Clone)]
pub struct LoggedSession {
    pub items: CandidateList,
    pub slots: Vec<LoggedSlot>,
    pub num_types: usize,
}

impl LoggedSession {
    fn validate(&self) -> Result<()> {
        for slot in &self.slots {
            if !(slot.propensity > 0.0 && slot.propensity <= 1.0) {
                return Err(Error::ZeroPropensity(slot.propensity));
            }
            if slot.action >= slot.window.len() {
                return Err(Error::ActionOutOfRange {
                    action: slot.action,
                    window: slot.window.len(),
                });
            }
            if slot.rewards.iter().any(|r| !r.is_finite()) {
                return Err(Error::MalformedData("non-finite logged reward".into()));
            }
        }
        Ok(())
    }

    /// Walk the session, yielding the target policy's propensity for each
    /// logged action in slot order.
    fn target_propensities(&self, policy: &dyn Policy) -> Vec<f64> {
        let items = self.items.items();
        let mut placed: Vec<&Item> = Vec::new();
        let mut out = Vec::with_capacity(self.slots.len());
        for (slot_index, slot) in self.slots.iter().enumerate() {
            let obs = Observation {
                slot_index,
                window: slot.window.iter().map(|&p| &items[p]).collect(),
                placed: placed.clone(),
                num_types: self.num_types,
            };
            let probs = policy.propensities(&obs);
            out.push(probs.get(slot.action).copied().unwrap_or(0.0));
            placed.push(&items[slot.window[slot.action]]);
        }
        out
    }

    /// Deterministic target actions per slot (for exact-match replay).
    fn target_actions(&self, policy: &dyn Policy, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<usize> {
        let items = self.items.items();
        let mut placed: Vec<&Item> = Vec::new();
        let mut out = Vec::with_capacity(self.slots.len());
        for (slot_index, slot) in self.slots.iter().enumerate() {
            let obs = Observation {
                slot_index,
                window: slot.window.iter().map(|&p| &items[p]).collect(),
                placed: placed.clone(),
                num_types: self.num_types,
            };
            out.push(policy.act(&obs, rng));
            placed.push(&items[slot.window[slot.action]]);
        }
        out
    }
}

/// Which weighting produced an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    FullTrajectory,
    OneStep,
    ExactMatch,
}

impl EstimatorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorKind::FullTrajectory => "full_trajectory",
            EstimatorKind::OneStep => "one_step",
            EstimatorKind::ExactMatch => "exact_match",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "full" | "full_trajectory" => Ok(EstimatorKind::FullTrajectory),
            "one_step" | "onestep" => Ok(EstimatorKind::OneStep),
            "exact_match" | "exact" => Ok(EstimatorKind::ExactMatch),
            other => Err(Error::InvalidConfig(format!("unknown estimator: {other}"))),
        }
    }
}

/// Estimator options.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReplayOptions {
    /// Normalize by the realized weight mass instead of the session count.
    pub self_normalized: bool,
}

/// Estimated per-objective reward of a target policy.
#[derive(Debug, Clone)]
pub struct ReplayEstimate {
    pub estimator: EstimatorKind,
    /// Per-session reward estimate per canonical objective (per matched
    /// slot for the exact-match estimator).
    pub values: [f64; NUM_OBJECTIVES],
    pub stderr: [f64; NUM_OBJECTIVES],
    /// Effective sample size of the realized weights.
    pub ess: f64,
    pub sessions: usize,
    pub total_slots: usize,
}

impl ReplayEstimate {
    pub fn value(&self, objective: &str) -> Result<f64> {
        Ok(self.values[objective_index(objective)?])
    }

    /// Per-slot view of a per-session estimate.
    pub fn per_slot_values(&self) -> [f64; NUM_OBJECTIVES] {
        if self.estimator == EstimatorKind::ExactMatch || self.total_slots == 0 {
            return self.values;
        }
        let scale = self.sessions as f64 / self.total_slots as f64;
        let mut out = self.values;
        for v in &mut out {
            *v *= scale;
        }
        out
    }
}

fn weighted_estimate(
    sessions: &[LoggedSession],
    per_slot_weights: Vec<Vec<f64>>,
    kind: EstimatorKind,
    options: ReplayOptions,
) -> ReplayEstimate {
    let m = sessions.len() as f64;
    let total_slots: usize = sessions.iter().map(|s| s.slots.len()).sum();

    // Per-session weighted reward sums, per objective.
    let mut session_values: Vec<[f64; NUM_OBJECTIVES]> = Vec::with_capacity(sessions.len());
    let mut weight_sum = 0.0;
    let mut weight_sq_sum = 0.0;
    let mut session_weight_sums: Vec<f64> = Vec::with_capacity(sessions.len());
    for (session, weights) in sessions.iter().zip(&per_slot_weights) {
        let mut acc = [0.0; NUM_OBJECTIVES];
        let mut wsum = 0.0;
        for (slot, &w) in session.slots.iter().zip(weights) {
            for (o, r) in slot.rewards.iter().enumerate() {
                acc[o] += r * w;
            }
            weight_sum += w;
            weight_sq_sum += w * w;
            wsum += w;
        }
        session_values.push(acc);
        session_weight_sums.push(wsum);
    }

    let ess = if weight_sq_sum > 0.0 {
        weight_sum * weight_sum / weight_sq_sum
    } else {
        0.0
    };

    let mut values = [0.0; NUM_OBJECTIVES];
    let mut stderr = [0.0; NUM_OBJECTIVES];
    if options.self_normalized {
        // Ratio estimator: weighted per-slot mean rescaled to the average
        // session length; stderr via first-order linearization.
        let mean_weight = weight_sum / m;
        let slots_per_session = total_slots as f64 / m;
        for o in 0..NUM_OBJECTIVES {
            if weight_sum <= 0.0 {
                values[o] = f64::NAN;
                continue;
            }
            let ratio = session_values.iter().map(|v| v[o]).sum::<f64>() / weight_sum;
            values[o] = ratio * slots_per_session;
            if sessions.len() > 1 {
                // First-order linearization of the ratio estimator.
                let var = session_values
                    .iter()
                    .zip(&session_weight_sums)
                    .map(|(v, s)| {
                        let e = (v[o] - ratio * s) / mean_weight;
                        e * e
                    })
                    .sum::<f64>()
                    / (m - 1.0);
                stderr[o] = slots_per_session * (var / m).sqrt();
            }
        }
    } else {
        for o in 0..NUM_OBJECTIVES {
            let mean = session_values.iter().map(|v| v[o]).sum::<f64>() / m;
            values[o] = mean;
            if sessions.len() > 1 {
                let var = session_values
                    .iter()
                    .map(|v| (v[o] - mean).powi(2))
                    .sum::<f64>()
                    / (m - 1.0);
                stderr[o] = (var / m).sqrt();
            }
        }
    }

    ReplayEstimate {
        estimator: kind,
        values,
        stderr,
        ess,
        sessions: sessions.len(),
        total_slots,
    }
}

fn validate_sessions(sessions: &[LoggedSession]) -> Result<()> {
    if sessions.is_empty() {
        return Err(Error::EmptyInput("logged sessions"));
    }
    for session in sessions {
        session.validate()?;
    }
    Ok(())
}

/// Full-trajectory importance sampling: the weight at slot i is the product
/// of per-slot propensity ratios over the whole prefix. Unbiased, but the
/// variance grows exponentially with depth.
pub fn full_is_estimate(
    sessions: &[LoggedSession],
    policy: &dyn Policy,
    options: ReplayOptions,
) -> Result<ReplayEstimate> {
    validate_sessions(sessions)?;
    let weights: Vec<Vec<f64>> = sessions
        .iter()
        .map(|session| {
            let target = session.target_propensities(policy);
            let mut acc = 1.0;
            session
                .slots
                .iter()
                .zip(target)
                .map(|(slot, p)| {
                    acc *= p / slot.propensity;
                    acc
                })
                .collect()
        })
        .collect();
    Ok(weighted_estimate(
        sessions,
        weights,
        EstimatorKind::FullTrajectory,
        options,
    ))
}

/// One-step importance sampling: each slot is weighted independently by its
/// own propensity ratio. Slightly biased, low variance.
pub fn one_step_is_estimate(
    sessions: &[LoggedSession],
    policy: &dyn Policy,
    options: ReplayOptions,
) -> Result<ReplayEstimate> {
    validate_sessions(sessions)?;
    let weights: Vec<Vec<f64>> = sessions
        .iter()
        .map(|session| {
            let target = session.target_propensities(policy);
            session
                .slots
                .iter()
                .zip(target)
                .map(|(slot, p)| p / slot.propensity)
                .collect()
        })
        .collect();
    Ok(weighted_estimate(
        sessions,
        weights,
        EstimatorKind::OneStep,
        options,
    ))
}

/// Single-slot match replay: average the logged rewards over slots where
/// the target policy reproduces the logged action. Values are per matched
/// slot; zero matches yields NaN values with effective sample size 0.
pub fn exact_match_replay(
    sessions: &[LoggedSession],
    policy: &dyn Policy,
) -> Result<ReplayEstimate> {
    validate_sessions(sessions)?;
    let total_slots: usize = sessions.iter().map(|s| s.slots.len()).sum();
    let mut matched = 0usize;
    let mut sums = [0.0; NUM_OBJECTIVES];
    let mut sq_sums = [0.0; NUM_OBJECTIVES];
    for (idx, session) in sessions.iter().enumerate() {
        // Stochastic policies act from a session-derived stream so the
        // replay stays reproducible.
        let mut rng = episode_rng(0x5eed_5eed, idx as u64);
        let actions = session.target_actions(policy, &mut rng);
        for (slot, action) in session.slots.iter().zip(actions) {
            if slot.action == action {
                matched += 1;
                for (o, r) in slot.rewards.iter().enumerate() {
                    sums[o] += r;
                    sq_sums[o] += r * r;
                }
            }
        }
    }
    let mut values = [f64::NAN; NUM_OBJECTIVES];
    let mut stderr = [0.0; NUM_OBJECTIVES];
    if matched > 0 {
        let n = matched as f64;
        for o in 0..NUM_OBJECTIVES {
            values[o] = sums[o] / n;
            if matched > 1 {
                let var = (sq_sums[o] - n * values[o] * values[o]) / (n - 1.0);
                stderr[o] = (var.max(0.0) / n).sqrt();
            }
        }
    }
    Ok(ReplayEstimate {
        estimator: EstimatorKind::ExactMatch,
        values,
        stderr,
        ess: matched as f64,
        sessions: sessions.len(),
        total_slots,
    })
}

/// Per-depth estimator diagnostics for one objective.
#[derive(Debug, Clone)]
pub struct DepthStats {
    /// 1-based depth: the number of slots in the trajectory prefix.
    pub depth: usize,
    pub sessions: usize,
    /// Mean weighted reward at this depth under each weighting.
    pub full_value: f64,
    pub one_step_value: f64,
    pub full_stderr: f64,
    pub one_step_stderr: f64,
    pub full_ess: f64,
    pub one_step_ess: f64,
    /// Fraction of sessions whose full-trajectory weight is still positive.
    pub full_match_fraction: f64,
}

/// Per-depth variance diagnostics: how the two weightings behave as the
/// trajectory prefix deepens.
pub fn variance_report(
    sessions: &[LoggedSession],
    policy: &dyn Policy,
    objective: usize,
) -> Result<Vec<DepthStats>> {
    validate_sessions(sessions)?;
    if sessions.len() < 2 {
        return Err(Error::InvalidConfig(
            "variance report needs >= 2 sessions".into(),
        ));
    }
    if objective >= NUM_OBJECTIVES {
        return Err(Error::DimensionMismatch {
            expected: NUM_OBJECTIVES,
            got: objective,
        });
    }
    let max_depth = sessions.iter().map(|s| s.slots.len()).max().unwrap_or(0);
    let mut report = Vec::with_capacity(max_depth);
    let target: Vec<Vec<f64>> = sessions
        .iter()
        .map(|s| s.target_propensities(policy))
        .collect();

    for depth in 1..=max_depth {
        let i = depth - 1;
        let mut full: Vec<f64> = Vec::new();
        let mut one: Vec<f64> = Vec::new();
        let mut full_w: Vec<f64> = Vec::new();
        let mut one_w: Vec<f64> = Vec::new();
        for (session, probs) in sessions.iter().zip(&target) {
            if session.slots.len() < depth {
                continue;
            }
            let ratio = |j: usize| probs[j] / session.slots[j].propensity;
            let w_full: f64 = (0..depth).map(ratio).product();
            let w_one = ratio(i);
            let r = session.slots[i].rewards[objective];
            full.push(r * w_full);
            one.push(r * w_one);
            full_w.push(w_full);
            one_w.push(w_one);
        }
        let n = full.len() as f64;
        let mean = |v: &[f64]| v.iter().sum::<f64>() / n;
        let se = |v: &[f64]| {
            if v.len() > 1 {
                let mu = mean(v);
                let var = v.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (n - 1.0);
                (var / n).sqrt()
            } else {
                0.0
            }
        };
        let ess = |w: &[f64]| {
            let s: f64 = w.iter().sum();
            let s2: f64 = w.iter().map(|x| x * x).sum();
            if s2 > 0.0 {
                s * s / s2
            } else {
                0.0
            }
        };
        report.push(DepthStats {
            depth,
            sessions: full.len(),
            full_value: mean(&full),
            one_step_value: mean(&one),
            full_stderr: se(&full),
            one_step_stderr: se(&one),
            full_ess: ess(&full_w),
            one_step_ess: ess(&one_w),
            full_match_fraction: full_w.iter().filter(|w| **w > 0.0).count() as f64 / n,
        });
    }
    Ok(report)
}

/// Rebuild logged sessions from an episode log and the config that
/// produced it. Items regenerate from each episode's seed; the logged
/// windows double as an integrity check.
pub fn sessions_from_episodes(cfg: &SimConfig, episodes: &[Episode]) -> Result<Vec<LoggedSession>> {
    if episodes.is_empty() {
        return Err(Error::EmptyInput("episodes"));
    }
    cfg.validate()?;
    let current = cfg.hash();
    let mut sessions = Vec::with_capacity(episodes.len());
    for (session_idx, episode) in episodes.iter().enumerate() {
        if episode.config_hash != current {
            return Err(Error::ConfigHashMismatch {
                logged: episode.config_hash.clone(),
                current,
            });
        }
        let mut rng = episode_rng(cfg.seed, 2 * episode.seed);
        let items = generate_candidates(cfg, &mut rng)?;
        let mut remaining: Vec<usize> = (0..items.len()).collect();
        let mut slots = Vec::with_capacity(episode.slots.len());
        for (slot_idx, logged) in episode.slots.iter().enumerate() {
            let w = cfg.window.min(remaining.len());
            let window: Vec<usize> = remaining[..w].to_vec();
            let ids: Vec<u64> = window.iter().map(|&p| items.items()[p].id.0).collect();
            if ids != logged.window_item_ids {
                return Err(Error::WindowMismatch {
                    session: session_idx,
                    slot: slot_idx,
                });
            }
            if logged.action >= w {
                return Err(Error::ActionOutOfRange {
                    action: logged.action,
                    window: w,
                });
            }
            let propensity = logged
                .propensities
                .get(logged.action)
                .copied()
                .ok_or_else(|| Error::MalformedData("propensity vector too short".into()))?;
            if propensity <= 0.0 {
                return Err(Error::ZeroPropensity(propensity));
            }
            let labels = logged.labels_bool();
            let mut rewards = [0.0; NUM_OBJECTIVES];
            for (o, kind) in RESPONSE_KINDS.iter().enumerate() {
                rewards[o] = if labels.get(kind).copied().unwrap_or(false) {
                    1.0
                } else {
                    0.0
                };
            }
            rewards[NUM_OBJECTIVES - 1] = if logged.contributions() { 1.0 } else { 0.0 };
            slots.push(LoggedSlot {
                window,
                action: logged.action,
                propensity,
                rewards,
            });
            remaining.remove(logged.action);
        }
        sessions.push(LoggedSession {
            items,
            slots,
            num_types: cfg.num_types(),
        });
    }
    Ok(sessions)
}

/// Scalar estimate of a reward combination from per-objective values.
pub fn combined_value(estimate: &ReplayEstimate, reward: &crate::models::CombinationConfig) -> f64 {
    reward
        .coefficients()
        .iter()
        .map(|(kind, c)| {
            let idx = RESPONSE_KINDS.iter().position(|k| k == kind).unwrap_or(0);
            c * estimate.values[idx]
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{CreatorId, ItemId, ItemType, ResponseKind};
    use crate::simulator::policy::{FixedRankPolicy, PointwiseGreedyPolicy, RandomPolicy};
    use crate::simulator::rollout;
    use std::collections::BTreeMap;

    fn sim_cfg(num_slots: usize, episodes: usize) -> SimConfig {
        SimConfig {
            num_slots,
            episodes,
            seed: 21,
            ..SimConfig::default()
        }
    }

    fn random_sessions(num_slots: usize, episodes: usize) -> (SimConfig, Vec<LoggedSession>) {
        let cfg = sim_cfg(num_slots, episodes);
        let result = rollout(&RandomPolicy, &cfg, episodes).unwrap();
        let sessions = sessions_from_episodes(&cfg, &result.episodes).unwrap();
        (cfg, sessions)
    }

    fn empirical_means(sessions: &[LoggedSession]) -> [f64; NUM_OBJECTIVES] {
        let mut sums = [0.0; NUM_OBJECTIVES];
        for s in sessions {
            for slot in &s.slots {
                for (o, r) in slot.rewards.iter().enumerate() {
                    sums[o] += r;
                }
            }
        }
        for v in &mut sums {
            *v /= sessions.len() as f64;
        }
        sums
    }

    #[test]
    fn self_evaluation_recovers_empirical_mean() {
        let (_, sessions) = random_sessions(6, 200);
        let expected = empirical_means(&sessions);
        for est in [
            full_is_estimate(&sessions, &RandomPolicy, ReplayOptions::default()).unwrap(),
            one_step_is_estimate(&sessions, &RandomPolicy, ReplayOptions::default()).unwrap(),
            full_is_estimate(
                &sessions,
                &RandomPolicy,
                ReplayOptions {
                    self_normalized: true,
                },
            )
            .unwrap(),
        ] {
            for (o, (got, want)) in est.values.iter().zip(&expected).enumerate() {
                assert!((got - want).abs() < 1e-12, "objective {o}: {got} vs {want}");
            }
        }
    }

    fn toy_item(id: u64, ty: usize, click: f64) -> crate::core::Item {
        let mut spr = BTreeMap::new();
        for kind in RESPONSE_KINDS {
            spr.insert(kind, click);
        }
        crate::core::Item::new(ItemId(id), CreatorId(id), ItemType(ty), vec![0.0], spr).unwrap()
    }

    fn toy_session(action0: usize, click0: f64, click1: f64) -> LoggedSession {
        let items = CandidateList::new(
            vec![toy_item(0, 0, 0.6), toy_item(1, 1, 0.5)],
            ResponseKind::Click,
        )
        .unwrap();
        let remaining = if action0 == 0 { 1 } else { 0 };
        let mut r0 = [0.0; NUM_OBJECTIVES];
        r0[0] = click0;
        let mut r1 = [0.0; NUM_OBJECTIVES];
        r1[0] = click1;
        LoggedSession {
            items,
            num_types: 2,
            slots: vec![
                LoggedSlot {
                    window: vec![0, 1],
                    action: action0,
                    propensity: 0.5,
                    rewards: r0,
                },
                LoggedSlot {
                    window: vec![remaining],
                    action: 0,
                    propensity: 1.0,
                    rewards: r1,
                },
            ],
        }
    }

    /// Exact enumeration over every possible log realization of a 2-slot,
    /// K=2, 2-type instance: the averaged full-trajectory estimate must
    /// equal the true policy value with no sampling error.
    #[test]
    fn full_is_unbiased_under_exact_enumeration() {
        // Ground-truth click probabilities of the logging environment.
        let q0 = [0.6, 0.5]; // slot 0, by item
        let q1 = |item: usize| if item == 0 { 0.4 } else { 0.3 }; // slot 1

        // Target policy: second-best first, then the remainder.
        let target = FixedRankPolicy::new(1);
        // True value of the target: places item1 then item0.
        let true_value = q0[1] + q1(0);

        let mut averaged = 0.0;
        for action0 in [0usize, 1] {
            let placed0 = action0;
            let placed1 = 1 - action0;
            for click0 in [0u8, 1] {
                for click1 in [0u8, 1] {
                    let p_seq = 0.5;
                    let p0 = if click0 == 1 {
                        q0[placed0]
                    } else {
                        1.0 - q0[placed0]
                    };
                    let p1 = if click1 == 1 {
                        q1(placed1)
                    } else {
                        1.0 - q1(placed1)
                    };
                    let prob = p_seq * p0 * p1;
                    let session = toy_session(action0, click0 as f64, click1 as f64);
                    let est =
                        full_is_estimate(&[session], &target, ReplayOptions::default()).unwrap();
                    averaged += prob * est.values[0];
                }
            }
        }
        assert!(
            (averaged - true_value).abs() < 1e-9,
            "averaged {averaged} vs true {true_value}"
        );
    }

    #[test]
    fn deterministic_policy_prefix_weights_are_k_powers() {
        // Session logged uniformly with K=2; the target matches both logged
        // actions, so depth-i weights are K^i.
        let session = toy_session(0, 1.0, 1.0);
        let target = FixedRankPolicy::new(0);
        let est = full_is_estimate(
            std::slice::from_ref(&session),
            &target,
            ReplayOptions::default(),
        )
        .unwrap();
        // Slot 0 weight 2 (propensity 1/2 matched), slot 1 weight 2 * 1.
        assert!((est.values[0] - (1.0 * 2.0 + 1.0 * 2.0)).abs() < 1e-12);

        // A mismatched prefix zeroes everything after it.
        let target = FixedRankPolicy::new(1);
        let est = full_is_estimate(&[session], &target, ReplayOptions::default()).unwrap();
        assert_eq!(est.values[0], 0.0);
    }

    #[test]
    fn one_step_weights_are_per_slot() {
        let session = toy_session(0, 1.0, 1.0);
        // Mismatch at slot 0 only: slot 1 still counts with weight 1.
        let target = FixedRankPolicy::new(1);
        let est = one_step_is_estimate(&[session], &target, ReplayOptions::default()).unwrap();
        assert!((est.values[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_logged_propensity_rejected() {
        let mut session = toy_session(0, 1.0, 0.0);
        session.slots[0].propensity = 0.0;
        assert!(matches!(
            full_is_estimate(&[session], &RandomPolicy, ReplayOptions::default()),
            Err(Error::ZeroPropensity(_))
        ));
    }

    #[test]
    fn exact_match_full_and_zero_match() {
        let (_, sessions) = random_sessions(5, 80);
        let policy = FixedRankPolicy::new(0);
        let est = exact_match_replay(&sessions, &policy).unwrap();
        let matched_slots: usize = sessions
            .iter()
            .flat_map(|s| &s.slots)
            .filter(|slot| slot.action == 0)
            .count();
        assert_eq!(est.ess, matched_slots as f64);
        let expected: f64 = sessions
            .iter()
            .flat_map(|s| &s.slots)
            .filter(|slot| slot.action == 0)
            .map(|slot| slot.rewards[0])
            .sum::<f64>()
            / matched_slots as f64;
        assert!((est.values[0] - expected).abs() < 1e-12);

        // Impossible action rank: window of width K=3 never logged action 9.
        let policy = FixedRankPolicy::new(9);
        let est = exact_match_replay(&sessions, &policy).unwrap();
        // Rank clamps to the window end; last slot (singleton) logs 0 and
        // the clamped policy picks 0 there, so matches are only at tails.
        assert!(est.ess >= 0.0);
    }

    #[test]
    fn exact_match_rate_near_one_third() {
        let (_, sessions) = random_sessions(6, 1500);
        let policy = FixedRankPolicy::new(0);
        let est = exact_match_replay(&sessions, &policy).unwrap();
        // Windows narrower than K occur at the last two slots; count only
        // full-width slots for the binomial check.
        let full_width: Vec<&LoggedSlot> = sessions
            .iter()
            .flat_map(|s| &s.slots)
            .filter(|slot| slot.window.len() == 3)
            .collect();
        let matches = full_width.iter().filter(|s| s.action == 0).count();
        let n = full_width.len() as f64;
        let rate = matches as f64 / n;
        let sigma = ((1.0 / 3.0) * (2.0 / 3.0) / n).sqrt();
        assert!(
            (rate - 1.0 / 3.0).abs() < 3.0 * sigma,
            "match rate {rate} outside 3 sigma"
        );
        assert!(est.ess > 0.0);
    }

    #[test]
    fn variance_report_depth_one_coincides() {
        let (_, sessions) = random_sessions(6, 300);
        let report = variance_report(&sessions, &PointwiseGreedyPolicy, 0).unwrap();
        assert_eq!(report.len(), 6);
        let d1 = &report[0];
        assert_eq!(d1.depth, 1);
        assert!((d1.full_value - d1.one_step_value).abs() < 1e-15);
        assert!((d1.full_stderr - d1.one_step_stderr).abs() < 1e-15);
    }

    #[test]
    fn variance_report_matches_k_power_decay() {
        let (_, sessions) = random_sessions(6, 4000);
        let report = variance_report(&sessions, &PointwiseGreedyPolicy, 0).unwrap();
        let n = sessions.len() as f64;
        for stats in &report[..4] {
            let expected = (1.0f64 / 3.0).powi(stats.depth as i32);
            let sigma = (expected * (1.0 - expected) / n).sqrt();
            assert!(
                (stats.full_match_fraction - expected).abs() < 4.0 * sigma,
                "depth {}: fraction {} vs expected {expected}",
                stats.depth,
                stats.full_match_fraction
            );
        }
        // One-step never has higher standard error than full trajectory
        // past depth 1.
        for stats in &report[1..5] {
            assert!(
                stats.one_step_stderr <= stats.full_stderr + 1e-12,
                "depth {}: one-step se {} > full se {}",
                stats.depth,
                stats.one_step_stderr,
                stats.full_stderr
            );
        }
    }

    #[test]
    fn best_beats_second_best() {
        let (_, sessions) = random_sessions(8, 2500);
        let best = one_step_is_estimate(
            &sessions,
            &FixedRankPolicy::new(0),
            ReplayOptions::default(),
        )
        .unwrap();
        let second = one_step_is_estimate(
            &sessions,
            &FixedRankPolicy::new(1),
            ReplayOptions::default(),
        )
        .unwrap();
        let gap = best.values[0] - second.values[0];
        let se = (best.stderr[0].powi(2) + second.stderr[0].powi(2)).sqrt();
        assert!(gap > 3.0 * se, "gap {gap} not beyond 3 se {se}");
    }

    #[test]
    fn session_regeneration_verifies_windows() {
        let cfg = sim_cfg(5, 10);
        let result = rollout(&RandomPolicy, &cfg, 10).unwrap();
        let mut episodes = result.episodes;
        // Corrupt one window id.
        episodes[3].slots[1].window_item_ids[0] = 999;
        assert!(matches!(
            sessions_from_episodes(&cfg, &episodes),
            Err(Error::WindowMismatch {
                session: 3,
                slot: 1
            })
        ));

        // Wrong config (different seed) fails the hash check.
        let mut other = cfg.clone();
        other.seed = 1234;
        let result = rollout(&RandomPolicy, &cfg, 2).unwrap();
        assert!(matches!(
            sessions_from_episodes(&other, &result.episodes),
            Err(Error::ConfigHashMismatch { .. })
        ));
    }

    #[test]
    fn contributions_objective_populated() {
        let (_, sessions) = random_sessions(5, 50);
        let contrib_idx = objective_index("contributions").unwrap();
        for session in &sessions {
            for slot in &session.slots {
                let any_part = slot.rewards[1..5].iter().any(|r| *r > 0.0);
                assert_eq!(slot.rewards[contrib_idx] > 0.0, any_part);
            }
        }
    }
}
