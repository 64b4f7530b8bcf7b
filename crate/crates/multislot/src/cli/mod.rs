//! Batch front door: declarative run configuration plus the five command
//! implementations (simulate, train, benchmark, replay, pareto).
//!
//! Every command is a pure function of (config, input files, seed): reruns
//! produce byte-identical outputs regardless of worker count. All emitted
//! CSVs carry a header row and a `# config_hash=` provenance comment.

pub mod csvfmt;
pub mod dataset;

use crate::core::{ResponseKind, RESPONSE_KINDS};
use crate::error::{Error, Result};
use crate::models::{
    compute_auc, train, CombinationConfig, CurrentSlotFeatures, FeatureSchema, InteractionFeatures,
    ResponseModel, SprFeatures, TrainConfig,
};
use crate::replay::{
    exact_match_replay, full_is_estimate, non_dominated_flags, objective_index,
    one_step_is_estimate, sessions_from_episodes, EstimatorKind, LoggedSession, ParetoPoint,
    ReplayEstimate, ReplayOptions,
};
use crate::reranker::{DecayConfig, ModelSet};
use crate::simulator::policy::{
    ExpDecayPolicy, FixedRankPolicy, PointwiseGreedyPolicy, Policy, RandomPolicy,
    SequentialGreedyPolicy,
};
use crate::simulator::{read_episodes, rollout, write_episodes, Episode, RolloutResult, SimConfig};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

const SPLIT_SALT: u64 = 0x53504c49;

/// Feature-group toggles for trained models; geometry (type count,
/// embedding dim, horizon) comes from the simulator config.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeatureToggles {
    pub spr: SprFeatures,
    pub current_slot: CurrentSlotFeatures,
    pub interaction: InteractionFeatures,
}

impl FeatureToggles {
    pub fn to_schema(&self, response: ResponseKind, sim: &SimConfig) -> Result<FeatureSchema> {
        let mut config = crate::models::FeatureConfig::new(
            response,
            sim.num_types(),
            sim.embedding_dim,
            sim.horizon,
        );
        config.spr = self.spr.clone();
        config.current_slot = self.current_slot.clone();
        config.interaction = self.interaction.clone();
        FeatureSchema::build(config)
    }
}

/// Training section of the run file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainSection {
    pub hyper: TrainConfig,
    pub holdout_fraction: f64,
    pub features: FeatureToggles,
}

impl Default for TrainSection {
    fn default() -> Self {
        TrainSection {
            hyper: TrainConfig::default(),
            holdout_fraction: 0.2,
            features: FeatureToggles::default(),
        }
    }
}

/// Re-ranker settings: consumed by the library examples and validated here
/// so one run file covers the whole toolkit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RerankerSection {
    pub window: usize,
    pub max_deviation: Option<usize>,
    pub pin_top_slot: bool,
}

impl Default for RerankerSection {
    fn default() -> Self {
        RerankerSection {
            window: 3,
            max_deviation: Some(3),
            pin_top_slot: true,
        }
    }
}

/// Replay estimator options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReplaySection {
    pub self_normalized: bool,
    /// Warn when an estimate's effective sample size falls below this.
    pub low_ess_warning: f64,
}

impl Default for ReplaySection {
    fn default() -> Self {
        ReplaySection {
            self_normalized: false,
            low_ess_warning: 100.0,
        }
    }
}

/// Benchmark section: inline training of the estimated policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchmarkSection {
    /// How many random-policy episodes feed the inline training.
    pub train_episodes: usize,
    pub estimated_features: FeatureToggles,
}

impl Default for BenchmarkSection {
    fn default() -> Self {
        // The estimated policy learns the oracle's structure minus the
        // embedding dot products: partial structure knowledge keeps it
        // between the oracle and the pointwise baseline.
        let mut estimated_features = FeatureToggles::default();
        estimated_features.interaction.embedding_dots = false;
        BenchmarkSection {
            train_episodes: 2500,
            estimated_features,
        }
    }
}

/// Coefficient sweep for the pareto command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// Contribution weight gamma per sweep point; each yields the
    /// combination {click: 1, like: g, comment: g, share: g,
    /// skip: -g * skip_weight_scale}.
    pub gamma_grid: Vec<f64>,
    pub skip_weight_scale: f64,
    /// Extra explicit combinations appended to the grid.
    pub combinations: Vec<BTreeMap<ResponseKind, f64>>,
    /// Keep the upstream SPR click score as the click component and use the
    /// slot models only for contribution responses.
    pub hybrid: bool,
    /// Include the exponential-decay re-ranker as a baseline point.
    pub include_decay_baseline: bool,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            gamma_grid: vec![0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0],
            skip_weight_scale: 0.5,
            combinations: Vec::new(),
            hybrid: false,
            include_decay_baseline: true,
        }
    }
}

/// The declarative run file. Unknown keys anywhere are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub sim: SimConfig,
    pub train: TrainSection,
    pub reranker: RerankerSection,
    pub decay: DecayConfig,
    pub replay: ReplaySection,
    pub benchmark: BenchmarkSection,
    pub sweep: SweepSection,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.sim.validate()?;
        self.decay.validate()?;
        if self.reranker.window == 0 {
            return Err(Error::InvalidConfig("reranker.window must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&self.train.holdout_fraction) {
            return Err(Error::InvalidConfig(
                "train.holdout_fraction must lie in [0, 1)".into(),
            ));
        }
        if self.benchmark.train_episodes == 0 {
            return Err(Error::InvalidConfig(
                "benchmark.train_episodes must be >= 1".into(),
            ));
        }
        if self
            .sweep
            .gamma_grid
            .iter()
            .any(|g| !g.is_finite() || *g < 0.0)
        {
            return Err(Error::InvalidConfig(
                "sweep.gamma_grid entries must be finite and >= 0".into(),
            ));
        }
        Ok(())
    }

    /// Stable hash over the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        format!("{:016x}", crate::simulator::fnv1a64(json.as_bytes()))
    }

    pub fn apply_seed(&mut self, seed: Option<u64>) {
        if let Some(seed) = seed {
            self.sim.seed = seed;
        }
    }
}

/// Resolve the worker-pool size: explicit flag, then the MULTISLOT_WORKERS
/// environment variable, then available parallelism.
pub fn resolve_workers(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("MULTISLOT_WORKERS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .filter(|w| *w > 0)
    .unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    })
}

/// Run `f` on a bounded rayon pool of `workers` threads.
pub fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Target policy selector shared by simulate/replay/pareto.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicySpec {
    Random,
    PointwiseGreedy,
    SgaOracle,
    SgaEstimated,
    BestOfK,
    SecondBestOfK,
    ExpDecay,
    /// Replay preset: evaluate best-of-K and second-best-of-K together.
    BestVsSecondBest,
}

impl PolicySpec {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(PolicySpec::Random),
            "pointwise_greedy" | "pointwise" => Ok(PolicySpec::PointwiseGreedy),
            "sequential_greedy_oracle" | "sga_oracle" => Ok(PolicySpec::SgaOracle),
            "sequential_greedy_estimated" | "sga_estimated" => Ok(PolicySpec::SgaEstimated),
            "best_of_k" => Ok(PolicySpec::BestOfK),
            "second_best_of_k" => Ok(PolicySpec::SecondBestOfK),
            "exp_decay" => Ok(PolicySpec::ExpDecay),
            "best_vs_second_best" => Ok(PolicySpec::BestVsSecondBest),
            other => Err(Error::InvalidConfig(format!("unknown policy: {other}"))),
        }
    }
}

fn oracle_reward_models(cfg: &RunConfig) -> Result<ModelSet> {
    let oracle = cfg.sim.oracle_models()?;
    let active = cfg.sim.reward.active_responses();
    Ok(oracle
        .into_iter()
        .filter(|(k, _)| active.contains(k))
        .collect())
}

/// Load per-response model files ({response}.json) from a directory.
pub fn load_models(dir: &Path, responses: &[ResponseKind]) -> Result<ModelSet> {
    let mut models = ModelSet::new();
    for kind in responses {
        let path = dir.join(format!("{kind}.json"));
        if !path.exists() {
            return Err(Error::InvalidConfig(format!(
                "missing model artifact {}",
                path.display()
            )));
        }
        models.insert(*kind, ResponseModel::load(&path)?);
    }
    Ok(models)
}

fn build_policy(
    spec: PolicySpec,
    cfg: &RunConfig,
    estimated: Option<&ModelSet>,
) -> Result<Box<dyn Policy>> {
    match spec {
        PolicySpec::Random => Ok(Box::new(RandomPolicy)),
        PolicySpec::PointwiseGreedy => Ok(Box::new(PointwiseGreedyPolicy)),
        PolicySpec::BestOfK => Ok(Box::new(FixedRankPolicy::named(0, "best_of_k"))),
        PolicySpec::SecondBestOfK => Ok(Box::new(FixedRankPolicy::named(1, "second_best_of_k"))),
        PolicySpec::ExpDecay => Ok(Box::new(ExpDecayPolicy {
            alpha: cfg.decay.alpha,
            response: cfg.decay.response,
        })),
        PolicySpec::SgaOracle => Ok(Box::new(SequentialGreedyPolicy::new(
            "sequential_greedy_oracle",
            oracle_reward_models(cfg)?,
            cfg.sim.reward.clone(),
        )?)),
        PolicySpec::SgaEstimated => {
            let models = estimated.ok_or_else(|| {
                Error::InvalidConfig(
                    "sga_estimated requires trained models (--model DIR or inline training)".into(),
                )
            })?;
            Ok(Box::new(SequentialGreedyPolicy::new(
                "sequential_greedy_estimated",
                models.clone(),
                cfg.sim.reward.clone(),
            )?))
        }
        PolicySpec::BestVsSecondBest => Err(Error::InvalidConfig(
            "best_vs_second_best is a replay preset, not a single policy".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SimulateReport {
    pub policy: String,
    pub episodes: usize,
    pub mean_reward: f64,
    pub stderr: f64,
    pub out: PathBuf,
}

pub fn cmd_simulate(
    cfg: &RunConfig,
    policy: PolicySpec,
    model_dir: Option<&Path>,
    out: &Path,
) -> Result<SimulateReport> {
    cfg.validate()?;
    if cfg.sim.episodes == 0 {
        return Err(Error::InvalidConfig("sim.episodes must be >= 1".into()));
    }
    let estimated = match model_dir {
        Some(dir) => Some(load_models(dir, &cfg.sim.reward.active_responses())?),
        None => None,
    };
    let policy = build_policy(policy, cfg, estimated.as_ref())?;
    let result = rollout(policy.as_ref(), &cfg.sim, cfg.sim.episodes)?;
    write_episodes(out, &result.episodes)?;
    Ok(SimulateReport {
        policy: result.policy,
        episodes: result.episodes.len(),
        mean_reward: result.mean_reward,
        stderr: result.stderr,
        out: out.to_path_buf(),
    })
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct AucRow {
    pub response: ResponseKind,
    pub auc_with_interaction: f64,
    pub auc_without_interaction: f64,
    /// Absolute lift in AUC points (x100).
    pub lift_points: f64,
    /// Relative lift in percent.
    pub lift_relative_pct: f64,
    pub train_examples: usize,
    pub holdout_examples: usize,
}

#[derive(Debug, Clone)]
pub struct TrainCmdReport {
    pub rows: Vec<AucRow>,
    pub model_paths: Vec<PathBuf>,
    pub report_csv: PathBuf,
}

fn train_one(
    sessions: &[LoggedSession],
    schema: FeatureSchema,
    response: ResponseKind,
    hyper: &TrainConfig,
) -> Result<ResponseModel> {
    let examples = dataset::training_examples(sessions, &schema, response)?;
    Ok(train(response, schema, &examples, hyper)?.model)
}

/// Train per-response models with and without the interaction feature
/// group, report holdout AUC for both, and save the model files.
pub fn cmd_train(
    cfg: &RunConfig,
    episodes_path: &Path,
    responses: &[ResponseKind],
    out_dir: &Path,
) -> Result<TrainCmdReport> {
    cfg.validate()?;
    let episodes = read_episodes(episodes_path)?;
    let sessions = sessions_from_episodes(&cfg.sim, &episodes)?;
    let (train_refs, test_refs) = dataset::split_sessions(
        &sessions,
        cfg.train.holdout_fraction,
        cfg.sim.seed ^ SPLIT_SALT,
    )?;
    let train_sessions = dataset::owned(&train_refs);
    let test_sessions = dataset::owned(&test_refs);
    if test_sessions.is_empty() {
        return Err(Error::InvalidConfig(
            "holdout split produced no evaluation sessions".into(),
        ));
    }

    std::fs::create_dir_all(out_dir)?;
    let mut rows = Vec::new();
    let mut model_paths = Vec::new();
    for &response in responses {
        let mut with_toggles = cfg.train.features.clone();
        with_toggles.interaction.enabled = true;
        let mut without_toggles = cfg.train.features.clone();
        without_toggles.interaction.enabled = false;

        let schema_with = with_toggles.to_schema(response, &cfg.sim)?;
        let schema_without = without_toggles.to_schema(response, &cfg.sim)?;

        let model_with = train_one(&train_sessions, schema_with, response, &cfg.train.hyper)?;
        let model_without = train_one(&train_sessions, schema_without, response, &cfg.train.hyper)?;

        let auc_of = |model: &ResponseModel| -> Result<f64> {
            let examples = dataset::training_examples(&test_sessions, &model.schema, response)?;
            let scores: Vec<f64> = examples
                .iter()
                .map(|(x, _)| model.score_features(x))
                .collect::<Result<_>>()?;
            let labels: Vec<bool> = examples.iter().map(|(_, y)| *y).collect();
            compute_auc(&scores, &labels)
        };
        let auc_with = auc_of(&model_with)?;
        let auc_without = auc_of(&model_without)?;
        let holdout_examples: usize = test_sessions.iter().map(|s| s.slots.len()).sum();
        let train_examples: usize = train_sessions.iter().map(|s| s.slots.len()).sum();

        let with_path = out_dir.join(format!("{response}.json"));
        let without_path = out_dir.join(format!("{response}.no_interaction.json"));
        model_with.save(&with_path)?;
        model_without.save(&without_path)?;
        model_paths.push(with_path);
        model_paths.push(without_path);

        rows.push(AucRow {
            response,
            auc_with_interaction: auc_with,
            auc_without_interaction: auc_without,
            lift_points: (auc_with - auc_without) * 100.0,
            lift_relative_pct: (auc_with / auc_without - 1.0) * 100.0,
            train_examples,
            holdout_examples,
        });
    }

    let report_csv = out_dir.join("auc_report.csv");
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.response.to_string(),
                csvfmt::fmt_f64(r.auc_with_interaction),
                csvfmt::fmt_f64(r.auc_without_interaction),
                csvfmt::fmt_f64(r.lift_points),
                csvfmt::fmt_f64(r.lift_relative_pct),
                r.train_examples.to_string(),
                r.holdout_examples.to_string(),
            ]
        })
        .collect();
    csvfmt::write_csv(
        &report_csv,
        &cfg.hash(),
        &[
            "response",
            "auc_with_interaction",
            "auc_without_interaction",
            "lift_points",
            "lift_relative_pct",
            "train_examples",
            "holdout_examples",
        ],
        &csv_rows,
    )?;
    Ok(TrainCmdReport {
        rows,
        model_paths,
        report_csv,
    })
}

// ---------------------------------------------------------------------------
// benchmark
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct BenchmarkRow {
    pub policy: String,
    pub mean_reward: f64,
    pub stderr: f64,
    pub episodes: usize,
}

#[derive(Debug, Clone)]
pub struct BenchmarkReport {
    pub rows: Vec<BenchmarkRow>,
    pub out: PathBuf,
}

fn row_of(result: &RolloutResult) -> BenchmarkRow {
    BenchmarkRow {
        policy: result.policy.clone(),
        mean_reward: result.mean_reward,
        stderr: result.stderr,
        episodes: result.episodes.len(),
    }
}

/// Train estimated-policy models from random-policy episodes.
pub fn train_estimated_models(cfg: &RunConfig, episodes: &[Episode]) -> Result<ModelSet> {
    let take = cfg.benchmark.train_episodes.min(episodes.len());
    let sessions = sessions_from_episodes(&cfg.sim, &episodes[..take])?;
    let mut models = ModelSet::new();
    for response in cfg.sim.reward.active_responses() {
        let schema = cfg
            .benchmark
            .estimated_features
            .to_schema(response, &cfg.sim)?;
        models.insert(
            response,
            train_one(&sessions, schema, response, &cfg.train.hyper)?,
        );
    }
    Ok(models)
}

/// Run the four-policy zoo and emit one CSV row per policy.
pub fn cmd_benchmark(
    cfg: &RunConfig,
    model_dir: Option<&Path>,
    inline_train: bool,
    out: &Path,
) -> Result<BenchmarkReport> {
    cfg.validate()?;
    let episodes = cfg.sim.episodes;
    if episodes == 0 {
        return Err(Error::InvalidConfig("sim.episodes must be >= 1".into()));
    }

    let random = rollout(&RandomPolicy, &cfg.sim, episodes)?;
    let estimated_models = match model_dir {
        Some(dir) => load_models(dir, &cfg.sim.reward.active_responses())?,
        None if inline_train => train_estimated_models(cfg, &random.episodes)?,
        None => {
            return Err(Error::InvalidConfig(
                "estimated policy needs --model DIR when inline training is disabled".into(),
            ))
        }
    };

    let pointwise = rollout(&PointwiseGreedyPolicy, &cfg.sim, episodes)?;
    let oracle_policy = build_policy(PolicySpec::SgaOracle, cfg, None)?;
    let oracle = rollout(oracle_policy.as_ref(), &cfg.sim, episodes)?;
    let estimated_policy = build_policy(PolicySpec::SgaEstimated, cfg, Some(&estimated_models))?;
    let estimated = rollout(estimated_policy.as_ref(), &cfg.sim, episodes)?;

    let rows = vec![
        row_of(&random),
        row_of(&pointwise),
        row_of(&oracle),
        row_of(&estimated),
    ];
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.policy.clone(),
                csvfmt::fmt_f64(r.mean_reward),
                csvfmt::fmt_f64(r.stderr),
                r.episodes.to_string(),
            ]
        })
        .collect();
    csvfmt::write_csv(
        out,
        &cfg.hash(),
        &["policy", "mean_reward", "stderr", "episodes"],
        &csv_rows,
    )?;
    Ok(BenchmarkReport {
        rows,
        out: out.to_path_buf(),
    })
}

// ---------------------------------------------------------------------------
// replay
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ReplayCmdReport {
    pub rows: Vec<(String, ReplayEstimate)>,
    pub warnings: Vec<String>,
    pub out: PathBuf,
}

pub const REPLAY_CSV_HEADER: [&str; 16] = [
    "policy_id",
    "click",
    "like",
    "comment",
    "share",
    "skip",
    "contributions",
    "stderr_click",
    "stderr_like",
    "stderr_comment",
    "stderr_share",
    "stderr_skip",
    "stderr_contributions",
    "estimator",
    "ess",
    "sessions",
];

fn estimate_row(label: &str, est: &ReplayEstimate) -> Vec<String> {
    let mut row = Vec::with_capacity(REPLAY_CSV_HEADER.len());
    row.push(label.to_string());
    for v in est.values {
        row.push(csvfmt::fmt_f64(v));
    }
    for s in est.stderr {
        row.push(csvfmt::fmt_f64(s));
    }
    row.push(est.estimator.as_str().to_string());
    row.push(csvfmt::fmt_f64(est.ess));
    row.push(est.sessions.to_string());
    row
}

fn run_estimator(
    sessions: &[LoggedSession],
    policy: &dyn Policy,
    kind: EstimatorKind,
    options: ReplayOptions,
) -> Result<ReplayEstimate> {
    match kind {
        EstimatorKind::FullTrajectory => full_is_estimate(sessions, policy, options),
        EstimatorKind::OneStep => one_step_is_estimate(sessions, policy, options),
        EstimatorKind::ExactMatch => exact_match_replay(sessions, policy),
    }
}

/// Estimate target-policy rewards from a logged episode file.
pub fn cmd_replay(
    cfg: &RunConfig,
    episodes_path: &Path,
    policy: PolicySpec,
    estimator: EstimatorKind,
    model_dir: Option<&Path>,
    out: &Path,
) -> Result<ReplayCmdReport> {
    cfg.validate()?;
    let episodes = read_episodes(episodes_path)?;
    let sessions = sessions_from_episodes(&cfg.sim, &episodes)?;
    let options = ReplayOptions {
        self_normalized: cfg.replay.self_normalized,
    };
    let estimated = match model_dir {
        Some(dir) => Some(load_models(dir, &cfg.sim.reward.active_responses())?),
        None => None,
    };

    let specs: Vec<PolicySpec> = match policy {
        PolicySpec::BestVsSecondBest => vec![PolicySpec::BestOfK, PolicySpec::SecondBestOfK],
        other => vec![other],
    };
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for spec in specs {
        let target = build_policy(spec, cfg, estimated.as_ref())?;
        let est = run_estimator(&sessions, target.as_ref(), estimator, options)?;
        if est.ess < cfg.replay.low_ess_warning {
            warnings.push(format!(
                "estimate for {} has low effective sample size {:.2} (< {}); \
                 treat it as unreliable",
                target.name(),
                est.ess,
                cfg.replay.low_ess_warning
            ));
        }
        rows.push((target.name().to_string(), est));
    }

    let csv_rows: Vec<Vec<String>> = rows.iter().map(|(l, e)| estimate_row(l, e)).collect();
    csvfmt::write_csv(out, &cfg.hash(), &REPLAY_CSV_HEADER, &csv_rows)?;
    Ok(ReplayCmdReport {
        rows,
        warnings,
        out: out.to_path_buf(),
    })
}

// ---------------------------------------------------------------------------
// pareto
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ParetoRow {
    pub label: String,
    pub click: f64,
    pub contributions: f64,
    pub stderr_click: f64,
    pub stderr_contributions: f64,
    pub ess: f64,
    pub on_frontier: bool,
}

#[derive(Debug, Clone)]
pub struct ParetoReport {
    pub rows: Vec<ParetoRow>,
    pub frontier_size: usize,
    pub out: PathBuf,
}

fn sweep_combination(gamma: f64, skip_scale: f64) -> Result<CombinationConfig> {
    let mut coeffs = BTreeMap::from([(ResponseKind::Click, 1.0)]);
    if gamma != 0.0 {
        coeffs.insert(ResponseKind::Like, gamma);
        coeffs.insert(ResponseKind::Comment, gamma);
        coeffs.insert(ResponseKind::Share, gamma);
        coeffs.insert(ResponseKind::Skip, -gamma * skip_scale);
    }
    CombinationConfig::new(coeffs)
}

/// Models for one sweep policy. Hybrid mode keeps the upstream click score
/// (an identity passthrough model) and uses the slot models only for the
/// contribution responses.
fn sweep_models(cfg: &RunConfig, base: &ModelSet, hybrid: bool) -> Result<ModelSet> {
    let mut models = base.clone();
    if hybrid {
        let schema = cfg.sim.oracle_schema(ResponseKind::Click)?;
        models.insert(ResponseKind::Click, ResponseModel::spr_identity(schema)?);
    }
    Ok(models)
}

/// Sweep re-ranking coefficient trade-offs, estimate each policy offline,
/// merge optional precomputed estimate files, and flag the Pareto frontier.
pub fn cmd_pareto(
    cfg: &RunConfig,
    episodes_path: &Path,
    estimate_files: &[PathBuf],
    hybrid_flag: bool,
    model_dir: Option<&Path>,
    out: &Path,
) -> Result<ParetoReport> {
    cfg.validate()?;
    let hybrid = hybrid_flag || cfg.sweep.hybrid;
    let episodes = read_episodes(episodes_path)?;
    let sessions = sessions_from_episodes(&cfg.sim, &episodes)?;
    let options = ReplayOptions {
        self_normalized: cfg.replay.self_normalized,
    };
    let click_idx = objective_index("click")?;
    let contrib_idx = objective_index("contributions")?;

    // Slot models for the sweep: trained artifacts when given, the oracle's
    // own models otherwise.
    let base_models = match model_dir {
        Some(dir) => load_models(dir, &RESPONSE_KINDS)?,
        None => cfg.sim.oracle_models()?,
    };

    struct Candidate {
        label: String,
        est: ReplayEstimate,
    }
    let mut candidates: Vec<Candidate> = Vec::new();

    // Baseline: the pointwise ranking, i.e. the upstream order as-is.
    let baseline = one_step_is_estimate(&sessions, &PointwiseGreedyPolicy, options)?;
    candidates.push(Candidate {
        label: "baseline_pointwise".into(),
        est: baseline,
    });

    if cfg.sweep.include_decay_baseline {
        let decay = ExpDecayPolicy {
            alpha: cfg.decay.alpha,
            response: cfg.decay.response,
        };
        candidates.push(Candidate {
            label: "baseline_exp_decay".into(),
            est: one_step_is_estimate(&sessions, &decay, options)?,
        });
    }

    let models = sweep_models(cfg, &base_models, hybrid)?;
    let mode = if hybrid { "hybrid" } else { "full" };
    let mut combos: Vec<(String, CombinationConfig)> = Vec::new();
    for gamma in &cfg.sweep.gamma_grid {
        combos.push((
            format!("sweep_{mode}_gamma_{gamma}"),
            sweep_combination(*gamma, cfg.sweep.skip_weight_scale)?,
        ));
    }
    for (i, coeffs) in cfg.sweep.combinations.iter().enumerate() {
        combos.push((
            format!("sweep_{mode}_custom_{i}"),
            CombinationConfig::new(coeffs.clone())?,
        ));
    }
    for (label, combination) in combos {
        let active = combination.active_responses();
        let subset: ModelSet = models
            .iter()
            .filter(|(k, _)| active.contains(k))
            .map(|(k, m)| (*k, m.clone()))
            .collect();
        let policy = SequentialGreedyPolicy::new(label.clone(), subset, combination)?;
        candidates.push(Candidate {
            label,
            est: one_step_is_estimate(&sessions, &policy, options)?,
        });
    }

    // Merge externally supplied estimate CSVs (same replay format).
    for file in estimate_files {
        let (header, rows) = csvfmt::read_csv(file)?;
        let expect: Vec<String> = REPLAY_CSV_HEADER.iter().map(|s| s.to_string()).collect();
        if header != expect {
            return Err(Error::DimensionMismatch {
                expected: expect.len(),
                got: header.len(),
            });
        }
        for row in rows {
            let mut values = [0.0; crate::replay::NUM_OBJECTIVES];
            let mut stderr = [0.0; crate::replay::NUM_OBJECTIVES];
            for o in 0..crate::replay::NUM_OBJECTIVES {
                values[o] = csvfmt::parse_f64(&row[1 + o])?;
                stderr[o] = csvfmt::parse_f64(&row[7 + o])?;
            }
            candidates.push(Candidate {
                label: format!("merged_{}", row[0]),
                est: ReplayEstimate {
                    estimator: EstimatorKind::parse(&row[13])?,
                    values,
                    stderr,
                    ess: csvfmt::parse_f64(&row[14])?,
                    sessions: row[15].parse().unwrap_or(0),
                    total_slots: 0,
                },
            });
        }
    }

    let points: Vec<ParetoPoint> = candidates
        .iter()
        .map(|c| {
            ParetoPoint::new(
                c.label.clone(),
                vec![c.est.values[click_idx], c.est.values[contrib_idx]],
            )
        })
        .collect();
    let flags = non_dominated_flags(&points)?;
    let rows: Vec<ParetoRow> = candidates
        .iter()
        .zip(&flags)
        .map(|(c, on_frontier)| ParetoRow {
            label: c.label.clone(),
            click: c.est.values[click_idx],
            contributions: c.est.values[contrib_idx],
            stderr_click: c.est.stderr[click_idx],
            stderr_contributions: c.est.stderr[contrib_idx],
            ess: c.est.ess,
            on_frontier: *on_frontier,
        })
        .collect();

    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.label.clone(),
                csvfmt::fmt_f64(r.click),
                csvfmt::fmt_f64(r.contributions),
                csvfmt::fmt_f64(r.stderr_click),
                csvfmt::fmt_f64(r.stderr_contributions),
                csvfmt::fmt_f64(r.ess),
                if r.on_frontier { "1" } else { "0" }.to_string(),
            ]
        })
        .collect();
    csvfmt::write_csv(
        out,
        &cfg.hash(),
        &[
            "label",
            "click",
            "contributions",
            "stderr_click",
            "stderr_contributions",
            "ess",
            "on_frontier",
        ],
        &csv_rows,
    )?;
    Ok(ParetoReport {
        frontier_size: flags.iter().filter(|f| **f).count(),
        rows,
        out: out.to_path_buf(),
    })
}
