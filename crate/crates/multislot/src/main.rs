//! Thin command-line front end; all logic lives in the library's `cli`
//! module.

use clap::{Args, Parser, Subcommand};
use multislot::cli::{
    cmd_benchmark, cmd_pareto, cmd_replay, cmd_simulate, cmd_train, resolve_workers, with_pool,
    PolicySpec, RunConfig,
};
use multislot::core::{ResponseKind, RESPONSE_KINDS};
use multislot::replay::EstimatorKind;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "multislot",
    about = "Multi-slot slate re-ranking: simulation, training, benchmarking, offline replay and Pareto sweeps",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override the configured master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker pool size (default: MULTISLOT_WORKERS or available cores).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Roll out a policy and write an episode log (JSONL).
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Acting policy: random | pointwise_greedy | sga_oracle |
        /// sga_estimated | exp_decay | best_of_k | second_best_of_k.
        #[arg(long, default_value = "random")]
        policy: String,
        /// Directory with trained model files (for sga_estimated).
        #[arg(long)]
        model: Option<PathBuf>,
        /// Output episode log path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Train per-response models (with and without interaction features)
    /// from an episode log and report holdout AUC.
    Train {
        #[command(flatten)]
        common: Common,
        /// Input episode log (JSONL).
        #[arg(long)]
        episodes: PathBuf,
        /// Response to train: click | like | comment | share | skip | all.
        #[arg(long, default_value = "all")]
        response: String,
        /// Output directory for model files and the AUC report.
        #[arg(long)]
        out: PathBuf,
    },
    /// Benchmark the policy zoo (random, pointwise, oracle, estimated).
    Benchmark {
        #[command(flatten)]
        common: Common,
        /// Directory with trained model files for the estimated policy;
        /// omitted, the command trains inline from its random rollouts.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Fail instead of training inline when --model is not given.
        #[arg(long)]
        no_inline_train: bool,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate a target policy offline from logged episodes.
    Replay {
        #[command(flatten)]
        common: Common,
        /// Input episode log (JSONL), usually from the random policy.
        #[arg(long)]
        episodes: PathBuf,
        /// Target policy, or the best_vs_second_best preset.
        #[arg(long, default_value = "best_vs_second_best")]
        policy: String,
        /// Estimator: one_step | full | exact_match.
        #[arg(long, default_value = "one_step")]
        estimator: String,
        /// Directory with trained model files (for sga_estimated).
        #[arg(long)]
        model: Option<PathBuf>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep combination coefficients, estimate each point offline, and
    /// emit the Pareto frontier (dominated points flagged).
    Pareto {
        #[command(flatten)]
        common: Common,
        /// Input episode log (JSONL) from the random policy.
        #[arg(long)]
        episodes: PathBuf,
        /// Extra estimate CSVs (replay output format) to merge as points.
        #[arg(long)]
        estimates: Vec<PathBuf>,
        /// Keep the upstream SPR click score as the click component.
        #[arg(long)]
        hybrid: bool,
        /// Directory with trained model files for the sweep policies.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(common: &Common) -> multislot::Result<RunConfig> {
    let mut cfg = RunConfig::load(&common.config)?;
    cfg.apply_seed(common.seed);
    Ok(cfg)
}

fn parse_responses(s: &str) -> multislot::Result<Vec<ResponseKind>> {
    if s == "all" {
        Ok(RESPONSE_KINDS.to_vec())
    } else {
        Ok(vec![ResponseKind::parse(s)?])
    }
}

fn run(cli: Cli) -> multislot::Result<()> {
    match cli.command {
        Command::Simulate {
            common,
            policy,
            model,
            out,
        } => {
            let cfg = load_config(&common)?;
            let spec = PolicySpec::parse(&policy)?;
            let workers = resolve_workers(common.workers);
            let report = with_pool(workers, move || {
                cmd_simulate(&cfg, spec, model.as_deref(), &out)
            })??;
            println!(
                "simulate policy={} episodes={} mean_reward={:.4} stderr={:.4} out={}",
                report.policy,
                report.episodes,
                report.mean_reward,
                report.stderr,
                report.out.display()
            );
        }
        Command::Train {
            common,
            episodes,
            response,
            out,
        } => {
            let cfg = load_config(&common)?;
            let responses = parse_responses(&response)?;
            let workers = resolve_workers(common.workers);
            let report = with_pool(workers, move || {
                cmd_train(&cfg, &episodes, &responses, &out)
            })??;
            for row in &report.rows {
                println!(
                    "train response={} auc_with={:.4} auc_without={:.4} lift={:+.2}pts ({:+.2}%) train_n={} holdout_n={}",
                    row.response,
                    row.auc_with_interaction,
                    row.auc_without_interaction,
                    row.lift_points,
                    row.lift_relative_pct,
                    row.train_examples,
                    row.holdout_examples
                );
            }
            println!("train report={}", report.report_csv.display());
        }
        Command::Benchmark {
            common,
            model,
            no_inline_train,
            out,
        } => {
            let cfg = load_config(&common)?;
            let workers = resolve_workers(common.workers);
            let report = with_pool(workers, move || {
                cmd_benchmark(&cfg, model.as_deref(), !no_inline_train, &out)
            })??;
            for row in &report.rows {
                println!(
                    "benchmark policy={} mean_reward={:.4} stderr={:.4} episodes={}",
                    row.policy, row.mean_reward, row.stderr, row.episodes
                );
            }
            println!("benchmark out={}", report.out.display());
        }
        Command::Replay {
            common,
            episodes,
            policy,
            estimator,
            model,
            out,
        } => {
            let cfg = load_config(&common)?;
            let spec = PolicySpec::parse(&policy)?;
            let kind = EstimatorKind::parse(&estimator)?;
            let workers = resolve_workers(common.workers);
            let report = with_pool(workers, move || {
                cmd_replay(&cfg, &episodes, spec, kind, model.as_deref(), &out)
            })??;
            for (label, est) in &report.rows {
                println!(
                    "replay policy={} estimator={} click={:.4} contributions={:.4} ess={:.1}",
                    label,
                    est.estimator.as_str(),
                    est.values[0],
                    est.values[5],
                    est.ess
                );
            }
            for warning in &report.warnings {
                eprintln!("warning: {warning}");
            }
            println!("replay out={}", report.out.display());
        }
        Command::Pareto {
            common,
            episodes,
            estimates,
            hybrid,
            model,
            out,
        } => {
            let cfg = load_config(&common)?;
            let workers = resolve_workers(common.workers);
            let report = with_pool(workers, move || {
                cmd_pareto(&cfg, &episodes, &estimates, hybrid, model.as_deref(), &out)
            })??;
            for row in &report.rows {
                println!(
                    "pareto label={} click={:.4} contributions={:.4} frontier={}",
                    row.label, row.click, row.contributions, row.on_frontier
                );
            }
            println!(
                "pareto frontier_size={} out={}",
                report.frontier_size,
                report.out.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
