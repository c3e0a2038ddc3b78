//! `certiq`: train and certify noise-resilient circuit classifiers.
//!
//! This binary only parses arguments, merges them with an optional
//! `--config` JSON file (flags win over file values, which win over
//! defaults), configures the worker pool, and dispatches into the
//! library. Exit codes: 0 success, 2 usage/configuration error, 3
//! numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Parser, Subcommand};
use serde::Deserialize;

use certiq_cli::commands::{
    certify::CertifyCmdOpts,
    gen_data::GenDataOpts,
    hp_sweep::HpSweepOpts,
    noise_sweep::NoiseSweepOpts,
    reports::{CorrelationOpts, FrontierOpts},
    train::{TrainOpts, TrainTunables},
    MetricKind,
};
use certiq_cli::error::{CliError, CliResult};
use certiq_cli::formats::parse_reg_kind;

#[derive(Parser)]
#[command(
    name = "certiq",
    version,
    about = "Train, certify, and analyze noise-resilient quantum circuit classifiers"
)]
struct Cli {
    /// Global random seed [default: 0]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON config file supplying defaults for any flag
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Directory for output artifacts [default: out]
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads (falls back to CERTIQ_THREADS, then all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate labelled ground-state train/test datasets
    GenData(GenDataArgs),
    /// Train a smoothed (or plain-baseline) classifier
    Train(TrainArgs),
    /// Certify a trained model on a dataset and aggregate metrics
    Certify(CertifyArgs),
    /// Compare plain vs smoothed accuracy under injected parameter noise
    NoiseSweep(NoiseSweepArgs),
    /// Randomized hyperparameter sweep with a resumable journal
    HpSweep(HpSweepArgs),
    /// Extract the accuracy/robustness frontier from a sweep journal
    Frontier(FrontierArgs),
    /// Robustness-variance correlation analysis of a sweep journal
    Correlation(CorrelationArgs),
}

/// Fills `None` fields of the flag struct from the config-file section.
macro_rules! merge_opt {
    ($args:expr, $cfg:expr; $($field:ident),+ $(,)?) => {
        $( if $args.$field.is_none() { $args.$field = $cfg.$field.clone(); } )+
    };
}

#[derive(clap::Args, Deserialize, Clone, Default)]
#[serde(default, deny_unknown_fields)]
struct GenDataArgs {
    /// Register size [default: 4]
    #[arg(long)]
    qubits: Option<usize>,
    /// Training samples [default: 50]
    #[arg(long)]
    train: Option<usize>,
    /// Test samples [default: 50]
    #[arg(long)]
    test: Option<usize>,
    /// Phase-boundary JSON file [default: embedded ground truth]
    #[arg(long, value_name = "FILE")]
    boundary: Option<PathBuf>,
}

#[derive(clap::Args, Deserialize, Clone, Default)]
#[serde(default, deny_unknown_fields)]
struct TrainArgs {
    /// Training dataset (JSON lines)
    #[arg(long, value_name = "FILE")]
    data: Option<PathBuf>,
    /// Population size λ
    #[arg(long)]
    lambda: Option<usize>,
    /// θ learning rate
    #[arg(long)]
    eta_theta: Option<f64>,
    /// σ learning rate
    #[arg(long)]
    eta_sigma: Option<f64>,
    /// Regularization rate
    #[arg(long)]
    eta_r: Option<f64>,
    /// Initial σ
    #[arg(long)]
    sigma0: Option<f64>,
    /// Regularizer kind
    #[arg(long, value_parser = ["l2", "area"])]
    reg: Option<String>,
    /// Optimizer iterations
    #[arg(long)]
    iterations: Option<usize>,
    /// Minibatch size
    #[arg(long)]
    batch_size: Option<usize>,
    /// Probability clamp inside the fitness
    #[arg(long)]
    prob_clamp: Option<f64>,
    /// Convolution sub-layers per stage [default: 1]
    #[arg(long)]
    conv_reps: Option<usize>,
    /// Train the non-smoothed baseline (σ frozen, no regularizer)
    #[arg(long, action = ArgAction::SetTrue)]
    plain: Option<bool>,
    /// Model output path [default: <out>/model.json]
    #[arg(long, value_name = "FILE")]
    model_out: Option<PathBuf>,
    /// History CSV output path [default: <out>/history.csv]
    #[arg(long, value_name = "FILE")]
    history_out: Option<PathBuf>,
}

#[derive(clap::Args, Deserialize, Clone, Default)]
#[serde(default, deny_unknown_fields)]
struct CertifyArgs {
    /// Trained model JSON
    #[arg(long, value_name = "FILE")]
    model: Option<PathBuf>,
    /// Evaluation dataset (JSON lines)
    #[arg(long, value_name = "FILE")]
    data: Option<PathBuf>,
    /// Selection shots [default: 100]
    #[arg(long)]
    n0: Option<usize>,
    /// Estimation shots [default: 1000]
    #[arg(long)]
    n: Option<usize>,
    /// Confidence level [default: 0.01]
    #[arg(long)]
    alpha: Option<f64>,
    /// Per-class runner-up bounds instead of the complement bound
    #[arg(long, action = ArgAction::SetTrue)]
    bonferroni: Option<bool>,
    /// Certificates output path [default: <out>/certs.jsonl]
    #[arg(long, value_name = "FILE")]
    certs_out: Option<PathBuf>,
    /// Metrics output path [default: <out>/metrics.json]
    #[arg(long, value_name = "FILE")]
    metrics_out: Option<PathBuf>,
}

#[derive(clap::Args, Deserialize, Clone, Default)]
#[serde(default, deny_unknown_fields)]
struct NoiseSweepArgs {
    /// Smoothed model JSON
    #[arg(long, value_name = "FILE")]
    model: Option<PathBuf>,
    /// Plain-baseline model JSON
    #[arg(long, value_name = "FILE")]
    plain_model: Option<PathBuf>,
    /// Evaluation dataset (JSON lines)
    #[arg(long, value_name = "FILE")]
    data: Option<PathBuf>,
    /// Noise scales [default: 0,0.5,1,2,4]
    #[arg(long, value_delimiter = ',')]
    scales: Option<Vec<f64>>,
    /// Noise draws per scale [default: 100]
    #[arg(long)]
    draws: Option<usize>,
    /// Test points evaluated per draw [default: 20]
    #[arg(long)]
    points: Option<usize>,
    /// Inner samples of the deployed smoothed classifier [default: 64]
    #[arg(long)]
    inner_samples: Option<usize>,
    /// Table output path [default: <out>/noise_sweep.csv]
    #[arg(long, value_name = "FILE")]
    csv_out: Option<PathBuf>,
}

#[derive(clap::Args, Deserialize, Clone, Default)]
#[serde(default, deny_unknown_fields)]
struct HpSweepArgs {
    /// Number of runs to plan [default: 8]
    #[arg(long)]
    budget: Option<usize>,
    /// Training dataset (JSON lines)
    #[arg(long, value_name = "FILE")]
    train_data: Option<PathBuf>,
    /// Test dataset (JSON lines)
    #[arg(long, value_name = "FILE")]
    test_data: Option<PathBuf>,
    /// Journal path [default: <out>/sweep.jsonl]
    #[arg(long, value_name = "FILE")]
    journal: Option<PathBuf>,
    /// Search-space JSON file [default: built-in ranges]
    #[arg(long, value_name = "FILE")]
    space: Option<PathBuf>,
    /// Optimizer iterations per run [default: 1500]
    #[arg(long)]
    iterations: Option<usize>,
    /// Minibatch size per run [default: 50]
    #[arg(long)]
    batch_size: Option<usize>,
    /// Convolution sub-layers per stage [default: 1]
    #[arg(long)]
    conv_reps: Option<usize>,
    /// Selection shots for per-run certification [default: 100]
    #[arg(long)]
    n0: Option<usize>,
    /// Estimation shots for per-run certification [default: 1000]
    #[arg(long)]
    n: Option<usize>,
    /// Confidence level for per-run certification [default: 0.01]
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(clap::Args, Deserialize, Clone, Default)]
#[serde(default, deny_unknown_fields)]
struct FrontierArgs {
    /// Sweep journal (JSON lines)
    #[arg(long, value_name = "FILE")]
    journal: Option<PathBuf>,
    /// Robustness metric [default: cagm]
    #[arg(long, value_enum)]
    metric: Option<MetricKind>,
    /// Accuracy bin width [default: 0.02]
    #[arg(long)]
    bin_width: Option<f64>,
    /// Frontier CSV path [default: <out>/frontier.csv]
    #[arg(long, value_name = "FILE")]
    csv_out: Option<PathBuf>,
    /// Fit JSON path [default: <out>/frontier_fit.json]
    #[arg(long, value_name = "FILE")]
    fit_out: Option<PathBuf>,
}

#[derive(clap::Args, Deserialize, Clone, Default)]
#[serde(default, deny_unknown_fields)]
struct CorrelationArgs {
    /// Sweep journal (JSON lines)
    #[arg(long, value_name = "FILE")]
    journal: Option<PathBuf>,
    /// Robustness metric [default: cagm]
    #[arg(long, value_enum)]
    metric: Option<MetricKind>,
    /// Accuracy bin width for the frontier-derived cutoff [default: 0.02]
    #[arg(long)]
    bin_width: Option<f64>,
    /// Accuracy cutoff [default: the frontier's minimum accuracy]
    #[arg(long)]
    min_accuracy: Option<f64>,
    /// Number of metric bins [default: 8]
    #[arg(long)]
    bins: Option<usize>,
    /// Bins CSV path [default: <out>/correlation.csv]
    #[arg(long, value_name = "FILE")]
    csv_out: Option<PathBuf>,
    /// Fit JSON path [default: <out>/correlation_fit.json]
    #[arg(long, value_name = "FILE")]
    fit_out: Option<PathBuf>,
}

/// Config-file mirror of the CLI: global keys plus one section per
/// subcommand.
#[derive(Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    out: Option<PathBuf>,
    threads: Option<usize>,
    gen_data: GenDataArgs,
    train: TrainArgs,
    certify: CertifyArgs,
    noise_sweep: NoiseSweepArgs,
    hp_sweep: HpSweepArgs,
    frontier: FrontierArgs,
    correlation: CorrelationArgs,
}

fn load_file_config(path: Option<&PathBuf>) -> CliResult<FileConfig> {
    match path {
        Some(p) => {
            let text = certiq_cli::formats::read_to_string(p)?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
        }
        None => Ok(FileConfig::default()),
    }
}

fn required<T>(value: Option<T>, flag: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::Config(format!("missing required flag {flag}")))
}

fn resolve_threads(flag: Option<usize>, cfg: Option<usize>) -> CliResult<Option<usize>> {
    if let Some(t) = flag.or(cfg) {
        return Ok(Some(t));
    }
    match std::env::var("CERTIQ_THREADS") {
        Ok(value) => value
            .parse::<usize>()
            .map(Some)
            .map_err(|_| CliError::Config(format!("CERTIQ_THREADS is not a number: {value}"))),
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let file_config = load_file_config(cli.config.as_ref())?;
    let seed = cli.seed.or(file_config.seed).unwrap_or(0);
    let out_dir = cli
        .out
        .or(file_config.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    if let Some(threads) = resolve_threads(cli.threads, file_config.threads)? {
        if threads == 0 {
            return Err(CliError::Config("threads must be at least 1".to_string()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }

    match cli.command {
        Command::GenData(mut args) => {
            let cfg = &file_config.gen_data;
            merge_opt!(args, cfg; qubits, train, test, boundary);
            certiq_cli::commands::gen_data::run(&GenDataOpts {
                seed,
                out_dir,
                qubits: args.qubits.unwrap_or(4),
                train: args.train.unwrap_or(50),
                test: args.test.unwrap_or(50),
                boundary: args.boundary,
            })
        }
        Command::Train(mut args) => {
            let cfg = &file_config.train;
            merge_opt!(args, cfg; data, lambda, eta_theta, eta_sigma, eta_r, sigma0, reg,
                iterations, batch_size, prob_clamp, conv_reps, plain, model_out, history_out);
            let reg_kind = args.reg.as_deref().map(parse_reg_kind).transpose()?;
            certiq_cli::commands::train::run(&TrainOpts {
                seed,
                data: required(args.data, "--data")?,
                model_out: args.model_out.unwrap_or_else(|| out_dir.join("model.json")),
                history_out: args
                    .history_out
                    .unwrap_or_else(|| out_dir.join("history.csv")),
                conv_reps: args
                    .conv_reps
                    .unwrap_or(certiq_cli::commands::train::DEFAULT_CONV_REPS),
                plain: args.plain.unwrap_or(false),
                tunables: TrainTunables {
                    lambda: args.lambda,
                    eta_theta: args.eta_theta,
                    eta_sigma: args.eta_sigma,
                    eta_r: args.eta_r,
                    sigma0: args.sigma0,
                    reg_kind,
                    iterations: args.iterations,
                    batch_size: args.batch_size,
                    prob_clamp: args.prob_clamp,
                },
            })
        }
        Command::Certify(mut args) => {
            let cfg = &file_config.certify;
            merge_opt!(args, cfg; model, data, n0, n, alpha, bonferroni, certs_out, metrics_out);
            certiq_cli::commands::certify::run(&CertifyCmdOpts {
                seed,
                model: required(args.model, "--model")?,
                data: required(args.data, "--data")?,
                certs_out: args
                    .certs_out
                    .unwrap_or_else(|| out_dir.join("certs.jsonl")),
                metrics_out: args
                    .metrics_out
                    .unwrap_or_else(|| out_dir.join("metrics.json")),
                n0: args.n0.unwrap_or(100),
                n: args.n.unwrap_or(1000),
                alpha: args.alpha.unwrap_or(0.01),
                bonferroni: args.bonferroni.unwrap_or(false),
            })
        }
        Command::NoiseSweep(mut args) => {
            let cfg = &file_config.noise_sweep;
            merge_opt!(args, cfg; model, plain_model, data, scales, draws, points,
                inner_samples, csv_out);
            certiq_cli::commands::noise_sweep::run(&NoiseSweepOpts {
                seed,
                model: required(args.model, "--model")?,
                plain_model: required(args.plain_model, "--plain-model")?,
                data: required(args.data, "--data")?,
                csv_out: args
                    .csv_out
                    .unwrap_or_else(|| out_dir.join("noise_sweep.csv")),
                scales: args.scales.unwrap_or_else(|| vec![0.0, 0.5, 1.0, 2.0, 4.0]),
                draws: args.draws.unwrap_or(100),
                points: args.points.unwrap_or(20),
                inner_samples: args.inner_samples.unwrap_or(64),
            })
            .map(|_| ())
        }
        Command::HpSweep(mut args) => {
            let cfg = &file_config.hp_sweep;
            merge_opt!(args, cfg; budget, train_data, test_data, journal, space,
                iterations, batch_size, conv_reps, n0, n, alpha);
            certiq_cli::commands::hp_sweep::run(&HpSweepOpts {
                seed,
                budget: args.budget.unwrap_or(8),
                train_data: required(args.train_data, "--train-data")?,
                test_data: required(args.test_data, "--test-data")?,
                journal: args.journal.unwrap_or_else(|| out_dir.join("sweep.jsonl")),
                space: args.space,
                iterations: args.iterations.unwrap_or(1500),
                batch_size: args.batch_size.unwrap_or(50),
                conv_reps: args
                    .conv_reps
                    .unwrap_or(certiq_cli::commands::train::DEFAULT_CONV_REPS),
                n0: args.n0.unwrap_or(100),
                n: args.n.unwrap_or(1000),
                alpha: args.alpha.unwrap_or(0.01),
            })
        }
        Command::Frontier(mut args) => {
            let cfg = &file_config.frontier;
            merge_opt!(args, cfg; journal, metric, bin_width, csv_out, fit_out);
            certiq_cli::commands::reports::run_frontier(&FrontierOpts {
                journal: required(args.journal, "--journal")?,
                metric: args.metric.unwrap_or(MetricKind::Cagm),
                bin_width: args.bin_width.unwrap_or(0.02),
                csv_out: args.csv_out.unwrap_or_else(|| out_dir.join("frontier.csv")),
                fit_out: args
                    .fit_out
                    .unwrap_or_else(|| out_dir.join("frontier_fit.json")),
            })
        }
        Command::Correlation(mut args) => {
            let cfg = &file_config.correlation;
            merge_opt!(args, cfg; journal, metric, bin_width, min_accuracy, bins, csv_out, fit_out);
            certiq_cli::commands::reports::run_correlation(&CorrelationOpts {
                journal: required(args.journal, "--journal")?,
                metric: args.metric.unwrap_or(MetricKind::Cagm),
                bin_width: args.bin_width.unwrap_or(0.02),
                min_accuracy: args.min_accuracy,
                bins: args.bins.unwrap_or(8),
                csv_out: args
                    .csv_out
                    .unwrap_or_else(|| out_dir.join("correlation.csv")),
                fit_out: args
                    .fit_out
                    .unwrap_or_else(|| out_dir.join("correlation_fit.json")),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
