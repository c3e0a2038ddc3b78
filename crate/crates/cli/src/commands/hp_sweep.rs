//! `hp-sweep`: randomized hyperparameter search over the documented
//! ranges, with a resumable append-only journal.
//!
//! Each run index deterministically samples a configuration and a
//! training seed from the global seed, so a re-run (or a resumed run)
//! plans exactly the same runs and skips those already journaled.

use std::collections::HashSet;
use std::path::PathBuf;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use certiq_core::circuit::{classifier_eval, ParamCircuit};
use certiq_core::qcnn::{build_qcnn, QcnnSpec};
use certiq_core::rng::{Purpose, StreamFactory};
use certiq_core::smoothing::{certify, metrics_report, CertifyOptions, RunnerUpBound};
use certiq_core::snes::{train, SnesConfig};
use certiq_core::state::ClassReadout;

use crate::error::{CliError, CliResult};
use crate::formats::{
    append_journal, parse_reg_kind, read_dataset, read_journal, read_to_string, ConfigSnapshot,
    Dataset, MetricsSummary, SweepRecord,
};

/// Sampling ranges; bounds are inclusive. Rates and σ₀ are drawn
/// log-uniformly, the population size uniformly over integers.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchSpace {
    pub lambda: [usize; 2],
    pub eta_sigma: [f64; 2],
    pub eta_theta: [f64; 2],
    pub eta_r: [f64; 2],
    pub sigma0: [f64; 2],
    pub reg_kinds: Vec<String>,
}

impl Default for SearchSpace {
    fn default() -> Self {
        SearchSpace {
            lambda: [10, 40],
            eta_sigma: [1e-3, 1e-1],
            eta_theta: [2e-2, 1.0],
            eta_r: [1e-6, 1e-2],
            sigma0: [1e-2, 5e-1],
            reg_kinds: vec!["l2".to_string(), "area".to_string()],
        }
    }
}

impl SearchSpace {
    pub fn validate(&self) -> CliResult<()> {
        if self.lambda[0] < 2 || self.lambda[0] > self.lambda[1] {
            return Err(CliError::Config(
                "search space: lambda range must satisfy 2 <= lo <= hi".to_string(),
            ));
        }
        for (name, range) in [
            ("eta_sigma", self.eta_sigma),
            ("eta_theta", self.eta_theta),
            ("eta_r", self.eta_r),
            ("sigma0", self.sigma0),
        ] {
            if !(range[0] > 0.0 && range[0] <= range[1] && range[1].is_finite()) {
                return Err(CliError::Config(format!(
                    "search space: {name} range must satisfy 0 < lo <= hi"
                )));
            }
        }
        if self.reg_kinds.is_empty() {
            return Err(CliError::Config(
                "search space: at least one regularizer kind required".to_string(),
            ));
        }
        for kind in &self.reg_kinds {
            parse_reg_kind(kind)?;
        }
        Ok(())
    }
}

fn log_uniform<R: Rng>(rng: &mut R, range: [f64; 2]) -> f64 {
    let u: f64 = rng.gen();
    (range[0].ln() + u * (range[1].ln() - range[0].ln())).exp()
}

/// Samples run `index`'s configuration. The draw order is fixed (λ, η_σ,
/// η_θ, η_r, σ₀, regularizer) so configurations are stable per index.
pub fn sample_config(
    factory: &StreamFactory,
    index: u64,
    space: &SearchSpace,
    iterations: usize,
    batch_size: usize,
) -> CliResult<SnesConfig> {
    let mut rng = factory.stream(Purpose::SweepConfig, index, 0);
    let lambda = rng.gen_range(space.lambda[0]..=space.lambda[1]);
    let eta_sigma = log_uniform(&mut rng, space.eta_sigma);
    let eta_theta = log_uniform(&mut rng, space.eta_theta);
    let eta_r = log_uniform(&mut rng, space.eta_r);
    let sigma0 = log_uniform(&mut rng, space.sigma0);
    let kind_name = &space.reg_kinds[rng.gen_range(0..space.reg_kinds.len())];
    Ok(SnesConfig {
        lambda,
        eta_theta,
        eta_sigma,
        eta_r,
        sigma0,
        reg_kind: parse_reg_kind(kind_name)?,
        iterations,
        batch_size,
        prob_clamp: SnesConfig::default().prob_clamp,
        frozen_mask: None,
        freeze_sigma: false,
        seed: factory.derive_seed(Purpose::SweepRunSeed, index),
    })
}

#[derive(Debug, Clone)]
pub struct HpSweepOpts {
    pub seed: u64,
    pub budget: usize,
    pub train_data: PathBuf,
    pub test_data: PathBuf,
    pub journal: PathBuf,
    pub space: Option<PathBuf>,
    pub iterations: usize,
    pub batch_size: usize,
    pub conv_reps: usize,
    pub n0: usize,
    pub n: usize,
    pub alpha: f64,
}

#[allow(clippy::too_many_arguments)]
fn run_one(
    run_index: u64,
    config: &SnesConfig,
    run_id: &str,
    circuit: &ParamCircuit,
    readout: &ClassReadout,
    train_set: &[(certiq_core::state::Statevector, usize)],
    test_set: &Dataset,
    certify_opts: &CertifyOptions,
) -> SweepRecord {
    let outcome = (|| -> Result<MetricsSummary, certiq_core::Error> {
        let (model, _history) = train(circuit, readout, train_set, config)?;
        let factory = StreamFactory::new(config.seed);
        let mut results = Vec::with_capacity(test_set.samples.len());
        for (i, sample) in test_set.samples.iter().enumerate() {
            let eval = |params: &[f64]| {
                classifier_eval(circuit, readout, &sample.state, params)
                    .expect("circuit evaluation on validated inputs")
            };
            results.push(certify(
                &model,
                &eval,
                readout.class_count(),
                certify_opts,
                &factory,
                i as u64,
            )?);
        }
        let labels: Vec<usize> = test_set.samples.iter().map(|s| s.label).collect();
        let report = metrics_report(&results, &labels)?;
        Ok(MetricsSummary::from_report(&report))
    })();

    let config_snapshot = ConfigSnapshot::from_config(config);
    match outcome {
        Ok(metrics) => SweepRecord {
            run_id: run_id.to_string(),
            run_index,
            status: "completed".to_string(),
            config: config_snapshot,
            metrics: Some(metrics),
            error: None,
        },
        Err(e) => SweepRecord {
            run_id: run_id.to_string(),
            run_index,
            status: "failed".to_string(),
            config: config_snapshot,
            metrics: None,
            error: Some(e.to_string()),
        },
    }
}

pub fn run(opts: &HpSweepOpts) -> CliResult<()> {
    if opts.budget == 0 {
        return Err(CliError::Config("budget must be at least 1".to_string()));
    }
    let space = match &opts.space {
        Some(path) => serde_json::from_str::<SearchSpace>(&read_to_string(path)?)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?,
        None => SearchSpace::default(),
    };
    space.validate()?;

    let train_data = read_dataset(&opts.train_data)?;
    let test_data = read_dataset(&opts.test_data)?;
    if train_data.header.n_qubits != test_data.header.n_qubits {
        return Err(CliError::Config(format!(
            "train and test register sizes differ: {} vs {}",
            train_data.header.n_qubits, test_data.header.n_qubits
        )));
    }
    let spec = QcnnSpec::new(train_data.header.n_qubits, opts.conv_reps)?;
    let (circuit, readout) = build_qcnn(&spec)?;
    let train_set = train_data.labelled_states();
    let certify_opts = CertifyOptions {
        n0: opts.n0,
        n: opts.n,
        alpha: opts.alpha,
        runner_up: RunnerUpBound::Complement,
    };

    let mut known: HashSet<String> = read_journal(&opts.journal)?
        .into_iter()
        .map(|r| r.run_id)
        .collect();
    let already = known.len();

    let factory = StreamFactory::new(opts.seed);
    let mut pending: Vec<(u64, SnesConfig, String)> = Vec::new();
    let mut skipped = 0usize;
    for index in 0..opts.budget as u64 {
        let mut config = sample_config(&factory, index, &space, opts.iterations, opts.batch_size)?;
        config.batch_size = config.batch_size.min(train_set.len());
        let run_id = ConfigSnapshot::from_config(&config).run_id()?;
        if known.insert(run_id.clone()) {
            pending.push((index, config, run_id));
        } else {
            skipped += 1;
        }
    }

    println!(
        "hp-sweep: budget {}, journaled {}, skipping {}, running {}",
        opts.budget,
        already,
        skipped,
        pending.len()
    );

    let chunk_size = rayon::current_num_threads().max(1);
    let mut completed = 0usize;
    let mut failed = 0usize;
    for chunk in pending.chunks(chunk_size) {
        let records: Vec<SweepRecord> = chunk
            .par_iter()
            .map(|(index, config, run_id)| {
                run_one(
                    *index,
                    config,
                    run_id,
                    &circuit,
                    &readout,
                    &train_set,
                    &test_data,
                    &certify_opts,
                )
            })
            .collect();
        for record in &records {
            if record.status == "completed" {
                completed += 1;
            } else {
                failed += 1;
            }
        }
        append_journal(&opts.journal, &records)?;
    }

    println!(
        "  completed {completed}, failed {failed} -> {}",
        opts.journal.display()
    );
    Ok(())
}
