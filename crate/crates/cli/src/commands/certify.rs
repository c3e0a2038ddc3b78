//! `certify`: per-sample robustness certificates plus aggregate metrics.

use std::path::PathBuf;

use rayon::prelude::*;

use certiq_core::circuit::classifier_eval;
use certiq_core::rng::StreamFactory;
use certiq_core::smoothing::{certify, metrics_report, CertifyOptions, RunnerUpBound};

use crate::error::{CliError, CliResult};
use crate::formats::{
    read_dataset, read_model, runner_up_name, write_string, CertRecord, CertsHeader, MetricsFile,
    ModelBundle, FORMAT_VERSION,
};

#[derive(Debug, Clone)]
pub struct CertifyCmdOpts {
    pub seed: u64,
    pub model: PathBuf,
    pub data: PathBuf,
    pub certs_out: PathBuf,
    pub metrics_out: PathBuf,
    pub n0: usize,
    pub n: usize,
    pub alpha: f64,
    pub bonferroni: bool,
}

/// Checks that a model's parameter vector matches its circuit and that the
/// dataset was generated at the circuit's register size.
pub fn check_model_against_data(bundle: &ModelBundle, n_qubits: usize) -> CliResult<()> {
    if bundle.model.dim() != bundle.circuit.n_params() {
        return Err(CliError::Config(format!(
            "model has {} parameters but its circuit takes {}",
            bundle.model.dim(),
            bundle.circuit.n_params()
        )));
    }
    if bundle.circuit.n_qubits() != n_qubits {
        return Err(CliError::Config(format!(
            "model circuit acts on {} qubits but the dataset has {}",
            bundle.circuit.n_qubits(),
            n_qubits
        )));
    }
    Ok(())
}

pub fn run(opts: &CertifyCmdOpts) -> CliResult<()> {
    let bundle = read_model(&opts.model)?;
    let dataset = read_dataset(&opts.data)?;
    check_model_against_data(&bundle, dataset.header.n_qubits)?;

    let certify_opts = CertifyOptions {
        n0: opts.n0,
        n: opts.n,
        alpha: opts.alpha,
        runner_up: if opts.bonferroni {
            RunnerUpBound::BonferroniUpper
        } else {
            RunnerUpBound::Complement
        },
    };
    let factory = StreamFactory::new(opts.seed);
    let class_count = bundle.readout.class_count();

    let results = dataset
        .samples
        .par_iter()
        .enumerate()
        .map(|(i, sample)| {
            let eval = |params: &[f64]| {
                classifier_eval(&bundle.circuit, &bundle.readout, &sample.state, params)
                    .expect("circuit evaluation on validated inputs")
            };
            certify(
                &bundle.model,
                &eval,
                class_count,
                &certify_opts,
                &factory,
                i as u64,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;

    let labels: Vec<usize> = dataset.samples.iter().map(|s| s.label).collect();
    let report = metrics_report(&results, &labels)?;

    let header = CertsHeader {
        version: FORMAT_VERSION,
        kind: "certificates".to_string(),
        seed: opts.seed,
        model_hash: bundle.file.circuit_hash.clone(),
        count: results.len(),
        n0: opts.n0,
        n: opts.n,
        alpha: opts.alpha,
        runner_up: runner_up_name(certify_opts.runner_up).to_string(),
    };
    let mut certs_text = serde_json::to_string(&header)?;
    certs_text.push('\n');
    let mut abstained = 0usize;
    for (i, result) in results.iter().enumerate() {
        let record = CertRecord::new(i, labels[i], result)?;
        if record.predicted.is_none() {
            abstained += 1;
        }
        certs_text.push_str(&serde_json::to_string(&record)?);
        certs_text.push('\n');
    }
    write_string(&opts.certs_out, &certs_text)?;

    let metrics = MetricsFile {
        version: FORMAT_VERSION,
        kind: "metrics".to_string(),
        seed: opts.seed,
        model_hash: bundle.file.circuit_hash.clone(),
        n_samples: results.len(),
        certified: results.len() - abstained,
        abstained,
        cagm: report.cagm,
        semi_axis_avg: report.semi_axis_avg,
        semi_axis_std: report.semi_axis_std,
        smoothed_accuracy: report.smoothed_accuracy,
        n0: opts.n0,
        n: opts.n,
        alpha: opts.alpha,
    };
    let mut metrics_text = serde_json::to_string_pretty(&metrics)?;
    metrics_text.push('\n');
    write_string(&opts.metrics_out, &metrics_text)?;

    println!(
        "certify: {} samples, n0={}, n={}, alpha={}, runner-up {}",
        results.len(),
        opts.n0,
        opts.n,
        opts.alpha,
        runner_up_name(certify_opts.runner_up)
    );
    println!(
        "  smoothed accuracy {:.4}, certified {}, abstained {}",
        report.smoothed_accuracy, metrics.certified, abstained
    );
    println!(
        "  cagm {:.6}, semi-axis avg {:.6}, semi-axis std {:.6}",
        report.cagm, report.semi_axis_avg, report.semi_axis_std
    );
    println!("  certificates -> {}", opts.certs_out.display());
    println!("  metrics -> {}", opts.metrics_out.display());
    Ok(())
}
