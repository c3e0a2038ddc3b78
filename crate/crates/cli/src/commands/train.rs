//! `train`: fits a smoothed (or plain-baseline) circuit classifier.

use std::path::PathBuf;

use certiq_core::qcnn::{build_qcnn, QcnnSpec};
use certiq_core::snes::{train, RegKind, SnesConfig};

use crate::error::{CliError, CliResult};
use crate::formats::{history_csv, read_dataset, write_model, write_string};

/// Trainer knobs before defaulting; `None` means "use the default".
#[derive(Debug, Clone, Default)]
pub struct TrainTunables {
    pub lambda: Option<usize>,
    pub eta_theta: Option<f64>,
    pub eta_sigma: Option<f64>,
    pub eta_r: Option<f64>,
    pub sigma0: Option<f64>,
    pub reg_kind: Option<RegKind>,
    pub iterations: Option<usize>,
    pub batch_size: Option<usize>,
    pub prob_clamp: Option<f64>,
}

/// σ of the plain baseline: frozen during training and ignored at
/// deployment, but it still scales the θ step, so it must stay large
/// enough for the optimizer to move.
pub const PLAIN_BASELINE_SIGMA: f64 = 0.05;

/// Harness-level θ learning rate: the library midpoint (0.1) underfits the
/// reference 4-qubit task within the default iteration budget.
pub const DEFAULT_ETA_THETA: f64 = 0.3;

/// Harness-level σ learning rate: slower σ adaptation keeps the smoothing
/// scale near σ₀ long enough for the θ update to find wider optima.
pub const DEFAULT_ETA_SIGMA: f64 = 3e-3;

/// Harness-level convolution repetitions; two reps per layer are needed to
/// separate all four phases at small register sizes.
pub const DEFAULT_CONV_REPS: usize = 2;

impl TrainTunables {
    /// Resolves to a concrete configuration. The plain baseline freezes σ
    /// at a small constant and drops the regularizer (explicit flags still
    /// win).
    pub fn resolve(&self, plain: bool, seed: u64) -> SnesConfig {
        let defaults = SnesConfig::default();
        SnesConfig {
            lambda: self.lambda.unwrap_or(defaults.lambda),
            eta_theta: self.eta_theta.unwrap_or(DEFAULT_ETA_THETA),
            eta_sigma: self.eta_sigma.unwrap_or(DEFAULT_ETA_SIGMA),
            eta_r: self
                .eta_r
                .unwrap_or(if plain { 0.0 } else { defaults.eta_r }),
            sigma0: self.sigma0.unwrap_or(if plain {
                PLAIN_BASELINE_SIGMA
            } else {
                defaults.sigma0
            }),
            reg_kind: self.reg_kind.unwrap_or(defaults.reg_kind),
            iterations: self.iterations.unwrap_or(defaults.iterations),
            batch_size: self.batch_size.unwrap_or(defaults.batch_size),
            prob_clamp: self.prob_clamp.unwrap_or(defaults.prob_clamp),
            frozen_mask: None,
            freeze_sigma: plain,
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainOpts {
    pub seed: u64,
    pub data: PathBuf,
    pub model_out: PathBuf,
    pub history_out: PathBuf,
    pub conv_reps: usize,
    pub plain: bool,
    pub tunables: TrainTunables,
}

pub fn run(opts: &TrainOpts) -> CliResult<()> {
    let dataset = read_dataset(&opts.data)?;
    let spec = QcnnSpec::new(dataset.header.n_qubits, opts.conv_reps)?;
    let (circuit, readout) = build_qcnn(&spec)?;
    let mut config = opts.tunables.resolve(opts.plain, opts.seed);
    config.batch_size = config.batch_size.min(dataset.samples.len());

    let labelled = dataset.labelled_states();
    for (_, label) in &labelled {
        if *label >= readout.class_count() {
            return Err(CliError::Config(format!(
                "dataset label {label} exceeds the circuit's {} classes",
                readout.class_count()
            )));
        }
    }

    let (model, history) = train(&circuit, &readout, &labelled, &config)?;

    write_model(
        &opts.model_out,
        opts.seed,
        opts.plain,
        &spec,
        &model,
        &config,
        &circuit,
        &readout,
    )?;
    write_string(&opts.history_out, &history_csv(&history))?;

    let last = history.last();
    println!(
        "train: {} samples, {} qubits, {} parameters, {} iterations{}",
        labelled.len(),
        spec.n_qubits,
        circuit.n_params(),
        config.iterations,
        if opts.plain { " (plain baseline)" } else { "" }
    );
    if let Some(row) = last {
        println!(
            "  final mean fitness {:.6}, batch accuracy {:.4}, mean sigma {:.6}",
            row.mean_fitness, row.train_accuracy, row.mean_sigma
        );
    }
    println!("  model -> {}", opts.model_out.display());
    println!("  history -> {}", opts.history_out.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_resolution_freezes_sigma_and_disables_regularization() {
        let config = TrainTunables::default().resolve(true, 3);
        assert!(config.freeze_sigma);
        assert_eq!(config.eta_r, 0.0);
        assert_eq!(config.sigma0, PLAIN_BASELINE_SIGMA);
        assert_eq!(config.seed, 3);

        // Explicit values beat the plain-mode defaults.
        let tunables = TrainTunables {
            sigma0: Some(0.2),
            eta_r: Some(1e-3),
            ..TrainTunables::default()
        };
        let config = tunables.resolve(true, 3);
        assert_eq!(config.sigma0, 0.2);
        assert_eq!(config.eta_r, 1e-3);
        assert!(config.freeze_sigma);
    }

    #[test]
    fn smoothed_resolution_mixes_library_and_harness_defaults() {
        let config = TrainTunables::default().resolve(false, 9);
        let defaults = SnesConfig::default();
        assert_eq!(config.lambda, defaults.lambda);
        assert_eq!(config.sigma0, defaults.sigma0);
        assert_eq!(config.eta_r, defaults.eta_r);
        assert_eq!(config.eta_theta, DEFAULT_ETA_THETA);
        assert_eq!(config.eta_sigma, DEFAULT_ETA_SIGMA);
        assert!(!config.freeze_sigma);
    }
}
