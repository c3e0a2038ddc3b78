//! `noise-sweep`: accuracy of the plain and smoothed models under
//! injected parameter noise of increasing scale.
//!
//! For each scale `c` the same base standard-normal draws are rescaled to
//! `ε ~ N(0, diag((c·σ)²))` (σ from the smoothed model) and applied to
//! both models' parameters; pairing the draws across scales and models
//! isolates the effect of the noise level. The smoothed model is deployed
//! as the majority vote of per-draw predictions over a fixed budget of
//! inner samples; the plain model is a single evaluation.

use std::path::PathBuf;

use rayon::prelude::*;

use certiq_core::circuit::classifier_eval;
use certiq_core::rng::{Purpose, StreamFactory};
use certiq_core::smoothing::{sample_perturbed_params, SmoothedModel};
use certiq_core::state::argmax;

use crate::commands::{certify::check_model_against_data, mean_and_ci95};
use crate::error::{CliError, CliResult};
use crate::formats::{read_dataset, read_model, write_string};

#[derive(Debug, Clone)]
pub struct NoiseSweepOpts {
    pub seed: u64,
    pub model: PathBuf,
    pub plain_model: PathBuf,
    pub data: PathBuf,
    pub csv_out: PathBuf,
    pub scales: Vec<f64>,
    pub draws: usize,
    pub points: usize,
    pub inner_samples: usize,
}

/// One row of the emitted table.
#[derive(Debug, Clone)]
pub struct ScaleRow {
    pub scale: f64,
    pub noise_norm_mean: f64,
    pub plain_acc_mean: f64,
    pub plain_acc_ci95: f64,
    pub smoothed_acc_mean: f64,
    pub smoothed_acc_ci95: f64,
    /// Paired per-draw difference smoothed − plain.
    pub diff_mean: f64,
    pub diff_ci95: f64,
}

pub fn run(opts: &NoiseSweepOpts) -> CliResult<Vec<ScaleRow>> {
    if opts.draws == 0 || opts.points == 0 || opts.inner_samples == 0 {
        return Err(CliError::Config(
            "draws, points, and inner-samples must all be positive".to_string(),
        ));
    }
    for &scale in &opts.scales {
        if !(scale.is_finite() && scale >= 0.0) {
            return Err(CliError::Config(format!("bad noise scale {scale}")));
        }
    }
    if opts.scales.is_empty() {
        return Err(CliError::Config(
            "at least one noise scale required".to_string(),
        ));
    }

    let smoothed = read_model(&opts.model)?;
    let plain = read_model(&opts.plain_model)?;
    let dataset = read_dataset(&opts.data)?;
    check_model_against_data(&smoothed, dataset.header.n_qubits)?;
    check_model_against_data(&plain, dataset.header.n_qubits)?;
    if smoothed.model.dim() != plain.model.dim() {
        return Err(CliError::Config(format!(
            "model parameter counts differ: smoothed {}, plain {}",
            smoothed.model.dim(),
            plain.model.dim()
        )));
    }
    if dataset.samples.len() < opts.points {
        return Err(CliError::Config(format!(
            "dataset has {} samples but --points asks for {}",
            dataset.samples.len(),
            opts.points
        )));
    }
    let points = &dataset.samples[..opts.points];
    let dim = smoothed.model.dim();
    let sigma = smoothed.model.sigma().to_vec();

    let factory = StreamFactory::new(opts.seed);
    // Unit-Gaussian helper: θ=0, σ=1 turns the model sampler into a plain
    // standard-normal vector source.
    let unit = SmoothedModel::new(vec![0.0; dim], vec![1.0; dim])?;
    let base_draws: Vec<Vec<f64>> = (0..opts.draws)
        .map(|k| {
            let mut rng = factory.stream(Purpose::NoiseDraw, k as u64, 0);
            sample_perturbed_params(&unit, &mut rng)
        })
        .collect();

    let eval_point = |bundle: &crate::formats::ModelBundle,
                      state: &certiq_core::state::Statevector,
                      params: &[f64]|
     -> Vec<f64> {
        classifier_eval(&bundle.circuit, &bundle.readout, state, params)
            .expect("circuit evaluation on validated inputs")
    };

    let mut rows = Vec::with_capacity(opts.scales.len());
    for &scale in &opts.scales {
        let per_draw: Vec<(f64, f64, f64)> = (0..opts.draws)
            .into_par_iter()
            .map(|k| {
                let eps: Vec<f64> = base_draws[k]
                    .iter()
                    .zip(&sigma)
                    .map(|(&g, &s)| scale * s * g)
                    .collect();
                let norm = eps.iter().map(|e| e * e).sum::<f64>().sqrt();

                let plain_params: Vec<f64> = plain
                    .model
                    .theta()
                    .iter()
                    .zip(&eps)
                    .map(|(&t, &e)| t + e)
                    .collect();
                let shifted_theta: Vec<f64> = smoothed
                    .model
                    .theta()
                    .iter()
                    .zip(&eps)
                    .map(|(&t, &e)| t + e)
                    .collect();
                let shifted = SmoothedModel::new(shifted_theta, sigma.clone())
                    .expect("validated σ stays positive");

                let mut plain_correct = 0usize;
                let mut smoothed_correct = 0usize;
                for (p, sample) in points.iter().enumerate() {
                    let probs = eval_point(&plain, &sample.state, &plain_params);
                    if argmax(&probs) == sample.label {
                        plain_correct += 1;
                    }
                    // Inner smoothing streams are keyed by point and shot
                    // only, so the deployed classifier is one fixed
                    // function across draws and scales.
                    let mut votes = vec![0usize; smoothed.readout.class_count()];
                    for m in 0..opts.inner_samples {
                        let mut rng = factory.stream(Purpose::NoiseEval, p as u64, m as u64);
                        let params = sample_perturbed_params(&shifted, &mut rng);
                        let probs = eval_point(&smoothed, &sample.state, &params);
                        votes[argmax(&probs)] += 1;
                    }
                    let votes: Vec<f64> = votes.iter().map(|&v| v as f64).collect();
                    if argmax(&votes) == sample.label {
                        smoothed_correct += 1;
                    }
                }
                let n = points.len() as f64;
                (norm, plain_correct as f64 / n, smoothed_correct as f64 / n)
            })
            .collect();

        let norms: Vec<f64> = per_draw.iter().map(|r| r.0).collect();
        let plain_acc: Vec<f64> = per_draw.iter().map(|r| r.1).collect();
        let smoothed_acc: Vec<f64> = per_draw.iter().map(|r| r.2).collect();
        let diffs: Vec<f64> = per_draw.iter().map(|r| r.2 - r.1).collect();
        let (plain_mean, plain_ci) = mean_and_ci95(&plain_acc);
        let (smoothed_mean, smoothed_ci) = mean_and_ci95(&smoothed_acc);
        let (diff_mean, diff_ci) = mean_and_ci95(&diffs);
        rows.push(ScaleRow {
            scale,
            noise_norm_mean: norms.iter().sum::<f64>() / norms.len() as f64,
            plain_acc_mean: plain_mean,
            plain_acc_ci95: plain_ci,
            smoothed_acc_mean: smoothed_mean,
            smoothed_acc_ci95: smoothed_ci,
            diff_mean,
            diff_ci95: diff_ci,
        });
    }

    let mut csv = String::from(
        "scale,noise_norm_mean,plain_acc_mean,plain_acc_ci95,\
         smoothed_acc_mean,smoothed_acc_ci95,diff_mean,diff_ci95\n",
    );
    for row in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            row.scale,
            row.noise_norm_mean,
            row.plain_acc_mean,
            row.plain_acc_ci95,
            row.smoothed_acc_mean,
            row.smoothed_acc_ci95,
            row.diff_mean,
            row.diff_ci95
        ));
    }
    write_string(&opts.csv_out, &csv)?;

    println!(
        "noise-sweep: {} scales, {} draws, {} test points, {} inner samples",
        opts.scales.len(),
        opts.draws,
        opts.points,
        opts.inner_samples
    );
    for row in &rows {
        println!(
            "  scale {:>4}: noise norm {:.4}, plain {:.4} ± {:.4}, smoothed {:.4} ± {:.4}",
            row.scale,
            row.noise_norm_mean,
            row.plain_acc_mean,
            row.plain_acc_ci95,
            row.smoothed_acc_mean,
            row.smoothed_acc_ci95
        );
    }
    println!("  table -> {}", opts.csv_out.display());
    Ok(rows)
}
