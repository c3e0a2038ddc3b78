//! Separable natural evolution strategy over (θ, σ): rank-based utilities,
//! the certification-margin fitness, the coupled θ/σ update step, and the
//! full training loop for circuit classifiers.
//!
//! Each iteration draws λ standard-normal vectors `s_k`, evaluates the
//! fitness of the candidates `z_k = θ + σ⊙s_k`, sorts the draws by fitness,
//! and ascends the natural gradient:
//!
//! ```text
//! θ ← θ + η_θ · σ ⊙ Σ_k u_k s_k
//! σ ← σ ⊙ exp( (η_σ/2) · Σ_k u_k (s_k² − 1) )
//! σ ← σ + η_r · reg(σ)
//! ```
//!
//! with zero-sum rank utilities `u_k`. The variance regularizer pushes σ
//! up, trading raw margin for certified volume.

use crate::circuit::{classifier_eval, ParamCircuit};
use crate::rng::{Purpose, StreamFactory};
use crate::smoothing::SmoothedModel;
use crate::state::{argmax, ClassReadout, Statevector};
use crate::stats::std_normal_quantile;
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;
use rand_distr::StandardNormal;

/// Lower bound kept on every σ component after an update.
pub const SIGMA_FLOOR: f64 = 1e-8;

/// Which variance regularizer the σ update adds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegKind {
    /// `reg(σ) = σ`: multiplicative growth, the two-norm-style term.
    L2,
    /// `reg(σ) = 1 ⊘ σ`: pushes small components up hardest, the
    /// certified-area-oriented term.
    Area,
}

/// Hyperparameters of the training loop.
#[derive(Debug, Clone, PartialEq)]
pub struct SnesConfig {
    /// Population size λ (number of candidates per iteration).
    pub lambda: usize,
    pub eta_theta: f64,
    pub eta_sigma: f64,
    /// Regularization rate; 0 disables the regularizer. Negative values
    /// turn both regularizers into shrinkage.
    pub eta_r: f64,
    /// Initial value of every σ component.
    pub sigma0: f64,
    pub reg_kind: RegKind,
    /// Number of optimization iterations.
    pub iterations: usize,
    /// Minibatch size per iteration, capped at the dataset size.
    pub batch_size: usize,
    /// Probabilities are clamped to `[prob_clamp, 1 − prob_clamp]` before
    /// the Gaussian quantile inside the fitness.
    pub prob_clamp: f64,
    /// Optional per-parameter mask; `true` entries skip the θ update while
    /// σ keeps adapting.
    pub frozen_mask: Option<Vec<bool>>,
    /// When set, σ is never updated (no natural-gradient step, no
    /// regularizer, no floor). Used for plain non-smoothed baselines that
    /// reuse this loop with a fixed tiny σ.
    pub freeze_sigma: bool,
    /// Global seed for θ initialization, candidate draws, and batches.
    pub seed: u64,
}

impl Default for SnesConfig {
    fn default() -> Self {
        SnesConfig {
            lambda: 24,
            eta_theta: 0.1,
            eta_sigma: 1e-2,
            eta_r: 1e-4,
            sigma0: 0.1,
            reg_kind: RegKind::L2,
            iterations: 1500,
            batch_size: 50,
            prob_clamp: 1e-6,
            frozen_mask: None,
            freeze_sigma: false,
            seed: 0,
        }
    }
}

impl SnesConfig {
    /// Validates the configuration against a parameter dimension.
    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.lambda < 2 {
            return Err(Error::InvalidArgument("population must be at least 2"));
        }
        if !(self.eta_theta > 0.0 && self.eta_sigma > 0.0) {
            return Err(Error::InvalidArgument("learning rates must be positive"));
        }
        if !self.eta_r.is_finite() {
            return Err(Error::InvalidArgument("eta_r must be finite"));
        }
        if self.sigma0 <= 0.0 || self.sigma0.is_nan() {
            return Err(Error::InvalidArgument("sigma0 must be positive"));
        }
        if !(self.prob_clamp > 0.0 && self.prob_clamp < 0.5) {
            return Err(Error::InvalidArgument("prob_clamp must lie in (0, 0.5)"));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument("batch_size must be at least 1"));
        }
        if let Some(mask) = &self.frozen_mask {
            if mask.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: mask.len(),
                });
            }
        }
        Ok(())
    }
}

/// One history row per training iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainRecord {
    pub iteration: usize,
    /// Mean candidate fitness this iteration (non-finite values excluded).
    pub mean_fitness: f64,
    /// Mean of the σ components after the update.
    pub mean_sigma: f64,
    /// Fraction of the iteration's batch classified correctly by the
    /// updated θ (single plain evaluation per sample).
    pub train_accuracy: f64,
}

pub type TrainHistory = Vec<TrainRecord>;

/// Zero-sum rank utilities for ranks `1..=lambda` (rank 1 = best fitness):
/// `u_k = max(0, ln(λ/2 + 1) − ln k) / Σ_j max(0, ln(λ/2 + 1) − ln j) − 1/λ`.
pub fn rank_utilities(lambda: usize) -> Result<Vec<f64>> {
    if lambda < 2 {
        return Err(Error::InvalidArgument("population must be at least 2"));
    }
    let pivot = libm::log(lambda as f64 / 2.0 + 1.0);
    let raw: Vec<f64> = (1..=lambda)
        .map(|k| (pivot - libm::log(k as f64)).max(0.0))
        .collect();
    let total: f64 = raw.iter().sum();
    Ok(raw
        .iter()
        .map(|r| r / total - 1.0 / lambda as f64)
        .collect())
}

/// The per-sample training fitness: `(Φ⁻¹(p_a) − Φ⁻¹(p_b)) / 2` where
/// `p_a` is the probability of the true label and `p_b` the largest
/// probability among the other classes, both clamped to
/// `[clamp, 1 − clamp]`. Negative when the sample is misclassified.
pub fn fitness_margin(class_probs: &[f64], label: usize, clamp: f64) -> f64 {
    let p_a = class_probs[label];
    let p_b = class_probs
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != label)
        .map(|(_, &p)| p)
        .fold(f64::NEG_INFINITY, f64::max);
    let bound = |p: f64| p.max(clamp).min(1.0 - clamp);
    let qa = std_normal_quantile(bound(p_a)).expect("clamped probability is inside (0,1)");
    let qb = std_normal_quantile(bound(p_b)).expect("clamped probability is inside (0,1)");
    (qa - qb) / 2.0
}

/// Applies the chosen variance regularizer: `σ + η_r·σ` (L2) or
/// `σ + η_r ⊘ σ` (Area), element-wise. `η_r = 0` is the identity.
pub fn regularize_sigma(sigma: &[f64], kind: RegKind, eta_r: f64) -> Vec<f64> {
    sigma
        .iter()
        .map(|&s| match kind {
            RegKind::L2 => s + eta_r * s,
            RegKind::Area => s + eta_r / s,
        })
        .collect()
}

/// Candidate ordering: descending by fitness, non-finite values last,
/// ties stable by candidate index.
fn sorted_candidate_order(fitness: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..fitness.len()).collect();
    order.sort_by(|&a, &b| {
        let (fa, fb) = (fitness[a], fitness[b]);
        match (fa.is_finite(), fb.is_finite()) {
            (true, false) => core::cmp::Ordering::Less,
            (false, true) => core::cmp::Ordering::Greater,
            (false, false) => a.cmp(&b),
            (true, true) => fb
                .partial_cmp(&fa)
                .expect("finite floats compare")
                .then(a.cmp(&b)),
        }
    });
    order
}

/// One optimizer iteration, updating `theta` and `sigma` in place.
///
/// `evaluate` maps a candidate parameter vector to its fitness and must be
/// deterministic for the iteration's batch; candidates are keyed by
/// `(iteration, candidate_index)` streams, so results do not depend on
/// evaluation order. Returns the mean finite candidate fitness.
pub fn snes_step<F>(
    theta: &mut [f64],
    sigma: &mut [f64],
    config: &SnesConfig,
    evaluate: &F,
    factory: &StreamFactory,
    iteration: u64,
) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let dim = theta.len();
    if sigma.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: sigma.len(),
        });
    }
    config.validate(dim)?;
    let lambda = config.lambda;
    let utilities = rank_utilities(lambda)?;

    let draws: Vec<Vec<f64>> = (0..lambda)
        .map(|k| {
            let mut rng = factory.stream(Purpose::TrainCandidates, iteration, k as u64);
            (0..dim)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect()
        })
        .collect();
    let fitness: Vec<f64> = draws
        .iter()
        .map(|s| {
            let candidate: Vec<f64> = theta
                .iter()
                .zip(sigma.iter())
                .zip(s)
                .map(|((&t, &g), &si)| t + g * si)
                .collect();
            evaluate(&candidate)
        })
        .collect();

    let order = sorted_candidate_order(&fitness);
    let mut grad_theta = vec![0.0f64; dim];
    let mut grad_sigma = vec![0.0f64; dim];
    for (rank, &candidate) in order.iter().enumerate() {
        let u = utilities[rank];
        let s = &draws[candidate];
        for i in 0..dim {
            grad_theta[i] += u * s[i];
            grad_sigma[i] += u * (s[i] * s[i] - 1.0);
        }
    }

    let all_frozen = vec![false; dim];
    let frozen = config.frozen_mask.as_deref().unwrap_or(&all_frozen);
    for i in 0..dim {
        if !frozen[i] {
            theta[i] += config.eta_theta * sigma[i] * grad_theta[i];
        }
    }
    if !config.freeze_sigma {
        for i in 0..dim {
            sigma[i] *= libm::exp(config.eta_sigma / 2.0 * grad_sigma[i]);
        }
        let regularized = regularize_sigma(sigma, config.reg_kind, config.eta_r);
        for (s, r) in sigma.iter_mut().zip(regularized) {
            *s = r.max(SIGMA_FLOOR);
        }
    }

    let finite: Vec<f64> = fitness.iter().copied().filter(|f| f.is_finite()).collect();
    Ok(if finite.is_empty() {
        f64::NAN
    } else {
        finite.iter().sum::<f64>() / finite.len() as f64
    })
}

/// Draws a without-replacement minibatch of `batch` indices out of `len`.
fn draw_batch(factory: &StreamFactory, iteration: u64, len: usize, batch: usize) -> Vec<usize> {
    let batch = batch.min(len);
    if batch == len {
        return (0..len).collect();
    }
    let mut rng = factory.stream(Purpose::TrainBatch, iteration, 0);
    let mut indices: Vec<usize> = (0..len).collect();
    for i in 0..batch {
        let j = i + rng.gen_range(0..len - i);
        indices.swap(i, j);
    }
    indices.truncate(batch);
    indices
}

/// Trains a smoothed circuit classifier on labelled input states.
///
/// θ starts uniform in [−π, π) and σ at `sigma0`; each iteration runs one
/// [`snes_step`] whose fitness is the batch-mean [`fitness_margin`] of a
/// single circuit evaluation per candidate and sample. Returns the final
/// model and one history row per iteration.
pub fn train(
    circuit: &ParamCircuit,
    readout: &ClassReadout,
    dataset: &[(Statevector, usize)],
    config: &SnesConfig,
) -> Result<(SmoothedModel, TrainHistory)> {
    let dim = circuit.n_params();
    if dim == 0 {
        return Err(Error::InvalidArgument(
            "circuit must have parameters to train",
        ));
    }
    config.validate(dim)?;
    if dataset.is_empty() {
        return Err(Error::InvalidArgument("dataset must be nonempty"));
    }
    for (state, label) in dataset {
        if state.n_qubits() != circuit.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: circuit.n_qubits(),
                actual: state.n_qubits(),
            });
        }
        if *label >= readout.class_count() {
            return Err(Error::InvalidArgument(
                "label outside the readout's classes",
            ));
        }
    }

    let factory = StreamFactory::new(config.seed);
    let mut theta: Vec<f64> = {
        let mut rng = factory.stream(Purpose::ThetaInit, 0, 0);
        (0..dim)
            .map(|_| -core::f64::consts::PI + 2.0 * core::f64::consts::PI * rng.gen::<f64>())
            .collect()
    };
    let mut sigma = vec![config.sigma0; dim];
    let mut history = TrainHistory::with_capacity(config.iterations);

    for iteration in 0..config.iterations {
        let batch = draw_batch(&factory, iteration as u64, dataset.len(), config.batch_size);
        let evaluate = |candidate: &[f64]| -> f64 {
            let mut total = 0.0f64;
            for &idx in &batch {
                let (state, label) = &dataset[idx];
                let probs = classifier_eval(circuit, readout, state, candidate)
                    .expect("dimensions validated before training");
                total += fitness_margin(&probs, *label, config.prob_clamp);
            }
            total / batch.len() as f64
        };
        let mean_fitness = snes_step(
            &mut theta,
            &mut sigma,
            config,
            &evaluate,
            &factory,
            iteration as u64,
        )?;

        let mut correct = 0usize;
        for &idx in &batch {
            let (state, label) = &dataset[idx];
            let probs = classifier_eval(circuit, readout, state, &theta)
                .expect("dimensions validated before training");
            if argmax(&probs) == *label {
                correct += 1;
            }
        }
        history.push(TrainRecord {
            iteration,
            mean_fitness,
            mean_sigma: sigma.iter().sum::<f64>() / dim as f64,
            train_accuracy: correct as f64 / batch.len() as f64,
        });
    }

    let model = SmoothedModel::new(theta, sigma)?;
    Ok((model, history))
}
