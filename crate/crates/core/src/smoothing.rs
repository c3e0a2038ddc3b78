//! Smoothed classifiers over Gaussian parameter noise: Monte-Carlo class
//! estimation, two-stage certification with Clopper-Pearson bounds, the
//! certified robust scale and hyper-ellipsoid, and aggregate metrics.
//!
//! The smoothed classifier of a base classifier `C` with parameters θ and
//! per-parameter scales σ predicts the class whose probability under
//! ε ∼ N(0, diag(σ²)) of being `argmax C(θ+ε, x)` is largest. If that
//! probability is at least `p_a` and every other class stays below `p_b`,
//! the prediction is invariant under any parameter shift δ with
//! ‖δ ⊘ σ‖₂ < s_e where `s_e = (Φ⁻¹(p_a) − Φ⁻¹(p_b)) / 2`, i.e. within an
//! open hyper-ellipsoid with semi-axes `s_e·σ_i`.
//!
//! All sampling is keyed by a `(purpose, sample, shot)` stream triple so
//! results are bit-identical whether shots run serially or in parallel.

use crate::rng::{Purpose, StreamFactory};
use crate::state::argmax;
use crate::stats::{clopper_pearson_lower, clopper_pearson_upper, std_normal_quantile};
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;
// Needed only in fully no_std build graphs; once any crate in the graph links
// std, the inherent float methods shadow these and the import goes unused.
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

/// A smoothing distribution N(θ, diag(σ²)) over classifier parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedModel {
    theta: Vec<f64>,
    sigma: Vec<f64>,
}

impl SmoothedModel {
    pub fn new(theta: Vec<f64>, sigma: Vec<f64>) -> Result<Self> {
        if theta.len() != sigma.len() {
            return Err(Error::DimensionMismatch {
                expected: theta.len(),
                actual: sigma.len(),
            });
        }
        if theta.is_empty() {
            return Err(Error::InvalidArgument(
                "model must have at least one parameter",
            ));
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument("theta must be finite"));
        }
        if sigma.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::InvalidArgument(
                "sigma must be strictly positive and finite",
            ));
        }
        Ok(SmoothedModel { theta, sigma })
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }
}

/// Outcome of a certification: either a class or an abstention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prediction {
    Class(usize),
    Abstain,
}

impl Prediction {
    pub fn is_abstain(&self) -> bool {
        matches!(self, Prediction::Abstain)
    }
}

/// A per-sample certificate: the prediction, its probability bounds, the
/// robust scale `s_e`, and the certified ellipsoid semi-axes `s_e·σ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificationResult {
    pub prediction: Prediction,
    pub pa_lower: f64,
    pub pb_upper: f64,
    pub s_e: f64,
    pub semi_axes: Vec<f64>,
    pub shots_used: usize,
    pub alpha: f64,
}

/// How the runner-up probability is upper-bounded during certification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunnerUpBound {
    /// `p̄_b = 1 − p̲_a`. Always valid because probabilities sum to one.
    Complement,
    /// Per-class one-sided upper bounds at level `α/(N−1)`, maximized over
    /// the non-predicted classes. Tighter for well-separated multi-class
    /// problems, at the cost of the union-bound split of α.
    BonferroniUpper,
}

/// Shot budgets and confidence level for certification.
#[derive(Debug, Clone, Copy)]
pub struct CertifyOptions {
    /// Stage-1 shots used only to select the candidate class.
    pub n0: usize,
    /// Stage-2 shots used to bound the candidate's probability.
    pub n: usize,
    /// One-sided confidence level; the certificate holds with probability
    /// at least `1 − alpha`.
    pub alpha: f64,
    pub runner_up: RunnerUpBound,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            n0: 100,
            n: 1000,
            alpha: 0.01,
            runner_up: RunnerUpBound::Complement,
        }
    }
}

/// How deployed smoothed predictions aggregate the Monte-Carlo draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictMode {
    /// Majority vote over per-draw argmax classes.
    CountArgmax,
    /// Argmax of the mean probability vector over draws.
    MeanProb,
}

/// Aggregate certification metrics over a labelled evaluation set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    /// Mean over samples of the certified ellipsoid volume to the power
    /// `1/D` (the geometric-mean semi-axis up to a shape constant).
    pub cagm: f64,
    /// Mean over samples of the average semi-axis.
    pub semi_axis_avg: f64,
    /// Mean over samples of the population standard deviation of the
    /// semi-axes.
    pub semi_axis_std: f64,
    /// Fraction of samples whose certified prediction equals the label;
    /// abstentions count as incorrect.
    pub smoothed_accuracy: f64,
}

/// One draw θ + σ⊙s with s standard normal from the given stream.
pub fn sample_perturbed_params<R: Rng>(model: &SmoothedModel, rng: &mut R) -> Vec<f64> {
    model
        .theta
        .iter()
        .zip(&model.sigma)
        .map(|(&t, &s)| {
            let z: f64 = rng.sample(StandardNormal);
            t + s * z
        })
        .collect()
}

/// The base classifier's argmax class at one perturbed parameter vector,
/// using the stream keyed by `(purpose, sample_index, shot)`.
///
/// `eval` maps a parameter vector to class probabilities (or scores; only
/// the argmax matters here). Exposing the per-shot evaluation lets callers
/// parallelize over shots and still reproduce the serial result bit for
/// bit.
pub fn perturbed_class<F>(
    model: &SmoothedModel,
    eval: &F,
    factory: &StreamFactory,
    purpose: Purpose,
    sample_index: u64,
    shot: u64,
) -> usize
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut rng = factory.stream(purpose, sample_index, shot);
    let params = sample_perturbed_params(model, &mut rng);
    argmax(&eval(&params))
}

/// Counts, per class, how often the base classifier's argmax lands on that
/// class over `shots` independent perturbations. Counts sum to `shots`.
pub fn mc_top_class_counts<F>(
    model: &SmoothedModel,
    eval: &F,
    class_count: usize,
    shots: usize,
    factory: &StreamFactory,
    purpose: Purpose,
    sample_index: u64,
) -> Result<Vec<u64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1"));
    }
    if class_count == 0 {
        return Err(Error::InvalidArgument("class_count must be at least 1"));
    }
    let mut counts = vec![0u64; class_count];
    for shot in 0..shots {
        let class = perturbed_class(model, eval, factory, purpose, sample_index, shot as u64);
        if class >= class_count {
            return Err(Error::InvalidArgument(
                "classifier returned an out-of-range class",
            ));
        }
        counts[class] += 1;
    }
    Ok(counts)
}

/// The robust scale `s_e = max(0, (Φ⁻¹(p_a) − Φ⁻¹(p_b)) / 2)`.
///
/// Zero signals "no certificate". Both inputs must lie strictly inside
/// (0,1); callers clamp or special-case the endpoints.
pub fn certified_radius(pa_lower: f64, pb_upper: f64) -> Result<f64> {
    let qa = std_normal_quantile(pa_lower)?;
    let qb = std_normal_quantile(pb_upper)?;
    Ok(((qa - qb) / 2.0).max(0.0))
}

/// Two-stage certification of the smoothed prediction at one input.
///
/// Stage 1 draws `n0` shots (selection stream) and picks the most frequent
/// class ĉ. Stage 2 draws `n` fresh shots (estimation stream), lower-bounds
/// p(ĉ) by a one-sided Clopper-Pearson interval at level `alpha`, and
/// upper-bounds the runner-up per `runner_up`. If the bounds do not
/// separate, the result is an abstention with `s_e = 0` — a value, not an
/// error.
pub fn certify<F>(
    model: &SmoothedModel,
    eval: &F,
    class_count: usize,
    opts: &CertifyOptions,
    factory: &StreamFactory,
    sample_index: u64,
) -> Result<CertificationResult>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    if opts.n0 == 0 || opts.n == 0 {
        return Err(Error::InvalidArgument("shot budgets must be at least 1"));
    }
    if !(opts.alpha > 0.0 && opts.alpha < 1.0) {
        return Err(Error::InvalidArgument("alpha must lie in (0,1)"));
    }
    if class_count < 2 {
        return Err(Error::InvalidArgument(
            "certification needs at least 2 classes",
        ));
    }
    let selection = mc_top_class_counts(
        model,
        eval,
        class_count,
        opts.n0,
        factory,
        Purpose::CertifySelect,
        sample_index,
    )?;
    let candidate = {
        let as_f64: Vec<f64> = selection.iter().map(|&c| c as f64).collect();
        argmax(&as_f64)
    };
    let estimation = mc_top_class_counts(
        model,
        eval,
        class_count,
        opts.n,
        factory,
        Purpose::CertifyEstimate,
        sample_index,
    )?;
    let k = estimation[candidate];
    let pa_lower = clopper_pearson_lower(k, opts.n as u64, opts.alpha)?;
    let pb_upper = match opts.runner_up {
        RunnerUpBound::Complement => 1.0 - pa_lower,
        RunnerUpBound::BonferroniUpper => {
            let level = opts.alpha / (class_count as f64 - 1.0);
            let mut worst = 0.0f64;
            for (z, &count) in estimation.iter().enumerate() {
                if z == candidate {
                    continue;
                }
                worst = worst.max(clopper_pearson_upper(count, opts.n as u64, level)?);
            }
            worst
        }
    };
    let shots_used = opts.n0 + opts.n;
    if pa_lower <= pb_upper {
        return Ok(CertificationResult {
            prediction: Prediction::Abstain,
            pa_lower,
            pb_upper,
            s_e: 0.0,
            semi_axes: vec![0.0; model.dim()],
            shots_used,
            alpha: opts.alpha,
        });
    }
    // pa_lower > pb_upper ≥ some positive CP bound and pa_lower < 1 for any
    // finite n, so both probabilities are strictly inside (0,1) here.
    let s_e = certified_radius(pa_lower, pb_upper)?;
    if s_e <= 0.0 {
        return Ok(CertificationResult {
            prediction: Prediction::Abstain,
            pa_lower,
            pb_upper,
            s_e: 0.0,
            semi_axes: vec![0.0; model.dim()],
            shots_used,
            alpha: opts.alpha,
        });
    }
    let semi_axes = model.sigma.iter().map(|&s| s_e * s).collect();
    Ok(CertificationResult {
        prediction: Prediction::Class(candidate),
        pa_lower,
        pb_upper,
        s_e,
        semi_axes,
        shots_used,
        alpha: opts.alpha,
    })
}

/// Deployed smoothed prediction over `m` Monte-Carlo draws.
///
/// `CountArgmax` follows the definition of the smoothed classifier
/// (majority vote of per-draw argmaxes); `MeanProb` argmaxes the averaged
/// probability vector. Ties resolve to the lowest class index.
pub fn smoothed_predict<F>(
    model: &SmoothedModel,
    eval: &F,
    class_count: usize,
    m: usize,
    factory: &StreamFactory,
    sample_index: u64,
    mode: PredictMode,
) -> Result<usize>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    if m == 0 {
        return Err(Error::InvalidArgument("sample budget must be at least 1"));
    }
    match mode {
        PredictMode::CountArgmax => {
            let counts = mc_top_class_counts(
                model,
                eval,
                class_count,
                m,
                factory,
                Purpose::Predict,
                sample_index,
            )?;
            let as_f64: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
            Ok(argmax(&as_f64))
        }
        PredictMode::MeanProb => {
            let mut mean = vec![0.0f64; class_count];
            for shot in 0..m {
                let mut rng = factory.stream(Purpose::Predict, sample_index, shot as u64);
                let params = sample_perturbed_params(model, &mut rng);
                let probs = eval(&params);
                if probs.len() != class_count {
                    return Err(Error::DimensionMismatch {
                        expected: class_count,
                        actual: probs.len(),
                    });
                }
                for (acc, p) in mean.iter_mut().zip(&probs) {
                    *acc += p;
                }
            }
            for p in mean.iter_mut() {
                *p /= m as f64;
            }
            Ok(argmax(&mean))
        }
    }
}

/// Whether the parameter shift `delta` lies strictly inside the certified
/// ellipsoid with semi-axes `s_e·σ`. `s_e = 0` certifies nothing, so every
/// shift (including zero) is outside.
pub fn ellipsoid_contains(delta: &[f64], sigma: &[f64], s_e: f64) -> Result<bool> {
    if delta.len() != sigma.len() {
        return Err(Error::DimensionMismatch {
            expected: sigma.len(),
            actual: delta.len(),
        });
    }
    if s_e <= 0.0 {
        return Ok(false);
    }
    let scaled_norm_sq: f64 = delta
        .iter()
        .zip(sigma)
        .map(|(&d, &s)| (d / s) * (d / s))
        .sum();
    Ok(scaled_norm_sq.sqrt() < s_e)
}

/// Natural log of the certified ellipsoid volume
/// `V = (2 π^{D/2} / (D Γ(D/2))) · Π_i s_e σ_i`; `−∞` when `s_e = 0`.
///
/// Working in logs keeps the value usable at large `D`, where the product
/// of small semi-axes underflows to zero in linear scale.
pub fn certified_log_volume(sigma: &[f64], s_e: f64) -> Result<f64> {
    if sigma.is_empty() {
        return Err(Error::InvalidArgument(
            "volume needs at least one dimension",
        ));
    }
    if s_e < 0.0 {
        return Err(Error::InvalidArgument("robust scale must be nonnegative"));
    }
    if s_e == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let d = sigma.len() as f64;
    let shape = core::f64::consts::LN_2 + 0.5 * d * libm::log(core::f64::consts::PI)
        - libm::log(d)
        - libm::lgamma(0.5 * d);
    let axes: f64 = sigma.iter().map(|&s| libm::log(s_e * s)).sum();
    Ok(shape + axes)
}

/// The certified ellipsoid volume in linear scale; underflows to zero for
/// large `D`, in which case use [`certified_log_volume`].
pub fn certified_volume(sigma: &[f64], s_e: f64) -> Result<f64> {
    let log_volume = certified_log_volume(sigma, s_e)?;
    Ok(if log_volume == f64::NEG_INFINITY {
        0.0
    } else {
        libm::exp(log_volume)
    })
}

/// Population standard deviation (divides by the count, not count−1).
fn population_std(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / n;
    var.sqrt()
}

/// Aggregates per-sample certificates against their labels.
///
/// Per sample: volume enters as `V^{1/D} = exp(ln V / D)` (zero on
/// abstention), the semi-axis mean and population standard deviation are
/// taken over the `D` axes, and accuracy compares the certified prediction
/// to the label with abstentions counting as incorrect. All four metrics
/// are then averaged over samples.
pub fn metrics_report(results: &[CertificationResult], labels: &[usize]) -> Result<MetricsReport> {
    if results.is_empty() {
        return Err(Error::InvalidArgument("metrics need at least one sample"));
    }
    if results.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: results.len(),
            actual: labels.len(),
        });
    }
    let n = results.len() as f64;
    let mut cagm = 0.0f64;
    let mut axis_avg = 0.0f64;
    let mut axis_std = 0.0f64;
    let mut correct = 0usize;
    for (result, &label) in results.iter().zip(labels) {
        let d = result.semi_axes.len() as f64;
        if result.s_e > 0.0 {
            // Passing the semi-axes with unit scale yields ln V directly.
            let log_volume = certified_log_volume(&result.semi_axes, 1.0)?;
            cagm += libm::exp(log_volume / d);
        }
        axis_avg += result.semi_axes.iter().sum::<f64>() / d;
        axis_std += population_std(&result.semi_axes);
        if let Prediction::Class(c) = result.prediction {
            if c == label {
                correct += 1;
            }
        }
    }
    Ok(MetricsReport {
        cagm: cagm / n,
        semi_axis_avg: axis_avg / n,
        semi_axis_std: axis_std / n,
        smoothed_accuracy: correct as f64 / n,
    })
}
