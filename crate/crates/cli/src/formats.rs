//! File formats: JSON-lines datasets and sweep journals, JSON models,
//! certificates, and metrics, CSV training/noise curves.
//!
//! Every writer here is a pure function of its inputs — no timestamps,
//! host names, or absolute paths are embedded — so re-running a command
//! with the same seed reproduces each artifact byte for byte. Floats are
//! serialized in shortest round-trip form by both `serde_json` and the
//! CSV writers, which preserves exact bit patterns across save/load.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use certiq_core::circuit::ParamCircuit;
use certiq_core::cluster::{PhaseBoundarySpec, PhaseRegion, Sample};
use certiq_core::gates::{AngleSource, GateKind, GateOp};
use certiq_core::qcnn::{build_qcnn, QcnnSpec};
use certiq_core::smoothing::{
    CertificationResult, MetricsReport, Prediction, RunnerUpBound, SmoothedModel,
};
use certiq_core::snes::{RegKind, SnesConfig, TrainHistory};
use certiq_core::state::{ClassReadout, Statevector};
use certiq_core::Complex64;

use crate::error::{CliError, CliResult};

/// Version stamp written into every structured artifact.
pub const FORMAT_VERSION: u32 = 1;

/// The phase-boundary ground truth shipped with the tool, as JSON text.
pub const EMBEDDED_BOUNDARY: &str = include_str!("../data/cluster_phases_v1.json");

// ---------------------------------------------------------------------------
// Small helpers
// ---------------------------------------------------------------------------

/// First 16 hex characters of the SHA-256 of `bytes`.
pub fn hash_hex16(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(16);
    for byte in digest.iter().take(8) {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

pub fn read_to_string(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io("read", path, e))
}

pub fn write_string(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| CliError::io("create directory", parent, e))?;
        }
    }
    fs::write(path, contents).map_err(|e| CliError::io("write", path, e))
}

// ---------------------------------------------------------------------------
// Phase-boundary files
// ---------------------------------------------------------------------------

/// One polygon of the phase-boundary ground truth. Earlier entries win on
/// shared edges; `name` is documentation only.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionRecord {
    pub class: usize,
    #[serde(default)]
    pub name: String,
    pub vertices: Vec<[f64; 2]>,
}

/// Parses boundary JSON text into a validated spec plus its content hash
/// (the `spec_hash` stamped into dataset headers).
pub fn parse_boundary(text: &str) -> CliResult<(PhaseBoundarySpec, String)> {
    let records: Vec<RegionRecord> =
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("boundary file: {e}")))?;
    let regions = records
        .iter()
        .map(|r| PhaseRegion {
            class: r.class,
            vertices: r.vertices.iter().map(|v| (v[0], v[1])).collect(),
        })
        .collect();
    let spec = PhaseBoundarySpec::new(regions)
        .map_err(|e| CliError::Config(format!("boundary file: {e}")))?;
    Ok((spec, hash_hex16(text.as_bytes())))
}

/// Loads the boundary from `path`, or the embedded ground truth when absent.
pub fn load_boundary(path: Option<&Path>) -> CliResult<(PhaseBoundarySpec, String)> {
    match path {
        Some(p) => parse_boundary(&read_to_string(p)?),
        None => parse_boundary(EMBEDDED_BOUNDARY),
    }
}

// ---------------------------------------------------------------------------
// Datasets (JSON lines: one header line, then one record per sample)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetHeader {
    pub version: u32,
    pub kind: String,
    pub n_qubits: usize,
    pub split: String,
    pub seed: u64,
    pub count: usize,
    pub coupling_limit: f64,
    /// Hash of the boundary-spec JSON the labels came from.
    pub spec_hash: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleRecord {
    pub j1: f64,
    pub j2: f64,
    pub label: usize,
    pub energy: f64,
    /// Ground-state amplitudes as `[re, im]` pairs in basis order.
    pub amplitudes: Vec<[f64; 2]>,
}

impl SampleRecord {
    pub fn from_sample(sample: &Sample) -> Self {
        SampleRecord {
            j1: sample.j1,
            j2: sample.j2,
            label: sample.label,
            energy: sample.energy,
            amplitudes: sample
                .state
                .amplitudes()
                .iter()
                .map(|a| [a.re, a.im])
                .collect(),
        }
    }

    pub fn to_sample(&self, n_qubits: usize) -> CliResult<Sample> {
        let amps: Vec<Complex64> = self
            .amplitudes
            .iter()
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        let state = Statevector::from_amplitudes(n_qubits, amps)?;
        Ok(Sample {
            j1: self.j1,
            j2: self.j2,
            label: self.label,
            energy: self.energy,
            state,
        })
    }
}

/// A dataset split loaded back into memory.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub header: DatasetHeader,
    pub samples: Vec<Sample>,
}

impl Dataset {
    /// `(state, label)` view used by the trainer.
    pub fn labelled_states(&self) -> Vec<(Statevector, usize)> {
        self.samples
            .iter()
            .map(|s| (s.state.clone(), s.label))
            .collect()
    }
}

pub fn write_dataset(
    path: &Path,
    split: &str,
    seed: u64,
    spec_hash: &str,
    samples: &[Sample],
) -> CliResult<()> {
    let n_qubits = samples.first().map_or(0, |s| s.state.n_qubits());
    let header = DatasetHeader {
        version: FORMAT_VERSION,
        kind: "dataset".to_string(),
        n_qubits,
        split: split.to_string(),
        seed,
        count: samples.len(),
        coupling_limit: certiq_core::cluster::COUPLING_LIMIT,
        spec_hash: spec_hash.to_string(),
    };
    let mut out = String::new();
    out.push_str(&serde_json::to_string(&header)?);
    out.push('\n');
    for sample in samples {
        out.push_str(&serde_json::to_string(&SampleRecord::from_sample(sample))?);
        out.push('\n');
    }
    write_string(path, &out)
}

pub fn read_dataset(path: &Path) -> CliResult<Dataset> {
    let text = read_to_string(path)?;
    let mut lines = text.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| CliError::Config(format!("{}: empty dataset file", path.display())))?;
    let header: DatasetHeader = serde_json::from_str(header_line)
        .map_err(|e| CliError::Config(format!("{}: bad header: {e}", path.display())))?;
    if header.kind != "dataset" {
        return Err(CliError::Config(format!(
            "{}: not a dataset file (kind = {})",
            path.display(),
            header.kind
        )));
    }
    let mut samples = Vec::with_capacity(header.count);
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: SampleRecord = serde_json::from_str(line)
            .map_err(|e| CliError::Config(format!("{}: record {i}: {e}", path.display())))?;
        if record.amplitudes.len() != 1usize << header.n_qubits {
            return Err(CliError::Config(format!(
                "{}: record {i}: {} amplitudes but header says {} qubits",
                path.display(),
                record.amplitudes.len(),
                header.n_qubits
            )));
        }
        samples.push(record.to_sample(header.n_qubits)?);
    }
    if samples.len() != header.count {
        return Err(CliError::Config(format!(
            "{}: truncated dataset: header says {} records, found {} (first missing index {})",
            path.display(),
            header.count,
            samples.len(),
            samples.len()
        )));
    }
    Ok(Dataset { header, samples })
}

// ---------------------------------------------------------------------------
// Circuit export
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GateExport {
    pub kind: String,
    pub qubits: Vec<usize>,
    /// Index into the parameter vector, when the angle is trained.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub param: Option<usize>,
    /// Literal angle in radians, when the angle is fixed.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub angle: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReadoutExport {
    pub qubits: Vec<usize>,
    pub class_of_pattern: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircuitExport {
    pub n_qubits: usize,
    pub n_params: usize,
    pub gates: Vec<GateExport>,
    pub readout: ReadoutExport,
}

fn gate_kind_name(kind: GateKind) -> &'static str {
    match kind {
        GateKind::Rx => "rx",
        GateKind::Ry => "ry",
        GateKind::Rz => "rz",
        GateKind::Rxx => "rxx",
        GateKind::Ryy => "ryy",
        GateKind::Rzz => "rzz",
        GateKind::Cx => "cx",
        GateKind::Crx => "crx",
        GateKind::Cry => "cry",
        GateKind::Crz => "crz",
        GateKind::H => "h",
        GateKind::X => "x",
    }
}

fn export_gate(gate: &GateOp) -> GateExport {
    let mut qubits = vec![gate.qubits.0];
    if let Some(b) = gate.qubits.1 {
        qubits.push(b);
    }
    let (param, angle) = match gate.angle {
        Some(AngleSource::Param(i)) => (Some(i), None),
        Some(AngleSource::Fixed(a)) => (None, Some(a)),
        None => (None, None),
    };
    GateExport {
        kind: gate_kind_name(gate.kind).to_string(),
        qubits,
        param,
        angle,
    }
}

pub fn export_circuit(circuit: &ParamCircuit, readout: &ClassReadout) -> CircuitExport {
    CircuitExport {
        n_qubits: circuit.n_qubits(),
        n_params: circuit.n_params(),
        gates: circuit.gates().iter().map(export_gate).collect(),
        readout: ReadoutExport {
            qubits: readout.qubits().to_vec(),
            class_of_pattern: readout.class_of_pattern().to_vec(),
        },
    }
}

/// Content hash of an exported circuit; stamped into models and
/// certificates so mismatched artifacts are caught at load time.
pub fn circuit_hash(export: &CircuitExport) -> CliResult<String> {
    Ok(hash_hex16(serde_json::to_string(export)?.as_bytes()))
}

// ---------------------------------------------------------------------------
// Training configuration snapshots and model files
// ---------------------------------------------------------------------------

/// Serializable snapshot of the trainer's hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigSnapshot {
    pub lambda: usize,
    pub eta_theta: f64,
    pub eta_sigma: f64,
    pub eta_r: f64,
    pub sigma0: f64,
    pub reg_kind: String,
    pub iterations: usize,
    pub batch_size: usize,
    pub prob_clamp: f64,
    pub freeze_sigma: bool,
    pub seed: u64,
}

pub fn reg_kind_name(kind: RegKind) -> &'static str {
    match kind {
        RegKind::L2 => "l2",
        RegKind::Area => "area",
    }
}

pub fn parse_reg_kind(name: &str) -> CliResult<RegKind> {
    match name {
        "l2" => Ok(RegKind::L2),
        "area" => Ok(RegKind::Area),
        other => Err(CliError::Config(format!(
            "unknown regularizer kind: {other} (expected l2 or area)"
        ))),
    }
}

impl ConfigSnapshot {
    pub fn from_config(config: &SnesConfig) -> Self {
        ConfigSnapshot {
            lambda: config.lambda,
            eta_theta: config.eta_theta,
            eta_sigma: config.eta_sigma,
            eta_r: config.eta_r,
            sigma0: config.sigma0,
            reg_kind: reg_kind_name(config.reg_kind).to_string(),
            iterations: config.iterations,
            batch_size: config.batch_size,
            prob_clamp: config.prob_clamp,
            freeze_sigma: config.freeze_sigma,
            seed: config.seed,
        }
    }

    pub fn to_config(&self) -> CliResult<SnesConfig> {
        Ok(SnesConfig {
            lambda: self.lambda,
            eta_theta: self.eta_theta,
            eta_sigma: self.eta_sigma,
            eta_r: self.eta_r,
            sigma0: self.sigma0,
            reg_kind: parse_reg_kind(&self.reg_kind)?,
            iterations: self.iterations,
            batch_size: self.batch_size,
            prob_clamp: self.prob_clamp,
            frozen_mask: None,
            freeze_sigma: self.freeze_sigma,
            seed: self.seed,
        })
    }

    /// The sweep-journal key: a content hash of the snapshot (which
    /// includes the run's seed).
    pub fn run_id(&self) -> CliResult<String> {
        Ok(hash_hex16(serde_json::to_string(self)?.as_bytes()))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub version: u32,
    pub kind: String,
    pub seed: u64,
    /// True for the non-smoothed baseline (σ frozen during training and
    /// ignored at deployment).
    pub plain: bool,
    pub n_qubits: usize,
    pub conv_reps: usize,
    pub theta: Vec<f64>,
    pub sigma: Vec<f64>,
    pub config: ConfigSnapshot,
    pub circuit_hash: String,
    pub circuit: CircuitExport,
}

/// A model file loaded back into usable pieces; the circuit is rebuilt
/// from its architecture fields and verified against the stored hash.
#[derive(Debug)]
pub struct ModelBundle {
    pub file: ModelFile,
    pub circuit: ParamCircuit,
    pub readout: ClassReadout,
    pub model: SmoothedModel,
}

#[allow(clippy::too_many_arguments)]
pub fn write_model(
    path: &Path,
    seed: u64,
    plain: bool,
    spec: &QcnnSpec,
    model: &SmoothedModel,
    config: &SnesConfig,
    circuit: &ParamCircuit,
    readout: &ClassReadout,
) -> CliResult<String> {
    let export = export_circuit(circuit, readout);
    let hash = circuit_hash(&export)?;
    let file = ModelFile {
        version: FORMAT_VERSION,
        kind: "model".to_string(),
        seed,
        plain,
        n_qubits: spec.n_qubits,
        conv_reps: spec.conv_reps,
        theta: model.theta().to_vec(),
        sigma: model.sigma().to_vec(),
        config: ConfigSnapshot::from_config(config),
        circuit_hash: hash.clone(),
        circuit: export,
    };
    let mut text = serde_json::to_string_pretty(&file)?;
    text.push('\n');
    write_string(path, &text)?;
    Ok(hash)
}

pub fn read_model(path: &Path) -> CliResult<ModelBundle> {
    let text = read_to_string(path)?;
    let file: ModelFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if file.kind != "model" {
        return Err(CliError::Config(format!(
            "{}: not a model file (kind = {})",
            path.display(),
            file.kind
        )));
    }
    let spec = QcnnSpec::new(file.n_qubits, file.conv_reps)?;
    let (circuit, readout) = build_qcnn(&spec)?;
    let rebuilt_hash = circuit_hash(&export_circuit(&circuit, &readout))?;
    if rebuilt_hash != file.circuit_hash {
        return Err(CliError::Config(format!(
            "{}: circuit hash mismatch (file {}, rebuilt {})",
            path.display(),
            file.circuit_hash,
            rebuilt_hash
        )));
    }
    let model = SmoothedModel::new(file.theta.clone(), file.sigma.clone())?;
    Ok(ModelBundle {
        file,
        circuit,
        readout,
        model,
    })
}

// ---------------------------------------------------------------------------
// Training history CSV
// ---------------------------------------------------------------------------

/// Renders the history as CSV with columns `iter,mean_fitness,mean_sigma,acc`.
pub fn history_csv(history: &TrainHistory) -> String {
    let mut out = String::from("iter,mean_fitness,mean_sigma,acc\n");
    for row in history {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.iteration, row.mean_fitness, row.mean_sigma, row.train_accuracy
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// Certificates and metrics
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertsHeader {
    pub version: u32,
    pub kind: String,
    pub seed: u64,
    pub model_hash: String,
    pub count: usize,
    pub n0: usize,
    pub n: usize,
    pub alpha: f64,
    pub runner_up: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertRecord {
    pub index: usize,
    pub label: usize,
    /// Certified class, or `null` on abstention.
    pub predicted: Option<usize>,
    pub pa_lower: f64,
    pub pb_upper: f64,
    pub s_e: f64,
    pub semi_axes: Vec<f64>,
    /// ln of the certified ellipsoid volume; `null` on abstention.
    pub log_volume: Option<f64>,
    /// Volume to the power 1/D (the per-sample CAGM term); 0 on abstention.
    pub volume_root: f64,
    pub correct: bool,
}

impl CertRecord {
    pub fn new(index: usize, label: usize, result: &CertificationResult) -> CliResult<Self> {
        let predicted = match result.prediction {
            Prediction::Class(c) => Some(c),
            Prediction::Abstain => None,
        };
        let (log_volume, volume_root) = if result.s_e > 0.0 {
            // The stored semi-axes are s_e·σ, so a unit scale here yields
            // the ellipsoid's own log volume.
            let ln_v = certiq_core::smoothing::certified_log_volume(&result.semi_axes, 1.0)?;
            let d = result.semi_axes.len() as f64;
            (Some(ln_v), (ln_v / d).exp())
        } else {
            (None, 0.0)
        };
        Ok(CertRecord {
            index,
            label,
            predicted,
            pa_lower: result.pa_lower,
            pb_upper: result.pb_upper,
            s_e: result.s_e,
            semi_axes: result.semi_axes.clone(),
            log_volume,
            volume_root,
            correct: predicted == Some(label),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsFile {
    pub version: u32,
    pub kind: String,
    pub seed: u64,
    pub model_hash: String,
    pub n_samples: usize,
    pub certified: usize,
    pub abstained: usize,
    pub cagm: f64,
    pub semi_axis_avg: f64,
    pub semi_axis_std: f64,
    pub smoothed_accuracy: f64,
    pub n0: usize,
    pub n: usize,
    pub alpha: f64,
}

pub fn runner_up_name(bound: RunnerUpBound) -> &'static str {
    match bound {
        RunnerUpBound::Complement => "complement",
        RunnerUpBound::BonferroniUpper => "bonferroni",
    }
}

/// The four aggregate metrics, as stored inside sweep records.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub cagm: f64,
    pub semi_axis_avg: f64,
    pub semi_axis_std: f64,
    pub smoothed_accuracy: f64,
}

impl MetricsSummary {
    pub fn from_report(report: &MetricsReport) -> Self {
        MetricsSummary {
            cagm: report.cagm,
            semi_axis_avg: report.semi_axis_avg,
            semi_axis_std: report.semi_axis_std,
            smoothed_accuracy: report.smoothed_accuracy,
        }
    }
}

// ---------------------------------------------------------------------------
// Sweep journal (JSON lines, append-only)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRecord {
    pub run_id: String,
    pub run_index: u64,
    /// `"completed"` or `"failed"`; metrics are present iff completed.
    pub status: String,
    pub config: ConfigSnapshot,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub metrics: Option<MetricsSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

/// Reads a journal, which may not exist yet (→ empty). A single
/// unparseable *final* line — the footprint of an interrupted append — is
/// dropped with a warning; corruption anywhere else is an error.
pub fn read_journal(path: &Path) -> CliResult<Vec<SweepRecord>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = read_to_string(path)?;
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    let mut records = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        match serde_json::from_str::<SweepRecord>(line) {
            Ok(record) => records.push(record),
            Err(e) if i + 1 == lines.len() => {
                eprintln!(
                    "warning: dropping incomplete final journal line in {}: {e}",
                    path.display()
                );
            }
            Err(e) => {
                return Err(CliError::Config(format!(
                    "{}: corrupt journal line {}: {e}",
                    path.display(),
                    i + 1
                )));
            }
        }
    }
    Ok(records)
}

/// Appends records to the journal, creating it (and parent directories)
/// if needed, and flushes before returning.
pub fn append_journal(path: &Path, records: &[SweepRecord]) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| CliError::io("create directory", parent, e))?;
        }
    }
    let mut file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| CliError::io("open", path, e))?;
    for record in records {
        let line = serde_json::to_string(record)?;
        file.write_all(line.as_bytes())
            .and_then(|_| file.write_all(b"\n"))
            .map_err(|e| CliError::io("append to", path, e))?;
    }
    file.flush().map_err(|e| CliError::io("flush", path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use certiq_core::cluster::{gen_dataset, SplitKind};
    use certiq_core::rng::StreamFactory;
    use std::path::PathBuf;

    fn temp_path(name: &str) -> PathBuf {
        let mut path = std::env::temp_dir();
        path.push(format!("certiq-formats-{}-{name}", std::process::id()));
        path
    }

    #[test]
    fn embedded_boundary_parses_covers_the_square_and_puts_origin_in_class_zero() {
        let (spec, hash) = parse_boundary(EMBEDDED_BOUNDARY).unwrap();
        assert_eq!(hash.len(), 16);
        assert_eq!(spec.class_count(), 4);
        assert_eq!(spec.classify(0.0, 0.0).unwrap(), 0);
        // Every grid point of the coupling square must land in a region.
        let limit = certiq_core::cluster::COUPLING_LIMIT;
        let steps = 161;
        for a in 0..steps {
            for b in 0..steps {
                let j1 = -limit + 2.0 * limit * (a as f64) / ((steps - 1) as f64);
                let j2 = -limit + 2.0 * limit * (b as f64) / ((steps - 1) as f64);
                spec.classify(j1, j2).unwrap_or_else(|_| {
                    panic!("unlabelled point ({j1}, {j2})");
                });
            }
        }
        // Spot checks deep inside each phase.
        assert_eq!(spec.classify(0.0, 3.0).unwrap(), 1);
        assert_eq!(spec.classify(0.0, -3.0).unwrap(), 1);
        assert_eq!(spec.classify(3.0, 0.0).unwrap(), 2);
        assert_eq!(spec.classify(-3.0, 0.0).unwrap(), 3);
    }

    #[test]
    fn dataset_roundtrip_preserves_samples_bit_for_bit() {
        let (boundary, spec_hash) = parse_boundary(EMBEDDED_BOUNDARY).unwrap();
        let factory = StreamFactory::new(11);
        let samples = gen_dataset(3, 4, &factory, SplitKind::Train, &[], &boundary).unwrap();
        let path = temp_path("roundtrip.jsonl");
        write_dataset(&path, "train", 11, &spec_hash, &samples).unwrap();
        let loaded = read_dataset(&path).unwrap();
        std::fs::remove_file(&path).ok();
        assert_eq!(loaded.header.n_qubits, 3);
        assert_eq!(loaded.header.count, 4);
        assert_eq!(loaded.header.split, "train");
        for (a, b) in samples.iter().zip(loaded.samples.iter()) {
            assert_eq!(a.j1.to_bits(), b.j1.to_bits());
            assert_eq!(a.j2.to_bits(), b.j2.to_bits());
            assert_eq!(a.label, b.label);
            assert_eq!(a.energy.to_bits(), b.energy.to_bits());
            for (x, y) in a.state.amplitudes().iter().zip(b.state.amplitudes()) {
                assert_eq!(x.re.to_bits(), y.re.to_bits());
                assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
        }
    }

    #[test]
    fn truncated_dataset_reports_the_missing_record_index() {
        let (boundary, spec_hash) = parse_boundary(EMBEDDED_BOUNDARY).unwrap();
        let factory = StreamFactory::new(12);
        let samples = gen_dataset(3, 3, &factory, SplitKind::Train, &[], &boundary).unwrap();
        let path = temp_path("truncated.jsonl");
        write_dataset(&path, "train", 12, &spec_hash, &samples).unwrap();
        let text = read_to_string(&path).unwrap();
        let kept: Vec<&str> = text.lines().take(3).collect(); // header + 2 of 3
        write_string(&path, &(kept.join("\n") + "\n")).unwrap();
        let err = read_dataset(&path).unwrap_err();
        std::fs::remove_file(&path).ok();
        match err {
            CliError::Config(msg) => {
                assert!(msg.contains("truncated"), "message: {msg}");
                assert!(msg.contains("index 2"), "message: {msg}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn model_roundtrip_verifies_circuit_hash() {
        let spec = QcnnSpec::new(3, 1).unwrap();
        let (circuit, readout) = build_qcnn(&spec).unwrap();
        let dim = circuit.n_params();
        let model = SmoothedModel::new(vec![0.25; dim], vec![0.1; dim]).unwrap();
        let config = SnesConfig {
            seed: 5,
            ..SnesConfig::default()
        };
        let path = temp_path("model.json");
        let hash =
            write_model(&path, 5, false, &spec, &model, &config, &circuit, &readout).unwrap();
        let bundle = read_model(&path).unwrap();
        assert_eq!(bundle.file.circuit_hash, hash);
        assert_eq!(bundle.model.theta(), model.theta());
        assert_eq!(bundle.model.sigma(), model.sigma());
        assert_eq!(bundle.circuit.n_params(), dim);

        // Tamper with the architecture: the stored hash must catch it.
        let text = read_to_string(&path).unwrap();
        let tampered = text.replace("\"conv_reps\": 1", "\"conv_reps\": 2");
        write_string(&path, &tampered).unwrap();
        let err = read_model(&path).unwrap_err();
        std::fs::remove_file(&path).ok();
        match err {
            CliError::Config(msg) => assert!(msg.contains("hash mismatch"), "message: {msg}"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn journal_roundtrip_and_tolerant_tail() {
        let config = ConfigSnapshot::from_config(&SnesConfig::default());
        let record = SweepRecord {
            run_id: config.run_id().unwrap(),
            run_index: 0,
            status: "completed".to_string(),
            config: config.clone(),
            metrics: Some(MetricsSummary {
                cagm: 0.01,
                semi_axis_avg: 0.02,
                semi_axis_std: 0.003,
                smoothed_accuracy: 0.9,
            }),
            error: None,
        };
        let path = temp_path("journal.jsonl");
        std::fs::remove_file(&path).ok();
        assert!(read_journal(&path).unwrap().is_empty());
        append_journal(&path, std::slice::from_ref(&record)).unwrap();
        append_journal(&path, std::slice::from_ref(&record)).unwrap();
        // Simulate an interrupted append: a partial trailing line.
        let mut text = read_to_string(&path).unwrap();
        text.push_str("{\"run_id\": \"zzz");
        write_string(&path, &text).unwrap();
        let records = read_journal(&path).unwrap();
        std::fs::remove_file(&path).ok();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].run_id, record.run_id);
        assert_eq!(records[1].metrics, record.metrics);
    }

    #[test]
    fn history_csv_uses_the_documented_columns() {
        use certiq_core::snes::TrainRecord;
        let history = vec![TrainRecord {
            iteration: 0,
            mean_fitness: 0.5,
            mean_sigma: 0.1,
            train_accuracy: 0.75,
        }];
        let csv = history_csv(&history);
        assert_eq!(csv, "iter,mean_fitness,mean_sigma,acc\n0,0.5,0.1,0.75\n");
    }

    #[test]
    fn run_id_is_a_pure_function_of_the_snapshot() {
        let a = ConfigSnapshot::from_config(&SnesConfig::default());
        let b = ConfigSnapshot::from_config(&SnesConfig::default());
        assert_eq!(a.run_id().unwrap(), b.run_id().unwrap());
        let c = ConfigSnapshot::from_config(&SnesConfig {
            seed: 99,
            ..SnesConfig::default()
        });
        assert_ne!(a.run_id().unwrap(), c.run_id().unwrap());
    }
}
