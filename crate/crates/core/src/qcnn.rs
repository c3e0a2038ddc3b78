//! Convolution/pooling ansatz builder for phase classification.
//!
//! The circuit alternates convolution layers (15-parameter two-qubit blocks
//! on ring-neighbour pairs of the active qubits) with pooling layers
//! (controlled rotations from each discarded qubit onto its kept partner)
//! until two active qubits remain, then applies a final two-qubit block and
//! reads those qubits out as four classes. Every parameter slot is used by
//! exactly one gate (no weight tying), and the all-zeros parameter vector
//! yields the identity circuit.

use crate::circuit::ParamCircuit;
use crate::gates::{AngleSource, GateOp};
use crate::state::{ClassReadout, MAX_QUBITS};
use crate::{Error, Result};
use alloc::vec::Vec;

/// Parameters consumed by [`one_qubit_block`].
pub const ONE_QUBIT_BLOCK_PARAMS: usize = 3;
/// Parameters consumed by [`two_qubit_block`].
pub const TWO_QUBIT_BLOCK_PARAMS: usize = 15;
/// Parameters consumed per discarded qubit in a pooling layer.
pub const POOL_PARAMS: usize = 2;

/// Shape of a convolutional ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QcnnSpec {
    /// Register size; at least 2.
    pub n_qubits: usize,
    /// Convolution sub-layers per stage; sub-layer r pairs even ring
    /// positions when r is even and odd positions when r is odd.
    pub conv_reps: usize,
}

impl QcnnSpec {
    pub fn new(n_qubits: usize, conv_reps: usize) -> Result<Self> {
        if n_qubits < 2 {
            return Err(Error::TooFewQubits { n_qubits, min: 2 });
        }
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                n_qubits,
                max: MAX_QUBITS,
            });
        }
        if conv_reps == 0 {
            return Err(Error::InvalidArgument("conv_reps must be at least 1"));
        }
        Ok(QcnnSpec {
            n_qubits,
            conv_reps,
        })
    }
}

/// General single-qubit rotation as RZ·RY·RZ, reading three consecutive
/// parameters starting at `param_base`.
pub fn one_qubit_block(qubit: usize, param_base: usize) -> (Vec<GateOp>, usize) {
    let gates = alloc::vec![
        GateOp::rz(qubit, AngleSource::Param(param_base)),
        GateOp::ry(qubit, AngleSource::Param(param_base + 1)),
        GateOp::rz(qubit, AngleSource::Param(param_base + 2)),
    ];
    (gates, ONE_QUBIT_BLOCK_PARAMS)
}

/// Two-qubit block: single-qubit blocks on both qubits, an RXX·RYY·RZZ
/// entangling core with one angle each, then single-qubit blocks again.
/// Reads fifteen consecutive parameters starting at `param_base`.
pub fn two_qubit_block(a: usize, b: usize, param_base: usize) -> (Vec<GateOp>, usize) {
    let mut gates = Vec::with_capacity(15);
    let mut base = param_base;
    for q in [a, b] {
        let (block, used) = one_qubit_block(q, base);
        gates.extend(block);
        base += used;
    }
    gates.push(GateOp::rxx(a, b, AngleSource::Param(base)));
    gates.push(GateOp::ryy(a, b, AngleSource::Param(base + 1)));
    gates.push(GateOp::rzz(a, b, AngleSource::Param(base + 2)));
    base += 3;
    for q in [a, b] {
        let (block, used) = one_qubit_block(q, base);
        gates.extend(block);
        base += used;
    }
    (gates, base - param_base)
}

/// Ring-neighbour pairs of `active` for one convolution sub-layer. Even
/// sub-layers take even ring positions, odd sub-layers odd positions; across
/// one even+odd pair of sub-layers every ring edge appears exactly once.
fn conv_pairs(active: &[usize], rep: usize) -> Vec<(usize, usize)> {
    let m = active.len();
    let start = rep % 2;
    let mut pairs = Vec::new();
    let mut i = start;
    while i < m {
        let j = (i + 1) % m;
        // A two-element ring has a single edge; skip the duplicate wrap.
        if m == 2 && i == 1 {
            break;
        }
        if j != i {
            pairs.push((active[i], active[j]));
        }
        i += 2;
    }
    pairs
}

/// Builds the full ansatz for a spec: the parameterized circuit and the
/// class readout on the two surviving qubits (first qubit = pattern MSB, so
/// bits b1 b0 map to class 2·b1 + b0).
pub fn build_qcnn(spec: &QcnnSpec) -> Result<(ParamCircuit, ClassReadout)> {
    let mut gates: Vec<GateOp> = Vec::new();
    let mut base = 0usize;
    let mut active: Vec<usize> = (0..spec.n_qubits).collect();

    while active.len() > 2 {
        for rep in 0..spec.conv_reps {
            for (a, b) in conv_pairs(&active, rep) {
                let (block, used) = two_qubit_block(a, b, base);
                gates.extend(block);
                base += used;
            }
        }
        let mut kept = Vec::with_capacity(active.len().div_ceil(2));
        for chunk in active.chunks(2) {
            kept.push(chunk[0]);
            if let [keep, discard] = *chunk {
                gates.push(GateOp::crz(discard, keep, AngleSource::Param(base)));
                gates.push(GateOp::crx(discard, keep, AngleSource::Param(base + 1)));
                base += POOL_PARAMS;
            }
        }
        active = kept;
    }

    let (block, used) = two_qubit_block(active[0], active[1], base);
    gates.extend(block);
    base += used;

    let circuit = ParamCircuit::new(spec.n_qubits, base, gates)?;
    let readout = ClassReadout::one_class_per_pattern(active)?;
    Ok((circuit, readout))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{classifier_eval, run_circuit};
    use crate::dense_oracle as oracle;
    use crate::gates::GateKind;
    use crate::rng::{Purpose, StreamFactory};
    use crate::state::Statevector;
    use alloc::vec;
    use num_complex::Complex64;
    use rand::Rng;

    fn param_count(n: usize, reps: usize) -> usize {
        let spec = QcnnSpec::new(n, reps).unwrap();
        build_qcnn(&spec).unwrap().0.n_params()
    }

    #[test]
    fn parameter_counts_match_structure() {
        // n=4, one rep: 2 conv blocks + 2 poolings + final block.
        assert_eq!(param_count(4, 1), 2 * 15 + 2 * 2 + 15);
        assert_eq!(param_count(4, 1), 49);
        // n=4, two reps: extra odd sub-layer (1,2),(3,0).
        assert_eq!(param_count(4, 2), 4 * 15 + 2 * 2 + 15);
        // n=6: stage one has 3 blocks/3 poolings, stage two 2 blocks/1 pooling.
        assert_eq!(param_count(6, 1), (3 * 15 + 3 * 2) + (2 * 15 + 2) + 15);
        // n=8: stages of 4 and 2 blocks.
        assert_eq!(param_count(8, 1), (4 * 15 + 4 * 2) + (2 * 15 + 2 * 2) + 15);
        // n=2: just the final block.
        assert_eq!(param_count(2, 1), 15);
    }

    #[test]
    fn every_parameter_used_exactly_once() {
        let spec = QcnnSpec::new(6, 2).unwrap();
        let (circuit, _) = build_qcnn(&spec).unwrap();
        let mut counts = vec![0usize; circuit.n_params()];
        for gate in circuit.gates() {
            if let Some(i) = gate.param_index() {
                counts[i] += 1;
            }
        }
        assert!(
            counts.iter().all(|&c| c == 1),
            "parameters must be untied and contiguous: {counts:?}"
        );
    }

    #[test]
    fn zero_parameters_give_identity() {
        let spec = QcnnSpec::new(4, 1).unwrap();
        let (circuit, _) = build_qcnn(&spec).unwrap();
        let factory = StreamFactory::new(3);
        let mut rng = factory.stream(Purpose::Predict, 4, 0);
        let mut amps: Vec<Complex64> = (0..16)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        let s = Statevector::from_amplitudes(4, amps).unwrap();
        let out = run_circuit(&circuit, &s, &vec![0.0; circuit.n_params()]).unwrap();
        for (a, b) in out.amplitudes().iter().zip(s.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn identity_circuit_readout_is_one_hot() {
        let spec = QcnnSpec::new(4, 1).unwrap();
        let (circuit, readout) = build_qcnn(&spec).unwrap();
        assert_eq!(readout.qubits(), &[0, 2]);
        // |1100⟩: readout bits are qubit0 = 1 (MSB), qubit2 = 0 -> class 2.
        let s = Statevector::basis_from_bits(&[1, 1, 0, 0]).unwrap();
        let probs =
            classifier_eval(&circuit, &readout, &s, &vec![0.0; circuit.n_params()]).unwrap();
        assert_eq!(probs, vec![0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn conv_pair_sequence_alternates_even_odd() {
        let spec = QcnnSpec::new(4, 2).unwrap();
        let (circuit, _) = build_qcnn(&spec).unwrap();
        let rxx_pairs: Vec<(usize, usize)> = circuit
            .gates()
            .iter()
            .filter(|g| g.kind == GateKind::Rxx)
            .map(|g| (g.qubits.0, g.qubits.1.unwrap()))
            .collect();
        assert_eq!(rxx_pairs, vec![(0, 1), (2, 3), (1, 2), (3, 0), (0, 2)]);
    }

    #[test]
    fn pooling_controls_from_discarded_qubit() {
        let spec = QcnnSpec::new(4, 1).unwrap();
        let (circuit, _) = build_qcnn(&spec).unwrap();
        let pool_gates: Vec<_> = circuit
            .gates()
            .iter()
            .filter(|g| matches!(g.kind, GateKind::Crz | GateKind::Crx))
            .map(|g| (g.kind, g.qubits.0, g.qubits.1.unwrap()))
            .collect();
        assert_eq!(
            pool_gates,
            vec![
                (GateKind::Crz, 1, 0),
                (GateKind::Crx, 1, 0),
                (GateKind::Crz, 3, 2),
                (GateKind::Crx, 3, 2),
            ]
        );
    }

    #[test]
    fn two_qubit_block_matches_dense_oracle() {
        let factory = StreamFactory::new(77);
        let mut rng = factory.stream(Purpose::Predict, 5, 0);
        let (gates, used) = two_qubit_block(0, 1, 0);
        assert_eq!(used, 15);
        let circuit = ParamCircuit::new(2, 15, gates.clone()).unwrap();
        let params: Vec<f64> = (0..15).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let input = Statevector::basis(2, rng.gen_range(0..4)).unwrap();
        let fast = run_circuit(&circuit, &input, &params).unwrap();
        let dense = oracle::circuit_matrix(&gates, &params, 2).unwrap();
        let slow = oracle::matvec(&dense, input.amplitudes());
        for (x, y) in fast.amplitudes().iter().zip(&slow) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn parameters_influence_output() {
        let spec = QcnnSpec::new(4, 1).unwrap();
        let (circuit, readout) = build_qcnn(&spec).unwrap();
        let s = Statevector::basis_from_bits(&[1, 0, 1, 0]).unwrap();
        let zero = classifier_eval(&circuit, &readout, &s, &vec![0.0; 49]).unwrap();
        let factory = StreamFactory::new(9);
        let mut rng = factory.stream(Purpose::Predict, 6, 0);
        let params: Vec<f64> = (0..49).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let moved = classifier_eval(&circuit, &readout, &s, &params).unwrap();
        let shift: f64 = zero.iter().zip(&moved).map(|(a, b)| (a - b).abs()).sum();
        assert!(
            shift > 1e-3,
            "random parameters must move the class probabilities"
        );
        let total: f64 = moved.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spec_validation() {
        assert!(QcnnSpec::new(1, 1).is_err());
        assert!(QcnnSpec::new(4, 0).is_err());
        assert!(QcnnSpec::new(4, 1).is_ok());
    }
}
