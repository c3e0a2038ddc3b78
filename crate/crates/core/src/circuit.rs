//! Parameterized circuits: validated gate lists, execution, and classifier
//! evaluation.

use crate::gates::{apply_gate_unchecked, GateOp};
use crate::state::{class_probabilities, ClassReadout, Statevector};
use crate::{Error, Result};
use alloc::vec::Vec;

/// A fixed gate list over `n_qubits` qubits reading `n_params` parameters.
///
/// All gates are validated at construction, so running the circuit only has
/// to check the state dimension and parameter-vector length.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamCircuit {
    n_qubits: usize,
    n_params: usize,
    gates: Vec<GateOp>,
}

impl ParamCircuit {
    /// Builds a circuit, validating every gate against the register size and
    /// parameter count.
    pub fn new(n_qubits: usize, n_params: usize, gates: Vec<GateOp>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::TooFewQubits { n_qubits, min: 1 });
        }
        for gate in &gates {
            gate.validate(n_qubits, n_params)?;
        }
        Ok(ParamCircuit {
            n_qubits,
            n_params,
            gates,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }
}

/// Runs the circuit on an input state with the given parameter vector.
pub fn run_circuit(
    circuit: &ParamCircuit,
    input: &Statevector,
    params: &[f64],
) -> Result<Statevector> {
    if input.n_qubits() != circuit.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: circuit.n_qubits(),
            actual: input.n_qubits(),
        });
    }
    if params.len() != circuit.n_params() {
        return Err(Error::DimensionMismatch {
            expected: circuit.n_params(),
            actual: params.len(),
        });
    }
    let mut state = input.clone();
    for gate in &circuit.gates {
        apply_gate_unchecked(&mut state, gate, params)?;
    }
    Ok(state)
}

/// Runs the circuit and reduces the output state to class probabilities.
pub fn classifier_eval(
    circuit: &ParamCircuit,
    readout: &ClassReadout,
    input: &Statevector,
    params: &[f64],
) -> Result<Vec<f64>> {
    let out = run_circuit(circuit, input, params)?;
    class_probabilities(&out, readout)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense_oracle as oracle;
    use crate::gates::{gate_of_kind, AngleSource, ALL_GATE_KINDS};
    use crate::rng::{Purpose, StreamFactory};
    use crate::state::argmax;
    use alloc::vec;
    use num_complex::Complex64;
    use rand::Rng;

    #[test]
    fn empty_circuit_is_identity() {
        let circuit = ParamCircuit::new(3, 0, vec![]).unwrap();
        let s = Statevector::basis(3, 6).unwrap();
        let out = run_circuit(&circuit, &s, &[]).unwrap();
        assert_eq!(out.amplitudes(), s.amplitudes());
    }

    #[test]
    fn construction_validates_gates() {
        assert!(ParamCircuit::new(2, 0, vec![GateOp::ry(5, AngleSource::Fixed(0.0))]).is_err());
        assert!(ParamCircuit::new(2, 1, vec![GateOp::ry(0, AngleSource::Param(1))]).is_err());
        assert!(ParamCircuit::new(0, 0, vec![]).is_err());
        assert!(ParamCircuit::new(2, 2, vec![GateOp::ry(0, AngleSource::Param(1))]).is_ok());
    }

    #[test]
    fn run_checks_dimensions() {
        let circuit = ParamCircuit::new(2, 1, vec![GateOp::ry(0, AngleSource::Param(0))]).unwrap();
        let wrong_state = Statevector::zero(3).unwrap();
        assert!(run_circuit(&circuit, &wrong_state, &[0.1]).is_err());
        let s = Statevector::zero(2).unwrap();
        assert!(run_circuit(&circuit, &s, &[]).is_err());
        assert!(run_circuit(&circuit, &s, &[0.1, 0.2]).is_err());
    }

    #[test]
    fn random_circuits_match_dense_product_oracle() {
        let factory = StreamFactory::new(97);
        for trial in 0..40u64 {
            let mut rng = factory.stream(Purpose::Predict, 2, trial);
            let n = rng.gen_range(1..=3);
            let n_gates = rng.gen_range(1..=8);
            let n_params = 4;
            let mut gates = Vec::new();
            for _ in 0..n_gates {
                let kind = ALL_GATE_KINDS[rng.gen_range(0..ALL_GATE_KINDS.len())];
                if kind.arity() == 2 && n < 2 {
                    continue;
                }
                let a = rng.gen_range(0..n);
                let b = if n > 1 {
                    (a + 1 + rng.gen_range(0..n - 1)) % n
                } else {
                    0
                };
                let angle = if rng.gen_bool(0.5) {
                    AngleSource::Fixed(rng.gen_range(-3.0..3.0))
                } else {
                    AngleSource::Param(rng.gen_range(0..n_params))
                };
                gates.push(gate_of_kind(kind, a, b, angle));
            }
            let params: Vec<f64> = (0..n_params).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let circuit = ParamCircuit::new(n, n_params, gates.clone()).unwrap();
            let input = Statevector::basis(n, rng.gen_range(0..1 << n)).unwrap();
            let fast = run_circuit(&circuit, &input, &params).unwrap();
            let dense = oracle::circuit_matrix(&gates, &params, n).unwrap();
            let slow = oracle::matvec(&dense, input.amplitudes());
            for (x, y) in fast.amplitudes().iter().zip(&slow) {
                assert!(
                    (x - y).norm() < 1e-12,
                    "trial {trial} disagrees with oracle"
                );
            }
        }
    }

    #[test]
    fn circuit_preserves_inner_products() {
        // Unitarity: ⟨Ua|Ub⟩ = ⟨a|b⟩ for random states.
        let factory = StreamFactory::new(5);
        let mut rng = factory.stream(Purpose::Predict, 3, 0);
        let gates = vec![
            GateOp::h(0),
            GateOp::rxx(0, 2, AngleSource::Fixed(0.83)),
            GateOp::crz(1, 0, AngleSource::Fixed(-1.7)),
            GateOp::cx(2, 1),
            GateOp::ry(1, AngleSource::Fixed(0.4)),
        ];
        let circuit = ParamCircuit::new(3, 0, gates).unwrap();
        let make = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mut amps: Vec<Complex64> = (0..8)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            amps.iter_mut().for_each(|a| *a /= norm);
            Statevector::from_amplitudes(3, amps).unwrap()
        };
        let (a, b) = (make(&mut rng), make(&mut rng));
        let inner = |x: &Statevector, y: &Statevector| -> Complex64 {
            x.amplitudes()
                .iter()
                .zip(y.amplitudes())
                .map(|(p, q)| p.conj() * q)
                .sum()
        };
        let before = inner(&a, &b);
        let after = inner(
            &run_circuit(&circuit, &a, &[]).unwrap(),
            &run_circuit(&circuit, &b, &[]).unwrap(),
        );
        assert!((before - after).norm() < 1e-12);
    }

    #[test]
    fn classifier_eval_on_identity_circuit_is_one_hot() {
        // Zero-parameter circuit on |1100⟩ with readout on the last two
        // qubits: both bits are 0, so class 0 gets all the probability.
        let circuit = ParamCircuit::new(4, 0, vec![]).unwrap();
        let readout = ClassReadout::one_class_per_pattern(vec![2, 3]).unwrap();
        let s = Statevector::basis_from_bits(&[1, 1, 0, 0]).unwrap();
        let probs = classifier_eval(&circuit, &readout, &s, &[]).unwrap();
        assert_eq!(probs, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(argmax(&probs), 0);
    }
}
