//! Parameterized gate operations and their bit-strided application.
//!
//! Rotations use the half-angle convention: `R_P(θ) = exp(-i θ/2 P)` for a
//! Pauli `P`, so e.g. `RZ(θ) = diag(e^{-iθ/2}, e^{+iθ/2})` and `RY(π)|0⟩ =
//! |1⟩`. Two-qubit rotations are `R_PP(θ) = exp(-i θ/2 P⊗P)`. Gates act on a
//! copied amplitude buffer by striding over basis-index bits; no gate matrix
//! is ever materialized.

use crate::state::Statevector;
use crate::{Error, Result};
use num_complex::Complex64;
// Needed only in fully no_std build graphs; once any crate in the graph links
// std, the inherent float methods shadow these and the import goes unused.
#[allow(unused_imports)]
use num_traits::Float;

/// The supported gate kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    Rxx,
    Ryy,
    Rzz,
    Cx,
    Crx,
    Cry,
    Crz,
    H,
    X,
}

impl GateKind {
    /// Number of qubits the gate acts on.
    pub fn arity(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::H | GateKind::X => 1,
            _ => 2,
        }
    }

    /// Whether the gate takes a rotation angle.
    pub fn takes_angle(self) -> bool {
        !matches!(self, GateKind::Cx | GateKind::H | GateKind::X)
    }
}

/// Where a gate's rotation angle comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleSource {
    /// A literal angle in radians.
    Fixed(f64),
    /// Index into the circuit's parameter vector.
    Param(usize),
}

/// One gate in a circuit: kind, target qubits, and optional angle source.
///
/// For controlled gates (`Cx`, `Crx`, `Cry`, `Crz`) the first qubit is the
/// control and the second the target.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub qubits: (usize, Option<usize>),
    pub angle: Option<AngleSource>,
}

impl GateOp {
    fn one_qubit(kind: GateKind, qubit: usize, angle: Option<AngleSource>) -> Self {
        GateOp {
            kind,
            qubits: (qubit, None),
            angle,
        }
    }

    fn two_qubit(kind: GateKind, a: usize, b: usize, angle: Option<AngleSource>) -> Self {
        GateOp {
            kind,
            qubits: (a, Some(b)),
            angle,
        }
    }

    pub fn rx(qubit: usize, angle: AngleSource) -> Self {
        Self::one_qubit(GateKind::Rx, qubit, Some(angle))
    }
    pub fn ry(qubit: usize, angle: AngleSource) -> Self {
        Self::one_qubit(GateKind::Ry, qubit, Some(angle))
    }
    pub fn rz(qubit: usize, angle: AngleSource) -> Self {
        Self::one_qubit(GateKind::Rz, qubit, Some(angle))
    }
    pub fn rxx(a: usize, b: usize, angle: AngleSource) -> Self {
        Self::two_qubit(GateKind::Rxx, a, b, Some(angle))
    }
    pub fn ryy(a: usize, b: usize, angle: AngleSource) -> Self {
        Self::two_qubit(GateKind::Ryy, a, b, Some(angle))
    }
    pub fn rzz(a: usize, b: usize, angle: AngleSource) -> Self {
        Self::two_qubit(GateKind::Rzz, a, b, Some(angle))
    }
    pub fn cx(control: usize, target: usize) -> Self {
        Self::two_qubit(GateKind::Cx, control, target, None)
    }
    pub fn crx(control: usize, target: usize, angle: AngleSource) -> Self {
        Self::two_qubit(GateKind::Crx, control, target, Some(angle))
    }
    pub fn cry(control: usize, target: usize, angle: AngleSource) -> Self {
        Self::two_qubit(GateKind::Cry, control, target, Some(angle))
    }
    pub fn crz(control: usize, target: usize, angle: AngleSource) -> Self {
        Self::two_qubit(GateKind::Crz, control, target, Some(angle))
    }
    pub fn h(qubit: usize) -> Self {
        Self::one_qubit(GateKind::H, qubit, None)
    }
    pub fn x(qubit: usize) -> Self {
        Self::one_qubit(GateKind::X, qubit, None)
    }

    /// The parameter slot this gate reads, if any.
    pub fn param_index(&self) -> Option<usize> {
        match self.angle {
            Some(AngleSource::Param(i)) => Some(i),
            _ => None,
        }
    }

    /// Checks qubit indices, distinctness, angle presence, and param range.
    pub fn validate(&self, n_qubits: usize, n_params: usize) -> Result<()> {
        let (a, b) = self.qubits;
        if a >= n_qubits {
            return Err(Error::QubitOutOfRange { qubit: a, n_qubits });
        }
        match (self.kind.arity(), b) {
            (1, None) => {}
            (2, Some(b)) => {
                if b >= n_qubits {
                    return Err(Error::QubitOutOfRange { qubit: b, n_qubits });
                }
                if a == b {
                    return Err(Error::DuplicateQubits { qubit: a });
                }
            }
            _ => return Err(Error::InvalidArgument("gate arity does not match qubits")),
        }
        match (self.kind.takes_angle(), &self.angle) {
            (true, Some(AngleSource::Param(i))) => {
                if *i >= n_params {
                    return Err(Error::ParamOutOfRange {
                        index: *i,
                        len: n_params,
                    });
                }
            }
            (true, Some(AngleSource::Fixed(_))) => {}
            (true, None) => return Err(Error::InvalidArgument("rotation gate needs an angle")),
            (false, None) => {}
            (false, Some(_)) => {
                return Err(Error::InvalidArgument("non-rotation gate takes no angle"))
            }
        }
        Ok(())
    }

    fn resolved_angle(&self, params: &[f64]) -> Result<f64> {
        match self.angle {
            Some(AngleSource::Fixed(a)) => Ok(a),
            Some(AngleSource::Param(i)) => params.get(i).copied().ok_or(Error::ParamOutOfRange {
                index: i,
                len: params.len(),
            }),
            None => Ok(0.0),
        }
    }
}

/// Applies a gate to a state, returning the new state.
pub fn apply_gate(state: &Statevector, gate: &GateOp, params: &[f64]) -> Result<Statevector> {
    gate.validate(state.n_qubits(), params.len())?;
    let mut out = state.clone();
    apply_gate_unchecked(&mut out, gate, params)?;
    Ok(out)
}

/// Applies a pre-validated gate in place.
pub(crate) fn apply_gate_unchecked(
    state: &mut Statevector,
    gate: &GateOp,
    params: &[f64],
) -> Result<()> {
    let amps = state.amplitudes_mut();
    let (q0, q1) = gate.qubits;
    match gate.kind {
        GateKind::Rx => {
            let h = gate.resolved_angle(params)? / 2.0;
            let (c, s) = (Complex64::new(h.cos(), 0.0), Complex64::new(0.0, -h.sin()));
            apply_one_qubit(amps, q0, [c, s, s, c]);
        }
        GateKind::Ry => {
            let h = gate.resolved_angle(params)? / 2.0;
            let (c, s) = (Complex64::new(h.cos(), 0.0), Complex64::new(h.sin(), 0.0));
            apply_one_qubit(amps, q0, [c, -s, s, c]);
        }
        GateKind::Rz => {
            let h = gate.resolved_angle(params)? / 2.0;
            apply_phase_pair(amps, q0, Complex64::cis(-h), Complex64::cis(h));
        }
        GateKind::H => {
            let r = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
            apply_one_qubit(amps, q0, [r, r, r, -r]);
        }
        GateKind::X => {
            let (zero, one) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
            apply_one_qubit(amps, q0, [zero, one, one, zero]);
        }
        GateKind::Rxx | GateKind::Ryy => {
            let h = gate.resolved_angle(params)? / 2.0;
            let c = h.cos();
            // RXX couples each pair with -i·sin; RYY flips the sign on the
            // (00,11) pair because Y⊗Y|00⟩ = -|11⟩.
            let s_inner = Complex64::new(0.0, -h.sin());
            let s_outer = if gate.kind == GateKind::Rxx {
                s_inner
            } else {
                -s_inner
            };
            apply_double_flip(amps, q0, q1.unwrap(), c, s_outer, s_inner);
        }
        GateKind::Rzz => {
            let h = gate.resolved_angle(params)? / 2.0;
            let (same, diff) = (Complex64::cis(-h), Complex64::cis(h));
            let (ma, mb) = (1usize << q0, 1usize << q1.unwrap());
            for (i, amp) in amps.iter_mut().enumerate() {
                let parity = ((i & ma) != 0) ^ ((i & mb) != 0);
                *amp *= if parity { diff } else { same };
            }
        }
        GateKind::Cx => {
            let (mc, mt) = (1usize << q0, 1usize << q1.unwrap());
            for i in 0..amps.len() {
                if (i & mc) != 0 && (i & mt) == 0 {
                    amps.swap(i, i | mt);
                }
            }
        }
        GateKind::Crx | GateKind::Cry | GateKind::Crz => {
            let h = gate.resolved_angle(params)? / 2.0;
            let m = match gate.kind {
                GateKind::Crx => {
                    let (c, s) = (Complex64::new(h.cos(), 0.0), Complex64::new(0.0, -h.sin()));
                    [c, s, s, c]
                }
                GateKind::Cry => {
                    let (c, s) = (Complex64::new(h.cos(), 0.0), Complex64::new(h.sin(), 0.0));
                    [c, -s, s, c]
                }
                _ => {
                    let zero = Complex64::new(0.0, 0.0);
                    [Complex64::cis(-h), zero, zero, Complex64::cis(h)]
                }
            };
            apply_controlled_one_qubit(amps, q0, q1.unwrap(), m);
        }
    }
    Ok(())
}

/// Applies the 2x2 matrix `[m0 m1; m2 m3]` to the given qubit of every
/// amplitude pair, iterating pairs by bit striding.
fn apply_one_qubit(amps: &mut [Complex64], qubit: usize, m: [Complex64; 4]) {
    let mask = 1usize << qubit;
    let dim = amps.len();
    let mut base = 0;
    while base < dim {
        for low in base..base + mask {
            let i = low;
            let j = low | mask;
            let (a, b) = (amps[i], amps[j]);
            amps[i] = m[0] * a + m[1] * b;
            amps[j] = m[2] * a + m[3] * b;
        }
        base += mask << 1;
    }
}

/// Multiplies amplitudes with qubit = 0 by `p0` and qubit = 1 by `p1`.
fn apply_phase_pair(amps: &mut [Complex64], qubit: usize, p0: Complex64, p1: Complex64) {
    let mask = 1usize << qubit;
    for (i, amp) in amps.iter_mut().enumerate() {
        *amp *= if i & mask == 0 { p0 } else { p1 };
    }
}

/// Rotation that mixes amplitude pairs differing in both of two bits:
/// `(a00, a11)` with off-diagonal `s_outer` and `(a01, a10)` with `s_inner`.
fn apply_double_flip(
    amps: &mut [Complex64],
    qa: usize,
    qb: usize,
    c: f64,
    s_outer: Complex64,
    s_inner: Complex64,
) {
    let (ma, mb) = (1usize << qa, 1usize << qb);
    for i in 0..amps.len() {
        if i & ma == 0 && i & mb == 0 {
            let (i00, i01, i10, i11) = (i, i | mb, i | ma, i | ma | mb);
            let (a00, a01, a10, a11) = (amps[i00], amps[i01], amps[i10], amps[i11]);
            amps[i00] = c * a00 + s_outer * a11;
            amps[i11] = c * a11 + s_outer * a00;
            amps[i01] = c * a01 + s_inner * a10;
            amps[i10] = c * a10 + s_inner * a01;
        }
    }
}

/// Applies a 2x2 matrix to the target qubit on the subspace where the control
/// qubit is 1.
fn apply_controlled_one_qubit(
    amps: &mut [Complex64],
    control: usize,
    target: usize,
    m: [Complex64; 4],
) {
    let (mc, mt) = (1usize << control, 1usize << target);
    for i in 0..amps.len() {
        if (i & mc) != 0 && (i & mt) == 0 {
            let j = i | mt;
            let (a, b) = (amps[i], amps[j]);
            amps[i] = m[0] * a + m[1] * b;
            amps[j] = m[2] * a + m[3] * b;
        }
    }
}

/// All gate kinds, useful for exhaustive tests.
pub const ALL_GATE_KINDS: [GateKind; 12] = [
    GateKind::Rx,
    GateKind::Ry,
    GateKind::Rz,
    GateKind::Rxx,
    GateKind::Ryy,
    GateKind::Rzz,
    GateKind::Cx,
    GateKind::Crx,
    GateKind::Cry,
    GateKind::Crz,
    GateKind::H,
    GateKind::X,
];

/// Builds a gate of the given kind on the given qubits, taking its angle from
/// the given source when the kind is parameterized.
pub fn gate_of_kind(kind: GateKind, a: usize, b: usize, angle: AngleSource) -> GateOp {
    match kind {
        GateKind::Rx => GateOp::rx(a, angle),
        GateKind::Ry => GateOp::ry(a, angle),
        GateKind::Rz => GateOp::rz(a, angle),
        GateKind::Rxx => GateOp::rxx(a, b, angle),
        GateKind::Ryy => GateOp::ryy(a, b, angle),
        GateKind::Rzz => GateOp::rzz(a, b, angle),
        GateKind::Cx => GateOp::cx(a, b),
        GateKind::Crx => GateOp::crx(a, b, angle),
        GateKind::Cry => GateOp::cry(a, b, angle),
        GateKind::Crz => GateOp::crz(a, b, angle),
        GateKind::H => GateOp::h(a),
        GateKind::X => GateOp::x(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense_oracle as oracle;
    use crate::rng::{Purpose, StreamFactory};
    use crate::Error;
    use alloc::vec::Vec;
    use rand::Rng;

    fn random_state(n: usize, rng: &mut impl Rng) -> Statevector {
        let dim = 1usize << n;
        let mut amps: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        Statevector::from_amplitudes(n, amps).unwrap()
    }

    #[test]
    fn ry_pi_flips_zero_to_one() {
        let s = Statevector::zero(1).unwrap();
        let out = apply_gate(
            &s,
            &GateOp::ry(0, AngleSource::Fixed(core::f64::consts::PI)),
            &[],
        )
        .unwrap();
        assert!((out.amplitudes()[0].norm() - 0.0).abs() < 1e-15);
        assert!((out.amplitudes()[1] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rz_applies_half_angle_phases() {
        let s = Statevector::basis(1, 0).unwrap();
        let theta = 0.7;
        let out = apply_gate(&s, &GateOp::rz(0, AngleSource::Fixed(theta)), &[]).unwrap();
        assert!((out.amplitudes()[0] - Complex64::cis(-theta / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn cx_truth_table() {
        // Control qubit 0, target qubit 1; labels list qubit 0 first.
        let cases = [
            ([0u8, 0], [0u8, 0]),
            ([1, 0], [1, 1]),
            ([0, 1], [0, 1]),
            ([1, 1], [1, 0]),
        ];
        for (input, expected) in cases {
            let s = Statevector::basis_from_bits(&input).unwrap();
            let out = apply_gate(&s, &GateOp::cx(0, 1), &[]).unwrap();
            let want = Statevector::basis_from_bits(&expected).unwrap();
            assert_eq!(out.amplitudes(), want.amplitudes(), "CX on {input:?}");
        }
    }

    #[test]
    fn hadamard_makes_uniform_superposition() {
        let s = Statevector::zero(1).unwrap();
        let out = apply_gate(&s, &GateOp::h(0), &[]).unwrap();
        let r = core::f64::consts::FRAC_1_SQRT_2;
        assert!((out.amplitudes()[0].re - r).abs() < 1e-15);
        assert!((out.amplitudes()[1].re - r).abs() < 1e-15);
    }

    #[test]
    fn rxx_on_00_mixes_with_11() {
        let s = Statevector::zero(2).unwrap();
        let theta = core::f64::consts::FRAC_PI_2;
        let out = apply_gate(&s, &GateOp::rxx(0, 1, AngleSource::Fixed(theta)), &[]).unwrap();
        let c = (theta / 2.0).cos();
        let sn = (theta / 2.0).sin();
        assert!((out.amplitudes()[0] - Complex64::new(c, 0.0)).norm() < 1e-15);
        assert!((out.amplitudes()[3] - Complex64::new(0.0, -sn)).norm() < 1e-15);
    }

    #[test]
    fn zero_angle_rotations_are_identity() {
        let factory = StreamFactory::new(11);
        let mut rng = factory.stream(Purpose::Predict, 0, 0);
        let s = random_state(3, &mut rng);
        for kind in ALL_GATE_KINDS {
            if !kind.takes_angle() {
                continue;
            }
            let gate = gate_of_kind(kind, 1, 2, AngleSource::Fixed(0.0));
            let out = apply_gate(&s, &gate, &[]).unwrap();
            for (a, b) in out.amplitudes().iter().zip(s.amplitudes()) {
                assert!(
                    (a - b).norm() < 1e-15,
                    "{kind:?} at zero angle must be identity"
                );
            }
        }
    }

    #[test]
    fn every_gate_matches_dense_oracle() {
        let factory = StreamFactory::new(23);
        for trial in 0..60u64 {
            let mut rng = factory.stream(Purpose::Predict, 1, trial);
            let n = 3;
            let s = random_state(n, &mut rng);
            let kind = ALL_GATE_KINDS[rng.gen_range(0..ALL_GATE_KINDS.len())];
            let a = rng.gen_range(0..n);
            let b = (a + 1 + rng.gen_range(0..n - 1)) % n;
            let theta = rng.gen_range(-6.0..6.0);
            let gate = gate_of_kind(kind, a, b, AngleSource::Fixed(theta));
            let fast = apply_gate(&s, &gate, &[]).unwrap();
            let dense = oracle::gate_matrix_embedded(&gate, &[], n).unwrap();
            let slow = oracle::matvec(&dense, s.amplitudes());
            for (x, y) in fast.amplitudes().iter().zip(&slow) {
                assert!(
                    (x - y).norm() < 1e-12,
                    "{kind:?} on ({a},{b}) θ={theta} disagrees with dense oracle"
                );
            }
            assert!((fast.norm() - 1.0).abs() < 1e-9, "norm must be preserved");
        }
    }

    #[test]
    fn param_angles_resolve_from_vector() {
        let s = Statevector::zero(1).unwrap();
        let theta = 1.234;
        let via_param =
            apply_gate(&s, &GateOp::ry(0, AngleSource::Param(1)), &[0.0, theta]).unwrap();
        let via_fixed = apply_gate(&s, &GateOp::ry(0, AngleSource::Fixed(theta)), &[]).unwrap();
        assert_eq!(via_param.amplitudes(), via_fixed.amplitudes());
    }

    #[test]
    fn validation_rejects_bad_gates() {
        let s = Statevector::zero(2).unwrap();
        assert!(matches!(
            apply_gate(&s, &GateOp::ry(2, AngleSource::Fixed(0.1)), &[]),
            Err(Error::QubitOutOfRange { .. })
        ));
        assert!(matches!(
            apply_gate(&s, &GateOp::cx(1, 1), &[]),
            Err(Error::DuplicateQubits { .. })
        ));
        assert!(matches!(
            apply_gate(&s, &GateOp::ry(0, AngleSource::Param(3)), &[0.0]),
            Err(Error::ParamOutOfRange { .. })
        ));
    }
}
