//! Test-only dense-matrix reference path for the simulator.
//!
//! Builds explicit gate matrices from Pauli algebra and embeds them into the
//! full 2^n space by index arithmetic, deliberately sharing no code with the
//! bit-strided implementation. Only compiled for tests.

use crate::gates::{AngleSource, GateKind, GateOp};
use crate::Result;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

pub type CMat = Vec<Vec<Complex64>>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> CMat {
    let mut m = vec![vec![c(0.0, 0.0); dim]; dim];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = c(1.0, 0.0);
    }
    m
}

pub fn matmul(a: &CMat, b: &CMat) -> CMat {
    let n = a.len();
    let mut out = vec![vec![c(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn matvec(m: &CMat, v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Kronecker product with `a` acting on the more significant pattern bits.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (da, db) = (a.len(), b.len());
    let dim = da * db;
    let mut out = vec![vec![c(0.0, 0.0); dim]; dim];
    for ra in 0..da {
        for ca in 0..da {
            for rb in 0..db {
                for cb in 0..db {
                    out[ra * db + rb][ca * db + cb] = a[ra][ca] * b[rb][cb];
                }
            }
        }
    }
    out
}

pub fn pauli_x() -> CMat {
    vec![
        vec![c(0.0, 0.0), c(1.0, 0.0)],
        vec![c(1.0, 0.0), c(0.0, 0.0)],
    ]
}

pub fn pauli_y() -> CMat {
    vec![
        vec![c(0.0, 0.0), c(0.0, -1.0)],
        vec![c(0.0, 1.0), c(0.0, 0.0)],
    ]
}

pub fn pauli_z() -> CMat {
    vec![
        vec![c(1.0, 0.0), c(0.0, 0.0)],
        vec![c(0.0, 0.0), c(-1.0, 0.0)],
    ]
}

/// cos(θ/2)·I − i·sin(θ/2)·P for a (possibly multi-qubit) Pauli matrix P.
fn rotation_from_pauli(p: &CMat, theta: f64) -> CMat {
    let dim = p.len();
    let cos = c((theta / 2.0).cos(), 0.0);
    let misin = c(0.0, -(theta / 2.0).sin());
    let mut out = identity(dim);
    for i in 0..dim {
        for j in 0..dim {
            out[i][j] = if i == j { cos } else { c(0.0, 0.0) };
            out[i][j] += misin * p[i][j];
        }
    }
    out
}

/// Controlled-U on (control, target) with control as pattern MSB:
/// |0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ U.
fn controlled(u: &CMat) -> CMat {
    let mut out = identity(4);
    for i in 0..2 {
        for j in 0..2 {
            out[2 + i][2 + j] = u[i][j];
        }
    }
    out
}

/// The unitary of a single gate in its own 2- or 4-dimensional space, with
/// the first listed qubit as the most significant pattern bit.
pub fn gate_matrix(gate: &GateOp, params: &[f64]) -> Result<CMat> {
    let theta = match gate.angle {
        Some(AngleSource::Fixed(a)) => a,
        Some(AngleSource::Param(i)) => params[i],
        None => 0.0,
    };
    let m = match gate.kind {
        GateKind::Rx => rotation_from_pauli(&pauli_x(), theta),
        GateKind::Ry => rotation_from_pauli(&pauli_y(), theta),
        GateKind::Rz => rotation_from_pauli(&pauli_z(), theta),
        GateKind::Rxx => rotation_from_pauli(&kron(&pauli_x(), &pauli_x()), theta),
        GateKind::Ryy => rotation_from_pauli(&kron(&pauli_y(), &pauli_y()), theta),
        GateKind::Rzz => rotation_from_pauli(&kron(&pauli_z(), &pauli_z()), theta),
        GateKind::Cx => controlled(&pauli_x()),
        GateKind::Crx => controlled(&rotation_from_pauli(&pauli_x(), theta)),
        GateKind::Cry => controlled(&rotation_from_pauli(&pauli_y(), theta)),
        GateKind::Crz => controlled(&rotation_from_pauli(&pauli_z(), theta)),
        GateKind::H => {
            let r = core::f64::consts::FRAC_1_SQRT_2;
            vec![vec![c(r, 0.0), c(r, 0.0)], vec![c(r, 0.0), c(-r, 0.0)]]
        }
        GateKind::X => pauli_x(),
    };
    Ok(m)
}

/// Embeds a small unitary on the listed qubits into the full 2^n space.
/// `qubits[0]` corresponds to the most significant bit of the small-space
/// pattern index.
pub fn embed(u: &CMat, qubits: &[usize], n: usize) -> CMat {
    let dim = 1usize << n;
    let k = qubits.len();
    let outside_mask: usize = {
        let mut m = dim - 1;
        for &q in qubits {
            m &= !(1usize << q);
        }
        m
    };
    let pattern = |index: usize| -> usize {
        qubits
            .iter()
            .enumerate()
            .map(|(pos, &q)| ((index >> q) & 1) << (k - 1 - pos))
            .sum()
    };
    let mut out = vec![vec![c(0.0, 0.0); dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            if i & outside_mask == j & outside_mask {
                out[i][j] = u[pattern(i)][pattern(j)];
            }
        }
    }
    out
}

/// Full-space unitary of one gate.
pub fn gate_matrix_embedded(gate: &GateOp, params: &[f64], n: usize) -> Result<CMat> {
    let small = gate_matrix(gate, params)?;
    let qubits: Vec<usize> = match gate.qubits {
        (a, None) => vec![a],
        (a, Some(b)) => vec![a, b],
    };
    Ok(embed(&small, &qubits, n))
}

/// Full-space unitary of a gate list (product of the gates in order).
pub fn circuit_matrix(gates: &[GateOp], params: &[f64], n: usize) -> Result<CMat> {
    let mut total = identity(1 << n);
    for gate in gates {
        let u = gate_matrix_embedded(gate, params, n)?;
        total = matmul(&u, &total);
    }
    Ok(total)
}
