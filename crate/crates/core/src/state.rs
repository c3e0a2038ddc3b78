//! Dense statevectors and class readouts.
//!
//! Basis convention: basis index `i` assigns qubit `q` the bit `(i >> q) & 1`,
//! i.e. qubit 0 is the least significant bit. Ket labels in documentation and
//! tests list qubit 0 leftmost, so `|110⟩` means qubits 0 and 1 are set.

use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
// Needed only in fully no_std build graphs; once any crate in the graph links
// std, the inherent float methods shadow these and the import goes unused.
#[allow(unused_imports)]
use num_traits::Float;

/// Registers larger than this are rejected to bound memory use
/// (2^26 amplitudes = 1 GiB per state).
pub const MAX_QUBITS: usize = 26;

/// A pure state of `n_qubits` qubits stored as 2^n complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_register(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 {
        return Err(Error::TooFewQubits { n_qubits, min: 1 });
    }
    if n_qubits > MAX_QUBITS {
        return Err(Error::TooManyQubits {
            n_qubits,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

impl Statevector {
    /// The all-zeros computational basis state.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    /// The computational basis state with the given index.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: index,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Statevector { n_qubits, amps })
    }

    /// The basis state with the given per-qubit bits (`bits[q]` is qubit q).
    pub fn basis_from_bits(bits: &[u8]) -> Result<Self> {
        let mut index = 0usize;
        for (q, &b) in bits.iter().enumerate() {
            if b > 1 {
                return Err(Error::InvalidArgument("basis bits must be 0 or 1"));
            }
            index |= (b as usize) << q;
        }
        Self::basis(bits.len(), index)
    }

    /// Builds a state from explicit amplitudes, checking length and unit norm.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: amps.len(),
            });
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-6 {
            return Err(Error::NotNormalized);
        }
        Ok(Statevector { n_qubits, amps })
    }

    /// Builds a state from real amplitudes (imaginary parts zero).
    pub fn from_real(n_qubits: usize, values: &[f64]) -> Result<Self> {
        let amps = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::from_amplitudes(n_qubits, amps)
    }

    /// Number of qubits in the register.
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Dimension of the state (2^n).
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Read-only view of the amplitudes.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    /// L2 norm of the amplitude vector.
    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Measurement probability of the given basis index.
    pub fn probability(&self, index: usize) -> f64 {
        self.amps[index].norm_sqr()
    }
}

/// Maps measured bit patterns on a set of readout qubits to class indices.
///
/// `class_of_pattern[p]` is the class of pattern `p`, where the pattern packs
/// the listed qubits with the first qubit as its most significant bit. Every
/// pattern is assigned to exactly one class, so the patterns partition the
/// readout basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassReadout {
    qubits: Vec<usize>,
    class_of_pattern: Vec<usize>,
    class_count: usize,
}

impl ClassReadout {
    /// Builds a readout; `class_of_pattern` must cover all 2^R patterns and
    /// use the contiguous class indices 0..N.
    pub fn new(qubits: Vec<usize>, class_of_pattern: Vec<usize>) -> Result<Self> {
        if qubits.is_empty() {
            return Err(Error::InvalidArgument("readout needs at least one qubit"));
        }
        if qubits.len() >= usize::BITS as usize {
            return Err(Error::InvalidArgument("too many readout qubits"));
        }
        for (i, &q) in qubits.iter().enumerate() {
            if qubits[..i].contains(&q) {
                return Err(Error::DuplicateQubits { qubit: q });
            }
        }
        let patterns = 1usize << qubits.len();
        if class_of_pattern.len() != patterns {
            return Err(Error::DimensionMismatch {
                expected: patterns,
                actual: class_of_pattern.len(),
            });
        }
        let class_count = class_of_pattern.iter().copied().max().unwrap_or(0) + 1;
        for c in 0..class_count {
            if !class_of_pattern.contains(&c) {
                return Err(Error::InvalidArgument(
                    "readout classes must be contiguous from zero",
                ));
            }
        }
        Ok(ClassReadout {
            qubits,
            class_of_pattern,
            class_count,
        })
    }

    /// Readout where each bit pattern is its own class (first qubit = MSB).
    pub fn one_class_per_pattern(qubits: Vec<usize>) -> Result<Self> {
        let patterns = 1usize << qubits.len();
        Self::new(qubits, (0..patterns).collect())
    }

    /// The readout qubits, most significant first.
    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    /// Number of classes.
    pub fn class_count(&self) -> usize {
        self.class_count
    }

    /// The class assigned to each packed bit pattern.
    pub fn class_of_pattern(&self) -> &[usize] {
        &self.class_of_pattern
    }

    fn pattern_of_index(&self, index: usize) -> usize {
        let width = self.qubits.len();
        self.qubits
            .iter()
            .enumerate()
            .map(|(k, &q)| ((index >> q) & 1) << (width - 1 - k))
            .sum()
    }
}

/// Class probabilities of a state under a readout: for each class, the total
/// measurement probability of the basis states whose pattern maps to it.
pub fn class_probabilities(state: &Statevector, readout: &ClassReadout) -> Result<Vec<f64>> {
    for &q in readout.qubits() {
        if q >= state.n_qubits() {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                n_qubits: state.n_qubits(),
            });
        }
    }
    let mut probs = vec![0.0f64; readout.class_count()];
    for (i, amp) in state.amplitudes().iter().enumerate() {
        let class = readout.class_of_pattern[readout.pattern_of_index(i)];
        probs[class] += amp.norm_sqr();
    }
    Ok(probs)
}

/// Index of the largest value; ties resolve to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
