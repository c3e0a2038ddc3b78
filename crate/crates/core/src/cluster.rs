//! Generalized cluster Hamiltonian on a periodic qubit ring, its ground
//! states, piecewise-polygonal phase labels, and dataset generation.
//!
//! The Hamiltonian is
//!
//! ```text
//! H(j1, j2) = Σ_j ( Z_j + j1 · X_j X_{j+1} − j2 · X_{j−1} Z_j X_{j+1} )
//! ```
//!
//! with periodic boundary conditions. In the little-endian computational
//! basis (see [`crate::state`]) every term is real, so the operator is a
//! real-symmetric matrix and ground states can be taken real.

use crate::lanczos::{ground_state_matvec, LanczosOptions};
use crate::rng::{Purpose, StreamFactory};
use crate::state::Statevector;
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

/// Memory guard for dense statevectors built from exact diagonalization.
pub const MAX_HAM_QUBITS: usize = 20;

/// Couplings are drawn uniformly from `[-COUPLING_LIMIT, COUPLING_LIMIT)`.
pub const COUPLING_LIMIT: f64 = 4.0;

/// Ring size and couplings of a generalized cluster Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterParams {
    pub n_qubits: usize,
    pub j1: f64,
    pub j2: f64,
}

impl ClusterParams {
    pub fn new(n_qubits: usize, j1: f64, j2: f64) -> Result<Self> {
        if n_qubits < 3 {
            return Err(Error::TooFewQubits { n_qubits, min: 3 });
        }
        if n_qubits > MAX_HAM_QUBITS {
            return Err(Error::TooManyQubits {
                n_qubits,
                max: MAX_HAM_QUBITS,
            });
        }
        if !j1.is_finite() || !j2.is_finite() {
            return Err(Error::InvalidArgument("couplings must be finite"));
        }
        Ok(ClusterParams { n_qubits, j1, j2 })
    }
}

/// Matrix-free generalized cluster Hamiltonian.
#[derive(Debug, Clone)]
pub struct ClusterHamiltonian {
    params: ClusterParams,
}

impl ClusterHamiltonian {
    pub fn new(params: ClusterParams) -> Self {
        ClusterHamiltonian { params }
    }

    pub fn params(&self) -> ClusterParams {
        self.params
    }

    pub fn dimension(&self) -> usize {
        1usize << self.params.n_qubits
    }

    /// Applies `H` to a real vector in the computational basis.
    ///
    /// Basis index bit `q` is the state of qubit `q`. For each term:
    /// `Z_j` is diagonal with value `+1` for bit 0 and `−1` for bit 1;
    /// `X_j X_{j+1}` flips bits `j` and `j+1`; `X_{j−1} Z_j X_{j+1}` flips
    /// bits `j−1` and `j+1` and multiplies by the `Z_j` sign.
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        let n = self.params.n_qubits;
        let dim = self.dimension();
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: v.len(),
            });
        }
        let (j1, j2) = (self.params.j1, self.params.j2);
        let mut out = vec![0.0f64; dim];
        for (idx, &amp) in v.iter().enumerate() {
            if amp == 0.0 {
                continue;
            }
            // Diagonal Σ_j Z_j: each 0-bit contributes +1, each 1-bit −1.
            let ones = (idx as u64).count_ones() as i64;
            let z_sum = n as i64 - 2 * ones;
            out[idx] += z_sum as f64 * amp;
            for j in 0..n {
                let next = (j + 1) % n;
                let prev = (j + n - 1) % n;
                // j1 · X_j X_{j+1}
                let flipped_xx = idx ^ (1 << j) ^ (1 << next);
                out[flipped_xx] += j1 * amp;
                // −j2 · X_{j−1} Z_j X_{j+1}
                let z_sign = if idx & (1 << j) == 0 { 1.0 } else { -1.0 };
                let flipped_xzx = idx ^ (1 << prev) ^ (1 << next);
                out[flipped_xzx] += -j2 * z_sign * amp;
            }
        }
        Ok(out)
    }

    /// Ground energy and ground state via Lanczos with a seeded start vector.
    ///
    /// Deterministic for a fixed `(factory, stream_index, stream_subindex)`;
    /// the returned state is real with a fixed global sign.
    pub fn ground_state(
        &self,
        factory: &StreamFactory,
        stream_index: u64,
        stream_subindex: u64,
    ) -> Result<(f64, Statevector)> {
        let dim = self.dimension();
        let mut rng = factory.stream(Purpose::LanczosStart, stream_index, stream_subindex);
        let start: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
        let opts = LanczosOptions::default();
        let (energy, vector) = ground_state_matvec(
            |v| self.matvec(v).expect("dimension checked"),
            dim,
            &start,
            &opts,
        )?;
        let state = Statevector::from_real(self.params.n_qubits, &vector)?;
        Ok((energy, state))
    }
}

/// One labelled region of the coupling plane: a simple polygon and the
/// class it maps to. Vertices are `(j1, j2)` pairs in order around the
/// boundary (either orientation).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRegion {
    pub class: usize,
    pub vertices: Vec<(f64, f64)>,
}

/// A prioritized list of polygons partitioning (part of) the coupling
/// plane into phase classes. Points on shared edges belong to the first
/// region that contains them, so lookups are total and unambiguous over
/// the covered area.
#[derive(Debug, Clone)]
pub struct PhaseBoundarySpec {
    regions: Vec<PhaseRegion>,
    class_count: usize,
}

impl PhaseBoundarySpec {
    pub fn new(regions: Vec<PhaseRegion>) -> Result<Self> {
        if regions.is_empty() {
            return Err(Error::InvalidArgument(
                "phase spec needs at least one region",
            ));
        }
        let mut max_class = 0;
        for region in &regions {
            if region.vertices.len() < 3 {
                return Err(Error::InvalidArgument(
                    "phase region needs at least 3 vertices",
                ));
            }
            if region
                .vertices
                .iter()
                .any(|&(a, b)| !a.is_finite() || !b.is_finite())
            {
                return Err(Error::InvalidArgument(
                    "phase region vertices must be finite",
                ));
            }
            max_class = max_class.max(region.class);
        }
        let class_count = max_class + 1;
        for class in 0..class_count {
            if !regions.iter().any(|r| r.class == class) {
                return Err(Error::InvalidArgument(
                    "phase classes must be contiguous from 0",
                ));
            }
        }
        Ok(PhaseBoundarySpec {
            regions,
            class_count,
        })
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn regions(&self) -> &[PhaseRegion] {
        &self.regions
    }

    /// Phase class of the point `(j1, j2)`: the first region whose closed
    /// polygon (interior or boundary) contains it.
    pub fn classify(&self, j1: f64, j2: f64) -> Result<usize> {
        for region in &self.regions {
            if polygon_contains(&region.vertices, j1, j2) {
                return Ok(region.class);
            }
        }
        Err(Error::UnlabelledPoint)
    }
}

/// Closed point-in-polygon test: boundary points count as inside.
///
/// Edge membership is decided exactly (cross-product zero and within the
/// segment box); interior membership uses an even-odd ray cast.
fn polygon_contains(vertices: &[(f64, f64)], x: f64, y: f64) -> bool {
    let m = vertices.len();
    for i in 0..m {
        let (x1, y1) = vertices[i];
        let (x2, y2) = vertices[(i + 1) % m];
        let cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1);
        if cross == 0.0 && x >= x1.min(x2) && x <= x1.max(x2) && y >= y1.min(y2) && y <= y1.max(y2)
        {
            return true;
        }
    }
    let mut inside = false;
    let mut j = m - 1;
    for i in 0..m {
        let (xi, yi) = vertices[i];
        let (xj, yj) = vertices[j];
        if (yi > y) != (yj > y) {
            let x_cross = xi + (y - yi) / (yj - yi) * (xj - xi);
            if x < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// One labelled ground-state sample.
#[derive(Debug, Clone)]
pub struct Sample {
    pub j1: f64,
    pub j2: f64,
    pub label: usize,
    pub energy: f64,
    pub state: Statevector,
}

/// Which split a dataset belongs to; selects independent random streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitKind {
    Train,
    Test,
}

impl SplitKind {
    fn purpose(self) -> Purpose {
        match self {
            SplitKind::Train => Purpose::DatasetTrain,
            SplitKind::Test => Purpose::DatasetTest,
        }
    }

    fn tag(self) -> u64 {
        match self {
            SplitKind::Train => 0,
            SplitKind::Test => 1,
        }
    }
}

/// Draws `count` coupling pairs uniformly from the coupling square,
/// rejecting exact duplicates of `avoid` and of earlier draws.
///
/// Each pair consumes its own random stream, indexed by position, so the
/// result for position `i` does not depend on `count`.
pub fn draw_couplings(
    factory: &StreamFactory,
    kind: SplitKind,
    count: usize,
    avoid: &[(f64, f64)],
) -> Vec<(f64, f64)> {
    let mut drawn: Vec<(f64, f64)> = Vec::with_capacity(count);
    for i in 0..count {
        let mut rng = factory.stream(kind.purpose(), i as u64, 0);
        loop {
            let j1 = -COUPLING_LIMIT + 2.0 * COUPLING_LIMIT * rng.gen::<f64>();
            let j2 = -COUPLING_LIMIT + 2.0 * COUPLING_LIMIT * rng.gen::<f64>();
            let pair = (j1, j2);
            if avoid.contains(&pair) || drawn.contains(&pair) {
                continue;
            }
            drawn.push(pair);
            break;
        }
    }
    drawn
}

/// Solves one sample: phase label plus Lanczos ground state and energy.
pub fn solve_sample(
    n_qubits: usize,
    j1: f64,
    j2: f64,
    boundary: &PhaseBoundarySpec,
    factory: &StreamFactory,
    kind: SplitKind,
    index: u64,
) -> Result<Sample> {
    let params = ClusterParams::new(n_qubits, j1, j2)?;
    let label = boundary.classify(j1, j2)?;
    let hamiltonian = ClusterHamiltonian::new(params);
    let (energy, state) = hamiltonian.ground_state(factory, index, kind.tag())?;
    Ok(Sample {
        j1,
        j2,
        label,
        energy,
        state,
    })
}

/// Generates a labelled dataset of `count` ground states at couplings drawn
/// uniformly from the coupling square, avoiding exact collisions with
/// `avoid` (pass the training couplings when building a test split).
pub fn gen_dataset(
    n_qubits: usize,
    count: usize,
    factory: &StreamFactory,
    kind: SplitKind,
    avoid: &[(f64, f64)],
    boundary: &PhaseBoundarySpec,
) -> Result<Vec<Sample>> {
    let couplings = draw_couplings(factory, kind, count, avoid);
    couplings
        .iter()
        .enumerate()
        .map(|(i, &(j1, j2))| solve_sample(n_qubits, j1, j2, boundary, factory, kind, i as u64))
        .collect()
}
