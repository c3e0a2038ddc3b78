//! Core numerics for training and certifying noise-resilient parameterized
//! quantum circuit (PQC) classifiers on a classical statevector simulator.
//!
//! The crate is `no_std` (it only needs `alloc`) and is organised as:
//!
//! - [`state`] / [`gates`] / [`circuit`]: dense statevector simulation with
//!   bit-strided gate application and parameterized gate lists.
//! - [`qcnn`]: a convolution/pooling ansatz builder for phase classification.
//! - [`cluster`]: the generalized cluster Hamiltonian, its ground states via
//!   Lanczos iteration, phase labelling from a polygonal boundary spec, and
//!   dataset generation.
//! - [`stats`]: normal CDF/quantile and Clopper-Pearson binomial bounds.
//! - [`smoothing`]: Monte-Carlo certification of Gaussian-smoothed classifiers
//!   (certified hyper-ellipsoids, volumes, and summary metrics).
//! - [`snes`]: separable natural evolution strategies with rank utilities and
//!   sigma regularization, plus the robust training loop.
//! - [`rng`]: counter-based deterministic random streams so that every sample
//!   and every Monte-Carlo shot is independently reproducible.
//!
//! All randomness flows through [`rng::StreamFactory`]; identical seeds give
//! bit-identical results regardless of evaluation order or thread count.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod circuit;
pub mod cluster;
#[cfg(test)]
pub(crate) mod dense_oracle;
pub mod error;
pub mod gates;
pub mod lanczos;
pub mod qcnn;
pub mod rng;
pub mod smoothing;
pub mod snes;
pub mod state;
pub mod stats;

pub use error::Error;
pub use num_complex::Complex64;

/// Crate-wide result type.
pub type Result<T> = core::result::Result<T, Error>;
