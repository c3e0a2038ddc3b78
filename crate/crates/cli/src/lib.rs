//! Library half of the `certiq` command-line tool.
//!
//! The binary in `main.rs` is a thin argument-parsing shell; everything it
//! does lives here so integration tests can drive commands directly:
//!
//! * [`error`] — the two-way split between configuration errors (exit 2)
//!   and numerical failures (exit 3).
//! * [`formats`] — every file format the tool reads or writes: JSON-lines
//!   datasets and sweep journals, JSON models and metrics, CSV curves.
//! * [`analysis`] — pure frontier/correlation extraction over sweep
//!   records.
//! * [`commands`] — one module per subcommand.
//!
//! All outputs are deterministic functions of the inputs and `--seed`; no
//! timestamps or machine identifiers are ever written.

pub mod analysis;
pub mod commands;
pub mod error;
pub mod formats;

pub use error::{CliError, CliResult};
