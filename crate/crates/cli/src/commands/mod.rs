//! One module per subcommand, plus shared glue.
//!
//! Each command takes a fully-resolved options struct (no `Option`
//! fields), so integration tests can drive commands without argument
//! parsing; flag/config-file merging happens in the binary.

pub mod certify;
pub mod gen_data;
pub mod hp_sweep;
pub mod noise_sweep;
pub mod reports;
pub mod train;

use std::path::Path;

use crate::analysis::RunPoint;
use crate::error::{CliError, CliResult};
use crate::formats::{read_journal, SweepRecord};

/// Which robustness metric an analysis runs over.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    /// Certified-area geometric mean.
    Cagm,
    /// Mean certified semi-axis.
    SemiAxisAvg,
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Cagm => "cagm",
            MetricKind::SemiAxisAvg => "semi_axis_avg",
        }
    }
}

/// Loads the completed records of a sweep journal as analysis points.
pub fn journal_run_points(path: &Path, metric: MetricKind) -> CliResult<Vec<RunPoint>> {
    let records = read_journal(path)?;
    let points: Vec<RunPoint> = records
        .iter()
        .filter_map(|r| completed_point(r, metric))
        .collect();
    if points.is_empty() {
        return Err(CliError::Config(format!(
            "{}: no completed runs in journal",
            path.display()
        )));
    }
    Ok(points)
}

fn completed_point(record: &SweepRecord, metric: MetricKind) -> Option<RunPoint> {
    if record.status != "completed" {
        return None;
    }
    let metrics = record.metrics.as_ref()?;
    Some(RunPoint {
        run_id: record.run_id.clone(),
        accuracy: metrics.smoothed_accuracy,
        metric: match metric {
            MetricKind::Cagm => metrics.cagm,
            MetricKind::SemiAxisAvg => metrics.semi_axis_avg,
        },
        semi_axis_std: metrics.semi_axis_std,
    })
}

/// Sample mean and the half-width of a normal-approximation 95% interval
/// (1.96·s/√n with the n−1 sample standard deviation).
pub fn mean_and_ci95(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
    (mean, 1.96 * (var / n as f64).sqrt())
}
