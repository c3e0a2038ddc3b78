//! `frontier` and `correlation`: analyses over a sweep journal.

use std::path::PathBuf;

use serde::Serialize;

use crate::analysis::{correlation_extract, frontier_extract, LinearFit};
use crate::commands::{journal_run_points, MetricKind};
use crate::error::{CliError, CliResult};
use crate::formats::{write_string, FORMAT_VERSION};

#[derive(Debug, Clone)]
pub struct FrontierOpts {
    pub journal: PathBuf,
    pub metric: MetricKind,
    pub bin_width: f64,
    pub csv_out: PathBuf,
    pub fit_out: PathBuf,
}

#[derive(Serialize)]
struct FitFile {
    version: u32,
    kind: String,
    metric: String,
    /// Slope/intercept are `null` when the fit is undefined (fewer than
    /// two points, or zero spread in the x coordinate).
    slope: Option<f64>,
    intercept: Option<f64>,
    points: usize,
}

fn fit_fields(fit: &Option<LinearFit>) -> (Option<f64>, Option<f64>) {
    match fit {
        Some(f) => (Some(f.slope), Some(f.intercept)),
        None => (None, None),
    }
}

pub fn run_frontier(opts: &FrontierOpts) -> CliResult<()> {
    let points = journal_run_points(&opts.journal, opts.metric)?;
    if points.len() < 2 {
        return Err(CliError::Config(format!(
            "{}: frontier needs at least 2 completed runs, found {}",
            opts.journal.display(),
            points.len()
        )));
    }
    let (frontier, fit) = frontier_extract(&points, opts.bin_width)?;

    let mut csv = String::from("bin,bin_center,accuracy,metric,run_id\n");
    for p in &frontier {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            p.bin, p.bin_center, p.accuracy, p.metric, p.run_id
        ));
    }
    write_string(&opts.csv_out, &csv)?;

    let (slope, intercept) = fit_fields(&fit);
    let fit_file = FitFile {
        version: FORMAT_VERSION,
        kind: "frontier_fit".to_string(),
        metric: opts.metric.name().to_string(),
        slope,
        intercept,
        points: frontier.len(),
    };
    let mut text = serde_json::to_string_pretty(&fit_file)?;
    text.push('\n');
    write_string(&opts.fit_out, &text)?;

    println!(
        "frontier: {} completed runs -> {} frontier points (metric {})",
        points.len(),
        frontier.len(),
        opts.metric.name()
    );
    match fit {
        Some(f) => println!("  fit: slope {}, intercept {}", f.slope, f.intercept),
        None => println!("  fit: undefined (single accuracy bin)"),
    }
    println!("  points -> {}", opts.csv_out.display());
    println!("  fit -> {}", opts.fit_out.display());
    Ok(())
}

#[derive(Debug, Clone)]
pub struct CorrelationOpts {
    pub journal: PathBuf,
    pub metric: MetricKind,
    /// Bin width used to derive the default accuracy cutoff from the
    /// frontier.
    pub bin_width: f64,
    /// Explicit accuracy cutoff; the frontier's minimum accuracy if absent.
    pub min_accuracy: Option<f64>,
    pub bins: usize,
    pub csv_out: PathBuf,
    pub fit_out: PathBuf,
}

#[derive(Serialize)]
struct CorrelationFitFile {
    version: u32,
    kind: String,
    metric: String,
    min_accuracy: f64,
    records_used: usize,
    slope: Option<f64>,
    intercept: Option<f64>,
}

pub fn run_correlation(opts: &CorrelationOpts) -> CliResult<()> {
    let points = journal_run_points(&opts.journal, opts.metric)?;
    let min_accuracy = match opts.min_accuracy {
        Some(value) => value,
        None => {
            let (frontier, _) = frontier_extract(&points, opts.bin_width)?;
            frontier
                .iter()
                .map(|p| p.accuracy)
                .fold(f64::INFINITY, f64::min)
        }
    };
    let result = correlation_extract(&points, min_accuracy, opts.bins)?;

    let mut csv = String::from("metric_center,count,semi_axis_std_mean,semi_axis_std_std\n");
    for bin in &result.bins {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            bin.metric_center, bin.count, bin.semi_axis_std_mean, bin.semi_axis_std_std
        ));
    }
    write_string(&opts.csv_out, &csv)?;

    let (slope, intercept) = fit_fields(&result.fit);
    let fit_file = CorrelationFitFile {
        version: FORMAT_VERSION,
        kind: "correlation_fit".to_string(),
        metric: opts.metric.name().to_string(),
        min_accuracy,
        records_used: result.records_used,
        slope,
        intercept,
    };
    let mut text = serde_json::to_string_pretty(&fit_file)?;
    text.push('\n');
    write_string(&opts.fit_out, &text)?;

    println!(
        "correlation: {} records above accuracy {} in {} bins (metric {})",
        result.records_used,
        min_accuracy,
        result.bins.len(),
        opts.metric.name()
    );
    match result.fit {
        Some(f) => println!("  fit: slope {}, intercept {}", f.slope, f.intercept),
        None => println!("  fit: undefined"),
    }
    println!("  bins -> {}", opts.csv_out.display());
    println!("  fit -> {}", opts.fit_out.display());
    Ok(())
}
