//! Frontier and correlation extraction over completed sweep records.
//!
//! Pure functions over `(accuracy, metric, semi_axis_std)` triples so the
//! numerics are testable with synthetic data, independent of journal I/O.

use crate::error::{CliError, CliResult};

/// One completed run projected onto the quantities the analyses use.
#[derive(Debug, Clone, PartialEq)]
pub struct RunPoint {
    pub run_id: String,
    /// Smoothed accuracy of the run.
    pub accuracy: f64,
    /// The chosen robustness metric (CAGM or semi-axis average).
    pub metric: f64,
    /// Mean per-sample standard deviation of the certified semi-axes.
    pub semi_axis_std: f64,
}

/// Slope/intercept of a least-squares line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
}

/// Ordinary least squares; `None` when fewer than two points or all `x`
/// coincide (vertical data has no well-defined line).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some(LinearFit {
        slope,
        intercept: mean_y - slope * mean_x,
    })
}

/// One frontier point: the best-metric run of an accuracy bin that is not
/// dominated by any run in a higher-accuracy bin.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontierPoint {
    pub run_id: String,
    /// Index of the accuracy bin (`floor(accuracy / bin_width)`).
    pub bin: i64,
    /// Center of that bin.
    pub bin_center: f64,
    /// The run's actual accuracy.
    pub accuracy: f64,
    /// The bin's best metric value.
    pub metric: f64,
}

/// Bins accuracy at `bin_width`, keeps each bin's max-metric run, then
/// removes points dominated by a higher-accuracy bin's best (so no record
/// with both higher accuracy and a higher metric survives above any
/// emitted point). Points come back sorted by ascending accuracy; the fit
/// is least squares over the emitted points (`x` = accuracy).
pub fn frontier_extract(
    points: &[RunPoint],
    bin_width: f64,
) -> CliResult<(Vec<FrontierPoint>, Option<LinearFit>)> {
    if points.is_empty() {
        return Err(CliError::Config(
            "frontier extraction needs at least one completed record".to_string(),
        ));
    }
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(CliError::Config("bin width must be positive".to_string()));
    }
    for p in points {
        if !(p.accuracy.is_finite() && p.metric.is_finite()) {
            return Err(CliError::Config(format!(
                "record {} has non-finite accuracy or metric",
                p.run_id
            )));
        }
    }

    // Best run per accuracy bin; first occurrence wins ties, keeping the
    // result independent of any parallel journal layout upstream.
    let mut best: Vec<(i64, &RunPoint)> = Vec::new();
    for p in points {
        let bin = (p.accuracy / bin_width).floor() as i64;
        match best.iter_mut().find(|(b, _)| *b == bin) {
            Some(entry) => {
                if p.metric > entry.1.metric {
                    entry.1 = p;
                }
            }
            None => best.push((bin, p)),
        }
    }
    // Highest-accuracy bins first; keep a point only if it strictly beats
    // every better-accuracy point's metric.
    best.sort_by_key(|&(bin, _)| core::cmp::Reverse(bin));
    let mut kept: Vec<FrontierPoint> = Vec::new();
    let mut best_metric_so_far = f64::NEG_INFINITY;
    for (bin, p) in best {
        if p.metric > best_metric_so_far {
            best_metric_so_far = p.metric;
            kept.push(FrontierPoint {
                run_id: p.run_id.clone(),
                bin,
                bin_center: (bin as f64 + 0.5) * bin_width,
                accuracy: p.accuracy,
                metric: p.metric,
            });
        }
    }
    kept.reverse();
    let xs: Vec<f64> = kept.iter().map(|p| p.accuracy).collect();
    let ys: Vec<f64> = kept.iter().map(|p| p.metric).collect();
    let fit = linear_fit(&xs, &ys);
    Ok((kept, fit))
}

/// One metric bin of the correlation analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationBin {
    pub metric_center: f64,
    pub count: usize,
    pub semi_axis_std_mean: f64,
    /// Population standard deviation within the bin.
    pub semi_axis_std_std: f64,
}

/// Result of the correlation analysis: binned means/stds plus a global
/// linear fit of `semi_axis_std` against the metric over the raw
/// (unbinned) filtered records.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationResult {
    pub bins: Vec<CorrelationBin>,
    pub fit: Option<LinearFit>,
    pub records_used: usize,
}

/// Filters records to `accuracy ≥ min_accuracy`, bins them by metric into
/// `n_bins` equal-width bins, and fits a global line.
pub fn correlation_extract(
    points: &[RunPoint],
    min_accuracy: f64,
    n_bins: usize,
) -> CliResult<CorrelationResult> {
    if n_bins == 0 {
        return Err(CliError::Config("bin count must be positive".to_string()));
    }
    let filtered: Vec<&RunPoint> = points
        .iter()
        .filter(|p| p.accuracy >= min_accuracy)
        .collect();
    if filtered.is_empty() {
        return Err(CliError::Config(format!(
            "no records have accuracy >= {min_accuracy}"
        )));
    }
    for p in &filtered {
        if !(p.metric.is_finite() && p.semi_axis_std.is_finite()) {
            return Err(CliError::Config(format!(
                "record {} has non-finite metric or semi-axis spread",
                p.run_id
            )));
        }
    }

    let lo = filtered
        .iter()
        .map(|p| p.metric)
        .fold(f64::INFINITY, f64::min);
    let hi = filtered
        .iter()
        .map(|p| p.metric)
        .fold(f64::NEG_INFINITY, f64::max);
    let (n_bins, width) = if hi == lo {
        (1usize, 1.0)
    } else {
        (n_bins, (hi - lo) / n_bins as f64)
    };

    let mut sums = vec![(0usize, 0.0f64); n_bins];
    for p in &filtered {
        let idx = (((p.metric - lo) / width) as usize).min(n_bins - 1);
        sums[idx].0 += 1;
        sums[idx].1 += p.semi_axis_std;
    }
    let mut sq = vec![0.0f64; n_bins];
    for p in &filtered {
        let idx = (((p.metric - lo) / width) as usize).min(n_bins - 1);
        let mean = sums[idx].1 / sums[idx].0 as f64;
        sq[idx] += (p.semi_axis_std - mean) * (p.semi_axis_std - mean);
    }
    let bins: Vec<CorrelationBin> = sums
        .iter()
        .enumerate()
        .filter(|(_, (count, _))| *count > 0)
        .map(|(i, (count, sum))| CorrelationBin {
            metric_center: if hi == lo {
                lo
            } else {
                lo + (i as f64 + 0.5) * width
            },
            count: *count,
            semi_axis_std_mean: sum / *count as f64,
            semi_axis_std_std: (sq[i] / *count as f64).sqrt(),
        })
        .collect();

    let xs: Vec<f64> = filtered.iter().map(|p| p.metric).collect();
    let ys: Vec<f64> = filtered.iter().map(|p| p.semi_axis_std).collect();
    let fit = linear_fit(&xs, &ys);
    Ok(CorrelationResult {
        bins,
        fit,
        records_used: filtered.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(id: &str, accuracy: f64, metric: f64) -> RunPoint {
        RunPoint {
            run_id: id.to_string(),
            accuracy,
            metric,
            semi_axis_std: 0.0,
        }
    }

    #[test]
    fn fit_recovers_the_unit_line() {
        let fit = linear_fit(&[0.0, 1.0], &[0.0, 1.0]).unwrap();
        assert_eq!(fit.slope, 1.0);
        assert_eq!(fit.intercept, 0.0);
    }

    #[test]
    fn fit_is_undefined_for_degenerate_inputs() {
        assert!(linear_fit(&[1.0], &[2.0]).is_none());
        assert!(linear_fit(&[0.5, 0.5, 0.5], &[1.0, 2.0, 3.0]).is_none());
        assert!(linear_fit(&[], &[]).is_none());
    }

    #[test]
    fn frontier_keeps_the_max_metric_run_per_bin() {
        let points = vec![
            point("a", 0.9, 1.0),
            point("b", 0.9, 2.0),
            point("c", 0.8, 3.0),
        ];
        let (frontier, fit) = frontier_extract(&points, 0.02).unwrap();
        let pairs: Vec<(f64, f64)> = frontier.iter().map(|p| (p.accuracy, p.metric)).collect();
        assert_eq!(pairs, vec![(0.8, 3.0), (0.9, 2.0)]);
        assert_eq!(frontier[0].run_id, "c");
        assert_eq!(frontier[1].run_id, "b");
        assert!(fit.is_some());
    }

    #[test]
    fn frontier_drops_points_dominated_by_a_higher_accuracy_bin() {
        // "b" has higher accuracy *and* higher metric than "a", so "a"
        // must not appear even though it is the best of its own bin.
        let points = vec![point("a", 0.8, 1.0), point("b", 0.9, 3.0)];
        let (frontier, _) = frontier_extract(&points, 0.02).unwrap();
        assert_eq!(frontier.len(), 1);
        assert_eq!(frontier[0].run_id, "b");
    }

    #[test]
    fn single_bin_reports_an_undefined_fit() {
        let points = vec![point("a", 0.85, 1.0), point("b", 0.85, 2.0)];
        let (frontier, fit) = frontier_extract(&points, 0.02).unwrap();
        assert_eq!(frontier.len(), 1);
        assert!(fit.is_none());
    }

    #[test]
    fn frontier_rejects_empty_and_bad_inputs() {
        assert!(frontier_extract(&[], 0.02).is_err());
        assert!(frontier_extract(&[point("a", 0.5, 1.0)], 0.0).is_err());
        assert!(frontier_extract(&[point("a", f64::NAN, 1.0)], 0.02).is_err());
    }

    #[test]
    fn dominance_holds_on_pseudorandom_records() {
        // Deterministic congruential stream; no external RNG needed here.
        let mut state = 0x2545f4914f6cdd1du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let points: Vec<RunPoint> = (0..500)
            .map(|i| point(&format!("r{i}"), 0.5 + 0.5 * next(), 0.02 * next()))
            .collect();
        let (frontier, _) = frontier_extract(&points, 0.02).unwrap();
        assert!(!frontier.is_empty());
        for fp in &frontier {
            let fp_bin = (fp.accuracy / 0.02).floor() as i64;
            for p in &points {
                let p_bin = (p.accuracy / 0.02).floor() as i64;
                let dominates = p_bin >= fp_bin && p.accuracy > fp.accuracy && p.metric > fp.metric;
                // Within the same bin the emitted point carries the max
                // metric, and across bins the Pareto pass removed the rest.
                if p_bin == fp_bin {
                    assert!(p.metric <= fp.metric);
                } else {
                    assert!(!dominates, "{} dominates {}", p.run_id, fp.run_id);
                }
            }
        }
    }

    #[test]
    fn correlation_recovers_an_exact_linear_relation() {
        let points: Vec<RunPoint> = (0..50)
            .map(|i| {
                let metric = 0.001 * (i as f64 + 1.0);
                RunPoint {
                    run_id: format!("r{i}"),
                    accuracy: 0.9,
                    metric,
                    semi_axis_std: 2.0 * metric,
                }
            })
            .collect();
        let result = correlation_extract(&points, 0.5, 8).unwrap();
        let fit = result.fit.unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-9, "slope {}", fit.slope);
        assert!(fit.intercept.abs() < 1e-12);
        assert_eq!(result.records_used, 50);
        assert_eq!(result.bins.iter().map(|b| b.count).sum::<usize>(), 50);
    }

    #[test]
    fn correlation_filters_low_accuracy_runs_and_handles_identical_records() {
        let mut points = vec![
            RunPoint {
                run_id: "low".to_string(),
                accuracy: 0.2,
                metric: 0.01,
                semi_axis_std: 0.5,
            };
            3
        ];
        points.extend(vec![
            RunPoint {
                run_id: "hi".to_string(),
                accuracy: 0.9,
                metric: 0.01,
                semi_axis_std: 0.5,
            };
            4
        ]);
        let result = correlation_extract(&points, 0.5, 8).unwrap();
        assert_eq!(result.records_used, 4);
        assert_eq!(result.bins.len(), 1);
        assert_eq!(result.bins[0].count, 4);
        assert_eq!(result.bins[0].semi_axis_std_mean, 0.5);
        assert_eq!(result.bins[0].semi_axis_std_std, 0.0);
        assert!(result.fit.is_none());

        assert!(correlation_extract(&points, 0.99, 8).is_err());
    }
}
