//! `gen-data`: labelled ground-state datasets for the cluster Hamiltonian.

use std::path::PathBuf;

use rayon::prelude::*;

use certiq_core::cluster::{draw_couplings, solve_sample, Sample, SplitKind};
use certiq_core::rng::StreamFactory;

use crate::error::CliResult;
use crate::formats::{load_boundary, write_dataset};

#[derive(Debug, Clone)]
pub struct GenDataOpts {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub qubits: usize,
    pub train: usize,
    pub test: usize,
    /// Phase-boundary spec file; the embedded ground truth when `None`.
    pub boundary: Option<PathBuf>,
}

pub fn run(opts: &GenDataOpts) -> CliResult<()> {
    let (boundary, spec_hash) = load_boundary(opts.boundary.as_deref())?;
    let factory = StreamFactory::new(opts.seed);

    let train_couplings = draw_couplings(&factory, SplitKind::Train, opts.train, &[]);
    let test_couplings = draw_couplings(&factory, SplitKind::Test, opts.test, &train_couplings);

    let solve_split = |kind: SplitKind, couplings: &[(f64, f64)]| -> CliResult<Vec<Sample>> {
        let samples = couplings
            .par_iter()
            .enumerate()
            .map(|(i, &(j1, j2))| {
                solve_sample(opts.qubits, j1, j2, &boundary, &factory, kind, i as u64)
            })
            .collect::<Result<Vec<Sample>, _>>()?;
        Ok(samples)
    };

    let train_samples = solve_split(SplitKind::Train, &train_couplings)?;
    let test_samples = solve_split(SplitKind::Test, &test_couplings)?;

    let train_path = opts.out_dir.join("train.jsonl");
    let test_path = opts.out_dir.join("test.jsonl");
    write_dataset(&train_path, "train", opts.seed, &spec_hash, &train_samples)?;
    write_dataset(&test_path, "test", opts.seed, &spec_hash, &test_samples)?;

    let class_count = boundary.class_count();
    let histogram = |samples: &[Sample]| -> Vec<usize> {
        let mut counts = vec![0usize; class_count];
        for s in samples {
            counts[s.label] += 1;
        }
        counts
    };
    println!(
        "gen-data: {} qubits, seed {}, boundary {}",
        opts.qubits, opts.seed, spec_hash
    );
    println!(
        "  train: {} samples, labels {:?} -> {}",
        train_samples.len(),
        histogram(&train_samples),
        train_path.display()
    );
    println!(
        "  test:  {} samples, labels {:?} -> {}",
        test_samples.len(),
        histogram(&test_samples),
        test_path.display()
    );
    Ok(())
}
