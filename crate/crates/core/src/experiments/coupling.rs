//! Coupling inequalities between the two trees of a conjugate pair, and the
//! probability that a uniform embedded tree is already well labelled.

use std::collections::HashMap;

use serde::Serialize;

use super::stats::{chi_square, wilson_interval, ChiSquare};
use super::summary::{CsvSink, ExperimentOutput, RunSummary};
use super::{sample_rng, sample_seed, Executor, ExperimentConfig};
use crate::blossom::{check_coupling, sample_well_labelled_coupled};
use crate::enumeration::enumerate_well_labelled;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CouplingRow {
    pub n: usize,
    pub samples: usize,
    /// Embedded trees with all labels positive.
    pub well_labelled: u64,
    pub p_hat: f64,
    /// Wilson interval at three standard deviations.
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// `2 / (n + 2)`.
    pub expected: f64,
    /// `(p̂ − p) / σ` with `σ² = p(1 − p) / samples`.
    pub z: f64,
}

impl CouplingRow {
    pub const HEADER: &'static str = "n,samples,well_labelled,p_hat,ci_lo,ci_hi,expected,z";

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.n,
            self.samples,
            self.well_labelled,
            self.p_hat,
            self.ci_lo,
            self.ci_hi,
            self.expected,
            self.z
        )
    }

    /// The estimate lies within three standard deviations of `2 / (n + 2)`.
    pub fn within_three_sigma(&self) -> bool {
        self.z.abs() <= 3.0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CouplingReport {
    pub rows: Vec<CouplingRow>,
    /// Pairs checked; any inequality violation aborts the run instead.
    pub pairs_checked: u64,
}

/// Draws coupled pairs at every size, fails on the first pair breaking
/// `Λ̂_{k−2} ≤ λ̂_k ≤ Λ̂_{k+2}` or `|μ − (M − m)| ≤ 3`, and estimates
/// `P(U_n ∈ W_n)`.
pub fn coupling_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput<CouplingReport>> {
    cfg.validate()?;
    let mut csv = CsvSink::create(cfg.output.as_deref(), "coupling.csv", CouplingRow::HEADER)?;
    let exec = Executor::new(cfg.jobs);
    let mut rows = Vec::new();
    let mut pairs_checked = 0u64;
    for &n in &cfg.sizes {
        let mut hits = 0u64;
        exec.run(
            cfg.samples,
            |i| {
                let seed = sample_seed(cfg.seed, n, i);
                let pair = sample_well_labelled_coupled(n, &mut sample_rng(seed));
                let violations = check_coupling(
                    &pair.well.label_distribution(),
                    &pair.embedded.label_distribution(),
                );
                if !violations.is_empty() {
                    return Err(Error::SampleFailure {
                        n,
                        index: i,
                        seed,
                        message: format!("coupling violated: {violations:?}"),
                    });
                }
                Ok(pair.embedded.labels().iter().all(|&l| l >= 1))
            },
            |_, positive| {
                hits += positive as u64;
                pairs_checked += 1;
                Ok(())
            },
        )?;
        let samples = cfg.samples as f64;
        let p = 2.0 / (n as f64 + 2.0);
        let p_hat = hits as f64 / samples;
        let (ci_lo, ci_hi) = wilson_interval(hits, cfg.samples as u64, 3.0);
        let row = CouplingRow {
            n,
            samples: cfg.samples,
            well_labelled: hits,
            p_hat,
            ci_lo,
            ci_hi,
            expected: p,
            z: (p_hat - p) / (p * (1.0 - p) / samples).sqrt(),
        };
        csv.row(&row.csv_row())?;
        rows.push(row);
    }
    let csvs = vec![csv.finish()?];
    let report = CouplingReport {
        rows,
        pairs_checked,
    };
    let summary = RunSummary::new(
        "coupling",
        cfg,
        &csvs,
        serde_json::to_value(&report).expect("report serializes"),
    );
    summary.write()?;
    Ok(ExperimentOutput {
        summary,
        csvs,
        report,
    })
}

/// Chi-square test of the coupled sampler's output against the uniform law
/// on all well-labelled trees with `n` edges.
pub fn well_labelled_uniformity(
    n: usize,
    draws: usize,
    seed: u64,
    jobs: usize,
) -> Result<ChiSquare> {
    let index: HashMap<String, usize> = enumerate_well_labelled(n)?
        .enumerate()
        .map(|(i, t)| (t.to_string(), i))
        .collect();
    let mut observed = vec![0u64; index.len()];
    Executor::new(jobs).run(
        draws,
        |i| {
            let pair = sample_well_labelled_coupled(n, &mut sample_rng(sample_seed(seed, n, i)));
            Ok(index[&pair.well.to_string()])
        },
        |_, cell| {
            observed[cell] += 1;
            Ok(())
        },
    )?;
    let expected = vec![draws as f64 / index.len() as f64; index.len()];
    Ok(chi_square(&observed, &expected, 0))
}
