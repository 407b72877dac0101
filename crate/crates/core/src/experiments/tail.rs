//! Upper tail of the scaled maximal label of a uniform embedded tree with
//! root label 0.

use serde::Serialize;

use super::stats::{linear_fit, wilson_interval};
use super::summary::{CsvSink, ExperimentOutput, RunSummary};
use super::{sample_rng, sample_seed, Executor, ExperimentConfig};
use crate::error::{Error, Result};
use crate::labelled::sample_embedded;
use crate::scaling::{label_constant, label_scale};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailRow {
    pub n: usize,
    pub y: f64,
    /// Fraction of samples with `sup Ŵ > (8/9)^{1/4} y`.
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub exp_minus_y: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TailSize {
    pub n: usize,
    pub rows: Vec<TailRow>,
    /// Least-squares slope of `ln p̂` against `y` over `y ∈ [2, 5]`, using
    /// the points with `p̂ > 0`. Reported only.
    pub log_slope: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TailReport {
    pub sizes: Vec<TailSize>,
}

pub fn tail_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput<TailReport>> {
    cfg.validate()?;
    let ys = cfg.y_grid();
    let mut csv = CsvSink::create(
        cfg.output.as_deref(),
        "tail.csv",
        "n,y,p_hat,ci_lo,ci_hi,exp_minus_y",
    )?;
    let exec = Executor::new(cfg.jobs);
    let mut sizes = Vec::new();
    for &n in &cfg.sizes {
        if n == 0 {
            return Err(Error::Config("sizes must be positive".into()));
        }
        let scale = label_scale(n);
        let mut exceed = vec![0u64; ys.len()];
        exec.run(
            cfg.samples,
            |i| {
                let mut rng = sample_rng(sample_seed(cfg.seed, n, i));
                let u = sample_embedded(n, 0, &mut rng);
                Ok(u.labels().into_iter().max().unwrap_or(0))
            },
            |_, max| {
                let sup = max as f64 / scale;
                for (c, &y) in exceed.iter_mut().zip(&ys) {
                    *c += (sup > label_constant() * y) as u64;
                }
                Ok(())
            },
        )?;
        let rows: Vec<TailRow> = ys
            .iter()
            .zip(&exceed)
            .map(|(&y, &k)| {
                let (ci_lo, ci_hi) = wilson_interval(k, cfg.samples as u64, 3.0);
                TailRow {
                    n,
                    y,
                    p_hat: k as f64 / cfg.samples as f64,
                    ci_lo,
                    ci_hi,
                    exp_minus_y: (-y).exp(),
                }
            })
            .collect();
        // Nested events: the tail cannot increase along an increasing grid.
        let mut order: Vec<usize> = (0..ys.len()).collect();
        order.sort_by(|&a, &b| ys[a].total_cmp(&ys[b]));
        if order
            .windows(2)
            .any(|w| rows[w[0]].p_hat < rows[w[1]].p_hat)
        {
            return Err(Error::SampleFailure {
                n,
                index: cfg.samples,
                seed: cfg.seed,
                message: "empirical tail is not monotone in y".into(),
            });
        }
        for r in &rows {
            csv.row(&format!(
                "{},{},{},{},{},{}",
                r.n, r.y, r.p_hat, r.ci_lo, r.ci_hi, r.exp_minus_y
            ))?;
        }
        let (fx, fy): (Vec<f64>, Vec<f64>) = rows
            .iter()
            .filter(|r| (2.0..=5.0).contains(&r.y) && r.p_hat > 0.0)
            .map(|r| (r.y, r.p_hat.ln()))
            .unzip();
        sizes.push(TailSize {
            n,
            rows,
            log_slope: linear_fit(&fx, &fy).map(|(slope, _)| slope),
        });
    }
    let csvs = vec![csv.finish()?];
    let report = TailReport { sizes };
    let summary = RunSummary::new(
        "tail",
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
