//! Radius and profile of uniform quadrangulations, sampled through the
//! coupled pair (well-labelled tree, embedded tree).

use std::collections::BTreeMap;

use serde::Serialize;

use super::stats::{moments, Moments};
use super::summary::{CsvSink, ExperimentOutput, RunSummary};
use super::{sample_rng, sample_seed, Executor, ExperimentConfig};
use crate::blossom::{check_coupling, sample_well_labelled_coupled};
use crate::cvs::tree_to_quad;
use crate::error::{Error, Result};
use crate::scaling::{label_scale, radius_scale};

/// One row of `radius.csv`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadiusSample {
    pub n: usize,
    pub seed: u64,
    /// Radius of the quadrangulation seen from its root vertex.
    pub r: u64,
    /// Smallest label of the embedded tree.
    pub m: i64,
    /// Largest label of the embedded tree.
    #[serde(rename = "M")]
    pub max: i64,
    /// Largest label of the well-labelled tree.
    pub mu: i64,
    /// `n^{-1/4} r`.
    pub scaled: f64,
}

impl RadiusSample {
    pub const HEADER: &'static str = "n,seed,r,m,M,mu,scaled";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.n, self.seed, self.r, self.m, self.max, self.mu, self.scaled
        )
    }
}

/// Observables of one sample: the radius row and the scaled profile
/// `F_n(x) = λ̂_{⌊(8n/9)^{1/4} x⌋} / (n + 1)` on `grid`.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    pub radius: RadiusSample,
    pub profile: Vec<f64>,
}

/// Draws sample `index` at size `n`, builds its quadrangulation and checks
/// `r = μ`, the coupling inequalities and the profile identity.
pub fn sample_observation(
    n: usize,
    master: u64,
    index: usize,
    grid: &[f64],
) -> Result<Observation> {
    let seed = sample_seed(master, n, index);
    let fail = |message: String| Error::SampleFailure {
        n,
        index,
        seed,
        message,
    };
    let mut rng = sample_rng(seed);
    let pair = sample_well_labelled_coupled(n, &mut rng);
    let well = pair.well.label_distribution();
    let embedded = pair.embedded.label_distribution();
    let violations = check_coupling(&well, &embedded);
    if !violations.is_empty() {
        return Err(fail(format!("coupling violated: {violations:?}")));
    }
    let q = tree_to_quad(&pair.well)?;
    let profile = q.map().profile();
    if profile.counts != well.counts() {
        return Err(fail(
            "BFS profile differs from the label distribution".into(),
        ));
    }
    let r = profile.radius() as u64;
    let mu = well.max_label();
    if r != mu as u64 {
        return Err(fail(format!(
            "radius {r} differs from the maximal label {mu}"
        )));
    }
    let scale = label_scale(n);
    let total = (n + 1) as f64;
    let cumulative = well.cumulative_vec();
    let f = grid
        .iter()
        .map(|&x| {
            let k = (scale * x).floor();
            // cumulative[j] counts labels ≤ j + 1.
            let c = if k < 1.0 {
                0
            } else {
                cumulative[(k as usize - 1).min(cumulative.len() - 1)]
            };
            c as f64 / total
        })
        .collect();
    Ok(Observation {
        radius: RadiusSample {
            n,
            seed,
            r,
            m: embedded.min_label(),
            max: embedded.max_label(),
            mu,
            scaled: r as f64 / radius_scale(n),
        },
        profile: f,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SizeReport {
    pub n: usize,
    pub samples: usize,
    /// Moments of `n^{-1/4} r_n`.
    pub scaled: Moments,
    /// Number of samples per radius value.
    pub radius_counts: BTreeMap<u64, u64>,
    /// Largest `|μ − (M − m)|` seen.
    pub max_width_gap: i64,
    /// Per-sample `n^{-1/4} r_n` in sample order.
    #[serde(skip)]
    pub scaled_values: Vec<f64>,
    /// Averaged `F_n` on the grid.
    pub profile: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingReport {
    pub grid: Vec<f64>,
    pub sizes: Vec<SizeReport>,
}

impl ScalingReport {
    pub fn size(&self, n: usize) -> Option<&SizeReport> {
        self.sizes.iter().find(|s| s.n == n)
    }
}

/// Which CSVs a scaling run writes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Outputs {
    Radius,
    Profile,
}

pub fn radius_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput<ScalingReport>> {
    run(cfg, Outputs::Radius)
}

pub fn profile_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput<ScalingReport>> {
    run(cfg, Outputs::Profile)
}

fn run(cfg: &ExperimentConfig, outputs: Outputs) -> Result<ExperimentOutput<ScalingReport>> {
    cfg.validate()?;
    let dir = cfg.output.as_deref();
    let grid = cfg.x_grid();
    let mut radius_csv = match outputs {
        Outputs::Radius => Some(CsvSink::create(dir, "radius.csv", RadiusSample::HEADER)?),
        Outputs::Profile => None,
    };
    let mut profile_csv = match outputs {
        Outputs::Profile => Some(CsvSink::create(dir, "profile.csv", "n,x,F")?),
        Outputs::Radius => None,
    };
    let mut sample_csv = match outputs {
        Outputs::Profile if cfg.per_sample => {
            Some(CsvSink::create(dir, "profile_samples.csv", "n,seed,x,F")?)
        }
        _ => None,
    };
    let exec = Executor::new(cfg.jobs);
    let mut sizes = Vec::with_capacity(cfg.sizes.len());
    for &n in &cfg.sizes {
        if n == 0 {
            return Err(Error::Config("sizes must be positive".into()));
        }
        let mut scaled_values = Vec::with_capacity(cfg.samples);
        let mut radius_counts = BTreeMap::new();
        let mut max_width_gap = 0;
        let mut profile_sum = vec![0.0; grid.len()];
        exec.run(
            cfg.samples,
            |i| sample_observation(n, cfg.seed, i, &grid),
            |_, obs| {
                let r = &obs.radius;
                if let Some(csv) = &mut radius_csv {
                    csv.row(&r.csv_row())?;
                }
                if let Some(csv) = &mut sample_csv {
                    for (x, f) in grid.iter().zip(&obs.profile) {
                        csv.row(&format!("{n},{},{x},{f}", r.seed))?;
                    }
                }
                scaled_values.push(r.scaled);
                *radius_counts.entry(r.r).or_insert(0) += 1;
                max_width_gap = max_width_gap.max((r.mu - (r.max - r.m)).abs());
                for (acc, f) in profile_sum.iter_mut().zip(&obs.profile) {
                    *acc += f;
                }
                Ok(())
            },
        )?;
        let profile: Vec<f64> = profile_sum.iter().map(|s| s / cfg.samples as f64).collect();
        if let Some(csv) = &mut profile_csv {
            for (x, f) in grid.iter().zip(&profile) {
                csv.row(&format!("{n},{x},{f}"))?;
            }
        }
        sizes.push(SizeReport {
            n,
            samples: cfg.samples,
            scaled: moments(&scaled_values),
            radius_counts,
            max_width_gap,
            scaled_values,
            profile,
        });
    }
    let csvs = [radius_csv, profile_csv, sample_csv]
        .into_iter()
        .flatten()
        .map(CsvSink::finish)
        .collect::<Result<Vec<_>>>()?;
    let report = ScalingReport { grid, sizes };
    let name = match outputs {
        Outputs::Radius => "radius",
        Outputs::Profile => "profile",
    };
    let summary = RunSummary::new(
        name,
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
