//! Goodness of fit of the scaled contour at one or two fixed times against
//! the limit density `ζ`.
//!
//! With one time the height `e(τ)` of a uniform Dyck path is histogrammed
//! and compared with exact lattice sums of the local limit
//! `P(H = h) ≈ (2n)^{-1/2} ζ(h / √(2n))` over heights of the right parity.
//! The label at that time is a sum of `H` independent uniform increments
//! in `{-1, 0, 1}`, so `E[Ŵ(τ)² | e(τ) = x] = x`; the ratio of the sample
//! means of `Ŵ²` and `e` is reported.
//!
//! With two times the triple `(x_1, x_2, m)` is histogrammed against
//! `ζ / 4` integrated over each cell (the lattice of the minimum is twice as
//! fine as that of the heights), and every sample's shape is extracted
//! to check its matrix against the measured coordinates and to record how
//! often the shape is binary.

use rand::Rng;
use serde::Serialize;

use super::densities::{zeta, zeta_minima_integral};
use super::stats::{chi_square, ChiSquare};
use super::summary::{CsvSink, ExperimentOutput, RunSummary};
use super::{sample_rng, sample_seed, Executor, ExperimentConfig};
use crate::error::{Error, Result};
use crate::scaling::{height_scale, label_scale};
use crate::trees::{dyck_to_tree, extract_shape, sample_dyck_path, shape_matrix, ShapeCoordinate};

/// Cells with a smaller expected count are pooled into the outside cell
/// before the chi-square statistic is formed.
const MIN_EXPECTED: f64 = 5.0;

/// Subdivisions per height axis of the midpoint rule used for two-time
/// cells.
const SUBDIVISIONS: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FidisSize {
    pub n: usize,
    pub samples: usize,
    /// Contour times actually used, `⌊2nτ⌋`.
    pub times: Vec<usize>,
    pub chi_square: ChiSquare,
    /// Cells entering the statistic after pooling, outside cell included.
    pub cells: usize,
    /// Samples landing inside the histogram window.
    pub in_window: u64,
    /// Mean of `Ŵ(τ)²` over mean of `e(τ)`, one time only.
    pub variance_ratio: Option<f64>,
    /// Fraction of binary shapes, two times only.
    pub binary_fraction: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FidisReport {
    pub tau: Vec<f64>,
    pub bins: usize,
    pub window: [f64; 2],
    pub sizes: Vec<FidisSize>,
}

/// Heights at the chosen times, the minimum between them, a label at the
/// first time and whether the shape is binary.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Draw {
    heights: [i64; 2],
    min: i64,
    label: i64,
    binary: bool,
}

fn contour_times(n: usize, tau: &[f64]) -> Result<Vec<usize>> {
    let times: Vec<usize> = tau
        .iter()
        .map(|&t| ((2 * n) as f64 * t).floor() as usize)
        .collect();
    if times.iter().any(|&t| t == 0 || t >= 2 * n) || times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!(
            "n = {n} is too small to separate the times {tau:?}"
        )));
    }
    Ok(times)
}

fn draw(n: usize, times: &[usize], seed: u64, index: usize) -> Result<Draw> {
    let mut rng = sample_rng(seed);
    let path = sample_dyck_path(n, &mut rng);
    let steps = path.steps();
    let h1: i64 = steps[..times[0]].iter().map(|&s| s as i64).sum();
    if times.len() == 1 {
        let label = (0..h1).map(|_| rng.random_range(-1i64..=1)).sum();
        return Ok(Draw {
            heights: [h1, 0],
            min: 0,
            label,
            binary: true,
        });
    }
    let mut h = h1;
    let mut min = h1;
    for &s in &steps[times[0]..times[1]] {
        h += s as i64;
        min = min.min(h);
    }
    let h2 = h;
    let tree = dyck_to_tree(&path)?;
    let shape = extract_shape(&tree, times)?;
    let binary = shape.is_binary();
    let fail = |message: String| Error::SampleFailure {
        n,
        index,
        seed,
        message,
    };
    if binary != (0 < min && min < h1.min(h2)) {
        return Err(fail(format!(
            "binary = {binary} disagrees with heights ({h1}, {h2}) and minimum {min}"
        )));
    }
    if binary {
        let matrix = shape_matrix(&shape)?;
        let lengths: Vec<i64> = shape.edges.iter().map(|e| e.length as i64).collect();
        for (value, coordinate) in matrix.apply(&lengths).into_iter().zip(&matrix.coordinates) {
            let expected = match *coordinate {
                ShapeCoordinate::Height(i) => [h1, h2][i],
                ShapeCoordinate::Minimum(_) => min,
            };
            if value != expected {
                return Err(fail(format!(
                    "shape matrix gives {value} for {coordinate:?}, contour gives {expected}"
                )));
            }
        }
    }
    Ok(Draw {
        heights: [h1, h2],
        min,
        label: 0,
        binary,
    })
}

fn bin_of(v: f64, lo: f64, hi: f64, bins: usize) -> Option<usize> {
    if v < lo || v >= hi {
        return None;
    }
    Some(
        (((v - lo) / (hi - lo)) * bins as f64)
            .floor()
            .min((bins - 1) as f64) as usize,
    )
}

/// Cell probabilities for one time: exact sums of the local limit over the
/// lattice heights of the parity of `t`.
fn expected_one(n: usize, t: usize, window: [f64; 2], bins: usize) -> Result<Vec<f64>> {
    let scale = height_scale(n);
    let tau = t as f64 / (2 * n) as f64;
    let mut probs = vec![0.0; bins];
    let top = t.min(2 * n - t) as i64;
    let mut h = (t % 2) as i64;
    while h <= top {
        let x = h as f64 / scale;
        if let Some(j) = bin_of(x, window[0], window[1], bins) {
            probs[j] += zeta(&[x], &[], &[tau])? / scale;
        }
        h += 2;
    }
    Ok(probs)
}

/// Cell probabilities for two times: `ζ / 4` over each cell of
/// `[lo, hi)² × [0, hi)`, exact in the minimum and by a midpoint rule in the
/// two heights.
fn expected_two(n: usize, times: &[usize], window: [f64; 2], bins: usize) -> Result<Vec<f64>> {
    let tau: Vec<f64> = times.iter().map(|&t| t as f64 / (2 * n) as f64).collect();
    let [lo, hi] = window;
    let wx = (hi - lo) / bins as f64;
    let wm = hi / bins as f64;
    let s = SUBDIVISIONS;
    let offsets: Vec<f64> = (0..s).map(|k| (k as f64 + 0.5) / s as f64).collect();
    let weight = wx * wx / (s * s) as f64 / 4.0;
    let mut probs = vec![0.0; bins * bins * bins];
    for i1 in 0..bins {
        for i2 in 0..bins {
            for im in 0..bins {
                let range = [im as f64 * wm, (im + 1) as f64 * wm];
                let mut acc = 0.0;
                for a in &offsets {
                    let x1 = lo + (i1 as f64 + a) * wx;
                    for b in &offsets {
                        let x2 = lo + (i2 as f64 + b) * wx;
                        acc += zeta_minima_integral(&[x1, x2], &[range], &tau)?;
                    }
                }
                probs[(i1 * bins + i2) * bins + im] = acc * weight;
            }
        }
    }
    Ok(probs)
}

/// Pools cells with small expectation into the outside cell and runs the
/// chi-square test.
fn pooled_test(observed: &[u64], probs: &[f64], samples: usize) -> (ChiSquare, usize) {
    let total = samples as f64;
    let mut obs = Vec::new();
    let mut exp = Vec::new();
    let mut outside_obs = samples as u64 - observed.iter().sum::<u64>();
    let mut outside_exp = total * (1.0 - probs.iter().sum::<f64>()).max(0.0);
    for (&o, &p) in observed.iter().zip(probs) {
        if p * total < MIN_EXPECTED {
            outside_obs += o;
            outside_exp += p * total;
        } else {
            obs.push(o);
            exp.push(p * total);
        }
    }
    obs.push(outside_obs);
    exp.push(outside_exp);
    let cells = obs.len();
    (chi_square(&obs, &exp, 0), cells)
}

pub fn fidis_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput<FidisReport>> {
    cfg.validate()?;
    let tau = cfg.tau();
    if tau.len() > 2 {
        return Err(Error::Config("`tau` may hold one or two times".into()));
    }
    let bins = cfg.bins();
    let window = cfg.window();
    if tau.len() == 2 && window[0] < 0.0 {
        return Err(Error::Config("the window must be nonnegative".into()));
    }
    let mut csv = CsvSink::create(
        cfg.output.as_deref(),
        "fidis.csv",
        "n,cell,observed,expected",
    )?;
    let exec = Executor::new(cfg.jobs);
    let mut sizes = Vec::new();
    for &n in &cfg.sizes {
        let times = contour_times(n, &tau)?;
        let scale = height_scale(n);
        let cell_count = if tau.len() == 1 {
            bins
        } else {
            bins * bins * bins
        };
        let mut observed = vec![0u64; cell_count];
        let mut sum_w2 = 0.0;
        let mut sum_x = 0.0;
        let mut binary = 0u64;
        exec.run(
            cfg.samples,
            |i| draw(n, &times, sample_seed(cfg.seed, n, i), i),
            |_, d| {
                let x1 = d.heights[0] as f64 / scale;
                let cell = if tau.len() == 1 {
                    let w = d.label as f64 / label_scale(n);
                    sum_w2 += w * w;
                    sum_x += x1;
                    bin_of(x1, window[0], window[1], bins)
                } else {
                    binary += d.binary as u64;
                    let x2 = d.heights[1] as f64 / scale;
                    let m = d.min as f64 / scale;
                    match (
                        bin_of(x1, window[0], window[1], bins),
                        bin_of(x2, window[0], window[1], bins),
                        bin_of(m, 0.0, window[1], bins),
                    ) {
                        (Some(a), Some(b), Some(c)) => Some((a * bins + b) * bins + c),
                        _ => None,
                    }
                };
                if let Some(c) = cell {
                    observed[c] += 1;
                }
                Ok(())
            },
        )?;
        let probs = if tau.len() == 1 {
            expected_one(n, times[0], window, bins)?
        } else {
            expected_two(n, &times, window, bins)?
        };
        let total = cfg.samples as f64;
        for (c, (&o, &p)) in observed.iter().zip(&probs).enumerate() {
            csv.row(&format!("{n},{c},{o},{}", p * total))?;
        }
        let in_window = observed.iter().sum::<u64>();
        csv.row(&format!(
            "{n},outside,{},{}",
            cfg.samples as u64 - in_window,
            total * (1.0 - probs.iter().sum::<f64>()).max(0.0)
        ))?;
        let (chi, cells) = pooled_test(&observed, &probs, cfg.samples);
        sizes.push(FidisSize {
            n,
            samples: cfg.samples,
            times,
            chi_square: chi,
            cells,
            in_window,
            variance_ratio: (tau.len() == 1 && sum_x > 0.0).then(|| sum_w2 / sum_x),
            binary_fraction: (tau.len() == 2).then(|| binary as f64 / total),
        });
    }
    let csvs = vec![csv.finish()?];
    let report = FidisReport {
        tau,
        bins,
        window,
        sizes,
    };
    let summary = RunSummary::new(
        "fidis",
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
