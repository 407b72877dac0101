//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs every criterion by default; pass criterion numbers as arguments to
//! run a subset, e.g. `cargo test --test acceptance -- 4 5`.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use quadlab::blossom::{conjugacy_class, sample_well_labelled_coupled, BlossomTree};
use quadlab::cvs::{quad_to_tree, tree_to_quad};
use quadlab::enumeration::{enumerate_blossom, enumerate_embedded, exact_counts};
use quadlab::experiments::coupling::{coupling_experiment, well_labelled_uniformity};
use quadlab::experiments::densities::{xi, zeta};
use quadlab::experiments::fidis::fidis_experiment;
use quadlab::experiments::scaling::{profile_experiment, radius_experiment};
use quadlab::experiments::stats::ks_two_sample;
use quadlab::experiments::tail::tail_experiment;
use quadlab::experiments::{sample_rng, sample_seed, Executor, ExperimentConfig};
use quadlab::labelled::WellLabelledTree;
use quadlab::walks::{
    conjugacy_class as walk_class, verify_cycle_lemma, walk_heights, LatticeWalk,
};

const SEED: u64 = 20_240_601;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

/// Criterion 1.
fn exact_counting() -> Outcome {
    let start = Instant::now();
    let mut problems = Vec::new();
    for n in 1..=6usize {
        let c = exact_counts(n as u64);
        let (mut embedded, mut well) = (0u64, 0u64);
        for t in enumerate_embedded(n).expect("n within the guard") {
            embedded += 1;
            if WellLabelledTree::new(t).is_ok() {
                well += 1;
            }
        }
        if BigUint::from(embedded) != c.embedded {
            problems.push(format!(
                "|U_{n}| enumerated {embedded}, formula {}",
                c.embedded
            ));
        }
        if BigUint::from(well) != c.well_labelled {
            problems.push(format!(
                "|W_{n}| enumerated {well}, formula {}",
                c.well_labelled
            ));
        }
        if c.quadrangulations != c.well_labelled {
            problems.push(format!(
                "|Q_{n}| = {} but |W_{n}| = {}",
                c.quadrangulations, c.well_labelled
            ));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(60) {
        problems.push(format!("took {}", secs(elapsed)));
    }
    let passed = problems.is_empty();
    outcome(
        passed,
        if passed {
            format!("n = 1..6 exact, {}", secs(elapsed))
        } else {
            problems.join("; ")
        },
    )
}

/// Counts for criteria 2 and 3, gathered in one pass.
#[derive(Default)]
struct RoundTrips {
    instances: u64,
    round_trip_failures: Vec<String>,
    profile_failures: Vec<String>,
    distinct_ok: bool,
    elapsed: Duration,
}

fn check_instance(w: &WellLabelledTree) -> (Option<String>, Option<String>) {
    let q = match tree_to_quad(w) {
        Ok(q) => q,
        Err(e) => return (Some(format!("Q failed on {w}: {e}")), None),
    };
    let profile = (q.map().profile().counts != w.label_distribution().counts())
        .then(|| format!("profile mismatch on {w}"));
    let trip = match quad_to_tree(&q) {
        Ok(back) if &back == w => match tree_to_quad(&back) {
            Ok(q2) if q2 == q => None,
            _ => Some(format!("Q∘T is not the identity on Q({w})")),
        },
        Ok(back) => Some(format!("T(Q({w})) = {back}")),
        Err(e) => Some(format!("T failed on Q({w}): {e}")),
    };
    (trip, profile)
}

fn round_trips() -> RoundTrips {
    let start = Instant::now();
    let mut out = RoundTrips {
        distinct_ok: true,
        ..Default::default()
    };
    let record = |out: &mut RoundTrips, (trip, profile): (Option<String>, Option<String>)| {
        out.instances += 1;
        out.round_trip_failures.extend(trip);
        out.profile_failures.extend(profile);
    };
    for n in 1..=5usize {
        let mut canonical = HashSet::new();
        for w in quadlab::enumeration::enumerate_well_labelled(n).expect("guard") {
            if let Ok(q) = tree_to_quad(&w) {
                canonical.insert(q.canonical());
            }
            let r = check_instance(&w);
            record(&mut out, r);
        }
        let expected = u64::try_from(exact_counts(n as u64).quadrangulations).unwrap();
        out.distinct_ok &= canonical.len() as u64 == expected;
    }
    let exec = Executor::new(jobs());
    for n in [100usize, 1_000, 10_000] {
        exec.run(
            10_000,
            |i| {
                let seed = sample_seed(SEED, n, i);
                let pair = sample_well_labelled_coupled(n, &mut sample_rng(seed));
                let (trip, profile) = check_instance(&pair.well);
                let tag = |m: String| format!("n={n} seed={seed}: {m}");
                Ok((trip.map(tag), profile.map(tag)))
            },
            |_, r| {
                record(&mut out, r);
                Ok(())
            },
        )
        .expect("no sample errors");
    }
    out.elapsed = start.elapsed();
    out
}

fn first_few(v: &[String]) -> String {
    v.iter().take(3).cloned().collect::<Vec<_>>().join("; ")
}

/// Criterion 2.
fn bijection(r: &RoundTrips) -> Outcome {
    let fast = r.elapsed <= Duration::from_secs(300);
    let passed = r.round_trip_failures.is_empty() && r.distinct_ok && fast;
    let detail = if passed {
        format!(
            "{} instances, zero failures, {}",
            r.instances,
            secs(r.elapsed)
        )
    } else {
        format!(
            "{} failures ({}), distinct images ok: {}, {}",
            r.round_trip_failures.len(),
            first_few(&r.round_trip_failures),
            r.distinct_ok,
            secs(r.elapsed)
        )
    };
    outcome(passed, detail)
}

/// Criterion 3.
fn profile_identity(r: &RoundTrips) -> Outcome {
    let passed = r.profile_failures.is_empty() && r.instances > 0;
    let detail = if passed {
        format!(
            "{} instances, BFS profile = label distribution",
            r.instances
        )
    } else {
        format!(
            "{} mismatches ({})",
            r.profile_failures.len(),
            first_few(&r.profile_failures)
        )
    };
    outcome(passed, detail)
}

/// Walks of `B(n,k)`: `n` up steps, `n + k` down steps, ending with a down step.
fn walks_of_class(n: usize, k: usize) -> Vec<LatticeWalk> {
    let free = 2 * n + k - 1;
    (0u32..1 << free)
        .filter(|m| m.count_ones() as usize == n)
        .map(|m| {
            let mut steps: Vec<i8> = (0..free)
                .map(|i| if m >> i & 1 == 1 { 1 } else { -1 })
                .collect();
            steps.push(-1);
            LatticeWalk::new(steps).expect("±1 steps")
        })
        .collect()
}

/// Criterion 4.
fn cycle_lemma() -> Outcome {
    let mut problems = Vec::new();
    let mut classes = 0usize;
    for n in 0..=4 {
        for k in 1..=3 {
            let report = verify_cycle_lemma(n, k).expect("within the guard");
            classes += report.classes.len();
            if !report.passed() {
                problems.push(format!("cycle lemma fails for n={n}, k={k}"));
            }
        }
    }
    let mut walks = 0usize;
    for len in 1..=16usize {
        for k in (1..=len).filter(|k| (len - k) % 2 == 0) {
            let n = (len - k) / 2;
            let mut done = HashSet::new();
            for w in walks_of_class(n, k) {
                if done.contains(&w) {
                    continue;
                }
                let reference = walk_heights(&w, k)
                    .expect("walk in class")
                    .down_step_counts_dyck;
                for c in walk_class(&w) {
                    if walk_heights(&c, k)
                        .expect("rotation in class")
                        .down_step_counts_dyck
                        != reference
                    {
                        problems.push(format!("ℓ̂ differs between {w} and {c}"));
                    }
                    walks += 1;
                    done.insert(c);
                }
            }
        }
    }
    let passed = problems.is_empty();
    let detail = if passed {
        format!("{classes} classes for n ≤ 4, k ≤ 3; ℓ̂ invariant over {walks} walks with 2n+k ≤ 16")
    } else {
        first_few(&problems)
    };
    outcome(passed, detail)
}

/// Criterion 5.
fn conjugation() -> Outcome {
    let mut problems = Vec::new();
    let mut classes = 0usize;
    if conjugacy_class(&BlossomTree::trivial()).len() > 2 {
        problems.push("class of the trivial tree exceeds 2".to_string());
    }
    for n in 1..=5usize {
        let all = enumerate_blossom(n).expect("within the guard");
        let mut done: HashSet<BlossomTree> = HashSet::new();
        for b in &all {
            if done.contains(b) {
                continue;
            }
            let class = conjugacy_class(b);
            let good = class.iter().filter(|c| c.is_well_labelled()).count();
            if class.len() > n + 2 || 2 * class.len() != (n + 2) * good {
                problems.push(format!(
                    "class of {b}: size {}, well labelled {good}",
                    class.len()
                ));
            }
            classes += 1;
            done.extend(class);
        }
        if done.len() != all.len() {
            problems.push(format!(
                "classes at n={n} cover {} of {} trees",
                done.len(),
                all.len()
            ));
        }
    }
    let passed = problems.is_empty();
    outcome(
        passed,
        if passed {
            format!("{classes} classes over n ≤ 5")
        } else {
            first_few(&problems)
        },
    )
}

/// Criterion 6.
fn coupling() -> Outcome {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::new(vec![10_000], 100_000, SEED);
    cfg.jobs = jobs();
    match coupling_experiment(&cfg) {
        Ok(out) => {
            let elapsed = start.elapsed();
            let passed = out.report.pairs_checked == 100_000 && elapsed <= Duration::from_secs(300);
            outcome(
                passed,
                format!(
                    "{} pairs at n = 10^4, zero violations, {}",
                    out.report.pairs_checked,
                    secs(elapsed)
                ),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

/// Criterion 7.
fn sampler_exactness() -> Outcome {
    let chi = match well_labelled_uniformity(3, 1_000_000, SEED, jobs()) {
        Ok(c) => c,
        Err(e) => return outcome(false, e.to_string()),
    };
    let mut cfg = ExperimentConfig::new((2..=20).collect(), 1_000_000, SEED);
    cfg.jobs = jobs();
    let rows = match coupling_experiment(&cfg) {
        Ok(out) => out.report.rows,
        Err(e) => return outcome(false, e.to_string()),
    };
    let outside: Vec<String> = rows
        .iter()
        .filter(|r| !r.within_three_sigma())
        .map(|r| format!("n={} z={:.2}", r.n, r.z))
        .collect();
    let worst = rows.iter().map(|r| r.z.abs()).fold(0.0, f64::max);
    let passed = chi.p_value > 1e-3 && outside.is_empty();
    outcome(
        passed,
        format!(
            "W_3 chi-square {:.1} on {} df, p = {:.3}; P(U_n ∈ W_n) max |z| = {worst:.2}{}",
            chi.statistic,
            chi.df,
            chi.p_value,
            if outside.is_empty() {
                String::new()
            } else {
                format!(", outside 3σ: {}", outside.join(" "))
            }
        ),
    )
}

/// Criterion 8.
fn scaling() -> Outcome {
    let start = Instant::now();
    let (small, large) = (1usize << 14, 1usize << 16);
    let mut cfg = ExperimentConfig::new(vec![small, large], 10_000, SEED);
    cfg.jobs = jobs();
    let out = match radius_experiment(&cfg) {
        Ok(out) => out,
        Err(e) => return outcome(false, e.to_string()),
    };
    let (a, b) = (
        out.report.size(small).unwrap(),
        out.report.size(large).unwrap(),
    );
    let ks = ks_two_sample(&a.scaled_values, &b.scaled_values);
    let mean_gap = (a.scaled.mean - b.scaled.mean).abs() / b.scaled.mean;
    let sup = a
        .profile
        .iter()
        .zip(&b.profile)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let passed = ks <= 0.05 && mean_gap < 0.02 && sup <= 0.05;
    outcome(
        passed,
        format!(
            "KS {ks:.4}, means {:.4} vs {:.4} (gap {:.2}%), profile sup-norm {sup:.4}, {}",
            a.scaled.mean,
            b.scaled.mean,
            100.0 * mean_gap,
            secs(start.elapsed())
        ),
    )
}

/// Criterion 9.
fn density_oracle() -> Outcome {
    let mut cfg = ExperimentConfig::new(vec![100_000], 100_000, SEED);
    cfg.jobs = jobs();
    cfg.tau = Some(vec![0.5]);
    let chi = match fidis_experiment(&cfg) {
        Ok(out) => out.report.sizes[0].chi_square.clone(),
        Err(e) => return outcome(false, e.to_string()),
    };
    let mut worst = 0.0f64;
    for l in [0.05f64, 0.3, 1.0, 2.5, 7.0] {
        for k in [-3.0f64, -0.7, 0.0, 0.4, 2.0] {
            let gauss = (-k * k / (2.0 * l)).exp() / (2.0 * std::f64::consts::PI * l).sqrt();
            let got = xi(&[l], &[k]).expect("one dimension");
            worst = worst.max((got - gauss).abs() / gauss);
        }
    }
    let z = zeta(&[0.5], &[], &[0.5]).expect("one dimension");
    let passed = chi.p_value > 1e-3 && worst < 1e-12 && (z - 1.936).abs() < 5e-4;
    outcome(
        passed,
        format!(
            "chi-square {:.1} on {} df, p = {:.4}; ξ vs Gaussian max rel. error {worst:.1e}; ζ(0.5; 0.5) = {z:.4}",
            chi.statistic, chi.df, chi.p_value
        ),
    )
}

/// Criterion 10.
fn performance() -> Outcome {
    let n = 1_000_000;
    let start = Instant::now();
    let pair = sample_well_labelled_coupled(n, &mut sample_rng(SEED));
    let q = match tree_to_quad(&pair.well) {
        Ok(q) => q,
        Err(e) => return outcome(false, e.to_string()),
    };
    let radius = q.radius();
    let elapsed = start.elapsed();
    let consistent = radius as i64 == pair.well.max_label();
    outcome(
        consistent && elapsed <= Duration::from_secs(5),
        format!(
            "n = 10^6, radius {radius}, {} single-threaded",
            secs(elapsed)
        ),
    )
}

/// Criterion 11.
fn determinism() -> Outcome {
    type Run = fn(&ExperimentConfig) -> Vec<(String, String, String)>;
    fn flatten<R>(
        r: quadlab::error::Result<quadlab::experiments::summary::ExperimentOutput<R>>,
    ) -> Vec<(String, String, String)> {
        let out = r.expect("experiment runs");
        out.csvs
            .iter()
            .map(|c| {
                (
                    c.name.clone(),
                    c.text().to_string(),
                    out.summary.run_id.clone(),
                )
            })
            .collect()
    }
    let base = |sizes: Vec<usize>, samples: usize| ExperimentConfig::new(sizes, samples, SEED);
    let mut profile = base(vec![50, 400], 300);
    profile.per_sample = true;
    let mut two_times = base(vec![500], 2_000);
    two_times.tau = Some(vec![0.3, 0.7]);
    two_times.bins = Some(6);
    let cases: Vec<(&str, ExperimentConfig, Run)> = vec![
        ("radius", base(vec![50, 400], 300), |c| {
            flatten(radius_experiment(c))
        }),
        ("profile", profile, |c| flatten(profile_experiment(c))),
        ("coupling", base(vec![10, 300], 2_000), |c| {
            flatten(coupling_experiment(c))
        }),
        ("tail", base(vec![300], 500), |c| {
            flatten(tail_experiment(c))
        }),
        ("fidis", base(vec![500], 2_000), |c| {
            flatten(fidis_experiment(c))
        }),
        ("fidis-2", two_times, |c| flatten(fidis_experiment(c))),
    ];
    let mut problems = Vec::new();
    let mut files = 0usize;
    for (name, cfg, run) in cases {
        let mut reference = None;
        for jobs in [1usize, 4, 16] {
            let mut cfg = cfg.clone();
            cfg.jobs = jobs;
            let got = run(&cfg);
            match &reference {
                None => {
                    files += got.len();
                    reference = Some(got);
                }
                Some(r) if r != &got => problems.push(format!("{name} differs at jobs = {jobs}")),
                Some(_) => {}
            }
        }
    }
    let passed = problems.is_empty();
    outcome(
        passed,
        if passed {
            format!("{files} CSVs byte-identical across jobs 1, 4, 16")
        } else {
            problems.join("; ")
        },
    )
}

fn main() -> ExitCode {
    let selected: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let wanted = |c: u32| selected.is_empty() || selected.contains(&c);
    let mut trips: Option<RoundTrips> = None;
    let mut failed = 0;
    for c in 1..=11u32 {
        if !wanted(c) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(|| match c {
            1 => exact_counting(),
            2 | 3 => {
                let r = trips.get_or_insert_with(round_trips);
                if c == 2 {
                    bijection(r)
                } else {
                    profile_identity(r)
                }
            }
            4 => cycle_lemma(),
            5 => conjugation(),
            6 => coupling(),
            7 => sampler_exactness(),
            8 => scaling(),
            9 => density_oracle(),
            10 => performance(),
            _ => determinism(),
        }));
        let o = result.unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !o.passed {
            failed += 1;
        }
        println!(
            "{} criterion {c:>2}: {} [{}]",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            secs(start.elapsed())
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
