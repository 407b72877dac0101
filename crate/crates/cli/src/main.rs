//! `quadlab`: sampling, encoding, enumeration, verification and experiments
//! on quadrangulations and labelled trees.
//!
//! Objects travel one per line: plane trees as balanced parentheses,
//! embedded and well-labelled trees as `bp:increments[@root]`, contour pairs
//! as `E:V`, blossom trees as `S(...)` and quadrangulations as one-line JSON.

mod verify;

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use quadlab::blossom::{
    blossom_to_embedded, embedded_to_blossom, sample_well_labelled_coupled, BlossomTree,
};
use quadlab::cvs::{quad_to_tree, tree_to_quad};
use quadlab::enumeration::{
    enumerate_blossom, enumerate_embedded, enumerate_plane_trees, enumerate_well_labelled,
    exact_counts, MAX_ENUMERATION,
};
use quadlab::error::Error;
use quadlab::experiments::summary::RunSummary;
use quadlab::experiments::{
    coupling, fidis, sample_rng, sample_seed, scaling, tail, ExperimentConfig,
};
use quadlab::labelled::{
    from_contour_pair, sample_embedded, ContourPair, EmbeddedTree, WellLabelledTree,
};
use quadlab::planar_map::{PlanarMap, Quadrangulation};
use quadlab::trees::sample_plane_tree;

#[derive(Parser)]
#[command(
    name = "quadlab",
    version,
    about = "Quadrangulations and well-labelled trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw uniform random objects with `n` edges (faces for quadrangulations).
    Sample {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write to this file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Map objects to their codes: quadrangulation → tree (cvs), embedded
    /// tree → contour pair (contour), embedded tree → blossom tree (blossom).
    Encode(Coding),
    /// The inverse of `encode`.
    Decode(Coding),
    /// Every object of a small family, one per line.
    Enumerate {
        #[arg(long, value_enum)]
        kind: EnumKind,
        #[arg(long)]
        n: usize,
    },
    /// Exhaustive identity checks; exit status 0 iff all pass.
    Verify {
        #[arg(long, value_enum)]
        suite: verify::Suite,
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        /// Check the objects on these lines instead of an exhaustive family
        /// (bijection suite only; `-` reads standard input).
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Monte-Carlo experiments driven by a JSON configuration.
    Experiment {
        #[arg(value_enum)]
        which: Experiment,
        #[arg(long)]
        config: PathBuf,
        /// Overrides the configuration's worker count.
        #[arg(long)]
        jobs: Option<usize>,
        /// Overrides the configuration's output directory.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct Coding {
    #[arg(long, value_enum)]
    scheme: Scheme,
    /// Input file, one object per line; standard input by default.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Root label given to trees decoded from contour pairs, which only
    /// record labels relative to the root.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    root_label: i64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Tree,
    Embedded,
    WellLabelled,
    Quadrangulation,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnumKind {
    Tree,
    Embedded,
    WellLabelled,
    Blossom,
    Quadrangulation,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scheme {
    Cvs,
    Contour,
    Blossom,
}

#[derive(Clone, Copy, ValueEnum)]
enum Experiment {
    Radius,
    Profile,
    Coupling,
    Tail,
    Fidis,
}

/// A failure and the exit status it maps to.
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn check(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::SizeGuard { .. } => Failure::usage(e.to_string()),
            _ => Failure::check(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::check(format!("i/o error: {e}"))
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Sample {
            kind,
            n,
            count,
            seed,
            out,
        } => sample(kind, n, count, seed, out),
        Command::Encode(c) => code(c, true),
        Command::Decode(c) => code(c, false),
        Command::Enumerate { kind, n } => enumerate(kind, n),
        Command::Verify {
            suite,
            n_max,
            input,
        } => verify::run(suite, n_max, input),
        Command::Experiment {
            which,
            config,
            jobs,
            output,
        } => experiment(which, config, jobs, output),
    }
}

fn writer(out: Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Non-empty lines of a file, or of standard input when `path` is `None` or `-`.
pub fn read_lines(path: Option<PathBuf>) -> io::Result<Vec<String>> {
    let reader: Box<dyn BufRead> = match path {
        Some(p) if p.as_os_str() != "-" => Box::new(BufReader::new(File::open(p)?)),
        _ => Box::new(io::stdin().lock()),
    };
    let mut lines = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            lines.push(line.trim().to_string());
        }
    }
    Ok(lines)
}

pub fn parse_quad(line: &str) -> Result<Quadrangulation, Failure> {
    let map = PlanarMap::from_json(line).map_err(|e| Failure::check(format!("{e}: {line}")))?;
    Quadrangulation::new(map).map_err(|e| Failure::check(format!("{e}: {line}")))
}

fn sample(kind: Kind, n: usize, count: usize, seed: u64, out: Option<PathBuf>) -> Outcome {
    if n == 0 && matches!(kind, Kind::Quadrangulation) {
        return Err(Failure::usage("quadrangulations need n ≥ 1"));
    }
    let mut w = writer(out)?;
    for i in 0..count {
        let s = sample_seed(seed, n, i);
        let mut rng = sample_rng(s);
        let line = match kind {
            Kind::Tree => sample_plane_tree(n, &mut rng).to_string(),
            Kind::Embedded => sample_embedded(n, 1, &mut rng).to_string(),
            Kind::WellLabelled => sample_well_labelled_coupled(n, &mut rng).well.to_string(),
            Kind::Quadrangulation => {
                let well = sample_well_labelled_coupled(n, &mut rng).well;
                tree_to_quad(&well)
                    .map_err(|e| Failure::check(format!("{e} (n = {n}, sample {i}, seed {s})")))?
                    .map()
                    .to_json()
            }
        };
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

fn code(c: Coding, encode: bool) -> Outcome {
    let lines = read_lines(c.input)?;
    let mut w = writer(None)?;
    for (i, line) in lines.iter().enumerate() {
        let at = |e: Error| Failure::check(format!("line {}: {e}", i + 1));
        let out = match (c.scheme, encode) {
            (Scheme::Cvs, true) => quad_to_tree(&parse_quad(line)?).map_err(at)?.to_string(),
            (Scheme::Cvs, false) => {
                let t: WellLabelledTree = line.parse().map_err(at)?;
                tree_to_quad(&t).map_err(at)?.map().to_json()
            }
            (Scheme::Contour, true) => line
                .parse::<EmbeddedTree>()
                .map_err(at)?
                .to_contour_pair()
                .to_string(),
            (Scheme::Contour, false) => line
                .parse::<ContourPair>()
                .and_then(|p| from_contour_pair(&p))
                .map_err(at)?
                .with_root_label(c.root_label)
                .to_string(),
            (Scheme::Blossom, true) => embedded_to_blossom(&line.parse().map_err(at)?).to_string(),
            (Scheme::Blossom, false) => {
                let b: BlossomTree = line.parse().map_err(at)?;
                b.validate().map_err(at)?;
                blossom_to_embedded(&b).to_string()
            }
        };
        writeln!(w, "{out}")?;
    }
    w.flush()?;
    Ok(())
}

fn enumerate(kind: EnumKind, n: usize) -> Outcome {
    let mut w = writer(None)?;
    match kind {
        EnumKind::Tree => {
            if exact_counts(n as u64).catalan > MAX_ENUMERATION.into() {
                return Err(Failure::usage(format!(
                    "plane trees with {n} edges exceed the enumeration limit {MAX_ENUMERATION}"
                )));
            }
            for t in enumerate_plane_trees(n) {
                writeln!(w, "{t}")?;
            }
        }
        EnumKind::Embedded => {
            for t in enumerate_embedded(n)? {
                writeln!(w, "{t}")?;
            }
        }
        EnumKind::WellLabelled => {
            for t in enumerate_well_labelled(n)? {
                writeln!(w, "{t}")?;
            }
        }
        EnumKind::Blossom => {
            for b in enumerate_blossom(n)? {
                writeln!(w, "{b}")?;
            }
        }
        EnumKind::Quadrangulation => {
            if n == 0 {
                return Err(Failure::usage("quadrangulations need n ≥ 1"));
            }
            for t in enumerate_well_labelled(n)? {
                writeln!(w, "{}", tree_to_quad(&t)?.map().to_json())?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn experiment(
    which: Experiment,
    config: PathBuf,
    jobs: Option<usize>,
    output: Option<PathBuf>,
) -> Outcome {
    let text = std::fs::read_to_string(&config)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", config.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(j) = jobs {
        cfg.jobs = j;
    }
    if output.is_some() {
        cfg.output = output;
    }
    cfg.validate()?;
    let summary: RunSummary = match which {
        Experiment::Radius => scaling::radius_experiment(&cfg)?.summary,
        Experiment::Profile => scaling::profile_experiment(&cfg)?.summary,
        Experiment::Coupling => {
            let out = coupling::coupling_experiment(&cfg)?;
            if let Some(r) = out.report.rows.iter().find(|r| !r.within_three_sigma()) {
                eprintln!(
                    "warning: P(U_n ∈ W_n) at n = {} is {:.2} standard deviations from 2/(n+2)",
                    r.n, r.z
                );
            }
            out.summary
        }
        Experiment::Tail => tail::tail_experiment(&cfg)?.summary,
        Experiment::Fidis => fidis::fidis_experiment(&cfg)?.summary,
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    println!("{json}");
    Ok(())
}
