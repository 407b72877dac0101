//! Exhaustive identity suites behind `quadlab verify`.

use std::collections::HashSet;
use std::path::PathBuf;

use clap::ValueEnum;
use num_bigint::BigUint;
use quadlab::blossom::conjugacy_class;
use quadlab::cvs::{quad_to_tree, tree_to_quad};
use quadlab::enumeration::{
    enumerate_blossom, enumerate_embedded, enumerate_well_labelled, exact_counts,
};
use quadlab::labelled::WellLabelledTree;
use quadlab::walks::verify_cycle_lemma;

use crate::{parse_quad, read_lines, Failure, Outcome};

#[derive(Clone, Copy, ValueEnum)]
pub enum Suite {
    /// Round trips between trees and quadrangulations, and the profile identity.
    Bijection,
    /// `(n+k)|C ∩ D| = k|C|` for every rotation class of walks.
    CycleLemma,
    /// `2|C| = (n+2)|C ∩ W|` for every conjugacy class of blossom trees.
    Classes,
    /// Closed-form counts against enumeration.
    Counts,
}

pub fn run(suite: Suite, n_max: usize, input: Option<PathBuf>) -> Outcome {
    if input.is_some() && !matches!(suite, Suite::Bijection) {
        return Err(Failure::usage(
            "--input is only supported by the bijection suite",
        ));
    }
    match suite {
        Suite::Bijection => match input {
            Some(path) => bijection_lines(read_lines(Some(path))?),
            None => bijection(n_max),
        },
        Suite::CycleLemma => cycle_lemma(n_max),
        Suite::Classes => classes(n_max),
        Suite::Counts => counts(n_max),
    }
}

fn check_tree(w: &WellLabelledTree) -> Result<(), String> {
    let q = tree_to_quad(w).map_err(|e| format!("Q({w}): {e}"))?;
    if q.map().profile().counts != w.label_distribution().counts() {
        return Err(format!(
            "profile of Q({w}) differs from its label distribution"
        ));
    }
    let back = quad_to_tree(&q).map_err(|e| format!("T(Q({w})): {e}"))?;
    if &back != w {
        return Err(format!("T(Q({w})) = {back}"));
    }
    Ok(())
}

fn bijection(n_max: usize) -> Outcome {
    for n in 1..=n_max {
        let mut images = HashSet::new();
        for w in enumerate_well_labelled(n)? {
            check_tree(&w).map_err(Failure::check)?;
            images.insert(tree_to_quad(&w)?.canonical());
        }
        let expected = exact_counts(n as u64).quadrangulations;
        if BigUint::from(images.len()) != expected {
            return Err(Failure::check(format!(
                "n = {n}: {} distinct quadrangulations, expected {expected}",
                images.len()
            )));
        }
        println!("ok bijection n = {n}: {expected} trees and maps");
    }
    Ok(())
}

fn bijection_lines(lines: Vec<String>) -> Outcome {
    for (i, line) in lines.iter().enumerate() {
        let at = |m: String| Failure::check(format!("line {}: {m}", i + 1));
        if line.starts_with('{') {
            let q = parse_quad(line)?;
            let w = quad_to_tree(&q).map_err(|e| at(e.to_string()))?;
            check_tree(&w).map_err(at)?;
            if tree_to_quad(&w).map_err(|e| at(e.to_string()))?.canonical() != q.canonical() {
                return Err(at("Q(T(q)) is not q".into()));
            }
        } else {
            let w: WellLabelledTree = line
                .parse()
                .map_err(|e: quadlab::error::Error| at(e.to_string()))?;
            check_tree(&w).map_err(at)?;
        }
    }
    println!("ok bijection: {} objects", lines.len());
    Ok(())
}

fn cycle_lemma(n_max: usize) -> Outcome {
    for n in 0..=n_max {
        for k in 1..=3 {
            let report = verify_cycle_lemma(n, k)?;
            if let Some(c) = report.violations().next() {
                return Err(Failure::check(format!(
                    "n = {n}, k = {k}: class of {} has {} walks, {} positive",
                    c.representative, c.size, c.positive
                )));
            }
            println!(
                "ok cycle-lemma n = {n}, k = {k}: {} classes",
                report.classes.len()
            );
        }
    }
    Ok(())
}

fn classes(n_max: usize) -> Outcome {
    for n in 1..=n_max {
        let all = enumerate_blossom(n)?;
        let mut done = HashSet::new();
        let mut count = 0usize;
        for b in &all {
            if done.contains(b) {
                continue;
            }
            let class = conjugacy_class(b);
            let good = class.iter().filter(|c| c.is_well_labelled()).count();
            if class.len() > n + 2 || 2 * class.len() != (n + 2) * good {
                return Err(Failure::check(format!(
                    "class of {b}: {} trees, {good} well labelled",
                    class.len()
                )));
            }
            count += 1;
            done.extend(class);
        }
        println!(
            "ok classes n = {n}: {count} classes over {} blossom trees",
            all.len()
        );
    }
    Ok(())
}

fn counts(n_max: usize) -> Outcome {
    for n in 1..=n_max {
        let c = exact_counts(n as u64);
        let (mut embedded, mut well) = (0usize, 0usize);
        for t in enumerate_embedded(n)? {
            embedded += 1;
            well += WellLabelledTree::new(t).is_ok() as usize;
        }
        if BigUint::from(embedded) != c.embedded
            || BigUint::from(well) != c.well_labelled
            || c.well_labelled != c.quadrangulations
        {
            return Err(Failure::check(format!(
                "n = {n}: enumerated |U| = {embedded}, |W| = {well}; formulas {}, {}, |Q| = {}",
                c.embedded, c.well_labelled, c.quadrangulations
            )));
        }
        println!("ok counts n = {n}: |Q| = |W| = {well}, |U| = {embedded}");
    }
    Ok(())
}
