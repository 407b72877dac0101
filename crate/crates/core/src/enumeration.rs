//! Closed-form counts and exhaustive generation of small instances.

use num_bigint::BigUint;
use num_traits::One;

use crate::blossom::{BlossomKind, BlossomTree};
use crate::error::{Error, Result};
use crate::labelled::{EmbeddedTree, WellLabelledTree};
use crate::trees::{dyck_to_tree, PlaneTree};
use crate::walks::{binomial, LatticeWalk};

/// Largest family size the exhaustive iterators will walk through.
pub const MAX_ENUMERATION: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactCounts {
    /// Rooted quadrangulations with `n` faces.
    pub quadrangulations: BigUint,
    /// Well-labelled trees with `n` edges.
    pub well_labelled: BigUint,
    /// Embedded trees with `n` edges.
    pub embedded: BigUint,
    /// Plane trees with `n` edges.
    pub catalan: BigUint,
}

pub fn exact_counts(n: u64) -> ExactCounts {
    let central = binomial(2 * n, n);
    let three_n = BigUint::from(3u32).pow(n as u32);
    let catalan = &central / (n + 1);
    let quadrangulations = BigUint::from(2u32) * &three_n * &central / ((n + 1) * (n + 2));
    let embedded = &three_n * &catalan;
    let well_labelled = BigUint::from(2u32) * &embedded / (n + 2);
    ExactCounts {
        quadrangulations,
        well_labelled,
        embedded,
        catalan,
    }
}

fn guard(what: &'static str, n: usize) -> Result<()> {
    let size = exact_counts(n as u64).embedded;
    if size > BigUint::from(MAX_ENUMERATION) {
        return Err(Error::SizeGuard {
            what,
            requested: n as u64,
            limit: MAX_ENUMERATION,
        });
    }
    Ok(())
}

/// Dyck paths with `n` up steps in lexicographic order, up before down.
#[derive(Clone, Debug)]
pub struct DyckPaths {
    current: Option<Vec<i8>>,
}

impl DyckPaths {
    pub fn new(n: usize) -> Self {
        let mut first = vec![1i8; n];
        first.extend(std::iter::repeat_n(-1, n));
        Self {
            current: Some(first),
        }
    }
}

impl Iterator for DyckPaths {
    type Item = LatticeWalk;

    fn next(&mut self) -> Option<LatticeWalk> {
        let word = self.current.take()?;
        let out = LatticeWalk::new(word.clone()).expect("steps are ±1");
        let n = word.len() / 2;
        let mut heights = Vec::with_capacity(word.len() + 1);
        heights.push(0i64);
        for &s in &word {
            heights.push(heights.last().unwrap() + s as i64);
        }
        // Rightmost up step that can turn into a down step.
        if let Some(i) = (0..word.len())
            .rev()
            .find(|&i| word[i] == 1 && heights[i] >= 1)
        {
            let mut succ = word[..i].to_vec();
            succ.push(-1);
            let ups = succ.iter().filter(|&&s| s == 1).count();
            succ.extend(std::iter::repeat_n(1, n - ups));
            succ.resize(2 * n, -1);
            self.current = Some(succ);
        }
        Some(out)
    }
}

pub fn enumerate_plane_trees(n: usize) -> impl Iterator<Item = PlaneTree> {
    DyckPaths::new(n).map(|w| dyck_to_tree(&w).expect("Dyck path"))
}

/// Every embedded tree with `n` edges and root label 1: plane trees in
/// lexicographic order, increments as a ternary counter over `(-1, 0, +1)`
/// with the last edge moving fastest.
pub fn enumerate_embedded(n: usize) -> Result<impl Iterator<Item = EmbeddedTree>> {
    guard("embedded trees", n)?;
    Ok(enumerate_plane_trees(n).flat_map(move |tree| {
        let count = 3usize.pow(n as u32);
        (0..count).map(move |mut code| {
            let mut increments = vec![0i8; n];
            for slot in increments.iter_mut().rev() {
                *slot = (code % 3) as i8 - 1;
                code /= 3;
            }
            EmbeddedTree::new(tree.clone(), &increments, 1).expect("increments in range")
        })
    }))
}

pub fn enumerate_well_labelled(n: usize) -> Result<impl Iterator<Item = WellLabelledTree>> {
    Ok(enumerate_embedded(n)?.filter_map(|t| WellLabelledTree::new(t).ok()))
}

/// Every blossom tree with `n` inner nodes, generated from the definition.
pub fn enumerate_blossom(n: usize) -> Result<Vec<BlossomTree>> {
    guard("blossom trees", n)?;
    let mut memo: Vec<Vec<Vec<BlossomKind>>> = Vec::with_capacity(n + 1);
    // Subtrees hanging from a flag position with k inner nodes.
    for k in 0..=n {
        let mut all = Vec::new();
        if k == 0 {
            all.push(vec![BlossomKind::Flag]);
        } else {
            for arrow in 0..3 {
                for left in 0..k {
                    let right = k - 1 - left;
                    for a in &memo[left] {
                        for b in &memo[right] {
                            let mut seq = vec![BlossomKind::Inner];
                            let mut flags = [a, b].into_iter();
                            for slot in 0..3 {
                                if slot == arrow {
                                    seq.push(BlossomKind::Arrow);
                                } else {
                                    seq.extend_from_slice(flags.next().unwrap());
                                }
                            }
                            all.push(seq);
                        }
                    }
                }
            }
        }
        memo.push(all);
    }
    memo.pop()
        .unwrap()
        .into_iter()
        .map(|sub| {
            let mut kinds = vec![BlossomKind::Special];
            kinds.extend(sub);
            BlossomTree::from_kinds(kinds)
        })
        .collect()
}

/// `|W_n| / |U_n|` as an exact fraction `2 / (n + 2)`.
pub fn positivity_ratio(n: u64) -> (BigUint, BigUint) {
    let c = exact_counts(n);
    let g = gcd(c.well_labelled.clone(), c.embedded.clone());
    (&c.well_labelled / &g, &c.embedded / &g)
}

fn gcd(mut a: BigUint, mut b: BigUint) -> BigUint {
    while b != BigUint::ZERO {
        let r = &a % &b;
        a = b;
        b = r;
    }
    if a == BigUint::ZERO {
        BigUint::one()
    } else {
        a
    }
}
