//! Embedded trees, well-labelled trees, label distributions and contour
//! pairs.
//!
//! Two root-label conventions coexist: root label 1 for the tree families
//! matched with quadrangulations and blossom trees, root label 0 for contour
//! pairs (where `V(0) = 0`). [`EmbeddedTree::with_root_label`] converts.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::scaling;
use crate::trees::{self, PlaneTree};
use crate::walks::LatticeWalk;

/// A plane tree whose edges carry label increments in `{-1, 0, 1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EmbeddedTree {
    tree: PlaneTree,
    /// `increments[v]` is `κ` on the edge from the parent of `v` to `v`;
    /// entry 0 is unused and kept at 0.
    increments: Vec<i8>,
    root_label: i64,
}

impl fmt::Debug for EmbeddedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EmbeddedTree({self})")
    }
}

impl EmbeddedTree {
    /// `increments` lists `κ` for vertices `1..=n` in preorder.
    pub fn new(tree: PlaneTree, increments: &[i8], root_label: i64) -> Result<Self> {
        if increments.len() != tree.edge_count() {
            return Err(Error::Dimension(format!(
                "{} increments for a tree with {} edges",
                increments.len(),
                tree.edge_count()
            )));
        }
        if let Some(&bad) = increments.iter().find(|&&k| !(-1..=1).contains(&k)) {
            return Err(Error::Increment(bad as i64));
        }
        let mut inc = Vec::with_capacity(increments.len() + 1);
        inc.push(0);
        inc.extend_from_slice(increments);
        Ok(Self {
            tree,
            increments: inc,
            root_label,
        })
    }

    /// Increments indexed by vertex, entry 0 ignored.
    pub(crate) fn from_parts_unchecked(
        tree: PlaneTree,
        increments: Vec<i8>,
        root_label: i64,
    ) -> Self {
        debug_assert_eq!(increments.len(), tree.node_count());
        Self {
            tree,
            increments,
            root_label,
        }
    }

    pub fn tree(&self) -> &PlaneTree {
        &self.tree
    }

    pub fn edge_count(&self) -> usize {
        self.tree.edge_count()
    }

    pub fn root_label(&self) -> i64 {
        self.root_label
    }

    /// `κ` of the edge into vertex `v` (`v ≥ 1`).
    pub fn increment(&self, v: u32) -> i8 {
        self.increments[v as usize]
    }

    /// Increments of vertices `1..=n`.
    pub fn increments(&self) -> &[i8] {
        &self.increments[1..]
    }

    pub fn with_root_label(mut self, root_label: i64) -> Self {
        self.root_label = root_label;
        self
    }

    /// Label of every vertex, in preorder.
    pub fn labels(&self) -> Vec<i64> {
        vertex_labels(self)
    }

    pub fn label_distribution(&self) -> LabelDistribution {
        LabelDistribution::from_labels(&self.labels())
    }

    pub fn to_contour_pair(&self) -> ContourPair {
        to_contour_pair(self)
    }

    pub fn is_well_labelled(&self) -> Result<bool> {
        is_well_labelled(self)
    }
}

/// Serialized as `bp:kappa`, optionally followed by `@root_label` when the
/// root label is not 1. `kappa` lists increments in preorder over `{+,0,-}`.
impl fmt::Display for EmbeddedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tree.to_bp_string())?;
        f.write_str(":")?;
        for &k in self.increments() {
            f.write_str(match k {
                1 => "+",
                0 => "0",
                _ => "-",
            })?;
        }
        if self.root_label != 1 {
            write!(f, "@{}", self.root_label)?;
        }
        Ok(())
    }
}

impl FromStr for EmbeddedTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (body, root_label) = match s.rsplit_once('@') {
            Some((body, r)) => (
                body,
                r.parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad root label {r:?}")))?,
            ),
            None => (s, 1),
        };
        let (bp, kappa) = body
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected `tree:increments`, got {s:?}")))?;
        let tree: PlaneTree = bp.parse()?;
        let increments = kappa
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '0' => Ok(0),
                '-' => Ok(-1),
                _ => Err(Error::Parse(format!("unexpected increment {c:?}"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        Self::new(tree, &increments, root_label)
    }
}

pub fn vertex_labels(t: &EmbeddedTree) -> Vec<i64> {
    let parents = t.tree.parents_raw();
    let mut labels = vec![t.root_label; parents.len()];
    // Parents precede children in preorder.
    for v in 1..parents.len() {
        labels[v] = labels[parents[v] as usize] + t.increments[v] as i64;
    }
    labels
}

/// Errors unless the root label is 1; otherwise whether every label is
/// positive.
pub fn is_well_labelled(t: &EmbeddedTree) -> Result<bool> {
    if t.root_label != 1 {
        return Err(Error::RootLabel(t.root_label));
    }
    Ok(t.labels().iter().all(|&l| l >= 1))
}

/// An embedded tree with root label 1 and positive labels.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WellLabelledTree(EmbeddedTree);

impl fmt::Debug for WellLabelledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WellLabelledTree({})", self.0)
    }
}

impl WellLabelledTree {
    pub fn new(t: EmbeddedTree) -> Result<Self> {
        if t.root_label != 1 {
            return Err(Error::RootLabel(t.root_label));
        }
        if let Some((v, &l)) = t.labels().iter().enumerate().find(|(_, &l)| l < 1) {
            return Err(Error::NotPositive {
                vertex: v,
                label: l,
            });
        }
        Ok(Self(t))
    }

    pub(crate) fn new_unchecked(t: EmbeddedTree) -> Self {
        debug_assert!(is_well_labelled(&t) == Ok(true));
        Self(t)
    }

    pub fn as_embedded(&self) -> &EmbeddedTree {
        &self.0
    }

    pub fn into_embedded(self) -> EmbeddedTree {
        self.0
    }

    pub fn tree(&self) -> &PlaneTree {
        &self.0.tree
    }

    pub fn edge_count(&self) -> usize {
        self.0.edge_count()
    }

    pub fn labels(&self) -> Vec<i64> {
        self.0.labels()
    }

    pub fn label_distribution(&self) -> LabelDistribution {
        self.0.label_distribution()
    }

    /// Largest label `μ`.
    pub fn max_label(&self) -> i64 {
        self.labels().into_iter().max().unwrap_or(1)
    }
}

impl fmt::Display for WellLabelledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for WellLabelledTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(s.parse()?)
    }
}

/// Number of vertices per label over the interval `[min, max]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabelDistribution {
    min: i64,
    counts: Vec<u64>,
}

impl LabelDistribution {
    pub fn from_labels(labels: &[i64]) -> Self {
        let min = labels.iter().copied().min().unwrap_or(0);
        let max = labels.iter().copied().max().unwrap_or(0);
        let mut counts = vec![0u64; (max - min + 1) as usize];
        for &l in labels {
            counts[(l - min) as usize] += 1;
        }
        Self { min, counts }
    }

    /// Builds a distribution from `(label, count)` data starting at `min`.
    pub fn from_counts(min: i64, counts: Vec<u64>) -> Self {
        Self { min, counts }
    }

    pub fn min_label(&self) -> i64 {
        self.min
    }

    pub fn max_label(&self) -> i64 {
        self.min + self.counts.len() as i64 - 1
    }

    /// `λ_k`.
    pub fn count(&self, label: i64) -> u64 {
        if label < self.min {
            return 0;
        }
        self.counts
            .get((label - self.min) as usize)
            .copied()
            .unwrap_or(0)
    }

    /// Counts for labels `min..=max`.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `λ̂_k`: vertices among the `k` smallest label values starting at the
    /// minimum, i.e. labels `m..=m+k-1`.
    pub fn cumulative(&self, k: i64) -> u64 {
        if k <= 0 {
            return 0;
        }
        let k = (k as usize).min(self.counts.len());
        self.counts[..k].iter().sum()
    }

    /// All of `λ̂_1, …, λ̂_{M-m+1}`.
    pub fn cumulative_vec(&self) -> Vec<u64> {
        self.counts
            .iter()
            .scan(0u64, |acc, &c| {
                *acc += c;
                Some(*acc)
            })
            .collect()
    }

    /// Atoms `(x, w)` of the empirical measure `(1/n) Σ λ_k δ_{k / (8n/9)^{1/4}}`
    /// with labels measured from the minimum.
    pub fn empirical_measure(&self, n: usize) -> Vec<(f64, f64)> {
        let scale = scaling::label_scale(n.max(1));
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| ((i + 1) as f64 / scale, c as f64 / n.max(1) as f64))
            .collect()
    }
}

/// Height and label of the vertex visited at each contour time.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ContourPair {
    e: LatticeWalk,
    v: LatticeWalk,
}

impl ContourPair {
    /// Validates all three contour-pair conditions.
    pub fn new(e: LatticeWalk, v: LatticeWalk) -> Result<Self> {
        let pair = Self { e, v };
        pair.check()?;
        Ok(pair)
    }

    pub fn excursion(&self) -> &LatticeWalk {
        &self.e
    }

    pub fn labels(&self) -> &LatticeWalk {
        &self.v
    }

    pub fn edge_count(&self) -> usize {
        self.e.len() / 2
    }

    pub fn heights(&self) -> Vec<i64> {
        self.e.partial_sums()
    }

    pub fn label_values(&self) -> Vec<i64> {
        self.v.partial_sums()
    }

    fn check(&self) -> Result<()> {
        if self.e.len() != self.v.len() {
            return Err(Error::InvalidContourPair("E and V have different lengths"));
        }
        trees::dyck_to_tree(&self.e)?;
        if self.v.final_height() != 0 {
            return Err(Error::InvalidContourPair("V does not return to 0"));
        }
        self.decode().map(|_| ())
    }

    /// Rebuilds the embedded tree, root label 0, checking consistency.
    fn decode(&self) -> Result<EmbeddedTree> {
        let e = self.e.steps();
        let v = self.v.partial_sums();
        let mut parents = Vec::with_capacity(e.len() / 2 + 1);
        let mut increments = Vec::with_capacity(e.len() / 2 + 1);
        parents.push(trees::NIL);
        increments.push(0i8);
        // Stack of (vertex, last visit time) along the current branch.
        let mut stack: Vec<(u32, usize)> = vec![(0, 0)];
        for (t, &s) in e.iter().enumerate() {
            if s == 1 {
                let (top, _) = *stack.last().expect("root stays on the stack");
                let id = parents.len() as u32;
                parents.push(top);
                increments.push((v[t + 1] - v[t]) as i8);
                stack.push((id, t + 1));
            } else {
                stack.pop();
                let (_, last) = stack
                    .last_mut()
                    .ok_or(Error::NotDyck("walk goes below zero"))?;
                if v[*last] != v[t + 1] {
                    return Err(Error::ContourInconsistent {
                        t: *last,
                        t_prime: t + 1,
                    });
                }
                *last = t + 1;
            }
        }
        Ok(EmbeddedTree::from_parts_unchecked(
            PlaneTree::from_parents_unchecked(&parents),
            increments,
            0,
        ))
    }

    pub fn to_embedded(&self) -> EmbeddedTree {
        self.decode().expect("validated at construction")
    }

    pub fn scaled(&self) -> ScaledPaths {
        scaled_paths(self)
    }
}

/// Serialized as `E:V`, `E` over `{U,D}` and `V` over `{+,0,-}`.
impl fmt::Display for ContourPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}",
            self.e.to_binary_string(),
            self.v.to_ternary_string()
        )
    }
}

impl FromStr for ContourPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (e, v) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected `E:V`, got {s:?}")))?;
        let e: LatticeWalk = e.parse()?;
        if !e.is_binary() {
            return Err(Error::InvalidContourPair("E must have increments ±1"));
        }
        Self::new(e, v.parse()?)
    }
}

/// Contour pair with `V(t) = label(v_t) − root label`.
pub fn to_contour_pair(t: &EmbeddedTree) -> ContourPair {
    let tree = &t.tree;
    let contour = tree.contour();
    let mut e = Vec::with_capacity(contour.len().saturating_sub(1));
    let mut v = Vec::with_capacity(e.capacity());
    for w in contour.windows(2) {
        if tree.parent(w[1]) == Some(w[0]) {
            e.push(1);
            v.push(t.increments[w[1] as usize]);
        } else {
            e.push(-1);
            v.push(-t.increments[w[0] as usize]);
        }
    }
    ContourPair {
        e: LatticeWalk::from_steps_unchecked(e),
        v: LatticeWalk::from_steps_unchecked(v),
    }
}

/// Inverse of [`to_contour_pair`]; the result has root label 0.
pub fn from_contour_pair(p: &ContourPair) -> Result<EmbeddedTree> {
    p.decode()
}

/// Right-continuous step functions `e(s) = E(⌊2ns⌋)/√(2n)` and
/// `Ŵ(s) = V(⌊2ns⌋)/(8n/9)^{1/4}` on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledPaths {
    n: usize,
    heights: Vec<i64>,
    labels: Vec<i64>,
}

pub fn scaled_paths(p: &ContourPair) -> ScaledPaths {
    ScaledPaths {
        n: p.edge_count(),
        heights: p.heights(),
        labels: p.label_values(),
    }
}

impl ScaledPaths {
    pub fn n(&self) -> usize {
        self.n
    }

    fn index(&self, s: f64) -> usize {
        let len = self.heights.len() - 1;
        ((2.0 * self.n as f64 * s).floor().max(0.0) as usize).min(len)
    }

    pub fn e(&self, s: f64) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        self.heights[self.index(s)] as f64 / scaling::height_scale(self.n)
    }

    pub fn w(&self, s: f64) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        self.labels[self.index(s)] as f64 / scaling::label_scale(self.n)
    }

    pub fn sup_w(&self) -> f64 {
        let max = self.labels.iter().copied().max().unwrap_or(0);
        if self.n == 0 {
            0.0
        } else {
            max as f64 / scaling::label_scale(self.n)
        }
    }

    pub fn inf_w(&self) -> f64 {
        let min = self.labels.iter().copied().min().unwrap_or(0);
        if self.n == 0 {
            0.0
        } else {
            min as f64 / scaling::label_scale(self.n)
        }
    }
}

/// Uniform embedded tree with `n` edges: uniform plane tree, independent
/// uniform increments.
pub fn sample_embedded<R: Rng + ?Sized>(n: usize, root_label: i64, rng: &mut R) -> EmbeddedTree {
    let tree = trees::sample_plane_tree(n, rng);
    let mut increments = Vec::with_capacity(n + 1);
    increments.push(0);
    increments.extend((0..n).map(|_| rng.random_range(-1i8..=1)));
    EmbeddedTree::from_parts_unchecked(tree, increments, root_label)
}
