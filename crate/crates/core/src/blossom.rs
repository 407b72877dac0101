//! Blossom trees: plane trees with 4-valent inner nodes, each carrying one
//! arrow, and flag leaves, one of which (the special flag) is the root.
//!
//! Trees are stored as the preorder sequence of node kinds, rooted at the
//! special flag. The special flag has one child; an inner node has three
//! children, listed counterclockwise after its parent edge.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::labelled::{self, EmbeddedTree, LabelDistribution, WellLabelledTree};
use crate::trees::{PlaneTree, NIL};
use crate::walks::{self, LatticeWalk};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlossomKind {
    Special,
    Arrow,
    Flag,
    Inner,
}

impl BlossomKind {
    fn is_leaf(self) -> bool {
        !matches!(self, BlossomKind::Inner)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlossomTree {
    kinds: Vec<BlossomKind>,
}

impl fmt::Debug for BlossomTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BlossomTree({self})")
    }
}

/// Labels written on the normal flags and the walk `w_B ∈ B(n,2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagLabelling {
    /// `(node, label)` for each normal flag in border order.
    pub flag_labels: Vec<(usize, i64)>,
    pub walk: LatticeWalk,
}

impl FlagLabelling {
    pub fn label_distribution(&self) -> LabelDistribution {
        let labels: Vec<i64> = self.flag_labels.iter().map(|&(_, l)| l).collect();
        LabelDistribution::from_labels(&labels)
    }
}

impl BlossomTree {
    /// Validates a preorder kind sequence.
    pub fn from_kinds(kinds: Vec<BlossomKind>) -> Result<Self> {
        let tree = Self { kinds };
        tree.validate()?;
        Ok(tree)
    }

    pub fn kinds(&self) -> &[BlossomKind] {
        &self.kinds
    }

    /// The tree with two flags and no inner node.
    pub fn trivial() -> Self {
        Self {
            kinds: vec![BlossomKind::Special, BlossomKind::Flag],
        }
    }

    pub fn inner_count(&self) -> usize {
        (self.kinds.len() - 2) / 3
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Blossom(msg.to_string()));
        if self.kinds.first() != Some(&BlossomKind::Special) {
            return bad("the root must be the special flag");
        }
        if self.kinds[1..].contains(&BlossomKind::Special) {
            return bad("only the root may be special");
        }
        if self.kinds.get(1) == Some(&BlossomKind::Arrow) {
            return bad("arrows hang from inner nodes");
        }
        // Number of subtrees still to read.
        let mut pending = 1usize;
        for (i, &k) in self.kinds.iter().enumerate().skip(1) {
            if pending == 0 {
                return bad(&format!("trailing node at position {i}"));
            }
            pending -= 1;
            if k == BlossomKind::Inner {
                pending += 3;
            }
        }
        if pending != 0 {
            return bad("truncated tree");
        }
        let ends = subtree_ends(&self.kinds);
        for (v, &k) in self.kinds.iter().enumerate() {
            if k == BlossomKind::Inner {
                let arrows = inner_slots(&ends, v)
                    .iter()
                    .filter(|&&c| self.kinds[c] == BlossomKind::Arrow)
                    .count();
                if arrows != 1 {
                    return bad(&format!("inner node {v} is adjacent to {arrows} arrows"));
                }
            }
        }
        Ok(())
    }

    /// Step sequence: arrows up, flags down, the root flag last.
    pub fn walk(&self) -> LatticeWalk {
        let mut steps: Vec<i8> = self.kinds[1..]
            .iter()
            .filter_map(|k| match k {
                BlossomKind::Arrow => Some(1),
                BlossomKind::Flag => Some(-1),
                _ => None,
            })
            .collect();
        steps.push(-1);
        LatticeWalk::from_steps_unchecked(steps)
    }

    /// Node ids of the normal flags in border order.
    pub fn normal_flags(&self) -> Vec<usize> {
        (1..self.kinds.len())
            .filter(|&v| self.kinds[v] == BlossomKind::Flag)
            .collect()
    }

    pub fn labelling(&self) -> FlagLabelling {
        labelling_process(self)
    }

    /// Moves the special flag to normal flag `flag` (a node id).
    pub fn reroot(&self, flag: usize) -> Result<Self> {
        if self.kinds.get(flag) != Some(&BlossomKind::Flag) {
            if flag == 0 {
                return Ok(self.clone());
            }
            return Err(Error::Blossom(format!("node {flag} is not a normal flag")));
        }
        Ok(reroot_unchecked(&self.kinds, flag))
    }

    /// Rerooting at the flag reached by step `p` (1-based) of the walk;
    /// the resulting walk is `cyclic_shift(walk, p)`.
    pub fn reroot_at_step(&self, p: usize) -> Result<Self> {
        let leaves = self.kinds.len() - 1 - self.inner_count();
        if p == leaves + 1 {
            return Ok(self.clone());
        }
        if p == 0 || p > leaves {
            return Err(Error::Blossom(format!("no step {p}")));
        }
        let v = (1..self.kinds.len())
            .filter(|&v| self.kinds[v].is_leaf())
            .nth(p - 1)
            .expect("counted above");
        self.reroot(v)
    }

    pub fn to_embedded(&self) -> EmbeddedTree {
        blossom_to_embedded(self)
    }

    pub fn is_well_labelled(&self) -> bool {
        walks::is_positive_unchecked(self.walk().steps(), 2)
    }
}

/// `S` for the special flag, `A` arrow, `F` flag, `( … )` around the three
/// children of an inner node: `SF`, `S(AFF)`, …
impl fmt::Display for BlossomTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::with_capacity(self.kinds.len() * 2);
        // Remaining children of each open inner node.
        let mut open: Vec<u8> = Vec::new();
        for &k in &self.kinds {
            match k {
                BlossomKind::Special => out.push('S'),
                BlossomKind::Arrow => out.push('A'),
                BlossomKind::Flag => out.push('F'),
                BlossomKind::Inner => {
                    out.push('(');
                    open.push(4);
                }
            }
            while let Some(left) = open.last_mut() {
                *left -= 1;
                if *left > 0 {
                    break;
                }
                open.pop();
                out.push(')');
            }
        }
        f.write_str(&out)
    }
}

impl FromStr for BlossomTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut kinds = Vec::with_capacity(s.len());
        let mut depth = 0usize;
        let mut counts: Vec<usize> = Vec::new();
        for c in s.trim().chars() {
            match c {
                'S' => kinds.push(BlossomKind::Special),
                'A' => kinds.push(BlossomKind::Arrow),
                'F' => kinds.push(BlossomKind::Flag),
                '(' => {
                    kinds.push(BlossomKind::Inner);
                    depth += 1;
                    counts.push(0);
                    continue;
                }
                ')' => {
                    if counts.pop() != Some(3) {
                        return Err(Error::Blossom("inner nodes need three children".into()));
                    }
                    depth -= 1;
                }
                _ => return Err(Error::Parse(format!("unexpected character {c:?}"))),
            }
            if let Some(top) = counts.last_mut() {
                *top += 1;
            }
        }
        if depth != 0 {
            return Err(Error::Blossom("unbalanced parentheses".into()));
        }
        Self::from_kinds(kinds)
    }
}

/// `ends[v]`: one past the last node of the subtree of `v` in preorder.
fn subtree_ends(kinds: &[BlossomKind]) -> Vec<u32> {
    let len = kinds.len();
    let mut ends = vec![0u32; len + 1];
    ends[len] = len as u32;
    for v in (0..len).rev() {
        ends[v] = match kinds[v] {
            BlossomKind::Inner => {
                let c1 = ends[v + 1];
                let c2 = ends[c1 as usize];
                ends[c2 as usize]
            }
            BlossomKind::Special if v == 0 => ends[1],
            _ => v as u32 + 1,
        };
    }
    ends
}

/// The three children of inner node `v`.
fn inner_slots(ends: &[u32], v: usize) -> [usize; 3] {
    let c0 = v + 1;
    let c1 = ends[c0] as usize;
    [c0, c1, ends[c1] as usize]
}

/// Children minus one: the Łukasiewicz weight of a node. Every complete
/// subtree has total weight −1 and each of its proper suffixes a negative
/// weight.
fn weight(v: usize, k: BlossomKind) -> i64 {
    match k {
        BlossomKind::Inner => 2,
        BlossomKind::Special if v == 0 => 0,
        _ => -1,
    }
}

/// Rerooting at leaf `flag` in two scans of the preorder sequence.
///
/// Let `v_1, …, v_r = 0` be the ancestors of `flag`, nearest first. Each
/// `v_i` is now entered from its child on the path, so it lists its later
/// children, then its old parent, then its earlier children. In preorder the
/// later children of `v_1, v_2, …` fill `flag + 1..` in that order, and the
/// earlier children of `v_i` fill `v_i + 1..v_{i-1}`, so the new sequence is
/// `v_1, later(v_1), v_2, later(v_2), …, v_r, earlier(v_r), …, earlier(v_1)`.
fn reroot_unchecked(kinds: &[BlossomKind], flag: usize) -> BlossomTree {
    let children = |v: usize| weight(v, kinds[v]) + 1;
    // Ancestors with the slot of the path child, found scanning backwards:
    // the parent of `i` is the first `j < i` whose weight sum over `j..i`
    // becomes nonnegative, and that sum is `children − 1 − slot`.
    let mut spine: Vec<(usize, i64)> = Vec::new();
    let mut i = flag;
    while i > 0 {
        let mut c = 0i64;
        let mut j = i;
        loop {
            j -= 1;
            c += weight(j, kinds[j]);
            if c >= 0 {
                break;
            }
        }
        spine.push((j, children(j) - 1 - c));
        i = j;
    }
    let mut out = Vec::with_capacity(kinds.len());
    out.push(BlossomKind::Special);
    let mut pos = flag + 1;
    for &(v, slot) in &spine {
        out.push(if v == 0 { BlossomKind::Flag } else { kinds[v] });
        // Later children: complete subtrees whose weights reach −need.
        let need = children(v) - 1 - slot;
        let start = pos;
        let mut c = 0i64;
        while c > -need {
            c += weight(pos, kinds[pos]);
            pos += 1;
        }
        out.extend_from_slice(&kinds[start..pos]);
    }
    let mut below = flag;
    let earlier: Vec<(usize, usize)> = spine
        .iter()
        .map(|&(v, _)| {
            let range = (v + 1, below);
            below = v;
            range
        })
        .collect();
    for &(a, b) in earlier.iter().rev() {
        out.extend_from_slice(&kinds[a..b]);
    }
    debug_assert_eq!(out.len(), kinds.len());
    BlossomTree { kinds: out }
}

/// Border walk from the root: arrows raise the current label, flags lower
/// it and take its value. The current label starts at 2.
pub fn labelling_process(b: &BlossomTree) -> FlagLabelling {
    let mut current = 2i64;
    let mut flag_labels = Vec::with_capacity(b.inner_count() + 1);
    for (v, &k) in b.kinds.iter().enumerate().skip(1) {
        match k {
            BlossomKind::Arrow => current += 1,
            BlossomKind::Flag => {
                current -= 1;
                flag_labels.push((v, current));
            }
            _ => {}
        }
    }
    FlagLabelling {
        flag_labels,
        walk: b.walk(),
    }
}

/// Position of the arrow among the three slots of an inner node, given the
/// increment of the edge it encodes.
fn arrow_slot(kappa: i8) -> usize {
    match kappa {
        1 => 0,
        0 => 1,
        _ => 2,
    }
}

/// Slots holding (first subtree, rest of the tree) for an arrow slot.
fn decoration_slots(arrow: usize) -> (usize, usize) {
    match arrow {
        0 => (1, 2),
        1 => (0, 2),
        _ => (1, 0),
    }
}

/// Applies the local rules until no flag is decorated.
///
/// Expanding a flag decorated by a tree with root label `e` creates an inner
/// node whose three slots hold the arrow, the first root subtree (root label
/// `e + κ`) and the remaining tree (root label `e`); the arrow position is
/// the one that makes the labelling process write those labels.
pub fn embedded_to_blossom(u: &EmbeddedTree) -> BlossomTree {
    let tree = u.tree();
    enum Item {
        Arrow,
        /// Decorated flag: the tree at `vertex` restricted to the children
        /// from `next` on.
        Slot {
            vertex: u32,
            next: u32,
        },
    }
    let mut kinds = Vec::with_capacity(3 * tree.edge_count() + 2);
    kinds.push(BlossomKind::Special);
    let mut stack = vec![Item::Slot {
        vertex: 0,
        next: tree.first_child(0).unwrap_or(NIL),
    }];
    while let Some(item) = stack.pop() {
        match item {
            Item::Arrow => kinds.push(BlossomKind::Arrow),
            Item::Slot { next: NIL, .. } => kinds.push(BlossomKind::Flag),
            Item::Slot {
                vertex,
                next: child,
            } => {
                kinds.push(BlossomKind::Inner);
                let arrow = arrow_slot(u.increment(child));
                let (first, rest) = decoration_slots(arrow);
                let mut slots = [Item::Arrow, Item::Arrow, Item::Arrow];
                slots[first] = Item::Slot {
                    vertex: child,
                    next: tree.first_child(child).unwrap_or(NIL),
                };
                slots[rest] = Item::Slot {
                    vertex,
                    next: tree.next_sibling(child).unwrap_or(NIL),
                };
                stack.extend(slots.into_iter().rev());
            }
        }
    }
    BlossomTree { kinds }
}

/// Inverse of [`embedded_to_blossom`]; the result has root label 1.
pub fn blossom_to_embedded(b: &BlossomTree) -> EmbeddedTree {
    let ends = subtree_ends(&b.kinds);
    let n = b.inner_count();
    let mut parents = Vec::with_capacity(n + 1);
    let mut increments = Vec::with_capacity(n + 1);
    parents.push(NIL);
    increments.push(0i8);
    // (blossom node, embedded vertex decorating it)
    let mut stack: Vec<(usize, u32)> = vec![(1, 0)];
    while let Some((node, vertex)) = stack.pop() {
        if b.kinds[node] != BlossomKind::Inner {
            continue;
        }
        let slots = inner_slots(&ends, node);
        let arrow = slots
            .iter()
            .position(|&c| b.kinds[c] == BlossomKind::Arrow)
            .expect("validated blossom tree");
        let kappa = match arrow {
            0 => 1,
            1 => 0,
            _ => -1,
        };
        let (first, rest) = decoration_slots(arrow);
        let child = parents.len() as u32;
        parents.push(vertex);
        increments.push(kappa);
        stack.push((slots[rest], vertex));
        stack.push((slots[first], child));
    }
    EmbeddedTree::from_parts_unchecked(PlaneTree::from_parents_unchecked(&parents), increments, 1)
}

/// Distinct rerootings of `b` over all its flags, `b` included, sorted.
pub fn conjugacy_class(b: &BlossomTree) -> Vec<BlossomTree> {
    let mut class: BTreeSet<BlossomTree> = b
        .normal_flags()
        .into_iter()
        .map(|f| reroot_unchecked(&b.kinds, f))
        .collect();
    class.insert(b.clone());
    class.into_iter().collect()
}

/// A coupled pair: `embedded` uniform on embedded trees with root label 1,
/// `well` uniform on well-labelled trees, both in one conjugacy class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoupledPair {
    pub well: WellLabelledTree,
    pub embedded: EmbeddedTree,
}

pub fn sample_well_labelled_coupled<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CoupledPair {
    let embedded = labelled::sample_embedded(n, 1, rng);
    let well = conjugate_well_labelled(&embedded, rng);
    CoupledPair { well, embedded }
}

/// Moves the special flag of the blossom tree of `u` to one of the two flags
/// at the low records of its walk, chosen uniformly.
pub fn conjugate_well_labelled<R: Rng + ?Sized>(u: &EmbeddedTree, rng: &mut R) -> WellLabelledTree {
    let b = embedded_to_blossom(u);
    let walk = b.walk();
    let records = walks::low_records_unchecked(walk.steps(), 2);
    let p = records[rng.random_range(0..2usize)];
    let rerooted = b.reroot_at_step(p).expect("low records are flag steps");
    debug_assert!(walks::is_positive_unchecked(rerooted.walk().steps(), 2));
    WellLabelledTree::new_unchecked(blossom_to_embedded(&rerooted))
}

/// Which bound of the coupling inequalities failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CouplingViolation {
    /// `Λ̂_{k-2}(U) ≤ λ̂_k(W) ≤ Λ̂_{k+2}(U)` fails at `k`.
    Cumulative { k: i64 },
    /// `|μ − (M − m)| > 3`.
    Width { mu: i64, max: i64, min: i64 },
}

pub fn check_coupling(
    well: &LabelDistribution,
    embedded: &LabelDistribution,
) -> Vec<CouplingViolation> {
    let mut out = Vec::new();
    let span = (well.max_label() - well.min_label() + 1)
        .max(embedded.max_label() - embedded.min_label() + 1);
    // Well-labelled trees have minimum label 1, so λ̂_k counts labels ≤ k.
    for k in 1..=span + 3 {
        let mid = well.cumulative(k);
        if embedded.cumulative(k - 2) > mid || mid > embedded.cumulative(k + 2) {
            out.push(CouplingViolation::Cumulative { k });
        }
    }
    let (mu, max, min) = (well.max_label(), embedded.max_label(), embedded.min_label());
    if (mu - (max - min)).abs() > 3 {
        out.push(CouplingViolation::Width { mu, max, min });
    }
    out
}
