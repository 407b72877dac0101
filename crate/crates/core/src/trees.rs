//! Rooted plane trees, their Dyck-path and balanced-parenthesis encodings,
//! contour traversal, uniform sampling, and shape extraction.
//!
//! Vertices are numbered in preorder (first visit of the contour traversal),
//! so vertex 0 is the root and every parent precedes its children.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::walks::LatticeWalk;

pub(crate) const NIL: u32 = u32::MAX;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PlaneTree {
    parent: Vec<u32>,
    first_child: Vec<u32>,
    next_sibling: Vec<u32>,
}

impl fmt::Debug for PlaneTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PlaneTree({self})")
    }
}

impl PlaneTree {
    pub fn single_vertex() -> Self {
        Self {
            parent: vec![NIL],
            first_child: vec![NIL],
            next_sibling: vec![NIL],
        }
    }

    /// Builds a tree from a preorder parent array (`parents[0]` is ignored).
    ///
    /// Children of a vertex are ordered by increasing id.
    pub fn from_preorder_parents(parents: &[u32]) -> Result<Self> {
        if parents.is_empty() {
            return Err(Error::Parse("a tree has at least one vertex".into()));
        }
        for (v, &p) in parents.iter().enumerate().skip(1) {
            if p as usize >= v {
                return Err(Error::Parse(format!(
                    "vertex {v} has parent {p}, parents must precede children"
                )));
            }
        }
        let mut tree = Self::from_parents_unchecked(parents);
        // Preorder also requires every subtree to be a contiguous id range.
        let mut expected = 1u32;
        let mut stack = vec![0u32];
        while let Some(v) = stack.pop() {
            let kids: Vec<u32> = tree.children(v).collect();
            for &c in kids.iter().rev() {
                stack.push(c);
            }
            if v != 0 {
                if v != expected {
                    return Err(Error::Parse("parent array is not in preorder".into()));
                }
                expected += 1;
            }
        }
        tree.parent[0] = NIL;
        Ok(tree)
    }

    pub(crate) fn from_parents_unchecked(parents: &[u32]) -> Self {
        let len = parents.len();
        let mut parent = parents.to_vec();
        parent[0] = NIL;
        let mut first_child = vec![NIL; len];
        let mut next_sibling = vec![NIL; len];
        let mut last_child = vec![NIL; len];
        for v in 1..len {
            let p = parent[v] as usize;
            if last_child[p] == NIL {
                first_child[p] = v as u32;
            } else {
                next_sibling[last_child[p] as usize] = v as u32;
            }
            last_child[p] = v as u32;
        }
        Self {
            parent,
            first_child,
            next_sibling,
        }
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn edge_count(&self) -> usize {
        self.parent.len() - 1
    }

    pub fn parent(&self, v: u32) -> Option<u32> {
        let p = self.parent[v as usize];
        (p != NIL).then_some(p)
    }

    pub fn first_child(&self, v: u32) -> Option<u32> {
        let c = self.first_child[v as usize];
        (c != NIL).then_some(c)
    }

    pub fn next_sibling(&self, v: u32) -> Option<u32> {
        let c = self.next_sibling[v as usize];
        (c != NIL).then_some(c)
    }

    pub fn children(&self, v: u32) -> Children<'_> {
        Children {
            tree: self,
            next: self.first_child[v as usize],
        }
    }

    pub fn child_count(&self, v: u32) -> usize {
        self.children(v).count()
    }

    pub fn is_leaf(&self, v: u32) -> bool {
        self.first_child[v as usize] == NIL
    }

    pub(crate) fn parents_raw(&self) -> &[u32] {
        &self.parent
    }

    /// Depth of every vertex.
    pub fn depths(&self) -> Vec<u32> {
        let mut d = vec![0u32; self.node_count()];
        for v in 1..self.node_count() {
            d[v] = d[self.parent[v] as usize] + 1;
        }
        d
    }

    pub fn height(&self) -> u32 {
        self.depths().into_iter().max().unwrap_or(0)
    }

    /// Vertex sequence `v_0, …, v_{2n}` of the contour traversal.
    pub fn contour(&self) -> Vec<u32> {
        let n = self.edge_count();
        let mut out = Vec::with_capacity(2 * n + 1);
        out.push(0);
        // Iterative walk: at each vertex either descend to the next unvisited
        // child or return to the parent.
        let mut next = self.first_child.clone();
        let mut v = 0u32;
        while out.len() < 2 * n + 1 {
            let c = next[v as usize];
            if c != NIL {
                next[v as usize] = self.next_sibling[c as usize];
                v = c;
            } else {
                v = self.parent[v as usize];
            }
            out.push(v);
        }
        out
    }

    /// Dyck path of the tree: up when the contour moves away from the root.
    pub fn to_dyck(&self) -> LatticeWalk {
        tree_to_dyck(self)
    }

    pub fn from_dyck(walk: &LatticeWalk) -> Result<Self> {
        dyck_to_tree(walk)
    }

    /// Balanced parentheses including the root: `()` is the single vertex.
    pub fn to_bp_string(&self) -> String {
        let mut s = String::with_capacity(2 * self.node_count());
        s.push('(');
        for &step in self.to_dyck().steps() {
            s.push(if step == 1 { '(' } else { ')' });
        }
        s.push(')');
        s
    }
}

impl fmt::Display for PlaneTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bp_string())
    }
}

impl FromStr for PlaneTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bytes = s.as_bytes();
        if bytes.len() < 2 || bytes[0] != b'(' || bytes[bytes.len() - 1] != b')' {
            return Err(Error::Parse(format!(
                "not a balanced-parenthesis tree: {s:?}"
            )));
        }
        let steps = bytes[1..bytes.len() - 1]
            .iter()
            .map(|&b| match b {
                b'(' => Ok(1),
                b')' => Ok(-1),
                _ => Err(Error::Parse(format!(
                    "unexpected character {:?}",
                    b as char
                ))),
            })
            .collect::<Result<Vec<i8>>>()?;
        dyck_to_tree(&LatticeWalk::from_steps_unchecked(steps))
    }
}

pub struct Children<'a> {
    tree: &'a PlaneTree,
    next: u32,
}

impl Iterator for Children<'_> {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.next == NIL {
            return None;
        }
        let c = self.next;
        self.next = self.tree.next_sibling[c as usize];
        Some(c)
    }
}

pub fn tree_to_dyck(tree: &PlaneTree) -> LatticeWalk {
    let contour = tree.contour();
    let steps = contour
        .windows(2)
        .map(|w| {
            if tree.parent[w[1] as usize] == w[0] {
                1
            } else {
                -1
            }
        })
        .collect();
    LatticeWalk::from_steps_unchecked(steps)
}

pub fn dyck_to_tree(walk: &LatticeWalk) -> Result<PlaneTree> {
    if !walk.is_binary() {
        return Err(Error::NotDyck("increments must be ±1"));
    }
    if walk.len() % 2 != 0 {
        return Err(Error::NotDyck("odd length"));
    }
    let mut parents = Vec::with_capacity(walk.len() / 2 + 1);
    parents.push(NIL);
    let mut current = 0u32;
    for &s in walk.steps() {
        if s == 1 {
            let id = parents.len() as u32;
            parents.push(current);
            current = id;
        } else {
            if current == 0 {
                return Err(Error::NotDyck("walk goes below zero"));
            }
            current = parents[current as usize];
        }
    }
    if current != 0 {
        return Err(Error::NotDyck("walk does not return to zero"));
    }
    Ok(PlaneTree::from_parents_unchecked(&parents))
}

/// Uniform random word with `ups` up steps and `downs` down steps, O(len).
///
/// Fair bits are drawn 64 at a time; the surplus letters are then flipped at
/// uniformly chosen positions holding the majority letter. Both stages
/// commute with permutations of positions, so the result is exchangeable
/// with a fixed letter count, hence uniform.
pub(crate) fn random_binary_word<R: Rng + ?Sized>(
    rng: &mut R,
    ups: usize,
    downs: usize,
) -> Vec<i8> {
    let len = ups + downs;
    let mut word = Vec::with_capacity(len);
    while word.len() < len {
        let bits = rng.next_u64();
        let take = (len - word.len()).min(64);
        word.extend((0..take).map(|i| if bits >> i & 1 == 1 { 1i8 } else { -1 }));
    }
    let have = word.iter().filter(|&&s| s == 1).count();
    let (from, surplus) = if have > ups {
        (1i8, have - ups)
    } else {
        (-1i8, ups - have)
    };
    // Positions already flipped hold `-from`, so each flip lands on a fresh
    // majority position. Callers keep the counts within one of each other,
    // so every probe succeeds with probability close to one half.
    let mut flipped = 0;
    while flipped < surplus {
        let i = rng.random_range(0..len);
        if word[i] == from {
            word[i] = -from;
            flipped += 1;
        }
    }
    word
}

/// Uniform Dyck path with `n` up steps.
///
/// A uniform word with `n` ups and `n+1` downs is rotated so that its first
/// visit to the global minimum becomes the last step (the unique positive
/// rotation for `k = 1`); dropping that step leaves a uniform Dyck path.
pub fn sample_dyck_path<R: Rng + ?Sized>(n: usize, rng: &mut R) -> LatticeWalk {
    let word = random_binary_word(rng, n, n + 1);
    let mut h = 0i64;
    let mut min = 0i64;
    let mut first_min = 0usize;
    for (i, &s) in word.iter().enumerate() {
        h += s as i64;
        if h < min {
            min = h;
            first_min = i + 1;
        }
    }
    let mut steps = Vec::with_capacity(2 * n);
    steps.extend_from_slice(&word[first_min..]);
    steps.extend_from_slice(&word[..first_min - 1]);
    LatticeWalk::from_steps_unchecked(steps)
}

pub fn sample_plane_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PlaneTree {
    dyck_to_tree(&sample_dyck_path(n, rng)).expect("cycle-lemma rotation yields a Dyck path")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeVertexKind {
    Root,
    Fixed,
    Branchpoint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShapeVertex {
    /// Host-tree vertex id.
    pub host: u32,
    /// Shape parent (index into `Shape::vertices`).
    pub parent: Option<usize>,
    pub kind: ShapeVertexKind,
    /// Indices `i` (0-based) of the contour times that land on this vertex.
    pub fixed_times: Vec<usize>,
    pub child_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Superedge {
    pub parent: usize,
    pub child: usize,
    /// Number of host edges.
    pub length: u32,
}

/// Minimal subtree spanned by the root and the vertices visited at chosen
/// contour times, with smooth vertices contracted.
///
/// Vertices are in prefix order; `edges[j]` is the superedge `η_{j+1}` and
/// leads to `vertices[j + 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Shape {
    pub vertices: Vec<ShapeVertex>,
    pub edges: Vec<Superedge>,
    /// Shape vertex of each contour time, in time order.
    pub fixed: Vec<usize>,
}

impl Shape {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("shape serializes")
    }

    /// Superedge indices on the path from vertex `v` to the root.
    pub fn root_path_edges(&self, mut v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while v != 0 {
            out.push(v - 1);
            v = self.vertices[v]
                .parent
                .expect("non-root vertices have a parent");
        }
        out
    }

    /// Binary: the root has one child, every branchpoint exactly two, fixed
    /// vertices are distinct leaves.
    pub fn is_binary(&self) -> bool {
        self.binary_check().is_ok()
    }

    fn binary_check(&self) -> Result<()> {
        for v in &self.vertices {
            match v.kind {
                ShapeVertexKind::Root => {
                    if !v.fixed_times.is_empty() {
                        return Err(Error::NonBinaryShape("the root is a fixed vertex"));
                    }
                    if v.child_count != 1 {
                        return Err(Error::NonBinaryShape("the root is a branchpoint"));
                    }
                }
                ShapeVertexKind::Fixed => {
                    if v.fixed_times.len() != 1 {
                        return Err(Error::NonBinaryShape("two times share a fixed vertex"));
                    }
                    if v.child_count != 0 {
                        return Err(Error::NonBinaryShape(
                            "a fixed vertex lies on another fixed vertex's root path",
                        ));
                    }
                }
                ShapeVertexKind::Branchpoint => {
                    if v.child_count != 2 {
                        return Err(Error::NonBinaryShape(
                            "a branchpoint has more than two children",
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn extract_shape(tree: &PlaneTree, times: &[usize]) -> Result<Shape> {
    let len = 2 * tree.edge_count();
    if times.is_empty() || times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::TimesNotIncreasing);
    }
    if let Some(&t) = times.iter().find(|&&t| t == 0 || t >= len) {
        return Err(Error::TimeOutOfRange { time: t, len });
    }
    let contour = tree.contour();
    let nodes = tree.node_count();

    // Mark the spanned subtree and count children inside it.
    let mut marked = vec![false; nodes];
    let mut sub_children = vec![0u32; nodes];
    let mut fixed_times: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    marked[0] = true;
    for (i, &t) in times.iter().enumerate() {
        let v = contour[t];
        fixed_times[v as usize].push(i);
        let mut u = v;
        while !marked[u as usize] {
            marked[u as usize] = true;
            let p = tree.parent[u as usize];
            sub_children[p as usize] += 1;
            u = p;
        }
    }

    let is_shape_vertex = |v: usize| v == 0 || !fixed_times[v].is_empty() || sub_children[v] >= 2;

    // Preorder ids are prefix order, so a scan in id order lists shape
    // vertices in prefix order.
    let mut shape_index = vec![usize::MAX; nodes];
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let depths = tree.depths();
    for v in 0..nodes {
        if !marked[v] || !is_shape_vertex(v) {
            continue;
        }
        let idx = vertices.len();
        shape_index[v] = idx;
        let kind = if v == 0 {
            ShapeVertexKind::Root
        } else if !fixed_times[v].is_empty() {
            ShapeVertexKind::Fixed
        } else {
            ShapeVertexKind::Branchpoint
        };
        let parent = if v == 0 {
            None
        } else {
            let mut u = tree.parent[v];
            while !is_shape_vertex(u as usize) {
                u = tree.parent[u as usize];
            }
            let p = shape_index[u as usize];
            edges.push(Superedge {
                parent: p,
                child: idx,
                length: depths[v] - depths[u as usize],
            });
            Some(p)
        };
        vertices.push(ShapeVertex {
            host: v as u32,
            parent,
            kind,
            fixed_times: fixed_times[v].clone(),
            child_count: 0,
        });
    }
    for e in &edges {
        vertices[e.parent].child_count += 1;
    }
    let fixed = times
        .iter()
        .map(|&t| shape_index[contour[t] as usize])
        .collect();
    Ok(Shape {
        vertices,
        edges,
        fixed,
    })
}

/// Coordinate attached to a row of the shape matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeCoordinate {
    /// `x_i`, height of the `i`-th fixed vertex (0-based `i`).
    Height(usize),
    /// `m_i`, minimum of the contour between times `i` and `i + 1`.
    Minimum(usize),
}

/// 0/1 matrix sending superedge lengths to the `(x, m)` coordinates of the
/// non-root shape vertices, rows and columns in prefix order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShapeMatrix {
    pub rows: Vec<Vec<u8>>,
    pub coordinates: Vec<ShapeCoordinate>,
}

impl ShapeMatrix {
    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn apply(&self, lengths: &[i64]) -> Vec<i64> {
        self.rows
            .iter()
            .map(|row| row.iter().zip(lengths).map(|(&a, &l)| a as i64 * l).sum())
            .collect()
    }

    pub fn is_lower_unitriangular(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, row)| row[i] == 1 && row[i + 1..].iter().all(|&a| a == 0))
    }

    /// Exact integer determinant by fraction-free elimination (Bareiss).
    pub fn determinant(&self) -> i64 {
        let n = self.size();
        let mut a: Vec<Vec<i128>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if a[k][k] == 0 {
                let Some(swap) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                    return 0;
                };
                a.swap(k, swap);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        if n == 0 {
            return 1;
        }
        (sign * a[n - 1][n - 1]) as i64
    }
}

pub fn shape_matrix(shape: &Shape) -> Result<ShapeMatrix> {
    shape.binary_check()?;
    let q = shape.edges.len();
    let p = shape.fixed.len();
    debug_assert_eq!(q, 2 * p - 1);

    // Branchpoint between consecutive fixed vertices = their lowest common
    // ancestor in the shape.
    let ancestors = |mut v: usize| {
        let mut out = vec![v];
        while let Some(u) = shape.vertices[v].parent {
            out.push(u);
            v = u;
        }
        out
    };
    let mut coordinate = vec![None; shape.vertices.len()];
    for (i, &f) in shape.fixed.iter().enumerate() {
        coordinate[f] = Some(ShapeCoordinate::Height(i));
    }
    for i in 0..p.saturating_sub(1) {
        let a = ancestors(shape.fixed[i]);
        let b = ancestors(shape.fixed[i + 1]);
        let lca = *a
            .iter()
            .find(|v| b.contains(v))
            .expect("shape vertices share the root");
        coordinate[lca] = Some(ShapeCoordinate::Minimum(i));
    }

    let mut rows = Vec::with_capacity(q);
    let mut coordinates = Vec::with_capacity(q);
    for v in 1..shape.vertices.len() {
        let mut row = vec![0u8; q];
        for e in shape.root_path_edges(v) {
            row[e] = 1;
        }
        rows.push(row);
        coordinates.push(coordinate[v].ok_or(Error::NonBinaryShape(
            "a branchpoint is not the meeting point of consecutive fixed vertices",
        ))?);
    }
    Ok(ShapeMatrix { rows, coordinates })
}
