//! The bijection between well-labelled trees with `n` edges and rooted
//! quadrangulations with `n` faces.
//!
//! Tree to map: every corner of the tree is joined to its successor, the
//! next corner in contour order carrying a label one less; corners labelled
//! 1 are joined to an extra vertex `v0`. The tree edges are then dropped.
//!
//! Map to tree: labels are distances from the root vertex; every face is
//! either simple (labels `e, e+1, e+2, e+1`) or confluent (`e, e+1, e, e+1`).
//! A simple face contributes the edge reaching its largest label, a confluent
//! face the diagonal joining its two largest labels.

use crate::error::{Error, Result};
use crate::labelled::{EmbeddedTree, WellLabelledTree};
use crate::planar_map::{build_map, Quadrangulation};
use crate::trees::{PlaneTree, NIL};

/// `Q(T)`. Darts `2t` and `2t + 1` form the arc leaving corner `t`; the root
/// dart is dart 1, the end at `v0` of the arc leaving the root corner.
pub fn tree_to_quad(w: &WellLabelledTree) -> Result<Quadrangulation> {
    let n = w.edge_count();
    if n == 0 {
        return Err(Error::EmptyBijection);
    }
    let tree = w.tree();
    let labels = w.labels();
    let contour = tree.contour();
    let corners = 2 * n;
    let corner_label = |t: usize| labels[contour[t] as usize];
    let max_label = labels.iter().copied().max().unwrap_or(1) as usize;

    // succ[t] for labels ≥ 2; `corners` stands for corner 0 seen again.
    let mut succ = vec![NIL; corners];
    let mut last_seen = vec![NIL; max_label + 1];
    last_seen[1] = corners as u32;
    for t in (0..corners).rev() {
        let l = corner_label(t) as usize;
        if l >= 2 {
            let s = last_seen[l - 1];
            debug_assert_ne!(s, NIL, "labels move by at most one along the contour");
            succ[t] = if s as usize == corners { 0 } else { s };
        }
        last_seen[l] = t as u32;
    }

    // Incoming arcs per corner, nearest (largest source) first.
    let mut in_start = vec![0u32; corners + 1];
    for &s in &succ {
        if s != NIL {
            in_start[s as usize + 1] += 1;
        }
    }
    for c in 0..corners {
        in_start[c + 1] += in_start[c];
    }
    let mut fill = in_start.clone();
    let mut incoming = vec![0u32; in_start[corners] as usize];
    for t in (0..corners).rev() {
        let s = succ[t];
        if s != NIL {
            incoming[fill[s as usize] as usize] = (2 * t + 1) as u32;
            fill[s as usize] += 1;
        }
    }

    let darts = 2 * corners;
    let v0 = n + 1;
    let mut twin = vec![0u32; darts];
    for t in 0..corners {
        twin[2 * t] = (2 * t + 1) as u32;
        twin[2 * t + 1] = (2 * t) as u32;
    }
    let mut next = vec![NIL; darts];
    let mut first = vec![NIL; n + 2];
    let mut last = vec![NIL; n + 2];
    let mut push = |v: usize, d: u32| {
        if last[v] == NIL {
            first[v] = d;
        } else {
            next[last[v] as usize] = d;
        }
        last[v] = d;
    };
    for t in 0..corners {
        let v = contour[t] as usize;
        for &d in &incoming[in_start[t] as usize..in_start[t + 1] as usize] {
            push(v, d);
        }
        push(v, (2 * t) as u32);
    }
    for t in (0..corners).rev() {
        if corner_label(t) == 1 {
            push(v0, (2 * t + 1) as u32);
        }
    }
    for v in 0..n + 2 {
        next[last[v] as usize] = first[v];
    }
    let map = build_map(twin, next, 1)?;
    Ok(Quadrangulation::new(map)?)
}

/// `T(Q)`, the inverse of [`tree_to_quad`].
pub fn quad_to_tree(q: &Quadrangulation) -> Result<WellLabelledTree> {
    let map = q.map();
    if q.face_count() == 0 {
        return Err(Error::EmptyBijection);
    }
    let n = q.face_count();
    let darts = map.dart_count();
    let dist = map.distances();
    let label = |d: u32| dist[map.origin(d) as usize];

    // selected[x]: the edge of dart x is a tree edge. diag_after[x]: a
    // confluent-face diagonal leaves origin(x) right after x in σ order.
    let mut selected = vec![false; darts];
    let mut diag_after = vec![NIL; darts];
    let mut seen = vec![false; darts];
    for start in 0..darts as u32 {
        if seen[start as usize] {
            continue;
        }
        let mut face = [0u32; 4];
        let mut d = start;
        for slot in face.iter_mut() {
            seen[d as usize] = true;
            *slot = d;
            d = map.face_next(d);
        }
        let l = face.map(label);
        let top = (0..4).max_by_key(|&j| l[j]).expect("four darts");
        if l[0] == l[2] && l[1] == l[3] {
            // Confluent: the diagonal joins the corners of this face at the two
            // vertices with the larger label.
            for j in [top, (top + 2) % 4] {
                let corner_dart = map.twin(face[(j + 3) % 4]);
                diag_after[corner_dart as usize] = map.origin(face[(j + 2) % 4]);
            }
        } else {
            let d = face[(top + 3) % 4];
            selected[d as usize] = true;
            selected[map.twin(d) as usize] = true;
        }
    }

    // Tree neighbours of every vertex in σ order, as a flat list.
    let vertices = map.vertex_count();
    let mut start = vec![0u32; vertices + 1];
    let mut nbrs: Vec<u32> = Vec::with_capacity(2 * n);
    // Position in `nbrs` of the neighbour following dart x, for locating
    // where the root's children begin.
    let mut pos_after = vec![NIL; darts];
    for v in 0..vertices as u32 {
        start[v as usize] = nbrs.len() as u32;
        for x in map.darts_around(v) {
            if selected[x as usize] {
                nbrs.push(map.target(x));
            }
            pos_after[x as usize] = nbrs.len() as u32;
            if diag_after[x as usize] != NIL {
                nbrs.push(diag_after[x as usize]);
            }
        }
    }
    start[vertices] = nbrs.len() as u32;
    if nbrs.len() != 2 * n {
        return Err(Error::Parse(format!(
            "selection produced {} tree edges, expected {n}",
            nbrs.len() / 2
        )));
    }

    let root_dart = map.root();
    let root = map.target(root_dart);
    let v0 = map.origin(root_dart);
    let root_first = pos_after[map.twin(root_dart) as usize];

    // Depth-first traversal; each vertex lists children cyclically after the
    // edge it was entered from.
    let mut parents: Vec<u32> = Vec::with_capacity(n + 1);
    let mut increments: Vec<i8> = Vec::with_capacity(n + 1);
    let mut new_id = vec![NIL; vertices];
    // (vertex, parent vertex, parent id, first neighbour position)
    let mut stack: Vec<(u32, u32, u32, u32)> = vec![(root, NIL, NIL, root_first)];
    while let Some((v, parent, parent_id, first)) = stack.pop() {
        if new_id[v as usize] != NIL || v == v0 {
            return Err(Error::Parse("selected edges do not form a tree".into()));
        }
        let id = parents.len() as u32;
        new_id[v as usize] = id;
        parents.push(parent_id);
        increments.push(if parent == NIL {
            0
        } else {
            (dist[v as usize] as i64 - dist[parent as usize] as i64) as i8
        });
        let (lo, hi) = (start[v as usize], start[v as usize + 1]);
        let deg = hi - lo;
        let offset = if parent == NIL {
            first.clamp(lo, hi) - lo
        } else {
            let at = nbrs[lo as usize..hi as usize]
                .iter()
                .position(|&x| x == parent)
                .expect("parent is a neighbour") as u32;
            at + 1
        };
        let children = if parent == NIL { deg } else { deg - 1 };
        for i in (0..children).rev() {
            let c = nbrs[(lo + (offset + i) % deg.max(1)) as usize];
            stack.push((c, v, id, 0));
        }
    }
    if parents.len() != n + 1 {
        return Err(Error::Parse("selected edges do not span the map".into()));
    }
    let tree = PlaneTree::from_parents_unchecked(&parents);
    let embedded = EmbeddedTree::from_parts_unchecked(tree, increments, 1);
    WellLabelledTree::new(embedded)
}
