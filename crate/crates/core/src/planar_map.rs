//! Rooted planar maps as rotation systems.
//!
//! Darts are dense ids. `twin` (α) pairs the two darts of an edge and `next`
//! (σ) gives the counterclockwise successor of a dart around its origin.
//! Faces are the orbits of `φ = σ ∘ α`; the corner between `x` and `σ(x)`
//! belongs to the face of `α(x)`.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("a map needs at least one edge")]
    Empty,
    #[error("twin has {twin} entries but next has {next}")]
    LengthMismatch { twin: usize, next: usize },
    #[error("dart {dart} is out of range")]
    DartOutOfRange { dart: u32 },
    #[error("twin is not a fixed-point-free involution at dart {dart}")]
    NotInvolution { dart: u32 },
    #[error("next is not a permutation: dart {dart} has two preimages")]
    NotPermutation { dart: u32 },
    #[error("the map is not connected")]
    Disconnected,
    #[error("the map has genus {genus}, expected a planar map")]
    NotPlanar { genus: i64 },
    #[error("face containing dart {dart} has degree {degree}, expected 4")]
    NotQuadrangulation { dart: u32, degree: usize },
    #[error("malformed map text: {0}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct MapData {
    root: u32,
    twin: Vec<u32>,
    next: Vec<u32>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PlanarMap {
    twin: Vec<u32>,
    next: Vec<u32>,
    root: u32,
    vertex_of: Vec<u32>,
    /// One dart per vertex.
    vertex_dart: Vec<u32>,
    face_count: usize,
}

impl fmt::Debug for PlanarMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlanarMap")
            .field("root", &self.root)
            .field("twin", &self.twin)
            .field("next", &self.next)
            .finish()
    }
}

/// Validates a rotation system and builds the map.
pub fn build_map(twin: Vec<u32>, next: Vec<u32>, root: u32) -> Result<PlanarMap, MapError> {
    let len = twin.len();
    if len == 0 {
        return Err(MapError::Empty);
    }
    if next.len() != len {
        return Err(MapError::LengthMismatch {
            twin: len,
            next: next.len(),
        });
    }
    if root as usize >= len {
        return Err(MapError::DartOutOfRange { dart: root });
    }
    for (d, &t) in twin.iter().enumerate() {
        if t as usize >= len {
            return Err(MapError::DartOutOfRange { dart: t });
        }
        if t as usize == d || twin[t as usize] as usize != d {
            return Err(MapError::NotInvolution { dart: d as u32 });
        }
    }
    let mut seen = vec![false; len];
    for &s in &next {
        if s as usize >= len {
            return Err(MapError::DartOutOfRange { dart: s });
        }
        if std::mem::replace(&mut seen[s as usize], true) {
            return Err(MapError::NotPermutation { dart: s });
        }
    }

    let (vertex_of, vertex_dart) = orbits(&next, |d| next[d as usize]);
    let (_, faces) = orbits(&next, |d| next[twin[d as usize] as usize]);
    let map = PlanarMap {
        twin,
        next,
        root,
        vertex_of,
        vertex_dart,
        face_count: faces.len(),
    };
    if !map.is_connected() {
        return Err(MapError::Disconnected);
    }
    let euler = map.euler_characteristic();
    if euler != 2 {
        return Err(MapError::NotPlanar {
            genus: (2 - euler) / 2,
        });
    }
    Ok(map)
}

/// Orbit index of every dart and one representative per orbit.
fn orbits(darts: &[u32], step: impl Fn(u32) -> u32) -> (Vec<u32>, Vec<u32>) {
    let mut id = vec![NIL; darts.len()];
    let mut reps = Vec::new();
    for start in 0..darts.len() as u32 {
        if id[start as usize] != NIL {
            continue;
        }
        let k = reps.len() as u32;
        reps.push(start);
        let mut d = start;
        loop {
            id[d as usize] = k;
            d = step(d);
            if d == start {
                break;
            }
        }
    }
    (id, reps)
}

impl PlanarMap {
    pub fn dart_count(&self) -> usize {
        self.twin.len()
    }

    pub fn edge_count(&self) -> usize {
        self.twin.len() / 2
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_dart.len()
    }

    pub fn face_count(&self) -> usize {
        self.face_count
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count as i64
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn root_vertex(&self) -> u32 {
        self.vertex_of[self.root as usize]
    }

    pub fn twin(&self, d: u32) -> u32 {
        self.twin[d as usize]
    }

    pub fn next(&self, d: u32) -> u32 {
        self.next[d as usize]
    }

    /// `φ(d) = σ(α(d))`.
    pub fn face_next(&self, d: u32) -> u32 {
        self.next[self.twin[d as usize] as usize]
    }

    pub fn origin(&self, d: u32) -> u32 {
        self.vertex_of[d as usize]
    }

    pub fn target(&self, d: u32) -> u32 {
        self.vertex_of[self.twin[d as usize] as usize]
    }

    pub fn vertex_dart(&self, v: u32) -> u32 {
        self.vertex_dart[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.darts_around(v).count()
    }

    /// Darts out of `v` in counterclockwise order.
    pub fn darts_around(&self, v: u32) -> impl Iterator<Item = u32> + '_ {
        let start = self.vertex_dart[v as usize];
        let mut d = start;
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = d;
            d = self.next[d as usize];
            done = d == start;
            Some(out)
        })
    }

    /// Dart cycles of the faces.
    pub fn faces(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.dart_count()];
        let mut out = Vec::with_capacity(self.face_count);
        for start in 0..self.dart_count() as u32 {
            if seen[start as usize] {
                continue;
            }
            let mut face = Vec::new();
            let mut d = start;
            while !seen[d as usize] {
                seen[d as usize] = true;
                face.push(d);
                d = self.face_next(d);
            }
            out.push(face);
        }
        out
    }

    fn is_connected(&self) -> bool {
        let dist = bfs_from(self, 0);
        dist.iter().all(|&d| d != NIL)
    }

    /// Graph distance from the root vertex to every vertex.
    pub fn distances(&self) -> Vec<u32> {
        bfs_from(self, self.root_vertex())
    }

    pub fn profile(&self) -> Profile {
        bfs_profile(self)
    }

    /// 2-colourability of the underlying graph.
    pub fn is_bipartite(&self) -> bool {
        let dist = self.distances();
        (0..self.dart_count() as u32)
            .all(|d| (dist[self.origin(d) as usize] + dist[self.target(d) as usize]) % 2 == 1)
    }

    /// Renumbers darts by a breadth-first search from the root that explores
    /// `σ(d)` then `α(d)`. Two rooted maps are isomorphic iff their canonical
    /// forms are equal.
    pub fn canonical(&self) -> PlanarMap {
        let len = self.dart_count();
        let mut new_id = vec![NIL; len];
        let mut order = Vec::with_capacity(len);
        let mut queue = VecDeque::with_capacity(len);
        new_id[self.root as usize] = 0;
        order.push(self.root);
        queue.push_back(self.root);
        while let Some(d) = queue.pop_front() {
            for x in [self.next[d as usize], self.twin[d as usize]] {
                if new_id[x as usize] == NIL {
                    new_id[x as usize] = order.len() as u32;
                    order.push(x);
                    queue.push_back(x);
                }
            }
        }
        let twin = order
            .iter()
            .map(|&d| new_id[self.twin[d as usize] as usize])
            .collect();
        let next = order
            .iter()
            .map(|&d| new_id[self.next[d as usize] as usize])
            .collect();
        build_map(twin, next, 0).expect("relabelling preserves validity")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&MapData {
            root: self.root,
            twin: self.twin.clone(),
            next: self.next.clone(),
        })
        .expect("map serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, MapError> {
        let data: MapData = serde_json::from_str(s).map_err(|e| MapError::Parse(e.to_string()))?;
        build_map(data.twin, data.next, data.root)
    }
}

/// Text form: a header `darts N root R` followed by one `dart twin next`
/// line per dart.
impl fmt::Display for PlanarMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "darts {} root {}", self.dart_count(), self.root)?;
        for d in 0..self.dart_count() {
            writeln!(f, "{} {} {}", d, self.twin[d], self.next[d])?;
        }
        Ok(())
    }
}

impl FromStr for PlanarMap {
    type Err = MapError;

    fn from_str(s: &str) -> Result<Self, MapError> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| MapError::Parse("empty input".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let (count, root) = match fields.as_slice() {
            ["darts", n, "root", r] => (
                n.parse::<usize>()
                    .map_err(|e| MapError::Parse(e.to_string()))?,
                r.parse::<u32>()
                    .map_err(|e| MapError::Parse(e.to_string()))?,
            ),
            _ => return Err(MapError::Parse(format!("bad header {header:?}"))),
        };
        let mut twin = vec![NIL; count];
        let mut next = vec![NIL; count];
        for line in lines.by_ref().take(count) {
            let nums = line
                .split_whitespace()
                .map(|x| x.parse::<u32>().map_err(|e| MapError::Parse(e.to_string())))
                .collect::<Result<Vec<u32>, _>>()?;
            let [d, t, n] = nums[..] else {
                return Err(MapError::Parse(format!("bad dart line {line:?}")));
            };
            if d as usize >= count || twin[d as usize] != NIL {
                return Err(MapError::Parse(format!(
                    "dart {d} out of range or repeated"
                )));
            }
            twin[d as usize] = t;
            next[d as usize] = n;
        }
        if twin.contains(&NIL) {
            return Err(MapError::Parse("missing dart lines".into()));
        }
        if lines.next().is_some() {
            return Err(MapError::Parse("trailing lines".into()));
        }
        build_map(twin, next, root)
    }
}

fn bfs_from(map: &PlanarMap, source: u32) -> Vec<u32> {
    let mut dist = vec![NIL; map.vertex_count()];
    let mut queue = VecDeque::new();
    dist[source as usize] = 0;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        for d in map.darts_around(v) {
            let w = map.target(d);
            if dist[w as usize] == NIL {
                dist[w as usize] = dist[v as usize] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// `H_k`: number of vertices at distance `k ≥ 1` from the root vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    /// `counts[k - 1] = H_k` for `k = 1..=radius`.
    pub counts: Vec<u64>,
}

impl Profile {
    pub fn radius(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, k: usize) -> u64 {
        if k == 0 {
            return 0;
        }
        self.counts.get(k - 1).copied().unwrap_or(0)
    }

    /// `Ĥ_k = H_1 + … + H_k`.
    pub fn cumulative(&self, k: usize) -> u64 {
        self.counts.iter().take(k).sum()
    }
}

pub fn bfs_profile(map: &PlanarMap) -> Profile {
    let dist = map.distances();
    let radius = dist.iter().copied().max().unwrap_or(0) as usize;
    let mut counts = vec![0u64; radius];
    for &d in &dist {
        if d > 0 {
            counts[d as usize - 1] += 1;
        }
    }
    Profile { counts }
}

/// A planar map whose faces all have degree 4.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quadrangulation(PlanarMap);

impl Quadrangulation {
    pub fn new(map: PlanarMap) -> Result<Self, MapError> {
        for d in 0..map.dart_count() as u32 {
            let mut x = d;
            let mut degree = 0;
            loop {
                x = map.face_next(x);
                degree += 1;
                if x == d || degree > 4 {
                    break;
                }
            }
            if degree != 4 {
                return Err(MapError::NotQuadrangulation { dart: d, degree });
            }
        }
        Ok(Self(map))
    }

    pub fn map(&self) -> &PlanarMap {
        &self.0
    }

    pub fn into_map(self) -> PlanarMap {
        self.0
    }

    pub fn face_count(&self) -> usize {
        self.0.face_count()
    }

    pub fn radius(&self) -> usize {
        self.0.profile().radius()
    }

    pub fn canonical(&self) -> Quadrangulation {
        Quadrangulation(self.0.canonical())
    }
}

impl fmt::Display for Quadrangulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for Quadrangulation {
    type Err = MapError;

    fn from_str(s: &str) -> Result<Self, MapError> {
        Quadrangulation::new(s.parse()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Path v0 – r – c: darts 0 (v0→r), 1 (r→v0), 2 (r→c), 3 (c→r).
    fn path() -> PlanarMap {
        build_map(vec![1, 0, 3, 2], vec![0, 2, 1, 3], 0).unwrap()
    }

    /// Star with centre v0 and leaves r, c: darts 0 (v0→r), 1 (r→v0),
    /// 2 (v0→c), 3 (c→v0).
    fn star() -> PlanarMap {
        build_map(vec![1, 0, 3, 2], vec![2, 1, 0, 3], 0).unwrap()
    }

    #[test]
    fn single_edge() {
        let m = build_map(vec![1, 0], vec![0, 1], 0).unwrap();
        assert_eq!(
            (m.vertex_count(), m.edge_count(), m.face_count()),
            (2, 1, 1)
        );
        assert_eq!(m.faces(), vec![vec![0, 1]]);
    }

    #[test]
    fn path_is_one_square() {
        let m = path();
        assert_eq!(
            (m.vertex_count(), m.edge_count(), m.face_count()),
            (3, 2, 1)
        );
        let faces = m.faces();
        assert_eq!(faces.len(), 1);
        assert_eq!(faces[0].len(), 4);
        assert!(Quadrangulation::new(m.clone()).is_ok());
        assert_eq!(m.profile().counts, vec![1, 1]);
        assert_eq!(m.profile().radius(), 2);
        assert!(m.is_bipartite());
    }

    #[test]
    fn star_profile() {
        let m = star();
        assert_eq!(m.profile().counts, vec![2]);
        assert_eq!(m.profile().radius(), 1);
        assert!(Quadrangulation::new(m).is_ok());
    }

    #[test]
    fn validation_errors() {
        assert_eq!(build_map(vec![], vec![], 0), Err(MapError::Empty));
        assert_eq!(
            build_map(vec![0, 1], vec![0, 1], 0),
            Err(MapError::NotInvolution { dart: 0 })
        );
        assert_eq!(
            build_map(vec![1, 0], vec![0, 0], 0),
            Err(MapError::NotPermutation { dart: 0 })
        );
        assert_eq!(
            build_map(vec![1, 0, 3, 2], vec![0, 1, 2, 3], 0),
            Err(MapError::Disconnected)
        );
        // One vertex with two loops interleaved: a torus.
        assert_eq!(
            build_map(vec![2, 3, 0, 1], vec![1, 2, 3, 0], 0),
            Err(MapError::NotPlanar { genus: 1 })
        );
        assert!(matches!(
            Quadrangulation::new(build_map(vec![1, 0], vec![0, 1], 0).unwrap()),
            Err(MapError::NotQuadrangulation { degree: 2, .. })
        ));
    }

    #[test]
    fn text_and_json_round_trip() {
        let m = path();
        let text = m.to_string();
        assert_eq!(text.parse::<PlanarMap>().unwrap(), m);
        assert_eq!(PlanarMap::from_json(&m.to_json()).unwrap(), m);
        assert!("darts 2 root 0\n0 1 0\n".parse::<PlanarMap>().is_err());
    }

    #[test]
    fn canonical_form_ignores_dart_names() {
        let a = path();
        // Same map with darts renamed by the permutation 0↔2, 1↔3.
        let b = build_map(vec![1, 0, 3, 2], vec![3, 1, 2, 0], 2).unwrap();
        assert_eq!(a.canonical(), b.canonical());
        // Rooting at c → r is the mirror image of v0 → r; r → v0 is not.
        let mirror = build_map(vec![1, 0, 3, 2], vec![0, 2, 1, 3], 3).unwrap();
        assert_eq!(a.canonical(), mirror.canonical());
        let other_root = build_map(vec![1, 0, 3, 2], vec![0, 2, 1, 3], 1).unwrap();
        assert_ne!(a.canonical(), other_root.canonical());
    }
}
