//! Lattice walks, the classes `B(n,k)` / `D(n,k)`, cyclic shifts, low records
//! and the Dyck-height statistics that make the cycle lemma work.
//!
//! A walk is a packed array of increments in `{-1, 0, +1}`. Binary walks
//! (`±1` only) are written over `{U, D}`; label walks over `{+, 0, -}`.
//! Partial sums are recomputed on demand, `w(0) = 0`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};

/// Largest `2n + k` accepted by [`verify_cycle_lemma`].
pub const MAX_EXHAUSTIVE_WALK_LEN: usize = 24;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeWalk {
    steps: Vec<i8>,
}

impl LatticeWalk {
    pub fn new(steps: Vec<i8>) -> Result<Self> {
        if let Some(&bad) = steps.iter().find(|s| !(-1..=1).contains(*s)) {
            return Err(Error::Increment(bad as i64));
        }
        Ok(Self { steps })
    }

    pub(crate) fn from_steps_unchecked(steps: Vec<i8>) -> Self {
        debug_assert!(steps.iter().all(|s| (-1..=1).contains(s)));
        Self { steps }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn steps(&self) -> &[i8] {
        &self.steps
    }

    pub fn into_steps(self) -> Vec<i8> {
        self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn up_count(&self) -> usize {
        self.steps.iter().filter(|&&s| s == 1).count()
    }

    pub fn down_count(&self) -> usize {
        self.steps.iter().filter(|&&s| s == -1).count()
    }

    /// True when every increment is `±1`.
    pub fn is_binary(&self) -> bool {
        self.steps.iter().all(|&s| s != 0)
    }

    pub fn partial_sums(&self) -> Vec<i64> {
        partial_sums(self)
    }

    pub fn final_height(&self) -> i64 {
        self.steps.iter().map(|&s| s as i64).sum()
    }

    pub fn cyclic_shift(&self, offset: usize) -> Self {
        cyclic_shift(self, offset)
    }

    /// The walk read backwards with every increment negated.
    pub fn reversed_negated(&self) -> Self {
        Self {
            steps: self.steps.iter().rev().map(|s| -s).collect(),
        }
    }

    pub fn to_binary_string(&self) -> String {
        self.steps
            .iter()
            .map(|&s| match s {
                1 => 'U',
                -1 => 'D',
                _ => '0',
            })
            .collect()
    }

    pub fn to_ternary_string(&self) -> String {
        self.steps
            .iter()
            .map(|&s| match s {
                1 => '+',
                -1 => '-',
                _ => '0',
            })
            .collect()
    }
}

impl fmt::Display for LatticeWalk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_binary() {
            f.write_str(&self.to_binary_string())
        } else {
            f.write_str(&self.to_ternary_string())
        }
    }
}

impl FromStr for LatticeWalk {
    type Err = Error;

    /// Accepts `U`/`D` for binary walks and `+`/`0`/`-` for label walks.
    fn from_str(s: &str) -> Result<Self> {
        let steps = s
            .trim()
            .chars()
            .map(|c| match c {
                'U' | 'u' | '+' => Ok(1),
                'D' | 'd' | '-' => Ok(-1),
                '0' => Ok(0),
                other => Err(Error::Parse(format!("unexpected walk character {other:?}"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        Ok(Self { steps })
    }
}

/// Parameters of the class `B(n,k)`: `n` up steps, `n + k` down steps,
/// last step down; length `2n + k`, final height `-k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WalkClassSpec {
    pub n: usize,
    pub k: usize,
}

impl WalkClassSpec {
    pub fn length(&self) -> usize {
        2 * self.n + self.k
    }

    pub fn final_height(&self) -> i64 {
        -(self.k as i64)
    }

    /// Checks `w ∈ B(n,k)`.
    pub fn check(&self, w: &LatticeWalk) -> Result<()> {
        let err = |reason| Error::NotInWalkClass {
            n: self.n,
            k: self.k,
            reason,
        };
        if !w.is_binary() {
            return Err(err("increments must be ±1"));
        }
        if w.len() != self.length() {
            return Err(err("wrong length"));
        }
        if w.up_count() != self.n {
            return Err(err("wrong number of up steps"));
        }
        if w.steps.last().is_some_and(|&s| s != -1) {
            return Err(err("last step must be a down step"));
        }
        Ok(())
    }

    /// Infers `(n, k)` from a walk and checks membership.
    pub fn of_walk(w: &LatticeWalk, k: usize) -> Result<Self> {
        let spec = Self { n: w.up_count(), k };
        spec.check(w)?;
        Ok(spec)
    }
}

pub fn partial_sums(w: &LatticeWalk) -> Vec<i64> {
    let mut out = Vec::with_capacity(w.len() + 1);
    let mut h = 0i64;
    out.push(h);
    for &s in &w.steps {
        h += s as i64;
        out.push(h);
    }
    out
}

/// Rotates the increments left by `offset`: `w'_i = w_{i + offset}`.
pub fn cyclic_shift(w: &LatticeWalk, offset: usize) -> LatticeWalk {
    if w.is_empty() {
        return w.clone();
    }
    let s = offset % w.len();
    let mut steps = Vec::with_capacity(w.len());
    steps.extend_from_slice(&w.steps[s..]);
    steps.extend_from_slice(&w.steps[..s]);
    LatticeWalk { steps }
}

/// Number of nonnegative `±1` meanders of length `n` ending at height `a`:
/// `(a+1)/(n+1) · binom(n+1, (n-a)/2)`.
pub fn count_ballot(n: u64, a: u64) -> Result<BigUint> {
    if a > n || (n - a) % 2 != 0 {
        return Err(Error::Parity {
            length: n,
            height: a,
        });
    }
    let numerator = binomial(n + 1, (n - a) / 2) * BigUint::from(a + 1);
    Ok(numerator / BigUint::from(n + 1))
}

pub(crate) fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= BigUint::from(n - i);
        acc /= BigUint::from(i + 1);
    }
    acc
}

/// Positions (1-based step indices) of the `k` lowest left-to-right records.
///
/// A record is a step `p ≥ 1` with `w(q) > w(p)` for every `q < p`,
/// including `q = 0`.
pub fn low_records(w: &LatticeWalk, k: usize) -> Result<Vec<usize>> {
    WalkClassSpec::of_walk(w, k)?;
    Ok(low_records_unchecked(w.steps(), k))
}

pub(crate) fn low_records_unchecked(steps: &[i8], k: usize) -> Vec<usize> {
    let mut records = Vec::new();
    let mut h = 0i64;
    let mut min = 0i64;
    for (i, &s) in steps.iter().enumerate() {
        h += s as i64;
        if h < min {
            min = h;
            records.push(i + 1);
        }
    }
    let start = records.len().saturating_sub(k);
    records.split_off(start)
}

/// Dyck height `w̄`, height-to-min `w̃`, their down-step distributions and
/// the low records of a walk of `B(n,k)`, `k ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkHeights {
    pub dyck_height: Vec<i64>,
    pub height_to_min: Vec<i64>,
    /// `ℓ̂_i` for `i = 0, 1, …` up to the largest Dyck height.
    pub down_step_counts_dyck: Vec<u64>,
    /// `ĥ_i` for `i = 0, 1, …` up to the largest height-to-min.
    pub down_step_counts_min: Vec<u64>,
    pub low_records: Vec<usize>,
}

impl WalkHeights {
    /// `ℓ̂_i`, extended as a constant past the stored range.
    pub fn dyck_cumulative(&self, i: i64) -> u64 {
        cumulative_at(&self.down_step_counts_dyck, i)
    }

    /// `ĥ_i`, extended as a constant past the stored range.
    pub fn min_cumulative(&self, i: i64) -> u64 {
        cumulative_at(&self.down_step_counts_min, i)
    }
}

fn cumulative_at(counts: &[u64], i: i64) -> u64 {
    if i < 0 {
        0
    } else {
        let i = i as usize;
        counts.get(i).or(counts.last()).copied().unwrap_or(0)
    }
}

pub fn walk_heights(w: &LatticeWalk, k: usize) -> Result<WalkHeights> {
    let spec = WalkClassSpec::of_walk(w, k)?;
    if k == 0 {
        return Err(Error::NotInWalkClass {
            n: spec.n,
            k,
            reason: "Dyck height needs at least one low record",
        });
    }
    let sums = w.partial_sums();
    let records = low_records_unchecked(w.steps(), k);
    let lowest = sums[records[k - 1]];

    let mut dyck = Vec::with_capacity(sums.len());
    let mut seg = 0usize; // number of low records at or before p
    for (p, &h) in sums.iter().enumerate() {
        while seg < k && records[seg] <= p {
            seg += 1;
        }
        // Before the first low record the walk continues the last Dyck
        // factor cyclically, so it is measured one level below w(p_1).
        let bar = if seg == 0 {
            h - sums[records[0]] - 1
        } else {
            h - sums[records[seg - 1]]
        };
        dyck.push(bar);
    }
    let to_min: Vec<i64> = sums.iter().map(|&h| h - lowest).collect();

    let down_counts = |heights: &[i64]| {
        let max = heights.iter().copied().max().unwrap_or(0).max(0) as usize;
        let mut hist = vec![0u64; max + 1];
        for (p, &s) in w.steps().iter().enumerate() {
            if s == -1 {
                hist[heights[p + 1] as usize] += 1;
            }
        }
        let mut acc = 0;
        for c in hist.iter_mut() {
            acc += *c;
            *c = acc;
        }
        hist
    };

    Ok(WalkHeights {
        down_step_counts_dyck: down_counts(&dyck),
        down_step_counts_min: down_counts(&to_min),
        dyck_height: dyck,
        height_to_min: to_min,
        low_records: records,
    })
}

/// `w ∈ D(n,k)`: `w(p) > -k` for all `0 ≤ p < 2n + k`.
pub fn is_positive_member(w: &LatticeWalk, k: usize) -> Result<bool> {
    let spec = WalkClassSpec::of_walk(w, k)?;
    if k == 0 {
        return Err(Error::NotInWalkClass {
            n: spec.n,
            k,
            reason: "positivity is defined for k ≥ 1",
        });
    }
    Ok(is_positive_unchecked(w.steps(), k))
}

pub(crate) fn is_positive_unchecked(steps: &[i8], k: usize) -> bool {
    let floor = -(k as i64);
    let mut h = 0i64;
    for &s in &steps[..steps.len().saturating_sub(1)] {
        h += s as i64;
        if h <= floor {
            return false;
        }
    }
    true
}

/// Distinct rotations of `w` that end with a down step, i.e. its conjugacy
/// class inside `B(n,k)`, in order of increasing shift.
pub fn conjugacy_class(w: &LatticeWalk) -> Vec<LatticeWalk> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for s in 0..w.len() {
        let r = w.cyclic_shift(s);
        if r.steps.last() == Some(&-1) && seen.insert(r.clone()) {
            out.push(r);
        }
    }
    out
}

/// Lexicographically smallest rotation ending in a down step (`D < U`).
pub fn canonical_rotation(w: &LatticeWalk) -> Option<LatticeWalk> {
    (0..w.len())
        .map(|s| w.cyclic_shift(s))
        .filter(|r| r.steps.last() == Some(&-1))
        .min()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassRecord {
    pub representative: LatticeWalk,
    pub size: usize,
    pub positive: usize,
}

impl ClassRecord {
    /// `(n+k)·|C ∩ D| = k·|C|`.
    pub fn satisfies_cycle_lemma(&self, spec: WalkClassSpec) -> bool {
        (spec.n + spec.k) * self.positive == spec.k * self.size
    }
}

#[derive(Clone, Debug)]
pub struct CycleLemmaReport {
    pub spec: WalkClassSpec,
    pub total_walks: usize,
    pub classes: Vec<ClassRecord>,
}

impl CycleLemmaReport {
    pub fn violations(&self) -> impl Iterator<Item = &ClassRecord> {
        self.classes
            .iter()
            .filter(|c| !c.satisfies_cycle_lemma(self.spec))
    }

    pub fn passed(&self) -> bool {
        self.violations().next().is_none()
    }
}

/// Bit-packed enumeration of `B(n,k)`: step `i` lives at bit `len-1-i`,
/// `U = 1`, so numeric order is lexicographic order with `D < U`.
pub(crate) fn enumerate_class_masks(spec: WalkClassSpec) -> Vec<u32> {
    let len = spec.length();
    if len == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    // Up steps only among the first len-1 positions (bits 1..len).
    let free = len - 1;
    if spec.n > free {
        return out;
    }
    if spec.n == 0 {
        return vec![0];
    }
    let mut c: u32 = (1u32 << spec.n) - 1;
    let limit: u32 = 1u32 << free;
    while c < limit {
        out.push(c << 1);
        // Gosper's hack: next combination with the same popcount.
        let u = c & c.wrapping_neg();
        let v = c + u;
        c = v + (((v ^ c) / u) >> 2);
    }
    out
}

pub(crate) fn mask_to_walk(mask: u32, len: usize) -> LatticeWalk {
    let steps = (0..len)
        .map(|i| {
            if mask >> (len - 1 - i) & 1 == 1 {
                1
            } else {
                -1
            }
        })
        .collect();
    LatticeWalk { steps }
}

fn rotate_mask(mask: u32, len: usize, s: usize) -> u32 {
    if s == 0 {
        return mask;
    }
    let full = if len == 32 {
        u32::MAX
    } else {
        (1u32 << len) - 1
    };
    ((mask << s) | (mask >> (len - s))) & full
}

fn mask_is_positive(mask: u32, spec: WalkClassSpec) -> bool {
    let len = spec.length();
    let floor = -(spec.k as i64);
    let mut h = 0i64;
    for i in 0..len - 1 {
        h += if mask >> (len - 1 - i) & 1 == 1 {
            1
        } else {
            -1
        };
        if h <= floor {
            return false;
        }
    }
    true
}

/// Exhaustively partitions `B(n,k)` into conjugacy classes and checks the
/// cycle lemma on every class.
pub fn verify_cycle_lemma(n: usize, k: usize) -> Result<CycleLemmaReport> {
    let spec = WalkClassSpec { n, k };
    let len = spec.length();
    if len > MAX_EXHAUSTIVE_WALK_LEN {
        return Err(Error::SizeGuard {
            what: "walk length 2n+k",
            requested: len as u64,
            limit: MAX_EXHAUSTIVE_WALK_LEN as u64,
        });
    }
    if k == 0 {
        return Err(Error::NotInWalkClass {
            n,
            k,
            reason: "the cycle lemma needs k ≥ 1",
        });
    }
    let masks = enumerate_class_masks(spec);
    let mut classes: HashMap<u32, (usize, usize)> = HashMap::new();
    for &m in &masks {
        let canon = (0..len)
            .map(|s| rotate_mask(m, len, s))
            .filter(|r| r & 1 == 0)
            .min()
            .expect("a walk of B(n,k) ends with a down step");
        let entry = classes.entry(canon).or_default();
        entry.0 += 1;
        if mask_is_positive(m, spec) {
            entry.1 += 1;
        }
    }
    let mut records: Vec<ClassRecord> = classes
        .into_iter()
        .map(|(canon, (size, positive))| ClassRecord {
            representative: mask_to_walk(canon, len),
            size,
            positive,
        })
        .collect();
    records.sort_by(|a, b| a.representative.cmp(&b.representative));
    Ok(CycleLemmaReport {
        spec,
        total_walks: masks.len(),
        classes: records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> LatticeWalk {
        s.parse().unwrap()
    }

    #[test]
    fn partial_sums_examples() {
        assert_eq!(partial_sums(&LatticeWalk::empty()), vec![0]);
        assert_eq!(w("UDDD").partial_sums(), vec![0, 1, 0, -1, -2]);
    }

    #[test]
    fn reversal_negation_reverses_sums() {
        let walk = w("UUDUDDDU");
        let s = walk.partial_sums();
        let r = walk.reversed_negated().partial_sums();
        let last = *s.last().unwrap();
        for p in 0..s.len() {
            assert_eq!(r[p], s[s.len() - 1 - p] - last);
        }
    }

    #[test]
    fn cyclic_shift_examples() {
        assert_eq!(w("UDDD").cyclic_shift(0), w("UDDD"));
        assert_eq!(w("UDDD").cyclic_shift(1), w("DDDU"));
        assert_eq!(w("UDDD").cyclic_shift(2).cyclic_shift(2), w("UDDD"));
    }

    #[test]
    fn ballot_numbers() {
        assert_eq!(count_ballot(4, 0).unwrap(), BigUint::from(2u32));
        assert_eq!(count_ballot(2, 2).unwrap(), BigUint::from(1u32));
        assert_eq!(count_ballot(3, 1).unwrap(), BigUint::from(2u32));
        assert!(count_ballot(3, 0).is_err());
        assert!(count_ballot(2, 4).is_err());
    }

    /// Brute-force meander count, independent of the closed form.
    fn meanders(n: u32, a: i64) -> u64 {
        (0u32..1 << n)
            .filter(|mask| {
                let mut h = 0i64;
                for i in 0..n {
                    h += if mask >> i & 1 == 1 { 1 } else { -1 };
                    if h < 0 {
                        return false;
                    }
                }
                h == a
            })
            .count() as u64
    }

    #[test]
    fn ballot_matches_enumeration() {
        for n in 0..=14u32 {
            for a in (n % 2..=n).step_by(2) {
                assert_eq!(
                    count_ballot(n as u64, a as u64).unwrap(),
                    BigUint::from(meanders(n, a as i64)),
                    "C({n};{a})"
                );
            }
        }
    }

    #[test]
    fn low_record_examples() {
        assert_eq!(low_records(&w("UDDD"), 2).unwrap(), vec![3, 4]);
        assert_eq!(low_records(&w("DDUD"), 2).unwrap(), vec![1, 2]);
        assert_eq!(low_records(&w("UUDUDDD"), 1).unwrap(), vec![7]);
        assert!(low_records(&w("UDDU"), 2).is_err());
        assert!(low_records(&w("UDDD"), 1).is_err());
    }

    #[test]
    fn walk_heights_example() {
        let h = walk_heights(&w("UDDD"), 2).unwrap();
        assert_eq!(h.dyck_height, vec![0, 1, 0, 0, 0]);
        assert_eq!(h.height_to_min, vec![2, 3, 2, 1, 0]);
        assert_eq!(h.down_step_counts_dyck, vec![3, 3]);
        assert_eq!(h.down_step_counts_min, vec![1, 2, 3, 3]);
        assert_eq!(h.dyck_cumulative(10), 3);
        assert_eq!(h.dyck_cumulative(-1), 0);
    }

    #[test]
    fn single_dyck_factor_heights() {
        let walk = w("UUDUDDD");
        let h = walk_heights(&walk, 1).unwrap();
        let mut dyck = walk.partial_sums();
        dyck[7] = 0;
        assert_eq!(h.dyck_height, dyck);
        let shifted: Vec<i64> = walk.partial_sums().iter().map(|x| x + 1).collect();
        assert_eq!(h.height_to_min, shifted);
    }

    #[test]
    fn dyck_height_is_rotation_invariant_on_small_example() {
        // UDDD and its rotation DDUD share the Dyck-height distribution.
        let a = walk_heights(&w("UDDD"), 2).unwrap();
        let b = walk_heights(&w("DDUD"), 2).unwrap();
        assert_eq!(a.down_step_counts_dyck, b.down_step_counts_dyck);
    }

    #[test]
    fn positivity_examples() {
        assert!(is_positive_member(&w("UDDD"), 2).unwrap());
        assert!(!is_positive_member(&w("DDUD"), 2).unwrap());
    }

    #[test]
    fn positivity_equals_lowest_record_at_end() {
        for n in 0..=5 {
            for k in 1..=3 {
                let spec = WalkClassSpec { n, k };
                for m in enumerate_class_masks(spec) {
                    let walk = mask_to_walk(m, spec.length());
                    let recs = low_records(&walk, k).unwrap();
                    assert_eq!(
                        is_positive_member(&walk, k).unwrap(),
                        recs[k - 1] == spec.length(),
                        "{walk}"
                    );
                }
            }
        }
    }

    #[test]
    fn class_enumeration_counts() {
        let spec = WalkClassSpec { n: 3, k: 2 };
        let masks = enumerate_class_masks(spec);
        assert_eq!(masks.len(), 35);
        assert_eq!(binomial(7, 3), BigUint::from(35u32));
        for m in masks {
            spec.check(&mask_to_walk(m, spec.length())).unwrap();
        }
    }

    #[test]
    fn cycle_lemma_small_cases() {
        let rep = verify_cycle_lemma(1, 2).unwrap();
        assert_eq!(rep.total_walks, 3);
        assert_eq!(rep.classes.len(), 1);
        assert_eq!(rep.classes[0].size, 3);
        assert_eq!(rep.classes[0].positive, 2);
        assert!(rep.passed());

        let rep = verify_cycle_lemma(0, 1).unwrap();
        assert_eq!(rep.classes.len(), 1);
        assert_eq!((rep.classes[0].size, rep.classes[0].positive), (1, 1));

        assert!(verify_cycle_lemma(12, 1).is_err());
    }

    #[test]
    fn class_listing_matches_bitmask_partition() {
        let c = conjugacy_class(&w("UDDD"));
        assert_eq!(c, vec![w("UDDD"), w("DDUD"), w("DUDD")]);
        assert_eq!(canonical_rotation(&w("DUDD")), Some(w("DDUD")));
    }
}
