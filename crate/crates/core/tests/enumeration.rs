use std::collections::HashSet;

use num_bigint::BigUint;
use quadlab::enumeration::{
    enumerate_blossom, enumerate_embedded, enumerate_plane_trees, enumerate_well_labelled,
    exact_counts, positivity_ratio, DyckPaths,
};
use quadlab::error::Error;
use quadlab::labelled::WellLabelledTree;
use quadlab::walks::count_ballot;

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

#[test]
fn tutte_values() {
    let q: Vec<BigUint> = (0..=6).map(|n| exact_counts(n).quadrangulations).collect();
    let expected = [1u64, 2, 9, 54, 378, 2916, 24057];
    assert_eq!(q, expected.map(big).to_vec());
}

#[test]
fn dyck_paths_count_as_ballot_numbers() {
    for n in 0..=8usize {
        let paths: Vec<_> = DyckPaths::new(n).collect();
        assert_eq!(
            big(paths.len() as u64),
            count_ballot(2 * n as u64, 0).unwrap()
        );
        // Up (+1) sorts before down, so the i8 vectors decrease.
        assert!(paths.windows(2).all(|w| w[0] > w[1]), "lexicographic order");
        assert_eq!(
            big(enumerate_plane_trees(n).count() as u64),
            exact_counts(n as u64).catalan
        );
    }
}

#[test]
fn embedded_and_well_labelled_counts() {
    for n in 1..=6usize {
        let c = exact_counts(n as u64);
        let mut seen = HashSet::new();
        let mut well = 0u64;
        for t in enumerate_embedded(n).unwrap() {
            if WellLabelledTree::new(t.clone()).is_ok() {
                well += 1;
            }
            assert!(seen.insert(t.to_string()));
        }
        assert_eq!(big(seen.len() as u64), c.embedded, "n = {n}");
        assert_eq!(big(well), c.well_labelled, "n = {n}");
        assert_eq!(
            big(enumerate_well_labelled(n).unwrap().count() as u64),
            c.quadrangulations
        );
        // |W_n| / |U_n| = 2 / (n + 2)
        let (num, den) = positivity_ratio(n as u64);
        assert_eq!(num * big(n as u64 + 2), den * big(2));
    }
}

#[test]
fn blossom_family_has_the_embedded_size() {
    for n in 0..=5usize {
        let all = enumerate_blossom(n).unwrap();
        let distinct: HashSet<String> = all.iter().map(|b| b.to_string()).collect();
        assert_eq!(distinct.len(), all.len());
        assert_eq!(big(all.len() as u64), exact_counts(n as u64).embedded);
    }
}

#[test]
fn guard_refuses_large_families() {
    assert!(enumerate_embedded(8).is_ok());
    assert!(matches!(
        enumerate_embedded(9).err(),
        Some(Error::SizeGuard { .. })
    ));
    assert!(matches!(
        enumerate_blossom(12).err(),
        Some(Error::SizeGuard { .. })
    ));
}
