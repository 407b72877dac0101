use std::collections::{BTreeSet, HashMap, HashSet};

use proptest::prelude::*;
use quadlab::blossom::{
    blossom_to_embedded, check_coupling, conjugacy_class, embedded_to_blossom, labelling_process,
    sample_well_labelled_coupled, BlossomTree,
};
use quadlab::enumeration::{enumerate_blossom, enumerate_embedded, enumerate_well_labelled};
use quadlab::experiments::stats::chi_square;
use quadlab::labelled::{
    from_contour_pair, sample_embedded, ContourPair, EmbeddedTree, LabelDistribution,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn et(s: &str) -> EmbeddedTree {
    s.parse().unwrap()
}

#[test]
fn labels_and_distributions() {
    assert_eq!(et("():@0").labels(), vec![0]);
    assert_eq!(et("(()):+").labels(), vec![1, 2]);
    assert_eq!(et("((())):+-").labels(), vec![1, 2, 1]);
    let single = et("():").label_distribution();
    assert_eq!((single.count(1), single.max_label()), (1, 1));
    assert!(!et("(()):-").is_well_labelled().unwrap());
    assert!(et("(()):0").is_well_labelled().unwrap());
}

#[test]
fn maximal_labels_on_two_edges() {
    let mut maxima: Vec<i64> = enumerate_well_labelled(2)
        .unwrap()
        .map(|t| t.max_label())
        .collect();
    maxima.sort_unstable();
    // Path 1-a-b: (1,1) (1,2) (2,1) (2,2) (2,3); cherry: (1,1) (1,2) (2,1) (2,2).
    assert_eq!(maxima, vec![1, 1, 2, 2, 2, 2, 2, 2, 3]);
}

#[test]
fn positive_fraction_on_two_edges() {
    let all: Vec<EmbeddedTree> = enumerate_embedded(2).unwrap().collect();
    let positive = all.iter().filter(|t| t.is_well_labelled().unwrap()).count();
    assert_eq!((positive, all.len()), (9, 18));
}

#[test]
fn contour_pairs() {
    let p = et("(()):+").to_contour_pair();
    assert_eq!(p.heights(), vec![0, 1, 0]);
    assert_eq!(p.label_values(), vec![0, 1, 0]);
    let cherry = et("(()()):+-").to_contour_pair();
    assert_eq!(cherry.label_values(), vec![0, 1, 0, -1, 0]);
    for u in enumerate_embedded(3).unwrap() {
        let p = u.to_contour_pair();
        let back = from_contour_pair(&p).unwrap();
        assert_eq!(back, u.clone().with_root_label(0));
        let text = p.to_string();
        assert_eq!(text.parse::<ContourPair>().unwrap(), p);
    }
}

#[test]
fn corrupted_contour_pair_is_rejected() {
    // The child of the root is visited at times 1 and 3 with labels 1 and 0.
    let bad = "UUDD:+0-0".parse::<ContourPair>().unwrap_err();
    assert!(
        matches!(bad, quadlab::Error::ContourInconsistent { .. }),
        "{bad:?}"
    );
}

#[test]
fn blossom_counts_and_round_trips() {
    assert_eq!(enumerate_blossom(1).unwrap().len(), 3);
    let image: HashSet<BlossomTree> = enumerate_embedded(2)
        .unwrap()
        .map(|u| embedded_to_blossom(&u))
        .collect();
    assert_eq!(image.len(), 18);
    let all2: HashSet<BlossomTree> = enumerate_blossom(2).unwrap().into_iter().collect();
    assert_eq!(image, all2);
    assert_eq!(embedded_to_blossom(&et("():")), BlossomTree::trivial());
    for u in enumerate_embedded(3).unwrap() {
        let b = embedded_to_blossom(&u);
        assert_eq!(blossom_to_embedded(&b), u);
        assert_eq!(b.to_string().parse::<BlossomTree>().unwrap(), b);
    }
}

#[test]
fn well_labelled_walk_criterion_agrees() {
    for n in 0..=4 {
        for b in enumerate_blossom(n).unwrap() {
            let u = blossom_to_embedded(&b);
            assert_eq!(b.is_well_labelled(), u.is_well_labelled().unwrap(), "{b}");
        }
    }
}

#[test]
fn classes_represent_well_labelled_trees_fairly() {
    assert!(conjugacy_class(&BlossomTree::trivial()).len() <= 2);
    for n in 0..=5 {
        let all = enumerate_blossom(n).unwrap();
        let mut done: HashSet<BlossomTree> = HashSet::new();
        let mut covered = 0;
        for b in &all {
            if done.contains(b) {
                continue;
            }
            let class = conjugacy_class(b);
            let good = class.iter().filter(|c| c.is_well_labelled()).count();
            assert!(class.len() <= n + 2);
            assert_eq!(2 * class.len(), (n + 2) * good, "{b}");
            covered += class.len();
            done.extend(class);
        }
        assert_eq!(covered, all.len());
    }
}

#[test]
fn coupled_sampler_uniform_on_two_edges() {
    let index: HashMap<String, usize> = enumerate_well_labelled(2)
        .unwrap()
        .enumerate()
        .map(|(i, t)| (t.to_string(), i))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let draws = 90_000;
    let mut observed = vec![0u64; 9];
    for _ in 0..draws {
        observed[index[&sample_well_labelled_coupled(2, &mut rng).well.to_string()]] += 1;
    }
    let r = chi_square(&observed, &[draws as f64 / 9.0; 9], 0);
    assert!(r.p_value > 1e-4, "{r:?}");
}

#[test]
fn embedded_sampler_uniform_on_two_edges() {
    let index: HashMap<String, usize> = enumerate_embedded(2)
        .unwrap()
        .enumerate()
        .map(|(i, t)| (t.to_string(), i))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let draws = 90_000;
    let mut observed = vec![0u64; 18];
    for _ in 0..draws {
        observed[index[&sample_embedded(2, 1, &mut rng).to_string()]] += 1;
    }
    let r = chi_square(&observed, &[draws as f64 / 18.0; 18], 0);
    assert!(r.p_value > 1e-4, "{r:?}");
}

#[test]
fn plane_tree_sampler_uniform_on_three_edges() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut counts: HashMap<String, u64> = HashMap::new();
    let draws = 50_000;
    for _ in 0..draws {
        *counts
            .entry(quadlab::trees::sample_plane_tree(3, &mut rng).to_string())
            .or_default() += 1;
    }
    assert_eq!(counts.len(), 5);
    let observed: Vec<u64> = counts.values().copied().collect();
    let r = chi_square(&observed, &[draws as f64 / 5.0; 5], 0);
    assert!(r.p_value > 1e-4, "{r:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn blossom_labels_match_tree_labels(seed in any::<u64>(), n in 0usize..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = sample_embedded(n, 1, &mut rng);
        let b = embedded_to_blossom(&u);
        b.validate().unwrap();
        let flags = labelling_process(&b).label_distribution();
        prop_assert_eq!(flags, u.label_distribution());
        prop_assert_eq!(blossom_to_embedded(&b), u);
    }

    #[test]
    fn coupled_pairs_satisfy_inequalities(seed in any::<u64>(), n in 1usize..400) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pair = sample_well_labelled_coupled(n, &mut rng);
        let w = pair.well.label_distribution();
        let u = pair.embedded.label_distribution();
        prop_assert!(check_coupling(&w, &u).is_empty());
        prop_assert_eq!(w.min_label(), 1);
        prop_assert_eq!(w.total(), (n + 1) as u64);
        let labels = pair.embedded.labels();
        prop_assert!(u.min_label() <= labels[0] && labels[0] <= u.max_label());
        // The pair lies in one conjugacy class.
        let class: BTreeSet<BlossomTree> =
            conjugacy_class(&embedded_to_blossom(&pair.embedded)).into_iter().collect();
        prop_assert!(class.contains(&embedded_to_blossom(pair.well.as_embedded())));
    }

    #[test]
    fn distributions_sum_to_vertex_count(seed in any::<u64>(), n in 0usize..300, root in -5i64..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = sample_embedded(n, root, &mut rng);
        let d: LabelDistribution = u.label_distribution();
        prop_assert_eq!(d.total(), (n + 1) as u64);
        prop_assert!(d.min_label() <= root && root <= d.max_label());
        let reparsed: EmbeddedTree = u.to_string().parse().unwrap();
        prop_assert_eq!(reparsed, u);
    }
}
