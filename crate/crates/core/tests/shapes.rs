use proptest::prelude::*;
use quadlab::trees::{
    extract_shape, sample_plane_tree, shape_matrix, PlaneTree, ShapeCoordinate, ShapeVertexKind,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const NIL: u32 = u32::MAX;

fn heights_along_contour(tree: &PlaneTree) -> Vec<i64> {
    let depths = tree.depths();
    tree.contour()
        .iter()
        .map(|&v| depths[v as usize] as i64)
        .collect()
}

/// Host tree for a shape with four fixed leaves: root → A (2 edges),
/// A → B (1), B → x1 (1), B → C (2), C → x2 (1), C → x3 (1), A → x4 (3).
fn four_leaf_host() -> (PlaneTree, Vec<usize>) {
    let parents = [NIL, 0, 1, 2, 3, 3, 5, 6, 6, 2, 9, 10];
    let tree = PlaneTree::from_preorder_parents(&parents).unwrap();
    let contour = tree.contour();
    let times = [4u32, 7, 8, 11]
        .iter()
        .map(|&leaf| contour.iter().position(|&v| v == leaf).unwrap())
        .collect();
    (tree, times)
}

#[test]
fn four_leaf_shape_matrix_rows() {
    let (tree, times) = four_leaf_host();
    assert_eq!(times, vec![4, 8, 10, 17]);
    let shape = extract_shape(&tree, &times).unwrap();
    let lengths: Vec<u32> = shape.edges.iter().map(|e| e.length).collect();
    assert_eq!(lengths, vec![2, 1, 1, 2, 1, 1, 3]);
    let m = shape_matrix(&shape).unwrap();
    use ShapeCoordinate::*;
    assert_eq!(
        m.coordinates,
        vec![
            Minimum(2),
            Minimum(0),
            Height(0),
            Minimum(1),
            Height(1),
            Height(2),
            Height(3)
        ]
    );
    let expected: Vec<Vec<u8>> = vec![
        vec![1, 0, 0, 0, 0, 0, 0],
        vec![1, 1, 0, 0, 0, 0, 0],
        vec![1, 1, 1, 0, 0, 0, 0],
        vec![1, 1, 0, 1, 0, 0, 0],
        vec![1, 1, 0, 1, 1, 0, 0],
        vec![1, 1, 0, 1, 0, 1, 0],
        vec![1, 0, 0, 0, 0, 0, 1],
    ];
    assert_eq!(m.rows, expected);
    assert!(m.is_lower_unitriangular());
    assert_eq!(m.determinant(), 1);
    // Heights and minima of the contour come out of the matrix.
    let h = heights_along_contour(&tree);
    let min = |a: usize, b: usize| *h[a..=b].iter().min().unwrap();
    let coords = m.apply(&lengths.iter().map(|&l| l as i64).collect::<Vec<_>>());
    assert_eq!(
        coords,
        vec![min(10, 17), min(4, 8), h[4], min(8, 10), h[8], h[10], h[17]]
    );
}

#[test]
fn superedge_length_is_height_minus_minimum() {
    // Three fixed vertices with m_2 < m_1: root → P (1), P → Q (2),
    // Q → x1 (1), Q → x2 (7), P → x3 (2). The fourth superedge in prefix
    // order joins the branchpoint at height m_1 to x2.
    let mut parents = vec![NIL, 0, 1, 2, 3];
    parents.push(3);
    parents.extend(5..11);
    parents.extend([1, 12]);
    let tree = PlaneTree::from_preorder_parents(&parents).unwrap();
    let depths = tree.depths();
    let contour = tree.contour();
    let leaves: Vec<u32> = (0..tree.node_count() as u32)
        .filter(|&v| tree.is_leaf(v))
        .collect();
    assert_eq!(leaves.len(), 3);
    let times: Vec<usize> = leaves
        .iter()
        .map(|&l| contour.iter().position(|&v| v == l).unwrap())
        .collect();
    let shape = extract_shape(&tree, &times).unwrap();
    assert!(shape.is_binary());
    let h = heights_along_contour(&tree);
    let x2 = h[times[1]];
    let m1 = *h[times[0]..=times[1]].iter().min().unwrap();
    assert_eq!(shape.edges[3].length, 7);
    assert_eq!(x2 - m1, 7);
    assert_eq!(depths[leaves[1] as usize] as i64, x2);
}

#[test]
fn single_time_gives_one_superedge() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let tree = sample_plane_tree(50, &mut rng);
    let h = heights_along_contour(&tree);
    let t = (1..100).find(|&t| h[t] > 0).unwrap();
    let shape = extract_shape(&tree, &[t]).unwrap();
    assert_eq!(shape.edges.len(), 1);
    assert_eq!(shape.edges[0].length as i64, h[t]);
    let m = shape_matrix(&shape).unwrap();
    assert_eq!(m.rows, vec![vec![1]]);
}

#[test]
fn ties_are_not_binary() {
    // Root with three leaf children: the three times branch at the root.
    let tree = PlaneTree::from_preorder_parents(&[NIL, 0, 0, 0]).unwrap();
    let shape = extract_shape(&tree, &[1, 3, 5]).unwrap();
    assert!(!shape.is_binary());
    assert!(shape_matrix(&shape).is_err());
    assert_eq!(shape.vertices[0].kind, ShapeVertexKind::Root);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn root_paths_sum_to_heights(seed in any::<u64>(), n in 2usize..120, p in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tree = sample_plane_tree(n, &mut rng);
        let h = heights_along_contour(&tree);
        let mut times: Vec<usize> = (0..p).map(|_| rand::Rng::random_range(&mut rng, 1..2 * n)).collect();
        times.sort_unstable();
        times.dedup();
        let shape = extract_shape(&tree, &times).unwrap();
        for (i, &t) in times.iter().enumerate() {
            let sum: u32 = shape.root_path_edges(shape.fixed[i]).iter().map(|&e| shape.edges[e].length).sum();
            prop_assert_eq!(sum as i64, h[t]);
        }
        if shape.is_binary() {
            let m = shape_matrix(&shape).unwrap();
            prop_assert_eq!(m.size(), 2 * times.len() - 1);
            prop_assert!(m.is_lower_unitriangular());
            prop_assert_eq!(m.determinant(), 1);
            let lengths: Vec<i64> = shape.edges.iter().map(|e| e.length as i64).collect();
            for (value, c) in m.apply(&lengths).into_iter().zip(&m.coordinates) {
                let expected = match *c {
                    ShapeCoordinate::Height(i) => h[times[i]],
                    ShapeCoordinate::Minimum(i) => *h[times[i]..=times[i + 1]].iter().min().unwrap(),
                };
                prop_assert_eq!(value, expected);
            }
        }
    }
}
