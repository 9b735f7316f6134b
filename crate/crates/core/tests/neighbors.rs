use learnkit::neighbors::{ball_tree_build, brute_force_query, knn_classify, knn_query, BallTree, KnnParams, Strategy};
use learnkit::{ClassLabels, DataMatrix, Error, LabelVector};
use learnkit_testkit as tk;
use proptest::prelude::*;

fn check_structure(tree: &BallTree, x: &DataMatrix) {
    let mut seen = tree.indices.clone();
    seen.sort_unstable();
    assert_eq!(seen, (0..x.n_samples()).collect::<Vec<_>>());
    for node in &tree.nodes {
        assert!(node.start < node.end);
        for &i in &tree.indices[node.start..node.end] {
            let d = x.row(i).iter().zip(&node.centroid).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            assert!(d <= node.radius * (1.0 + 1e-12) + 1e-12, "point {i} outside its ball");
        }
        match node.children {
            None => assert!(node.end - node.start <= tree.leaf_size || all_equal(x, &tree.indices[node.start..node.end])),
            Some((l, r)) => {
                let (l, r) = (&tree.nodes[l], &tree.nodes[r]);
                assert_eq!(l.start, node.start);
                assert_eq!(l.end, r.start);
                assert_eq!(r.end, node.end);
            }
        }
    }
}

fn all_equal(x: &DataMatrix, idx: &[usize]) -> bool {
    idx.iter().all(|&i| x.row(i) == x.row(idx[0]))
}

#[test]
fn tree_partitions_and_contains_its_points() {
    for (n, p, leaf) in [(1, 1, 1), (7, 2, 1), (200, 5, 10), (513, 3, 30), (64, 12, 4)] {
        let x = tk::gaussian_matrix(n, p, n as u64);
        let tree = ball_tree_build(&x, leaf).unwrap();
        check_structure(&tree, &x);
    }
}

#[test]
fn tree_matches_brute_force_on_gaussian_data() {
    let x = tk::gaussian_matrix(200, 5, 1);
    let queries = tk::gaussian_matrix(50, 5, 2);
    let tree = ball_tree_build(&x, 10).unwrap();
    for q in queries.rows() {
        for k in [1, 3, 17, 200] {
            let got: Vec<usize> = knn_query(&tree, &x, q, k).unwrap().iter().map(|n| n.index).collect();
            assert_eq!(got, tk::knn_by_sort(&x, q, k));
        }
    }
}

#[test]
fn ties_break_by_index() {
    // every row is at distance 1 from the origin query
    let x = DataMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0], [0.0, -1.0], [-1.0, 0.0], [3.0, 3.0]]).unwrap();
    let tree = ball_tree_build(&x, 1).unwrap();
    let got: Vec<usize> = knn_query(&tree, &x, &[0.0, 0.0], 3).unwrap().iter().map(|n| n.index).collect();
    assert_eq!(got, vec![0, 1, 2]);
}

#[test]
fn query_errors() {
    let x = tk::gaussian_matrix(10, 3, 0);
    let tree = ball_tree_build(&x, 2).unwrap();
    assert!(matches!(knn_query(&tree, &x, &[0.0; 2], 1), Err(Error::ShapeMismatch(_))));
    assert!(matches!(knn_query(&tree, &x, &[0.0; 3], 11), Err(Error::KTooLarge { k: 11, n_samples: 10 })));
    assert!(knn_query(&tree, &x, &[0.0; 3], 0).unwrap().is_empty());
    assert!(ball_tree_build(&x, 0).is_err());
}

#[test]
fn strategies_agree_on_labels() {
    let x = tk::gaussian_matrix(300, 10, 4);
    let q = tk::gaussian_matrix(100, 10, 5);
    let y = ClassLabels::from_ids(x.rows().map(|r| if r[0] + r[1] > 0.0 { "pos" } else { "neg" }));
    let run = |strategy| {
        let params = KnnParams { k: 7, strategy, ..Default::default() };
        knn_classify(&params, &x, &y, &q).unwrap()
    };
    let tree = run(Strategy::BallTree);
    assert_eq!(tree, run(Strategy::Brute));
    let LabelVector::Classes(labels) = tree else { panic!() };
    assert_eq!(labels.len(), 100);
}

fn case() -> impl proptest::strategy::Strategy<Value = (usize, usize, usize, usize, u64, bool)> {
    (1usize..120, 1usize..9, 1usize..20, 1usize..40, any::<u64>(), any::<bool>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn tree_query_equals_brute_force((n, p, leaf, k_raw, seed, grid) in case()) {
        let mut x = tk::gaussian_matrix(n, p, seed);
        if grid {
            // coarse integer lattice forces many exact distance ties
            let rows: Vec<Vec<f64>> = x.rows().map(|r| r.iter().map(|v| (v * 1.5).round()).collect()).collect();
            x = DataMatrix::from_rows(&rows).unwrap();
        }
        let k = 1 + (k_raw - 1) % n;
        let tree = ball_tree_build(&x, leaf).unwrap();
        let queries = tk::gaussian_matrix(5, p, seed ^ 0x5eed);
        for q in queries.rows().chain(x.rows().take(3)) {
            let a = knn_query(&tree, &x, q, k).unwrap();
            let b = brute_force_query(&x, q, k).unwrap();
            prop_assert_eq!(&a, &b);
            let idx: Vec<usize> = a.iter().map(|n| n.index).collect();
            prop_assert_eq!(idx, tk::knn_by_sort(&x, q, k));
        }
    }
}
