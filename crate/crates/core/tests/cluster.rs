use learnkit::cluster::{kmeans_fit, KMeansModel, KMeansParams};
use learnkit::{DataMatrix, Error, Warning};
use learnkit_testkit as tk;

fn params(k: usize, seed: u64) -> KMeansParams {
    KMeansParams { k, seed, ..Default::default() }
}

fn same_partition(a: &[usize], b: &[usize]) -> bool {
    a.iter().zip(b).all(|(x, y)| a.iter().zip(b).all(|(u, v)| (x == u) == (y == v)))
}

fn sorted_centroids(m: &KMeansModel) -> Vec<Vec<f64>> {
    let mut c: Vec<Vec<f64>> = (0..m.n_clusters()).map(|i| m.centroid(i).to_vec()).collect();
    c.sort_by(|a, b| a.partial_cmp(b).unwrap());
    c
}

#[test]
fn two_blobs_recovered_on_every_seed() {
    for seed in 0..20 {
        let centers = vec![vec![0.0, 0.0, 0.0], vec![20.0, -5.0, 10.0]];
        let (x, truth) = tk::blobs(&centers, 40, 1.0, 100 + seed);
        let m = kmeans_fit(&params(2, seed), &x, None).unwrap();
        assert!(same_partition(&m.labels, &truth), "seed {seed}");
    }
}

#[test]
fn inertia_never_increases_within_a_run() {
    for seed in 0..10 {
        let x = tk::gaussian_matrix(150, 4, seed);
        let m = kmeans_fit(&KMeansParams { n_init: 1, tol: 0.0, ..params(6, seed) }, &x, None).unwrap();
        for w in m.inertia_history.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12), "seed {seed}: {} -> {}", w[0], w[1]);
        }
        assert_eq!(*m.inertia_history.last().unwrap(), m.inertia);
    }
}

#[test]
fn best_run_is_kept() {
    let x = tk::gaussian_matrix(100, 3, 4);
    let m = kmeans_fit(&KMeansParams { n_init: 7, ..params(5, 1) }, &x, None).unwrap();
    assert_eq!(m.run_inertias.len(), 7);
    assert!(m.run_inertias.iter().all(|&r| m.inertia <= r));
}

#[test]
fn centroids_are_weighted_means_of_their_members() {
    let x = tk::gaussian_matrix(90, 3, 8);
    let w: Vec<f64> = (0..90).map(|i| 0.5 + (i % 4) as f64).collect();
    let m = kmeans_fit(&params(4, 2), &x, Some(&w)).unwrap();
    let mut inertia = 0.0;
    for c in 0..4 {
        let members: Vec<usize> = (0..90).filter(|&i| m.labels[i] == c).collect();
        assert!(!members.is_empty(), "cluster {c} is empty");
        let total: f64 = members.iter().map(|&i| w[i]).sum();
        for j in 0..3 {
            let mean = members.iter().map(|&i| w[i] * x.row(i)[j]).sum::<f64>() / total;
            assert!((mean - m.centroid(c)[j]).abs() < 1e-8);
        }
        inertia += members
            .iter()
            .map(|&i| w[i] * x.row(i).iter().zip(m.centroid(c)).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
            .sum::<f64>();
    }
    assert!((inertia - m.inertia).abs() <= 1e-9 * m.inertia);
}

#[test]
fn single_cluster_is_the_weighted_mean() {
    let x = tk::gaussian_matrix(30, 2, 1);
    let w: Vec<f64> = (0..30).map(|i| 1.0 + i as f64).collect();
    let m = kmeans_fit(&params(1, 0), &x, Some(&w)).unwrap();
    let total: f64 = w.iter().sum();
    let mean: Vec<f64> = (0..2).map(|j| x.rows().zip(&w).map(|(r, v)| v * r[j]).sum::<f64>() / total).collect();
    for j in 0..2 {
        assert!((m.centroid(0)[j] - mean[j]).abs() < 1e-12);
    }
    let ss: f64 = x.rows().zip(&w).map(|(r, v)| v * ((r[0] - mean[0]).powi(2) + (r[1] - mean[1]).powi(2))).sum();
    assert!((m.inertia - ss).abs() < 1e-9 * ss);
}

#[test]
fn doubled_weight_equals_duplicated_row() {
    let centers = vec![vec![0.0, 0.0], vec![10.0, 0.0], vec![0.0, 10.0]];
    let (x, _) = tk::blobs(&centers, 10, 1.5, 3);
    let rows = tk::rows_of(&x);
    let mut dup = rows.clone();
    dup.extend(rows.iter().take(5).cloned());
    let mut w = vec![1.0; rows.len()];
    w[..5].iter_mut().for_each(|v| *v = 2.0);
    let a = kmeans_fit(&params(3, 0), &x, Some(&w)).unwrap();
    let b = kmeans_fit(&params(3, 0), &DataMatrix::from_rows(&dup).unwrap(), None).unwrap();
    for (ca, cb) in sorted_centroids(&a).iter().zip(&sorted_centroids(&b)) {
        for (u, v) in ca.iter().zip(cb) {
            assert!((u - v).abs() < 1e-10);
        }
    }
    assert!((a.inertia - b.inertia).abs() < 1e-9 * a.inertia);
}

#[test]
fn predict_follows_the_tie_rule() {
    // centroids (0, 1) and (8, 1); the midpoint (4, 1) is exactly equidistant
    let x = DataMatrix::from_rows(&[[0.0, 0.0], [8.0, 2.0], [0.0, 2.0], [8.0, 0.0]]).unwrap();
    let m = kmeans_fit(&params(2, 0), &x, None).unwrap();
    assert_eq!(m.predict(&x).unwrap(), m.labels);
    let mid = vec![4.0, 1.0];
    let at = DataMatrix::from_rows(&[mid, m.centroid(1).to_vec(), m.centroid(0).to_vec()]).unwrap();
    assert_eq!(m.predict(&at).unwrap(), vec![0, 1, 0]);
    assert!(matches!(m.predict(&tk::gaussian_matrix(2, 3, 0)), Err(Error::ShapeMismatch(_))));
}

#[test]
fn every_point_its_own_cluster() {
    let x = tk::gaussian_matrix(12, 3, 6);
    let m = kmeans_fit(&params(12, 0), &x, None).unwrap();
    assert_eq!(m.inertia, 0.0);
    let mut labels = m.labels.clone();
    labels.sort_unstable();
    assert_eq!(labels, (0..12).collect::<Vec<_>>());
}

#[test]
fn too_few_points_or_distinct_rows() {
    let x = DataMatrix::from_rows(&[[1.0, 1.0], [1.0, 1.0], [2.0, 0.0], [2.0, 0.0], [1.0, 1.0]]).unwrap();
    assert!(matches!(kmeans_fit(&params(6, 0), &x, None), Err(Error::KTooLarge { k: 6, n_samples: 5 })));
    let m = kmeans_fit(&params(4, 0), &x, None).unwrap();
    assert_eq!(m.n_clusters(), 2);
    assert!(m.warnings.iter().any(|w| matches!(w, Warning::DuplicateCollapse { .. })));
    assert_eq!(m.inertia, 0.0);
}

#[test]
fn fixed_seed_is_deterministic() {
    let x = tk::gaussian_matrix(200, 5, 12);
    assert_eq!(kmeans_fit(&params(7, 3), &x, None).unwrap(), kmeans_fit(&params(7, 3), &x, None).unwrap());
}
