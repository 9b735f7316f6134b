use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

fn blobs(n: usize, seed: u64, overlap: f64) -> (DataMatrix, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for i in 0..n {
        let s = if i % 2 == 0 { 1.0 } else { -1.0 };
        rows.push([s * overlap + rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
        y.push(s);
    }
    (DataMatrix::from_rows(&rows).unwrap(), y)
}

fn tight(kernel: Kernel, c: f64) -> SvcParams {
    SvcParams { c, kernel, tol: 1e-10, max_passes: Some(1_000_000), cache_rows: 200 }
}

/// Dual objective `Σα − ½ Σ αᵢαⱼyᵢyⱼK` computed from scratch.
fn dual_value(x: &DataMatrix, y: &[f64], alpha: &[f64], kernel: Kernel) -> f64 {
    let n = y.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * kernel.eval(x.row(i), x.row(j));
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Dense Gaussian elimination with partial pivoting; `None` if singular.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Exhaustive face enumeration: every sample is at 0, at C, or free; the
/// free block solves the equality-constrained stationarity system. The best
/// feasible stationary point is the global dual optimum.
fn brute_force_dual(x: &DataMatrix, y: &[f64], c: f64, kernel: Kernel) -> f64 {
    let n = y.len();
    let mut best = f64::NEG_INFINITY;
    for code in 0..3usize.pow(n as u32) {
        let mut state = vec![0u8; n];
        let mut m = code;
        for s in state.iter_mut() {
            *s = (m % 3) as u8;
            m /= 3;
        }
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        let mut alpha: Vec<f64> = state.iter().map(|&s| if s == 1 { c } else { 0.0 }).collect();
        if !free.is_empty() {
            let f = free.len();
            let mut a = vec![vec![0.0; f + 1]; f + 1];
            let mut b = vec![0.0; f + 1];
            for (r, &i) in free.iter().enumerate() {
                for (s, &j) in free.iter().enumerate() {
                    a[r][s] = y[i] * y[j] * kernel.eval(x.row(i), x.row(j));
                }
                a[r][f] = y[i];
                let fixed: f64 = (0..n)
                    .filter(|&j| state[j] == 1)
                    .map(|j| y[i] * y[j] * c * kernel.eval(x.row(i), x.row(j)))
                    .sum();
                b[r] = 1.0 - fixed;
                a[f][r] = y[i];
            }
            b[f] = -(0..n).filter(|&j| state[j] == 1).map(|j| c * y[j]).sum::<f64>();
            let Some(sol) = solve_dense(a, b) else { continue };
            for (r, &i) in free.iter().enumerate() {
                alpha[i] = sol[r];
            }
        }
        let eq: f64 = alpha.iter().zip(y).map(|(a, y)| a * y).sum();
        if eq.abs() > 1e-9 || alpha.iter().any(|&a| a < -1e-12 || a > c + 1e-12) {
            continue;
        }
        best = best.max(dual_value(x, y, &alpha, kernel));
    }
    best
}

#[test]
fn matches_brute_force_qp_on_six_points() {
    let x = DataMatrix::from_rows(&[[0.0, 0.0], [1.0, 0.3], [0.2, 1.1], [1.5, 1.4], [0.9, 0.8], [-0.4, 0.6]]).unwrap();
    let y = [1.0, -1.0, 1.0, -1.0, 1.0, -1.0];
    let kernel = Kernel::Rbf { gamma: 0.7 };
    for c in [0.5, 2.0, 50.0] {
        let model = svc_fit(&tight(kernel, c), &x, &y, None).unwrap();
        let oracle = brute_force_dual(&x, &y, c, kernel);
        let ours = dual_value(&x, &y, &model.alpha, kernel);
        assert!((ours - oracle).abs() < 1e-7 * (1.0 + oracle.abs()), "c={c}: {ours} vs {oracle}");
        assert!((model.dual_objective - ours).abs() < 1e-8 * (1.0 + ours.abs()));
    }
}

#[test]
fn kkt_certificate() {
    let (x, y) = blobs(60, 3, 0.6);
    let params = tight(Kernel::Rbf { gamma: 0.5 }, 1.0);
    let model = svc_fit(&params, &x, &y, None).unwrap();
    let eq: f64 = model.alpha.iter().zip(&y).map(|(a, y)| a * y).sum();
    assert!(eq.abs() < 1e-10);
    let eps = 1e-6;
    for i in 0..y.len() {
        let a = model.alpha[i];
        assert!((0.0..=model.upper[i]).contains(&a));
        let margin = y[i] * model.decision_row(x.row(i));
        if a == 0.0 {
            assert!(margin >= 1.0 - eps, "inactive sample {i} has margin {margin}");
        } else if a < model.upper[i] {
            assert!((margin - 1.0).abs() < eps, "free sample {i} has margin {margin}");
        } else {
            assert!(margin <= 1.0 + eps, "bounded sample {i} has margin {margin}");
        }
    }
}

#[test]
fn duplicating_a_row_equals_doubling_its_weight() {
    let (x, y) = blobs(24, 11, 0.4);
    let kernel = Kernel::Rbf { gamma: 0.8 };
    let params = tight(kernel, 1.5);
    for dup in [0, 5, 13] {
        let mut rows: Vec<usize> = (0..y.len()).collect();
        rows.push(dup);
        let x_dup = x.select_rows(&rows).unwrap();
        let y_dup: Vec<f64> = rows.iter().map(|&i| y[i]).collect();
        let mut w = vec![1.0; y.len()];
        w[dup] = 2.0;
        let a = svc_fit(&params, &x_dup, &y_dup, None).unwrap();
        let b = svc_fit(&params, &x, &y, Some(&w)).unwrap();
        let (probe, _) = blobs(40, 99, 0.5);
        for row in probe.rows() {
            let (fa, fb) = (a.decision_row(row), b.decision_row(row));
            assert!((fa - fb).abs() < 1e-6, "dup {dup}: {fa} vs {fb}");
        }
    }
}

#[test]
fn linear_kernel_decision_is_affine() {
    let (x, y) = blobs(30, 5, 0.8);
    let model = svc_fit(&tight(Kernel::Linear, 1.0), &x, &y, None).unwrap();
    let w = model.linear_weights();
    for row in x.rows() {
        let affine = w[0] * row[0] + w[1] * row[1] + model.bias;
        assert!((model.decision_row(row) - affine).abs() < 1e-10);
    }
}

#[test]
fn separable_points_are_fit_exactly() {
    let x = DataMatrix::from_rows(&[[0.0, 0.0], [0.0, 1.0], [3.0, 0.0], [3.0, 1.0]]).unwrap();
    let y = [-1.0, -1.0, 1.0, 1.0];
    let model = svc_fit(&tight(Kernel::Linear, 100.0), &x, &y, None).unwrap();
    // maximal-margin separator is x₀ = 1.5 with margin 1.5
    let w = model.linear_weights();
    assert!((w[0] - 2.0 / 3.0).abs() < 1e-8 && w[1].abs() < 1e-8);
    assert!((model.bias + 1.0).abs() < 1e-8);
    for (row, t) in x.rows().zip(y) {
        assert!((t * model.decision_row(row) - 1.0).abs() < 1e-8);
    }
}

#[test]
fn empty_query_and_shape_errors() {
    let (x, y) = blobs(10, 1, 1.0);
    let model = svc_fit(&SvcParams::default(), &x, &y, None).unwrap();
    assert!(svc_decision(&model, &[]).unwrap().is_empty());
    assert!(matches!(svc_decision(&model, &[&[1.0]]), Err(Error::ShapeMismatch(_))));
}

#[test]
fn single_class_rejected() {
    let x = DataMatrix::from_rows(&[[0.0], [1.0], [2.0]]).unwrap();
    assert_eq!(svc_fit(&SvcParams::default(), &x, &[1.0, 1.0, 1.0], None).unwrap_err(), Error::SingleClass);
    // zero weight removes the only negative sample
    let err = svc_fit(&SvcParams::default(), &x, &[1.0, -1.0, 1.0], Some(&[1.0, 0.0, 1.0])).unwrap_err();
    assert_eq!(err, Error::SingleClass);
}

#[test]
fn iteration_cap_reports_not_converged() {
    let (x, y) = blobs(40, 2, 0.2);
    let params = SvcParams { max_passes: Some(1), tol: 1e-12, ..SvcParams::default() };
    assert!(matches!(svc_fit(&params, &x, &y, None), Err(Error::NotConverged(_))));
}

#[test]
fn tiny_cache_gives_same_solution() {
    let (x, y) = blobs(50, 8, 0.5);
    let big = svc_fit(&tight(Kernel::Rbf { gamma: 1.0 }, 1.0), &x, &y, None).unwrap();
    let small = svc_fit(&SvcParams { cache_rows: 2, ..tight(Kernel::Rbf { gamma: 1.0 }, 1.0) }, &x, &y, None).unwrap();
    assert_eq!(big.alpha, small.alpha);
    assert_eq!(big.bias, small.bias);
}

#[test]
fn one_vs_one_three_classes() {
    let mut rows = Vec::new();
    let mut ids = Vec::new();
    let centers = [(0.0, 0.0, "x"), (6.0, 0.0, "y"), (0.0, 6.0, "z")];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10 {
        for &(cx, cy, id) in &centers {
            rows.push([cx + rng.random_range(-1.0..1.0), cy + rng.random_range(-1.0..1.0)]);
            ids.push(id);
        }
    }
    let x = DataMatrix::from_rows(&rows).unwrap();
    let y = ClassLabels::from_ids(ids);
    let ovo = multiclass_svc_fit(&SvcParams::default(), &x, &y, None).unwrap();
    assert_eq!(ovo.pairs.len(), 3);
    assert_eq!(ovo.predict_codes(&x).unwrap(), y.codes());
    for (a, b, m) in &ovo.pairs {
        for &s in &m.support_indices {
            assert!(y.codes()[s] == *a || y.codes()[s] == *b);
        }
    }
}

#[test]
fn vote_ties_use_confidence_then_lowest_code() {
    // a three-way cycle: every class wins once
    let cycle = [(0, 1, 0.5), (0, 2, -0.2), (1, 2, 0.9)];
    // wins: 1 (0.5), 0 (0.2), 2 (0.9)
    assert_eq!(ovo_vote(3, &cycle), 2);
    let even = [(0, 1, 0.5), (0, 2, -0.5), (1, 2, 0.5)];
    assert_eq!(ovo_vote(3, &even), 0);
    // two-way tie among four classes
    let two = [(0, 1, 1.0), (0, 2, 1.0), (0, 3, -1.0), (1, 2, -0.3), (1, 3, -2.0), (2, 3, -1.0)];
    // votes: 0→1, 1→2, 2→2, 3→1; classes 1 and 2 tie, class 1 has more confidence
    assert_eq!(ovo_vote(4, &two), 1);
}
