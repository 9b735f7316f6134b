//! Slow, obviously-correct reference computations and seeded generators.
//!
//! Nothing here calls into the library's solvers; only `DataMatrix` is
//! shared so results can be fed back in.

use learnkit::DataMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_rows(n: usize, p: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    (0..n).map(|_| (0..p).map(|_| StandardNormal.sample(&mut r)).collect()).collect()
}

pub fn gaussian_matrix(n: usize, p: usize, seed: u64) -> DataMatrix {
    DataMatrix::from_rows(&gaussian_rows(n, p, seed)).unwrap()
}

/// Rows with prescribed column scales: column `j` is N(0, scales[j]²).
pub fn scaled_matrix(n: usize, scales: &[f64], seed: u64) -> DataMatrix {
    let mut rows = gaussian_rows(n, scales.len(), seed);
    for row in &mut rows {
        for (v, s) in row.iter_mut().zip(scales) {
            *v *= s;
        }
    }
    DataMatrix::from_rows(&rows).unwrap()
}

/// `n_per` points around each center with uniform jitter in `[-spread, spread]`.
/// Returns rows and the center index of each row.
pub fn blobs(centers: &[Vec<f64>], n_per: usize, spread: f64, seed: u64) -> (DataMatrix, Vec<usize>) {
    let mut r = rng(seed);
    let mut rows = Vec::new();
    let mut truth = Vec::new();
    for _ in 0..n_per {
        for (c, center) in centers.iter().enumerate() {
            rows.push(center.iter().map(|m| m + r.random_range(-spread..=spread)).collect::<Vec<f64>>());
            truth.push(c);
        }
    }
    (DataMatrix::from_rows(&rows).unwrap(), truth)
}

pub fn rows_of(x: &DataMatrix) -> Vec<Vec<f64>> {
    x.rows().map(<[f64]>::to_vec).collect()
}

/// Gaussian elimination with partial pivoting. `None` for a (numerically)
/// singular system.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs())).max(1e-300);
    for col in 0..n {
        let piv = (col..n).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if a[piv][col].abs() <= 1e-13 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
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

fn means(x: &DataMatrix) -> Vec<f64> {
    let n = x.n_samples() as f64;
    let mut m = vec![0.0; x.n_features()];
    for row in x.rows() {
        for (a, v) in m.iter_mut().zip(row) {
            *a += v;
        }
    }
    m.iter_mut().for_each(|a| *a /= n);
    m
}

/// Ordinary least squares through the normal equations. Returns
/// `(weights, intercept)`.
pub fn ols(x: &DataMatrix, y: &[f64], fit_intercept: bool) -> (Vec<f64>, f64) {
    let p = x.n_features();
    let (xm, ym) = if fit_intercept {
        (means(x), y.iter().sum::<f64>() / y.len() as f64)
    } else {
        (vec![0.0; p], 0.0)
    };
    let mut g = vec![vec![0.0; p]; p];
    let mut rhs = vec![0.0; p];
    for (row, &t) in x.rows().zip(y) {
        let c: Vec<f64> = row.iter().zip(&xm).map(|(v, m)| v - m).collect();
        for a in 0..p {
            rhs[a] += c[a] * (t - ym);
            for b in 0..p {
                g[a][b] += c[a] * c[b];
            }
        }
    }
    let w = solve(g, rhs).expect("well-conditioned design");
    let b = ym - w.iter().zip(&xm).map(|(a, m)| a * m).sum::<f64>();
    (w, b)
}

pub fn soft_threshold(v: f64, t: f64) -> f64 {
    v.signum() * (v.abs() - t).max(0.0)
}

/// Elastic Net objective `1/(2n)‖y − Xβ − b‖² + αρ‖β‖₁ + ½α(1−ρ)‖β‖²`.
pub fn enet_objective(x: &DataMatrix, y: &[f64], beta: &[f64], intercept: f64, alpha: f64, l1_ratio: f64) -> f64 {
    let n = y.len() as f64;
    let rss: f64 = x
        .rows()
        .zip(y)
        .map(|(r, t)| {
            let f: f64 = r.iter().zip(beta).map(|(a, b)| a * b).sum::<f64>() + intercept;
            (t - f) * (t - f)
        })
        .sum();
    let l1: f64 = beta.iter().map(|b| b.abs()).sum();
    let l2: f64 = beta.iter().map(|b| b * b).sum();
    rss / (2.0 * n) + alpha * l1_ratio * l1 + 0.5 * alpha * (1.0 - l1_ratio) * l2
}

/// Duality gap of the unit-weight Elastic Net at `(beta, intercept)`,
/// recomputed from the raw data. The dual point is the better of the
/// rescaled augmented residual and (with an L2 term) the residual itself;
/// with no penalty the dual value is the least-squares optimum.
pub fn enet_gap(
    x: &DataMatrix,
    y: &[f64],
    beta: &[f64],
    intercept: f64,
    alpha: f64,
    l1_ratio: f64,
    fit_intercept: bool,
) -> f64 {
    let n = y.len();
    let p = x.n_features();
    let nf = n as f64;
    let l1 = nf * alpha * l1_ratio;
    let l2 = nf * alpha * (1.0 - l1_ratio);
    let (xm, ym) = if fit_intercept {
        (means(x), y.iter().sum::<f64>() / nf)
    } else {
        (vec![0.0; p], 0.0)
    };
    let xc: Vec<Vec<f64>> = x.rows().map(|r| r.iter().zip(&xm).map(|(v, m)| v - m).collect()).collect();
    let yc: Vec<f64> = y.iter().map(|t| t - ym).collect();
    let resid: Vec<f64> = (0..n)
        .map(|i| {
            let f: f64 = x.row(i).iter().zip(beta).map(|(a, b)| a * b).sum::<f64>() + intercept;
            y[i] - f
        })
        .collect();
    let r_sq: f64 = resid.iter().map(|r| r * r).sum();
    let b_l1: f64 = beta.iter().map(|b| b.abs()).sum();
    let b_sq: f64 = beta.iter().map(|b| b * b).sum();
    let primal = 0.5 * r_sq + l1 * b_l1 + 0.5 * l2 * b_sq;
    let c: Vec<f64> = (0..p).map(|j| (0..n).map(|i| xc[i][j] * resid[i]).sum()).collect();
    let r_y: f64 = resid.iter().zip(&yc).map(|(a, b)| a * b).sum();

    let dual = if l1 == 0.0 && l2 == 0.0 {
        let (w, b) = ols(x, y, fit_intercept);
        let best: f64 = (0..n)
            .map(|i| {
                let f: f64 = x.row(i).iter().zip(&w).map(|(a, c)| a * c).sum::<f64>() + b;
                (y[i] - f).powi(2)
            })
            .sum();
        0.5 * best
    } else {
        let norm = c.iter().zip(beta).map(|(c, b)| (c - l2 * b).abs()).fold(0.0_f64, f64::max);
        let s = if norm > l1 { l1 / norm } else { 1.0 };
        let augmented = s * r_y - 0.5 * s * s * (r_sq + l2 * b_sq);
        if l2 > 0.0 {
            let excess: f64 = c.iter().map(|v| (v.abs() - l1).max(0.0).powi(2)).sum();
            augmented.max(r_y - 0.5 * r_sq - excess / (2.0 * l2))
        } else {
            augmented
        }
    };
    (primal - dual).max(0.0) / nf
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Eigenpairs are
/// returned sorted by decreasing eigenvalue; eigenvectors are columns of the
/// returned matrix (`vecs[row][col]`).
pub fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        let total: f64 = a.iter().flatten().map(|x| x * x).sum();
        if off <= 1e-30 * total.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vecs = (0..n).map(|r| order.iter().map(|&c| v[r][c]).collect()).collect();
    (values, vecs)
}

/// Sample covariance (denominator `n − 1`).
pub fn covariance(x: &DataMatrix) -> Vec<Vec<f64>> {
    let p = x.n_features();
    let m = means(x);
    let mut c = vec![vec![0.0; p]; p];
    for row in x.rows() {
        let d: Vec<f64> = row.iter().zip(&m).map(|(v, m)| v - m).collect();
        for a in 0..p {
            for b in 0..p {
                c[a][b] += d[a] * d[b];
            }
        }
    }
    let denom = (x.n_samples() - 1) as f64;
    c.iter_mut().flatten().for_each(|v| *v /= denom);
    c
}

/// Exact per-component variances (descending) from the covariance spectrum.
pub fn exact_variances(x: &DataMatrix) -> Vec<f64> {
    jacobi_eigen(covariance(x)).0
}

/// Variance of the data captured by an orthonormal set of directions.
pub fn captured_variance(x: &DataMatrix, directions: &[Vec<f64>]) -> f64 {
    let c = covariance(x);
    directions
        .iter()
        .map(|d| {
            let cd: Vec<f64> = c.iter().map(|row| row.iter().zip(d).map(|(a, b)| a * b).sum()).collect();
            cd.iter().zip(d).map(|(a, b)| a * b).sum::<f64>()
        })
        .sum()
}

/// A matrix whose centered singular values are exactly `spectrum` (scaled so
/// that per-component variances equal `spectrum[i]²`), built from random
/// orthonormal factors.
pub fn matrix_with_spectrum(n: usize, p: usize, spectrum: &[f64], seed: u64) -> DataMatrix {
    let k = spectrum.len();
    let u = orthonormal_columns(n, k, seed, true);
    let v = orthonormal_columns(p, k, seed ^ 0x9e37_79b9_7f4a_7c15, false);
    let scale = ((n - 1) as f64).sqrt();
    let mut rows = vec![vec![0.0; p]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, out) in row.iter_mut().enumerate() {
            *out = (0..k).map(|c| u[c][i] * spectrum[c] * scale * v[c][j]).sum();
        }
    }
    DataMatrix::from_rows(&rows).unwrap()
}

/// `k` orthonormal vectors of length `n` by Gram-Schmidt on Gaussian draws;
/// optionally orthogonal to the all-ones vector (so columns are centered).
fn orthonormal_columns(n: usize, k: usize, seed: u64, centered: bool) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    if centered {
        basis.push(vec![1.0 / (n as f64).sqrt(); n]);
    }
    let skip = basis.len();
    while basis.len() < k + skip {
        let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut r)).collect();
        for _ in 0..2 {
            for b in &basis {
                let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
    basis.split_off(skip)
}

/// Value of the SVM dual `Σα − ½ΣΣ αᵢαⱼyᵢyⱼK(xᵢ, xⱼ)`.
pub fn svm_dual_value(gram: &[Vec<f64>], y: &[f64], alpha: &[f64]) -> f64 {
    let n = y.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * gram[i][j];
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Global optimum of the SVM dual by exhaustive active-set enumeration:
/// every variable is at 0, at its bound, or free, and the free block
/// solves the equality-constrained stationarity system. Exponential in n.
pub fn svm_dual_bruteforce(gram: &[Vec<f64>], y: &[f64], upper: &[f64]) -> f64 {
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
        let mut alpha: Vec<f64> = (0..n).map(|i| if state[i] == 1 { upper[i] } else { 0.0 }).collect();
        if !free.is_empty() {
            let f = free.len();
            let mut a = vec![vec![0.0; f + 1]; f + 1];
            let mut b = vec![0.0; f + 1];
            for (r, &i) in free.iter().enumerate() {
                for (s, &j) in free.iter().enumerate() {
                    a[r][s] = y[i] * y[j] * gram[i][j];
                }
                a[r][f] = y[i];
                a[f][r] = y[i];
                let bounded: f64 = (0..n).filter(|&j| state[j] == 1).map(|j| y[i] * y[j] * upper[j] * gram[i][j]).sum();
                b[r] = 1.0 - bounded;
            }
            b[f] = -(0..n).filter(|&j| state[j] == 1).map(|j| upper[j] * y[j]).sum::<f64>();
            let Some(sol) = solve(a, b) else { continue };
            for (r, &i) in free.iter().enumerate() {
                alpha[i] = sol[r];
            }
        }
        let eq: f64 = alpha.iter().zip(y).map(|(a, t)| a * t).sum();
        if eq.abs() > 1e-9 || (0..n).any(|i| alpha[i] < -1e-12 || alpha[i] > upper[i] + 1e-12) {
            continue;
        }
        best = best.max(svm_dual_value(gram, y, &alpha));
    }
    best
}

pub fn rbf_gram(x: &DataMatrix, gamma: f64) -> Vec<Vec<f64>> {
    x.rows()
        .map(|a| {
            x.rows()
                .map(|b| (-gamma * a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>()).exp())
                .collect()
        })
        .collect()
}

/// Indices of the `k` nearest rows by full sort on `(squared distance, index)`.
pub fn knn_by_sort(x: &DataMatrix, q: &[f64], k: usize) -> Vec<usize> {
    let mut all: Vec<(f64, usize)> = x
        .rows()
        .enumerate()
        .map(|(i, r)| (r.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum(), i))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    all.into_iter().take(k).map(|(_, i)| i).collect()
}
