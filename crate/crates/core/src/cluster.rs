//! k-means clustering: weighted k-means++ seeding, Lloyd iterations, restarts.

use std::collections::HashSet;

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{check_weights, DataMatrix};
use crate::error::{Error, Result, Warning};
use crate::linalg::sq_dist;

/// Rows per block in the assignment step.
const BLOCK_ROWS: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansParams {
    pub k: usize,
    pub n_init: usize,
    pub max_iter: usize,
    /// Relative inertia change below which a run is considered converged.
    pub tol: f64,
    pub seed: u64,
}

impl Default for KMeansParams {
    fn default() -> Self {
        KMeansParams { k: 8, n_init: 10, max_iter: 300, tol: 1e-4, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansModel {
    /// `n_clusters × n_features`, row-major.
    centroids: Vec<f64>,
    pub n_features: usize,
    /// Weighted within-cluster sum of squared distances.
    pub inertia: f64,
    pub labels: Vec<usize>,
    pub n_iter: usize,
    /// Inertia after every assignment step of the winning run.
    pub inertia_history: Vec<f64>,
    /// Final inertia of every restart, in run order.
    pub run_inertias: Vec<f64>,
    pub warnings: Vec<Warning>,
}

impl KMeansModel {
    pub fn n_clusters(&self) -> usize {
        self.centroids.len() / self.n_features
    }

    pub fn centroid(&self, c: usize) -> &[f64] {
        &self.centroids[c * self.n_features..(c + 1) * self.n_features]
    }

    /// Nearest centroid per row; ties go to the lower index.
    pub fn predict(&self, x: &DataMatrix) -> Result<Vec<usize>> {
        x.check_width(self.n_features)?;
        let (labels, _) = assign(x, &self.centroids, self.n_features);
        Ok(labels)
    }
}

pub fn kmeans_fit(params: &KMeansParams, x: &DataMatrix, sample_weight: Option<&[f64]>) -> Result<KMeansModel> {
    let n = x.n_samples();
    let p = x.n_features();
    if params.k == 0 || params.n_init == 0 || params.max_iter == 0 {
        return Err(Error::InvalidParam {
            name: "k/n_init/max_iter".into(),
            reason: "must be at least 1".into(),
        });
    }
    if !(params.tol >= 0.0) {
        return Err(Error::InvalidParam { name: "tol".into(), reason: "must be nonnegative".into() });
    }
    if params.k > n {
        return Err(Error::KTooLarge { k: params.k, n_samples: n });
    }
    if let Some(w) = sample_weight {
        check_weights(w, n)?;
    }
    let weights: Vec<f64> = sample_weight.map_or_else(|| vec![1.0; n], <[f64]>::to_vec);

    let distinct = distinct_rows(x);
    if distinct.len() < params.k {
        warn!("kmeans: {} clusters requested, {} distinct points", params.k, distinct.len());
        let mut centroids = Vec::with_capacity(distinct.len() * p);
        for &i in &distinct {
            centroids.extend_from_slice(x.row(i));
        }
        let (labels, d2) = assign(x, &centroids, p);
        let inertia = weighted_sum(&weights, &d2);
        return Ok(KMeansModel {
            centroids,
            n_features: p,
            inertia,
            labels,
            n_iter: 0,
            inertia_history: vec![inertia],
            run_inertias: vec![inertia],
            warnings: vec![Warning::DuplicateCollapse { requested: params.k, distinct: distinct.len() }],
        });
    }

    let mut master = ChaCha8Rng::seed_from_u64(params.seed);
    let mut best: Option<Run> = None;
    let mut run_inertias = Vec::with_capacity(params.n_init);
    for _ in 0..params.n_init {
        let mut rng = ChaCha8Rng::seed_from_u64(master.random());
        let run = lloyd(x, &weights, params, &mut rng);
        run_inertias.push(run.inertia);
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    let best = best.expect("n_init ≥ 1");
    Ok(KMeansModel {
        centroids: best.centroids,
        n_features: p,
        inertia: best.inertia,
        labels: best.labels,
        n_iter: best.n_iter,
        inertia_history: best.history,
        run_inertias,
        warnings: Vec::new(),
    })
}

struct Run {
    centroids: Vec<f64>,
    labels: Vec<usize>,
    inertia: f64,
    n_iter: usize,
    history: Vec<f64>,
}

fn lloyd(x: &DataMatrix, w: &[f64], params: &KMeansParams, rng: &mut ChaCha8Rng) -> Run {
    let p = x.n_features();
    let mut centroids = kmeans_plus_plus(x, w, params.k, rng);
    let mut labels: Vec<usize> = Vec::new();
    let mut history = Vec::new();
    let mut n_iter = 0;

    loop {
        let (new_labels, d2) = assign(x, &centroids, p);
        let inertia = weighted_sum(w, &d2);
        if let Some(&last) = history.last() {
            debug_assert!(inertia <= last * (1.0 + 1e-12) + 1e-300, "inertia increased from {last} to {inertia}");
        }
        history.push(inertia);
        if new_labels == labels {
            // centroids are already the means of these labels
            return Run { centroids, labels, inertia, n_iter, history };
        }
        labels = new_labels;
        if n_iter == params.max_iter {
            return Run { centroids, labels, inertia, n_iter, history };
        }
        n_iter += 1;
        let repaired = update_centroids(x, w, &labels, &d2, params.k, &mut centroids);
        if !repaired {
            let updated = assigned_inertia(x, w, &labels, &centroids);
            if inertia - updated <= params.tol * inertia || n_iter == params.max_iter {
                history.push(updated);
                return Run { centroids, labels, inertia: updated, n_iter, history };
            }
        }
    }
}

/// Inertia of fixed assignments against the given centroids.
fn assigned_inertia(x: &DataMatrix, w: &[f64], labels: &[usize], centroids: &[f64]) -> f64 {
    let p = x.n_features();
    x.rows()
        .enumerate()
        .map(|(i, r)| w[i] * sq_dist(r, &centroids[labels[i] * p..(labels[i] + 1) * p]))
        .sum()
}

/// Weighted k-means++: first center ∝ w, then ∝ w·D².
fn kmeans_plus_plus(x: &DataMatrix, w: &[f64], k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = x.n_samples();
    let p = x.n_features();
    let mut centroids = Vec::with_capacity(k * p);
    let first = sample_index(w, rng).unwrap_or(0);
    centroids.extend_from_slice(x.row(first));
    let mut closest: Vec<f64> = x.rows().map(|r| sq_dist(r, x.row(first))).collect();
    for _ in 1..k {
        let scores: Vec<f64> = (0..n).map(|i| w[i] * closest[i]).collect();
        let next = sample_index(&scores, rng).unwrap_or_else(|| {
            // all remaining mass is zero; take the farthest point
            (0..n).fold(0, |b, i| if closest[i] > closest[b] { i } else { b })
        });
        let c = x.row(next).to_vec();
        for (i, row) in x.rows().enumerate() {
            closest[i] = closest[i].min(sq_dist(row, &c));
        }
        centroids.extend(c);
    }
    centroids
}

fn sample_index(mass: &[f64], rng: &mut ChaCha8Rng) -> Option<usize> {
    let total: f64 = mass.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, m) in mass.iter().enumerate() {
        acc += m;
        if acc > target && *m > 0.0 {
            return Some(i);
        }
    }
    mass.iter().rposition(|&m| m > 0.0)
}

/// Nearest centroid and squared distance per row, computed block by block
/// against all centroids.
fn assign(x: &DataMatrix, centroids: &[f64], p: usize) -> (Vec<usize>, Vec<f64>) {
    let n = x.n_samples();
    let k = centroids.len() / p;
    let mut labels = vec![0; n];
    let mut d2 = vec![0.0; n];
    let mut block = vec![0.0; BLOCK_ROWS * k];
    for start in (0..n).step_by(BLOCK_ROWS) {
        let end = (start + BLOCK_ROWS).min(n);
        for i in start..end {
            let row = x.row(i);
            for c in 0..k {
                block[(i - start) * k + c] = sq_dist(row, &centroids[c * p..(c + 1) * p]);
            }
        }
        for i in start..end {
            let dists = &block[(i - start) * k..(i - start + 1) * k];
            let (best, dist) = dists
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |(b, bd), (c, &d)| if d < bd { (c, d) } else { (b, bd) });
            labels[i] = best;
            d2[i] = dist;
        }
    }
    (labels, d2)
}

/// Weighted means; empty clusters move to the point farthest from its own
/// centroid (each point used at most once). Returns whether any cluster was
/// empty.
fn update_centroids(x: &DataMatrix, w: &[f64], labels: &[usize], d2: &[f64], k: usize, centroids: &mut [f64]) -> bool {
    let p = x.n_features();
    let mut sums = vec![0.0; k * p];
    let mut mass = vec![0.0; k];
    for (i, row) in x.rows().enumerate() {
        let c = labels[i];
        mass[c] += w[i];
        for (s, v) in sums[c * p..(c + 1) * p].iter_mut().zip(row) {
            *s += w[i] * v;
        }
    }
    let mut far = d2.to_vec();
    let mut repaired = false;
    for c in 0..k {
        let target = &mut centroids[c * p..(c + 1) * p];
        if mass[c] > 0.0 {
            for (t, s) in target.iter_mut().zip(&sums[c * p..(c + 1) * p]) {
                *t = s / mass[c];
            }
        } else {
            let pick = (0..far.len()).fold(0, |b, i| if far[i] > far[b] { i } else { b });
            target.copy_from_slice(x.row(pick));
            far[pick] = f64::NEG_INFINITY;
            repaired = true;
        }
    }
    repaired
}

fn weighted_sum(w: &[f64], d2: &[f64]) -> f64 {
    w.iter().zip(d2).map(|(a, b)| a * b).sum()
}

/// Index of the first occurrence of every distinct row.
fn distinct_rows(x: &DataMatrix) -> Vec<usize> {
    let mut seen = HashSet::new();
    x.rows()
        .enumerate()
        .filter(|(_, r)| seen.insert(r.iter().map(|v| (v + 0.0).to_bits()).collect::<Vec<u64>>()))
        .map(|(i, _)| i)
        .collect()
}
