//! Truncated PCA: randomized range finding for large inputs, a dense thin
//! SVD otherwise.

use std::str::FromStr;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::linalg::dot;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcaSolver {
    Auto,
    Randomized,
    Exact,
}

impl FromStr for PcaSolver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(PcaSolver::Auto),
            "randomized" => Ok(PcaSolver::Randomized),
            "exact" => Ok(PcaSolver::Exact),
            other => Err(Error::InvalidParam { name: "solver".into(), reason: format!("unknown `{other}`") }),
        }
    }
}

impl PcaSolver {
    /// `Auto` is exact when `min(n, p) ≤ 100` or `k > min(n, p)/5`.
    pub fn resolve(self, n_samples: usize, n_features: usize, k: usize) -> PcaSolver {
        let m = n_samples.min(n_features);
        match self {
            PcaSolver::Auto if m <= 100 || 5 * k > m => PcaSolver::Exact,
            PcaSolver::Auto => PcaSolver::Randomized,
            s => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcaParams {
    pub n_components: usize,
    pub n_oversamples: usize,
    pub n_power_iters: usize,
    pub seed: u64,
    pub solver: PcaSolver,
}

impl Default for PcaParams {
    fn default() -> Self {
        PcaParams { n_components: 2, n_oversamples: 10, n_power_iters: 4, seed: 0, solver: PcaSolver::Auto }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    /// `k × n_features`, orthonormal rows, row-major.
    components: Vec<f64>,
    /// Per-component variance (denominator `n − 1`), non-increasing.
    pub explained_variance: Vec<f64>,
    pub mean: Vec<f64>,
    /// Total variance of the training data.
    pub total_variance: f64,
    pub n_features: usize,
    pub solver: PcaSolver,
}

impl PcaModel {
    pub fn n_components(&self) -> usize {
        self.explained_variance.len()
    }

    pub fn component(&self, i: usize) -> &[f64] {
        &self.components[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn explained_variance_ratio(&self) -> Vec<f64> {
        self.explained_variance
            .iter()
            .map(|v| if self.total_variance > 0.0 { v / self.total_variance } else { 0.0 })
            .collect()
    }

    /// `(X − mean)·componentsᵀ`
    pub fn transform(&self, x: &DataMatrix) -> Result<DataMatrix> {
        x.check_width(self.n_features)?;
        let k = self.n_components();
        let mut out = Vec::with_capacity(x.n_samples() * k);
        let mut centered = vec![0.0; self.n_features];
        for row in x.rows() {
            for (c, (v, m)) in centered.iter_mut().zip(row.iter().zip(&self.mean)) {
                *c = v - m;
            }
            out.extend((0..k).map(|i| dot(&centered, self.component(i))));
        }
        DataMatrix::from_shape_vec(x.n_samples(), k, out)
    }

    /// Maps projected coordinates back to feature space.
    pub fn inverse_transform(&self, z: &DataMatrix) -> Result<DataMatrix> {
        z.check_width(self.n_components())?;
        let mut out = Vec::with_capacity(z.n_samples() * self.n_features);
        for row in z.rows() {
            let mut rec = self.mean.clone();
            for (i, coef) in row.iter().enumerate() {
                crate::linalg::axpy(*coef, self.component(i), &mut rec);
            }
            out.extend(rec);
        }
        DataMatrix::from_shape_vec(z.n_samples(), self.n_features, out)
    }
}

pub fn pca_fit(params: &PcaParams, x: &DataMatrix) -> Result<PcaModel> {
    let (n, p) = x.shape();
    let k = params.n_components;
    if k == 0 || k > n.min(p) {
        return Err(Error::InvalidParam {
            name: "n_components".into(),
            reason: format!("{k} outside 1..={}", n.min(p)),
        });
    }
    let mean = x.column_means();
    let mut centered = DMatrix::from_row_slice(n, p, x.as_slice());
    for (j, m) in mean.iter().enumerate() {
        centered.column_mut(j).add_scalar_mut(-m);
    }
    let denom = (n.max(2) - 1) as f64;
    let total_variance = centered.norm_squared() / denom;

    let solver = params.solver.resolve(n, p, k);
    let (singular, vt) = match solver {
        PcaSolver::Randomized => randomized_svd(&centered, params),
        _ => {
            let svd = centered.svd(false, true);
            (svd.singular_values.as_slice().to_vec(), svd.v_t.expect("v_t requested"))
        }
    };

    let mut components = Vec::with_capacity(k * p);
    for i in 0..k {
        let mut row: Vec<f64> = vt.row(i).iter().copied().collect();
        let pivot = row
            .iter()
            .enumerate()
            .fold(0, |best, (j, v)| if v.abs() > row[best].abs() { j } else { best });
        if row[pivot] < 0.0 {
            row.iter_mut().for_each(|v| *v = -*v);
        }
        components.extend(row);
    }
    let explained_variance = singular[..k].iter().map(|s| s * s / denom).collect();
    Ok(PcaModel { components, explained_variance, mean, total_variance, n_features: p, solver })
}

/// Randomized range finder with re-orthonormalized power iterations, then an
/// exact SVD of the projected `l × p` matrix. Returns singular values and
/// right singular vectors (rows), sorted descending.
fn randomized_svd(a: &DMatrix<f64>, params: &PcaParams) -> (Vec<f64>, DMatrix<f64>) {
    let (n, p) = a.shape();
    let width = (params.n_components + params.n_oversamples).min(n.min(p));
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let omega = DMatrix::<f64>::from_fn(p, width, |_, _| StandardNormal.sample(&mut rng));

    let mut q = orthonormal_basis(a * omega);
    for _ in 0..params.n_power_iters {
        let z = orthonormal_basis(a.transpose() * &q);
        q = orthonormal_basis(a * z);
    }
    let b = q.transpose() * a;
    let svd = b.svd(false, true);
    (svd.singular_values.as_slice().to_vec(), svd.v_t.expect("v_t requested"))
}

fn orthonormal_basis(m: DMatrix<f64>) -> DMatrix<f64> {
    m.qr().q()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auto_solver_rule() {
        assert_eq!(PcaSolver::Auto.resolve(1000, 100, 3), PcaSolver::Exact);
        assert_eq!(PcaSolver::Auto.resolve(1000, 500, 9), PcaSolver::Randomized);
        assert_eq!(PcaSolver::Auto.resolve(1000, 500, 101), PcaSolver::Exact);
        assert_eq!(PcaSolver::Randomized.resolve(10, 10, 1), PcaSolver::Randomized);
    }

    #[test]
    fn single_nonzero_column() {
        let x = DataMatrix::from_rows(&[[0.0, 1.0, 0.0], [0.0, -2.0, 0.0], [0.0, 4.0, 0.0], [0.0, 0.5, 0.0]]).unwrap();
        for solver in [PcaSolver::Exact, PcaSolver::Randomized] {
            let params = PcaParams { n_components: 3, solver, ..Default::default() };
            let m = pca_fit(&params, &x).unwrap();
            let c0 = m.component(0);
            assert!((c0[1] - 1.0).abs() < 1e-12 && c0[0].abs() < 1e-12 && c0[2].abs() < 1e-12);
            assert!(m.explained_variance[1].abs() < 1e-20);
            assert!(m.explained_variance[2].abs() < 1e-20);
        }
    }

    #[test]
    fn mean_row_maps_to_zero() {
        let x = DataMatrix::from_rows(&[[1.0, 2.0], [3.0, 1.0], [0.0, 5.0], [2.0, 2.0]]).unwrap();
        let m = pca_fit(&PcaParams { n_components: 2, ..Default::default() }, &x).unwrap();
        let mean = DataMatrix::from_rows(&[m.mean.clone()]).unwrap();
        let z = m.transform(&mean).unwrap();
        assert!(z.as_slice().iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn component_count_validated() {
        let x = DataMatrix::from_rows(&[[1.0, 2.0], [3.0, 1.0]]).unwrap();
        assert!(pca_fit(&PcaParams { n_components: 3, ..Default::default() }, &x).is_err());
        assert!(pca_fit(&PcaParams { n_components: 0, ..Default::default() }, &x).is_err());
    }

    #[test]
    fn sign_convention_largest_entry_positive() {
        let x = DataMatrix::from_rows(&[[1.0, -3.0], [-1.0, 3.0], [0.5, -1.0], [-0.5, 1.0]]).unwrap();
        let m = pca_fit(&PcaParams { n_components: 2, ..Default::default() }, &x).unwrap();
        for i in 0..2 {
            let c = m.component(i);
            let big = if c[0].abs() >= c[1].abs() { c[0] } else { c[1] };
            assert!(big > 0.0);
        }
    }
}
