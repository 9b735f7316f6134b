//! Penalized linear regression.
//!
//! All solvers minimize the sample-weighted objective
//!
//! ```text
//! 1/(2W) · Σᵢ wᵢ (yᵢ − xᵢ·β − b)² + alpha·l1_ratio·‖β‖₁ + ½·alpha·(1 − l1_ratio)·‖β‖₂²
//! ```
//!
//! where `W = Σᵢ wᵢ` (`= n` for unit weights). With `fit_intercept` the
//! features and target are centered with the weighted means and the
//! intercept is recovered afterwards; no scaling is applied.

mod cv;
mod enet;
mod lars;

pub use cv::{lasso_cv, LambdaGrid, LassoCvResult};
pub use enet::{elastic_net_fit, elastic_net_fit_warm, ElasticNetParams};
pub(crate) use enet::duality_gap;
pub use lars::{lars_path, lasso_lars_fit, LarsKnot, LarsParams, LarsPath};

use crate::data::{check_weights, DataMatrix};
use crate::error::Result;
use crate::linalg::dot;

/// Fitted linear model.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub weights: Vec<f64>,
    pub intercept: f64,
    /// Duality gap of the normalized objective at the returned weights.
    pub dual_gap: f64,
    /// Coordinate-descent sweeps, or LARS knots.
    pub n_iter: usize,
}

impl LinearFit {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        dot(&self.weights, row) + self.intercept
    }

    pub fn predict(&self, x: &DataMatrix) -> Result<Vec<f64>> {
        x.check_width(self.weights.len())?;
        Ok(x.rows().map(|r| self.predict_row(r)).collect())
    }
}

/// Centered, weight-scaled copy of a regression problem in column-major form.
#[derive(Debug, Clone)]
pub(crate) struct Prepared {
    pub n: usize,
    pub p: usize,
    /// Column `j` occupies `cols[j*n..(j+1)*n]`.
    pub cols: Vec<f64>,
    pub y: Vec<f64>,
    pub col_sq_norms: Vec<f64>,
    /// `W = Σ wᵢ`.
    pub weight_sum: f64,
    pub x_offset: Vec<f64>,
    pub y_offset: f64,
}

impl Prepared {
    pub fn new(x: &DataMatrix, y: &[f64], weights: Option<&[f64]>, fit_intercept: bool) -> Result<Self> {
        let (n, p) = x.shape();
        if let Some(w) = weights {
            check_weights(w, n)?;
        }
        let w = |i: usize| weights.map_or(1.0, |w| w[i]);
        let weight_sum: f64 = (0..n).map(w).sum();

        let mut x_offset = vec![0.0; p];
        let mut y_offset = 0.0;
        if fit_intercept {
            for (i, row) in x.rows().enumerate() {
                let wi = w(i);
                for (o, v) in x_offset.iter_mut().zip(row) {
                    *o += wi * v;
                }
                y_offset += wi * y[i];
            }
            x_offset.iter_mut().for_each(|o| *o /= weight_sum);
            y_offset /= weight_sum;
        }

        let sqrt_w: Vec<f64> = (0..n).map(|i| w(i).sqrt()).collect();
        let src = x.as_slice();
        let mut cols = vec![0.0; n * p];
        for i in 0..n {
            for j in 0..p {
                cols[j * n + i] = sqrt_w[i] * (src[i * p + j] - x_offset[j]);
            }
        }
        let yc = (0..n).map(|i| sqrt_w[i] * (y[i] - y_offset)).collect();
        let col_sq_norms = (0..p).map(|j| {
            let c = &cols[j * n..(j + 1) * n];
            dot(c, c)
        }).collect();
        Ok(Prepared { n, p, cols, y: yc, col_sq_norms, weight_sum, x_offset, y_offset })
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.cols[j * self.n..(j + 1) * self.n]
    }

    /// `y − Xβ` computed from scratch.
    pub fn residual(&self, beta: &[f64]) -> Vec<f64> {
        let mut r = self.y.clone();
        for (j, &b) in beta.iter().enumerate() {
            if b != 0.0 {
                crate::linalg::axpy(-b, self.col(j), &mut r);
            }
        }
        r
    }

    pub fn xt_dot(&self, v: &[f64]) -> Vec<f64> {
        (0..self.p).map(|j| dot(self.col(j), v)).collect()
    }

    pub fn intercept_for(&self, beta: &[f64]) -> f64 {
        self.y_offset - dot(&self.x_offset, beta)
    }

    /// Smallest penalty for which the pure-L1 solution is identically zero.
    pub fn lambda_max(&self) -> f64 {
        self.xt_dot(&self.y).iter().fold(0.0_f64, |m, c| m.max(c.abs())) / self.weight_sum
    }
}

/// Coefficient of determination; 1.0 for a perfect fit of a constant target.
pub(crate) fn r2_score(y_true: &[f64], y_pred: &[f64]) -> f64 {
    let n = y_true.len() as f64;
    let mean = y_true.iter().sum::<f64>() / n;
    let ss_tot: f64 = y_true.iter().map(|y| (y - mean).powi(2)).sum();
    let ss_res: f64 = y_true.iter().zip(y_pred).map(|(y, p)| (y - p).powi(2)).sum();
    if ss_tot == 0.0 {
        return if ss_res == 0.0 { 1.0 } else { 0.0 };
    }
    1.0 - ss_res / ss_tot
}
