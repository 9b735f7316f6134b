//! Sequential minimal optimization for the box-constrained SVM dual
//!
//! ```text
//! max  Σ αᵢ − ½ Σᵢⱼ αᵢαⱼ yᵢyⱼ K(xᵢ, xⱼ)   s.t.  0 ≤ αᵢ ≤ Cᵢ,  Σ αᵢyᵢ = 0
//! ```
//!
//! Working set: the maximal KKT-violating pair. The solver tracks the
//! gradient `G = Qα − 1` of the equivalent minimization.

use super::kernel::{Kernel, KernelCache};
use crate::data::DataMatrix;
use crate::error::{Diagnostics, Error, Result};

const TAU: f64 = 1e-12;

#[derive(Debug, Clone)]
pub(crate) struct SmoSolution {
    pub alpha: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub dual_objective: f64,
}

pub(crate) struct SmoProblem<'a> {
    pub x: &'a DataMatrix,
    /// Labels in {−1, +1}.
    pub y: &'a [f64],
    /// Per-sample box bound `Cᵢ = c·wᵢ`.
    pub upper: &'a [f64],
    pub kernel: Kernel,
    pub tol: f64,
    pub max_iter: usize,
    pub cache_rows: usize,
}

#[inline]
fn in_up(y: f64, a: f64, c: f64) -> bool {
    (y > 0.0 && a < c) || (y < 0.0 && a > 0.0)
}

#[inline]
fn in_low(y: f64, a: f64, c: f64) -> bool {
    (y > 0.0 && a > 0.0) || (y < 0.0 && a < c)
}

fn dual_objective(alpha: &[f64], grad: &[f64]) -> f64 {
    // Σα − ½αᵀQα with Qα = G + 1
    0.5 * alpha.iter().zip(grad).map(|(a, g)| a * (1.0 - g)).sum::<f64>()
}

pub(crate) fn solve(problem: &SmoProblem<'_>) -> Result<SmoSolution> {
    let SmoProblem { x, y, upper, kernel, tol, max_iter, cache_rows } = *problem;
    let n = x.n_samples();
    let diag: Vec<f64> = x.rows().map(|r| kernel.eval(r, r)).collect();
    let mut cache = KernelCache::new(x, kernel, cache_rows);
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let mut previous_objective = 0.0_f64;
    let mut gap = f64::INFINITY;

    for iteration in 0..=max_iter {
        let (mut i, mut g_max) = (usize::MAX, f64::NEG_INFINITY);
        let (mut j, mut g_min) = (usize::MAX, f64::INFINITY);
        for t in 0..n {
            let v = -y[t] * grad[t];
            if in_up(y[t], alpha[t], upper[t]) && v > g_max {
                g_max = v;
                i = t;
            }
            if in_low(y[t], alpha[t], upper[t]) && v < g_min {
                g_min = v;
                j = t;
            }
        }
        gap = g_max - g_min;
        if i == usize::MAX || j == usize::MAX || gap <= tol {
            let bias = bias(y, &alpha, upper, &grad, g_max, g_min);
            return Ok(SmoSolution {
                dual_objective: dual_objective(&alpha, &grad),
                alpha,
                bias,
                iterations: iteration,
            });
        }
        if iteration == max_iter {
            break;
        }

        let slot_i = cache.ensure(i);
        let slot_j = cache.ensure(j);
        let k_ij = cache.slot(slot_i)[j];
        let (ci, cj) = (upper[i], upper[j]);
        let (old_i, old_j) = (alpha[i], alpha[j]);

        if y[i] != y[j] {
            let quad = (diag[i] + diag[j] + 2.0 * (y[i] * y[j] * k_ij)).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > ci - cj {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = ci - diff;
                }
            } else if alpha[j] > cj {
                alpha[j] = cj;
                alpha[i] = cj + diff;
            }
        } else {
            let quad = (diag[i] + diag[j] - 2.0 * (y[i] * y[j] * k_ij)).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > ci {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = sum - ci;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > cj {
                if alpha[j] > cj {
                    alpha[j] = cj;
                    alpha[i] = sum - cj;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let d_i = (alpha[i] - old_i) * y[i];
        let d_j = (alpha[j] - old_j) * y[j];
        let (row_i, row_j) = (cache.slot(slot_i), cache.slot(slot_j));
        for t in 0..n {
            grad[t] += y[t] * (row_i[t] * d_i + row_j[t] * d_j);
        }

        if cfg!(debug_assertions) {
            let objective = dual_objective(&alpha, &grad);
            debug_assert!(
                objective >= previous_objective - 1e-9 * (1.0 + previous_objective.abs()),
                "dual objective decreased from {previous_objective} to {objective}"
            );
            previous_objective = objective;
        }
    }
    Err(Error::NotConverged(Diagnostics {
        solver: "svc smo",
        iterations: max_iter,
        metric: gap,
        tolerance: tol,
    }))
}

/// Average over free support vectors of the margin-implied bias, or the
/// midpoint of the feasible interval when none are free.
fn bias(y: &[f64], alpha: &[f64], upper: &[f64], grad: &[f64], g_max: f64, g_min: f64) -> f64 {
    let (mut sum, mut count) = (0.0, 0usize);
    for t in 0..y.len() {
        if alpha[t] > 0.0 && alpha[t] < upper[t] {
            sum += -y[t] * grad[t];
            count += 1;
        }
    }
    if count > 0 {
        sum / count as f64
    } else if g_max.is_finite() && g_min.is_finite() {
        0.5 * (g_max + g_min)
    } else if g_max.is_finite() {
        g_max
    } else {
        g_min
    }
}
