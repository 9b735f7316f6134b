//! Least-angle regression and its Lasso modification.
//!
//! The residual and the feature correlations are carried from knot to knot
//! by subtracting the step just taken (`r ← r − γ·u`, `c ← c − γ·Xᵀu`);
//! neither is rebuilt from `y − Xβ` inside the loop.

use log::warn;

use super::{duality_gap, LinearFit, Prepared};
use crate::data::DataMatrix;
use crate::error::{Error, Result, Warning};
use crate::linalg::{axpy, dot, GrowingCholesky};

#[derive(Debug, Clone, PartialEq)]
pub struct LarsParams {
    /// Stop after this many knots (the starting knot included).
    pub max_knots: usize,
    /// Drop a coefficient when it crosses zero.
    pub lasso_mode: bool,
    pub fit_intercept: bool,
    /// Stop once the path reaches this penalty.
    pub min_lambda: f64,
}

impl Default for LarsParams {
    fn default() -> Self {
        LarsParams { max_knots: 500, lasso_mode: true, fit_intercept: true, min_lambda: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LarsKnot {
    /// Common absolute correlation of the active set, divided by `n`.
    pub lambda: f64,
    pub weights: Vec<f64>,
    /// Active features after this knot, in order of entry.
    pub active: Vec<usize>,
    /// Residual on the centered problem, as carried incrementally.
    pub residual: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LarsPath {
    pub knots: Vec<LarsKnot>,
    /// `(knot index, feature)` for every Lasso drop event.
    pub drops: Vec<(usize, usize)>,
    pub warnings: Vec<Warning>,
    pub x_offset: Vec<f64>,
    pub y_offset: f64,
}

impl LarsPath {
    pub fn lambdas(&self) -> Vec<f64> {
        self.knots.iter().map(|k| k.lambda).collect()
    }

    /// Weights at `lambda`, linearly interpolated between adjacent knots.
    pub fn weights_at(&self, lambda: f64) -> Vec<f64> {
        let first = &self.knots[0];
        if lambda >= first.lambda {
            return first.weights.clone();
        }
        for pair in self.knots.windows(2) {
            let (hi, lo) = (&pair[0], &pair[1]);
            if lambda >= lo.lambda {
                let t = (hi.lambda - lambda) / (hi.lambda - lo.lambda);
                return hi
                    .weights
                    .iter()
                    .zip(&lo.weights)
                    .map(|(a, b)| a + t * (b - a))
                    .collect();
            }
        }
        self.knots.last().expect("non-empty path").weights.clone()
    }

    pub fn intercept_for(&self, weights: &[f64]) -> f64 {
        self.y_offset - dot(&self.x_offset, weights)
    }
}

/// Computes the LARS (or Lasso-LARS) path from `lambda_max` down to zero,
/// `params.min_lambda`, or the knot cap, whichever comes first.
///
/// An entering feature that is exactly collinear with the active set is
/// excluded for the rest of the path and reported as a warning.
pub fn lars_path(x: &DataMatrix, y: &[f64], params: &LarsParams) -> Result<LarsPath> {
    if y.len() != x.n_samples() {
        return Err(Error::ShapeMismatch(format!("{} targets for {} samples", y.len(), x.n_samples())));
    }
    if params.max_knots == 0 {
        return Err(Error::InvalidParam { name: "max_knots".into(), reason: "must be at least 1".into() });
    }
    let prep = Prepared::new(x, y, None, params.fit_intercept)?;
    Ok(run(&prep, params))
}

fn run(prep: &Prepared, params: &LarsParams) -> LarsPath {
    let (n, p) = (prep.n, prep.p);
    let scale = prep.weight_sum;
    let mut resid = prep.y.clone();
    let mut beta = vec![0.0; p];
    let mut corr = prep.xt_dot(&resid);

    let y_norm = dot(&prep.y, &prep.y).sqrt();
    let x_norm = prep.col_sq_norms.iter().fold(0.0_f64, |m, v| m.max(v.sqrt()));
    let tiny = 1e3 * f64::EPSILON * y_norm * x_norm;

    let mut set = ActiveSet {
        excluded: prep.col_sq_norms.iter().map(|&v| v == 0.0).collect(),
        in_active: vec![false; p],
        active: Vec::new(),
        chol: GrowingCholesky::default(),
        warnings: Vec::new(),
        rank_cap: p.min(n.saturating_sub(usize::from(params.fit_intercept))),
    };
    let mut drops = Vec::new();

    let (mut c_max, first) = argmax_abs(&corr, &set.excluded);
    let lambda_max = if c_max <= tiny { 0.0 } else { c_max / scale };
    if lambda_max > 0.0 && set.rank_cap > 0 {
        set.admit(prep, &corr, c_max, tiny, first);
    }
    let mut knots = vec![LarsKnot { lambda: lambda_max, weights: beta.clone(), active: set.active.clone(), residual: resid.clone() }];
    let path = |knots, drops, warnings| LarsPath {
        knots,
        drops,
        warnings,
        x_offset: prep.x_offset.clone(),
        y_offset: prep.y_offset,
    };
    if lambda_max <= params.min_lambda || set.active.is_empty() {
        return path(knots, drops, set.warnings);
    }

    while knots.len() < params.max_knots {
        let ActiveSet { active, in_active, excluded, chol, rank_cap, .. } = &mut set;
        let rank_cap = *rank_cap;

        // equiangular direction
        let signs: Vec<f64> = active.iter().map(|&a| corr[a].signum()).collect();
        let g_inv_s = chol.solve(&signs);
        let norm = 1.0 / dot(&signs, &g_inv_s).sqrt();
        let dir: Vec<f64> = g_inv_s.iter().map(|v| v * norm).collect();
        let mut u = vec![0.0; n];
        for (k, &a) in active.iter().enumerate() {
            axpy(dir[k], prep.col(a), &mut u);
        }

        let mut gamma = c_max / norm;
        let mut next = None;
        let mut inactive_dots = vec![0.0; p];
        if active.len() < rank_cap {
            for j in 0..p {
                if in_active[j] || excluded[j] {
                    continue;
                }
                let a_j = dot(prep.col(j), &u);
                inactive_dots[j] = a_j;
                for cand in [(c_max - corr[j]) / (norm - a_j), (c_max + corr[j]) / (norm + a_j)] {
                    if cand > 1e-15 * gamma.abs().max(1.0) && cand < gamma {
                        gamma = cand;
                        next = Some(j);
                    }
                }
            }
        } else {
            for j in 0..p {
                if !in_active[j] && !excluded[j] {
                    inactive_dots[j] = dot(prep.col(j), &u);
                }
            }
        }
        let mut drop = None;
        if params.lasso_mode {
            for (k, &a) in active.iter().enumerate() {
                if dir[k] == 0.0 {
                    continue;
                }
                let cand = -beta[a] / dir[k];
                if cand > 0.0 && cand < gamma {
                    gamma = cand;
                    drop = Some(k);
                }
            }
            if drop.is_some() {
                next = None;
            }
        }

        for (k, &a) in active.iter().enumerate() {
            beta[a] += gamma * dir[k];
        }
        axpy(-gamma, &u, &mut resid);
        for j in 0..p {
            if !in_active[j] && !excluded[j] {
                corr[j] -= gamma * inactive_dots[j];
            }
        }
        let full_step = next.is_none() && drop.is_none();
        c_max = if full_step { 0.0 } else { (c_max - gamma * norm).max(0.0) };
        for (k, &a) in active.iter().enumerate() {
            corr[a] = signs[k] * c_max;
        }

        if let Some(k) = drop {
            let feature = active.remove(k);
            beta[feature] = 0.0;
            in_active[feature] = false;
            drops.push((knots.len(), feature));
            *chol = GrowingCholesky::default();
            for (idx, &a) in active.iter().enumerate() {
                let cross: Vec<f64> =
                    active[..idx].iter().map(|&b| dot(prep.col(b), prep.col(a))).collect();
                let ok = chol.push(&cross, prep.col_sq_norms[a], 0.0);
                debug_assert!(ok, "subset of a nonsingular active set stays nonsingular");
            }
        } else if !full_step {
            set.admit(prep, &corr, c_max, tiny, next);
        }

        knots.push(LarsKnot {
            lambda: c_max / scale,
            weights: beta.clone(),
            active: set.active.clone(),
            residual: resid.clone(),
        });

        if full_step || c_max <= tiny || c_max / scale <= params.min_lambda || set.active.is_empty() {
            break;
        }
    }
    path(knots, drops, set.warnings)
}

struct ActiveSet {
    excluded: Vec<bool>,
    in_active: Vec<bool>,
    /// In order of entry.
    active: Vec<usize>,
    chol: GrowingCholesky,
    warnings: Vec<Warning>,
    rank_cap: usize,
}

impl ActiveSet {
    /// Adds `first` and every other feature tied with the maximal
    /// correlation, in index order. A feature collinear with the active set
    /// is excluded with a warning.
    fn admit(&mut self, prep: &Prepared, corr: &[f64], c_max: f64, tiny: f64, first: Option<usize>) {
        let tie = c_max * (1.0 - 1e-10) - tiny;
        let mut entrants: Vec<usize> = first.into_iter().collect();
        entrants.extend((0..prep.p).filter(|&j| {
            !self.in_active[j] && !self.excluded[j] && corr[j].abs() >= tie
        }));
        entrants.sort_unstable();
        entrants.dedup();
        for j in entrants {
            let cross: Vec<f64> = self.active.iter().map(|&a| dot(prep.col(a), prep.col(j))).collect();
            if self.active.len() < self.rank_cap && self.chol.push(&cross, prep.col_sq_norms[j], 1e-10) {
                self.active.push(j);
                self.in_active[j] = true;
            } else {
                warn!("lars: feature {j} is collinear with the active set; dropping it");
                self.excluded[j] = true;
                self.warnings.push(Warning::CollinearFeature { feature: j });
            }
        }
    }
}


fn argmax_abs(values: &[f64], skip: &[bool]) -> (f64, Option<usize>) {
    let mut best = (0.0, None);
    for (j, v) in values.iter().enumerate() {
        if !skip[j] && v.abs() > best.0 {
            best = (v.abs(), Some(j));
        }
    }
    best
}

/// Lasso fitted by following the LARS path down to `alpha`.
pub fn lasso_lars_fit(
    alpha: f64,
    max_knots: usize,
    fit_intercept: bool,
    x: &DataMatrix,
    y: &[f64],
) -> Result<(LinearFit, LarsPath)> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParam { name: "alpha".into(), reason: "must be finite and nonnegative".into() });
    }
    let params = LarsParams { max_knots, lasso_mode: true, fit_intercept, min_lambda: alpha };
    let path = lars_path(x, y, &params)?;
    let weights = path.weights_at(alpha);
    let prep = Prepared::new(x, y, None, fit_intercept)?;
    let resid = prep.residual(&weights);
    let dual_gap = duality_gap(&prep, &weights, &resid, alpha, 1.0, &mut None);
    let intercept = if fit_intercept { path.intercept_for(&weights) } else { 0.0 };
    let fit = LinearFit { weights, intercept, dual_gap, n_iter: path.knots.len() };
    Ok((fit, path))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_intercept() -> LarsParams {
        LarsParams { fit_intercept: false, ..Default::default() }
    }

    #[test]
    fn single_feature_path() {
        let x = DataMatrix::from_rows(&[[1.0], [2.0], [-1.0], [0.5]]).unwrap();
        let y = [2.0, 3.0, -1.0, 2.0];
        let path = lars_path(&x, &y, &no_intercept()).unwrap();
        let xty: f64 = 2.0 + 6.0 + 1.0 + 1.0;
        let xtx: f64 = 1.0 + 4.0 + 1.0 + 0.25;
        assert_eq!(path.knots.len(), 2);
        assert!((path.knots[0].lambda - xty / 4.0).abs() < 1e-12);
        assert_eq!(path.knots[0].weights, vec![0.0]);
        assert_eq!(path.knots[1].lambda, 0.0);
        assert!((path.knots[1].weights[0] - xty / xtx).abs() < 1e-12);
        // straight line in between
        let mid = path.weights_at(xty / 8.0);
        assert!((mid[0] - 0.5 * xty / xtx).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_target_gives_empty_path() {
        let x = DataMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]).unwrap();
        let y = [0.0, 0.0, 5.0];
        let path = lars_path(&x, &y, &no_intercept()).unwrap();
        assert_eq!(path.knots.len(), 1);
        assert_eq!(path.knots[0].lambda, 0.0);
        assert_eq!(path.knots[0].weights, vec![0.0, 0.0]);
    }

    #[test]
    fn duplicate_column_is_dropped_with_warning() {
        let x = DataMatrix::from_rows(&[[1.0, 1.0, 0.3], [2.0, 2.0, -1.0], [0.0, 0.0, 1.0], [1.0, 1.0, 2.0]])
            .unwrap();
        let y = [1.0, 2.5, 0.2, 1.5];
        let path = lars_path(&x, &y, &no_intercept()).unwrap();
        assert_eq!(path.warnings, vec![Warning::CollinearFeature { feature: 1 }]);
        for knot in &path.knots {
            assert_eq!(knot.weights[1], 0.0);
        }
        assert_eq!(path.knots.last().unwrap().lambda, 0.0);
    }

    #[test]
    fn knot_cap_and_min_lambda_stop_early() {
        let x = DataMatrix::from_rows(&[[1.0, 0.2, 0.0], [0.1, 1.0, 0.3], [0.0, 0.4, 1.0], [1.0, 1.0, 1.0], [0.5, -0.5, 0.2]])
            .unwrap();
        let y = [1.0, 2.0, 3.0, 4.0, 0.0];
        let capped = lars_path(&x, &y, &LarsParams { max_knots: 2, ..Default::default() }).unwrap();
        assert_eq!(capped.knots.len(), 2);
        let full = lars_path(&x, &y, &LarsParams::default()).unwrap();
        let stop = full.knots[1].lambda * 0.99;
        let early = lars_path(&x, &y, &LarsParams { min_lambda: stop, ..Default::default() }).unwrap();
        assert!(early.knots.last().unwrap().lambda <= stop);
        assert!(early.knots.len() <= full.knots.len());
    }
}
