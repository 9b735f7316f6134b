use nalgebra::DMatrix;

use super::{LinearFit, Prepared};
use crate::data::DataMatrix;
use crate::error::{Diagnostics, Error, Result};
use crate::linalg::{axpy, dot, pinv_solve};

#[derive(Debug, Clone, PartialEq)]
pub struct ElasticNetParams {
    pub alpha: f64,
    /// 1 is the Lasso, 0 is ridge.
    pub l1_ratio: f64,
    /// Maximum number of full coordinate sweeps.
    pub max_iter: usize,
    /// Duality-gap threshold on the normalized objective.
    pub tol: f64,
    pub fit_intercept: bool,
}

impl Default for ElasticNetParams {
    fn default() -> Self {
        ElasticNetParams { alpha: 1.0, l1_ratio: 0.5, max_iter: 1000, tol: 1e-4, fit_intercept: true }
    }
}

impl ElasticNetParams {
    pub fn lasso(alpha: f64) -> Self {
        ElasticNetParams { alpha, l1_ratio: 1.0, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str, reason: &str| Error::InvalidParam { name: name.into(), reason: reason.into() };
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(bad("alpha", "must be finite and nonnegative"));
        }
        if !(0.0..=1.0).contains(&self.l1_ratio) {
            return Err(bad("l1_ratio", "must lie in [0, 1]"));
        }
        if !(self.tol > 0.0) {
            return Err(bad("tol", "must be positive"));
        }
        if self.max_iter == 0 {
            return Err(bad("max_iter", "must be at least 1"));
        }
        Ok(())
    }

    fn penalties(&self, weight_sum: f64) -> (f64, f64) {
        let l1 = weight_sum * self.alpha * self.l1_ratio;
        let l2 = weight_sum * self.alpha * (1.0 - self.l1_ratio);
        (l1, l2)
    }
}

pub fn elastic_net_fit(
    params: &ElasticNetParams,
    x: &DataMatrix,
    y: &[f64],
    sample_weight: Option<&[f64]>,
) -> Result<LinearFit> {
    let prep = prepare(params, x, y, sample_weight)?;
    fit_prepared(params, &prep, None)
}

/// Same as [`elastic_net_fit`] but starts coordinate descent from `init`.
pub fn elastic_net_fit_warm(
    params: &ElasticNetParams,
    x: &DataMatrix,
    y: &[f64],
    sample_weight: Option<&[f64]>,
    init: &[f64],
) -> Result<LinearFit> {
    let prep = prepare(params, x, y, sample_weight)?;
    if init.len() != prep.p {
        return Err(Error::ShapeMismatch(format!(
            "warm start has {} weights for {} features",
            init.len(),
            prep.p
        )));
    }
    fit_prepared(params, &prep, Some(init))
}

fn prepare(params: &ElasticNetParams, x: &DataMatrix, y: &[f64], w: Option<&[f64]>) -> Result<Prepared> {
    params.validate()?;
    if y.len() != x.n_samples() {
        return Err(Error::ShapeMismatch(format!("{} targets for {} samples", y.len(), x.n_samples())));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidTarget("non-finite regression target".into()));
    }
    Prepared::new(x, y, w, params.fit_intercept)
}

pub(crate) fn fit_prepared(params: &ElasticNetParams, prep: &Prepared, init: Option<&[f64]>) -> Result<LinearFit> {
    let (l1, l2) = params.penalties(prep.weight_sum);
    let mut beta = init.map_or_else(|| vec![0.0; prep.p], <[f64]>::to_vec);
    let mut resid = prep.residual(&beta);
    let mut gram = None;
    let mut gap = f64::INFINITY;

    for sweep in 1..=params.max_iter {
        for j in 0..prep.p {
            let norm = prep.col_sq_norms[j];
            if norm == 0.0 {
                beta[j] = 0.0;
                continue;
            }
            let col = prep.col(j);
            let old = beta[j];
            if old != 0.0 {
                axpy(old, col, &mut resid);
            }
            let rho = dot(col, &resid);
            let new = soft_threshold(rho, l1) / (norm + l2);
            if new != 0.0 {
                axpy(-new, col, &mut resid);
            }
            beta[j] = new;
        }
        // refresh the residual so the certificate is exact
        resid = prep.residual(&beta);
        gap = duality_gap(prep, &beta, &resid, params.alpha, params.l1_ratio, &mut gram);
        if gap <= params.tol {
            return Ok(LinearFit {
                intercept: if params.fit_intercept { prep.intercept_for(&beta) } else { 0.0 },
                weights: beta,
                dual_gap: gap,
                n_iter: sweep,
            });
        }
    }
    Err(Error::NotConverged(Diagnostics {
        solver: "elastic net coordinate descent",
        iterations: params.max_iter,
        metric: gap,
        tolerance: params.tol,
    }))
}

#[inline]
pub(crate) fn soft_threshold(x: f64, threshold: f64) -> f64 {
    if x > threshold {
        x - threshold
    } else if x < -threshold {
        x + threshold
    } else {
        0.0
    }
}

/// Duality gap of the normalized objective at `beta`, given the exact residual.
///
/// The dual point is the best of the available feasible candidates:
/// the rescaled residual for the L1-augmented form, the raw residual when
/// an L2 term is present, and the least-squares projection when both
/// penalties vanish.
pub(crate) fn duality_gap(
    prep: &Prepared,
    beta: &[f64],
    resid: &[f64],
    alpha: f64,
    l1_ratio: f64,
    gram: &mut Option<DMatrix<f64>>,
) -> f64 {
    let w = prep.weight_sum;
    let l1 = w * alpha * l1_ratio;
    let l2 = w * alpha * (1.0 - l1_ratio);

    let r_sq = dot(resid, resid);
    let beta_l1: f64 = beta.iter().map(|b| b.abs()).sum();
    let beta_sq = dot(beta, beta);
    let primal = 0.5 * r_sq + l1 * beta_l1 + 0.5 * l2 * beta_sq;

    let xtr = prep.xt_dot(resid);
    let r_dot_y = dot(resid, &prep.y);

    let dual = if l1 == 0.0 && l2 == 0.0 {
        let g = gram.get_or_insert_with(|| gram_matrix(prep));
        let z = pinv_solve(g, &xtr);
        primal - 0.5 * dot(&xtr, &z)
    } else {
        let dual_norm = xtr
            .iter()
            .zip(beta)
            .map(|(c, b)| (c - l2 * b).abs())
            .fold(0.0_f64, f64::max);
        let scale = if dual_norm > l1 { l1 / dual_norm } else { 1.0 };
        let augmented = scale * r_dot_y - 0.5 * scale * scale * (r_sq + l2 * beta_sq);
        if l2 > 0.0 {
            let excess: f64 = xtr.iter().map(|c| (c.abs() - l1).max(0.0).powi(2)).sum();
            let ridge = r_dot_y - 0.5 * r_sq - excess / (2.0 * l2);
            augmented.max(ridge)
        } else {
            augmented
        }
    };
    (primal - dual).max(0.0) / w
}

fn gram_matrix(prep: &Prepared) -> DMatrix<f64> {
    let p = prep.p;
    let mut g = DMatrix::zeros(p, p);
    for a in 0..p {
        for b in a..p {
            let v = dot(prep.col(a), prep.col(b));
            g[(a, b)] = v;
            g[(b, a)] = v;
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soft_threshold_cases() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
        assert_eq!(soft_threshold(0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(-1.0, 1.0), 0.0);
    }

    #[test]
    fn params_validation() {
        assert!(ElasticNetParams { alpha: -1.0, ..Default::default() }.validate().is_err());
        assert!(ElasticNetParams { l1_ratio: 1.1, ..Default::default() }.validate().is_err());
        assert!(ElasticNetParams { tol: 0.0, ..Default::default() }.validate().is_err());
        assert!(ElasticNetParams::default().validate().is_ok());
    }

    #[test]
    fn above_critical_penalty_is_exactly_zero() {
        let x = DataMatrix::from_rows(&[[1.0, 2.0], [2.0, -1.0], [0.5, 0.3], [3.0, 1.0]]).unwrap();
        let y = [1.0, -2.0, 0.7, 2.0];
        let prep = Prepared::new(&x, &y, None, true).unwrap();
        let fit = elastic_net_fit(&ElasticNetParams::lasso(prep.lambda_max()), &x, &y, None).unwrap();
        assert!(fit.weights.iter().all(|&b| b == 0.0));
        let mean = y.iter().sum::<f64>() / 4.0;
        assert!((fit.intercept - mean).abs() < 1e-12);
    }

    #[test]
    fn iteration_cap_reports_not_converged() {
        let x = DataMatrix::from_rows(&[[1.0, 0.99], [0.0, 0.1], [1.0, 1.0], [2.0, 2.1]]).unwrap();
        let y = [1.0, 0.2, 1.1, 2.0];
        let params = ElasticNetParams { alpha: 0.0, max_iter: 1, tol: 1e-14, ..Default::default() };
        match elastic_net_fit(&params, &x, &y, None) {
            Err(Error::NotConverged(d)) => {
                assert_eq!(d.iterations, 1);
                assert!(d.metric > d.tolerance);
            }
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_lengths() {
        let x = DataMatrix::from_rows(&[[1.0], [2.0]]).unwrap();
        assert!(matches!(
            elastic_net_fit(&ElasticNetParams::default(), &x, &[1.0], None),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            elastic_net_fit(&ElasticNetParams::default(), &x, &[1.0, 2.0], Some(&[1.0])),
            Err(Error::ShapeMismatch(_))
        ));
    }
}
