use super::enet::fit_prepared;
use super::{elastic_net_fit, r2_score, ElasticNetParams, LinearFit, Prepared};
use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::model_selection::SplitPlan;

#[derive(Debug, Clone, PartialEq)]
pub enum LambdaGrid {
    /// `n_lambdas` log-spaced values from `lambda_max` down to `eps·lambda_max`.
    Auto { n_lambdas: usize, eps: f64 },
    Values(Vec<f64>),
}

impl Default for LambdaGrid {
    fn default() -> Self {
        LambdaGrid::Auto { n_lambdas: 100, eps: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LassoCvResult {
    pub best_lambda: f64,
    pub model: LinearFit,
    /// `(lambda, mean held-out R²)`, lambdas strictly decreasing.
    pub cv_curve: Vec<(f64, f64)>,
    /// Held-out R² per lambda (outer) and split (inner).
    pub fold_scores: Vec<Vec<f64>>,
}

/// Cross-validated Lasso over a penalty grid.
///
/// Each fold walks the grid from the largest penalty down, warm-starting
/// every solve at the previous solution. `params.alpha` and
/// `params.l1_ratio` are ignored (pure L1). Ties in the mean score go to
/// the larger penalty.
pub fn lasso_cv(
    params: &ElasticNetParams,
    grid: &LambdaGrid,
    folds: &SplitPlan,
    x: &DataMatrix,
    y: &[f64],
) -> Result<LassoCvResult> {
    let base = ElasticNetParams { l1_ratio: 1.0, alpha: 0.0, ..params.clone() };
    base.validate()?;
    if y.len() != x.n_samples() {
        return Err(Error::ShapeMismatch(format!("{} targets for {} samples", y.len(), x.n_samples())));
    }
    if folds.is_empty() {
        return Err(Error::InvalidParam { name: "folds".into(), reason: "no splits".into() });
    }
    folds.check_range(x.n_samples())?;
    let lambdas = resolve_grid(grid, &base, folds, x, y)?;

    let mut fold_scores = vec![Vec::with_capacity(folds.len()); lambdas.len()];
    for (split, (train, test)) in folds.iter().enumerate() {
        let tag = |e: Error| Error::Fold { split, source: Box::new(e) };
        let x_train = x.select_rows(train).map_err(tag)?;
        let y_train: Vec<f64> = train.iter().map(|&i| y[i]).collect();
        let x_test = x.select_rows(test).map_err(tag)?;
        let y_test: Vec<f64> = test.iter().map(|&i| y[i]).collect();
        let prep = Prepared::new(&x_train, &y_train, None, base.fit_intercept).map_err(tag)?;

        let mut warm: Option<Vec<f64>> = None;
        for (li, &lambda) in lambdas.iter().enumerate() {
            let p = ElasticNetParams { alpha: lambda, ..base.clone() };
            let fit = fit_prepared(&p, &prep, warm.as_deref()).map_err(tag)?;
            let pred = fit.predict(&x_test).map_err(tag)?;
            fold_scores[li].push(r2_score(&y_test, &pred));
            warm = Some(fit.weights);
        }
    }

    let cv_curve: Vec<(f64, f64)> = lambdas
        .iter()
        .zip(&fold_scores)
        .map(|(&l, s)| (l, s.iter().sum::<f64>() / s.len() as f64))
        .collect();
    let best = cv_curve
        .iter()
        .enumerate()
        .fold(0, |best, (i, &(_, m))| if m > cv_curve[best].1 { i } else { best });
    let best_lambda = cv_curve[best].0;
    let model = elastic_net_fit(&ElasticNetParams { alpha: best_lambda, ..base }, x, y, None)?;
    Ok(LassoCvResult { best_lambda, model, cv_curve, fold_scores })
}

/// The automatic grid starts at the largest critical penalty over the full
/// data and every training fold, so its first point is the null model
/// everywhere.
fn resolve_grid(
    grid: &LambdaGrid,
    base: &ElasticNetParams,
    folds: &SplitPlan,
    x: &DataMatrix,
    y: &[f64],
) -> Result<Vec<f64>> {
    let bad = |reason: &str| Error::InvalidParam { name: "grid".into(), reason: reason.into() };
    match grid {
        LambdaGrid::Auto { n_lambdas, eps } => {
            if *n_lambdas == 0 || !(*eps > 0.0 && *eps < 1.0) {
                return Err(bad("auto grid needs n_lambdas ≥ 1 and 0 < eps < 1"));
            }
            let mut lmax = Prepared::new(x, y, None, base.fit_intercept)?.lambda_max();
            for (train, _) in folds.iter() {
                let x_train = x.select_rows(train)?;
                let y_train: Vec<f64> = train.iter().map(|&i| y[i]).collect();
                lmax = lmax.max(Prepared::new(&x_train, &y_train, None, base.fit_intercept)?.lambda_max());
            }
            if lmax == 0.0 {
                return Ok(vec![0.0]);
            }
            if *n_lambdas == 1 {
                return Ok(vec![lmax]);
            }
            let (hi, lo) = (lmax.ln(), (lmax * eps).ln());
            let step = (hi - lo) / (*n_lambdas - 1) as f64;
            Ok((0..*n_lambdas).map(|i| (hi - step * i as f64).exp()).collect())
        }
        LambdaGrid::Values(values) => {
            if values.is_empty() {
                return Err(bad("empty lambda grid"));
            }
            if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(bad("lambdas must be finite and nonnegative"));
            }
            let mut v = values.clone();
            v.sort_by(|a, b| b.total_cmp(a));
            v.dedup();
            Ok(v)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_selection::kfold;

    fn toy() -> (DataMatrix, Vec<f64>) {
        let rows: Vec<[f64; 3]> = (0..24)
            .map(|i| {
                let t = i as f64;
                [(t * 0.7).sin(), (t * 1.3).cos(), (t * 0.37).sin() * 2.0]
            })
            .collect();
        let y = rows.iter().map(|r| 2.0 * r[0] - r[2] + 0.1).collect();
        (DataMatrix::from_rows(&rows).unwrap(), y)
    }

    #[test]
    fn grid_normalized_descending() {
        let (x, y) = toy();
        let base = ElasticNetParams::lasso(0.0);
        let plan = kfold(24, 3, false, 0).unwrap();
        let g = resolve_grid(&LambdaGrid::Values(vec![0.1, 1.0, 0.1, 0.5]), &base, &plan, &x, &y).unwrap();
        assert_eq!(g, vec![1.0, 0.5, 0.1]);
        assert!(resolve_grid(&LambdaGrid::Values(vec![-1.0]), &base, &plan, &x, &y).is_err());
        let auto = resolve_grid(&LambdaGrid::default(), &base, &plan, &x, &y).unwrap();
        assert_eq!(auto.len(), 100);
        assert!(auto.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn signal_prefers_small_penalty() {
        let (x, y) = toy();
        let plan = kfold(24, 4, false, 0).unwrap();
        let params = ElasticNetParams { tol: 1e-10, ..ElasticNetParams::lasso(0.0) };
        let res = lasso_cv(&params, &LambdaGrid::default(), &plan, &x, &y).unwrap();
        assert!(res.best_lambda < res.cv_curve[0].0);
        assert!(res.cv_curve.iter().any(|&(_, s)| s > 0.99));
    }
}
