use std::collections::BTreeMap;

use rayon::prelude::*;

use super::SplitPlan;
use crate::data::{DataMatrix, LabelVector};
use crate::error::{Error, Result};
use crate::estimator::{fit, predict, score, transform, FittedEstimator, FittedModel};
use crate::params::{EstimatorSpec, ParamValue};

/// Named candidate lists. Points are enumerated with axes sorted by name,
/// the first axis varying slowest and candidates in their given order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamGrid {
    axes: BTreeMap<String, Vec<ParamValue>>,
}

impl ParamGrid {
    pub fn new() -> Self {
        ParamGrid::default()
    }

    /// Adds (or replaces) an axis. An empty candidate list is rejected.
    pub fn axis<V: Into<ParamValue>>(mut self, name: &str, values: impl IntoIterator<Item = V>) -> Result<Self> {
        let values: Vec<ParamValue> = values.into_iter().map(Into::into).collect();
        if values.is_empty() {
            return Err(Error::InvalidParam { name: name.into(), reason: "empty candidate list".into() });
        }
        self.axes.insert(name.to_string(), values);
        Ok(self)
    }

    pub fn axes(&self) -> &BTreeMap<String, Vec<ParamValue>> {
        &self.axes
    }

    /// Number of points: the product of the axis lengths.
    pub fn len(&self) -> usize {
        self.axes.values().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<BTreeMap<String, ParamValue>> {
        let mut points = vec![BTreeMap::new()];
        for (name, values) in &self.axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |v| {
                        let mut q = p.clone();
                        q.insert(name.clone(), v.clone());
                        q
                    })
                })
                .collect();
        }
        points
    }
}

fn with_workers<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidParam { name: "workers".into(), reason: e.to_string() })?;
            Ok(pool.install(job))
        }
    }
}

fn fold_score(spec: &EstimatorSpec, x: &DataMatrix, y: &LabelVector, train: &[usize], test: &[usize]) -> Result<f64> {
    let model = fit(spec, &x.select_rows(train)?, Some(&y.select(train)?), None)?;
    score(&model, &x.select_rows(test)?, &y.select(test)?)
}

/// Score of `spec` fitted on each training side and evaluated on the
/// matching test side. `workers` caps parallelism (`None` uses the global
/// pool); the output does not depend on it.
pub fn cross_val_score(
    spec: &EstimatorSpec,
    x: &DataMatrix,
    y: &LabelVector,
    plan: &SplitPlan,
    workers: Option<usize>,
) -> Result<Vec<f64>> {
    y.check_len(x.n_samples())?;
    plan.check_range(x.n_samples())?;
    let results: Vec<Result<f64>> = with_workers(workers, || {
        (0..plan.len())
            .into_par_iter()
            .map(|s| {
                let (train, test) = plan.split(s);
                fold_score(spec, x, y, train, test)
            })
            .collect()
    })?;
    results
        .into_iter()
        .enumerate()
        .map(|(split, r)| r.map_err(|e| Error::Fold { split, source: Box::new(e) }))
        .collect()
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub params: BTreeMap<String, ParamValue>,
    /// Mean fold score, `-inf` when any fold failed.
    pub mean: f64,
    /// Population standard deviation of the fold scores.
    pub std: f64,
    /// Per split; failed splits hold `-inf`.
    pub fold_scores: Vec<f64>,
    /// First fold error, if any.
    pub failure: Option<Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSearchResult {
    pub best_params: BTreeMap<String, ParamValue>,
    pub best_index: usize,
    pub best_score: f64,
    pub table: Vec<GridPoint>,
    /// The best point refitted on all data.
    pub refit_model: FittedModel,
}

impl FittedEstimator for GridSearchResult {
    fn n_features_in(&self) -> usize {
        self.refit_model.n_features_in
    }

    fn predict(&self, x: &DataMatrix) -> Result<LabelVector> {
        predict(&self.refit_model, x)
    }

    fn transform(&self, x: &DataMatrix) -> Result<DataMatrix> {
        transform(&self.refit_model, x)
    }

    fn score(&self, x: &DataMatrix, y: &LabelVector) -> Result<f64> {
        score(&self.refit_model, x, y)
    }
}

/// Exhaustive search over `grid`, maximizing mean cross-validated score.
///
/// All (point, split) pairs are evaluated as independent tasks. A point
/// with a failing split scores `-inf` and carries the error; the search
/// continues. Ties go to the earliest point in enumeration order.
pub fn grid_search_fit(
    base: &EstimatorSpec,
    grid: &ParamGrid,
    plan: &SplitPlan,
    x: &DataMatrix,
    y: &LabelVector,
    workers: Option<usize>,
) -> Result<GridSearchResult> {
    y.check_len(x.n_samples())?;
    plan.check_range(x.n_samples())?;
    if let Some(name) = grid.axes.keys().find(|name| !base.has_param(name)) {
        return Err(Error::UnknownAxis(name.clone()));
    }
    let points = grid.points();
    let specs: Vec<EstimatorSpec> = points
        .iter()
        .map(|point| {
            let mut spec = base.clone();
            for (name, value) in point {
                spec.set(name, value.clone())?;
            }
            Ok(spec)
        })
        .collect::<Result<_>>()?;

    let n_splits = plan.len();
    let results: Vec<Result<f64>> = with_workers(workers, || {
        (0..specs.len() * n_splits)
            .into_par_iter()
            .map(|task| {
                let (train, test) = plan.split(task % n_splits);
                fold_score(&specs[task / n_splits], x, y, train, test)
            })
            .collect()
    })?;

    let mut table = Vec::with_capacity(points.len());
    let mut results = results.into_iter();
    for params in points {
        let mut fold_scores = Vec::with_capacity(n_splits);
        let mut failure = None;
        for split in 0..n_splits {
            match results.next().expect("one result per task") {
                Ok(s) => fold_scores.push(s),
                Err(e) => {
                    fold_scores.push(f64::NEG_INFINITY);
                    failure.get_or_insert(Error::Fold { split, source: Box::new(e) });
                }
            }
        }
        let (mean, std) = if failure.is_some() {
            (f64::NEG_INFINITY, f64::NAN)
        } else {
            let m = fold_scores.iter().sum::<f64>() / n_splits as f64;
            let v = fold_scores.iter().map(|s| (s - m) * (s - m)).sum::<f64>() / n_splits as f64;
            (m, v.sqrt())
        };
        table.push(GridPoint { params, mean, std, fold_scores, failure });
    }

    let best_index = (0..table.len()).fold(0, |b, i| if table[i].mean > table[b].mean { i } else { b });
    let refit_model = fit(&specs[best_index], x, Some(y), None)?;
    Ok(GridSearchResult {
        best_params: table[best_index].params.clone(),
        best_index,
        best_score: table[best_index].mean,
        table,
        refit_model,
    })
}
