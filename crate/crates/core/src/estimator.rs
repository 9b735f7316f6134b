//! The uniform estimator interface: `fit`, `predict`, `transform`, `score`.

use crate::cluster::{kmeans_fit, KMeansModel, KMeansParams};
use crate::data::{check_weights, ClassLabels, DataMatrix, LabelVector};
use crate::decomposition::{pca_fit, PcaModel, PcaParams};
use crate::error::{Error, Result, Warning};
use crate::linear::{elastic_net_fit, lasso_lars_fit, r2_score, ElasticNetParams, LinearFit};
use crate::neighbors::{KnnModel, KnnParams};
use crate::params::{EstimatorKind, EstimatorSpec, ParamValue};
use crate::svm::{multiclass_svc_fit, Kernel, OvoSvc, SvcParams};

/// Learned state of one estimator.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelState {
    Linear(LinearFit),
    Svc(OvoSvc),
    Knn(KnnModel),
    Pca(PcaModel),
    KMeans(KMeansModel),
    Identity,
    /// Most frequent training class.
    DummyClassifier { code: usize },
    /// Mean training target.
    DummyRegressor { mean: f64 },
    Pipeline(Vec<(String, FittedModel)>),
}

/// A fitted estimator: the `EstimatorSpec` that produced it plus its learned state.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    pub spec: EstimatorSpec,
    pub state: ModelState,
    pub n_features_in: usize,
    /// Training label alphabet, for classifiers.
    pub classes: Option<Vec<String>>,
    pub warnings: Vec<Warning>,
}

/// Anything that behaves like a fitted estimator.
pub trait FittedEstimator {
    fn n_features_in(&self) -> usize;
    fn predict(&self, x: &DataMatrix) -> Result<LabelVector>;
    fn transform(&self, x: &DataMatrix) -> Result<DataMatrix>;
    fn score(&self, x: &DataMatrix, y: &LabelVector) -> Result<f64>;
}

impl FittedEstimator for FittedModel {
    fn n_features_in(&self) -> usize {
        self.n_features_in
    }

    fn predict(&self, x: &DataMatrix) -> Result<LabelVector> {
        predict(self, x)
    }

    fn transform(&self, x: &DataMatrix) -> Result<DataMatrix> {
        transform(self, x)
    }

    fn score(&self, x: &DataMatrix, y: &LabelVector) -> Result<f64> {
        score(self, x, y)
    }
}

/// The step that determines a spec's supervision and output type.
fn final_kind(spec: &EstimatorSpec) -> EstimatorKind {
    match spec.steps().last() {
        Some((_, last)) if spec.kind() == EstimatorKind::Pipeline => final_kind(last),
        _ => spec.kind(),
    }
}

pub fn is_supervised(spec: &EstimatorSpec) -> bool {
    final_kind(spec).is_supervised()
}

pub fn is_classifier(spec: &EstimatorSpec) -> bool {
    final_kind(spec).is_classifier()
}

/// Fits `spec` on `(x, y)`. Supervised estimators require `y`; the others
/// ignore it. Only SVC, Elastic Net and k-means accept `sample_weight`
/// (for a pipeline, it goes to the final step).
pub fn fit(
    spec: &EstimatorSpec,
    x: &DataMatrix,
    y: Option<&LabelVector>,
    sample_weight: Option<&[f64]>,
) -> Result<FittedModel> {
    if let Some(y) = y {
        y.check_len(x.n_samples())?;
    }
    if let Some(w) = sample_weight {
        let kind = final_kind(spec);
        if !kind.accepts_sample_weight() {
            return Err(Error::UnsupportedParam(format!("`{kind}` does not accept sample_weight")));
        }
        check_weights(w, x.n_samples())?;
    }
    let kind = spec.kind();
    let target = || {
        y.ok_or_else(|| Error::InvalidTarget(format!("`{kind}` requires targets")))
    };
    let mut classes = None;
    let mut warnings = Vec::new();
    let state = match kind {
        EstimatorKind::ElasticNet => {
            let params = ElasticNetParams {
                alpha: spec.f64("alpha"),
                l1_ratio: spec.f64("l1_ratio"),
                max_iter: spec.usize("max_iter"),
                tol: spec.f64("tol"),
                fit_intercept: spec.flag("fit_intercept"),
            };
            let y = target()?.to_real()?;
            ModelState::Linear(elastic_net_fit(&params, x, &y, sample_weight)?)
        }
        EstimatorKind::LassoLars => {
            let y = target()?.to_real()?;
            let (model, path) =
                lasso_lars_fit(spec.f64("alpha"), spec.usize("max_knots"), spec.flag("fit_intercept"), x, &y)?;
            warnings = path.warnings;
            ModelState::Linear(model)
        }
        EstimatorKind::Svc => {
            let labels = target()?.to_classes();
            let params = svc_params(spec, x);
            classes = Some(labels.classes().to_vec());
            ModelState::Svc(multiclass_svc_fit(&params, x, &labels, sample_weight)?)
        }
        EstimatorKind::Knn => {
            let labels = target()?.to_classes();
            let params = KnnParams {
                k: spec.usize("k"),
                strategy: spec.text("strategy").parse()?,
                leaf_size: spec.usize("leaf_size"),
                dim_threshold: spec.usize("dim_threshold"),
            };
            classes = Some(labels.classes().to_vec());
            ModelState::Knn(KnnModel::fit(&params, x, &labels)?)
        }
        EstimatorKind::Pca => {
            let params = PcaParams {
                n_components: spec.usize("n_components"),
                n_oversamples: spec.usize("n_oversamples"),
                n_power_iters: spec.usize("n_power_iters"),
                seed: spec.usize("seed") as u64,
                solver: spec.text("solver").parse()?,
            };
            ModelState::Pca(pca_fit(&params, x)?)
        }
        EstimatorKind::KMeans => {
            let params = KMeansParams {
                k: spec.usize("k"),
                n_init: spec.usize("n_init"),
                max_iter: spec.usize("max_iter"),
                tol: spec.f64("tol"),
                seed: spec.usize("seed") as u64,
            };
            let model = kmeans_fit(&params, x, sample_weight)?;
            warnings = model.warnings.clone();
            ModelState::KMeans(model)
        }
        EstimatorKind::Identity => ModelState::Identity,
        EstimatorKind::DummyClassifier => {
            let labels = target()?.to_classes();
            let counts = labels.counts();
            let code = (0..counts.len()).fold(0, |b, c| if counts[c] > counts[b] { c } else { b });
            classes = Some(labels.classes().to_vec());
            ModelState::DummyClassifier { code }
        }
        EstimatorKind::DummyRegressor => {
            let y = target()?.to_real()?;
            ModelState::DummyRegressor { mean: y.iter().sum::<f64>() / y.len() as f64 }
        }
        EstimatorKind::Pipeline => {
            let steps = spec.steps();
            let mut fitted = Vec::with_capacity(steps.len());
            let mut current = x.clone();
            for (i, (name, step)) in steps.iter().enumerate() {
                let last = i + 1 == steps.len();
                let model = fit(step, &current, y, if last { sample_weight } else { None })?;
                if !last {
                    current = transform(&model, &current)?;
                }
                warnings.extend(model.warnings.iter().cloned());
                fitted.push((name.clone(), model));
            }
            classes = fitted.last().and_then(|(_, m)| m.classes.clone());
            ModelState::Pipeline(fitted)
        }
    };
    Ok(FittedModel { spec: spec.clone(), state, n_features_in: x.n_features(), classes, warnings })
}

fn svc_params(spec: &EstimatorSpec, x: &DataMatrix) -> SvcParams {
    let p = x.n_features() as f64;
    let gamma = match spec.get("gamma") {
        Ok(ParamValue::Str(s)) if s == "auto" => 1.0 / p,
        Ok(ParamValue::Str(_)) => {
            let values = x.as_slice();
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64;
            if var > 0.0 { 1.0 / (p * var) } else { 1.0 }
        }
        Ok(v) => v.as_f64().expect("validated numeric gamma"),
        Err(e) => panic!("{e}"),
    };
    let kernel = match spec.text("kernel").as_str() {
        "linear" => Kernel::Linear,
        "poly" => Kernel::Polynomial { degree: spec.usize("degree") as u32, gamma, coef0: spec.f64("coef0") },
        _ => Kernel::Rbf { gamma },
    };
    let max_passes = match spec.usize("max_passes") {
        0 => None,
        m => Some(m),
    };
    SvcParams { c: spec.f64("c"), kernel, tol: spec.f64("tol"), max_passes, cache_rows: spec.usize("cache_rows") }
}

fn wrong(model: &FittedModel, op: &'static str) -> Error {
    Error::WrongCapability { kind: model.spec.kind().name().to_string(), op }
}

fn class_output(classes: &[String], codes: Vec<usize>) -> Result<LabelVector> {
    Ok(LabelVector::Classes(ClassLabels::with_alphabet(classes.to_vec(), codes)?))
}

/// Predictions for every row. Classifiers return labels from the training
/// alphabet, regressors real values, k-means cluster indices.
pub fn predict(model: &FittedModel, x: &DataMatrix) -> Result<LabelVector> {
    x.check_width(model.n_features_in)?;
    let classes = model.classes.as_deref().unwrap_or(&[]);
    match &model.state {
        ModelState::Linear(fit) => Ok(LabelVector::Real(fit.predict(x)?)),
        ModelState::Svc(ovo) => class_output(classes, ovo.predict_codes(x)?),
        ModelState::Knn(knn) => class_output(classes, knn.predict_codes(x)?),
        ModelState::KMeans(km) => {
            let ids: Vec<String> = (0..km.n_clusters()).map(|c| c.to_string()).collect();
            class_output(&ids, km.predict(x)?)
        }
        ModelState::DummyClassifier { code } => class_output(classes, vec![*code; x.n_samples()]),
        ModelState::DummyRegressor { mean } => Ok(LabelVector::Real(vec![*mean; x.n_samples()])),
        ModelState::Pca(_) | ModelState::Identity => Err(wrong(model, "predict")),
        ModelState::Pipeline(steps) => {
            let (last, head) = steps.split_last().expect("pipelines have steps");
            predict(&last.1, &through(head, x)?)
        }
    }
}

fn through(steps: &[(String, FittedModel)], x: &DataMatrix) -> Result<DataMatrix> {
    let mut current = x.clone();
    for (_, m) in steps {
        current = transform(m, &current)?;
    }
    Ok(current)
}

/// Transformed copy of `x`; only transformers and all-transformer pipelines.
pub fn transform(model: &FittedModel, x: &DataMatrix) -> Result<DataMatrix> {
    x.check_width(model.n_features_in)?;
    match &model.state {
        ModelState::Pca(pca) => pca.transform(x),
        ModelState::Identity => Ok(x.clone()),
        ModelState::Pipeline(steps) if final_kind(&model.spec).is_transformer() => through(steps, x),
        _ => Err(wrong(model, "transform")),
    }
}

/// Mean accuracy for classifiers, R² for regressors.
pub fn score(model: &FittedModel, x: &DataMatrix, y: &LabelVector) -> Result<f64> {
    x.check_width(model.n_features_in)?;
    y.check_len(x.n_samples())?;
    let kind = final_kind(&model.spec);
    if kind.is_classifier() {
        let predicted = predict(model, x)?;
        let LabelVector::Classes(predicted) = predicted else {
            unreachable!("classifiers predict class labels")
        };
        let truth = y.to_classes();
        let hits = (0..truth.len()).filter(|&i| truth.id(i) == predicted.id(i)).count();
        Ok(hits as f64 / truth.len() as f64)
    } else if kind.is_regressor() {
        let LabelVector::Real(predicted) = predict(model, x)? else {
            unreachable!("regressors predict real values")
        };
        Ok(r2_score(&y.to_real()?, &predicted))
    } else {
        Err(wrong(model, "score"))
    }
}

/// Mean accuracy of predicted against true class identifiers.
pub fn accuracy(y_true: &LabelVector, y_pred: &LabelVector) -> Result<f64> {
    y_pred.check_len(y_true.len())?;
    if y_true.is_empty() {
        return Err(Error::Empty("no labels to score".into()));
    }
    let (t, p) = (y_true.to_classes(), y_pred.to_classes());
    Ok((0..t.len()).filter(|&i| t.id(i) == p.id(i)).count() as f64 / t.len() as f64)
}
