//! Estimator identifiers and validated hyperparameter maps.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
}

impl ParamValue {
    /// Parses a textual value: booleans, then integers, then floats, else a string.
    pub fn parse(text: &str) -> ParamValue {
        let t = text.trim();
        match t {
            "true" => return ParamValue::Bool(true),
            "false" => return ParamValue::Bool(false),
            _ => {}
        }
        if let Ok(i) = t.parse::<i64>() {
            return ParamValue::Int(i);
        }
        if let Ok(f) = t.parse::<f64>() {
            return ParamValue::Float(f);
        }
        ParamValue::Str(t.to_string())
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            ParamValue::Float(f) => Some(f),
            ParamValue::Int(i) => Some(i as f64),
            _ => None,
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Bool(b) => write!(f, "{b}"),
            ParamValue::Int(i) => write!(f, "{i}"),
            ParamValue::Float(x) => write!(f, "{x}"),
            ParamValue::Str(s) => f.write_str(s),
        }
    }
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Float(v)
    }
}

impl From<i64> for ParamValue {
    fn from(v: i64) -> Self {
        ParamValue::Int(v)
    }
}

impl From<i32> for ParamValue {
    fn from(v: i32) -> Self {
        ParamValue::Int(v.into())
    }
}

impl From<usize> for ParamValue {
    fn from(v: usize) -> Self {
        ParamValue::Int(v as i64)
    }
}

impl From<u64> for ParamValue {
    fn from(v: u64) -> Self {
        ParamValue::Int(v as i64)
    }
}

impl From<bool> for ParamValue {
    fn from(v: bool) -> Self {
        ParamValue::Bool(v)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Str(v.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EstimatorKind {
    ElasticNet,
    LassoLars,
    Svc,
    Knn,
    Pca,
    KMeans,
    Identity,
    DummyClassifier,
    DummyRegressor,
    Pipeline,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 10] = [
        EstimatorKind::ElasticNet,
        EstimatorKind::LassoLars,
        EstimatorKind::Svc,
        EstimatorKind::Knn,
        EstimatorKind::Pca,
        EstimatorKind::KMeans,
        EstimatorKind::Identity,
        EstimatorKind::DummyClassifier,
        EstimatorKind::DummyRegressor,
        EstimatorKind::Pipeline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::ElasticNet => "elastic_net",
            EstimatorKind::LassoLars => "lasso_lars",
            EstimatorKind::Svc => "svc",
            EstimatorKind::Knn => "knn",
            EstimatorKind::Pca => "pca",
            EstimatorKind::KMeans => "kmeans",
            EstimatorKind::Identity => "identity",
            EstimatorKind::DummyClassifier => "dummy_classifier",
            EstimatorKind::DummyRegressor => "dummy_regressor",
            EstimatorKind::Pipeline => "pipeline",
        }
    }

    pub fn is_classifier(self) -> bool {
        matches!(
            self,
            EstimatorKind::Svc | EstimatorKind::Knn | EstimatorKind::DummyClassifier
        )
    }

    pub fn is_regressor(self) -> bool {
        matches!(
            self,
            EstimatorKind::ElasticNet | EstimatorKind::LassoLars | EstimatorKind::DummyRegressor
        )
    }

    /// Requires targets at fit time. Pipelines are resolved from their final step.
    pub fn is_supervised(self) -> bool {
        self.is_classifier() || self.is_regressor()
    }

    pub fn is_transformer(self) -> bool {
        matches!(self, EstimatorKind::Pca | EstimatorKind::Identity)
    }

    pub fn accepts_sample_weight(self) -> bool {
        matches!(
            self,
            EstimatorKind::Svc | EstimatorKind::ElasticNet | EstimatorKind::KMeans
        )
    }

    fn schema(self) -> &'static [ParamDef] {
        match self {
            EstimatorKind::ElasticNet => ELASTIC_NET,
            EstimatorKind::LassoLars => LASSO_LARS,
            EstimatorKind::Svc => SVC,
            EstimatorKind::Knn => KNN,
            EstimatorKind::Pca => PCA,
            EstimatorKind::KMeans => KMEANS,
            _ => &[],
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EstimatorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParam {
                name: "kind".into(),
                reason: format!("unknown estimator `{s}`"),
            })
    }
}

#[derive(Debug, Clone, Copy)]
enum ParamType {
    /// Real in `[min, max]`, or `(min, max]` when `open_min`.
    Real { min: f64, open_min: bool, max: f64 },
    Count { min: i64 },
    Flag,
    Choice(&'static [&'static str]),
    RealOrChoice(&'static [&'static str]),
}

#[derive(Debug, Clone, Copy)]
enum Default {
    Real(f64),
    Count(i64),
    Flag(bool),
    Text(&'static str),
}

#[derive(Debug, Clone, Copy)]
struct ParamDef {
    name: &'static str,
    ty: ParamType,
    default: Default,
}

const fn def(name: &'static str, ty: ParamType, default: Default) -> ParamDef {
    ParamDef { name, ty, default }
}

const NONNEG: ParamType = ParamType::Real { min: 0.0, open_min: false, max: f64::INFINITY };
const POSITIVE: ParamType = ParamType::Real { min: 0.0, open_min: true, max: f64::INFINITY };
const UNIT: ParamType = ParamType::Real { min: 0.0, open_min: false, max: 1.0 };

const ELASTIC_NET: &[ParamDef] = &[
    def("alpha", NONNEG, Default::Real(1.0)),
    def("l1_ratio", UNIT, Default::Real(0.5)),
    def("max_iter", ParamType::Count { min: 1 }, Default::Count(1000)),
    def("tol", POSITIVE, Default::Real(1e-4)),
    def("fit_intercept", ParamType::Flag, Default::Flag(true)),
];

const LASSO_LARS: &[ParamDef] = &[
    def("alpha", NONNEG, Default::Real(1.0)),
    def("max_knots", ParamType::Count { min: 1 }, Default::Count(500)),
    def("fit_intercept", ParamType::Flag, Default::Flag(true)),
];

const SVC: &[ParamDef] = &[
    def("c", POSITIVE, Default::Real(1.0)),
    def("kernel", ParamType::Choice(&["linear", "rbf", "poly"]), Default::Text("rbf")),
    def("gamma", ParamType::RealOrChoice(&["scale", "auto"]), Default::Text("scale")),
    def("degree", ParamType::Count { min: 1 }, Default::Count(3)),
    def("coef0", ParamType::Real { min: f64::NEG_INFINITY, open_min: false, max: f64::INFINITY }, Default::Real(0.0)),
    def("tol", POSITIVE, Default::Real(1e-3)),
    // 0 selects 10·n_samples
    def("max_passes", ParamType::Count { min: 0 }, Default::Count(0)),
    def("cache_rows", ParamType::Count { min: 2 }, Default::Count(200)),
];

const KNN: &[ParamDef] = &[
    def("k", ParamType::Count { min: 1 }, Default::Count(5)),
    def("strategy", ParamType::Choice(&["auto", "ball_tree", "brute"]), Default::Text("auto")),
    def("leaf_size", ParamType::Count { min: 1 }, Default::Count(30)),
    def("dim_threshold", ParamType::Count { min: 0 }, Default::Count(20)),
];

const PCA: &[ParamDef] = &[
    def("n_components", ParamType::Count { min: 1 }, Default::Count(2)),
    def("n_oversamples", ParamType::Count { min: 0 }, Default::Count(10)),
    def("n_power_iters", ParamType::Count { min: 0 }, Default::Count(4)),
    def("seed", ParamType::Count { min: 0 }, Default::Count(0)),
    def("solver", ParamType::Choice(&["auto", "randomized", "exact"]), Default::Text("auto")),
];

const KMEANS: &[ParamDef] = &[
    def("k", ParamType::Count { min: 1 }, Default::Count(8)),
    def("n_init", ParamType::Count { min: 1 }, Default::Count(10)),
    def("max_iter", ParamType::Count { min: 1 }, Default::Count(300)),
    def("tol", NONNEG, Default::Real(1e-4)),
    def("seed", ParamType::Count { min: 0 }, Default::Count(0)),
];

impl ParamDef {
    fn default_value(&self) -> ParamValue {
        match self.default {
            Default::Real(f) => ParamValue::Float(f),
            Default::Count(i) => ParamValue::Int(i),
            Default::Flag(b) => ParamValue::Bool(b),
            Default::Text(s) => ParamValue::Str(s.to_string()),
        }
    }

    fn validate(&self, value: ParamValue) -> Result<ParamValue> {
        let bad = |reason: String| Error::InvalidParam { name: self.name.to_string(), reason };
        match self.ty {
            ParamType::Real { min, open_min, max } => {
                let v = value
                    .as_f64()
                    .ok_or_else(|| bad(format!("expected a number, got `{value}`")))?;
                let low_ok = if open_min { v > min } else { v >= min };
                if !v.is_finite() || !low_ok || v > max {
                    let open = if open_min { "(" } else { "[" };
                    return Err(bad(format!("{v} outside {open}{min}, {max}]")));
                }
                Ok(ParamValue::Float(v))
            }
            ParamType::Count { min } => {
                let v = match value {
                    ParamValue::Int(i) => i,
                    ParamValue::Float(f) if f.fract() == 0.0 && f.abs() < 9e15 => f as i64,
                    other => return Err(bad(format!("expected an integer, got `{other}`"))),
                };
                if v < min {
                    return Err(bad(format!("{v} is below the minimum {min}")));
                }
                Ok(ParamValue::Int(v))
            }
            ParamType::Flag => match value {
                ParamValue::Bool(b) => Ok(ParamValue::Bool(b)),
                other => Err(bad(format!("expected true/false, got `{other}`"))),
            },
            ParamType::Choice(choices) => match value {
                ParamValue::Str(s) if choices.contains(&s.as_str()) => Ok(ParamValue::Str(s)),
                other => Err(bad(format!("expected one of {choices:?}, got `{other}`"))),
            },
            ParamType::RealOrChoice(choices) => match value {
                ParamValue::Str(s) if choices.contains(&s.as_str()) => Ok(ParamValue::Str(s)),
                other => match other.as_f64() {
                    Some(v) if v.is_finite() && v > 0.0 => Ok(ParamValue::Float(v)),
                    _ => Err(bad(format!(
                        "expected a positive number or one of {choices:?}, got `{other}`"
                    ))),
                },
            },
        }
    }
}

/// An algorithm identifier plus the hyperparameters explicitly set on it.
///
/// Parameters not set explicitly resolve to their documented defaults.
/// Pipelines carry named steps instead of their own parameters; nested
/// parameters are addressed as `"step.param"`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorSpec {
    kind: EstimatorKind,
    params: BTreeMap<String, ParamValue>,
    steps: Vec<(String, EstimatorSpec)>,
}

impl EstimatorSpec {
    /// A spec with every parameter at its default. Pipelines are built with
    /// [`crate::model_selection::pipeline`].
    pub fn new(kind: EstimatorKind) -> Self {
        assert!(kind != EstimatorKind::Pipeline, "pipelines are built from steps");
        EstimatorSpec { kind, params: BTreeMap::new(), steps: Vec::new() }
    }

    pub(crate) fn from_steps(steps: Vec<(String, EstimatorSpec)>) -> Self {
        EstimatorSpec { kind: EstimatorKind::Pipeline, params: BTreeMap::new(), steps }
    }

    pub fn with(mut self, name: &str, value: impl Into<ParamValue>) -> Result<Self> {
        self.set(name, value)?;
        Ok(self)
    }

    pub fn set(&mut self, name: &str, value: impl Into<ParamValue>) -> Result<()> {
        let value = value.into();
        if self.kind == EstimatorKind::Pipeline {
            let unknown = || Error::UnknownParam { kind: "pipeline".into(), name: name.into() };
            let (step, rest) = name.split_once('.').ok_or_else(unknown)?;
            let (_, spec) = self
                .steps
                .iter_mut()
                .find(|(s, _)| s == step)
                .ok_or_else(unknown)?;
            return spec.set(rest, value).map_err(|e| match e {
                Error::UnknownParam { .. } => unknown(),
                other => other,
            });
        }
        let def = self.lookup(name)?;
        let value = def.validate(value)?;
        self.params.insert(name.to_string(), value);
        Ok(())
    }

    pub fn has_param(&self, name: &str) -> bool {
        if self.kind == EstimatorKind::Pipeline {
            return name.split_once('.').is_some_and(|(step, rest)| {
                self.steps.iter().any(|(s, spec)| s == step && spec.has_param(rest))
            });
        }
        self.kind.schema().iter().any(|d| d.name == name)
    }

    fn lookup(&self, name: &str) -> Result<&'static ParamDef> {
        self.kind
            .schema()
            .iter()
            .find(|d| d.name == name)
            .ok_or_else(|| Error::UnknownParam { kind: self.kind.name().into(), name: name.into() })
    }

    pub fn kind(&self) -> EstimatorKind {
        self.kind
    }

    pub fn steps(&self) -> &[(String, EstimatorSpec)] {
        &self.steps
    }

    /// The resolved value (explicit or default).
    pub fn get(&self, name: &str) -> Result<ParamValue> {
        if self.kind == EstimatorKind::Pipeline {
            let (step, rest) = name.split_once('.').ok_or_else(|| Error::UnknownParam {
                kind: "pipeline".into(),
                name: name.into(),
            })?;
            return self
                .steps
                .iter()
                .find(|(s, _)| s == step)
                .ok_or_else(|| Error::UnknownParam { kind: "pipeline".into(), name: name.into() })?
                .1
                .get(rest);
        }
        let def = self.lookup(name)?;
        Ok(self.params.get(name).cloned().unwrap_or_else(|| def.default_value()))
    }

    /// Every parameter with its resolved value; nested names for pipelines.
    pub fn resolved(&self) -> BTreeMap<String, ParamValue> {
        if self.kind == EstimatorKind::Pipeline {
            let mut out = BTreeMap::new();
            for (step, spec) in &self.steps {
                for (k, v) in spec.resolved() {
                    out.insert(format!("{step}.{k}"), v);
                }
            }
            return out;
        }
        self.kind
            .schema()
            .iter()
            .map(|d| {
                let v = self.params.get(d.name).cloned().unwrap_or_else(|| d.default_value());
                (d.name.to_string(), v)
            })
            .collect()
    }

    pub(crate) fn f64(&self, name: &str) -> f64 {
        self.get(name)
            .ok()
            .and_then(|v| v.as_f64())
            .unwrap_or_else(|| panic!("`{name}` is not a numeric parameter of {}", self.kind))
    }

    pub(crate) fn usize(&self, name: &str) -> usize {
        match self.get(name) {
            Ok(ParamValue::Int(i)) => i as usize,
            other => panic!("`{name}` is not a count parameter of {}: {other:?}", self.kind),
        }
    }

    pub(crate) fn flag(&self, name: &str) -> bool {
        match self.get(name) {
            Ok(ParamValue::Bool(b)) => b,
            other => panic!("`{name}` is not a flag parameter of {}: {other:?}", self.kind),
        }
    }

    pub(crate) fn text(&self, name: &str) -> String {
        match self.get(name) {
            Ok(ParamValue::Str(s)) => s,
            other => panic!("`{name}` is not a choice parameter of {}: {other:?}", self.kind),
        }
    }
}

impl fmt::Display for EstimatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.kind == EstimatorKind::Pipeline {
            let names: Vec<String> =
                self.steps.iter().map(|(n, s)| format!("{n}={s}")).collect();
            return write!(f, "pipeline[{}]", names.join(" -> "));
        }
        write!(f, "{}", self.kind)?;
        if !self.params.is_empty() {
            let parts: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, "({})", parts.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_spec_resolves_defaults() {
        for kind in EstimatorKind::ALL {
            if kind == EstimatorKind::Pipeline {
                continue;
            }
            let spec = EstimatorSpec::new(kind);
            for (name, value) in spec.resolved() {
                assert_eq!(spec.get(&name).unwrap(), value);
            }
        }
        assert_eq!(EstimatorSpec::new(EstimatorKind::Pca).usize("n_components"), 2);
        assert_eq!(EstimatorSpec::new(EstimatorKind::ElasticNet).f64("tol"), 1e-4);
    }

    #[test]
    fn unknown_names_rejected() {
        let err = EstimatorSpec::new(EstimatorKind::Knn).with("n_neighbors", 3).unwrap_err();
        assert!(matches!(err, Error::UnknownParam { .. }));
        assert!(EstimatorSpec::new(EstimatorKind::Identity).with("x", 1).is_err());
    }

    #[test]
    fn values_validated_and_coerced() {
        let spec = EstimatorSpec::new(EstimatorKind::ElasticNet).with("alpha", 2).unwrap();
        assert_eq!(spec.get("alpha").unwrap(), ParamValue::Float(2.0));
        assert!(spec.clone().with("l1_ratio", 1.5).is_err());
        assert!(spec.clone().with("tol", 0.0).is_err());
        let knn = EstimatorSpec::new(EstimatorKind::Knn).with("k", 3.0).unwrap();
        assert_eq!(knn.usize("k"), 3);
        assert!(knn.clone().with("k", 0).is_err());
        assert!(knn.clone().with("strategy", "kd_tree").is_err());
        let svc = EstimatorSpec::new(EstimatorKind::Svc).with("gamma", 0.5).unwrap();
        assert_eq!(svc.get("gamma").unwrap(), ParamValue::Float(0.5));
        assert!(svc.with("gamma", "bogus").is_err());
    }

    #[test]
    fn parse_values() {
        assert_eq!(ParamValue::parse("true"), ParamValue::Bool(true));
        assert_eq!(ParamValue::parse("12"), ParamValue::Int(12));
        assert_eq!(ParamValue::parse("1e-3"), ParamValue::Float(1e-3));
        assert_eq!(ParamValue::parse(" rbf "), ParamValue::Str("rbf".into()));
        assert_eq!("kmeans".parse::<EstimatorKind>().unwrap(), EstimatorKind::KMeans);
    }
}
