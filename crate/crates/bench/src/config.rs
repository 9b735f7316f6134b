//! Flat `key = value` benchmark configuration.
//!
//! ```text
//! # quarter-scale run
//! dataset = madelon
//! n_samples = 1100
//! repeats = 3
//! task = svc c=1.0
//! task = pca
//! ```
//!
//! `task` may repeat; its value is an algorithm name followed by
//! `param=value` pairs. Blank lines and `#` comments are ignored.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use learnkit::ParamValue;

use crate::error::{BenchError, Result};
use crate::io::LabelColumn;
use crate::madelon::MadelonSpec;

/// The six benchmarked algorithms, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    Svc,
    LassoLars,
    ElasticNet,
    Knn,
    Pca,
    KMeans,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] =
        [Algorithm::Svc, Algorithm::LassoLars, Algorithm::ElasticNet, Algorithm::Knn, Algorithm::Pca, Algorithm::KMeans];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Svc => "svc",
            Algorithm::LassoLars => "lasso_lars",
            Algorithm::ElasticNet => "elastic_net",
            Algorithm::Knn => "knn",
            Algorithm::Pca => "pca",
            Algorithm::KMeans => "kmeans",
        }
    }

    /// Parameters set unless the task overrides them.
    pub fn default_params(self) -> Vec<(String, ParamValue)> {
        match self {
            Algorithm::Pca => vec![("n_components".into(), ParamValue::Int(9))],
            Algorithm::KMeans => vec![("k".into(), ParamValue::Int(9))],
            _ => Vec::new(),
        }
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}` (expected one of svc, lasso_lars, elastic_net, knn, pca, kmeans)"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub algorithm: Algorithm,
    /// Defaults first, then overrides in the order given.
    pub params: Vec<(String, ParamValue)>,
}

impl Task {
    pub fn new(algorithm: Algorithm) -> Self {
        Task { algorithm, params: algorithm.default_params() }
    }

    pub fn set(&mut self, name: &str, value: ParamValue) {
        match self.params.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = value,
            None => self.params.push((name.to_string(), value)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSource {
    Madelon(MadelonSpec),
    Csv { path: PathBuf, label: LabelColumn },
    Svmlight(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub tasks: Vec<Task>,
    pub dataset: DatasetSource,
    pub repeats: usize,
    pub output: Option<PathBuf>,
    pub timeout_secs: f64,
    pub parallel: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            tasks: Algorithm::ALL.into_iter().map(Task::new).collect(),
            dataset: DatasetSource::Madelon(MadelonSpec::quarter()),
            repeats: 1,
            output: None,
            timeout_secs: 3600.0,
            parallel: false,
        }
    }
}

impl BenchConfig {
    /// Parses config text. Relative paths resolve against `base_dir`.
    /// Without any `task` line all six algorithms run with defaults.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg = BenchConfig { tasks: Vec::new(), ..Default::default() };
        let mut madelon = MadelonSpec::quarter();
        let mut kind = "madelon".to_string();
        let mut path: Option<PathBuf> = None;
        let mut label = LabelColumn::None;

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: String| BenchError::Config { line, message };
            let (key, value) = content.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| v.parse::<f64>().map_err(|_| err(format!("`{key}` needs a number, got `{v}`")));
            let count = |v: &str| v.parse::<usize>().map_err(|_| err(format!("`{key}` needs a count, got `{v}`")));
            match key {
                "task" => cfg.tasks.push(parse_task(value).map_err(err)?),
                "dataset" => kind = value.to_string(),
                "path" => path = Some(base_dir.join(value)),
                "label_column" => label = LabelColumn::parse(value),
                "repeats" => cfg.repeats = count(value)?,
                "output" => cfg.output = Some(base_dir.join(value)),
                "timeout" => cfg.timeout_secs = num(value)?,
                "parallel" => {
                    cfg.parallel = value.parse().map_err(|_| err(format!("`parallel` needs true or false, got `{value}`")))?
                }
                "n_samples" => madelon.n_samples = count(value)?,
                "n_features" => madelon.n_features = count(value)?,
                "n_informative" => madelon.n_informative = count(value)?,
                "n_redundant" => madelon.n_redundant = count(value)?,
                "class_sep" => madelon.class_sep = num(value)?,
                "flip_fraction" => madelon.flip_fraction = num(value)?,
                "seed" => madelon.seed = value.parse().map_err(|_| err(format!("`seed` needs an integer, got `{value}`")))?,
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }

        if cfg.repeats == 0 {
            return Err(BenchError::Config { line: 0, message: "repeats must be at least 1".into() });
        }
        if !(cfg.timeout_secs > 0.0) {
            return Err(BenchError::Config { line: 0, message: "timeout must be positive".into() });
        }
        let need_path = || path.clone().ok_or(BenchError::Config { line: 0, message: format!("dataset `{kind}` needs a path") });
        cfg.dataset = match kind.as_str() {
            "madelon" => {
                madelon.validate()?;
                DatasetSource::Madelon(madelon)
            }
            "csv" => DatasetSource::Csv { path: need_path()?, label },
            "svmlight" => DatasetSource::Svmlight(need_path()?),
            other => return Err(BenchError::Config { line: 0, message: format!("unknown dataset `{other}`") }),
        };
        if cfg.tasks.is_empty() {
            cfg.tasks = Algorithm::ALL.into_iter().map(Task::new).collect();
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Switches a generated dataset to the full 4400 × 500 shape.
    pub fn full_scale(&mut self) {
        if let DatasetSource::Madelon(spec) = &mut self.dataset {
            let defaults = MadelonSpec::default();
            spec.n_samples = defaults.n_samples;
            spec.n_features = defaults.n_features;
        }
    }
}

fn parse_task(value: &str) -> Result<Task, String> {
    let mut parts = value.split_whitespace();
    let algorithm: Algorithm = parts.next().ok_or("empty task")?.parse()?;
    let mut task = Task::new(algorithm);
    for pair in parts {
        let (name, v) = pair.split_once('=').ok_or_else(|| format!("expected `param=value`, got `{pair}`"))?;
        task.set(name, ParamValue::parse(v));
    }
    Ok(task)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_tasks_and_dataset() {
        let text = "\
# comment
dataset = madelon
n_samples = 200   # trailing
n_features = 30
repeats = 3
timeout = 60
task = pca
task = kmeans k=4 n_init=2
task = svc c=0.5 kernel=linear
";
        let cfg = BenchConfig::parse(text, Path::new("/tmp")).unwrap();
        assert_eq!(cfg.repeats, 3);
        assert_eq!(cfg.timeout_secs, 60.0);
        let DatasetSource::Madelon(spec) = &cfg.dataset else { panic!() };
        assert_eq!((spec.n_samples, spec.n_features), (200, 30));
        assert_eq!(cfg.tasks[0].params, vec![("n_components".to_string(), ParamValue::Int(9))]);
        assert_eq!(
            cfg.tasks[1].params,
            vec![("k".to_string(), ParamValue::Int(4)), ("n_init".to_string(), ParamValue::Int(2))]
        );
        assert_eq!(cfg.tasks[2].params[1], ("kernel".to_string(), ParamValue::Str("linear".into())));
    }

    #[test]
    fn defaults_to_all_six_algorithms() {
        let cfg = BenchConfig::parse("", Path::new(".")).unwrap();
        let names: Vec<&str> = cfg.tasks.iter().map(|t| t.algorithm.name()).collect();
        assert_eq!(names, ["svc", "lasso_lars", "elastic_net", "knn", "pca", "kmeans"]);
        assert_eq!(cfg.timeout_secs, 3600.0);
        assert!(!cfg.parallel);
    }

    #[test]
    fn errors_carry_line_numbers() {
        for (text, line) in [("repeats = 2\nbogus = 1", 2), ("task = forest", 1), ("\n\nn_samples = many", 3), ("novalue", 1)] {
            let Err(BenchError::Config { line: got, .. }) = BenchConfig::parse(text, Path::new(".")) else { panic!("{text}") };
            assert_eq!(got, line);
        }
        assert!(BenchConfig::parse("repeats = 0", Path::new(".")).is_err());
        assert!(BenchConfig::parse("dataset = csv", Path::new(".")).is_err());
        assert!(matches!(BenchConfig::parse("n_informative = 0", Path::new(".")), Err(BenchError::BadSpec(_))));
    }

    #[test]
    fn full_scale_restores_the_original_shape() {
        let mut cfg = BenchConfig::parse("flip_fraction = 0.05", Path::new(".")).unwrap();
        cfg.full_scale();
        let DatasetSource::Madelon(spec) = &cfg.dataset else { panic!() };
        assert_eq!((spec.n_samples, spec.n_features, spec.flip_fraction), (4400, 500, 0.05));
    }
}
