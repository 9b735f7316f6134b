use std::collections::BTreeMap;
use std::sync::mpsc;
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use learnkit::{fit, score, DataMatrix, EstimatorKind, EstimatorSpec, FittedModel, LabelVector, ModelState};
use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Algorithm, BenchConfig, DatasetSource, Task};
use crate::error::Result;
use crate::io::{load_csv, load_svmlight, write_jsonl};
use crate::madelon::make_madelon;
use crate::report::render_table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Failed,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quality {
    pub metric: String,
    pub value: f64,
}

/// One benchmark row. Failed and timed-out tasks still produce a record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub algorithm: String,
    pub row: String,
    pub dataset: String,
    pub status: Status,
    /// Median of the timed fits.
    pub wall_seconds: Option<f64>,
    pub timings: Vec<f64>,
    pub quality: Option<Quality>,
    pub seed: u64,
    pub params: BTreeMap<String, String>,
    pub error: Option<String>,
    pub concurrent: bool,
    pub timeout_secs: f64,
}

impl BenchRecord {
    pub fn failed(&self) -> bool {
        self.status != Status::Ok
    }
}

#[derive(Debug, Clone)]
pub struct BenchRun {
    pub records: Vec<BenchRecord>,
    pub table: String,
}

impl BenchRun {
    pub fn n_failed(&self) -> usize {
        self.records.iter().filter(|r| r.failed()).count()
    }
}

/// Loads the dataset, runs every task, writes records to `config.output`
/// when set, and renders the report table. A failing task becomes a failed
/// record; only dataset or output errors abort the run.
pub fn run_bench(config: &BenchConfig) -> Result<BenchRun> {
    let (x, y, dataset, seed) = load_dataset(&config.dataset)?;
    info!("dataset {dataset}: {} tasks, {} repeats", config.tasks.len(), config.repeats);
    let x = Arc::new(x);
    let y = y.map(Arc::new);
    let run = |task: &Task| run_task(task, &x, y.as_ref(), config, &dataset, seed);
    let records: Vec<BenchRecord> = if config.parallel {
        config.tasks.par_iter().map(run).collect()
    } else {
        config.tasks.iter().map(run).collect()
    };
    if let Some(path) = &config.output {
        write_jsonl(path, &records)?;
    }
    let table = render_table(&records);
    Ok(BenchRun { records, table })
}

fn load_dataset(source: &DatasetSource) -> Result<(DataMatrix, Option<LabelVector>, String, u64)> {
    Ok(match source {
        DatasetSource::Madelon(spec) => {
            let (x, y) = make_madelon(spec)?;
            (x, Some(y), spec.shape(), spec.seed)
        }
        DatasetSource::Csv { path, label } => {
            let (x, y) = load_csv(path, label)?;
            let name = format!("{} {}x{}", path.display(), x.n_samples(), x.n_features());
            (x, y, name, 0)
        }
        DatasetSource::Svmlight(path) => {
            let (x, y) = load_svmlight(path)?;
            let name = format!("{} {}x{}", path.display(), x.n_samples(), x.n_features());
            (x, Some(y), name, 0)
        }
    })
}

pub fn row_name(algorithm: Algorithm, params: &BTreeMap<String, String>) -> String {
    let get = |k: &str| params.get(k).cloned().unwrap_or_else(|| "?".into());
    match algorithm {
        Algorithm::Svc => "Support Vector Classification".into(),
        Algorithm::LassoLars => "Lasso (LARS)".into(),
        Algorithm::ElasticNet => "Elastic Net".into(),
        Algorithm::Knn => "k-Nearest Neighbors".into(),
        Algorithm::Pca => format!("PCA ({} components)", get("n_components")),
        Algorithm::KMeans => format!("k-Means ({} clusters)", get("k")),
    }
}

fn kind(algorithm: Algorithm) -> EstimatorKind {
    match algorithm {
        Algorithm::Svc => EstimatorKind::Svc,
        Algorithm::LassoLars => EstimatorKind::LassoLars,
        Algorithm::ElasticNet => EstimatorKind::ElasticNet,
        Algorithm::Knn => EstimatorKind::Knn,
        Algorithm::Pca => EstimatorKind::Pca,
        Algorithm::KMeans => EstimatorKind::KMeans,
    }
}

fn run_task(
    task: &Task,
    x: &Arc<DataMatrix>,
    y: Option<&Arc<LabelVector>>,
    config: &BenchConfig,
    dataset: &str,
    seed: u64,
) -> BenchRecord {
    let mut record = BenchRecord {
        algorithm: task.algorithm.name().into(),
        row: String::new(),
        dataset: dataset.into(),
        status: Status::Failed,
        wall_seconds: None,
        timings: Vec::new(),
        quality: None,
        seed,
        params: task.params.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
        error: None,
        concurrent: config.parallel,
        timeout_secs: config.timeout_secs,
    };
    let outcome = build_spec(task).and_then(|spec| {
        record.params = spec.resolved().into_iter().map(|(k, v)| (k, v.to_string())).collect();
        timed(spec, task.algorithm, Arc::clone(x), y.cloned(), config.repeats, config.timeout_secs)
    });
    record.row = row_name(task.algorithm, &record.params);
    if task.algorithm == Algorithm::Knn && task.params.iter().any(|(k, _)| k == "strategy") {
        record.row = format!("{} [{}]", record.row, record.params["strategy"]);
    }
    match outcome {
        Ok((timings, quality)) => {
            record.status = Status::Ok;
            record.wall_seconds = Some(median(&timings));
            record.timings = timings;
            record.quality = Some(quality);
            info!("{}: {:.4} s", record.row, record.wall_seconds.unwrap_or(0.0));
        }
        Err(Outcome::Timeout) => {
            warn!("{}: no result within {} s", record.row, config.timeout_secs);
            record.status = Status::Timeout;
            record.error = Some(format!("did not finish within {} s", config.timeout_secs));
        }
        Err(Outcome::Failed(message)) => {
            warn!("{}: {message}", record.row);
            record.error = Some(message);
        }
    }
    record
}

enum Outcome {
    Failed(String),
    Timeout,
}

fn build_spec(task: &Task) -> Result<EstimatorSpec, Outcome> {
    let mut spec = EstimatorSpec::new(kind(task.algorithm));
    for (name, value) in &task.params {
        spec.set(name, value.clone()).map_err(|e| Outcome::Failed(e.to_string()))?;
    }
    Ok(spec)
}

/// One discarded warm-up fit, then `repeats` timed fits, on a worker
/// thread. After the timeout the worker is left running and its result
/// is dropped.
fn timed(
    spec: EstimatorSpec,
    algorithm: Algorithm,
    x: Arc<DataMatrix>,
    y: Option<Arc<LabelVector>>,
    repeats: usize,
    timeout_secs: f64,
) -> Result<(Vec<f64>, Quality), Outcome> {
    let (send, recv) = mpsc::channel();
    thread::Builder::new()
        .name(format!("bench-{}", algorithm.name()))
        .spawn(move || {
            let _ = send.send(measure(&spec, algorithm, &x, y.as_deref(), repeats));
        })
        .map_err(|e| Outcome::Failed(format!("cannot start worker: {e}")))?;
    match recv.recv_timeout(Duration::from_secs_f64(timeout_secs)) {
        Ok(result) => result.map_err(|e| Outcome::Failed(e.to_string())),
        Err(mpsc::RecvTimeoutError::Timeout) => Err(Outcome::Timeout),
        Err(mpsc::RecvTimeoutError::Disconnected) => Err(Outcome::Failed("worker panicked".into())),
    }
}

fn measure(
    spec: &EstimatorSpec,
    algorithm: Algorithm,
    x: &DataMatrix,
    y: Option<&LabelVector>,
    repeats: usize,
) -> learnkit::Result<(Vec<f64>, Quality)> {
    let targets = match (algorithm, y) {
        (Algorithm::LassoLars | Algorithm::ElasticNet, Some(y)) => Some(LabelVector::Real(y.to_real()?)),
        (Algorithm::Svc | Algorithm::Knn, Some(y)) => Some(y.clone()),
        _ => None,
    };
    let mut model = fit(spec, x, targets.as_ref(), None)?;
    let mut timings = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let start = Instant::now();
        model = fit(spec, x, targets.as_ref(), None)?;
        timings.push(start.elapsed().as_secs_f64().max(1e-9));
    }
    Ok((timings, quality(algorithm, &model, x, targets.as_ref())?))
}

fn quality(algorithm: Algorithm, model: &FittedModel, x: &DataMatrix, y: Option<&LabelVector>) -> learnkit::Result<Quality> {
    let q = |metric: &str, value: f64| Quality { metric: metric.into(), value };
    Ok(match (&model.state, y) {
        (ModelState::Pca(m), _) => q("explained_variance_ratio", m.explained_variance_ratio().iter().sum()),
        (ModelState::KMeans(m), _) => q("inertia", m.inertia),
        (_, Some(y)) if matches!(algorithm, Algorithm::Svc | Algorithm::Knn) => q("accuracy", score(model, x, y)?),
        (_, Some(y)) => q("r2", score(model, x, y)?),
        (_, None) => unreachable!("supervised fits require targets"),
    })
}

/// Median; the mean of the two middle values for even counts.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(median(&[7.0]), 7.0);
    }

    #[test]
    fn row_names_follow_the_parameters() {
        let mut p = BTreeMap::new();
        p.insert("n_components".to_string(), "9".to_string());
        assert_eq!(row_name(Algorithm::Pca, &p), "PCA (9 components)");
        p.insert("k".to_string(), "4".to_string());
        assert_eq!(row_name(Algorithm::KMeans, &p), "k-Means (4 clusters)");
    }
}
