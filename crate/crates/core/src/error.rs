use std::fmt;

use thiserror::Error;

/// Partial state reported when an iterative solver hits its iteration cap.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub solver: &'static str,
    pub iterations: usize,
    /// Final value of the stopping metric (duality gap, KKT violation, ...).
    pub metric: f64,
    pub tolerance: f64,
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} stopped after {} iterations with metric {:.3e} (tol {:.3e})",
            self.solver, self.iterations, self.metric, self.tolerance
        )
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("empty input: {0}")]
    Empty(String),
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("unknown parameter `{name}` for estimator `{kind}`")]
    UnknownParam { kind: String, name: String },
    #[error("invalid value for parameter `{name}`: {reason}")]
    InvalidParam { name: String, reason: String },
    #[error("unsupported: {0}")]
    UnsupportedParam(String),
    #[error("estimator `{kind}` cannot {op}")]
    WrongCapability { kind: String, op: &'static str },
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("solver did not converge: {0}")]
    NotConverged(Diagnostics),
    #[error("only one class present in the training labels")]
    SingleClass,
    #[error("k = {k} exceeds the number of samples ({n_samples})")]
    KTooLarge { k: usize, n_samples: usize },
    #[error("invalid fold count k = {k} for n = {n}")]
    BadK { n: usize, k: usize },
    #[error("class `{class}` has {count} members, fewer than k = {k}")]
    ClassTooSmall { class: String, count: usize, k: usize },
    #[error("grid axis `{0}` does not name a parameter of the estimator")]
    UnknownAxis(String),
    #[error("pipeline step `{0}` is not a transformer")]
    NonTransformerStep(String),
    #[error("duplicate pipeline step name `{0}`")]
    DuplicateStepName(String),
    #[error("split {split}: {source}")]
    Fold { split: usize, source: Box<Error> },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Non-fatal conditions recorded on a fitted model.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// LARS excluded a feature that was exactly collinear with the active set.
    CollinearFeature { feature: usize },
    /// k-means was asked for more clusters than there are distinct points.
    DuplicateCollapse { requested: usize, distinct: usize },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::CollinearFeature { feature } => {
                write!(f, "feature {feature} is collinear with the active set; dropped")
            }
            Warning::DuplicateCollapse { requested, distinct } => write!(
                f,
                "requested {requested} clusters but only {distinct} distinct points exist"
            ),
        }
    }
}
