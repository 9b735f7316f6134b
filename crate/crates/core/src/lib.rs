//! Estimators over dense matrices with a uniform `fit` / `predict` /
//! `transform` / `score` interface, plus cross-validation, grid search and
//! pipelines.
//!
//! ```
//! use learnkit::{fit, predict, DataMatrix, EstimatorKind, EstimatorSpec, LabelVector};
//!
//! let x = DataMatrix::from_rows(&[[0.0, 0.0], [0.1, 0.2], [5.0, 5.0], [5.1, 4.9]]).unwrap();
//! let y = LabelVector::classes(["a", "a", "b", "b"]);
//! let spec = EstimatorSpec::new(EstimatorKind::Knn).with("k", 1).unwrap();
//! let model = fit(&spec, &x, Some(&y), None).unwrap();
//! assert_eq!(predict(&model, &x).unwrap(), y);
//! ```

pub mod cluster;
pub mod data;
pub mod decomposition;
pub mod error;
pub mod estimator;
mod linalg;
pub mod linear;
pub mod model_selection;
pub mod neighbors;
pub mod params;
pub mod svm;

pub use data::{ClassLabels, DataMatrix, LabelVector};
pub use error::{Diagnostics, Error, Result, Warning};
pub use estimator::{fit, predict, score, transform, FittedEstimator, FittedModel, ModelState};
pub use params::{EstimatorKind, EstimatorSpec, ParamValue};
