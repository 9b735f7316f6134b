//! Cross-validation iterators, cross-validated scoring, grid search and
//! pipelines.
//!
//! Fold evaluations are independent tasks run on a rayon pool. Results are
//! always gathered in task order, so the worker count never changes a value.

mod pipeline;
mod search;
mod split;

pub use pipeline::{make_pipeline, pipeline};
pub use search::{cross_val_score, grid_search_fit, GridPoint, GridSearchResult, ParamGrid};
pub use split::{kfold, leave_one_out, stratified_kfold, SplitPlan};
