//! Benchmark harness for `learnkit`: a Madelon-style data generator, CSV and
//! svmlight loaders, a flat config format and a runner that times fits of
//! the six benchmarked estimators.

pub mod config;
pub mod error;
pub mod io;
pub mod madelon;
pub mod report;
pub mod runner;

pub use config::{Algorithm, BenchConfig, DatasetSource, Task};
pub use error::{BenchError, Result};
pub use io::{load_csv, load_svmlight, read_jsonl, write_csv, write_jsonl, LabelColumn};
pub use madelon::{make_madelon, MadelonSpec};
pub use report::render_table;
pub use runner::{run_bench, BenchRecord, BenchRun, Quality, Status};
