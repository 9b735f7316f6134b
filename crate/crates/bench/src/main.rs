use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use learnkit_bench::{make_madelon, read_jsonl, render_table, run_bench, write_csv, BenchConfig, BenchRecord, MadelonSpec};
use log::info;

#[derive(Parser)]
#[command(name = "bench", about = "Time learnkit estimators on Madelon-style data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the tasks of a config file and print the timing table.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Generate the full 4400 x 500 data set instead of the quarter scale.
        #[arg(long)]
        full: bool,
        /// Write records here, overriding `output` in the config.
        #[arg(long)]
        records: Option<PathBuf>,
        /// Run tasks concurrently.
        #[arg(long)]
        parallel: bool,
    },
    /// Write a synthetic Madelon data set as CSV with a trailing `y` column.
    Generate {
        #[arg(long, required = true)]
        madelon: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        full: bool,
    },
    /// Render the table for a records file.
    Table {
        #[arg(long)]
        records: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Some(threads) = std::env::var("BENCH_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: BENCH_THREADS: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(command: Command) -> learnkit_bench::Result<ExitCode> {
    match command {
        Command::Run { config, full, records, parallel } => {
            let mut cfg = BenchConfig::load(&config)?;
            if full {
                cfg.full_scale();
            }
            if records.is_some() {
                cfg.output = records;
            }
            cfg.parallel |= parallel;
            let run = run_bench(&cfg)?;
            print!("{}", run.table);
            if let Some(path) = &cfg.output {
                info!("records written to {}", path.display());
            }
            Ok(if run.n_failed() == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Generate { madelon: _, seed, out, full } => {
            let base = if full { MadelonSpec::default() } else { MadelonSpec::quarter() };
            let spec = MadelonSpec { seed, ..base };
            let (x, y) = make_madelon(&spec)?;
            write_csv(&out, &x, Some(&y))?;
            info!("wrote {} to {}", spec.shape(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Table { records } => {
            let records: Vec<BenchRecord> = read_jsonl(&records)?;
            print!("{}", render_table(&records));
            Ok(if records.iter().all(|r| !r.failed()) { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}
