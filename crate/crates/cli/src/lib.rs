//! Command implementations behind the `shardstock` binary.
//!
//! Exit codes: 0 success, 1 semantic failure (verification mismatch or
//! more than half of an input malformed), 2 environment or I/O failure.
//! Stdout starts with `key=value` lines; timing keys are prefixed
//! `timing.` so they can be filtered out when comparing runs.

pub mod args;
mod verify;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use shardstock_bench::{
    format_hms, render_csv, render_histogram_svg, render_table, run_benchmark, BenchConfig,
};
use shardstock_core::{generate, run_apply, EngineError, GenSpec, RunConfig, RunReport};
use thiserror::Error;

pub use crate::args::{Cli, Command};
pub use crate::verify::{cmd_verify, cmd_verify_with, EngineRunner, StandardRunner};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SEMANTIC: i32 = 1;
pub const EXIT_ENVIRONMENT: i32 = 2;

/// Inputs where more than this fraction of entries are malformed fail
/// with exit code 1.
pub const MALFORMED_LIMIT: f64 = 0.5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Gen(#[from] shardstock_core::GenError),
    #[error(transparent)]
    Bench(#[from] shardstock_bench::BenchError),
    #[error("{0}")]
    Semantic(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Semantic(_) => EXIT_SEMANTIC,
            _ => EXIT_ENVIRONMENT,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub(crate) fn resolve_threads(flag: Option<u64>) -> usize {
    flag.map(|t| t as usize)
        .unwrap_or_else(shardstock_bench::sys::logical_cpus)
}

fn with_extension(prefix: &Path, ext: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(".");
    name.push(ext);
    PathBuf::from(name)
}

/// Dispatches one parsed command line, writing the report to `out` and
/// diagnostics to `err`. Returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(&a, out),
        Command::Apply(a) => cmd_apply(&a, out),
        Command::Bench(a) => cmd_bench(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "shardstock: {e}");
            e.exit_code()
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(io_err(Path::new("<stdout>")))
}

pub fn cmd_gen(a: &args::GenArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let files = generate(&GenSpec::new(a.count, a.seed))?;
    let csv = with_extension(&a.out, "csv");
    let dat = with_extension(&a.out, "dat");
    fs::write(&csv, &files.dataset_csv).map_err(io_err(&csv))?;
    fs::write(&dat, &files.stock).map_err(io_err(&dat))?;
    emit(
        out,
        &format!(
            "records={}\nseed={}\ndataset={}\ndataset_bytes={}\nstock={}\nstock_bytes={}\n",
            a.count,
            a.seed,
            csv.display(),
            files.dataset_csv.len(),
            dat.display(),
            files.stock.len()
        ),
    )
}

fn phase_table(rows: &[(&str, Duration)]) -> String {
    let mut text = format!("{:<12}{:<14}{:>10}\n", "phase", "elapsed", "millis");
    for (name, d) in rows {
        text.push_str(&format!(
            "{:<12}{:<14}{:>10}\n",
            name,
            format_hms(d.as_millis()),
            d.as_millis()
        ));
    }
    text
}

pub fn render_run_report(report: &RunReport, out_path: &Path) -> String {
    let a = &report.apply;
    let mut text = format!(
        "engine={}\nthreads={}\nrecords_loaded={}\nduplicate_keys={}\ndataset_malformed={}\nstock_malformed={}\n\
         applied={} missing={} inserted={} total_deltas={}\nrecords_written={}\nout={}\n",
        report.engine,
        report.threads,
        report.records_loaded,
        report.duplicate_keys,
        report.dataset_malformed,
        report.stock.malformed,
        a.applied,
        a.missing_key,
        a.inserted,
        a.total_deltas,
        report.records_written,
        out_path.display(),
    );
    for (offset, fault) in &report.stock.malformed_samples {
        text.push_str(&format!("stock_malformed_at={offset} reason=\"{fault}\"\n"));
    }
    text.push_str(&format!(
        "timing.load_ms={}\ntiming.apply_ms={}\ntiming.write_back_ms={}\ntiming.total_ms={}\n\n",
        report.load.as_millis(),
        report.apply_time().as_millis(),
        report.write_back.as_millis(),
        report.total.as_millis()
    ));
    text.push_str(&phase_table(&[
        ("load", report.load),
        ("apply", report.apply_time()),
        ("write-back", report.write_back),
        ("total", report.total),
    ]));
    text
}

pub fn cmd_apply(a: &args::ApplyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let report = run_apply(&RunConfig {
        engine: a.engine,
        dataset: a.dataset.clone(),
        stock: a.stock.clone(),
        out: a.out.clone(),
        threads: resolve_threads(a.threads),
        insert_missing: a.insert_missing,
        flush_every: a.flush_every,
    })?;
    emit(out, &render_run_report(&report, &a.out))?;
    if report.stock.malformed_ratio > MALFORMED_LIMIT {
        return Err(CliError::Semantic(format!(
            "{:.0}% of stock entries are malformed",
            report.stock.malformed_ratio * 100.0
        )));
    }
    if report.dataset_malformed_ratio > MALFORMED_LIMIT {
        return Err(CliError::Semantic(format!(
            "{:.0}% of dataset rows are malformed",
            report.dataset_malformed_ratio * 100.0
        )));
    }
    Ok(())
}

pub fn cmd_bench(a: &args::BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let threads = if a.threads.is_empty() {
        vec![shardstock_bench::sys::logical_cpus()]
    } else {
        a.threads.clone()
    };
    let mut cfg = BenchConfig::new(a.sizes.clone(), a.engines.clone(), threads);
    cfg.baseline_cap = a.baseline_cap;
    cfg.seed = a.seed;
    cfg.flush_every = a.flush_every;
    cfg.repeats = a.repeats as usize;
    cfg.work_dir = a.work_dir.clone();
    let table = run_benchmark(&cfg)?;

    let csv_path = with_extension(&a.out, "csv");
    let svg_path = with_extension(&a.out, "svg");
    fs::write(&csv_path, render_csv(&table)).map_err(io_err(&csv_path))?;
    fs::write(&svg_path, render_histogram_svg(&table)).map_err(io_err(&svg_path))?;
    let mut text = String::new();
    for cell in table.cells() {
        let millis = cell
            .status
            .duration()
            .map(|d| d.as_millis().to_string())
            .unwrap_or_default();
        text.push_str(&format!(
            "timing.cell engine={} threads={} records={} millis={} status={}\n",
            cell.row.engine,
            cell.row.threads,
            cell.records,
            millis,
            cell.status.name()
        ));
    }
    text.push_str(&format!(
        "csv={}\nsvg={}\n\n",
        csv_path.display(),
        svg_path.display()
    ));
    text.push_str(&render_table(&table));
    emit(out, &text)
}
