//! The sweep driver. Single-threaded; parallelism happens only inside the
//! parallel engine.

use std::collections::hash_map::DefaultHasher;
use std::fs;
use std::hash::{Hash, Hasher};
use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

use shardstock_core::{generate, run_apply, EngineKind, GenSpec, RunConfig};
use thiserror::Error;

use crate::sys;
use crate::table::{BenchTable, CellStatus, RowKey};

pub const DEFAULT_SIZES: [u64; 5] = [100_000, 500_000, 1_000_000, 1_500_000, 2_000_000];
pub const DEFAULT_BASELINE_CAP: u64 = 100_000;

/// Peak resident bytes per record for one run: input buffers, the store,
/// the parsed deltas and their routed copy, and the write-back buffer.
pub const BYTES_PER_RECORD_ESTIMATE: u64 = 320;

const WARMUP_RECORDS: u64 = 10_000;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("at least one record count is required")]
    NoSizes,
    #[error("at least one engine is required")]
    NoEngines,
    #[error("at least one thread count is required")]
    NoThreadCounts,
    #[error("thread counts must be at least 1")]
    ZeroThreads,
    #[error("benchmark work directory: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes: Vec<u64>,
    pub engines: Vec<EngineKind>,
    /// Applies to `memory_parallel`; the other engines run one row at n = 1.
    pub thread_counts: Vec<usize>,
    /// `disk_baseline` cells above this size are skipped.
    pub baseline_cap: u64,
    pub seed: u64,
    pub flush_every: usize,
    /// Runs per cell; the cell keeps the median.
    pub repeats: usize,
    pub warmup: bool,
    /// Scratch space for generated inputs. A temporary directory when unset.
    pub work_dir: Option<PathBuf>,
}

impl BenchConfig {
    pub fn new(sizes: Vec<u64>, engines: Vec<EngineKind>, thread_counts: Vec<usize>) -> Self {
        Self {
            sizes,
            engines,
            thread_counts,
            baseline_cap: DEFAULT_BASELINE_CAP,
            seed: 0x5EED,
            flush_every: 1,
            repeats: 1,
            warmup: true,
            work_dir: None,
        }
    }

    fn validate(&self) -> Result<(), BenchError> {
        if self.sizes.is_empty() {
            return Err(BenchError::NoSizes);
        }
        if self.engines.is_empty() {
            return Err(BenchError::NoEngines);
        }
        if self.thread_counts.is_empty() {
            return Err(BenchError::NoThreadCounts);
        }
        if self.thread_counts.contains(&0) {
            return Err(BenchError::ZeroThreads);
        }
        Ok(())
    }

    pub fn rows(&self) -> Vec<RowKey> {
        let mut rows = Vec::new();
        for &engine in &self.engines {
            let threads: &[usize] = match engine {
                EngineKind::MemoryParallel => &self.thread_counts,
                _ => &[1],
            };
            for &t in threads {
                let row = RowKey::new(engine, t);
                if !rows.contains(&row) {
                    rows.push(row);
                }
            }
        }
        rows
    }

    /// Seed for the inputs of one column.
    pub fn seed_for(&self, size: u64) -> u64 {
        self.seed ^ size
    }
}

struct Inputs {
    dataset: PathBuf,
    stock: PathBuf,
    out: PathBuf,
}

fn write_inputs(dir: &Path, count: u64, seed: u64) -> Result<Inputs, String> {
    let files = generate(&GenSpec::new(count, seed)).map_err(|e| e.to_string())?;
    let inputs = Inputs {
        dataset: dir.join(format!("dataset-{count}.csv")),
        stock: dir.join(format!("stock-{count}.dat")),
        out: dir.join(format!("out-{count}")),
    };
    fs::write(&inputs.dataset, files.dataset_csv).map_err(|e| e.to_string())?;
    fs::write(&inputs.stock, files.stock).map_err(|e| e.to_string())?;
    Ok(inputs)
}

fn remove_inputs(inputs: &Inputs) {
    for p in [&inputs.dataset, &inputs.stock, &inputs.out] {
        let _ = fs::remove_file(p);
    }
}

fn run_once(cfg: &BenchConfig, row: RowKey, inputs: &Inputs) -> Result<(Duration, u64), String> {
    let report = run_apply(&RunConfig {
        engine: row.engine,
        dataset: inputs.dataset.clone(),
        stock: inputs.stock.clone(),
        out: inputs.out.clone(),
        threads: row.threads,
        insert_missing: false,
        flush_every: cfg.flush_every,
    })
    .map_err(|e| e.to_string())?;
    let output = fs::read(&inputs.out).map_err(|e| e.to_string())?;
    let mut h = DefaultHasher::new();
    output.hash(&mut h);
    Ok((report.total, h.finish()))
}

fn median(mut samples: Vec<Duration>) -> Duration {
    samples.sort_unstable();
    samples[samples.len() / 2]
}

fn run_cell(cfg: &BenchConfig, row: RowKey, size: u64, inputs: &Inputs) -> CellStatus {
    if row.engine == EngineKind::DiskBaseline && size > cfg.baseline_cap {
        return CellStatus::Skipped(format!("above baseline cap {}", cfg.baseline_cap));
    }
    let need = size.saturating_mul(BYTES_PER_RECORD_ESTIMATE);
    if let Some(available) = sys::available_memory_bytes() {
        if need > available {
            return CellStatus::Failed(format!(
                "insufficient memory: need ~{} MiB, {} MiB available",
                need >> 20,
                available >> 20
            ));
        }
    }
    let mut samples = Vec::with_capacity(cfg.repeats.max(1));
    let mut fingerprint = None;
    for _ in 0..cfg.repeats.max(1) {
        match run_once(cfg, row, inputs) {
            Ok((elapsed, hash)) => {
                if *fingerprint.get_or_insert(hash) != hash {
                    return CellStatus::Failed("output differs between repeats".into());
                }
                samples.push(elapsed);
            }
            Err(e) => return CellStatus::Failed(e),
        }
    }
    CellStatus::Done(median(samples))
}

/// Runs every (row, size) cell. Cells that cannot run are recorded as
/// skipped or failed and the sweep continues.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchTable, BenchError> {
    cfg.validate()?;
    let scratch = match &cfg.work_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            tempfile::tempdir_in(dir)?
        }
        None => tempfile::tempdir()?,
    };
    let rows = cfg.rows();
    let mut table = BenchTable::new(cfg.sizes.clone());
    for &row in &rows {
        table.add_row(row);
    }

    if cfg.warmup {
        let smallest = cfg.sizes.iter().copied().min().unwrap_or(0);
        let warm = smallest.min(WARMUP_RECORDS);
        if let Ok(inputs) = write_inputs(scratch.path(), warm, cfg.seed_for(warm)) {
            let mut warmed = Vec::new();
            for &row in &rows {
                if !warmed.contains(&row.engine) {
                    warmed.push(row.engine);
                    let _ = run_once(cfg, row, &inputs);
                }
            }
            remove_inputs(&inputs);
        }
    }

    for &size in &cfg.sizes {
        let inputs = match write_inputs(scratch.path(), size, cfg.seed_for(size)) {
            Ok(inputs) => inputs,
            Err(e) => {
                for &row in &rows {
                    table.set(
                        row,
                        size,
                        CellStatus::Failed(format!("input generation: {e}")),
                    );
                }
                continue;
            }
        };
        for &row in &rows {
            table.set(row, size, run_cell(cfg, row, size, &inputs));
        }
        remove_inputs(&inputs);
    }
    Ok(table)
}
