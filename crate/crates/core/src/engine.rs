//! Apply strategies for a batch of stock deltas.
//!
//! * [`apply_serial`] walks the stream in order on one thread. It defines
//!   the expected result for every other engine.
//! * [`apply_parallel`] routes deltas into one queue per shard, then runs
//!   one worker per shard. Workers share nothing: worker `j` owns shard `j`
//!   and queue `j` outright, and a key's deltas all land in one queue, so
//!   per-key stream order survives.
//! * [`apply_disk_baseline`] updates a sorted fixed-width file in place,
//!   one binary search and one overwrite per delta, with a durability
//!   flush every `flush_every` updates.

use std::fmt;
use std::fs::{self, OpenOptions};
use std::io::{Read, Seek, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::thread;
use std::time::{Duration, Instant};

use crate::codec::{
    decode_fixed_store, is_fixed_store, load_dataset_csv, parse_stock_stream, write_dataset_csv,
    write_fixed_store, write_records_csv, FixedStore, StockParseReport, SyncData,
};
use crate::error::{CodecError, EngineError};
use crate::partition::partition_key;
use crate::store::{apply_delta_to_shard, ApplyReport, ShardedStore};
use crate::types::{DeltaEntry, Record};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EngineKind {
    MemorySerial,
    MemoryParallel,
    DiskBaseline,
}

impl EngineKind {
    pub const ALL: [EngineKind; 3] = [
        EngineKind::MemorySerial,
        EngineKind::MemoryParallel,
        EngineKind::DiskBaseline,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EngineKind::MemorySerial => "memory_serial",
            EngineKind::MemoryParallel => "memory_parallel",
            EngineKind::DiskBaseline => "disk_baseline",
        }
    }

    pub fn is_memory(self) -> bool {
        !matches!(self, EngineKind::DiskBaseline)
    }
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownEngine(pub String);

impl fmt::Display for UnknownEngine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown engine {:?} (expected memory_serial, memory_parallel or disk_baseline)",
            self.0
        )
    }
}

impl std::error::Error for UnknownEngine {}

impl FromStr for EngineKind {
    type Err = UnknownEngine;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "memory_serial" | "serial" => Ok(EngineKind::MemorySerial),
            "memory_parallel" | "parallel" => Ok(EngineKind::MemoryParallel),
            "disk_baseline" | "disk" => Ok(EngineKind::DiskBaseline),
            _ => Err(UnknownEngine(s.to_string())),
        }
    }
}

/// One queue per shard; queue `j` holds exactly the deltas whose key
/// partitions to `j`, in stream order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutedDeltas {
    queues: Vec<Vec<DeltaEntry>>,
}

impl RoutedDeltas {
    pub fn queues(&self) -> &[Vec<DeltaEntry>] {
        &self.queues
    }

    pub fn into_queues(self) -> Vec<Vec<DeltaEntry>> {
        self.queues
    }

    pub fn total(&self) -> usize {
        self.queues.iter().map(Vec::len).sum()
    }
}

/// Single pass over `deltas`, stable within each queue.
///
/// Panics if `shards` is zero.
pub fn route_deltas(deltas: &[DeltaEntry], shards: usize) -> RoutedDeltas {
    assert!(shards >= 1, "shard count must be at least 1");
    let expected = deltas.len() / shards + deltas.len() / (shards * 16) + 1;
    let mut queues: Vec<Vec<DeltaEntry>> =
        (0..shards).map(|_| Vec::with_capacity(expected)).collect();
    for d in deltas {
        queues[partition_key(&d.key, shards)].push(*d);
    }
    RoutedDeltas { queues }
}

/// Applies `deltas` strictly in stream order.
pub fn apply_serial(
    store: &mut ShardedStore,
    deltas: &[DeltaEntry],
    insert_missing: bool,
) -> ApplyReport {
    let started = Instant::now();
    let mut report = ApplyReport::default();
    for d in deltas {
        report.record(store.apply(d, insert_missing));
    }
    report.wall_clock = started.elapsed();
    report
}

/// Routes, then runs one worker thread per shard and joins them.
/// `wall_clock` covers routing, apply and join.
pub fn apply_parallel(
    store: &mut ShardedStore,
    deltas: &[DeltaEntry],
    workers: usize,
    insert_missing: bool,
) -> Result<ApplyReport, EngineError> {
    if workers == 0 {
        return Err(EngineError::ZeroWorkers);
    }
    if workers != store.shard_count() {
        return Err(EngineError::ShardWorkerMismatch {
            shards: store.shard_count(),
            workers,
        });
    }
    let started = Instant::now();
    let routed = route_deltas(deltas, workers);

    let per_worker: Vec<ApplyReport> = thread::scope(|scope| {
        let handles: Vec<_> = store
            .shards_mut()
            .iter_mut()
            .zip(routed.queues())
            .map(|(shard, queue)| {
                scope.spawn(move || {
                    let mut report = ApplyReport::default();
                    for d in queue {
                        report.record(apply_delta_to_shard(shard, d, insert_missing));
                    }
                    report
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("apply worker panicked"))
            .collect()
    });

    let mut report = ApplyReport::default();
    for r in &per_worker {
        report.merge_counts(r);
    }
    report.wall_clock = started.elapsed();
    Ok(report)
}

/// Seek-based in-place updates against a fixed store. Missing keys are
/// counted and never inserted. `flush_every = K` forces a durability flush
/// after every K updates; `0` flushes only once at the end.
pub fn apply_disk_baseline<F>(
    store: &mut FixedStore<F>,
    deltas: &[DeltaEntry],
    flush_every: usize,
) -> Result<ApplyReport, EngineError>
where
    F: Read + Write + Seek + SyncData,
{
    let started = Instant::now();
    let mut report = ApplyReport::default();
    let mut since_flush = 0usize;
    for d in deltas {
        report.total_deltas += 1;
        let Some(index) = store.find(&d.key)? else {
            report.missing_key += 1;
            continue;
        };
        store.overwrite_record(index, d.new_price, d.new_quantity)?;
        report.applied += 1;
        since_flush += 1;
        if flush_every != 0 && since_flush == flush_every {
            store.sync()?;
            since_flush = 0;
        }
    }
    if since_flush > 0 {
        store.sync()?;
    }
    report.wall_clock = started.elapsed();
    Ok(report)
}

/// Dataset rows from either a CSV or a fixed store image, detected by magic.
#[derive(Debug, Clone, Default)]
pub struct DatasetLoad {
    pub records: Vec<Record>,
    pub malformed: u64,
}

impl DatasetLoad {
    pub fn malformed_ratio(&self) -> f64 {
        let attempted = self.records.len() as u64 + self.malformed;
        if attempted == 0 {
            0.0
        } else {
            self.malformed as f64 / attempted as f64
        }
    }
}

pub fn load_dataset_bytes(bytes: &[u8]) -> Result<DatasetLoad, CodecError> {
    if is_fixed_store(bytes) {
        return Ok(DatasetLoad {
            records: decode_fixed_store(bytes)?,
            malformed: 0,
        });
    }
    let csv = load_dataset_csv(bytes)?;
    Ok(DatasetLoad {
        records: csv.records,
        malformed: csv.malformed,
    })
}

/// Sorts by key and keeps the last occurrence of each key. Returns the
/// number of dropped duplicates.
pub fn dedupe_last_wins(records: &mut Vec<Record>) -> usize {
    let before = records.len();
    // stable sort keeps input order within equal keys
    records.sort_by_key(|r| r.key);
    let mut out: Vec<Record> = Vec::with_capacity(records.len());
    for r in records.drain(..) {
        match out.last_mut() {
            Some(last) if last.key == r.key => *last = r,
            _ => out.push(r),
        }
    }
    *records = out;
    before - records.len()
}

/// Canonical CSV for a dataset image in either format, for comparing
/// outputs of different engines.
pub fn canonical_dataset(bytes: &[u8]) -> Result<Vec<u8>, CodecError> {
    let mut load = load_dataset_bytes(bytes)?;
    dedupe_last_wins(&mut load.records);
    Ok(write_records_csv(&load.records))
}

pub fn csv_to_fixed(csv: &[u8]) -> Result<Vec<u8>, CodecError> {
    let mut load = load_dataset_csv(csv)?;
    dedupe_last_wins(&mut load.records);
    write_fixed_store(&load.records)
}

pub fn fixed_to_csv(fixed: &[u8]) -> Result<Vec<u8>, CodecError> {
    let records = decode_fixed_store(fixed)?;
    Ok(write_records_csv(&records))
}

/// Everything `run_apply` needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub engine: EngineKind,
    pub dataset: PathBuf,
    pub stock: PathBuf,
    pub out: PathBuf,
    /// Shard count and, for `memory_parallel`, worker count.
    pub threads: usize,
    pub insert_missing: bool,
    pub flush_every: usize,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub engine: EngineKind,
    pub threads: usize,
    pub apply: ApplyReport,
    pub records_loaded: usize,
    pub records_written: usize,
    pub duplicate_keys: usize,
    pub dataset_malformed: u64,
    pub dataset_malformed_ratio: f64,
    pub stock: StockSummary,
    pub load: Duration,
    pub write_back: Duration,
    pub total: Duration,
}

impl RunReport {
    pub fn apply_time(&self) -> Duration {
        self.apply.wall_clock
    }
}

#[derive(Debug, Clone, Default)]
pub struct StockSummary {
    pub malformed: u64,
    pub malformed_ratio: f64,
    pub malformed_samples: Vec<(usize, crate::codec::StockFault)>,
}

impl From<&StockParseReport> for StockSummary {
    fn from(r: &StockParseReport) -> Self {
        Self {
            malformed: r.malformed,
            malformed_ratio: r.malformed_ratio(),
            malformed_samples: r.malformed_samples.clone(),
        }
    }
}

fn read_path(path: &Path) -> Result<Vec<u8>, EngineError> {
    fs::read(path).map_err(|source| path_error(path, source))
}

fn path_error(path: &Path, source: std::io::Error) -> EngineError {
    EngineError::Path {
        path: path.display().to_string(),
        source,
    }
}

/// Load, apply with the chosen engine, write back.
///
/// Memory engines write canonical CSV to `out`. The disk baseline writes
/// the dataset as a fixed store to `out` during load and updates it there.
pub fn run_apply(cfg: &RunConfig) -> Result<RunReport, EngineError> {
    if cfg.threads == 0 {
        return Err(EngineError::ZeroWorkers);
    }
    let started = Instant::now();
    let dataset = read_path(&cfg.dataset)?;
    let mut loaded = load_dataset_bytes(&dataset)?;
    drop(dataset);
    let dataset_malformed = loaded.malformed;
    let dataset_malformed_ratio = loaded.malformed_ratio();
    let stock_bytes = read_path(&cfg.stock)?;
    let parsed = parse_stock_stream(&stock_bytes);
    drop(stock_bytes);
    let stock = StockSummary::from(&parsed);
    let records_loaded = loaded.records.len();

    let (apply, duplicate_keys, records_written, load, write_back) = if cfg.engine.is_memory() {
        let (mut store, duplicates) =
            ShardedStore::build(std::mem::take(&mut loaded.records), cfg.threads)?;
        let load = started.elapsed();
        let apply = match cfg.engine {
            EngineKind::MemoryParallel => {
                apply_parallel(&mut store, &parsed.entries, cfg.threads, cfg.insert_missing)?
            }
            _ => apply_serial(&mut store, &parsed.entries, cfg.insert_missing),
        };
        let wb_started = Instant::now();
        let csv = write_dataset_csv(&store);
        fs::write(&cfg.out, csv).map_err(|e| path_error(&cfg.out, e))?;
        (apply, duplicates, store.len(), load, wb_started.elapsed())
    } else {
        let duplicates = dedupe_last_wins(&mut loaded.records);
        let image = write_fixed_store(&loaded.records)?;
        let written = loaded.records.len();
        drop(loaded);
        fs::write(&cfg.out, image).map_err(|e| path_error(&cfg.out, e))?;
        let file = OpenOptions::new()
            .read(true)
            .write(true)
            .open(&cfg.out)
            .map_err(|e| path_error(&cfg.out, e))?;
        let mut fixed = FixedStore::open(file)?;
        fixed.sync()?;
        let load = started.elapsed();
        let apply = apply_disk_baseline(&mut fixed, &parsed.entries, cfg.flush_every)?;
        // updates already live in the file; write-back is the closing barrier
        let wb_started = Instant::now();
        fixed.sync()?;
        (apply, duplicates, written, load, wb_started.elapsed())
    };

    Ok(RunReport {
        engine: cfg.engine,
        threads: cfg.threads,
        apply,
        records_loaded,
        records_written,
        duplicate_keys,
        dataset_malformed,
        dataset_malformed_ratio,
        stock,
        load,
        write_back,
        total: started.elapsed(),
    })
}
