use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use shardstock_core::EngineKind;

pub const THREADS_ENV: &str = "SHARDSTOCK_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "shardstock",
    version,
    about = "Sharded in-memory batch updates for inventory data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a dataset CSV and a full-coverage stock file.
    Gen(GenArgs),
    /// Apply a stock file to a dataset with one engine and write the result.
    Apply(ApplyArgs),
    /// Sweep record counts, engines and thread counts; print a timing table.
    Bench(BenchArgs),
    /// Run all three engines on one generated pair and compare the results.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Number of records.
    #[arg(long, default_value_t = 10_000)]
    pub count: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output prefix; writes <prefix>.csv and <prefix>.dat.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ApplyArgs {
    #[arg(long, default_value = "memory_parallel")]
    pub engine: EngineKind,
    /// Shard and worker count. Defaults to the logical CPU count.
    #[arg(long, env = THREADS_ENV, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
    /// Dataset CSV (or fixed store image).
    #[arg(long)]
    pub dataset: PathBuf,
    /// Stock file.
    #[arg(long)]
    pub stock: PathBuf,
    /// Write-back path: CSV for memory engines, fixed store for disk_baseline.
    #[arg(long)]
    pub out: PathBuf,
    /// Insert rows for stock keys missing from the dataset.
    #[arg(long)]
    pub insert_missing: bool,
    /// disk_baseline: durability flush every K updates (0 = only at the end).
    #[arg(long, default_value_t = 1)]
    pub flush_every: usize,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated record counts.
    #[arg(long, value_delimiter = ',', default_values_t = shardstock_bench::DEFAULT_SIZES)]
    pub sizes: Vec<u64>,
    /// Comma-separated engines.
    #[arg(long = "engine", value_delimiter = ',', default_values_t = [EngineKind::MemorySerial, EngineKind::MemoryParallel])]
    pub engines: Vec<EngineKind>,
    /// Comma-separated thread counts for memory_parallel.
    #[arg(long, env = THREADS_ENV, value_delimiter = ',')]
    pub threads: Vec<usize>,
    /// Largest record count run through disk_baseline.
    #[arg(long, default_value_t = shardstock_bench::DEFAULT_BASELINE_CAP)]
    pub baseline_cap: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub flush_every: usize,
    /// Runs per cell; the median is reported.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub repeats: u64,
    /// Report prefix; writes <prefix>.csv and <prefix>.svg.
    #[arg(long, default_value = "bench")]
    pub out: PathBuf,
    /// Scratch directory for generated inputs.
    #[arg(long)]
    pub work_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Number of generated records.
    #[arg(long, visible_alias = "size", default_value_t = 10_000)]
    pub count: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, env = THREADS_ENV, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub flush_every: usize,
    /// Keep inputs and outputs here instead of a temporary directory.
    #[arg(long)]
    pub work_dir: Option<PathBuf>,
}
