//! Benchmark sweeps over record counts, engines and thread counts, with
//! text, CSV and SVG reports.

pub mod render;
pub mod runner;
pub mod sys;
pub mod table;

pub use render::{format_hms, parse_hms, render_csv, render_histogram_svg, render_table};
pub use runner::{run_benchmark, BenchConfig, BenchError, DEFAULT_BASELINE_CAP, DEFAULT_SIZES};
pub use table::{BenchCell, BenchTable, CellStatus, RowKey};
