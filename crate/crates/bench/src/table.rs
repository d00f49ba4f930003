use std::time::Duration;

use shardstock_core::EngineKind;

/// One table row: an engine at a thread count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RowKey {
    pub engine: EngineKind,
    pub threads: usize,
}

impl RowKey {
    pub fn new(engine: EngineKind, threads: usize) -> Self {
        Self { engine, threads }
    }

    pub fn label(&self) -> String {
        match self.engine {
            EngineKind::MemoryParallel => format!("{} (n={})", self.engine, self.threads),
            _ => self.engine.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellStatus {
    Done(Duration),
    Skipped(String),
    Failed(String),
}

impl CellStatus {
    pub fn name(&self) -> &'static str {
        match self {
            CellStatus::Done(_) => "ok",
            CellStatus::Skipped(_) => "skipped",
            CellStatus::Failed(_) => "failed",
        }
    }

    pub fn duration(&self) -> Option<Duration> {
        match self {
            CellStatus::Done(d) => Some(*d),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchCell {
    pub row: RowKey,
    pub records: u64,
    pub status: CellStatus,
}

/// Rows are engine/thread pairs in first-seen order; columns are record
/// counts in the order given.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BenchTable {
    sizes: Vec<u64>,
    rows: Vec<RowKey>,
    cells: Vec<BenchCell>,
}

impl BenchTable {
    pub fn new(sizes: Vec<u64>) -> Self {
        Self {
            sizes,
            rows: Vec::new(),
            cells: Vec::new(),
        }
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn rows(&self) -> &[RowKey] {
        &self.rows
    }

    pub fn add_row(&mut self, row: RowKey) {
        if !self.rows.contains(&row) {
            self.rows.push(row);
        }
    }

    /// Sets a cell, replacing any previous status. Unknown rows are
    /// appended; `records` must be one of the table's sizes.
    pub fn set(&mut self, row: RowKey, records: u64, status: CellStatus) {
        assert!(self.sizes.contains(&records), "{records} is not a column");
        self.add_row(row);
        if let Some(cell) = self
            .cells
            .iter_mut()
            .find(|c| c.row == row && c.records == records)
        {
            cell.status = status;
            return;
        }
        self.cells.push(BenchCell {
            row,
            records,
            status,
        });
        let (rows, sizes) = (&self.rows, &self.sizes);
        self.cells.sort_by_key(|c| {
            (
                rows.iter().position(|r| *r == c.row),
                sizes.iter().position(|s| *s == c.records),
            )
        });
    }

    pub fn status(&self, row: &RowKey, records: u64) -> Option<&CellStatus> {
        self.cells
            .iter()
            .find(|c| c.row == *row && c.records == records)
            .map(|c| &c.status)
    }

    /// Row-major, in row and column order.
    pub fn cells(&self) -> &[BenchCell] {
        &self.cells
    }

    /// Every (row, size) pair has a status.
    pub fn is_complete(&self) -> bool {
        self.rows
            .iter()
            .all(|r| self.sizes.iter().all(|&s| self.status(r, s).is_some()))
    }
}
