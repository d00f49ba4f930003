//! Byte-exact readers and writers for the three on-disk formats:
//! the `$`-delimited stock stream, the dataset CSV, and the fixed-width
//! binary store used by the disk baseline.

mod csv;
mod fixed;
mod stock;

pub use self::csv::{
    load_dataset_csv, write_dataset_csv, write_records_csv, CsvLoad, DATASET_HEADER,
};
pub use self::fixed::{
    decode_fixed_record, decode_fixed_store, encode_fixed_record, is_fixed_store,
    write_fixed_store, FixedStore, SyncData, FIXED_HEADER_LEN, FIXED_MAGIC, FIXED_RECORD_LEN,
};
pub use self::stock::{
    parse_stock_stream, serialize_stock, ByteCoverage, StockFault, StockParseReport, MAX_SAMPLES,
};
