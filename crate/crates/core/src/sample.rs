//! The fifteen-row inventory sample and the canonical stock-line example.
//! Handy for smoke tests and documentation.

use crate::types::{Isbn13Key, Price, Quantity, Record};

pub const SAMPLE_DATASET_CSV: &str = "\
bo_ISBN13,bo_price,bo_quantity
9780000004381,1.16,91
9780000010457,2.42,424
9780000012128,1.71,445
9780000015225,1.05,134
9780000018556,0.31,408
9780000031562,5.01,237
9780000033317,2.42,496
9780000034711,1.11,193
9780000036146,7.63,400
9780000036886,7.67,69
9780000044323,4.86,120
9780000055263,6.74,339
9780000058436,1.05,348
9780000063175,3.52,399
9780000082215,2.58,166
";

pub const SAMPLE_STOCK_LINE: &str = "9783652774577$3.93$495$";

const SAMPLE_ROWS: [(&str, u32, u32); 15] = [
    ("9780000004381", 116, 91),
    ("9780000010457", 242, 424),
    ("9780000012128", 171, 445),
    ("9780000015225", 105, 134),
    ("9780000018556", 31, 408),
    ("9780000031562", 501, 237),
    ("9780000033317", 242, 496),
    ("9780000034711", 111, 193),
    ("9780000036146", 763, 400),
    ("9780000036886", 767, 69),
    ("9780000044323", 486, 120),
    ("9780000055263", 674, 339),
    ("9780000058436", 105, 348),
    ("9780000063175", 352, 399),
    ("9780000082215", 258, 166),
];

/// The sample rows as typed records, in key order.
pub fn sample_records() -> Vec<Record> {
    SAMPLE_ROWS
        .iter()
        .map(|&(k, p, q)| {
            Record::new(
                k.parse::<Isbn13Key>().expect("valid sample key"),
                Price::from_cents(p).expect("valid sample price"),
                Quantity::new(q).expect("valid sample quantity"),
            )
        })
        .collect()
}
