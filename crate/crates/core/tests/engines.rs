use std::collections::HashMap;
use std::fs;
use std::io::Cursor;

use proptest::prelude::*;
use proptest::test_runner::Config;
use shardstock_core::codec::{
    parse_stock_stream, serialize_stock, write_dataset_csv, write_fixed_store, FixedStore,
};
use shardstock_core::engine::{apply_disk_baseline, canonical_dataset};
use shardstock_core::{
    apply_parallel, apply_serial, generate, generate_records, route_deltas, run_apply, DeltaEntry,
    EngineKind, GenSpec, Isbn13Key, Price, Quantity, Record, RunConfig, ShardedStore,
};

fn key(i: u64) -> Isbn13Key {
    Isbn13Key::from_u64(9_780_000_000_000 + i).unwrap()
}

/// Small key universe so deltas hit, miss and repeat keys often.
fn arb_case() -> impl Strategy<Value = (Vec<Record>, Vec<DeltaEntry>, usize, bool)> {
    let records = prop::collection::vec((0u64..384, 0u32..10_000, 0u32..1_000), 0..=256);
    let deltas = prop::collection::vec((0u64..512, 0u32..10_000, 0u32..1_000), 0..=512);
    (records, deltas, 1usize..=8, any::<bool>()).prop_map(|(rs, ds, n, insert)| {
        let records = rs
            .into_iter()
            .map(|(k, p, q)| {
                Record::new(
                    key(k),
                    Price::from_cents(p).unwrap(),
                    Quantity::new(q).unwrap(),
                )
            })
            .collect();
        let deltas = ds
            .into_iter()
            .enumerate()
            .map(|(i, (k, p, q))| {
                DeltaEntry::new(
                    key(k),
                    Price::from_cents(p).unwrap(),
                    Quantity::new(q).unwrap(),
                    i as u64,
                )
            })
            .collect();
        (records, deltas, n, insert)
    })
}

proptest! {
    #![proptest_config(Config::with_cases(1_000))]

    #[test]
    fn parallel_equals_serial((records, deltas, n, insert) in arb_case()) {
        let (mut serial, _) = ShardedStore::build(records.clone(), n).unwrap();
        let (mut parallel, _) = ShardedStore::build(records, n).unwrap();
        let rs = apply_serial(&mut serial, &deltas, insert);
        let rp = apply_parallel(&mut parallel, &deltas, n, insert).unwrap();
        prop_assert_eq!(rs.counts(), rp.counts());
        prop_assert!(rs.is_balanced() && rp.is_balanced());
        prop_assert_eq!(rs.total_deltas as usize, deltas.len());
        prop_assert_eq!(serial.sorted_records(), parallel.sorted_records());
    }
}

proptest! {
    #[test]
    fn last_write_wins((records, deltas, n, insert) in arb_case()) {
        let (mut store, _) = ShardedStore::build(records.clone(), n).unwrap();
        apply_parallel(&mut store, &deltas, n, insert).unwrap();
        let present: std::collections::HashSet<_> = records.iter().map(|r| r.key).collect();
        let mut last: HashMap<Isbn13Key, &DeltaEntry> = HashMap::new();
        for d in &deltas {
            let slot = last.entry(d.key).or_insert(d);
            if d.source_ordinal > slot.source_ordinal {
                *slot = d;
            }
        }
        for (k, d) in last {
            if present.contains(&k) || insert {
                prop_assert_eq!(store.lookup(&k), Some((d.new_price, d.new_quantity)));
            } else {
                prop_assert_eq!(store.lookup(&k), None);
            }
        }
    }

    #[test]
    fn disk_counts_balance((records, deltas, _n, _insert) in arb_case()) {
        let (store, _) = ShardedStore::build(records, 1).unwrap();
        let image = write_fixed_store(&store.sorted_records()).unwrap();
        let mut fixed = FixedStore::open(Cursor::new(image)).unwrap();
        let r = apply_disk_baseline(&mut fixed, &deltas, 7).unwrap();
        prop_assert!(r.is_balanced());
        prop_assert_eq!(r.inserted, 0);
        let mut oracle = store.clone();
        let rs = apply_serial(&mut oracle, &deltas, false);
        prop_assert_eq!(r.counts(), rs.counts());
        prop_assert_eq!(fixed.read_all().unwrap(), oracle.sorted_records());
    }
}

#[test]
fn routing_reassembles_stream() {
    let g = generate_records(&GenSpec::new(10_000, 11)).unwrap();
    let routed = route_deltas(&g.deltas, 12);
    let mut joined: Vec<DeltaEntry> = routed.into_queues().concat();
    joined.sort_by_key(|d| d.source_ordinal);
    assert_eq!(joined, g.deltas);
}

#[test]
fn disk_baseline_matches_serial_at_ten_thousand() {
    let g = generate_records(&GenSpec::new(10_000, 5)).unwrap();
    let (mut store, _) = ShardedStore::build(g.records.clone(), 1).unwrap();
    apply_serial(&mut store, &g.deltas, false);

    let mut file = tempfile::tempfile().unwrap();
    std::io::Write::write_all(&mut file, &write_fixed_store(&g.records).unwrap()).unwrap();
    let mut fixed = FixedStore::open(file).unwrap();
    let r = apply_disk_baseline(&mut fixed, &g.deltas, 0).unwrap();
    assert_eq!(r.counts(), (10_000, 0, 0, 10_000));
    assert_eq!(fixed.read_all().unwrap(), store.sorted_records());
}

fn write_pair(
    dir: &std::path::Path,
    count: u64,
    seed: u64,
) -> (std::path::PathBuf, std::path::PathBuf) {
    let files = generate(&GenSpec::new(count, seed)).unwrap();
    let dataset = dir.join("data.csv");
    let stock = dir.join("stock.dat");
    fs::write(&dataset, files.dataset_csv).unwrap();
    fs::write(&stock, files.stock).unwrap();
    (dataset, stock)
}

fn config(
    engine: EngineKind,
    dataset: &std::path::Path,
    stock: &std::path::Path,
    out: std::path::PathBuf,
) -> RunConfig {
    RunConfig {
        engine,
        dataset: dataset.to_path_buf(),
        stock: stock.to_path_buf(),
        out,
        threads: 4,
        insert_missing: false,
        flush_every: 64,
    }
}

#[test]
fn run_apply_all_engines_agree() {
    let dir = tempfile::tempdir().unwrap();
    let (dataset, stock) = write_pair(dir.path(), 10_000, 3);
    let mut outputs = Vec::new();
    for engine in EngineKind::ALL {
        let out = dir.path().join(format!("{engine}.out"));
        let report = run_apply(&config(engine, &dataset, &stock, out.clone())).unwrap();
        assert_eq!(report.apply.counts(), (10_000, 0, 0, 10_000), "{engine}");
        assert_eq!(report.records_loaded, 10_000);
        assert_eq!(report.stock.malformed, 0);
        assert!(report.total >= report.apply_time());
        outputs.push(canonical_dataset(&fs::read(out).unwrap()).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    assert_ne!(outputs[0], fs::read(&dataset).unwrap());
}

#[test]
fn run_apply_empty_stock_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let (dataset, _) = write_pair(dir.path(), 500, 8);
    let empty = dir.path().join("empty.dat");
    fs::write(&empty, b"").unwrap();
    let input = fs::read(&dataset).unwrap();
    for engine in EngineKind::ALL {
        let out = dir.path().join(format!("{engine}.out"));
        let report = run_apply(&config(engine, &dataset, &empty, out.clone())).unwrap();
        assert_eq!(report.apply.counts(), (0, 0, 0, 0));
        assert_eq!(
            canonical_dataset(&fs::read(out).unwrap()).unwrap(),
            input,
            "{engine}"
        );
    }
}

#[test]
fn run_apply_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (dataset, stock) = write_pair(dir.path(), 2_000, 21);
    for engine in EngineKind::ALL {
        let a = dir.path().join("a.out");
        let b = dir.path().join("b.out");
        run_apply(&config(engine, &dataset, &stock, a.clone())).unwrap();
        run_apply(&config(engine, &dataset, &stock, b.clone())).unwrap();
        assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap(), "{engine}");
    }
}

#[test]
fn run_apply_accepts_fixed_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let (csv_path, stock) = write_pair(dir.path(), 300, 4);
    let fixed_path = dir.path().join("data.fix");
    fs::write(
        &fixed_path,
        shardstock_core::engine::csv_to_fixed(&fs::read(&csv_path).unwrap()).unwrap(),
    )
    .unwrap();
    let from_csv = dir.path().join("csv.out");
    let from_fixed = dir.path().join("fixed.out");
    run_apply(&config(
        EngineKind::MemoryParallel,
        &csv_path,
        &stock,
        from_csv.clone(),
    ))
    .unwrap();
    run_apply(&config(
        EngineKind::MemoryParallel,
        &fixed_path,
        &stock,
        from_fixed.clone(),
    ))
    .unwrap();
    assert_eq!(fs::read(from_csv).unwrap(), fs::read(from_fixed).unwrap());
}

#[test]
fn run_apply_errors() {
    let dir = tempfile::tempdir().unwrap();
    let (dataset, stock) = write_pair(dir.path(), 10, 1);
    let missing = dir.path().join("nope.dat");
    let err = run_apply(&config(
        EngineKind::MemorySerial,
        &dataset,
        &missing,
        dir.path().join("o"),
    ))
    .unwrap_err();
    assert!(matches!(err, shardstock_core::EngineError::Path { .. }));

    let mut cfg = config(
        EngineKind::MemoryParallel,
        &dataset,
        &stock,
        dir.path().join("o"),
    );
    cfg.threads = 0;
    assert!(matches!(
        run_apply(&cfg),
        Err(shardstock_core::EngineError::ZeroWorkers)
    ));

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, b"isbn,price,qty\n").unwrap();
    let err = run_apply(&config(
        EngineKind::DiskBaseline,
        &bad,
        &stock,
        dir.path().join("o"),
    ))
    .unwrap_err();
    assert!(matches!(err, shardstock_core::EngineError::Codec(_)));
}

#[test]
fn insert_missing_grows_memory_store() {
    let dir = tempfile::tempdir().unwrap();
    let (dataset, _) = write_pair(dir.path(), 100, 2);
    let extra = vec![DeltaEntry::new(
        Isbn13Key::from_u64(1).unwrap(),
        Price::from_cents(1).unwrap(),
        Quantity::new(1).unwrap(),
        0,
    )];
    let stock = dir.path().join("extra.dat");
    fs::write(&stock, serialize_stock(&extra)).unwrap();
    let mut cfg = config(
        EngineKind::MemoryParallel,
        &dataset,
        &stock,
        dir.path().join("o.csv"),
    );
    cfg.insert_missing = true;
    let r = run_apply(&cfg).unwrap();
    assert_eq!(r.apply.counts(), (0, 0, 1, 1));
    assert_eq!(r.records_written, 101);

    let mut cfg = config(
        EngineKind::DiskBaseline,
        &dataset,
        &stock,
        dir.path().join("o.fix"),
    );
    cfg.insert_missing = true;
    let r = run_apply(&cfg).unwrap();
    assert_eq!(r.apply.counts(), (0, 1, 0, 1));
}

#[test]
fn canonical_csv_independent_of_shards() {
    let g = generate_records(&GenSpec::new(1_000, 77)).unwrap();
    let mut shuffled = g.records.clone();
    shuffled.reverse();
    let outputs: Vec<Vec<u8>> = [1, 3, 12]
        .into_iter()
        .map(|n| write_dataset_csv(&ShardedStore::build(shuffled.clone(), n).unwrap().0))
        .collect();
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
    assert_eq!(
        parse_stock_stream(&serialize_stock(&g.deltas)).entries,
        g.deltas
    );
}
