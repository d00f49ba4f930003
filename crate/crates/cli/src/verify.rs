//! Cross-engine equivalence gate.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use shardstock_core::engine::{canonical_dataset, load_dataset_bytes};
use shardstock_core::{
    generate, run_apply, EngineError, EngineKind, GenSpec, RunConfig, RunReport,
};

use crate::args::VerifyArgs;
use crate::{emit, io_err, resolve_threads, CliError};

const MAX_DIFF_LINES: usize = 20;

/// How verify runs one engine. Swappable so tests can inject a faulty
/// engine and check that the gate catches it.
pub trait EngineRunner {
    fn run(&self, cfg: &RunConfig) -> Result<RunReport, EngineError>;
}

pub struct StandardRunner;

impl EngineRunner for StandardRunner {
    fn run(&self, cfg: &RunConfig) -> Result<RunReport, EngineError> {
        run_apply(cfg)
    }
}

pub fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    cmd_verify_with(a, &StandardRunner, out)
}

pub fn cmd_verify_with(
    a: &VerifyArgs,
    runner: &dyn EngineRunner,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let scratch;
    let dir: &Path = match &a.work_dir {
        Some(d) => {
            fs::create_dir_all(d).map_err(io_err(d))?;
            d
        }
        None => {
            scratch = tempfile::tempdir().map_err(io_err(Path::new("<tempdir>")))?;
            scratch.path()
        }
    };
    let files = generate(&GenSpec::new(a.count, a.seed))?;
    let dataset = dir.join("verify-dataset.csv");
    let stock = dir.join("verify-stock.dat");
    fs::write(&dataset, &files.dataset_csv).map_err(io_err(&dataset))?;
    fs::write(&stock, &files.stock).map_err(io_err(&stock))?;

    let threads = resolve_threads(a.threads);
    let mut text = format!(
        "records={}\nseed={}\nthreads={}\n",
        a.count, a.seed, threads
    );
    let mut outputs = Vec::new();
    for engine in EngineKind::ALL {
        let out_path = dir.join(format!("verify-{engine}.out"));
        let report = runner.run(&RunConfig {
            engine,
            dataset: dataset.clone(),
            stock: stock.clone(),
            out: out_path.clone(),
            threads,
            insert_missing: false,
            flush_every: a.flush_every,
        })?;
        let raw = fs::read(&out_path).map_err(io_err(&out_path))?;
        let canonical = canonical_dataset(&raw).map_err(EngineError::from)?;
        text.push_str(&format!(
            "{engine}: applied={} missing={} inserted={} total_deltas={}\n",
            report.apply.applied,
            report.apply.missing_key,
            report.apply.inserted,
            report.apply.total_deltas
        ));
        text.push_str(&format!(
            "timing.{engine}_total_ms={}\n",
            report.total.as_millis()
        ));
        outputs.push((engine, canonical));
    }

    let (reference_engine, reference) = &outputs[0];
    let mut mismatched = Vec::new();
    for (engine, canonical) in &outputs[1..] {
        if canonical != reference {
            mismatched.push(*engine);
            text.push_str(&field_diff(
                *reference_engine,
                reference,
                *engine,
                canonical,
            ));
        }
    }
    if mismatched.is_empty() {
        text.push_str("verify=ok\n");
        emit(out, &text)
    } else {
        text.push_str("verify=mismatch\n");
        emit(out, &text)?;
        let names: Vec<&str> = mismatched.iter().map(|e| e.as_str()).collect();
        Err(CliError::Semantic(format!(
            "{} disagree with {}",
            names.join(", "),
            reference_engine
        )))
    }
}

type Row = (String, String);

fn rows_by_key(canonical: &[u8]) -> BTreeMap<String, Row> {
    load_dataset_bytes(canonical)
        .map(|load| {
            load.records
                .into_iter()
                .map(|r| {
                    (
                        r.key.to_string(),
                        (r.price.to_string(), r.quantity.to_string()),
                    )
                })
                .collect()
        })
        .unwrap_or_default()
}

/// One line per differing field, capped at [`MAX_DIFF_LINES`].
fn field_diff(a_name: EngineKind, a: &[u8], b_name: EngineKind, b: &[u8]) -> String {
    let left = rows_by_key(a);
    let right = rows_by_key(b);
    let mut lines = Vec::new();
    for (key, (lp, lq)) in &left {
        match right.get(key) {
            None => lines.push(format!("diff key={key} only_in={a_name}")),
            Some((rp, rq)) => {
                if lp != rp {
                    lines.push(format!(
                        "diff key={key} field=price {a_name}={lp} {b_name}={rp}"
                    ));
                }
                if lq != rq {
                    lines.push(format!(
                        "diff key={key} field=quantity {a_name}={lq} {b_name}={rq}"
                    ));
                }
            }
        }
    }
    for key in right.keys().filter(|k| !left.contains_key(*k)) {
        lines.push(format!("diff key={key} only_in={b_name}"));
    }
    let total = lines.len();
    let mut text: String = lines
        .into_iter()
        .take(MAX_DIFF_LINES)
        .map(|l| l + "\n")
        .collect();
    if total > MAX_DIFF_LINES {
        text.push_str(&format!("diff truncated={}\n", total - MAX_DIFF_LINES));
    }
    text
}
