//! Host facts the runner and the acceptance checks need. Linux only; other
//! platforms report `None` and callers fall back to conservative behavior.

use std::collections::HashSet;
use std::fs;
use std::thread;

/// `MemAvailable` from `/proc/meminfo`, in bytes.
pub fn available_memory_bytes() -> Option<u64> {
    let meminfo = fs::read_to_string("/proc/meminfo").ok()?;
    parse_meminfo_available(&meminfo)
}

fn parse_meminfo_available(meminfo: &str) -> Option<u64> {
    let line = meminfo.lines().find(|l| l.starts_with("MemAvailable:"))?;
    let kib: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kib * 1024)
}

pub fn logical_cpus() -> usize {
    thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Distinct (package, core) pairs from `/proc/cpuinfo`, capped by the
/// scheduler's view of usable CPUs.
pub fn physical_cores() -> usize {
    let logical = logical_cpus();
    let Ok(cpuinfo) = fs::read_to_string("/proc/cpuinfo") else {
        return logical;
    };
    match count_physical_cores(&cpuinfo) {
        Some(cores) => cores.min(logical),
        None => logical,
    }
}

fn count_physical_cores(cpuinfo: &str) -> Option<usize> {
    let mut cores = HashSet::new();
    for block in cpuinfo.split("\n\n") {
        let field = |name: &str| {
            block
                .lines()
                .find(|l| l.starts_with(name))
                .and_then(|l| l.split(':').nth(1))
                .map(|v| v.trim().to_string())
        };
        if let (Some(pkg), Some(core)) = (field("physical id"), field("core id")) {
            cores.insert((pkg, core));
        }
    }
    (!cores.is_empty()).then_some(cores.len())
}
