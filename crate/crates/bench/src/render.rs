//! Text, CSV and SVG renderings of a [`BenchTable`].

use std::fmt::Write as _;
use std::time::Duration;

use crate::table::{BenchTable, CellStatus};

/// `Hh Mm Ss` with zero-padded seconds, e.g. 63 000 ms is `0h 1m 03s`.
/// Sub-second remainders are truncated.
pub fn format_hms(millis: u128) -> String {
    let secs = millis / 1000;
    format!("{}h {}m {:02}s", secs / 3600, (secs / 60) % 60, secs % 60)
}

/// Inverse of [`format_hms`], in whole seconds.
pub fn parse_hms(text: &str) -> Option<Duration> {
    let mut parts = text.split_whitespace();
    let hours = parts.next()?.strip_suffix('h')?.parse::<u64>().ok()?;
    let minutes = parts.next()?.strip_suffix('m')?.parse::<u64>().ok()?;
    let seconds = parts.next()?.strip_suffix('s')?.parse::<u64>().ok()?;
    if parts.next().is_some() || minutes >= 60 || seconds >= 60 {
        return None;
    }
    Some(Duration::from_secs(hours * 3600 + minutes * 60 + seconds))
}

fn group_thousands(n: u64) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

fn cell_text(status: Option<&CellStatus>) -> String {
    match status {
        Some(CellStatus::Done(d)) => {
            format!("{} ({} ms)", format_hms(d.as_millis()), d.as_millis())
        }
        Some(CellStatus::Failed(_)) => "failed".to_string(),
        Some(CellStatus::Skipped(_)) | None => "—".to_string(),
    }
}

fn pad(out: &mut String, text: &str, width: usize) {
    out.push_str(text);
    for _ in text.chars().count()..width {
        out.push(' ');
    }
}

/// Aligned table: one column per record count, one row per engine and
/// thread count.
pub fn render_table(table: &BenchTable) -> String {
    let corner = "# of Records to Update".to_string();
    let headers: Vec<String> = table.sizes().iter().map(|&s| group_thousands(s)).collect();
    let rows: Vec<(String, Vec<String>)> = table
        .rows()
        .iter()
        .map(|row| {
            let cells = table
                .sizes()
                .iter()
                .map(|&size| cell_text(table.status(row, size)))
                .collect();
            (row.label(), cells)
        })
        .collect();

    let label_width = rows
        .iter()
        .map(|(label, _)| label.chars().count())
        .chain(std::iter::once(corner.chars().count()))
        .max()
        .unwrap_or(0);
    let col_widths: Vec<usize> = headers
        .iter()
        .enumerate()
        .map(|(i, h)| {
            rows.iter()
                .map(|(_, cells)| cells[i].chars().count())
                .chain(std::iter::once(h.chars().count()))
                .max()
                .unwrap_or(0)
        })
        .collect();

    let mut out = String::new();
    let mut line = String::new();
    pad(&mut line, &corner, label_width);
    for (h, w) in headers.iter().zip(&col_widths) {
        line.push_str("  ");
        pad(&mut line, h, *w);
    }
    out.push_str(line.trim_end());
    out.push('\n');
    for (label, cells) in &rows {
        line.clear();
        pad(&mut line, label, label_width);
        for (c, w) in cells.iter().zip(&col_widths) {
            line.push_str("  ");
            pad(&mut line, c, *w);
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    for cell in table.cells() {
        if let CellStatus::Failed(reason) | CellStatus::Skipped(reason) = &cell.status {
            let _ = writeln!(
                out,
                "note: {} at {} records: {}",
                cell.row.label(),
                group_thousands(cell.records),
                reason
            );
        }
    }
    out
}

pub const CSV_HEADER: &str = "engine,threads,records,millis,status";

/// One line per cell. `millis` is empty for skipped and failed cells.
pub fn render_csv(table: &BenchTable) -> Vec<u8> {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for cell in table.cells() {
        let millis = match &cell.status {
            CellStatus::Done(d) => d.as_millis().to_string(),
            _ => String::new(),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            cell.row.engine,
            cell.row.threads,
            cell.records,
            millis,
            cell.status.name()
        );
    }
    out.into_bytes()
}

const PALETTE: [&str; 8] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#9c755f",
];

/// Grouped bars on a log10 millisecond axis, one group per record count
/// and one bar per table row inside each group. Static SVG, no scripts.
pub fn render_histogram_svg(table: &BenchTable) -> Vec<u8> {
    let rows = table.rows();
    let sizes = table.sizes();
    let max_ms = table
        .cells()
        .iter()
        .filter_map(|c| c.status.duration())
        .map(|d| d.as_millis().max(1) as f64)
        .fold(1.0f64, f64::max);
    let decades = max_ms.log10().ceil().max(1.0) as u32;

    let (left, right, top, bottom) = (70.0, 20.0, 30.0, 60.0);
    let bar_w = 18.0;
    let group_gap = 24.0;
    let group_w = bar_w * rows.len().max(1) as f64 + group_gap;
    let plot_w = (group_w * sizes.len() as f64).max(200.0);
    let plot_h = 300.0;
    let legend_h = 16.0 * rows.len() as f64;
    let width = left + plot_w + right;
    let height = top + plot_h + bottom + legend_h;
    let base_y = top + plot_h;
    let y_of = |log: f64| base_y - plot_h * log / decades as f64;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="18" text-anchor="middle" font-size="13">Execution time by record count (log scale)</text>"#,
        width / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<line class="axis" x1="{left}" y1="{top}" x2="{left}" y2="{base_y}" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<line class="axis" x1="{left}" y1="{base_y}" x2="{:.1}" y2="{base_y}" stroke="black"/>"#,
        left + plot_w
    );
    for d in 0..=decades {
        let y = y_of(d as f64);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.1}" y1="{y:.1}" x2="{left}" y2="{y:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" text-anchor="end">{} ms</text>"##,
            left - 4.0,
            left - 6.0,
            y + 4.0,
            group_thousands(10u64.pow(d))
        );
    }

    for (gi, &size) in sizes.iter().enumerate() {
        let gx = left + group_gap / 2.0 + gi as f64 * group_w;
        for (ri, row) in rows.iter().enumerate() {
            let x = gx + ri as f64 * bar_w;
            match table.status(row, size).and_then(CellStatus::duration) {
                Some(d) => {
                    let ms = d.as_millis().max(1) as f64;
                    let y = y_of(ms.log10());
                    let _ = writeln!(
                        svg,
                        r#"<rect class="bar" x="{x:.1}" y="{y:.1}" width="{:.1}" height="{:.1}" fill="{}"><title>{} at {} records: {} ms</title></rect>"#,
                        bar_w - 2.0,
                        base_y - y,
                        PALETTE[ri % PALETTE.len()],
                        row.label(),
                        size,
                        d.as_millis()
                    );
                }
                None => {
                    let _ = writeln!(
                        svg,
                        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">—</text>"#,
                        x + bar_w / 2.0,
                        base_y - 4.0
                    );
                }
            }
        }
        let _ = writeln!(
            svg,
            r#"<text class="group" x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            gx + bar_w * rows.len() as f64 / 2.0,
            base_y + 16.0,
            group_thousands(size)
        );
    }

    for (ri, row) in rows.iter().enumerate() {
        let y = base_y + 36.0 + ri as f64 * 16.0;
        let _ = writeln!(
            svg,
            r#"<rect x="{left}" y="{:.1}" width="10" height="10" fill="{}"/><text x="{:.1}" y="{y:.1}">{}</text>"#,
            y - 9.0,
            PALETTE[ri % PALETTE.len()],
            left + 14.0,
            row.label()
        );
    }
    svg.push_str("</svg>\n");
    svg.into_bytes()
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use shardstock_core::EngineKind;

    use super::*;
    use crate::table::RowKey;

    #[test]
    fn hms_examples() {
        assert_eq!(format_hms(63_000), "0h 1m 03s");
        assert_eq!(format_hms(0), "0h 0m 00s");
        assert_eq!(format_hms(123_456_789), "34h 17m 36s");
        assert_eq!(format_hms(4_999), "0h 0m 04s");
        assert_eq!(format_hms(6_602_000), "1h 50m 02s");
    }

    #[test]
    fn hms_parse_rejects_garbage() {
        assert_eq!(parse_hms("0h 1m 03s"), Some(Duration::from_secs(63)));
        for bad in [
            "",
            "1h",
            "0h 60m 00s",
            "0h 0m 60s",
            "1h 2m 3",
            "0h 1m 03s x",
        ] {
            assert_eq!(parse_hms(bad), None, "{bad:?}");
        }
    }

    proptest! {
        #[test]
        fn hms_round_trip(ms in 0u128..=1_000_000_000) {
            let text = format_hms(ms);
            prop_assert_eq!(parse_hms(&text), Some(Duration::from_secs((ms / 1000) as u64)));
        }
    }

    #[test]
    fn thousands() {
        assert_eq!(group_thousands(0), "0");
        assert_eq!(group_thousands(999), "999");
        assert_eq!(group_thousands(100_000), "100,000");
        assert_eq!(group_thousands(2_000_000), "2,000,000");
    }

    fn one_cell() -> BenchTable {
        let mut t = BenchTable::new(vec![2_000_000]);
        t.set(
            RowKey::new(EngineKind::MemoryParallel, 12),
            2_000_000,
            CellStatus::Done(Duration::from_millis(63_000)),
        );
        t
    }

    #[test]
    fn empty_table_renders() {
        let t = BenchTable::new(vec![]);
        assert_eq!(render_csv(&t), format!("{CSV_HEADER}\n").into_bytes());
        let svg = String::from_utf8(render_histogram_svg(&t)).unwrap();
        assert!(svg.contains(r#"class="axis""#));
        assert!(!svg.contains(r#"class="bar""#));
        assert!(!svg.contains("<script"));
        assert_eq!(render_table(&t), "# of Records to Update\n");
    }

    #[test]
    fn single_cell_renders() {
        let t = one_cell();
        assert_eq!(
            String::from_utf8(render_csv(&t)).unwrap(),
            format!("{CSV_HEADER}\nmemory_parallel,12,2000000,63000,ok\n")
        );
        let text = render_table(&t);
        assert!(text.contains("0h 1m 03s (63000 ms)"), "{text}");
        assert!(text.contains("2,000,000"));

        let svg = String::from_utf8(render_histogram_svg(&t)).unwrap();
        assert_eq!(svg.matches(r#"class="bar""#).count(), 1);
        // 63 000 ms on a 5-decade axis of 300 px
        let expected_h = 300.0 * 63_000f64.log10() / 5.0;
        assert!(
            svg.contains(&format!(r#"height="{expected_h:.1}""#)),
            "{svg}"
        );
    }

    #[test]
    fn skipped_and_failed_cells() {
        let mut t = BenchTable::new(vec![100, 200_000]);
        let disk = RowKey::new(EngineKind::DiskBaseline, 1);
        t.set(disk, 100, CellStatus::Done(Duration::from_millis(1500)));
        t.set(
            disk,
            200_000,
            CellStatus::Skipped("above baseline cap 100000".into()),
        );
        let serial = RowKey::new(EngineKind::MemorySerial, 1);
        t.set(
            serial,
            100,
            CellStatus::Failed("insufficient memory".into()),
        );
        let text = render_table(&t);
        assert!(text.contains("—"));
        assert!(text.contains("failed"));
        assert!(text.contains("note: "));
        let csv = String::from_utf8(render_csv(&t)).unwrap();
        assert!(csv.contains("disk_baseline,1,200000,,skipped\n"));
        assert!(csv.contains("memory_serial,1,100,,failed\n"));
        let svg = String::from_utf8(render_histogram_svg(&t)).unwrap();
        assert_eq!(svg.matches(r#"class="bar""#).count(), 1);
    }

    #[test]
    fn five_groups_in_column_order() {
        let sizes = vec![100_000, 500_000, 1_000_000, 1_500_000, 2_000_000];
        let mut t = BenchTable::new(sizes.clone());
        let row = RowKey::new(EngineKind::MemoryParallel, 4);
        for (i, &s) in sizes.iter().enumerate() {
            t.set(
                row,
                s,
                CellStatus::Done(Duration::from_millis(1000 * (i as u64 + 1))),
            );
        }
        let svg = String::from_utf8(render_histogram_svg(&t)).unwrap();
        let groups: Vec<&str> = svg
            .lines()
            .filter(|l| l.contains(r#"class="group""#))
            .map(|l| {
                l.rsplit_once('>')
                    .unwrap()
                    .0
                    .rsplit_once('>')
                    .unwrap()
                    .1
                    .trim_end_matches("</text")
            })
            .collect();
        assert_eq!(
            groups,
            ["100,000", "500,000", "1,000,000", "1,500,000", "2,000,000"]
        );
        let xs: Vec<f64> = svg
            .lines()
            .filter(|l| l.contains(r#"class="bar""#))
            .map(|l| {
                l.split(r#"x=""#)
                    .nth(1)
                    .unwrap()
                    .split('"')
                    .next()
                    .unwrap()
                    .parse()
                    .unwrap()
            })
            .collect();
        assert_eq!(xs.len(), 5);
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
    }
}
