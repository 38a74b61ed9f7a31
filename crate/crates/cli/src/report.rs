//! CSV and markdown output for benchmark rows.

use std::io::{self, Write};

use crate::bench::{ratios, size_value, BenchConfig, MeasurementRow, Mode};

pub const CSV_HEADER: [&str; 9] = [
    "example",
    "size",
    "mode",
    "unfolder_s",
    "interpreter_s",
    "total_s",
    "rules_generated",
    "applied_indices",
    "checksum",
];

fn indices(r: &MeasurementRow) -> String {
    r.applied_indices
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn secs(x: f64) -> String {
    format!("{x:.9}")
}

/// One row per size and mode with mean times. Ratios go to `notes` so the
/// table itself keeps a fixed schema.
pub fn write_csv(
    rows: &[MeasurementRow],
    cfg: &BenchConfig,
    out: &mut dyn Write,
    notes: &mut dyn Write,
) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.example.to_string(),
            r.size.to_string(),
            r.mode.to_string(),
            secs(r.unfolder.mean),
            secs(r.interpreter.mean),
            secs(r.total.mean),
            r.rules_generated.to_string(),
            indices(r),
            r.checksum.clone(),
        ])?;
    }
    w.flush()?;
    writeln!(
        notes,
        "# seed {} reps {} cache {}",
        cfg.seed,
        cfg.reps,
        on_off(cfg.cache)
    )?;
    for q in ratios(rows) {
        writeln!(
            notes,
            "# ratio {} {} -> {}: total {:.3} interpreter {:.3}",
            q.mode, q.from, q.to, q.total, q.interpreter
        )?;
    }
    Ok(())
}

fn on_off(b: bool) -> &'static str {
    if b {
        "on"
    } else {
        "off"
    }
}

fn ms(x: f64) -> String {
    format!("{:.3}", x * 1e3)
}

pub fn write_markdown(
    rows: &[MeasurementRow],
    cfg: &BenchConfig,
    out: &mut dyn Write,
) -> io::Result<()> {
    writeln!(out, "# {} benchmark", cfg.example)?;
    writeln!(out)?;
    writeln!(
        out,
        "seed {}, {} repetitions, rule cache {}. Times in milliseconds, min / mean.",
        cfg.seed,
        cfg.reps,
        on_off(cfg.cache)
    )?;
    for mode in [Mode::Original, Mode::Unfolded] {
        let rs: Vec<&MeasurementRow> = rows.iter().filter(|r| r.mode == mode).collect();
        if rs.is_empty() {
            continue;
        }
        writeln!(out)?;
        writeln!(out, "## {mode}")?;
        writeln!(out)?;
        writeln!(
            out,
            "| size | n | unfolder | interpreter | total | rules | applied | checksum |"
        )?;
        writeln!(out, "|---|---:|---:|---:|---:|---:|---|---|")?;
        for r in rs {
            let t = |t: &crate::bench::Timing| format!("{} / {}", ms(t.min), ms(t.mean));
            writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} | {} | {} |",
                r.size,
                size_value(&r.size),
                t(&r.unfolder),
                t(&r.interpreter),
                t(&r.total),
                r.rules_generated,
                indices(r),
                &r.checksum[..16]
            )?;
        }
    }
    let qs = ratios(rows);
    if !qs.is_empty() {
        writeln!(out)?;
        writeln!(out, "## Ratios")?;
        writeln!(out)?;
        writeln!(out, "| mode | from | to | total | interpreter |")?;
        writeln!(out, "|---|---|---|---:|---:|")?;
        for q in qs {
            writeln!(
                out,
                "| {} | {} | {} | {:.3} | {:.3} |",
                q.mode, q.from, q.to, q.total, q.interpreter
            )?;
        }
    }
    let speedups: Vec<(String, f64)> = rows
        .iter()
        .filter(|r| r.mode == Mode::Original)
        .filter_map(|o| {
            rows.iter()
                .find(|u| u.mode == Mode::Unfolded && u.size == o.size)
                .map(|u| (o.size.to_string(), o.total.mean / u.total.mean))
        })
        .collect();
    if !speedups.is_empty() {
        writeln!(out)?;
        writeln!(out, "## Speedup")?;
        writeln!(out)?;
        writeln!(out, "| size | original / unfolded |")?;
        writeln!(out, "|---|---:|")?;
        for (size, s) in speedups {
            writeln!(out, "| {size} | {s:.1} |")?;
        }
    }
    Ok(())
}
