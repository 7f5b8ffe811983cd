//! CSV emission. Floats are written with 17 significant digits so every
//! `f64` round-trips exactly.

use std::io::{self, Write};

use crate::harness::sweep::SweepTable;

pub const RECORD_HEADER: &str = "sweep,scheme,master_seed,trial,trial_seed,k,m,input_snr_db,output_snr_db,exact_support,support,true_support,relative_residual";
pub const SUMMARY_HEADER: &str =
    "sweep,scheme,k,m,input_snr_db,trials,mean_snr_db,std_snr_db,exact_rate,mean_relative_residual,feasible";
pub const TIMING_HEADER: &str = "sweep,scheme,trial,k,m,input_snr_db,wall_time_s";

/// `f64` at 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

fn join_indices(v: &[usize]) -> String {
    v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

/// One row per trial and point. Byte-identical for a fixed config and seed.
pub fn write_records<W: Write>(table: &SweepTable, mut w: W) -> io::Result<()> {
    writeln!(w, "{RECORD_HEADER}")?;
    for r in &table.records {
        let o = &r.outcome;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            table.kind.name(),
            r.scheme.name(),
            table.master_seed,
            o.trial,
            o.trial_seed,
            o.k,
            o.m,
            fmt_f64(o.input_snr_db),
            fmt_f64(o.output_snr_db),
            o.exact_support(),
            join_indices(&o.support),
            join_indices(&o.true_support),
            fmt_f64(o.relative_residual),
        )?;
    }
    Ok(())
}

/// One row per point and scheme.
pub fn write_summary<W: Write>(table: &SweepTable, mut w: W) -> io::Result<()> {
    writeln!(w, "{SUMMARY_HEADER}")?;
    for s in table.summaries() {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            table.kind.name(),
            s.scheme.name(),
            s.k,
            s.m,
            fmt_f64(s.input_snr_db),
            s.trials,
            fmt_f64(s.mean_snr_db),
            fmt_f64(s.std_snr_db),
            fmt_f64(s.exact_rate),
            fmt_f64(s.mean_residual),
            s.feasible,
        )?;
    }
    Ok(())
}

/// Wall-clock seconds per trial; kept apart because timings vary run to run.
pub fn write_timing<W: Write>(table: &SweepTable, mut w: W) -> io::Result<()> {
    writeln!(w, "{TIMING_HEADER}")?;
    for r in &table.records {
        let o = &r.outcome;
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            table.kind.name(),
            r.scheme.name(),
            o.trial,
            o.k,
            o.m,
            fmt_f64(o.input_snr_db),
            fmt_f64(o.wall_time_s),
        )?;
    }
    Ok(())
}

pub fn records_string(table: &SweepTable) -> String {
    let mut buf = Vec::new();
    write_records(table, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

pub fn summary_string(table: &SweepTable) -> String {
    let mut buf = Vec::new();
    write_summary(table, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

/// `(scheme, x, mean_snr_db)` triples read back from a summary CSV, where
/// `x` is the column named `x_column`.
pub fn read_summary_series(text: &str, x_column: &str) -> Option<Vec<(String, f64, f64)>> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next()?.split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name);
    let (xi, si, yi) = (col(x_column)?, col("scheme")?, col("mean_snr_db")?);
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            Some((f.get(si)?.to_string(), f.get(xi)?.parse().ok()?, f.get(yi)?.parse().ok()?))
        })
        .collect()
}
