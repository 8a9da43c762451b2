use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use super::ensemble::{EnsembleReport, SeasonAggregate};
use crate::error::{Error, Result};
use crate::immunize::Strategy;

/// Column order of the per-season report.
pub const REPORT_COLUMNS: [&str; 11] = [
    "season",
    "strategy",
    "beta",
    "v",
    "r_inf_mean",
    "r_inf_stderr",
    "q1",
    "q2",
    "vacc_mean_degree",
    "vacc_mean_kshell",
    "vacc_mean_distance",
];

fn opt(x: Option<f64>) -> String {
    x.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the per-season report; floats use the shortest text that parses
/// back to the same value.
pub fn write_csv<W: Write>(report: &EnsembleReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_COLUMNS)?;
    for s in &report.seasons {
        w.write_record([
            s.season.to_string(),
            report.strategy.to_string(),
            report.beta.to_string(),
            report.v.to_string(),
            s.r_inf_mean.to_string(),
            s.r_inf_stderr.to_string(),
            opt(s.q1),
            opt(s.q2),
            opt(s.vacc_mean_degree),
            opt(s.vacc_mean_kshell),
            opt(s.vacc_mean_distance),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(report: &EnsembleReport, path: impl AsRef<Path>) -> Result<()> {
    write_csv(report, BufWriter::new(File::create(path)?))
}

/// One parsed row of a per-season report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub strategy: Strategy,
    pub beta: f64,
    pub v: f64,
    pub aggregate: SeasonAggregate,
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, idx: usize, line: usize) -> Result<T> {
    let raw = rec.get(idx).unwrap_or("");
    raw.parse().map_err(|_| Error::Parse {
        line,
        message: format!("bad {} value {raw:?}", REPORT_COLUMNS[idx]),
    })
}

fn opt_field(rec: &csv::StringRecord, idx: usize, line: usize) -> Result<Option<f64>> {
    match rec.get(idx) {
        None | Some("") => Ok(None),
        Some(_) => field(rec, idx, line).map(Some),
    }
}

/// Reads a file written by [`write_csv`].
pub fn read_csv<R: Read>(input: R) -> Result<Vec<ReportRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(REPORT_COLUMNS) {
        return Err(Error::Parse { line: 1, message: "unexpected header".into() });
    }
    let mut rows = Vec::new();
    for (idx, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = idx + 2;
        rows.push(ReportRow {
            strategy: field(&rec, 1, line)?,
            beta: field(&rec, 2, line)?,
            v: field(&rec, 3, line)?,
            aggregate: SeasonAggregate {
                season: field(&rec, 0, line)?,
                r_inf_mean: field(&rec, 4, line)?,
                r_inf_stderr: field(&rec, 5, line)?,
                q1: opt_field(&rec, 6, line)?,
                q2: opt_field(&rec, 7, line)?,
                vacc_mean_degree: opt_field(&rec, 8, line)?,
                vacc_mean_kshell: opt_field(&rec, 9, line)?,
                vacc_mean_distance: opt_field(&rec, 10, line)?,
            },
        });
    }
    Ok(rows)
}

/// Writes the window statistics `A` and `F` as `metric,index,mean,stderr`
/// rows.
pub fn write_recurrence_csv<W: Write>(report: &EnsembleReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["metric", "index", "mean", "stderr"])?;
    for (s, m, se) in report.streak_stats() {
        w.write_record(["a_streak".to_string(), s.to_string(), m.to_string(), se.to_string()])?;
    }
    for (i, m, se) in report.repeat_stats() {
        w.write_record(["f_repeat".to_string(), i.to_string(), m.to_string(), se.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes an arbitrary table with a header row.
pub fn write_table(path: impl AsRef<Path>, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}
