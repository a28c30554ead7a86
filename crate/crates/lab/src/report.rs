//! CSV output with fixed schemas.
//!
//! Floats are written with 17 significant digits, booleans as `0`/`1`, and a
//! missing `first_success_round` as an empty field. Records end with `\n`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use pps_core::{RunTrace, Topology};

use crate::error::{LabError, Result};
use crate::experiment::{InfluenceRow, RunRecord, SummaryRow, SweepSummary};
use crate::numfmt::sig17;

pub const RECORDS_HEADER: [&str; 9] = [
    "problem",
    "level",
    "instance",
    "rep",
    "topology",
    "success",
    "final_mean_score",
    "final_best_score",
    "first_success_round",
];

pub const SUMMARY_HEADER: [&str; 5] = [
    "problem",
    "level",
    "topology",
    "success_prob",
    "mean_final_score",
];

pub const INFLUENCE_HEADER: [&str; 3] = ["problem", "level", "influence"];

pub const TRACE_HEADER: [&str; 3] = ["round", "mean_score", "best_score"];

fn record_fields(r: &RunRecord) -> [String; 9] {
    [
        r.problem_kind.to_string(),
        r.level.to_string(),
        r.instance.to_string(),
        r.rep.to_string(),
        r.topology.to_string(),
        (r.success as u8).to_string(),
        sig17(r.final_mean_score),
        sig17(r.final_best_score),
        r.first_success_round
            .map(|x| x.to_string())
            .unwrap_or_default(),
    ]
}

fn summary_fields(r: &SummaryRow) -> [String; 5] {
    [
        r.problem_kind.to_string(),
        r.level.to_string(),
        r.topology.to_string(),
        sig17(r.success_probability),
        sig17(r.mean_final_score),
    ]
}

fn influence_fields(r: &InfluenceRow) -> [String; 3] {
    [
        r.problem_kind.to_string(),
        r.level.to_string(),
        sig17(r.influence),
    ]
}

fn write_rows<W, I, const N: usize>(out: W, header: [&str; N], rows: I) -> csv::Result<()>
where
    W: Write,
    I: IntoIterator<Item = [String; N]>,
{
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_records<W: Write>(out: W, records: &[RunRecord]) -> csv::Result<()> {
    write_rows(out, RECORDS_HEADER, records.iter().map(record_fields))
}

pub fn write_summary<W: Write>(out: W, summary: &SweepSummary) -> csv::Result<()> {
    write_rows(out, SUMMARY_HEADER, summary.rows.iter().map(summary_fields))
}

pub fn write_influence<W: Write>(out: W, summary: &SweepSummary) -> csv::Result<()> {
    write_rows(
        out,
        INFLUENCE_HEADER,
        summary.influence.iter().map(influence_fields),
    )
}

pub fn write_trace<W: Write>(out: W, trace: &RunTrace) -> csv::Result<()> {
    let rows = trace
        .mean_score
        .iter()
        .zip(&trace.best_score)
        .enumerate()
        .map(|(r, (m, b))| [r.to_string(), sig17(*m), sig17(*b)]);
    write_rows(out, TRACE_HEADER, rows)
}

/// Creates `path` and fills it with `write`, attaching the path to any error.
pub fn to_file<F>(path: &Path, write: F) -> Result<()>
where
    F: FnOnce(File) -> csv::Result<()>,
{
    let file = File::create(path).map_err(LabError::io(path))?;
    write(file).map_err(|source| LabError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a records file written by [`write_records`].
pub fn read_records<R: Read>(input: R) -> std::result::Result<Vec<RunRecord>, String> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers().map_err(|e| e.to_string())?.clone();
    if header.iter().ne(RECORDS_HEADER) {
        return Err(format!("unexpected header: {header:?}"));
    }
    let mut out = Vec::new();
    for (line, row) in reader.records().enumerate() {
        let row = row.map_err(|e| e.to_string())?;
        let bad = |field: &str| format!("row {}: bad {field}", line + 1);
        let num = |i: usize, field: &str| row[i].parse::<usize>().map_err(|_| bad(field));
        let float = |i: usize, field: &str| row[i].parse::<f64>().map_err(|_| bad(field));
        out.push(RunRecord {
            problem_kind: row[0].parse().map_err(|_| bad("problem"))?,
            level: num(1, "level")?,
            instance: num(2, "instance")?,
            rep: num(3, "rep")?,
            topology: row[4].parse::<Topology>().map_err(|_| bad("topology"))?,
            success: match &row[5] {
                "0" => false,
                "1" => true,
                _ => return Err(bad("success")),
            },
            final_mean_score: float(6, "final_mean_score")?,
            final_best_score: float(7, "final_best_score")?,
            first_success_round: match &row[8] {
                "" => None,
                s => Some(s.parse().map_err(|_| bad("first_success_round"))?),
            },
        });
    }
    Ok(out)
}
