//! Trajectory CSV and JSON files.
//!
//! Both carry the columns `t,C,P,B,R,region,B1,B2,u1,u2,u3,rho_pp,
//! singlet_pop,trace_err`. CSV numbers use 17 significant digits; JSON
//! numbers use the shortest representation that round-trips.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use cpb_core::trajectory::TrajectoryRecord;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const COLUMNS: [&str; 14] = [
    "t",
    "C",
    "P",
    "B",
    "R",
    "region",
    "B1",
    "B2",
    "u1",
    "u2",
    "u3",
    "rho_pp",
    "singlet_pop",
    "trace_err",
];

/// Largest `|B²/4 − P − C² − R|` accepted when reading a file back.
pub const IMPORT_IDENTITY_TOL: f64 = 1e-9;

/// One exported row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordRow {
    pub t: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub region: u8,
    #[serde(rename = "B1")]
    pub b1: f64,
    #[serde(rename = "B2")]
    pub b2: f64,
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
    pub rho_pp: f64,
    pub singlet_pop: f64,
    pub trace_err: f64,
}

impl From<&TrajectoryRecord> for RecordRow {
    fn from(r: &TrajectoryRecord) -> Self {
        let t = &r.triplet;
        Self {
            t: r.t,
            c: t.c,
            p: t.p,
            b: t.b,
            r: t.r,
            region: t.region.index(),
            b1: t.b1,
            b2: t.b2,
            u1: t.u1,
            u2: t.u2,
            u3: t.u3,
            rho_pp: r.rho_pp,
            singlet_pop: r.singlet_pop,
            trace_err: r.trace_err,
        }
    }
}

impl RecordRow {
    pub fn identity_residual(&self) -> f64 {
        (self.b * self.b / 4.0 - self.p - self.c * self.c - self.r).abs()
    }

    fn floats(&self) -> [f64; 13] {
        [
            self.t,
            self.c,
            self.p,
            self.b,
            self.r,
            self.b1,
            self.b2,
            self.u1,
            self.u2,
            self.u3,
            self.rho_pp,
            self.singlet_pop,
            self.trace_err,
        ]
    }
}

pub fn rows(records: &[TrajectoryRecord]) -> Vec<RecordRow> {
    records.iter().map(RecordRow::from).collect()
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes the CSV form to any sink.
pub fn write_csv_to<W: Write>(out: W, rows: &[RecordRow]) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for row in rows {
        let f = row.floats();
        let mut fields: Vec<String> = f[..5].iter().map(|&x| sci(x)).collect();
        fields.push(row.region.to_string());
        fields.extend(f[5..].iter().map(|&x| sci(x)));
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(path: &Path, rows: &[RecordRow]) -> Result<()> {
    let file = File::create(path).map_err(CliError::io(path))?;
    write_csv_to(BufWriter::new(file), rows).map_err(CliError::csv(path))
}

pub fn write_json(path: &Path, rows: &[RecordRow]) -> Result<()> {
    let file = File::create(path).map_err(CliError::io(path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, rows).map_err(CliError::json(path))?;
    w.write_all(b"\n").map_err(CliError::io(path))?;
    w.flush().map_err(CliError::io(path))
}

pub fn read_csv(path: &Path) -> Result<Vec<RecordRow>> {
    let file = File::open(path).map_err(CliError::io(path))?;
    let mut r = csv::Reader::from_reader(file);
    let headers = r.headers().map_err(CliError::csv(path))?.clone();
    if !headers.iter().eq(COLUMNS) {
        return Err(CliError::format(
            path,
            format!(
                "expected columns {}, found {}",
                COLUMNS.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<RecordRow>, _>>()
        .map_err(CliError::csv(path))?;
    check_rows(path, &rows)?;
    Ok(rows)
}

pub fn read_json(path: &Path) -> Result<Vec<RecordRow>> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    let rows: Vec<RecordRow> = serde_json::from_str(&text).map_err(CliError::json(path))?;
    check_rows(path, &rows)?;
    Ok(rows)
}

fn is_json(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// JSON for `*.json`, CSV otherwise.
pub fn write_records(path: &Path, rows: &[RecordRow]) -> Result<()> {
    if is_json(path) {
        write_json(path, rows)
    } else {
        write_csv(path, rows)
    }
}

pub fn read_records(path: &Path) -> Result<Vec<RecordRow>> {
    if is_json(path) {
        read_json(path)
    } else {
        read_csv(path)
    }
}

fn check_rows(path: &Path, rows: &[RecordRow]) -> Result<()> {
    for (i, row) in rows.iter().enumerate() {
        let line = i + 1;
        if row.floats().iter().any(|x| !x.is_finite()) {
            return Err(CliError::format(
                path,
                format!("record {line}: non-finite value"),
            ));
        }
        if !(1..=4).contains(&row.region) {
            return Err(CliError::format(
                path,
                format!("record {line}: region {} is not 1-4", row.region),
            ));
        }
        let res = row.identity_residual();
        if res > IMPORT_IDENTITY_TOL {
            return Err(CliError::format(
                path,
                format!(
                    "record {line}: B²/4 - P - C² - R = {res:e} exceeds {IMPORT_IDENTITY_TOL:e}"
                ),
            ));
        }
        if i > 0 && !(row.t > rows[i - 1].t) {
            return Err(CliError::format(
                path,
                format!("record {line}: t is not increasing"),
            ));
        }
    }
    Ok(())
}
