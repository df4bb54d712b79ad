//! CSV contracts: traces `t,x,y,z`, samples `t,x,y,z,snr_db`, decisions
//! `t,from,to`. Readers require the exact header.

use std::fs;
use std::path::Path;

use handoff_core::mobility::TraceSample;
use handoff_core::selector::Decision;
use handoff_core::Vec3;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{AppError, Result};
use crate::fmt::g6;

pub const TRACE_HEADER: [&str; 4] = ["t", "x", "y", "z"];
pub const SAMPLE_HEADER: [&str; 5] = ["t", "x", "y", "z", "snr_db"];
pub const DECISION_HEADER: [&str; 3] = ["t", "from", "to"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct TraceRow {
    t: f64,
    x: f64,
    y: f64,
    z: f64,
}

/// One SNR measurement taken by a client at a known position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrSample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub snr_db: f64,
}

impl SnrSample {
    pub fn pos(&self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }
}

fn read_rows<T: DeserializeOwned>(path: &Path, header: &[&str]) -> Result<Vec<T>> {
    let text = fs::read_to_string(path).map_err(|e| AppError::parse(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let found = rdr.headers().map_err(|e| AppError::parse(path, e))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(AppError::parse(
            path,
            format!(
                "expected header `{}`, found `{}`",
                header.join(","),
                found.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    rdr.deserialize()
        .enumerate()
        .map(|(i, row)| row.map_err(|e| AppError::parse(path, format!("line {}: {e}", i + 2))))
        .collect()
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceSample>> {
    let rows: Vec<TraceRow> = read_rows(path, &TRACE_HEADER)?;
    Ok(rows
        .into_iter()
        .map(|r| TraceSample {
            t: r.t,
            pos: Vec3::new(r.x, r.y, r.z),
        })
        .collect())
}

pub fn read_samples(path: &Path) -> Result<Vec<SnrSample>> {
    read_rows(path, &SAMPLE_HEADER)
}

pub fn read_decisions(path: &Path) -> Result<Vec<Decision>> {
    read_rows(path, &DECISION_HEADER)
}

fn to_csv<const N: usize>(header: [&str; N], rows: impl Iterator<Item = [String; N]>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Traces and samples are input data, so they keep full precision.
pub fn trace_csv(samples: &[TraceSample]) -> Vec<u8> {
    to_csv(
        TRACE_HEADER,
        samples
            .iter()
            .map(|s| [s.t, s.pos.x, s.pos.y, s.pos.z].map(|v| v.to_string())),
    )
}

pub fn samples_csv(samples: &[SnrSample]) -> Vec<u8> {
    to_csv(
        SAMPLE_HEADER,
        samples
            .iter()
            .map(|s| [s.t, s.x, s.y, s.z, s.snr_db].map(|v| v.to_string())),
    )
}

pub fn decisions_csv(decisions: &[Decision]) -> Vec<u8> {
    to_csv(
        DECISION_HEADER,
        decisions
            .iter()
            .map(|d| [g6(d.t), d.from.to_string(), d.to.to_string()]),
    )
}

/// Writes through a temporary sibling and renames, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, bytes).map_err(|e| AppError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| AppError::io(path, e))
}
