//! Result emission. Every output is a [`Table`] rendered as CSV or as a
//! JSON array of objects; both renderings come from the same cells, so they
//! carry identical numbers (floats at 6 significant digits).

use std::path::{Path, PathBuf};

use handoff_core::sim::{CompareReport, MetricsReport};
use serde_json::{Map, Number, Value};

use crate::csvio::write_atomic;
use crate::error::Result;
use crate::fmt::{g6, g6_value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Str(String),
    Int(u64),
    Float(f64),
    Bool(bool),
    Missing,
}

impl Cell {
    fn opt_float(v: Option<f64>) -> Cell {
        v.map_or(Cell::Missing, Cell::Float)
    }

    fn csv(&self) -> String {
        match self {
            Cell::Str(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Float(f) => g6(*f),
            Cell::Bool(b) => b.to_string(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Str(s) => Value::String(s.clone()),
            Cell::Int(i) => Value::Number((*i).into()),
            Cell::Float(f) => Number::from_f64(g6_value(*f)).map_or(Value::Null, Value::Number),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Missing => Value::Null,
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Str(s.into())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Str(s)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::csv)).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    pub fn to_json(&self) -> Vec<u8> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut out = serde_json::to_vec_pretty(&Value::Array(rows)).expect("json");
        out.push(b'\n');
        out
    }

    pub fn render(&self, f: Format) -> Vec<u8> {
        match f {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// Writes `<dir>/<stem>.<ext>` and returns the path.
    pub fn write(&self, dir: &Path, stem: &str, f: Format) -> Result<PathBuf> {
        let path = dir.join(format!("{stem}.{}", f.ext()));
        write_atomic(&path, &self.render(f))?;
        Ok(path)
    }
}

pub const SUMMARY_COLUMNS: [&str; 20] = [
    "scenario",
    "seed",
    "duration_s",
    "client",
    "mean_throughput_mbps",
    "median_throughput_mbps",
    "delivered_bits",
    "handoffs",
    "mean_handoff_latency_s",
    "buffered_bits_at_handoff",
    "sent",
    "delivered",
    "lost_in_channel",
    "dropped_at_buffer",
    "in_flight_at_end",
    "retransmissions",
    "handoff_retransmissions",
    "ecn_marks",
    "estimation_error_m",
    "selection_accuracy",
];

/// One row per client.
pub fn summary_table(r: &MetricsReport) -> Table {
    let mut t = Table::new(&SUMMARY_COLUMNS);
    for c in &r.clients {
        let lat: Vec<f64> = c
            .handoffs
            .iter()
            .map(|h| h.latency_s)
            .filter(|l| l.is_finite())
            .collect();
        let mean_lat = (!lat.is_empty()).then(|| lat.iter().sum::<f64>() / lat.len() as f64);
        let p = &c.packets;
        t.push(vec![
            r.scenario.as_str().into(),
            r.seed.into(),
            r.duration_s.into(),
            c.client.into(),
            c.mean_throughput_mbps.into(),
            c.median_throughput_mbps.into(),
            c.delivered_bits.into(),
            c.handoffs.len().into(),
            Cell::opt_float(mean_lat),
            c.buffered_bits_at_handoff().into(),
            p.sent.into(),
            p.delivered.into(),
            p.lost_in_channel.into(),
            p.dropped_at_buffer.into(),
            p.in_flight_at_end.into(),
            p.retransmissions.into(),
            p.handoff_retransmissions.into(),
            p.ecn_marks.into(),
            Cell::opt_float(c.estimation_error_m),
            Cell::opt_float(c.selection_accuracy),
        ]);
    }
    t
}

pub fn handoffs_table(r: &MetricsReport) -> Table {
    let mut t = Table::new(&[
        "client",
        "t_start",
        "from",
        "to",
        "buffered_bits",
        "latency_s",
        "correct",
    ]);
    for c in &r.clients {
        for h in &c.handoffs {
            t.push(vec![
                c.client.into(),
                h.t_start.into(),
                h.from.into(),
                h.to.into(),
                h.buffered_bits.into(),
                Cell::opt_float(h.latency_s.is_finite().then_some(h.latency_s)),
                h.correct.map_or(Cell::Missing, Cell::Bool),
            ]);
        }
    }
    t
}

/// Sorted per-second throughput samples with their empirical CDF level.
pub fn throughput_cdf_table(r: &MetricsReport) -> Table {
    let mut t = Table::new(&["client", "rank", "cdf", "throughput_mbps"]);
    for c in &r.clients {
        let n = c.throughput_cdf.len();
        for (i, &v) in c.throughput_cdf.iter().enumerate() {
            t.push(vec![
                c.client.into(),
                (i + 1).into(),
                ((i + 1) as f64 / n as f64).into(),
                v.into(),
            ]);
        }
    }
    t
}

/// Per-packet event log; handoff events leave `packet` empty.
pub fn packets_table(r: &MetricsReport) -> Table {
    let mut t = Table::new(&["t", "kind", "client", "packet", "ap"]);
    for e in &r.packet_log {
        t.push(vec![
            e.t.into(),
            e.kind.as_str().into(),
            e.client.into(),
            if e.packet == u64::MAX {
                Cell::Missing
            } else {
                e.packet.into()
            },
            e.ap.into(),
        ]);
    }
    t
}

pub fn compare_table(r: &CompareReport) -> Table {
    let mut t = Table::new(&[
        "seed",
        "dirf_mbps",
        "omrf_mbps",
        "ratio",
        "dirf_handoffs",
        "omrf_handoffs",
        "dirf_retransmissions",
        "omrf_retransmissions",
    ]);
    for row in &r.rows {
        t.push(vec![
            row.seed.into(),
            row.dirf_mbps.into(),
            row.omrf_mbps.into(),
            Cell::opt_float((row.omrf_mbps > 0.0).then(|| row.dirf_mbps / row.omrf_mbps)),
            row.dirf_handoffs.into(),
            row.omrf_handoffs.into(),
            row.dirf_retransmissions.into(),
            row.omrf_retransmissions.into(),
        ]);
    }
    t
}

pub fn compare_summary_table(r: &CompareReport) -> Table {
    let mut t = Table::new(&[
        "seeds",
        "ratio",
        "throughput_delta_mbps",
        "handoff_delta",
        "retransmission_delta",
    ]);
    t.push(vec![
        r.rows.len().into(),
        r.ratio.into(),
        r.throughput_delta_mbps.into(),
        r.handoff_delta.into(),
        r.retransmission_delta.into(),
    ]);
    t
}

/// Writes the summary plus handoff and CDF details, and the packet log when
/// the run recorded one. Returns the files written.
pub fn emit_report(r: &MetricsReport, dir: &Path, f: Format) -> Result<Vec<PathBuf>> {
    let mut out = vec![
        summary_table(r).write(dir, "summary", f)?,
        handoffs_table(r).write(dir, "handoffs", f)?,
        throughput_cdf_table(r).write(dir, "throughput_cdf", f)?,
    ];
    if !r.packet_log.is_empty() {
        out.push(packets_table(r).write(dir, "packets", f)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn empty() -> MetricsReport {
        MetricsReport {
            scenario: "empty".into(),
            seed: 1,
            duration_s: 0.0,
            clients: vec![],
            packet_log: vec![],
        }
    }

    #[test]
    fn empty_report_is_header_only() {
        let csv = String::from_utf8(summary_table(&empty()).to_csv()).unwrap();
        assert_eq!(csv, format!("{}\n", SUMMARY_COLUMNS.join(",")));
        assert_eq!(String::from_utf8(summary_table(&empty()).to_json()).unwrap(), "[]\n");
    }

    #[test]
    fn missing_values_are_blank_and_null() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![Cell::Missing, Cell::Float(f64::NAN)]);
        assert_eq!(String::from_utf8(t.to_csv()).unwrap(), "a,b\n,nan\n");
        assert!(String::from_utf8(t.to_json()).unwrap().contains("\"a\": null"));
    }
}
