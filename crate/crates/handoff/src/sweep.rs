//! Parameter sweeps: the cartesian product of `field=v1,v2,...` lists,
//! run in parallel with one independent simulation per point.

use std::str::FromStr;

use handoff_core::sim::{run, MetricsReport, Scenario};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use toml::Value;

use crate::error::{AppError, Result};
use crate::report::{Cell, Table};

pub const FIELDS: [&str; 11] = [
    "aps",
    "clients",
    "speed",
    "bandwidth",
    "seed",
    "scheduler",
    "selector",
    "policy",
    "mode",
    "transport",
    "duration",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Vary {
    pub field: String,
    pub values: Vec<String>,
}

impl FromStr for Vary {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (field, list) = s.split_once('=').ok_or("expected <field>=<v1>,<v2>,...")?;
        let field = field.trim();
        if !FIELDS.contains(&field) {
            return Err(format!("unknown sweep field `{field}` (one of: {})", FIELDS.join(", ")));
        }
        let values: Vec<String> = list
            .split(',')
            .map(|v| v.trim().to_string())
            .filter(|v| !v.is_empty())
            .collect();
        if values.is_empty() {
            return Err(format!("no values given for `{field}`"));
        }
        Ok(Vary {
            field: field.into(),
            values,
        })
    }
}

fn bad(field: &str, value: &str, why: impl std::fmt::Display) -> AppError {
    AppError::Usage(format!("--vary {field}={value}: {why}"))
}

fn num<T: FromStr>(field: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| bad(field, value, e))
}

fn variant<T: DeserializeOwned>(field: &str, value: &str) -> Result<T> {
    T::deserialize(Value::String(value.into())).map_err(|e| bad(field, value, e))
}

/// Copy of `sc` with one sweep field set.
pub fn apply(sc: &Scenario, field: &str, value: &str) -> Result<Scenario> {
    let mut out = sc.clone();
    match field {
        "aps" => out = sc.with_ap_count(num(field, value)?)?,
        "clients" => out = sc.with_client_count(num(field, value)?),
        "speed" => {
            let v: f64 = num(field, value)?;
            out.clients.iter_mut().for_each(|c| c.speed_mps = v);
        }
        "bandwidth" => {
            let v = if value.ends_with("mhz") {
                value.to_string()
            } else {
                format!("{value}mhz")
            };
            out.bandwidth = variant(field, &v)?;
        }
        "seed" => out.seed = num(field, value)?,
        "scheduler" => {
            out.scheduler_enabled = match value {
                "on" | "true" => true,
                "off" | "false" => false,
                _ => return Err(bad(field, value, "expected on or off")),
            }
        }
        "selector" => out.selector = variant(field, value)?,
        "policy" => out.policy = variant(field, value)?,
        "mode" => out.mode = variant(field, value)?,
        "transport" => out.workload.transport = variant(field, value)?,
        "duration" => out.duration_s = num(field, value)?,
        _ => return Err(AppError::Usage(format!("unknown sweep field `{field}`"))),
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    /// `field=value` pairs joined by `,`.
    pub label: String,
    pub scenario: Scenario,
}

/// Cartesian product of the lists, the first list varying slowest. Every
/// point is validated before anything runs.
pub fn expand(base: &Scenario, vary: &[Vary]) -> Result<Vec<SweepPoint>> {
    let mut points = vec![SweepPoint {
        label: String::new(),
        scenario: base.clone(),
    }];
    for v in vary {
        let mut next = Vec::with_capacity(points.len() * v.values.len());
        for p in &points {
            for value in &v.values {
                let sep = if p.label.is_empty() { "" } else { "," };
                next.push(SweepPoint {
                    label: format!("{}{sep}{}={value}", p.label, v.field),
                    scenario: apply(&p.scenario, &v.field, value)?,
                });
            }
        }
        points = next;
    }
    for p in &points {
        p.scenario.validate()?;
    }
    Ok(points)
}

/// Runs every point in parallel; results keep the order of `points`.
pub fn run_points(points: &[SweepPoint]) -> Result<Vec<MetricsReport>> {
    points
        .par_iter()
        .map(|p| run(&p.scenario).map_err(AppError::from))
        .collect()
}

pub fn sweep_table(points: &[SweepPoint], reports: &[MetricsReport]) -> Table {
    let mut t = Table::new(&[
        "point",
        "mean_client_throughput_mbps",
        "total_throughput_mbps",
        "handoffs",
        "retransmissions",
        "handoff_retransmissions",
        "ecn_marks",
        "delivered",
    ]);
    for (p, r) in points.iter().zip(reports) {
        let tot = r.totals();
        t.push(vec![
            Cell::Str(p.label.clone()),
            r.mean_client_throughput_mbps().into(),
            r.total_throughput_mbps().into(),
            r.total_handoffs().into(),
            tot.retransmissions.into(),
            tot.handoff_retransmissions.into(),
            tot.ecn_marks.into(),
            tot.delivered.into(),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use handoff_core::radio::Bandwidth;
    use handoff_core::selector::SelectorMode;
    use handoff_core::sim::RfMode;

    #[test]
    fn parses_lists() {
        let v: Vary = "aps=2, 4,6".parse().unwrap();
        assert_eq!(v.values, ["2", "4", "6"]);
        assert!("nope=1".parse::<Vary>().is_err());
        assert!("aps=".parse::<Vary>().is_err());
        assert!("aps".parse::<Vary>().is_err());
    }

    #[test]
    fn applies_fields() {
        let sc = Scenario::default();
        assert_eq!(apply(&sc, "bandwidth", "40").unwrap().bandwidth, Bandwidth::Mhz40);
        assert_eq!(
            apply(&sc, "selector", "relative").unwrap().selector,
            SelectorMode::Relative
        );
        assert_eq!(apply(&sc, "mode", "omrf").unwrap().mode, RfMode::Omrf);
        assert!(!apply(&sc, "scheduler", "off").unwrap().scheduler_enabled);
        assert_eq!(apply(&sc, "clients", "3").unwrap().clients.len(), 3);
        assert!(apply(&sc, "aps", "5").is_err());
        assert!(apply(&sc, "selector", "sideways").is_err());
    }

    #[test]
    fn product_order() {
        let vary = ["aps=2,4".parse().unwrap(), "seed=1,2,3".parse().unwrap()];
        let pts = expand(&Scenario::default(), &vary).unwrap();
        let labels: Vec<_> = pts.iter().map(|p| p.label.as_str()).collect();
        assert_eq!(labels[0], "aps=2,seed=1");
        assert_eq!(labels[5], "aps=4,seed=3");
        assert_eq!(pts[4].scenario.seed, 2);
    }

    #[test]
    fn invalid_point_fails_before_running() {
        let vary = ["speed=1,-1".parse().unwrap()];
        let e = expand(&Scenario::default(), &vary).unwrap_err();
        assert_eq!(e.exit_code(), 1);
    }
}
