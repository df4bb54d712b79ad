//! Deterministic simulation of clients walking under ceiling APs while a
//! server streams downlink traffic to them.
//!
//! Each client follows a generated or supplied trace and reports its
//! position at `report_hz`. The controller detects switch-line crossings,
//! picks the next AP, and (optionally) ECN-marks downlink packets ahead of a
//! predicted handoff. APs transmit from a shared FIFO at the SNR-dependent
//! rate with MAC retries; a handoff discards the client's packets still
//! queued at the old AP and silences it for `switch_latency_s`.

mod engine;
mod metrics;
mod scenario;
mod trace;

use alloc::vec::Vec;

pub use engine::{run, CONTENTION_EFFICIENCY, MAX_CWND};
pub use metrics::{
    median_sorted, ClientMetrics, HandoffRecord, MetricsReport, PacketCounts, PacketEvent, PacketEventKind,
};
pub use scenario::{
    ClientSpec, HandoffPolicy, LayoutSpec, MobilitySpec, RfMode, Room, Scenario, Transport, Workload,
    DEFAULT_BEAMWIDTH_DEG, DEFAULT_GAIN_DB, DEFAULT_SPEED_MPS, DEFAULT_TOUR_JITTER_M, DEFAULT_WARMUP_M,
};
pub use trace::{generate_trace, tour_cell_center, TOUR_ORDER, TRACE_HZ};

use crate::error::{Error, Result};
use crate::estimator::{estimate_ap_position, SampleSet, SnrScale};
use crate::hash::mix;
use crate::layout::switch_lines_for;
use crate::mobility::MobilityTrace;
use crate::radio::{snr_at, ChannelParams};
use crate::selector::{run_selection, SelectionConfig, SelectionRun};

/// Per-seed outcome of a DiRF/OmRF comparison.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CompareRow {
    pub seed: u64,
    /// Mean per-client throughput, Mbps.
    pub dirf_mbps: f64,
    pub omrf_mbps: f64,
    pub dirf_handoffs: usize,
    pub omrf_handoffs: usize,
    pub dirf_retransmissions: u64,
    pub omrf_retransmissions: u64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    /// Mean DiRF throughput over mean OmRF throughput across seeds.
    pub ratio: f64,
    pub throughput_delta_mbps: f64,
    pub handoff_delta: f64,
    pub retransmission_delta: f64,
}

/// Runs both scenarios on every seed. They must be identical except for
/// `mode`; `name` and `seed` are ignored.
pub fn compare(dirf: &Scenario, omrf: &Scenario, seeds: &[u64]) -> Result<CompareReport> {
    let aligned = Scenario {
        mode: omrf.mode,
        name: omrf.name.clone(),
        seed: omrf.seed,
        ..dirf.clone()
    };
    if aligned != *omrf {
        return Err(Error::MismatchedScenarios(first_difference(&aligned, omrf).into()));
    }
    if seeds.is_empty() {
        return Err(Error::param("seeds", "at least one seed is required"));
    }
    let mut rows = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let a = run(&Scenario { seed, ..dirf.clone() })?;
        let b = run(&Scenario { seed, ..omrf.clone() })?;
        rows.push(CompareRow {
            seed,
            dirf_mbps: a.mean_client_throughput_mbps(),
            omrf_mbps: b.mean_client_throughput_mbps(),
            dirf_handoffs: a.total_handoffs(),
            omrf_handoffs: b.total_handoffs(),
            dirf_retransmissions: a.totals().retransmissions,
            omrf_retransmissions: b.totals().retransmissions,
        });
    }
    let n = rows.len() as f64;
    let mean = |f: &dyn Fn(&CompareRow) -> f64| rows.iter().map(f).sum::<f64>() / n;
    let (d, o) = (mean(&|r| r.dirf_mbps), mean(&|r| r.omrf_mbps));
    Ok(CompareReport {
        ratio: if o > 0.0 { d / o } else { f64::INFINITY },
        throughput_delta_mbps: d - o,
        handoff_delta: mean(&|r| r.dirf_handoffs as f64 - r.omrf_handoffs as f64),
        retransmission_delta: mean(&|r| r.dirf_retransmissions as f64 - r.omrf_retransmissions as f64),
        rows,
    })
}

fn first_difference(a: &Scenario, b: &Scenario) -> &'static str {
    macro_rules! check {
        ($($f:ident),*) => {
            $(if a.$f != b.$f { return stringify!($f); })*
        };
    }
    check!(
        duration_s,
        room,
        layout,
        antenna,
        channel,
        loss,
        loss_enabled,
        bandwidth,
        clients,
        workload,
        policy,
        selector,
        direction_window_s,
        exact_estimation,
        estimator,
        scheduler_enabled,
        scheduler,
        switch_latency_s,
        rto_s,
        path_rtt_s,
        mac_retry_limit,
        report_hz,
        record_packets
    );
    "unknown"
}

/// Position error (m) of estimating the start AP from a `walk_m` wander in
/// its cell, measured at 10 Hz with the scenario's channel and estimator.
pub fn estimation_trial(sc: &Scenario, walk_m: f64, seed: u64) -> Result<f64> {
    sc.validate()?;
    let layout = sc.effective_layout()?;
    let speed = sc.clients.first().map_or(DEFAULT_SPEED_MPS, |c| c.speed_mps);
    let spec = MobilitySpec::Tour {
        phase: 0,
        warmup_m: walk_m,
        jitter_m: 0.0,
    };
    let trace = generate_trace(&spec, &sc.room, speed, mix(&[seed, 1, 0]), walk_m / speed)?;
    let ap = &layout.aps()[layout.nearest_ap(trace.samples()[0].pos)];
    let pattern = sc.antenna.for_ap(ap);
    let channel = ChannelParams {
        seed: mix(&[seed, sc.channel.seed]),
        ..sc.channel
    };
    let measurements = trace
        .samples()
        .iter()
        .map(|s| snr_at(ap, &pattern, &channel, s.pos).map(|snr| (s.pos, snr)))
        .collect::<Result<Vec<_>>>()?;
    let set = SampleSet::from_db(measurements, SnrScale::Linear, sc.estimator.pair_strategy)?;
    let est = estimate_ap_position(&set, &sc.estimator)?;
    Ok(est.position.dist(ap.position))
}

/// The trace client `i` follows in [`run`].
pub fn client_trace(sc: &Scenario, i: usize) -> Result<MobilityTrace> {
    let spec = sc
        .clients
        .get(i)
        .ok_or_else(|| Error::scenario("clients", "client index out of range"))?;
    generate_trace(
        &spec.mobility,
        &sc.room,
        spec.speed_mps,
        mix(&[sc.seed, engine::TAG_TRACE, i as u64]),
        sc.duration_s,
    )
}

/// Offline selection along `trace` with the scenario's layout, channel and
/// selector settings. The estimator sees the start AP's SNR at every trace
/// sample up to the first crossing, as the simulator's controller does.
pub fn select_on_trace(sc: &Scenario, trace: &MobilityTrace) -> Result<SelectionRun> {
    sc.validate()?;
    let layout = sc.effective_layout()?;
    let pts = trace.samples();
    if pts.len() < 2 {
        return Err(Error::InvalidTrace("need at least two samples".into()));
    }
    let start = layout.nearest_ap(pts[0].pos);
    let lines = switch_lines_for(&layout, start)?;
    let first_crossing = pts
        .windows(2)
        .position(|w| {
            lines
                .iter()
                .any(|l| crate::layout::crossed_switch_line(l, w[0].pos, w[1].pos))
        })
        .map_or(pts.len(), |i| i + 2);
    let ap = &layout.aps()[start];
    let pattern = sc.antenna.for_ap(ap);
    let channel = ChannelParams {
        seed: mix(&[sc.seed, sc.channel.seed]),
        ..sc.channel
    };
    let measurements = pts[..first_crossing]
        .iter()
        .map(|s| snr_at(ap, &pattern, &channel, s.pos).map(|snr| (s.pos, snr)))
        .collect::<Result<Vec<_>>>()?;
    let set = SampleSet::from_db(measurements, SnrScale::Linear, sc.estimator.pair_strategy)?;
    let cfg = SelectionConfig {
        mode: sc.selector,
        direction_window_s: sc.direction_window_s,
        estimator: sc.estimator,
        exact_estimation: sc.exact_estimation,
    };
    run_selection(trace, &layout, &set, &cfg)
}
