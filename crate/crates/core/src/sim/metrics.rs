use alloc::string::String;
use alloc::vec::Vec;

use crate::layout::ApId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PacketCounts {
    pub sent: u64,
    pub delivered: u64,
    pub lost_in_channel: u64,
    pub dropped_at_buffer: u64,
    pub in_flight_at_end: u64,
    pub retransmissions: u64,
    /// Retransmissions of packets discarded by a handoff.
    pub handoff_retransmissions: u64,
    pub ecn_marks: u64,
}

impl PacketCounts {
    pub fn conserved(&self) -> bool {
        self.sent == self.delivered + self.lost_in_channel + self.dropped_at_buffer + self.in_flight_at_end
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HandoffRecord {
    pub t_start: f64,
    pub from: ApId,
    pub to: ApId,
    /// Bits of this client's traffic queued at the old AP when the handoff began.
    pub buffered_bits: f64,
    /// First delivery after the handoff minus its start; NaN if none followed.
    pub latency_s: f64,
    /// Whether the selected AP matched the geometric truth one direction
    /// window later (direction policy only).
    pub correct: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClientMetrics {
    pub client: usize,
    pub mean_throughput_mbps: f64,
    pub median_throughput_mbps: f64,
    /// Sorted per-second throughput samples, Mbps.
    pub throughput_cdf: Vec<f64>,
    pub delivered_bits: f64,
    pub handoffs: Vec<HandoffRecord>,
    pub packets: PacketCounts,
    pub estimation_error_m: Option<f64>,
    pub selection_accuracy: Option<f64>,
}

impl ClientMetrics {
    pub fn handoff_count(&self) -> usize {
        self.handoffs.len()
    }

    pub fn buffered_bits_at_handoff(&self) -> f64 {
        self.handoffs.iter().map(|h| h.buffered_bits).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PacketEventKind {
    ArrivalAtController,
    ForwardToAp,
    DeliverToClient,
    PacketLoss,
    BufferDrop,
    EcnMark,
    EcnEcho,
    RtoFire,
    HandoffStart,
    HandoffDone,
}

impl PacketEventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PacketEventKind::ArrivalAtController => "arrival_at_controller",
            PacketEventKind::ForwardToAp => "forward_to_ap",
            PacketEventKind::DeliverToClient => "deliver_to_client",
            PacketEventKind::PacketLoss => "packet_loss",
            PacketEventKind::BufferDrop => "buffer_drop",
            PacketEventKind::EcnMark => "ecn_mark",
            PacketEventKind::EcnEcho => "ecn_echo",
            PacketEventKind::RtoFire => "rto_fire",
            PacketEventKind::HandoffStart => "handoff_start",
            PacketEventKind::HandoffDone => "handoff_done",
        }
    }
}

/// One line of the optional per-packet log. Handoff events carry
/// `packet = u64::MAX`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PacketEvent {
    pub t: f64,
    pub kind: PacketEventKind,
    pub client: usize,
    pub packet: u64,
    pub ap: ApId,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricsReport {
    pub scenario: String,
    pub seed: u64,
    pub duration_s: f64,
    pub clients: Vec<ClientMetrics>,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub packet_log: Vec<PacketEvent>,
}

impl MetricsReport {
    /// Mean over clients of their mean throughput.
    pub fn mean_client_throughput_mbps(&self) -> f64 {
        if self.clients.is_empty() {
            return 0.0;
        }
        self.clients.iter().map(|c| c.mean_throughput_mbps).sum::<f64>() / self.clients.len() as f64
    }

    pub fn total_throughput_mbps(&self) -> f64 {
        self.clients.iter().map(|c| c.mean_throughput_mbps).sum()
    }

    pub fn total_handoffs(&self) -> usize {
        self.clients.iter().map(|c| c.handoffs.len()).sum()
    }

    pub fn totals(&self) -> PacketCounts {
        let mut t = PacketCounts::default();
        for c in &self.clients {
            let p = &c.packets;
            t.sent += p.sent;
            t.delivered += p.delivered;
            t.lost_in_channel += p.lost_in_channel;
            t.dropped_at_buffer += p.dropped_at_buffer;
            t.in_flight_at_end += p.in_flight_at_end;
            t.retransmissions += p.retransmissions;
            t.handoff_retransmissions += p.handoff_retransmissions;
            t.ecn_marks += p.ecn_marks;
        }
        t
    }
}

/// Median of an already sorted slice (0 when empty).
pub fn median_sorted(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        n if n % 2 == 1 => v[n / 2],
        n => 0.5 * (v[n / 2 - 1] + v[n / 2]),
    }
}
