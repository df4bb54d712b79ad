//! Trajectory-driven ECN marking for downlink flows.
//!
//! With TCP throughput modelled as `B = sqrt(2/(p+α))·MSS/RTT`, choosing
//! `α = 2(MSS·Δt/(b·RTT))² − p` makes the flow deliver exactly `b` bits in the
//! `Δt` seconds left before the client reaches a switch line, so the AP
//! buffer holds little when the handoff happens.

use alloc::collections::VecDeque;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::hash::{mix, unit_open};
use crate::layout::SwitchLine;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MarkingMode {
    #[default]
    DeterministicStride,
    SeededRandom,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SchedulerConfig {
    pub mss_bits: f64,
    pub rtt_s: f64,
    pub buffer_bits: f64,
    pub safety_factor: f64,
    pub marking_mode: MarkingMode,
    /// Marking applies only while the predicted time to the switch line is
    /// at most this long.
    pub marking_horizon_s: f64,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        SchedulerConfig {
            mss_bits: 11680.0,
            rtt_s: 0.100,
            buffer_bits: 2.5e6,
            safety_factor: 0.8,
            marking_mode: MarkingMode::DeterministicStride,
            marking_horizon_s: 0.45,
        }
    }
}

impl SchedulerConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64, f: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(f, "must be positive and finite"))
            }
        };
        pos(self.mss_bits, "mss_bits")?;
        pos(self.rtt_s, "rtt_s")?;
        pos(self.buffer_bits, "buffer_bits")?;
        pos(self.marking_horizon_s, "marking_horizon_s")?;
        if !(self.safety_factor > 0.0 && self.safety_factor <= 1.0) {
            return Err(Error::param("safety_factor", "must be in (0, 1]"));
        }
        Ok(())
    }
}

pub fn time_to_switch(dist_to_line: f64, speed: f64) -> Result<f64> {
    if !(speed > 0.0) {
        return Err(Error::ZeroSpeed);
    }
    Ok(dist_to_line.max(0.0) / speed)
}

/// Unclamped, unscaled marking rate `2(MSS·Δt/(b·RTT))² − p`.
pub fn marking_rate_raw(delta_t: f64, cfg: &SchedulerConfig, loss_p: f64) -> f64 {
    let x = cfg.mss_bits * delta_t / (cfg.buffer_bits * cfg.rtt_s);
    2.0 * x * x - loss_p
}

pub fn marking_rate(delta_t: f64, cfg: &SchedulerConfig, loss_p: f64) -> f64 {
    (cfg.safety_factor * marking_rate_raw(delta_t, cfg, loss_p)).clamp(0.0, 1.0)
}

pub fn throughput_model(p: f64, alpha: f64, cfg: &SchedulerConfig) -> Result<f64> {
    let s = p + alpha;
    if s == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(libm::sqrt(2.0 / s) * cfg.mss_bits / cfg.rtt_s)
}

/// Stateless marking decision for the `packet_index`-th packet (from 1).
pub fn should_mark(packet_index: u64, alpha: f64, mode: MarkingMode, seed: u64) -> bool {
    if alpha <= 0.0 {
        return false;
    }
    if alpha >= 1.0 {
        return true;
    }
    match mode {
        MarkingMode::DeterministicStride => {
            let i = packet_index as f64;
            libm::floor(i * alpha) > libm::floor((i - 1.0) * alpha)
        }
        MarkingMode::SeededRandom => unit_open(mix(&[seed, packet_index])) < alpha,
    }
}

/// Per-flow marker used when α changes over time: stride mode keeps a
/// running accumulator so the mark fraction tracks the current α.
#[derive(Debug, Clone, Default)]
pub struct Marker {
    acc: f64,
    count: u64,
}

impl Marker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn next(&mut self, alpha: f64, mode: MarkingMode, seed: u64) -> bool {
        self.count += 1;
        let alpha = alpha.clamp(0.0, 1.0);
        match mode {
            MarkingMode::DeterministicStride => {
                let before = libm::floor(self.acc);
                self.acc += alpha;
                libm::floor(self.acc) > before
            }
            MarkingMode::SeededRandom => alpha > 0.0 && unit_open(mix(&[seed, self.count])) < alpha,
        }
    }
}

/// Time until the client reaches the nearest switch line it is approaching,
/// from its floor-plane velocity. `ZeroSpeed` when it approaches none.
pub fn time_to_nearest_line(lines: &[SwitchLine], pos: Vec3, velocity: Vec3) -> Result<f64> {
    let mut best = f64::INFINITY;
    for l in lines {
        let closing = velocity.floor().dot(l.normal);
        if closing > 0.0 {
            let d = (-l.signed_distance(pos)).max(0.0);
            best = best.min(time_to_switch(d, closing)?);
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::ZeroSpeed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BufferedPacket {
    pub id: u64,
    pub bits: f64,
    pub enqueued_at: f64,
}

/// FIFO AP buffer bounded in bits.
#[derive(Debug, Clone)]
pub struct ApBuffer {
    capacity_bits: f64,
    occupancy_bits: f64,
    queue: VecDeque<BufferedPacket>,
}

impl ApBuffer {
    pub fn new(capacity_bits: f64) -> Self {
        ApBuffer {
            capacity_bits,
            occupancy_bits: 0.0,
            queue: VecDeque::new(),
        }
    }

    pub fn capacity_bits(&self) -> f64 {
        self.capacity_bits
    }

    pub fn occupancy_bits(&self) -> f64 {
        self.occupancy_bits
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    /// Appends the packet, or hands it back when it does not fit.
    pub fn push(&mut self, p: BufferedPacket) -> core::result::Result<(), BufferedPacket> {
        if self.occupancy_bits + p.bits > self.capacity_bits {
            return Err(p);
        }
        self.occupancy_bits += p.bits;
        self.queue.push_back(p);
        Ok(())
    }

    pub fn pop(&mut self) -> Option<BufferedPacket> {
        let p = self.queue.pop_front()?;
        self.occupancy_bits -= p.bits;
        if self.queue.is_empty() {
            self.occupancy_bits = 0.0;
        }
        Some(p)
    }

    /// Removes and returns the oldest packet matching `pred`.
    pub fn take_first(&mut self, pred: impl FnMut(&BufferedPacket) -> bool) -> Option<BufferedPacket> {
        let i = self.queue.iter().position(pred)?;
        let p = self.queue.remove(i)?;
        self.occupancy_bits -= p.bits;
        if self.queue.is_empty() {
            self.occupancy_bits = 0.0;
        }
        Some(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = &BufferedPacket> {
        self.queue.iter()
    }

    /// Removes every packet matching `pred`, preserving the order of the rest.
    pub fn drain_where(&mut self, mut pred: impl FnMut(&BufferedPacket) -> bool) -> alloc::vec::Vec<BufferedPacket> {
        let mut removed = alloc::vec::Vec::new();
        let mut kept = VecDeque::with_capacity(self.queue.len());
        for p in self.queue.drain(..) {
            if pred(&p) {
                removed.push(p);
            } else {
                kept.push_back(p);
            }
        }
        self.queue = kept;
        self.occupancy_bits = self.queue.iter().map(|p| p.bits).sum();
        removed
    }
}
