//! Packet-level discrete-event simulation of one scenario.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::Result;
use crate::estimator::{estimate_ap_position, InitStrategy, SampleSet, SnrScale};
use crate::geometry::Vec3;
use crate::hash::{mix, unit_open};
use crate::layout::{switch_lines_for, ApId, ApLayout, SwitchLine};
use crate::mobility::MobilityTrace;
use crate::radio::{loss_prob, phy_rate, snr_at, AntennaPattern, ChannelParams, PhyRateTable};
use crate::scheduler::{marking_rate, time_to_nearest_line, ApBuffer, BufferedPacket, Marker};
use crate::selector::{trailing_direction, Selector};

use super::metrics::{
    median_sorted, ClientMetrics, HandoffRecord, MetricsReport, PacketCounts, PacketEvent, PacketEventKind,
};
use super::scenario::{HandoffPolicy, Scenario, Transport};
use super::trace::generate_trace;

pub(super) const TAG_TRACE: u64 = 1;
const TAG_MAC: u64 = 2;
const TAG_MARK: u64 = 3;

/// Airtime efficiency when an AP serves more than one associated client.
pub const CONTENTION_EFFICIENCY: f64 = 0.9;
/// Congestion window ceiling, packets.
pub const MAX_CWND: f64 = 10_000.0;
const INITIAL_CWND: f64 = 10.0;
const NO_PACKET: u64 = u64::MAX;

#[derive(Debug, Clone, Copy)]
enum Ev {
    Report { client: usize, k: u64 },
    Arrive { pkt: u64 },
    TxDone { ap: ApId, gen: u64, pkt: u64, ok: bool },
    Ack { pkt: u64 },
    Rto { pkt: u64 },
    HandoffDone { client: usize, gen: u64 },
    UdpSend { client: usize, k: u64 },
}

struct Entry {
    t: f64,
    seq: u64,
    ev: Ev,
}

impl PartialEq for Entry {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Entry {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, o: &Self) -> Ordering {
        o.t.total_cmp(&self.t).then(o.seq.cmp(&self.seq))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PktState {
    Wired,
    Buffered,
    OnAir,
    Delivered,
    Lost,
    Dropped,
}

#[derive(Debug, Clone, Copy)]
struct Pkt {
    client: u32,
    sent_at: f64,
    state: PktState,
    ecn: bool,
    handoff_loss: bool,
}

struct Tcp {
    cwnd: f64,
    ssthresh: f64,
    inflight: u64,
    last_reduce: f64,
}

struct Client {
    trace: MobilityTrace,
    ap: ApId,
    in_handoff: bool,
    handoff_gen: u64,
    lines: Vec<SwitchLine>,
    selector: Option<Selector>,
    samples: Vec<(Vec3, f64)>,
    estimation_error: Option<f64>,
    prev_pos: Vec3,
    speed: f64,
    alpha: f64,
    marker: Marker,
    tcp: Tcp,
    counts: PacketCounts,
    delivered_bits: f64,
    bins: Vec<f64>,
    handoffs: Vec<HandoffRecord>,
    awaiting_first_delivery: Option<usize>,
}

struct Ap {
    buffer: ApBuffer,
    busy: bool,
    gen: u64,
    serving: u64,
}

struct Sim<'a> {
    sc: &'a Scenario,
    layout: ApLayout,
    patterns: Vec<AntennaPattern>,
    channel: ChannelParams,
    rates: PhyRateTable,
    clients: Vec<Client>,
    aps: Vec<Ap>,
    pkts: Vec<Pkt>,
    heap: BinaryHeap<Entry>,
    seq: u64,
    now: f64,
    log: Vec<PacketEvent>,
}

/// Runs `scenario` to completion. Deterministic in the scenario (including
/// its seed).
pub fn run(scenario: &Scenario) -> Result<MetricsReport> {
    scenario.validate()?;
    let mut sim = Sim::new(scenario)?;
    sim.start();
    sim.run_loop()?;
    Ok(sim.finish())
}

impl<'a> Sim<'a> {
    fn new(sc: &'a Scenario) -> Result<Self> {
        let layout = sc.effective_layout()?;
        let patterns = layout.aps().iter().map(|a| sc.antenna.for_ap(a)).collect();
        let channel = ChannelParams {
            seed: mix(&[sc.seed, sc.channel.seed]),
            ..sc.channel
        };
        let aps = (0..layout.len())
            .map(|_| Ap {
                buffer: ApBuffer::new(sc.scheduler.buffer_bits),
                busy: false,
                gen: 0,
                serving: NO_PACKET,
            })
            .collect();
        let nbins = libm::ceil(sc.duration_s) as usize;
        let mut sim = Sim {
            sc,
            layout,
            patterns,
            channel,
            rates: PhyRateTable::default(),
            clients: Vec::with_capacity(sc.clients.len()),
            aps,
            pkts: Vec::new(),
            heap: BinaryHeap::new(),
            seq: 0,
            now: 0.0,
            log: Vec::new(),
        };
        for (i, spec) in sc.clients.iter().enumerate() {
            let trace = generate_trace(
                &spec.mobility,
                &sc.room,
                spec.speed_mps,
                mix(&[sc.seed, TAG_TRACE, i as u64]),
                sc.duration_s,
            )?;
            let start = trace.samples()[0].pos;
            let ap = match sc.policy {
                HandoffPolicy::Direction => sim.layout.nearest_ap(start),
                HandoffPolicy::GreedySnr => sim.best_snr_ap(start),
            };
            let selector = match sc.policy {
                HandoffPolicy::Direction if sim.layout.len() > 1 => {
                    Some(Selector::new(sim.layout.clone(), ap, sc.selector)?)
                }
                _ => None,
            };
            sim.clients.push(Client {
                lines: switch_lines_for(&sim.layout, ap)?,
                trace,
                ap,
                in_handoff: false,
                handoff_gen: 0,
                selector,
                samples: Vec::new(),
                estimation_error: None,
                prev_pos: start,
                speed: 0.0,
                alpha: 0.0,
                marker: Marker::new(),
                tcp: Tcp {
                    cwnd: INITIAL_CWND,
                    ssthresh: MAX_CWND,
                    inflight: 0,
                    last_reduce: f64::NEG_INFINITY,
                },
                counts: PacketCounts::default(),
                delivered_bits: 0.0,
                bins: alloc::vec![0.0; nbins],
                handoffs: Vec::new(),
                awaiting_first_delivery: None,
            });
        }
        Ok(sim)
    }

    fn push(&mut self, t: f64, ev: Ev) {
        self.seq += 1;
        self.heap.push(Entry { t, seq: self.seq, ev });
    }

    fn record(&mut self, kind: PacketEventKind, client: usize, packet: u64, ap: ApId) {
        if self.sc.record_packets {
            self.log.push(PacketEvent {
                t: self.now,
                kind,
                client,
                packet,
                ap,
            });
        }
    }

    fn pos(&self, c: usize, t: f64) -> Vec3 {
        let tr = &self.clients[c].trace;
        let t = t.clamp(tr.start_time(), tr.end_time());
        tr.position_at(t).unwrap_or(tr.samples()[0].pos)
    }

    fn snr(&self, ap: ApId, pos: Vec3) -> f64 {
        // a client never sits exactly at a ceiling AP; treat it as a perfect link
        snr_at(&self.layout.aps()[ap], &self.patterns[ap], &self.channel, pos).unwrap_or(f64::INFINITY)
    }

    fn best_snr_ap(&self, pos: Vec3) -> ApId {
        let mut best = 0;
        let mut best_snr = f64::NEG_INFINITY;
        for a in 0..self.layout.len() {
            let s = self.snr(a, pos);
            if s > best_snr {
                best_snr = s;
                best = a;
            }
        }
        best
    }

    fn start(&mut self) {
        if self.sc.duration_s <= 0.0 {
            return;
        }
        for c in 0..self.clients.len() {
            self.push(0.0, Ev::Report { client: c, k: 0 });
            match self.sc.workload.transport {
                Transport::Tcp => self.tcp_send_window(c),
                Transport::Udp => self.push(0.0, Ev::UdpSend { client: c, k: 0 }),
            }
        }
    }

    fn run_loop(&mut self) -> Result<()> {
        while let Some(Entry { t, ev, .. }) = self.heap.pop() {
            if t >= self.sc.duration_s {
                break;
            }
            self.now = t;
            match ev {
                Ev::Report { client, k } => self.on_report(client, k)?,
                Ev::Arrive { pkt } => self.on_arrive(pkt),
                Ev::TxDone { ap, gen, pkt, ok } => self.on_tx_done(ap, gen, pkt, ok),
                Ev::Ack { pkt } => self.on_ack(pkt),
                Ev::Rto { pkt } => self.on_rto(pkt),
                Ev::HandoffDone { client, gen } => self.on_handoff_done(client, gen),
                Ev::UdpSend { client, k } => {
                    self.send(client, false, false);
                    let interval = self.sc.workload.packet_bits / (self.sc.workload.udp_rate_mbps * 1e6);
                    self.push((k + 1) as f64 * interval, Ev::UdpSend { client, k: k + 1 });
                }
            }
        }
        Ok(())
    }

    // ---- traffic source ----

    fn send(&mut self, c: usize, retx: bool, handoff_retx: bool) {
        let id = self.pkts.len() as u64;
        self.pkts.push(Pkt {
            client: c as u32,
            sent_at: self.now,
            state: PktState::Wired,
            ecn: false,
            handoff_loss: false,
        });
        let cl = &mut self.clients[c];
        cl.counts.sent += 1;
        if retx {
            cl.counts.retransmissions += 1;
            if handoff_retx {
                cl.counts.handoff_retransmissions += 1;
            }
        } else if self.sc.workload.transport == Transport::Tcp {
            cl.tcp.inflight += 1;
        }
        self.push(self.now + self.sc.path_rtt_s / 2.0, Ev::Arrive { pkt: id });
    }

    fn tcp_send_window(&mut self, c: usize) {
        while (self.clients[c].tcp.inflight as f64) < libm::floor(self.clients[c].tcp.cwnd) {
            self.send(c, false, false);
        }
    }

    /// Multiplicative decrease, at most once per window: signals about
    /// packets sent before the previous decrease are ignored.
    fn tcp_reduce(&mut self, c: usize, sent_at: f64) {
        let tcp = &mut self.clients[c].tcp;
        if sent_at > tcp.last_reduce {
            tcp.ssthresh = (tcp.cwnd / 2.0).max(2.0);
            tcp.cwnd = tcp.ssthresh;
            tcp.last_reduce = self.now;
        }
    }

    fn on_ack(&mut self, pkt: u64) {
        let p = self.pkts[pkt as usize];
        let c = p.client as usize;
        let tcp = &mut self.clients[c].tcp;
        tcp.inflight -= 1;
        if p.ecn {
            self.record(PacketEventKind::EcnEcho, c, pkt, self.clients[c].ap);
            self.tcp_reduce(c, p.sent_at);
        } else {
            let tcp = &mut self.clients[c].tcp;
            tcp.cwnd += if tcp.cwnd < tcp.ssthresh { 1.0 } else { 1.0 / tcp.cwnd };
            tcp.cwnd = tcp.cwnd.min(MAX_CWND);
        }
        self.tcp_send_window(c);
    }

    fn on_rto(&mut self, pkt: u64) {
        let p = self.pkts[pkt as usize];
        let c = p.client as usize;
        self.record(PacketEventKind::RtoFire, c, pkt, self.clients[c].ap);
        self.tcp_reduce(c, p.sent_at);
        self.send(c, true, p.handoff_loss);
        self.tcp_send_window(c);
    }

    /// Marks `pkt` as lost and, for TCP, arms its retransmission.
    fn lose(&mut self, pkt: u64, state: PktState, handoff: bool) {
        let p = &mut self.pkts[pkt as usize];
        p.state = state;
        p.handoff_loss = handoff;
        let (c, sent_at) = (p.client as usize, p.sent_at);
        let ap = self.clients[c].ap;
        match state {
            PktState::Lost => {
                self.clients[c].counts.lost_in_channel += 1;
                self.record(PacketEventKind::PacketLoss, c, pkt, ap);
            }
            _ => {
                self.clients[c].counts.dropped_at_buffer += 1;
                self.record(PacketEventKind::BufferDrop, c, pkt, ap);
            }
        }
        if self.sc.workload.transport == Transport::Tcp {
            self.push((sent_at + self.sc.rto_s).max(self.now), Ev::Rto { pkt });
        }
    }

    // ---- controller and APs ----

    fn on_arrive(&mut self, pkt: u64) {
        let c = self.pkts[pkt as usize].client as usize;
        let ap = self.clients[c].ap;
        self.record(PacketEventKind::ArrivalAtController, c, pkt, ap);
        if self.sc.scheduler_enabled && self.sc.workload.transport == Transport::Tcp {
            let cl = &mut self.clients[c];
            let seed = mix(&[self.sc.seed, TAG_MARK, c as u64]);
            if cl.marker.next(cl.alpha, self.sc.scheduler.marking_mode, seed) {
                cl.counts.ecn_marks += 1;
                self.pkts[pkt as usize].ecn = true;
                self.record(PacketEventKind::EcnMark, c, pkt, ap);
            }
        }
        let bp = BufferedPacket {
            id: pkt,
            bits: self.sc.workload.packet_bits,
            enqueued_at: self.now,
        };
        if self.aps[ap].buffer.push(bp).is_err() {
            self.lose(pkt, PktState::Dropped, false);
            return;
        }
        self.pkts[pkt as usize].state = PktState::Buffered;
        self.record(PacketEventKind::ForwardToAp, c, pkt, ap);
        self.kick(ap);
    }

    fn associated_count(&self, ap: ApId) -> usize {
        self.clients.iter().filter(|c| c.ap == ap).count()
    }

    /// Starts the next transmission at `ap` if it is idle.
    fn kick(&mut self, ap: ApId) {
        if self.aps[ap].busy {
            return;
        }
        let (pkts, clients) = (&self.pkts, &self.clients);
        let next = self.aps[ap].buffer.take_first(|b| {
            let cl = &clients[pkts[b.id as usize].client as usize];
            cl.ap == ap && !cl.in_handoff
        });
        let Some(bp) = next else { return };
        let c = self.pkts[bp.id as usize].client as usize;
        let pos = self.pos(c, self.now);
        let snr = self.snr(ap, pos);
        let bw = self.sc.bandwidth;
        let mut rate = phy_rate(&self.rates, snr, bw);
        let mut p_loss = if self.sc.loss_enabled {
            loss_prob(&self.sc.loss, snr, self.clients[c].speed)
        } else {
            0.0
        };
        if rate == 0.0 {
            rate = self.rates.basic_rate(bw);
            p_loss = 1.0;
        }
        let eff = if self.associated_count(ap) >= 2 {
            CONTENTION_EFFICIENCY
        } else {
            1.0
        };
        let tx_time = bp.bits / (rate * 1e6 * eff);
        let mut attempts = 0;
        let mut ok = false;
        for k in 0..=self.sc.mac_retry_limit as u64 {
            attempts += 1;
            if unit_open(mix(&[self.sc.seed, TAG_MAC, bp.id, k])) >= p_loss {
                ok = true;
                break;
            }
        }
        self.pkts[bp.id as usize].state = PktState::OnAir;
        let a = &mut self.aps[ap];
        a.busy = true;
        a.serving = bp.id;
        let gen = a.gen;
        self.push(
            self.now + attempts as f64 * tx_time,
            Ev::TxDone {
                ap,
                gen,
                pkt: bp.id,
                ok,
            },
        );
    }

    fn on_tx_done(&mut self, ap: ApId, gen: u64, pkt: u64, ok: bool) {
        if self.aps[ap].gen != gen {
            return;
        }
        self.aps[ap].busy = false;
        self.aps[ap].serving = NO_PACKET;
        if ok {
            self.deliver(pkt, ap);
        } else {
            self.lose(pkt, PktState::Lost, false);
        }
        self.kick(ap);
    }

    fn deliver(&mut self, pkt: u64, ap: ApId) {
        let bits = self.sc.workload.packet_bits;
        let c = self.pkts[pkt as usize].client as usize;
        self.pkts[pkt as usize].state = PktState::Delivered;
        let now = self.now;
        let cl = &mut self.clients[c];
        cl.counts.delivered += 1;
        cl.delivered_bits += bits;
        if let Some(b) = cl.bins.get_mut(libm::floor(now) as usize) {
            *b += bits;
        }
        if let Some(h) = cl.awaiting_first_delivery.take() {
            cl.handoffs[h].latency_s = now - cl.handoffs[h].t_start;
        }
        self.record(PacketEventKind::DeliverToClient, c, pkt, ap);
        if self.sc.workload.transport == Transport::Tcp {
            self.push(now + self.sc.path_rtt_s / 2.0, Ev::Ack { pkt });
        }
    }

    // ---- mobility, selection, handoff ----

    fn on_report(&mut self, c: usize, k: u64) -> Result<()> {
        let pos = self.pos(c, self.now);
        let prev = self.clients[c].prev_pos;
        self.clients[c].speed = if k == 0 {
            0.0
        } else {
            pos.dist(prev) * self.sc.report_hz
        };
        let window = self.sc.direction_window_s;
        let direction = trailing_direction(
            &self.clients[c].trace,
            self.now.min(self.clients[c].trace.end_time()),
            window,
        )
        .unwrap_or(Vec3::ZERO);

        match self.sc.policy {
            HandoffPolicy::Direction => self.direction_policy(c, k, prev, pos, direction)?,
            HandoffPolicy::GreedySnr => {
                let best = self.best_snr_ap(pos);
                if best != self.clients[c].ap && !self.clients[c].in_handoff {
                    self.start_handoff(c, best, None)?;
                }
            }
        }

        self.clients[c].alpha = self.marking_alpha(c, pos, direction);
        self.clients[c].prev_pos = pos;
        self.push((k + 1) as f64 / self.sc.report_hz, Ev::Report { client: c, k: k + 1 });
        Ok(())
    }

    fn direction_policy(&mut self, c: usize, k: u64, prev: Vec3, pos: Vec3, direction: Vec3) -> Result<()> {
        let Some(sel) = self.clients[c].selector.as_ref() else {
            return Ok(());
        };
        let anchored = sel.anchored().is_some();
        let crossing = if k == 0 { None } else { sel.crossing(prev, pos) };
        if !anchored && !self.sc.exact_estimation {
            let snr = self.snr(self.clients[c].ap, pos);
            self.clients[c].samples.push((pos, snr));
        }
        let Some(line) = crossing else {
            return Ok(());
        };
        if !anchored {
            self.anchor(c)?;
        }
        let truth = self
            .layout
            .nearest_ap(self.pos(c, self.now + self.sc.direction_window_s));
        let sel = self.clients[c].selector.as_mut().expect("selector present");
        if let Some(to) = sel.decide(&line, direction, pos)? {
            self.start_handoff(c, to, Some(to == truth))?;
        }
        Ok(())
    }

    /// Estimates the current AP's position from the samples gathered so far
    /// and anchors the client's selector there.
    fn anchor(&mut self, c: usize) -> Result<()> {
        let ap = self.clients[c].ap;
        let truth = self.layout.aps()[ap].position;
        let cl = &mut self.clients[c];
        let sel = cl.selector.as_mut().expect("selector present");
        if self.sc.exact_estimation {
            sel.anchor_exact();
            cl.estimation_error = Some(0.0);
            return Ok(());
        }
        let cfg = &self.sc.estimator;
        let fallback = || {
            let n = cl.samples.len().max(1) as f64;
            let c = cl.samples.iter().fold(Vec3::ZERO, |a, s| a + s.0) * (1.0 / n);
            match cfg.init {
                InitStrategy::Centroid { height } => Vec3::new(c.x, c.y, height),
                InitStrategy::Fixed { at } => at,
            }
        };
        // too few distinct samples leaves the initial guess as the estimate
        let est = SampleSet::from_db(cl.samples.iter().copied(), SnrScale::Linear, cfg.pair_strategy)
            .and_then(|set| estimate_ap_position(&set, cfg))
            .map(|e| e.position)
            .unwrap_or_else(|_| fallback());
        sel.anchor_current_at(est)?;
        cl.estimation_error = Some(est.dist(truth));
        cl.samples = Vec::new();
        Ok(())
    }

    fn marking_alpha(&self, c: usize, pos: Vec3, direction: Vec3) -> f64 {
        if !self.sc.scheduler_enabled || self.sc.workload.transport != Transport::Tcp {
            return 0.0;
        }
        let cl = &self.clients[c];
        let span = self.now - (self.now - self.sc.direction_window_s).max(0.0);
        if span <= 0.0 {
            return 0.0;
        }
        let velocity = direction * (1.0 / span);
        let Ok(dt) = time_to_nearest_line(&cl.lines, pos, velocity) else {
            return 0.0;
        };
        if dt > self.sc.scheduler.marking_horizon_s {
            return 0.0;
        }
        // losses TCP sees are those surviving every MAC retry
        let per_attempt = if self.sc.loss_enabled {
            loss_prob(&self.sc.loss, self.snr(cl.ap, pos), cl.speed)
        } else {
            0.0
        };
        let residual = libm::pow(per_attempt, (self.sc.mac_retry_limit + 1) as f64);
        marking_rate(dt, &self.sc.scheduler, residual)
    }

    fn start_handoff(&mut self, c: usize, to: ApId, correct: Option<bool>) -> Result<()> {
        let from = self.clients[c].ap;
        let pkts = &self.pkts;
        let flushed = self.aps[from]
            .buffer
            .drain_where(|b| pkts[b.id as usize].client as usize == c);
        let mut buffered_bits: f64 = flushed.iter().map(|b| b.bits).sum();
        let serving = self.aps[from].serving;
        let aborted = serving != NO_PACKET && self.pkts[serving as usize].client as usize == c;
        if aborted {
            buffered_bits += self.sc.workload.packet_bits;
        }
        self.record(PacketEventKind::HandoffStart, c, NO_PACKET, from);
        for b in &flushed {
            self.lose(b.id, PktState::Dropped, true);
        }
        if aborted {
            let a = &mut self.aps[from];
            a.gen += 1;
            a.busy = false;
            a.serving = NO_PACKET;
            self.lose(serving, PktState::Dropped, true);
        }

        let lines = switch_lines_for(&self.layout, to)?;
        let t_start = self.now;
        let cl = &mut self.clients[c];
        cl.ap = to;
        cl.lines = lines;
        cl.in_handoff = true;
        cl.handoff_gen += 1;
        cl.handoffs.push(HandoffRecord {
            t_start,
            from,
            to,
            buffered_bits,
            latency_s: f64::NAN,
            correct,
        });
        cl.awaiting_first_delivery = Some(cl.handoffs.len() - 1);
        let gen = cl.handoff_gen;
        self.push(self.now + self.sc.switch_latency_s, Ev::HandoffDone { client: c, gen });
        self.kick(from);
        Ok(())
    }

    fn on_handoff_done(&mut self, c: usize, gen: u64) {
        if self.clients[c].handoff_gen != gen {
            return;
        }
        self.clients[c].in_handoff = false;
        let ap = self.clients[c].ap;
        self.record(PacketEventKind::HandoffDone, c, NO_PACKET, ap);
        self.kick(ap);
    }

    fn finish(self) -> MetricsReport {
        let duration = self.sc.duration_s;
        let mut in_flight = alloc::vec![0u64; self.clients.len()];
        for p in &self.pkts {
            if matches!(p.state, PktState::Wired | PktState::Buffered | PktState::OnAir) {
                in_flight[p.client as usize] += 1;
            }
        }
        let clients = self
            .clients
            .into_iter()
            .enumerate()
            .map(|(i, cl)| {
                let mut cdf: Vec<f64> = cl
                    .bins
                    .iter()
                    .enumerate()
                    .map(|(b, bits)| {
                        let len = (duration - b as f64).min(1.0);
                        bits / len / 1e6
                    })
                    .collect();
                cdf.sort_by(f64::total_cmp);
                let judged: Vec<bool> = cl.handoffs.iter().filter_map(|h| h.correct).collect();
                let selection_accuracy =
                    (!judged.is_empty()).then(|| judged.iter().filter(|&&ok| ok).count() as f64 / judged.len() as f64);
                let mut counts = cl.counts;
                counts.in_flight_at_end = in_flight[i];
                ClientMetrics {
                    client: i,
                    mean_throughput_mbps: if duration > 0.0 {
                        cl.delivered_bits / duration / 1e6
                    } else {
                        0.0
                    },
                    median_throughput_mbps: median_sorted(&cdf),
                    throughput_cdf: cdf,
                    delivered_bits: cl.delivered_bits,
                    handoffs: cl.handoffs,
                    packets: counts,
                    estimation_error_m: cl.estimation_error,
                    selection_accuracy,
                }
            })
            .collect();
        MetricsReport {
            scenario: self.sc.name.clone(),
            seed: self.sc.seed,
            duration_s: duration,
            clients,
            packet_log: self.log,
        }
    }
}
