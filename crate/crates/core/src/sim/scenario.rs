use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::estimator::EstimatorConfig;
use crate::geometry::Vec3;
use crate::layout::{ApDescriptor, ApLayout};
use crate::mobility::{TraceSample, DEFAULT_DIRECTION_WINDOW_S};
use crate::radio::{AntennaPattern, Bandwidth, ChannelParams, LossParams};
use crate::scheduler::SchedulerConfig;
use crate::selector::SelectorMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RfMode {
    /// Ceiling grid of directional APs.
    #[default]
    Dirf,
    /// One omni AP at the room center.
    Omrf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum HandoffPolicy {
    /// Switch-line crossing plus direction-based selection.
    #[default]
    Direction,
    /// Associate with the highest-SNR AP at every position report.
    GreedySnr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Transport {
    /// Window-based flow with ECN response and retransmission.
    #[default]
    Tcp,
    /// Constant-rate flow, no retransmission, ECN ignored.
    Udp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct Room {
    pub width_m: f64,
    pub depth_m: f64,
    pub ceiling_m: f64,
    pub client_height_m: f64,
}

impl Default for Room {
    fn default() -> Self {
        Room {
            width_m: 10.0,
            depth_m: 15.0,
            ceiling_m: 3.0,
            client_height_m: 1.0,
        }
    }
}

impl Room {
    pub fn center(&self) -> Vec3 {
        Vec3::new(self.width_m / 2.0, self.depth_m / 2.0, self.ceiling_m)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)
)]
pub enum LayoutSpec {
    /// `rows x cols` ceiling APs at cell centers; rows run along the depth.
    Grid {
        rows: usize,
        cols: usize,
        #[cfg_attr(feature = "serde", serde(default = "default_beamwidth"))]
        beamwidth_deg: f64,
        #[cfg_attr(feature = "serde", serde(default = "default_gain"))]
        gain_db: f64,
    },
    Explicit {
        aps: Vec<ApDescriptor>,
    },
}

pub const DEFAULT_BEAMWIDTH_DEG: f64 = 125.0;
pub const DEFAULT_GAIN_DB: f64 = 9.0;

#[cfg(feature = "serde")]
fn default_beamwidth() -> f64 {
    DEFAULT_BEAMWIDTH_DEG
}

#[cfg(feature = "serde")]
fn default_gain() -> f64 {
    DEFAULT_GAIN_DB
}

impl Default for LayoutSpec {
    fn default() -> Self {
        LayoutSpec::Grid {
            rows: 3,
            cols: 2,
            beamwidth_deg: DEFAULT_BEAMWIDTH_DEG,
            gain_db: DEFAULT_GAIN_DB,
        }
    }
}

impl LayoutSpec {
    /// Grid shape used for an AP-count sweep.
    pub fn grid_for_count(n: usize) -> Result<(usize, usize)> {
        match n {
            1 => Ok((1, 1)),
            2 => Ok((2, 1)),
            3 => Ok((3, 1)),
            4 => Ok((2, 2)),
            6 => Ok((3, 2)),
            8 => Ok((4, 2)),
            9 => Ok((3, 3)),
            _ => Err(Error::scenario("aps", "supported AP counts are 1, 2, 3, 4, 6, 8, 9")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)
)]
pub enum MobilitySpec {
    Static {
        at: Vec3,
    },
    /// Constant-speed walk from `from` towards `towards`, continuing past it
    /// for the whole duration.
    Straight {
        from: Vec3,
        towards: Vec3,
    },
    /// Wander near the starting cell, then visit the room's 2x3 cells in
    /// the order 0, 2, 4, 5, 3, 1 starting `phase` steps into that cycle.
    Tour {
        #[cfg_attr(feature = "serde", serde(default))]
        phase: usize,
        #[cfg_attr(feature = "serde", serde(default = "default_warmup"))]
        warmup_m: f64,
        /// Random offset applied to each waypoint, per axis.
        #[cfg_attr(feature = "serde", serde(default = "default_jitter"))]
        jitter_m: f64,
    },
    RandomWaypoint,
    /// Explicit samples (for example loaded from a trace file).
    Trace {
        samples: Vec<TraceSample>,
    },
}

#[cfg(feature = "serde")]
fn default_warmup() -> f64 {
    DEFAULT_WARMUP_M
}

#[cfg(feature = "serde")]
fn default_jitter() -> f64 {
    DEFAULT_TOUR_JITTER_M
}

pub const DEFAULT_WARMUP_M: f64 = 15.0;
pub const DEFAULT_TOUR_JITTER_M: f64 = 0.5;

impl MobilitySpec {
    pub fn tour() -> Self {
        MobilitySpec::Tour {
            phase: 0,
            warmup_m: DEFAULT_WARMUP_M,
            jitter_m: DEFAULT_TOUR_JITTER_M,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ClientSpec {
    pub mobility: MobilitySpec,
    #[cfg_attr(feature = "serde", serde(default = "default_speed"))]
    pub speed_mps: f64,
}

#[cfg(feature = "serde")]
fn default_speed() -> f64 {
    DEFAULT_SPEED_MPS
}

/// 3.13 mph.
pub const DEFAULT_SPEED_MPS: f64 = 1.4;

impl ClientSpec {
    pub fn tour() -> Self {
        ClientSpec {
            mobility: MobilitySpec::tour(),
            speed_mps: DEFAULT_SPEED_MPS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct Workload {
    pub transport: Transport,
    pub packet_bits: f64,
    /// Sending rate of UDP flows.
    pub udp_rate_mbps: f64,
}

impl Default for Workload {
    fn default() -> Self {
        Workload {
            transport: Transport::Tcp,
            packet_bits: 11680.0,
            udp_rate_mbps: 120.0,
        }
    }
}

/// Everything one simulation run depends on.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub duration_s: f64,
    pub mode: RfMode,
    pub room: Room,
    pub layout: LayoutSpec,
    pub antenna: AntennaPattern,
    pub channel: ChannelParams,
    pub loss: LossParams,
    pub loss_enabled: bool,
    pub bandwidth: Bandwidth,
    pub clients: Vec<ClientSpec>,
    pub workload: Workload,
    pub policy: HandoffPolicy,
    pub selector: SelectorMode,
    pub direction_window_s: f64,
    /// Skip estimation and anchor at the true AP positions.
    pub exact_estimation: bool,
    pub estimator: EstimatorConfig,
    pub scheduler_enabled: bool,
    pub scheduler: SchedulerConfig,
    pub switch_latency_s: f64,
    pub rto_s: f64,
    /// Wired round trip between server and AP, excluding queueing.
    pub path_rtt_s: f64,
    pub mac_retry_limit: u32,
    pub report_hz: f64,
    /// Keep the per-packet event log.
    pub record_packets: bool,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            name: "default".into(),
            seed: 1,
            duration_s: 30.0,
            mode: RfMode::Dirf,
            room: Room::default(),
            layout: LayoutSpec::default(),
            antenna: AntennaPattern::default(),
            channel: ChannelParams {
                noise_floor_dbm: -60.0,
                ..ChannelParams::default()
            },
            loss: LossParams::default(),
            loss_enabled: true,
            bandwidth: Bandwidth::Mhz20,
            clients: alloc::vec![ClientSpec::tour()],
            workload: Workload::default(),
            policy: HandoffPolicy::Direction,
            selector: SelectorMode::default(),
            direction_window_s: DEFAULT_DIRECTION_WINDOW_S,
            exact_estimation: false,
            estimator: EstimatorConfig::default(),
            scheduler_enabled: true,
            scheduler: SchedulerConfig::default(),
            switch_latency_s: 0.030,
            rto_s: 0.200,
            path_rtt_s: 0.020,
            mac_retry_limit: 7,
            report_hz: 10.0,
            record_packets: false,
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, f: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::scenario(f, "must be positive and finite"))
            }
        };
        let non_negative = |v: f64, f: &str| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::scenario(f, "must be non-negative and finite"))
            }
        };
        non_negative(self.duration_s, "duration_s")?;
        positive(self.room.width_m, "room.width_m")?;
        positive(self.room.depth_m, "room.depth_m")?;
        positive(self.room.ceiling_m, "room.ceiling_m")?;
        non_negative(self.room.client_height_m, "room.client_height_m")?;
        if self.room.client_height_m >= self.room.ceiling_m {
            return Err(Error::scenario("room.client_height_m", "must be below the ceiling"));
        }
        if self.clients.is_empty() {
            return Err(Error::scenario("clients", "at least one client is required"));
        }
        for (i, c) in self.clients.iter().enumerate() {
            if !(c.speed_mps > 0.0 && c.speed_mps.is_finite()) {
                return Err(Error::scenario(
                    "speed",
                    alloc::format!("client {i}: speed_mps must be > 0"),
                ));
            }
            if let MobilitySpec::Tour { warmup_m, jitter_m, .. } = c.mobility {
                non_negative(warmup_m, "warmup_m")?;
                non_negative(jitter_m, "jitter_m")?;
            }
            if let MobilitySpec::Trace { samples } = &c.mobility {
                if samples.is_empty() {
                    return Err(Error::scenario("trace", alloc::format!("client {i}: trace is empty")));
                }
            }
        }
        positive(self.workload.packet_bits, "workload.packet_bits")?;
        positive(self.workload.udp_rate_mbps, "workload.udp_rate_mbps")?;
        positive(self.direction_window_s, "direction_window_s")?;
        non_negative(self.switch_latency_s, "switch_latency_s")?;
        positive(self.rto_s, "rto_s")?;
        positive(self.path_rtt_s, "path_rtt_s")?;
        positive(self.report_hz, "report_hz")?;
        self.antenna.validate().map_err(as_scenario)?;
        self.channel.validate().map_err(as_scenario)?;
        self.loss.validate().map_err(as_scenario)?;
        self.estimator.validate().map_err(as_scenario)?;
        self.scheduler.validate().map_err(as_scenario)?;
        if self.scheduler.buffer_bits < self.workload.packet_bits {
            return Err(Error::scenario(
                "scheduler.buffer_bits",
                "must hold at least one packet",
            ));
        }
        self.effective_layout()?;
        Ok(())
    }

    /// AP layout actually simulated: the configured one for DiRF, a single
    /// omni AP at the room center for OmRF.
    pub fn effective_layout(&self) -> Result<ApLayout> {
        match self.mode {
            RfMode::Omrf => ApLayout::new(alloc::vec![ApDescriptor::omni(0, self.room.center())]),
            RfMode::Dirf => match &self.layout {
                LayoutSpec::Grid {
                    rows,
                    cols,
                    beamwidth_deg,
                    gain_db,
                } => ApLayout::grid(
                    *rows,
                    *cols,
                    self.room.width_m,
                    self.room.depth_m,
                    self.room.ceiling_m,
                    *beamwidth_deg,
                    *gain_db,
                ),
                LayoutSpec::Explicit { aps } => ApLayout::new(aps.clone()),
            }
            .map_err(as_scenario),
        }
    }

    /// Copy with `n` tour clients spread evenly around the tour cycle.
    pub fn with_client_count(&self, n: usize) -> Scenario {
        let base = self.clients.first().cloned().unwrap_or_else(ClientSpec::tour);
        let clients = (0..n)
            .map(|k| {
                let mut c = base.clone();
                if let MobilitySpec::Tour { phase, .. } = &mut c.mobility {
                    *phase = libm::round(k as f64 * 6.0 / n as f64) as usize;
                }
                c
            })
            .collect();
        Scenario {
            clients,
            ..self.clone()
        }
    }

    /// Copy with a grid of `n` APs in the same room.
    pub fn with_ap_count(&self, n: usize) -> Result<Scenario> {
        let (rows, cols) = LayoutSpec::grid_for_count(n)?;
        let (beamwidth_deg, gain_db) = match &self.layout {
            LayoutSpec::Grid {
                beamwidth_deg, gain_db, ..
            } => (*beamwidth_deg, *gain_db),
            LayoutSpec::Explicit { aps } => aps.first().map_or((DEFAULT_BEAMWIDTH_DEG, DEFAULT_GAIN_DB), |a| {
                (a.beamwidth_deg, a.boresight_gain_db)
            }),
        };
        Ok(Scenario {
            layout: LayoutSpec::Grid {
                rows,
                cols,
                beamwidth_deg,
                gain_db,
            },
            ..self.clone()
        })
    }
}

fn as_scenario(e: Error) -> Error {
    match e {
        Error::InvalidParameter { field, reason } => Error::InvalidScenario { field, reason },
        Error::InvalidLayout(reason) => Error::InvalidScenario {
            field: "layout".into(),
            reason,
        },
        other => other,
    }
}
