//! Synthetic link model.
//!
//! SNR = tx power + antenna gain - log-distance path loss - noise floor +
//! shadowing. Shadowing is a Gaussian draw keyed by (seed, AP id, position
//! cell), so a given AP/position always sees the same value regardless of
//! the order in which links are evaluated.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::hash;
use crate::layout::{AntennaKind, ApDescriptor};

/// Two-level lobe model: flat main lobe, flat back lobe.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct AntennaPattern {
    pub boresight_gain_db: f64,
    pub beamwidth_deg: f64,
    pub back_lobe_db: f64,
}

impl Default for AntennaPattern {
    fn default() -> Self {
        AntennaPattern {
            boresight_gain_db: 9.0,
            beamwidth_deg: 60.0,
            back_lobe_db: -10.0,
        }
    }
}

impl AntennaPattern {
    pub fn validate(&self) -> Result<()> {
        if !(self.boresight_gain_db > self.back_lobe_db) {
            return Err(Error::param("boresight_gain_db", "must exceed back_lobe_db"));
        }
        if !(self.beamwidth_deg > 0.0 && self.beamwidth_deg <= 180.0) {
            return Err(Error::param("beamwidth_deg", "must be in (0, 180]"));
        }
        Ok(())
    }

    /// Gain at `angle_deg` off boresight.
    pub fn gain_db(&self, angle_deg: f64) -> f64 {
        if angle_deg <= self.beamwidth_deg / 2.0 {
            self.boresight_gain_db
        } else {
            self.back_lobe_db
        }
    }

    /// Pattern of a specific AP: its own beamwidth and gain, this back lobe.
    pub fn for_ap(&self, ap: &ApDescriptor) -> AntennaPattern {
        AntennaPattern {
            boresight_gain_db: ap.boresight_gain_db,
            beamwidth_deg: ap.beamwidth_deg,
            back_lobe_db: self.back_lobe_db,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ChannelParams {
    /// Path loss at 1 m, dB (5 GHz free space).
    pub ref_loss_db: f64,
    pub path_loss_exponent: f64,
    pub tx_power_dbm: f64,
    pub noise_floor_dbm: f64,
    pub shadowing_sigma_db: f64,
    /// Edge of the cubic cells that share one shadowing draw.
    pub shadowing_cell_m: f64,
    pub seed: u64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        ChannelParams {
            ref_loss_db: 46.7,
            path_loss_exponent: 2.2,
            tx_power_dbm: 20.0,
            noise_floor_dbm: -90.0,
            shadowing_sigma_db: 2.0,
            shadowing_cell_m: 0.1,
            seed: 0,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        if !(1.5..=6.0).contains(&self.path_loss_exponent) {
            return Err(Error::param("path_loss_exponent", "must be in [1.5, 6]"));
        }
        if !(self.shadowing_sigma_db >= 0.0) {
            return Err(Error::param("shadowing_sigma_db", "must be >= 0"));
        }
        if !(self.shadowing_cell_m > 0.0) {
            return Err(Error::param("shadowing_cell_m", "must be > 0"));
        }
        Ok(())
    }

    pub fn path_loss_db(&self, distance_m: f64) -> f64 {
        self.ref_loss_db + 10.0 * self.path_loss_exponent * libm::log10(distance_m)
    }

    /// Shadowing term for `ap_id` at `pos`, in dB.
    pub fn shadowing_db(&self, ap_id: usize, pos: Vec3) -> f64 {
        if self.shadowing_sigma_db == 0.0 {
            return 0.0;
        }
        let cell = |v: f64| libm::floor(v / self.shadowing_cell_m) as i64 as u64;
        let key = hash::mix(&[self.seed, ap_id as u64, cell(pos.x), cell(pos.y), cell(pos.z)]);
        self.shadowing_sigma_db * hash::std_normal(key)
    }
}

/// Off-boresight angle of `pos` as seen from `ap`, in degrees.
pub fn off_boresight_deg(ap: &ApDescriptor, pos: Vec3) -> Option<f64> {
    let dir = (pos - ap.position).unit()?;
    let c = dir.dot(ap.boresight).clamp(-1.0, 1.0);
    Some(libm::acos(c).to_degrees())
}

/// Downlink SNR (dB) from `ap` to a client at `pos`.
pub fn snr_at(ap: &ApDescriptor, pattern: &AntennaPattern, channel: &ChannelParams, pos: Vec3) -> Result<f64> {
    let d = ap.position.dist(pos);
    if d == 0.0 {
        return Err(Error::ZeroDistance);
    }
    let gain = match ap.antenna {
        AntennaKind::Omni => 0.0,
        AntennaKind::Directional => {
            let angle = off_boresight_deg(ap, pos).ok_or(Error::ZeroDistance)?;
            pattern.gain_db(angle)
        }
    };
    Ok(
        channel.tx_power_dbm + gain - channel.path_loss_db(d) - channel.noise_floor_dbm
            + channel.shadowing_db(ap.id, pos),
    )
}

pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Bandwidth {
    #[default]
    #[cfg_attr(feature = "serde", serde(rename = "20mhz"))]
    Mhz20,
    #[cfg_attr(feature = "serde", serde(rename = "40mhz"))]
    Mhz40,
}

impl Bandwidth {
    pub fn mhz(self) -> u32 {
        match self {
            Bandwidth::Mhz20 => 20,
            Bandwidth::Mhz40 => 40,
        }
    }
}

/// Ratio between the 40 MHz and 20 MHz default tables.
pub const WIDE_CHANNEL_SCALE: f64 = 1.96;

const DEFAULT_STEPS_20: [(f64, f64); 10] = [
    (4.0, 3.0),
    (7.0, 6.0),
    (10.0, 9.0),
    (14.0, 12.0),
    (18.0, 15.0),
    (21.0, 22.0),
    (24.0, 30.0),
    (27.0, 37.0),
    (30.0, 45.0),
    (34.0, 50.0),
];

/// Step map from SNR to achievable downlink rate.
#[derive(Debug, Clone, PartialEq)]
pub struct PhyRateTable {
    mhz20: Vec<(f64, f64)>,
    mhz40: Vec<(f64, f64)>,
}

impl Default for PhyRateTable {
    fn default() -> Self {
        let mhz20 = DEFAULT_STEPS_20.to_vec();
        let mhz40 = mhz20.iter().map(|&(s, r)| (s, r * WIDE_CHANNEL_SCALE)).collect();
        PhyRateTable { mhz20, mhz40 }
    }
}

impl PhyRateTable {
    pub fn new(mhz20: Vec<(f64, f64)>, mhz40: Vec<(f64, f64)>) -> Result<Self> {
        for (name, steps) in [("mhz20", &mhz20), ("mhz40", &mhz40)] {
            if steps.is_empty() {
                return Err(Error::param(name, "table is empty"));
            }
            let increasing = steps.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 > w[0].1);
            if !increasing {
                return Err(Error::param(name, "thresholds and rates must strictly increase"));
            }
        }
        Ok(PhyRateTable { mhz20, mhz40 })
    }

    pub fn steps(&self, bw: Bandwidth) -> &[(f64, f64)] {
        match bw {
            Bandwidth::Mhz20 => &self.mhz20,
            Bandwidth::Mhz40 => &self.mhz40,
        }
    }

    /// Lowest non-zero rate, used as the airtime of a hopeless attempt.
    pub fn basic_rate(&self, bw: Bandwidth) -> f64 {
        self.steps(bw)[0].1
    }
}

/// Rate in Mbps: the largest step whose threshold is at most `snr`.
pub fn phy_rate(table: &PhyRateTable, snr: f64, bw: Bandwidth) -> f64 {
    table
        .steps(bw)
        .iter()
        .take_while(|&&(thr, _)| thr <= snr)
        .last()
        .map_or(0.0, |&(_, r)| r)
}

/// Per-attempt frame loss as a function of SNR and client speed.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct LossParams {
    /// `(snr_floor_db, loss)`; the last floor at or below the SNR applies,
    /// `below_all` under every floor.
    pub steps: Vec<(f64, f64)>,
    pub below_all: f64,
    /// Added loss per m/s of client speed.
    pub k_mobility: f64,
}

impl Default for LossParams {
    fn default() -> Self {
        LossParams {
            steps: vec![(10.0, 0.05), (20.0, 0.01)],
            below_all: 0.30,
            k_mobility: 0.005,
        }
    }
}

impl LossParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.steps.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 <= w[0].1)
            && self.steps.first().is_none_or(|s| s.1 <= self.below_all);
        if !ok {
            return Err(Error::param("loss.steps", "floors must increase and losses must not"));
        }
        if !(self.k_mobility >= 0.0) {
            return Err(Error::param("loss.k_mobility", "must be >= 0"));
        }
        Ok(())
    }

    pub fn base(&self, snr: f64) -> f64 {
        self.steps
            .iter()
            .take_while(|&&(floor, _)| floor <= snr)
            .last()
            .map_or(self.below_all, |&(_, p)| p)
    }
}

pub fn loss_prob(params: &LossParams, snr: f64, speed: f64) -> f64 {
    (params.base(snr) + params.k_mobility * speed).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn down_ap() -> ApDescriptor {
        ApDescriptor::ceiling(0, Vec3::new(0.0, 0.0, 3.0), 60.0, 9.0)
    }

    #[test]
    fn boresight_one_meter() {
        let ch = ChannelParams {
            shadowing_sigma_db: 0.0,
            ..Default::default()
        };
        let snr = snr_at(&down_ap(), &AntennaPattern::default(), &ch, Vec3::new(0.0, 0.0, 2.0)).unwrap();
        assert!((snr - 72.3).abs() < 1e-9, "{snr}");
    }

    #[test]
    fn back_lobe_is_nineteen_db_down() {
        let ch = ChannelParams {
            shadowing_sigma_db: 0.0,
            ..Default::default()
        };
        let p = AntennaPattern::default();
        let front = snr_at(&down_ap(), &p, &ch, Vec3::new(0.0, 0.0, 2.0)).unwrap();
        let back = snr_at(&down_ap(), &p, &ch, Vec3::new(0.0, 0.0, 4.0)).unwrap();
        assert_eq!(front - back, 19.0);
    }

    #[test]
    fn shadowing_is_repeatable() {
        let ch = ChannelParams {
            seed: 42,
            ..Default::default()
        };
        let pos = Vec3::new(1.3, 0.2, 1.0);
        let a = snr_at(&down_ap(), &AntennaPattern::default(), &ch, pos).unwrap();
        let b = snr_at(&down_ap(), &AntennaPattern::default(), &ch, pos).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn zero_distance_is_an_error() {
        let ap = down_ap();
        let r = snr_at(&ap, &AntennaPattern::default(), &ChannelParams::default(), ap.position);
        assert_eq!(r, Err(Error::ZeroDistance));
    }

    #[test]
    fn omni_gain_is_flat() {
        let ch = ChannelParams {
            shadowing_sigma_db: 0.0,
            ..Default::default()
        };
        let ap = ApDescriptor::omni(0, Vec3::new(0.0, 0.0, 3.0));
        let a = snr_at(&ap, &AntennaPattern::default(), &ch, Vec3::new(0.0, 0.0, 2.0)).unwrap();
        let b = snr_at(&ap, &AntennaPattern::default(), &ch, Vec3::new(0.0, 0.0, 4.0)).unwrap();
        assert_eq!(a, b);
        assert!((a - 63.3).abs() < 1e-9);
    }

    #[test]
    fn rate_anchors() {
        let t = PhyRateTable::default();
        assert_eq!(phy_rate(&t, 18.0, Bandwidth::Mhz20), 15.0);
        assert_eq!(phy_rate(&t, 30.0, Bandwidth::Mhz20), 45.0);
        assert_eq!(phy_rate(&t, 3.9, Bandwidth::Mhz20), 0.0);
        assert_eq!(phy_rate(&t, -20.0, Bandwidth::Mhz40), 0.0);
    }

    #[test]
    fn wide_channel_scaling_at_anchors() {
        let t = PhyRateTable::default();
        for snr in [18.0, 30.0] {
            let r = phy_rate(&t, snr, Bandwidth::Mhz40) / phy_rate(&t, snr, Bandwidth::Mhz20);
            assert!((1.9..=2.0).contains(&r), "{snr}: {r}");
        }
    }

    #[test]
    fn table_validation() {
        assert!(PhyRateTable::new(vec![(1.0, 2.0), (1.0, 3.0)], vec![(1.0, 1.0)]).is_err());
        assert!(PhyRateTable::new(vec![(1.0, 2.0), (2.0, 1.0)], vec![(1.0, 1.0)]).is_err());
        assert!(PhyRateTable::new(vec![(1.0, 2.0)], vec![]).is_err());
    }

    #[test]
    fn loss_defaults() {
        let p = LossParams::default();
        assert_eq!(loss_prob(&p, 25.0, 0.0), 0.01);
        assert_eq!(loss_prob(&p, 15.0, 0.0), 0.05);
        assert_eq!(loss_prob(&p, 5.0, 0.0), 0.30);
        assert_eq!(loss_prob(&p, 5.0, 200.0), 1.0);
        let d = loss_prob(&p, 25.0, 2.0) - loss_prob(&p, 25.0, 1.0);
        assert!((d - p.k_mobility).abs() < 1e-15);
    }
}
