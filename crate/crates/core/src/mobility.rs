//! Client mobility traces.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// Default maximum speed between consecutive samples, in m/s.
pub const DEFAULT_MAX_SPEED: f64 = 3.0;

/// Default length of the window used to estimate the moving direction.
pub const DEFAULT_DIRECTION_WINDOW_S: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceSample {
    pub t: f64,
    pub pos: Vec3,
}

/// Timestamped client positions; positions between samples are linearly
/// interpolated.
#[derive(Debug, Clone, PartialEq)]
pub struct MobilityTrace {
    samples: Vec<TraceSample>,
}

impl MobilityTrace {
    pub fn new(samples: Vec<TraceSample>) -> Result<Self> {
        Self::with_max_speed(samples, DEFAULT_MAX_SPEED)
    }

    pub fn with_max_speed(samples: Vec<TraceSample>, max_speed: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidTrace("trace is empty".into()));
        }
        for (i, s) in samples.iter().enumerate() {
            if !s.t.is_finite() || !s.pos.is_finite() {
                return Err(Error::InvalidTrace(format!("sample {i} is not finite")));
            }
        }
        for (i, w) in samples.windows(2).enumerate() {
            let dt = w[1].t - w[0].t;
            if dt <= 0.0 {
                return Err(Error::InvalidTrace(format!(
                    "timestamps not strictly increasing at sample {}",
                    i + 1
                )));
            }
            let v = w[0].pos.dist(w[1].pos) / dt;
            // small slack for samples produced by rounding
            if v > max_speed * (1.0 + 1e-9) {
                return Err(Error::InvalidTrace(format!(
                    "speed {v:.3} m/s between samples {i} and {} exceeds {max_speed} m/s",
                    i + 1
                )));
            }
        }
        Ok(MobilityTrace { samples })
    }

    pub fn samples(&self) -> &[TraceSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn start_time(&self) -> f64 {
        self.samples[0].t
    }

    pub fn end_time(&self) -> f64 {
        self.samples[self.samples.len() - 1].t
    }

    pub fn covers(&self, t: f64) -> bool {
        t >= self.start_time() && t <= self.end_time()
    }

    /// Interpolated position; `None` outside the trace.
    pub fn position_at(&self, t: f64) -> Option<Vec3> {
        if !self.covers(t) {
            return None;
        }
        let idx = self.samples.partition_point(|s| s.t <= t);
        if idx == 0 {
            return Some(self.samples[0].pos);
        }
        let a = self.samples[idx - 1];
        match self.samples.get(idx) {
            None => Some(a.pos),
            Some(b) => {
                let s = (t - a.t) / (b.t - a.t);
                Some(a.pos.lerp(b.pos, s))
            }
        }
    }

    /// Total path length in meters.
    pub fn path_length(&self) -> f64 {
        self.samples.windows(2).map(|w| w[0].pos.dist(w[1].pos)).sum()
    }

    /// Speed over the sample interval ending at index `i` (0 for the first sample).
    pub fn speed_at_index(&self, i: usize) -> f64 {
        if i == 0 || i >= self.samples.len() {
            return 0.0;
        }
        let (a, b) = (self.samples[i - 1], self.samples[i]);
        a.pos.dist(b.pos) / (b.t - a.t)
    }
}

/// Displacement `position(t_prime) - position(t)`.
pub fn moving_direction(trace: &MobilityTrace, t: f64, t_prime: f64) -> Result<Vec3> {
    if libm::fabs(t_prime - t) < 1e-6 {
        return Err(Error::DegenerateWindow);
    }
    let outside = || Error::WindowOutsideTrace {
        t0: t,
        t1: t_prime,
        start: trace.start_time(),
        end: trace.end_time(),
    };
    let a = trace.position_at(t).ok_or_else(outside)?;
    let b = trace.position_at(t_prime).ok_or_else(outside)?;
    Ok(b - a)
}
