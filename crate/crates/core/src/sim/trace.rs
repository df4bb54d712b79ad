use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::mobility::{MobilityTrace, TraceSample, DEFAULT_MAX_SPEED};

use super::scenario::{MobilitySpec, Room};

pub const TRACE_HZ: f64 = 10.0;

/// Cell visiting order of the tour over the room's 2 x 3 cells (row-major,
/// rows along the depth).
pub const TOUR_ORDER: [usize; 6] = [0, 2, 4, 5, 3, 1];

/// Center of cell `idx` of the room split into 2 columns and 3 rows.
pub fn tour_cell_center(room: &Room, idx: usize) -> Vec3 {
    let (r, c) = (idx / 2, idx % 2);
    Vec3::new(
        (c as f64 + 0.5) * room.width_m / 2.0,
        (r as f64 + 0.5) * room.depth_m / 3.0,
        room.client_height_m,
    )
}

/// 10 Hz trace covering `[0, duration_s]`.
pub fn generate_trace(
    spec: &MobilitySpec,
    room: &Room,
    speed: f64,
    seed: u64,
    duration_s: f64,
) -> Result<MobilityTrace> {
    if !(speed > 0.0) {
        return Err(Error::ZeroSpeed);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = room.client_height_m;
    let waypoints: Vec<Vec3> = match spec {
        MobilitySpec::Trace { samples } => {
            return MobilityTrace::with_max_speed(samples.clone(), speed.max(DEFAULT_MAX_SPEED) * 1.01)
        }
        MobilitySpec::Static { at } => alloc::vec![*at],
        MobilitySpec::Straight { from, towards } => {
            let dir = (*towards - *from).unit().ok_or(Error::ZeroDirection)?;
            alloc::vec![*from, *from + dir * (speed * duration_s)]
        }
        MobilitySpec::RandomWaypoint => {
            let margin = 0.5f64.min(room.width_m / 4.0).min(room.depth_m / 4.0);
            let pick = |rng: &mut ChaCha8Rng| {
                Vec3::new(
                    rng.gen_range(margin..room.width_m - margin),
                    rng.gen_range(margin..room.depth_m - margin),
                    h,
                )
            };
            let mut pts = alloc::vec![pick(&mut rng)];
            let mut len = 0.0;
            while len < speed * duration_s {
                let next = pick(&mut rng);
                len += pts[pts.len() - 1].dist(next);
                pts.push(next);
            }
            pts
        }
        MobilitySpec::Tour {
            phase,
            warmup_m,
            jitter_m,
        } => {
            let start = tour_cell_center(room, TOUR_ORDER[phase % 6]);
            let radius = 0.8 * (room.width_m / 4.0).min(room.depth_m / 6.0);
            let mut pts = alloc::vec![start];
            let mut len = 0.0;
            while len < *warmup_m {
                let (ang, r) = (
                    rng.gen_range(0.0..core::f64::consts::TAU),
                    radius * libm::sqrt(rng.gen::<f64>()),
                );
                let next = start + Vec3::new(r * libm::cos(ang), r * libm::sin(ang), 0.0);
                let remaining = warmup_m - len;
                let last = pts[pts.len() - 1];
                // the final leg detours through a point on last->next so the
                // warmup ends at the cell center with exactly the set length
                let via = |f: f64| last.lerp(next, f);
                let g = |f: f64| last.dist(via(f)) + via(f).dist(start);
                if g(1.0) >= remaining {
                    let (mut lo, mut hi) = (0.0, 1.0);
                    for _ in 0..60 {
                        let mid = 0.5 * (lo + hi);
                        if g(mid) < remaining {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    pts.push(via(lo));
                    pts.push(start);
                    break;
                }
                len += last.dist(next);
                pts.push(next);
            }
            for k in 1..6 {
                let c = tour_cell_center(room, TOUR_ORDER[(phase + k) % 6]);
                let j = |rng: &mut ChaCha8Rng| {
                    if *jitter_m > 0.0 {
                        rng.gen_range(-jitter_m..*jitter_m)
                    } else {
                        0.0
                    }
                };
                let (jx, jy) = (j(&mut rng), j(&mut rng));
                pts.push(c + Vec3::new(jx, jy, 0.0));
            }
            pts
        }
    };
    sample_polyline(&waypoints, speed, duration_s)
}

/// Walks the polyline at `speed`, staying at the last point once reached.
fn sample_polyline(pts: &[Vec3], speed: f64, duration_s: f64) -> Result<MobilityTrace> {
    let n = libm::ceil(duration_s * TRACE_HZ - 1e-9).max(1.0) as usize;
    let mut out = Vec::with_capacity(n + 1);
    let mut seg = 0;
    let mut seg_start = 0.0;
    for i in 0..=n {
        let t = i as f64 / TRACE_HZ;
        let s = speed * t;
        while seg + 1 < pts.len() && seg_start + pts[seg].dist(pts[seg + 1]) < s {
            seg_start += pts[seg].dist(pts[seg + 1]);
            seg += 1;
        }
        let pos = if seg + 1 < pts.len() {
            let l = pts[seg].dist(pts[seg + 1]);
            let f = if l > 0.0 {
                ((s - seg_start) / l).clamp(0.0, 1.0)
            } else {
                0.0
            };
            pts[seg].lerp(pts[seg + 1], f)
        } else {
            pts[pts.len() - 1]
        };
        out.push(TraceSample { t, pos });
    }
    MobilityTrace::with_max_speed(out, speed.max(DEFAULT_MAX_SPEED) * 1.01)
}
