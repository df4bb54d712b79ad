//! AP layouts, relative layout geometry and switch lines.
//!
//! Switch lines live on the floor plane: APs are ceiling mounted and clients
//! move on the floor, so heights are dropped before any cell or line test.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::Vec3;

pub type ApId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AntennaKind {
    #[default]
    Directional,
    /// 0 dBi in every direction.
    Omni,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ApDescriptor {
    pub id: ApId,
    pub position: Vec3,
    /// Unit vector along the main lobe.
    pub boresight: Vec3,
    pub beamwidth_deg: f64,
    pub boresight_gain_db: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub antenna: AntennaKind,
}

impl ApDescriptor {
    /// Directional AP looking straight down.
    pub fn ceiling(id: ApId, position: Vec3, beamwidth_deg: f64, boresight_gain_db: f64) -> Self {
        ApDescriptor {
            id,
            position,
            boresight: Vec3::new(0.0, 0.0, -1.0),
            beamwidth_deg,
            boresight_gain_db,
            antenna: AntennaKind::Directional,
        }
    }

    pub fn omni(id: ApId, position: Vec3) -> Self {
        ApDescriptor {
            id,
            position,
            boresight: Vec3::new(0.0, 0.0, -1.0),
            beamwidth_deg: 180.0,
            boresight_gain_db: 0.0,
            antenna: AntennaKind::Omni,
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.position.is_finite() || !self.boresight.is_finite() {
            return Err(Error::InvalidLayout(format!("AP {} is not finite", self.id)));
        }
        if !(self.beamwidth_deg > 0.0 && self.beamwidth_deg <= 180.0) {
            return Err(Error::InvalidLayout(format!(
                "AP {} beamwidth {} outside (0, 180]",
                self.id, self.beamwidth_deg
            )));
        }
        if (self.boresight.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidLayout(format!(
                "AP {} boresight is not a unit vector",
                self.id
            )));
        }
        Ok(())
    }
}

/// APs plus their offsets from AP 0 (the relative geometry the controller
/// knows in advance).
#[derive(Debug, Clone, PartialEq)]
pub struct ApLayout {
    aps: Vec<ApDescriptor>,
    relative_offsets: Vec<Vec3>,
}

impl ApLayout {
    /// APs must carry ids `0..n` in order.
    pub fn new(aps: Vec<ApDescriptor>) -> Result<Self> {
        if aps.is_empty() {
            return Err(Error::InvalidLayout("layout has no APs".into()));
        }
        for (i, ap) in aps.iter().enumerate() {
            if ap.id != i {
                return Err(Error::InvalidLayout(format!(
                    "AP ids must be 0..n in order, found id {} at index {i}",
                    ap.id
                )));
            }
            ap.validate()?;
        }
        let origin = aps[0].position;
        let relative_offsets = aps.iter().map(|a| a.position - origin).collect();
        Ok(ApLayout { aps, relative_offsets })
    }

    /// `rows x cols` ceiling APs at the centers of equal cells of a
    /// `width x depth` room. Ids are row-major with rows along y.
    pub fn grid(
        rows: usize,
        cols: usize,
        width_m: f64,
        depth_m: f64,
        ceiling_m: f64,
        beamwidth_deg: f64,
        gain_db: f64,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidLayout("grid needs at least one row and column".into()));
        }
        let (cw, cd) = (width_m / cols as f64, depth_m / rows as f64);
        let mut aps = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let pos = Vec3::new((c as f64 + 0.5) * cw, (r as f64 + 0.5) * cd, ceiling_m);
                aps.push(ApDescriptor::ceiling(r * cols + c, pos, beamwidth_deg, gain_db));
            }
        }
        ApLayout::new(aps)
    }

    pub fn aps(&self) -> &[ApDescriptor] {
        &self.aps
    }

    pub fn ap(&self, id: ApId) -> Result<&ApDescriptor> {
        self.aps.get(id).ok_or(Error::UnknownAp(id))
    }

    pub fn len(&self) -> usize {
        self.aps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.aps.is_empty()
    }

    pub fn relative_offsets(&self) -> &[Vec3] {
        &self.relative_offsets
    }

    pub fn positions(&self) -> Vec<Vec3> {
        self.aps.iter().map(|a| a.position).collect()
    }

    /// AP whose floor-projected Voronoi cell contains `pos` (lowest id on ties).
    pub fn nearest_ap(&self, pos: Vec3) -> ApId {
        nearest_floor(&self.positions(), pos)
    }

    /// Voronoi neighbours of `id` on the floor plane, ascending.
    pub fn neighbors(&self, id: ApId) -> Result<Vec<ApId>> {
        self.ap(id)?;
        let floor: Vec<Vec3> = self.aps.iter().map(|a| a.position.floor()).collect();
        Ok((0..floor.len())
            .filter(|&j| j != id && voronoi_edge_length(&floor, id, j) > 1e-9)
            .collect())
    }
}

/// Index of the point nearest to `pos` on the floor plane (lowest index on ties).
pub fn nearest_floor(points: &[Vec3], pos: Vec3) -> usize {
    let p = pos.floor();
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, q) in points.iter().enumerate() {
        let d = q.floor().dist_sq(p);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Length of the shared boundary between the Voronoi cells of `i` and `j`
/// (unbounded plane; `f64::INFINITY` for an unbounded edge).
fn voronoi_edge_length(pts: &[Vec3], i: usize, j: usize) -> f64 {
    let (pi, pj) = (pts[i], pts[j]);
    let d = pj - pi;
    if d.norm_sq() == 0.0 {
        return 0.0;
    }
    let mid = (pi + pj) * 0.5;
    let dir = Vec3::new(-d.y, d.x, 0.0);
    // Points mid + s*dir on the bisector; keep those at least as close to i as to k.
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (k, &pk) in pts.iter().enumerate() {
        if k == i || k == j {
            continue;
        }
        // |x - pi|^2 <= |x - pk|^2  <=>  2 x.(pk - pi) <= |pk|^2 - |pi|^2
        let n = pk - pi;
        let c = pk.norm_sq() - pi.norm_sq();
        let a = 2.0 * dir.dot(n);
        let b = c - 2.0 * mid.dot(n);
        if a.abs() < 1e-15 {
            if b < 0.0 {
                return 0.0;
            }
        } else if a > 0.0 {
            hi = hi.min(b / a);
        } else {
            lo = lo.max(b / a);
        }
        if lo >= hi {
            return 0.0;
        }
    }
    (hi - lo) * dir.norm()
}

/// Absolute AP positions given AP 0's position.
pub fn anchor_layout(layout: &ApLayout, anchor_ap0: Vec3) -> Vec<Vec3> {
    layout.relative_offsets.iter().map(|&off| anchor_ap0 + off).collect()
}

/// Absolute AP positions given the position of AP `anchor_id`.
pub fn anchor_layout_at(layout: &ApLayout, anchor_id: ApId, anchor_pos: Vec3) -> Result<Vec<Vec3>> {
    let off = *layout
        .relative_offsets
        .get(anchor_id)
        .ok_or(Error::UnknownAp(anchor_id))?;
    Ok(anchor_layout(layout, anchor_pos - off))
}

/// Perpendicular-bisector plane between the current AP and one neighbour.
/// The normal points from the current AP towards the neighbour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchLine {
    pub point: Vec3,
    pub normal: Vec3,
    pub current: ApId,
    pub neighbor: ApId,
}

impl SwitchLine {
    pub fn between(current: &ApDescriptor, neighbor: &ApDescriptor) -> Option<Self> {
        let (a, b) = (current.position.floor(), neighbor.position.floor());
        let normal = (b - a).unit()?;
        Some(SwitchLine {
            point: (a + b) * 0.5,
            normal,
            current: current.id,
            neighbor: neighbor.id,
        })
    }

    /// Floor-projected signed distance; negative on the current AP's side.
    pub fn signed_distance(&self, pos: Vec3) -> f64 {
        (pos.floor() - self.point).dot(self.normal)
    }
}

/// Switch lines of `current_ap`, one per Voronoi neighbour (none for a
/// single-AP layout).
pub fn switch_lines_for(layout: &ApLayout, current_ap: ApId) -> Result<Vec<SwitchLine>> {
    let cur = layout.ap(current_ap)?;
    let mut out = Vec::new();
    for n in layout.neighbors(current_ap)? {
        if let Some(line) = SwitchLine::between(cur, &layout.aps[n]) {
            out.push(line);
        }
    }
    Ok(out)
}

/// True when the step `prev -> cur` moves from the current AP's side onto
/// (or past) the line.
pub fn crossed_switch_line(line: &SwitchLine, prev_pos: Vec3, cur_pos: Vec3) -> bool {
    line.signed_distance(prev_pos) < 0.0 && line.signed_distance(cur_pos) >= 0.0
}
