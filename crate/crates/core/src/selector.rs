//! Direction-based AP selection at switch-line crossings.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::estimator::{estimate_ap_position, Estimate, EstimatorConfig, SampleSet};
use crate::geometry::Vec3;
use crate::layout::{anchor_layout_at, crossed_switch_line, switch_lines_for, ApId, ApLayout, SwitchLine};
use crate::mobility::{moving_direction, MobilityTrace, DEFAULT_DIRECTION_WINDOW_S};

/// How the moving direction is compared with AP positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SelectorMode {
    /// `argmin ‖d − p_i‖²`: the raw displacement against absolute positions.
    Literal,
    /// `argmin ‖d̂ − û_i‖²` with `û_i` the unit vector from the client to AP `i`.
    Relative,
    /// AP nearest (on the floor) to `client_pos + d`, the point the client
    /// reaches one direction window ahead.
    #[default]
    Lookahead,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectorState {
    pub current_ap: ApId,
    pub anchored_positions: Vec<Vec3>,
    pub mode: SelectorMode,
    pub direction_window_s: f64,
}

impl SelectorState {
    pub fn new(current_ap: ApId, anchored_positions: Vec<Vec3>, mode: SelectorMode) -> Result<Self> {
        if current_ap >= anchored_positions.len() {
            return Err(Error::UnknownAp(current_ap));
        }
        Ok(SelectorState {
            current_ap,
            anchored_positions,
            mode,
            direction_window_s: DEFAULT_DIRECTION_WINDOW_S,
        })
    }
}

/// Chosen AP plus the number of candidate comparisons made.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Selection {
    pub ap: ApId,
    pub comparisons: usize,
}

pub fn select_ap(direction: Vec3, client_pos: Vec3, state: &SelectorState) -> Result<ApId> {
    select_ap_counted(direction, client_pos, state).map(|s| s.ap)
}

/// [`select_ap`] also reporting how many APs were scored.
pub fn select_ap_counted(direction: Vec3, client_pos: Vec3, state: &SelectorState) -> Result<Selection> {
    let aps = &state.anchored_positions;
    if aps.is_empty() {
        return Err(Error::InvalidLayout("no anchored AP positions".into()));
    }
    let d_hat = direction.unit().ok_or(Error::ZeroDirection)?;
    let predicted = (client_pos + direction).floor();

    let mut best = 0;
    let mut d_min = f64::INFINITY;
    let mut comparisons = 0;
    for (i, &p) in aps.iter().enumerate() {
        let d = match state.mode {
            SelectorMode::Literal => direction.dist_sq(p),
            SelectorMode::Relative => {
                let u = (p - client_pos).unit().unwrap_or(Vec3::ZERO);
                d_hat.dist_sq(u)
            }
            SelectorMode::Lookahead => p.floor().dist_sq(predicted),
        };
        comparisons += 1;
        if d < d_min {
            d_min = d;
            best = i;
        }
    }
    Ok(Selection { ap: best, comparisons })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Decision {
    pub t: f64,
    pub from: ApId,
    pub to: ApId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionConfig {
    pub mode: SelectorMode,
    pub direction_window_s: f64,
    pub estimator: EstimatorConfig,
    /// Use the true layout instead of estimating the anchor.
    pub exact_estimation: bool,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            mode: SelectorMode::default(),
            direction_window_s: DEFAULT_DIRECTION_WINDOW_S,
            estimator: EstimatorConfig::default(),
            exact_estimation: false,
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.direction_window_s > 0.0) {
            return Err(Error::param("direction_window_s", "must be > 0"));
        }
        self.estimator.validate()
    }
}

/// Incremental crossing detection and decision state for one client.
///
/// Crossings are tested against the switch lines of the true layout; AP
/// choice uses the anchored (estimated) positions once available.
#[derive(Debug, Clone)]
pub struct Selector {
    layout: ApLayout,
    lines: Vec<SwitchLine>,
    current: ApId,
    anchored: Option<Vec<Vec3>>,
    mode: SelectorMode,
}

impl Selector {
    pub fn new(layout: ApLayout, start_ap: ApId, mode: SelectorMode) -> Result<Self> {
        let lines = switch_lines_for(&layout, start_ap)?;
        Ok(Selector {
            layout,
            lines,
            current: start_ap,
            anchored: None,
            mode,
        })
    }

    pub fn current(&self) -> ApId {
        self.current
    }

    pub fn lines(&self) -> &[SwitchLine] {
        &self.lines
    }

    pub fn anchored(&self) -> Option<&[Vec3]> {
        self.anchored.as_deref()
    }

    /// First switch line of the current AP crossed by the step, if any.
    pub fn crossing(&self, prev: Vec3, cur: Vec3) -> Option<SwitchLine> {
        self.lines.iter().copied().find(|l| crossed_switch_line(l, prev, cur))
    }

    /// Anchors the layout at the current AP's estimated position.
    pub fn anchor_current_at(&mut self, estimated: Vec3) -> Result<()> {
        self.anchored = Some(anchor_layout_at(&self.layout, self.current, estimated)?);
        Ok(())
    }

    pub fn anchor_exact(&mut self) {
        self.anchored = Some(self.layout.positions());
    }

    pub fn set_current(&mut self, ap: ApId) -> Result<()> {
        self.lines = switch_lines_for(&self.layout, ap)?;
        self.current = ap;
        Ok(())
    }

    /// Chooses the next AP after `line` was crossed. Returns `None` when the
    /// choice is the current AP. A zero direction falls back to the
    /// neighbour across the line.
    pub fn decide(&mut self, line: &SwitchLine, direction: Vec3, client_pos: Vec3) -> Result<Option<ApId>> {
        let positions = match &self.anchored {
            Some(p) => p.clone(),
            None => self.layout.positions(),
        };
        let state = SelectorState {
            current_ap: self.current,
            anchored_positions: positions,
            mode: self.mode,
            direction_window_s: DEFAULT_DIRECTION_WINDOW_S,
        };
        let to = match select_ap(direction, client_pos, &state) {
            Ok(ap) => ap,
            Err(Error::ZeroDirection) => line.neighbor,
            Err(e) => return Err(e),
        };
        if to == self.current {
            return Ok(None);
        }
        self.set_current(to)?;
        Ok(Some(to))
    }
}

/// Direction over the window ending at `t`, truncated at the trace start.
/// `None` when the window collapses.
pub fn trailing_direction(trace: &MobilityTrace, t: f64, window_s: f64) -> Option<Vec3> {
    let t0 = (t - window_s).max(trace.start_time());
    moving_direction(trace, t0, t).ok()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionRun {
    pub start_ap: ApId,
    pub decisions: Vec<Decision>,
    /// Estimated position of the start AP (absent without crossings or with
    /// exact estimation).
    pub estimate: Option<Estimate>,
    pub anchored: Option<Vec<Vec3>>,
}

/// Replays `trace`: estimates and anchors the layout at the first crossing,
/// then emits one decision per crossing that changes the AP.
pub fn run_selection(
    trace: &MobilityTrace,
    layout: &ApLayout,
    samples: &SampleSet,
    cfg: &SelectionConfig,
) -> Result<SelectionRun> {
    cfg.validate()?;
    let start_ap = layout.nearest_ap(trace.samples()[0].pos);
    let mut sel = Selector::new(layout.clone(), start_ap, cfg.mode)?;
    let mut decisions = Vec::new();
    let mut estimate = None;

    for w in trace.samples().windows(2) {
        let (prev, cur) = (w[0], w[1]);
        let Some(line) = sel.crossing(prev.pos, cur.pos) else {
            continue;
        };
        if sel.anchored().is_none() {
            if cfg.exact_estimation {
                sel.anchor_exact();
            } else {
                let est = estimate_ap_position(samples, &cfg.estimator)?;
                sel.anchor_current_at(est.position)?;
                estimate = Some(est);
            }
        }
        let dir = trailing_direction(trace, cur.t, cfg.direction_window_s).unwrap_or(Vec3::ZERO);
        let from = sel.current();
        if let Some(to) = sel.decide(&line, dir, cur.pos)? {
            decisions.push(Decision { t: cur.t, from, to });
        }
    }

    Ok(SelectionRun {
        start_ap,
        decisions,
        estimate,
        anchored: sel.anchored().map(|a| a.to_vec()),
    })
}

/// Brute-force reference for [`select_ap`], scoring every AP independently.
pub fn select_ap_bruteforce(direction: Vec3, client_pos: Vec3, positions: &[Vec3], mode: SelectorMode) -> ApId {
    let score = |p: Vec3| match mode {
        SelectorMode::Literal => direction.dist_sq(p),
        SelectorMode::Relative => {
            let d = direction * (1.0 / direction.norm());
            let u = p - client_pos;
            let n = u.norm();
            let u = if n > 0.0 { u * (1.0 / n) } else { Vec3::ZERO };
            d.dist_sq(u)
        }
        SelectorMode::Lookahead => p.floor().dist_sq((client_pos + direction).floor()),
    };
    let scores: Vec<f64> = positions.iter().map(|&p| score(p)).collect();
    let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
    scores.iter().position(|&s| s == min).unwrap_or(0)
}
