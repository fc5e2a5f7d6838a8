//! The gesture state machine.
//!
//! Pinch selects (a ray from the user through the pinching hand picks the
//! nearest cell). Grip starts a segment; what it grabbed is decided at grip
//! onset in this order: the Proxy Window, an indicator endpoint, a
//! structure grabber, a selected cell (depth pull), any other cell. The
//! first grip release ends the segment with exactly one command or
//! `Cancel`. Open-hand lateral flicks near a structure are swipes.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Point, Pose, Vector};
use crate::layout::{Orientation, SkipDirection, StructureKind};
use crate::model::{CellId, StructureId, Workspace};
use crate::ops::{structure_at, structure_centroid, EdgeEnd};

use super::classify::{classify_segment, GestureKind, HandTrack, Sample, Segment};
use super::{GestureThresholds, Hand, HandPoseEvent, TriggerCommand, PRESS_LEVEL};

/// How close (m) a gripping hand must come to an indicator endpoint.
const ENDPOINT_REACH: f64 = 0.05;
/// Window (ms) over which swipe speed is measured.
const SWIPE_WINDOW: f64 = 60.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProxyWindow {
    pub active: bool,
    pub center: Point,
    pub selection: Vec<CellId>,
}

impl Default for ProxyWindow {
    fn default() -> Self {
        ProxyWindow {
            active: false,
            center: Point::origin(),
            selection: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Target {
    Proxy,
    Edge { from: CellId, to: CellId },
    Structure(StructureId),
    Layer { toward_user: Vector },
    Cell { start: Pose },
    Free,
}

#[derive(Debug, Clone)]
struct Active {
    target: Target,
    primary: HandTrack,
    secondary: Option<HandTrack>,
}

impl Active {
    fn involves(&self, hand: Hand) -> bool {
        self.primary.hand == hand || self.secondary.as_ref().is_some_and(|s| s.hand == hand)
    }

    fn track_mut(&mut self, hand: Hand) -> Option<&mut HandTrack> {
        if self.primary.hand == hand {
            Some(&mut self.primary)
        } else {
            self.secondary.as_mut().filter(|s| s.hand == hand)
        }
    }
}

#[derive(Debug, Clone, Default)]
struct HandState {
    pinching: bool,
    gripping: bool,
    /// Onset time of a pinch that started over empty space.
    empty_pinch: Option<f64>,
    recent: VecDeque<(f64, Point)>,
    /// Positions since the current fast lateral motion began.
    swipe_path: Vec<Point>,
    swipe_fired: bool,
}

/// Consumes hand events one at a time against the current workspace.
#[derive(Debug, Clone)]
pub struct Interpreter {
    th: GestureThresholds,
    proxy: ProxyWindow,
    hands: [HandState; 2],
    active: Option<Active>,
    last_t: f64,
}

impl Interpreter {
    pub fn new(th: GestureThresholds) -> Self {
        Interpreter {
            th,
            proxy: ProxyWindow::default(),
            hands: Default::default(),
            active: None,
            last_t: f64::NEG_INFINITY,
        }
    }

    pub fn proxy(&self) -> &ProxyWindow {
        &self.proxy
    }

    pub fn thresholds(&self) -> &GestureThresholds {
        &self.th
    }

    /// Processes one event. `w` must reflect every command emitted so far.
    pub fn feed(&mut self, e: &HandPoseEvent, w: &Workspace) -> Result<Vec<TriggerCommand>> {
        e.check()?;
        if e.t < self.last_t {
            return Err(Error::Stream(format!(
                "timestamp {} follows {}; events must be time-ordered",
                e.t, self.last_t
            )));
        }
        self.last_t = e.t;
        let mut out = Vec::new();
        self.pinch(e, w, &mut out);
        self.grip(e, w, &mut out);
        self.swipe(e, w, &mut out);
        Ok(out)
    }

    /// Ends the stream; a grab still held is cancelled.
    pub fn finish(&mut self) -> Vec<TriggerCommand> {
        match self.active.take() {
            Some(_) => vec![TriggerCommand::Cancel],
            None => Vec::new(),
        }
    }

    fn clear_selection(&mut self) {
        self.proxy = ProxyWindow::default();
    }

    fn pinch(&mut self, e: &HandPoseEvent, w: &Workspace, out: &mut Vec<TriggerCommand>) {
        let i = e.hand.index();
        let on = e.pinch >= PRESS_LEVEL;
        let was = self.hands[i].pinching;
        self.hands[i].pinching = on;
        if on && !was {
            match ray_cell(w, &e.position) {
                Some(cell) => {
                    if !self.proxy.selection.contains(&cell) {
                        if !self.proxy.active {
                            self.proxy.active = true;
                            self.proxy.center = e.position;
                        }
                        self.proxy.selection.push(cell);
                        out.push(TriggerCommand::SelectCell { cell });
                    }
                }
                None => self.hands[i].empty_pinch = Some(e.t),
            }
        } else if !on && was {
            if let Some(t0) = self.hands[i].empty_pinch.take() {
                if self.proxy.selection.is_empty() {
                    return;
                }
                if e.t - t0 < self.th.dwell_commit {
                    out.push(TriggerCommand::ToggleIndicators {
                        selection: self.proxy.selection.clone(),
                    });
                } else {
                    self.clear_selection();
                    out.push(TriggerCommand::DeselectAll);
                }
            }
        }
    }

    fn grip(&mut self, e: &HandPoseEvent, w: &Workspace, out: &mut Vec<TriggerCommand>) {
        let i = e.hand.index();
        let on = e.grip >= self.th.grab_grip_min;
        let was = self.hands[i].gripping;
        self.hands[i].gripping = on;
        let sample = Sample {
            t: e.t,
            position: e.position,
            rotation: e.rotation(),
        };
        let track = |s: Sample| HandTrack {
            hand: e.hand,
            samples: vec![s],
        };

        if on && !was {
            match self.active.as_mut() {
                Some(a) => {
                    let near_proxy =
                        (e.position - self.proxy.center).norm() <= self.th.proximity_grabber;
                    if a.target == Target::Proxy
                        && a.secondary.is_none()
                        && a.primary.hand != e.hand
                        && near_proxy
                    {
                        a.secondary = Some(track(sample));
                    }
                }
                None => {
                    let target = self.grab_target(&e.position, w, out);
                    self.active = Some(Active {
                        target,
                        primary: track(sample),
                        secondary: None,
                    });
                }
            }
            return;
        }
        if on {
            if let Some(t) = self.active.as_mut().and_then(|a| a.track_mut(e.hand)) {
                t.samples.push(sample);
            }
            return;
        }
        if was && self.active.as_ref().is_some_and(|a| a.involves(e.hand)) {
            let mut a = self.active.take().expect("checked above");
            if let Some(t) = a.track_mut(e.hand) {
                t.samples.push(sample);
            }
            let cmd = self.release(&a, &e.position, w);
            if cmd.creates_structure() {
                self.clear_selection();
            }
            out.push(cmd);
        }
    }

    fn grab_target(&self, p: &Point, w: &Workspace, out: &mut Vec<TriggerCommand>) -> Target {
        let th = &self.th;
        if self.proxy.active && (p - self.proxy.center).norm() <= th.proximity_grabber {
            return Target::Proxy;
        }
        if let Some((from, to, end)) = nearest_endpoint(w, p) {
            out.push(TriggerCommand::GrabEdgeEndpoint { from, to, end });
            return Target::Edge { from, to };
        }
        let grabber = w
            .structures
            .iter()
            .filter_map(|s| {
                structure_centroid(w, s.id)
                    .ok()
                    .map(|c| ((c - p).norm(), s.id))
            })
            .filter(|(d, _)| *d <= th.proximity_grabber)
            .min_by(|a, b| a.0.total_cmp(&b.0));
        if let Some((_, structure)) = grabber {
            out.push(TriggerCommand::GrabStructure { structure, at: *p });
            return Target::Structure(structure);
        }
        match ray_cell(w, p).and_then(|id| w.cell(id)) {
            Some(c) if self.proxy.selection.contains(&c.id) => {
                let toward = w.user_position - c.pose.position;
                Target::Layer {
                    toward_user: toward / toward.norm().max(1e-12),
                }
            }
            Some(c) => {
                out.push(TriggerCommand::GrabCell { cell: c.id });
                Target::Cell { start: c.pose }
            }
            None => Target::Free,
        }
    }

    fn release(&self, a: &Active, p: &Point, w: &Workspace) -> TriggerCommand {
        let start = a.primary.samples[0].position;
        match a.target {
            Target::Proxy => {
                let segment = Segment {
                    primary: a.primary.clone(),
                    secondary: a.secondary.clone(),
                };
                match classify_segment(&segment, &self.proxy, &self.th) {
                    Some(kind) => self.proxy_command(kind, w),
                    None => TriggerCommand::Cancel,
                }
            }
            Target::Edge { .. } => match ray_cell(w, p) {
                Some(cell) => TriggerCommand::ReleaseEdgeEndpoint { cell },
                None => TriggerCommand::Cancel,
            },
            Target::Structure(src) => match structure_at(w, p, Some(src)) {
                Some(dst) => TriggerCommand::MergeStructures { src, dst, at: *p },
                None => TriggerCommand::ReleaseStructure { at: *p },
            },
            Target::Layer { toward_user } => {
                let d = (p - start).dot(&toward_user);
                if d > self.th.depth_pull_min {
                    TriggerCommand::ApplySkipLayer {
                        direction: SkipDirection::Closer,
                    }
                } else if d < -self.th.depth_pull_min {
                    TriggerCommand::ApplySkipLayer {
                        direction: SkipDirection::Away,
                    }
                } else {
                    TriggerCommand::Cancel
                }
            }
            Target::Cell { start: pose } => TriggerCommand::ReleaseCell {
                pose: pose.translated(&(p - start)),
            },
            Target::Free => TriggerCommand::Cancel,
        }
    }

    /// The structure whose members are exactly the selection, if any.
    fn selected_structure(&self, w: &Workspace) -> Option<(StructureId, StructureKind)> {
        let mut sel = self.proxy.selection.clone();
        sel.sort();
        w.structures
            .iter()
            .find(|s| {
                let mut m = s.members.clone();
                m.sort();
                m == sel
            })
            .map(|s| (s.id, s.kind))
    }

    fn proxy_command(&self, kind: GestureKind, w: &Workspace) -> TriggerCommand {
        let sel = &self.proxy.selection;
        let n = sel.len();
        let exact = self.selected_structure(w);
        let grid = exact.filter(|(_, k)| k.is_grid());
        let steps = |delta: f64| ((delta.abs() / self.th.row_step).round() as i64).max(1);
        // widening a row grid means fewer rows, a column grid more columns
        let dims = |(id, k): (StructureId, StructureKind), wider: bool, delta: f64| {
            let sign = if (k == StructureKind::MultiRowGrid) == wider {
                -1
            } else {
                1
            };
            TriggerCommand::AdjustDimensions {
                structure: id,
                delta: sign * steps(delta),
            }
        };
        match kind {
            GestureKind::Circular => TriggerCommand::CreateLoopCircle,
            GestureKind::Squeeze { two_handed, delta } => match grid {
                Some(g) => dims(g, false, delta),
                None if two_handed => {
                    let mut keep: Vec<CellId> = sel
                        .iter()
                        .copied()
                        .filter(|c| w.cell(*c).is_some_and(|c| c.highlight))
                        .collect();
                    if keep.is_empty() {
                        keep = vec![sel[0], sel[n - 1]];
                        keep.dedup();
                    }
                    TriggerCommand::CreateSkipFold { keep }
                }
                None => TriggerCommand::CreateSkipPile { head: sel[0] },
            },
            GestureKind::Pull { two_handed, delta } => match grid {
                Some(g) => dims(g, true, delta),
                None if two_handed => TriggerCommand::CreateLinearLinear,
                None => TriggerCommand::CreateParallelTree { roots: sel.clone() },
            },
            GestureKind::Diagonal { dy } => TriggerCommand::CreateGrid {
                orientation: Orientation::Horizontal,
                count: ((dy.abs() / self.th.row_step).round() as usize).clamp(2, n.max(2)),
            },
            GestureKind::Rotate => match exact {
                Some((id, k)) if k.is_grid() || k == StructureKind::ParallelTree => {
                    TriggerCommand::AdjustOrientation { structure: id }
                }
                _ => TriggerCommand::Cancel,
            },
        }
    }

    fn swipe(&mut self, e: &HandPoseEvent, w: &Workspace, out: &mut Vec<TriggerCommand>) {
        let th = &self.th;
        let h = &mut self.hands[e.hand.index()];
        if h.pinching || h.gripping {
            h.recent.clear();
            h.swipe_path.clear();
            h.swipe_fired = false;
            return;
        }
        h.recent.push_back((e.t, e.position));
        while h
            .recent
            .front()
            .is_some_and(|(t, _)| e.t - t > SWIPE_WINDOW)
        {
            h.recent.pop_front();
        }
        let (t0, p0) = h.recent[0];
        let horizontal = |a: &Point, b: &Point| (b.x - a.x).hypot(b.z - a.z);
        let fast = e.t - t0 >= SWIPE_WINDOW / 2.0
            && horizontal(&p0, &e.position) / ((e.t - t0) / 1000.0) > th.swipe_speed_min;
        if !fast {
            h.swipe_path.clear();
            h.swipe_fired = false;
            return;
        }
        if h.swipe_path.is_empty() {
            h.swipe_path.extend(h.recent.iter().map(|(_, p)| *p));
        } else {
            h.swipe_path.push(e.position);
        }
        if h.swipe_fired || horizontal(&h.swipe_path[0], &e.position) <= th.swipe_travel_min {
            return;
        }
        let hit = h
            .swipe_path
            .iter()
            .filter_map(|p| ray_cell(w, p))
            .find_map(|c| w.structure_of(c).map(|s| s.id));
        if let Some(structure) = hit {
            h.swipe_fired = true;
            out.push(TriggerCommand::CycleClusterMode { structure });
        }
    }
}

/// Nearest cell hit by the ray from the user through `hand`.
pub(crate) fn ray_cell(w: &Workspace, hand: &Point) -> Option<CellId> {
    let dir = hand - w.user_position;
    if dir.norm() < 1e-9 {
        return None;
    }
    w.cells
        .iter()
        .filter_map(|c| {
            c.panel(&w.config)
                .ray_hit(&w.user_position, &dir)
                .map(|t| (t, c.id))
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, id)| id)
}

fn nearest_endpoint(w: &Workspace, p: &Point) -> Option<(CellId, CellId, EdgeEnd)> {
    w.edges
        .iter()
        .filter(|e| e.visible && e.polyline.len() >= 2)
        .flat_map(|e| {
            [
                (e.polyline[0], EdgeEnd::From),
                (*e.polyline.last().expect("len >= 2"), EdgeEnd::To),
            ]
            .map(|(q, end)| ((q - p).norm(), e.from, e.to, end))
        })
        .filter(|x| x.0 <= ENDPOINT_REACH)
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, f, t, end)| (f, t, end))
}
