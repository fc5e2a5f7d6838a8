//! Scene/command protocol for an interactive viewer.
//!
//! The viewer sends [`ViewerCommand`]s and receives [`SceneDiff`]s. Every
//! scene change goes through a [`Session`], so a viewer never lays anything
//! out itself, and the command log it downloads replays on the command line
//! to the same scene.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gesture::{GestureThresholds, TimedCommand, TriggerCommand};
use crate::layout::Structure;
use crate::model::{AnalysisPhase, CellId, StructureId, Workspace};
use crate::scene::{CellDoc, EdgeDoc};
use crate::session::Session;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ViewerCommand {
    /// Any engine command, exactly as it appears in a command log.
    Trigger(TriggerCommand),
    /// Camera controls. Angles in radians, distances in meters.
    Orbit {
        yaw: f64,
        pitch: f64,
    },
    Pan {
        dx: f64,
        dy: f64,
    },
    Zoom {
        factor: f64,
    },
    /// Display mode; it changes what the viewer emphasizes, not the scene.
    SetPhase {
        phase: AnalysisPhase,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Camera {
    pub yaw: f64,
    pub pitch: f64,
    pub pan: [f64; 2],
    pub zoom: f64,
    pub phase: AnalysisPhase,
}

impl Default for Camera {
    fn default() -> Self {
        Camera {
            yaw: 0.0,
            pitch: 0.0,
            pan: [0.0, 0.0],
            zoom: 1.0,
            phase: AnalysisPhase::Exploratory,
        }
    }
}

/// The minimal change between two scenes. Added and changed items are
/// carried whole; removed ones by key.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SceneDiff {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cells: Vec<CellDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub removed_cells: Vec<CellId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edges: Vec<EdgeDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub removed_edges: Vec<[CellId; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub structures: Vec<Structure>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub removed_structures: Vec<StructureId>,
}

fn changes<K: Ord + Copy, T: PartialEq + Clone>(
    before: BTreeMap<K, &T>,
    after: BTreeMap<K, &T>,
) -> (Vec<T>, Vec<K>) {
    let changed = after
        .iter()
        .filter(|(k, v)| before.get(k) != Some(*v))
        .map(|(_, v)| (*v).clone())
        .collect();
    let removed = before
        .keys()
        .filter(|k| !after.contains_key(k))
        .copied()
        .collect();
    (changed, removed)
}

impl SceneDiff {
    pub fn compute(before: &Workspace, after: &Workspace) -> SceneDiff {
        let cell_docs = |w: &Workspace| {
            w.cells
                .iter()
                .map(|c| (c.id, CellDoc::from(c)))
                .collect::<BTreeMap<_, _>>()
        };
        let edge_docs = |w: &Workspace| {
            w.edges
                .iter()
                .map(|e| ([e.from, e.to], EdgeDoc::from(e)))
                .collect::<BTreeMap<_, _>>()
        };
        let (cb, ca) = (cell_docs(before), cell_docs(after));
        let (eb, ea) = (edge_docs(before), edge_docs(after));
        let (cells, removed_cells) = changes(
            cb.iter().map(|(k, v)| (*k, v)).collect(),
            ca.iter().map(|(k, v)| (*k, v)).collect(),
        );
        let (edges, removed_edges) = changes(
            eb.iter().map(|(k, v)| (*k, v)).collect(),
            ea.iter().map(|(k, v)| (*k, v)).collect(),
        );
        let (structures, removed_structures) = changes(
            before.structures.iter().map(|s| (s.id, s)).collect(),
            after.structures.iter().map(|s| (s.id, s)).collect(),
        );
        SceneDiff {
            cells,
            removed_cells,
            edges,
            removed_edges,
            structures,
            removed_structures,
        }
    }

    pub fn is_empty(&self) -> bool {
        *self == SceneDiff::default()
    }

    /// Applies the diff to `w`, the scene it was computed against.
    pub fn apply(&self, w: &Workspace) -> Workspace {
        let mut out = w.clone();
        out.cells.retain(|c| !self.removed_cells.contains(&c.id));
        for d in &self.cells {
            out.cells.retain(|c| c.id != d.id);
            out.cells.push(d.clone().into());
        }
        out.edges
            .retain(|e| !self.removed_edges.contains(&[e.from, e.to]));
        for d in &self.edges {
            out.edges.retain(|e| (e.from, e.to) != (d.from, d.to));
            out.edges.push(d.clone().into());
        }
        out.structures
            .retain(|s| !self.removed_structures.contains(&s.id));
        for s in &self.structures {
            out.structures.retain(|x| x.id != s.id);
            out.structures.push(s.clone());
        }
        out.sort();
        out
    }
}

/// Engine side of the protocol.
#[derive(Debug, Clone)]
pub struct ViewerEngine {
    session: Session,
    camera: Camera,
    log: Vec<TimedCommand>,
    clock: f64,
}

impl ViewerEngine {
    pub fn new(w: Workspace, th: GestureThresholds) -> Self {
        ViewerEngine {
            session: Session::new(w, th),
            camera: Camera::default(),
            log: Vec::new(),
            clock: 0.0,
        }
    }

    pub fn workspace(&self) -> &Workspace {
        self.session.workspace()
    }

    pub fn camera(&self) -> &Camera {
        &self.camera
    }

    /// Commands accepted so far, in the command-log format.
    pub fn command_log(&self) -> &[TimedCommand] {
        &self.log
    }

    /// Handles one command. On error the scene is unchanged and the error
    /// is returned as the engine reported it.
    pub fn handle(&mut self, cmd: &ViewerCommand) -> Result<SceneDiff> {
        match cmd {
            ViewerCommand::Trigger(c) => {
                let before = self.session.workspace().clone();
                self.clock += 1.0;
                self.session.handle(self.clock, c)?;
                self.log.push(TimedCommand {
                    t: self.clock,
                    command: c.clone(),
                });
                Ok(SceneDiff::compute(&before, self.session.workspace()))
            }
            ViewerCommand::Orbit { yaw, pitch } => {
                self.camera.yaw += yaw;
                self.camera.pitch = (self.camera.pitch + pitch).clamp(-1.5, 1.5);
                Ok(SceneDiff::default())
            }
            ViewerCommand::Pan { dx, dy } => {
                self.camera.pan[0] += dx;
                self.camera.pan[1] += dy;
                Ok(SceneDiff::default())
            }
            ViewerCommand::Zoom { factor } => {
                if factor.is_finite() && *factor > 0.0 {
                    self.camera.zoom *= factor;
                }
                Ok(SceneDiff::default())
            }
            ViewerCommand::SetPhase { phase } => {
                self.camera.phase = *phase;
                Ok(SceneDiff::default())
            }
        }
    }
}
