//! Hand-tracking input: pose events, thresholds, the commands gestures
//! resolve to, and the interpreter that turns one into the other.

mod classify;
mod interpreter;
pub mod synth;

pub use classify::{classify_segment, GestureKind, HandTrack, Sample, Segment};
pub use interpreter::{Interpreter, ProxyWindow};

use nalgebra::{Quaternion, UnitQuaternion};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Point, Pose};
use crate::layout::{Orientation, SkipDirection};
use crate::model::{CellId, StructureId};
use crate::ops::EdgeEnd;

/// Pinch and grip are "on" at or above this level.
pub const PRESS_LEVEL: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Hand {
    #[serde(rename = "L")]
    Left,
    #[serde(rename = "R")]
    Right,
}

impl Hand {
    pub fn index(self) -> usize {
        match self {
            Hand::Left => 0,
            Hand::Right => 1,
        }
    }
}

/// One tracked hand sample. Serialized as one line of a gesture trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandPoseEvent {
    pub t: f64,
    pub hand: Hand,
    #[serde(rename = "pos")]
    pub position: Point,
    /// Unit quaternion as `[x, y, z, w]`.
    #[serde(rename = "quat")]
    pub orientation: [f64; 4],
    pub grip: f64,
    pub pinch: f64,
}

impl HandPoseEvent {
    pub fn rotation(&self) -> UnitQuaternion<f64> {
        let [x, y, z, w] = self.orientation;
        UnitQuaternion::new_unchecked(Quaternion::new(w, x, y, z))
    }

    pub fn check(&self) -> Result<()> {
        if !self.t.is_finite() || !self.position.iter().all(|c| c.is_finite()) {
            return Err(Error::Stream(format!("non-finite sample at t={}", self.t)));
        }
        let norm = self.orientation.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::Stream(format!(
                "orientation at t={} has norm {norm}, expected 1",
                self.t
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GestureThresholds {
    pub pull_apart_min: f64,
    pub squeeze_max: f64,
    /// Elevation window (degrees) that makes a drag diagonal. Anything
    /// flatter than the lower bound counts as horizontal.
    pub diag_angle: [f64; 2],
    pub min_drag: f64,
    pub sweep_min: f64,
    pub depth_pull_min: f64,
    pub swipe_speed_min: f64,
    pub swipe_travel_min: f64,
    pub grab_grip_min: f64,
    pub proximity_grabber: f64,
    pub row_step: f64,
    pub rotate_toggle: f64,
    pub dwell_commit: f64,
}

impl Default for GestureThresholds {
    fn default() -> Self {
        GestureThresholds {
            pull_apart_min: 0.25,
            squeeze_max: 0.12,
            diag_angle: [20.0, 70.0],
            min_drag: 0.20,
            sweep_min: 270.0,
            depth_pull_min: 0.30,
            swipe_speed_min: 1.0,
            swipe_travel_min: 0.30,
            grab_grip_min: 0.7,
            proximity_grabber: 0.30,
            row_step: 0.15,
            rotate_toggle: 45.0,
            dwell_commit: 150.0,
        }
    }
}

impl GestureThresholds {
    pub fn check(&self) -> Result<()> {
        let fields = [
            self.pull_apart_min,
            self.squeeze_max,
            self.min_drag,
            self.sweep_min,
            self.depth_pull_min,
            self.swipe_speed_min,
            self.swipe_travel_min,
            self.grab_grip_min,
            self.proximity_grabber,
            self.row_step,
            self.rotate_toggle,
            self.dwell_commit,
        ];
        if fields.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Param("gesture thresholds must be positive".into()));
        }
        let [lo, hi] = self.diag_angle;
        if !(0.0 < lo && lo < hi && hi < 90.0) {
            return Err(Error::Param(
                "diag_angle must satisfy 0 < lo < hi < 90".into(),
            ));
        }
        Ok(())
    }
}

/// What a recognized gesture asks the engine to do.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "cmd", rename_all = "kebab-case")]
pub enum TriggerCommand {
    SelectCell {
        cell: CellId,
    },
    DeselectAll,
    CreateLinearLinear,
    CreateGrid {
        orientation: Orientation,
        count: usize,
    },
    CreateParallelTree {
        roots: Vec<CellId>,
    },
    CreateLoopCircle,
    CreateSkipFold {
        keep: Vec<CellId>,
    },
    CreateSkipPile {
        head: CellId,
    },
    ApplySkipLayer {
        direction: SkipDirection,
    },
    CycleClusterMode {
        structure: StructureId,
    },
    GrabStructure {
        structure: StructureId,
        at: Point,
    },
    ReleaseStructure {
        at: Point,
    },
    GrabCell {
        cell: CellId,
    },
    ReleaseCell {
        pose: Pose,
    },
    GrabEdgeEndpoint {
        from: CellId,
        to: CellId,
        end: EdgeEnd,
    },
    ReleaseEdgeEndpoint {
        cell: CellId,
    },
    ToggleIndicators {
        selection: Vec<CellId>,
    },
    MergeStructures {
        src: StructureId,
        dst: StructureId,
        at: Point,
    },
    AdjustDimensions {
        structure: StructureId,
        delta: i64,
    },
    AdjustOrientation {
        structure: StructureId,
    },
    Cancel,
}

impl TriggerCommand {
    /// Commands that build a new structure from the current selection.
    pub fn creates_structure(&self) -> bool {
        matches!(
            self,
            TriggerCommand::CreateLinearLinear
                | TriggerCommand::CreateGrid { .. }
                | TriggerCommand::CreateParallelTree { .. }
                | TriggerCommand::CreateLoopCircle
                | TriggerCommand::CreateSkipFold { .. }
                | TriggerCommand::CreateSkipPile { .. }
                | TriggerCommand::ApplySkipLayer { .. }
        )
    }
}

/// A command stamped with the time it was emitted; one line of a command
/// log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimedCommand {
    pub t: f64,
    #[serde(flatten)]
    pub command: TriggerCommand,
}
