//! Whole-workspace layouts: the imported row, the initial semicircle and
//! depth layering.

use crate::error::{Error, Result};
use crate::geom::{Point, Pose};
use crate::model::{CellId, Workspace};

use super::{route_edges, SkipDirection};

/// Places every cell on one straight row at `initial_radius` in front of the
/// user, centered on the view axis, in cell order.
pub fn linear_workspace_layout(w: &Workspace) -> Workspace {
    let mut out = w.clone();
    let n = out.cells.len();
    let step = out.config.step_x();
    let z = -out.config.initial_radius;
    for (i, c) in out.cells.iter_mut().enumerate() {
        let x = (i as f64 - (n as f64 - 1.0) / 2.0) * step;
        c.pose = Pose::new(Point::new(x, 0.0, z), 0.0);
    }
    route_edges(&mut out);
    out
}

/// Places the cells left to right on a cylinder of radius `initial_radius`
/// around the origin, at equal angular steps over `initial_arc_span`, each
/// turned to face the origin. Existing structures are dropped.
pub fn initial_circular_layout(w: &Workspace) -> Workspace {
    let mut out = w.clone();
    out.structures.clear();
    let n = out.cells.len();
    let r = out.config.initial_radius;
    let span = out.config.initial_arc_span;
    for (i, c) in out.cells.iter_mut().enumerate() {
        let theta = if n == 1 {
            0.0
        } else {
            -span / 2.0 + i as f64 * span / (n as f64 - 1.0)
        };
        let position = Point::new(r * theta.sin(), 0.0, -r * theta.cos());
        c.pose = Pose::facing(position, &Point::origin());
        c.folded = false;
    }
    route_edges(&mut out);
    out
}

/// Where a cell lands after being pulled toward (or pushed away from) the
/// user by one layer.
pub fn layered_pose(pose: &Pose, user: &Point, direction: SkipDirection, depth: f64) -> Pose {
    let to_user = user - pose.position;
    let norm = to_user.norm();
    if norm < 1e-12 {
        return *pose;
    }
    let step = to_user / norm * depth;
    match direction {
        SkipDirection::Closer => pose.translated(&step),
        SkipDirection::Away => pose.translated(&-step),
    }
}

/// Moves the selected cells one layer along their cell→user axis and chains
/// them with visible skip edges in reading order. Nothing else moves.
pub fn layout_skip_layer(
    w: &Workspace,
    selected: &[CellId],
    direction: SkipDirection,
) -> Result<Workspace> {
    if selected.is_empty() {
        return Err(Error::Precondition("skip-layer needs a selection".into()));
    }
    let mut out = w.clone();
    let depth = out.config.layer_depth;
    let user = out.user_position;
    for id in selected {
        let cell = out.cell_mut(*id).ok_or(Error::UnknownCell(*id))?;
        cell.pose = layered_pose(&cell.pose, &user, direction, depth);
    }
    for pair in w.reading_order(selected).windows(2) {
        out.upsert_edge(pair[0], pair[1], true, true);
    }
    route_edges(&mut out);
    Ok(out)
}
