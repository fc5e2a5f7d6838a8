//! Structure application and the edits users make to existing structures:
//! move, detach/insert, rewire, toggle, merge, and dimension/orientation
//! changes.
//!
//! Every function takes the workspace by reference and returns a new one;
//! on error the caller's workspace is untouched.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{centroid, Point, Pose};
use crate::layout::scene::layered_pose;
use crate::layout::{
    layout_structure, normalize_params, repair_params, route_edges, EdgePolicy, Orientation,
    SkipDirection, Structure, StructureKind, StructureParams,
};
use crate::model::{CellId, StructureId, Workspace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeEnd {
    From,
    To,
}

/// One engine-level change to a workspace. Gesture commands resolve to
/// these; scripts and the command line issue them directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum Operation {
    Apply {
        selection: Vec<CellId>,
        kind: StructureKind,
        #[serde(default)]
        params: StructureParams,
    },
    Move {
        structure: StructureId,
        grab: Point,
        release: Point,
    },
    DetachOrInsert {
        cell: CellId,
        release: Pose,
    },
    Rewire {
        from: CellId,
        to: CellId,
        end: EdgeEnd,
        cell: CellId,
    },
    Toggle {
        selection: Vec<CellId>,
    },
    Merge {
        src: StructureId,
        dst: StructureId,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        at: Option<Point>,
    },
    Dims {
        structure: StructureId,
        delta: i64,
    },
    Orient {
        structure: StructureId,
    },
}

/// Runs one operation. `proximity` is how close a structure grab must land
/// to the structure's centroid for a move to take hold.
pub fn execute(w: &Workspace, op: &Operation, proximity: f64) -> Result<Workspace> {
    match op {
        Operation::Apply {
            selection,
            kind,
            params,
        } => apply_structure(w, selection, *kind, params),
        Operation::Move {
            structure,
            grab,
            release,
        } => move_structure(w, *structure, grab, release, proximity),
        Operation::DetachOrInsert { cell, release } => detach_or_insert_cell(w, *cell, release),
        Operation::Rewire {
            from,
            to,
            end,
            cell,
        } => rewire_edge(w, *from, *to, *end, *cell),
        Operation::Toggle { selection } => toggle_indicators(w, selection),
        Operation::Merge { src, dst, at } => merge_structures(w, *src, *dst, at.as_ref()),
        Operation::Dims { structure, delta } => adjust_dimensions(w, *structure, *delta),
        Operation::Orient { structure } => adjust_orientation(w, *structure),
    }
}

/// Cells an operation touches, for the operation log.
pub fn affected(w: &Workspace, op: &Operation) -> Vec<String> {
    let members = |s: &StructureId| {
        w.structure(*s)
            .map(|s| s.members.iter().map(|m| m.to_string()).collect::<Vec<_>>())
            .unwrap_or_default()
    };
    match op {
        Operation::Apply { selection, .. } | Operation::Toggle { selection } => {
            selection.iter().map(|c| c.to_string()).collect()
        }
        Operation::Move { structure, .. }
        | Operation::Dims { structure, .. }
        | Operation::Orient { structure } => members(structure),
        Operation::DetachOrInsert { cell, .. } => vec![cell.to_string()],
        Operation::Rewire { from, to, cell, .. } => {
            vec![from.to_string(), to.to_string(), cell.to_string()]
        }
        Operation::Merge { src, dst, .. } => {
            let mut v = members(src);
            v.extend(members(dst));
            v
        }
    }
}

fn structure_or_err(w: &Workspace, id: StructureId) -> Result<&Structure> {
    w.structure(id).ok_or(Error::UnknownStructure(id))
}

/// Lays out one structure in place and installs its edges.
fn relayout(w: &mut Workspace, id: StructureId) -> Result<()> {
    let s = structure_or_err(w, id)?.clone();
    let placement = layout_structure(w, &s)?;
    for (i, m) in s.members.iter().enumerate() {
        let cell = w.cell_mut(*m).ok_or(Error::UnknownCell(*m))?;
        cell.pose = placement.poses[i];
        cell.folded = placement.folded[i];
    }
    let inside = |c: &CellId| s.members.contains(c);
    match placement.policy {
        EdgePolicy::Replace => w.edges.retain(|e| !(inside(&e.from) && inside(&e.to))),
        EdgePolicy::HideAll => {
            for e in w
                .edges
                .iter_mut()
                .filter(|e| inside(&e.from) && inside(&e.to))
            {
                e.visible = false;
            }
        }
        EdgePolicy::Overlay => {}
    }
    for e in &placement.edges {
        w.upsert_edge(s.members[e.from], s.members[e.to], e.visible, e.is_skip);
    }
    Ok(())
}

/// Takes `leaving` out of every structure other than `keep`, re-laying out
/// what remains or dissolving structures left with fewer than two members.
fn release_members(w: &mut Workspace, leaving: &[CellId], keep: Option<StructureId>) -> Result<()> {
    let touched: Vec<StructureId> = w
        .structures
        .iter()
        .filter(|s| Some(s.id) != keep && s.members.iter().any(|m| leaving.contains(m)))
        .map(|s| s.id)
        .collect();
    for id in touched {
        let cfg = w.config.clone();
        let s = w.structure_mut(id).ok_or(Error::UnknownStructure(id))?;
        s.members.retain(|m| !leaving.contains(m));
        if s.members.len() < 2 {
            w.structures.retain(|s| s.id != id);
            continue;
        }
        s.params = repair_params(s.kind, &s.members, &s.params, &cfg)?;
        relayout(w, id)?;
    }
    Ok(())
}

fn check_cells(w: &Workspace, ids: &[CellId]) -> Result<()> {
    match ids.iter().find(|id| !w.contains_cell(**id)) {
        Some(id) => Err(Error::UnknownCell(*id)),
        None => Ok(()),
    }
}

/// Builds a structure of `kind` over `selection`.
///
/// The structure is anchored at the selection centroid, turned toward the
/// user. Re-applying to exactly the members of an existing structure keeps
/// that structure's id and anchor, so repeated applies are idempotent.
pub fn apply_structure(
    w: &Workspace,
    selection: &[CellId],
    kind: StructureKind,
    params: &StructureParams,
) -> Result<Workspace> {
    check_cells(w, selection)?;
    let members = if kind == StructureKind::SkipLayer {
        w.reading_order(selection)
    } else {
        selection.to_vec()
    };
    let params = normalize_params(kind, &members, params, &w.config)?;

    let mut sorted = members.clone();
    sorted.sort();
    let existing = w
        .structures
        .iter()
        .find(|s| {
            let mut m = s.members.clone();
            m.sort();
            m == sorted
        })
        .map(|s| (s.id, s.anchor));

    let mut out = w.clone();
    if kind == StructureKind::SkipLayer {
        let direction = params.direction.unwrap_or(SkipDirection::Closer);
        let (user, depth) = (out.user_position, out.config.layer_depth);
        for id in &members {
            let cell = out.cell_mut(*id).ok_or(Error::UnknownCell(*id))?;
            cell.pose = layered_pose(&cell.pose, &user, direction, depth);
        }
    }
    let (id, anchor) = match existing {
        Some(found) => found,
        None => {
            let c = centroid(
                members
                    .iter()
                    .filter_map(|m| w.cell(*m))
                    .map(|c| &c.pose.position),
            )
            .ok_or_else(|| Error::Precondition("empty selection".into()))?;
            (w.next_structure_id(), Pose::facing(c, &w.user_position))
        }
    };
    release_members(&mut out, &members, Some(id))?;
    out.structures.retain(|s| s.id != id);
    out.structures.push(Structure {
        id,
        kind,
        members,
        anchor,
        params,
        phase: kind.default_phase(),
    });
    out.sort();
    relayout(&mut out, id)?;
    route_edges(&mut out);
    Ok(out)
}

/// Centroid of a structure's member positions.
pub fn structure_centroid(w: &Workspace, id: StructureId) -> Result<Point> {
    let s = structure_or_err(w, id)?;
    centroid(
        s.members
            .iter()
            .filter_map(|m| w.cell(*m))
            .map(|c| &c.pose.position),
    )
    .ok_or(Error::UnknownStructure(id))
}

/// Translates a structure by `release − grab`. A grab further than
/// `proximity` from the centroid finds no grabber and changes nothing.
pub fn move_structure(
    w: &Workspace,
    id: StructureId,
    grab: &Point,
    release: &Point,
    proximity: f64,
) -> Result<Workspace> {
    let c = structure_centroid(w, id)?;
    if (grab - c).norm() > proximity {
        return Ok(w.clone());
    }
    let by = release - grab;
    let mut out = w.clone();
    let s = out.structure_mut(id).ok_or(Error::UnknownStructure(id))?;
    s.anchor = s.anchor.translated(&by);
    let members = s.members.clone();
    for m in &members {
        let cell = out.cell_mut(*m).ok_or(Error::UnknownCell(*m))?;
        cell.pose = cell.pose.translated(&by);
    }
    route_edges(&mut out);
    Ok(out)
}

/// First structure (other than `exclude`) whose inflated bounding box
/// holds `p`.
pub fn structure_at(w: &Workspace, p: &Point, exclude: Option<StructureId>) -> Option<StructureId> {
    w.structures
        .iter()
        .filter(|s| Some(s.id) != exclude)
        .find(|s| inflated_box_contains(w, s, CellId(u32::MAX), p))
        .map(|s| s.id)
}

/// Local bounding box of a structure's cells (excluding `skip`), inflated
/// by one cell width, tested with a closed boundary.
fn inflated_box_contains(w: &Workspace, s: &Structure, skip: CellId, p: &Point) -> bool {
    let margin = w.config.cell_width;
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for m in s.members.iter().filter(|m| **m != skip) {
        let Some(cell) = w.cell(*m) else { continue };
        for corner in cell.panel(&w.config).corners() {
            let l = s.anchor.to_local(&corner);
            for k in 0..3 {
                lo[k] = lo[k].min(l[k]);
                hi[k] = hi[k].max(l[k]);
            }
        }
    }
    let l = s.anchor.to_local(p);
    (0..3).all(|k| l[k] >= lo[k] - margin && l[k] <= hi[k] + margin)
}

fn min_index(s: &Structure) -> usize {
    usize::from(s.kind == StructureKind::ParallelTree)
}

/// Index at which inserting `cell` puts it closest to `at`. Ties go to the
/// smallest index.
fn nearest_insert_index(w: &Workspace, s: &Structure, cell: CellId, at: &Point) -> Result<usize> {
    let mut best = (f64::INFINITY, s.members.len());
    for k in min_index(s)..=s.members.len() {
        let d = if s.kind == StructureKind::SkipLayer {
            (boundary_point(w, &s.members, k)? - at).norm()
        } else {
            let mut trial = s.clone();
            trial.members.insert(k, cell);
            trial.params = repair_params(trial.kind, &trial.members, &trial.params, &w.config)?;
            let placement = layout_structure(w, &trial)?;
            (placement.poses[k].position - at).norm()
        };
        if d < best.0 - 1e-12 {
            best = (d, k);
        }
    }
    Ok(best.1)
}

/// Point marking insertion boundary `k`: the midpoint between members
/// `k − 1` and `k`, or the end member itself at either end.
fn boundary_point(w: &Workspace, members: &[CellId], k: usize) -> Result<Point> {
    let pos = |i: usize| {
        w.cell(members[i])
            .map(|c| c.pose.position)
            .ok_or(Error::UnknownCell(members[i]))
    };
    Ok(if k == 0 {
        pos(0)?
    } else if k == members.len() {
        pos(k - 1)?
    } else {
        nalgebra::center(&pos(k - 1)?, &pos(k)?)
    })
}

/// Drops `cell` from structure `id`, linking its neighbors with a bypass
/// edge. The cell keeps no edges to its former co-members.
fn detach(w: &mut Workspace, id: StructureId, cell: CellId) -> Result<()> {
    let s = structure_or_err(w, id)?;
    let i = s
        .members
        .iter()
        .position(|m| *m == cell)
        .ok_or(Error::UnknownCell(cell))?;
    let pred = i.checked_sub(1).map(|p| s.members[p]);
    let succ = s.members.get(i + 1).copied();
    let others: Vec<CellId> = s.members.iter().copied().filter(|m| *m != cell).collect();
    w.edges.retain(|e| {
        !((e.from == cell && others.contains(&e.to)) || (e.to == cell && others.contains(&e.from)))
    });
    if let (Some(p), Some(q)) = (pred, succ) {
        if w.edge(p, q).is_none() {
            w.upsert_edge(p, q, true, false);
        }
    }
    release_members(w, &[cell], None)
}

/// Drops a grabbed cell at `release`. Released inside a structure's
/// inflated bounding box it joins that structure at the nearest index;
/// anywhere else it leaves its structure and stays where it was dropped.
pub fn detach_or_insert_cell(w: &Workspace, cell: CellId, release: &Pose) -> Result<Workspace> {
    check_cells(w, &[cell])?;
    let mut out = w.clone();
    let current = w.structure_of(cell).map(|s| s.id);
    let target = w
        .structures
        .iter()
        .find(|s| {
            !(s.members.len() == 1 && s.members[0] == cell)
                && inflated_box_contains(w, s, cell, &release.position)
        })
        .map(|s| s.id);

    if let Some(cur) = current {
        detach(&mut out, cur, cell)?;
    }
    out.cell_mut(cell).ok_or(Error::UnknownCell(cell))?.pose = *release;
    out.cell_mut(cell).ok_or(Error::UnknownCell(cell))?.folded = false;

    // the target may have dissolved or changed when the cell left it
    if let Some(tid) = target.filter(|t| out.structure(*t).is_some()) {
        let s = structure_or_err(&out, tid)?.clone();
        let k = nearest_insert_index(&out, &s, cell, &release.position)?;
        let cfg = out.config.clone();
        let s = out.structure_mut(tid).ok_or(Error::UnknownStructure(tid))?;
        s.members.insert(k, cell);
        s.params = repair_params(s.kind, &s.members, &s.params, &cfg)?;
        relayout(&mut out, tid)?;
    }
    route_edges(&mut out);
    Ok(out)
}

/// Moves one end of the edge `from → to` onto `cell`.
pub fn rewire_edge(
    w: &Workspace,
    from: CellId,
    to: CellId,
    end: EdgeEnd,
    cell: CellId,
) -> Result<Workspace> {
    check_cells(w, &[cell])?;
    let edge = w
        .edge(from, to)
        .ok_or(Error::UnknownEdge { from, to })?
        .clone();
    let (nf, nt) = match end {
        EdgeEnd::From => (cell, to),
        EdgeEnd::To => (from, cell),
    };
    if nf == nt {
        return Err(Error::Param(format!(
            "rewiring would make {nf} point at itself"
        )));
    }
    if (nf, nt) != (from, to) && w.edge(nf, nt).is_some() {
        return Err(Error::Param(format!("edge {nf} -> {nt} already exists")));
    }
    let mut out = w.clone();
    out.edges.retain(|e| e.key() != (from, to));
    out.upsert_edge(nf, nt, edge.visible, edge.is_skip);
    route_edges(&mut out);
    Ok(out)
}

/// Flips visibility of every edge whose endpoints are both selected.
pub fn toggle_indicators(w: &Workspace, selection: &[CellId]) -> Result<Workspace> {
    if selection.is_empty() {
        return Err(Error::Precondition("toggle needs a selection".into()));
    }
    check_cells(w, selection)?;
    let mut out = w.clone();
    for e in out
        .edges
        .iter_mut()
        .filter(|e| selection.contains(&e.from) && selection.contains(&e.to))
    {
        e.visible = !e.visible;
    }
    route_edges(&mut out);
    Ok(out)
}

/// Folds `src` into `dst`, which keeps its kind. With a release point the
/// source members go in at the nearest boundary between destination
/// members; without one they are appended.
pub fn merge_structures(
    w: &Workspace,
    src: StructureId,
    dst: StructureId,
    at: Option<&Point>,
) -> Result<Workspace> {
    if src == dst {
        return Err(Error::Precondition(
            "cannot merge a structure into itself".into(),
        ));
    }
    let s = structure_or_err(w, src)?.clone();
    let d = structure_or_err(w, dst)?.clone();
    let k = match at {
        None => d.members.len(),
        Some(p) => {
            let mut best = (f64::INFINITY, d.members.len());
            for k in min_index(&d)..=d.members.len() {
                let dist = (boundary_point(w, &d.members, k)? - p).norm();
                if dist < best.0 - 1e-12 {
                    best = (dist, k);
                }
            }
            best.1
        }
    };
    let mut out = w.clone();
    if d.kind == StructureKind::SkipLayer {
        let direction = d.params.direction.unwrap_or(SkipDirection::Closer);
        let (user, depth) = (out.user_position, out.config.layer_depth);
        for m in &s.members {
            let cell = out.cell_mut(*m).ok_or(Error::UnknownCell(*m))?;
            cell.pose = layered_pose(&cell.pose, &user, direction, depth);
        }
    }
    for m in &s.members {
        out.cell_mut(*m).ok_or(Error::UnknownCell(*m))?.folded = false;
    }
    out.structures.retain(|x| x.id != src);
    let cfg = out.config.clone();
    let target = out.structure_mut(dst).ok_or(Error::UnknownStructure(dst))?;
    for (j, m) in s.members.iter().enumerate() {
        target.members.insert(k + j, *m);
    }
    target.params = repair_params(target.kind, &target.members, &target.params, &cfg)?;
    relayout(&mut out, dst)?;
    route_edges(&mut out);
    Ok(out)
}

/// Adds `delta` rows (or columns) to a grid, clamped to `[2, members]`.
pub fn adjust_dimensions(w: &Workspace, id: StructureId, delta: i64) -> Result<Workspace> {
    let s = structure_or_err(w, id)?;
    let n = s.members.len() as i64;
    let mut params = s.params.clone();
    let slot = match s.kind {
        StructureKind::MultiRowGrid => &mut params.rows,
        StructureKind::MultiColumnGrid => &mut params.cols,
        k => {
            return Err(Error::Precondition(format!(
                "only grids have dimensions to adjust, {id} is {}",
                k.name()
            )))
        }
    };
    let current = slot.unwrap_or(2) as i64;
    *slot = Some((current + delta).clamp(2, n.max(2)) as usize);
    let mut out = w.clone();
    let cfg = out.config.clone();
    let s = out.structure_mut(id).ok_or(Error::UnknownStructure(id))?;
    s.params = normalize_params(s.kind, &s.members, &params, &cfg)?;
    relayout(&mut out, id)?;
    route_edges(&mut out);
    Ok(out)
}

/// Turns a row grid into a column grid (and back), or flips a tree between
/// horizontal and vertical branches.
pub fn adjust_orientation(w: &Workspace, id: StructureId) -> Result<Workspace> {
    let s = structure_or_err(w, id)?;
    let (kind, params) = match s.kind {
        StructureKind::MultiRowGrid => (
            StructureKind::MultiColumnGrid,
            StructureParams {
                cols: s.params.rows,
                ..Default::default()
            },
        ),
        StructureKind::MultiColumnGrid => (
            StructureKind::MultiRowGrid,
            StructureParams {
                rows: s.params.cols,
                ..Default::default()
            },
        ),
        StructureKind::ParallelTree => {
            let mut p = s.params.clone();
            p.orientation = Some(p.orientation.unwrap_or(Orientation::Horizontal).toggled());
            (StructureKind::ParallelTree, p)
        }
        k => {
            return Err(Error::Precondition(format!(
                "{id} is {}, which has no orientation",
                k.name()
            )))
        }
    };
    let mut out = w.clone();
    let cfg = out.config.clone();
    let s = out.structure_mut(id).ok_or(Error::UnknownStructure(id))?;
    s.params = normalize_params(kind, &s.members, &params, &cfg)?;
    s.kind = kind;
    relayout(&mut out, id)?;
    route_edges(&mut out);
    Ok(out)
}
