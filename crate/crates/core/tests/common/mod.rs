//! Helpers shared by the integration tests: fixtures, independent geometry
//! oracles and the per-kind gesture and direct paths.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use spatial_notebook::geom::{Point, Pose};
use spatial_notebook::gesture::synth::{canonical_trace, Canonical};
use spatial_notebook::gesture::{GestureThresholds, TriggerCommand};
use spatial_notebook::layout::{
    initial_circular_layout, linear_workspace_layout, LayoutConfig, Orientation, SkipDirection,
    StructureKind, StructureParams,
};
use spatial_notebook::model::{Cell, CellId, CellKind, ExecutionEdge, OutputArtifact, Workspace};
use spatial_notebook::notebook::import_notebook;
use spatial_notebook::ops::{execute, Operation};
use spatial_notebook::scene::serialize_scene;
use spatial_notebook::session::Session;

pub fn fixture_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// The 50-cell course notebook on its initial semicircle.
pub fn fixture50() -> Workspace {
    let bytes = std::fs::read(fixture_path("fixture50.ipynb")).unwrap();
    let imported = import_notebook(&bytes, &LayoutConfig::default()).unwrap();
    initial_circular_layout(&imported.workspace)
}

/// `n` code cells in one row in front of the user, chained, with mixed
/// formats and task tags so both cluster modes have something to do.
pub fn row_scene(n: u32) -> Workspace {
    let cfg = LayoutConfig::default();
    let mut w = Workspace::new(cfg.clone());
    for i in 0..n {
        let mut c = Cell::new(CellId(i), CellKind::Code, format!("x{i} = {i}"), &cfg);
        c.task_tag =
            Some(["load", "fit", "plot"][(i as usize * 3 / n as usize).min(2)].to_string());
        if i % 3 == 2 {
            c.outputs.push(OutputArtifact::Image {
                mime: "image/png".into(),
            });
        }
        w.cells.push(c);
    }
    for i in 1..n {
        w.edges.push(ExecutionEdge::new(CellId(i - 1), CellId(i)));
    }
    linear_workspace_layout(&w)
}

pub fn ids(range: std::ops::Range<u32>) -> Vec<CellId> {
    range.map(CellId).collect()
}

pub fn apply(
    w: &Workspace,
    selection: &[CellId],
    kind: StructureKind,
    params: StructureParams,
) -> Workspace {
    execute(
        w,
        &Operation::Apply {
            selection: selection.to_vec(),
            kind,
            params,
        },
        GestureThresholds::default().proximity_grabber,
    )
    .unwrap()
}

// ---- geometry oracles, written from the closed forms with explicit trig ----

/// World position of local `(x, y)` in the plane of an anchor with yaw
/// `yaw` (rotation about +y).
pub fn oracle_world(anchor: &Point, yaw: f64, x: f64, y: f64) -> Point {
    Point::new(
        anchor.x + x * yaw.cos(),
        anchor.y + y,
        anchor.z - x * yaw.sin(),
    )
}

/// Row-major (rows) or column-major (cols) grid, `count` lines.
pub fn oracle_grid(n: usize, count: usize, columns: bool, cfg: &LayoutConfig) -> Vec<(f64, f64)> {
    let per = n.div_ceil(count);
    (0..n)
        .map(|i| {
            let (r, c) = if columns {
                (i % per, i / per)
            } else {
                (i / per, i % per)
            };
            (
                c as f64 * (cfg.cell_width + cfg.gap),
                -(r as f64) * (cfg.cell_height + cfg.gap),
            )
        })
        .collect()
}

/// Loop: first member on top, clockwise; radius from the diagonal pitch.
pub fn oracle_circle(n: usize, cfg: &LayoutConfig) -> Vec<(f64, f64)> {
    let sx = cfg.cell_width + cfg.gap;
    let sy = cfg.cell_height + cfg.gap;
    let r = f64::max(
        cfg.min_circle_radius,
        n as f64 * (sx * sx + sy * sy).sqrt() / (2.0 * std::f64::consts::PI),
    );
    (0..n)
        .map(|i| {
            let t = std::f64::consts::FRAC_PI_2 - 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            (r * t.cos(), r * t.sin())
        })
        .collect()
}

/// Tree: trunk up to the member before the first root, then branch k.
/// Horizontal trees put branch k at height ((B-1)/2 - k) rows, first branch
/// on top; vertical trees hang branch k at column (k - (B-1)/2), first
/// branch leftmost.
pub fn oracle_tree(
    n: usize,
    roots: &[usize],
    vertical: bool,
    cfg: &LayoutConfig,
) -> Vec<(f64, f64)> {
    let sx = cfg.cell_width + cfg.gap;
    let sy = cfg.cell_height + cfg.gap;
    let b = roots.len() as f64;
    let fork = roots[0] - 1;
    let at = |along: usize, lane: f64| {
        if vertical {
            (lane * sx, -(along as f64) * sy)
        } else {
            (along as f64 * sx, -lane * sy)
        }
    };
    let mut out = vec![(0.0, 0.0); n];
    for (m, p) in out.iter_mut().enumerate().take(fork + 1) {
        *p = at(m, 0.0);
    }
    for (k, &start) in roots.iter().enumerate() {
        let end = roots.get(k + 1).copied().unwrap_or(n);
        for (j, m) in (start..end).enumerate() {
            out[m] = at(fork + 1 + j, k as f64 - (b - 1.0) / 2.0);
        }
    }
    out
}

pub fn tree_orientation(vertical: bool) -> Orientation {
    if vertical {
        Orientation::Vertical
    } else {
        Orientation::Horizontal
    }
}

pub fn max_error(poses: &[Pose], local: &[(f64, f64)], anchor: &Pose) -> f64 {
    poses
        .iter()
        .zip(local)
        .map(|(p, (x, y))| (p.position - oracle_world(&anchor.position, anchor.yaw, *x, *y)).norm())
        .fold(0.0, f64::max)
}

// ---- brute-force routing oracle ----

/// Number of (edge segment, cell) pairs where a routed polyline enters a
/// cell's open interior. Segments are sampled densely and, when they cross
/// the cell plane, tested at the exact crossing point.
pub fn polyline_intrusions(w: &Workspace) -> usize {
    let mut hits = 0;
    for e in w.edges.iter().filter(|e| e.visible) {
        for seg in e.polyline.windows(2) {
            for c in &w.cells {
                let height = if c.folded {
                    w.config.fold_bar_height
                } else {
                    c.height
                };
                if segment_enters(&seg[0], &seg[1], &c.pose, c.width, height) {
                    hits += 1;
                }
            }
        }
    }
    hits
}

fn local(p: &Point, pose: &Pose) -> (f64, f64, f64) {
    let (dx, dy, dz) = (
        p.x - pose.position.x,
        p.y - pose.position.y,
        p.z - pose.position.z,
    );
    let (s, c) = pose.yaw.sin_cos();
    // inverse of the yaw rotation about +y
    (dx * c - dz * s, dy, dx * s + dz * c)
}

fn segment_enters(a: &Point, b: &Point, pose: &Pose, w: f64, h: f64) -> bool {
    let (hw, hh) = (w / 2.0 - 1e-7, h / 2.0 - 1e-7);
    let la = local(a, pose);
    let lb = local(b, pose);
    let inside = |x: f64, y: f64| x.abs() < hw && y.abs() < hh;
    let plane_tol = 1e-7;
    if la.2.abs() < plane_tol && lb.2.abs() < plane_tol {
        return (0..=400).any(|i| {
            let t = i as f64 / 400.0;
            inside(la.0 + (lb.0 - la.0) * t, la.1 + (lb.1 - la.1) * t)
        });
    }
    if (la.2 > plane_tol && lb.2 > plane_tol) || (la.2 < -plane_tol && lb.2 < -plane_tol) {
        return false;
    }
    let t = la.2 / (la.2 - lb.2);
    inside(la.0 + (lb.0 - la.0) * t, la.1 + (lb.1 - la.1) * t)
}

// ---- gesture path versus direct path, per structure kind ----

pub struct KindCase {
    pub kind: StructureKind,
    /// Scene the case starts from.
    pub start: Workspace,
    /// Gesture steps: each is (gesture, cells to select first).
    pub steps: Vec<(Canonical, Vec<CellId>)>,
    /// The equivalent direct operation on `start`.
    pub direct: Operation,
}

pub const CASE_CELLS: u32 = 6;

pub fn kind_cases() -> Vec<KindCase> {
    let n = CASE_CELLS;
    let all = ids(0..n);
    let plain = row_scene(n);
    let chained = apply(
        &plain,
        &all,
        StructureKind::LinearLinear,
        StructureParams::default(),
    );
    let op = |selection: Vec<CellId>, kind, params| Operation::Apply {
        selection,
        kind,
        params,
    };
    let none = StructureParams::default;
    StructureKind::ALL
        .into_iter()
        .map(|kind| {
            let (start, steps, direct) = match kind {
                StructureKind::LinearLinear => (
                    plain.clone(),
                    vec![(Canonical::PullApart, all.clone())],
                    op(all.clone(), kind, none()),
                ),
                StructureKind::MultiRowGrid => (
                    plain.clone(),
                    vec![(Canonical::Diagonal { rows: 3 }, all.clone())],
                    op(
                        all.clone(),
                        kind,
                        StructureParams {
                            rows: Some(3),
                            ..none()
                        },
                    ),
                ),
                StructureKind::MultiColumnGrid => (
                    plain.clone(),
                    vec![
                        (Canonical::Diagonal { rows: 2 }, all.clone()),
                        (Canonical::Turn, all.clone()),
                    ],
                    op(
                        all.clone(),
                        kind,
                        StructureParams {
                            cols: Some(2),
                            ..none()
                        },
                    ),
                ),
                StructureKind::ParallelTree => {
                    let roots = vec![CellId(1), CellId(4)];
                    (
                        plain.clone(),
                        vec![(Canonical::OneHandPull, roots.clone())],
                        op(
                            all.clone(),
                            kind,
                            StructureParams {
                                branch_roots: roots,
                                ..none()
                            },
                        ),
                    )
                }
                StructureKind::LoopCircle => (
                    plain.clone(),
                    vec![(Canonical::Sweep, all.clone())],
                    op(all.clone(), kind, none()),
                ),
                StructureKind::ClusterByFormat => (
                    chained.clone(),
                    vec![(Canonical::Swipe, vec![CellId(2)])],
                    op(all.clone(), kind, none()),
                ),
                StructureKind::ClusterByTask => (
                    chained.clone(),
                    vec![
                        (Canonical::Swipe, vec![CellId(2)]),
                        (Canonical::Swipe, vec![CellId(2)]),
                    ],
                    op(all.clone(), kind, none()),
                ),
                StructureKind::SkipLayer => {
                    let sel = vec![CellId(1), CellId(3), CellId(5)];
                    (
                        plain.clone(),
                        vec![(Canonical::FollowMe, sel.clone())],
                        op(
                            sel,
                            kind,
                            StructureParams {
                                direction: Some(SkipDirection::Closer),
                                ..none()
                            },
                        ),
                    )
                }
                StructureKind::SkipFold => (
                    plain.clone(),
                    vec![(Canonical::Squeeze, all.clone())],
                    op(
                        all.clone(),
                        kind,
                        StructureParams {
                            keep: Some(vec![CellId(0), CellId(n - 1)]),
                            ..none()
                        },
                    ),
                ),
                StructureKind::SkipPile => (
                    plain.clone(),
                    vec![(Canonical::Pile, all.clone())],
                    op(
                        all.clone(),
                        kind,
                        StructureParams {
                            visible_head: Some(CellId(0)),
                            ..none()
                        },
                    ),
                ),
            };
            KindCase {
                kind,
                start,
                steps,
                direct,
            }
        })
        .collect()
}

/// Runs the gesture steps through a session; returns the final scene and
/// how many commands were rejected.
pub fn gesture_path(case: &KindCase, noise: Option<(f64, u64)>) -> (Workspace, usize) {
    let th = GestureThresholds::default();
    let mut s = Session::new(case.start.clone(), th.clone());
    let mut rejected = 0;
    for (g, sel) in &case.steps {
        let trace = canonical_trace(s.workspace(), *g, sel, &th, noise);
        rejected += s.replay_trace(&trace).unwrap().rejected.len();
    }
    (s.into_workspace(), rejected)
}

pub fn direct_path(case: &KindCase) -> Workspace {
    execute(
        &case.start,
        &case.direct,
        GestureThresholds::default().proximity_grabber,
    )
    .unwrap()
}

pub fn scene_bytes(w: &Workspace) -> String {
    serialize_scene(w)
}

// ---- canonical gesture expectations ----

/// Starting scene and selection for canonical gesture `g`. For a swipe the
/// selection names a cell of the structure to cross.
pub fn gesture_case(g: Canonical) -> (Workspace, Vec<CellId>) {
    let all = ids(0..CASE_CELLS);
    match g {
        Canonical::Swipe => (
            apply(
                &row_scene(CASE_CELLS),
                &all,
                StructureKind::LinearLinear,
                StructureParams::default(),
            ),
            vec![CellId(2)],
        ),
        Canonical::Turn => (
            apply(
                &row_scene(CASE_CELLS),
                &all,
                StructureKind::MultiRowGrid,
                StructureParams {
                    rows: Some(2),
                    ..Default::default()
                },
            ),
            all,
        ),
        Canonical::OneHandPull => (row_scene(CASE_CELLS), vec![CellId(1), CellId(4)]),
        Canonical::FollowMe | Canonical::GoAway => {
            (row_scene(CASE_CELLS), vec![CellId(1), CellId(3), CellId(5)])
        }
        _ => (row_scene(CASE_CELLS), all),
    }
}

pub fn expected_command(g: Canonical, sel: &[CellId], w: &Workspace) -> TriggerCommand {
    match g {
        Canonical::PullApart => TriggerCommand::CreateLinearLinear,
        Canonical::Diagonal { rows } => TriggerCommand::CreateGrid {
            orientation: Orientation::Horizontal,
            count: rows,
        },
        Canonical::OneHandPull => TriggerCommand::CreateParallelTree {
            roots: sel.to_vec(),
        },
        Canonical::Sweep => TriggerCommand::CreateLoopCircle,
        Canonical::Squeeze => TriggerCommand::CreateSkipFold {
            keep: vec![sel[0], *sel.last().unwrap()],
        },
        Canonical::Pile => TriggerCommand::CreateSkipPile { head: sel[0] },
        Canonical::FollowMe => TriggerCommand::ApplySkipLayer {
            direction: SkipDirection::Closer,
        },
        Canonical::GoAway => TriggerCommand::ApplySkipLayer {
            direction: SkipDirection::Away,
        },
        Canonical::Swipe => TriggerCommand::CycleClusterMode {
            structure: w.structure_of(sel[0]).unwrap().id,
        },
        Canonical::Turn => TriggerCommand::AdjustOrientation {
            structure: w.structure_of(sel[0]).unwrap().id,
        },
    }
}

/// The last command that is not a selection step.
pub fn decisive(cmds: &[TriggerCommand]) -> Option<TriggerCommand> {
    cmds.iter()
        .rev()
        .find(|c| !matches!(c, TriggerCommand::SelectCell { .. }))
        .cloned()
}

/// True for commands that change structure (as opposed to Cancel,
/// selection or grabs).
pub fn is_composition(c: &TriggerCommand) -> bool {
    c.creates_structure()
        || matches!(
            c,
            TriggerCommand::CycleClusterMode { .. }
                | TriggerCommand::AdjustDimensions { .. }
                | TriggerCommand::AdjustOrientation { .. }
        )
}
