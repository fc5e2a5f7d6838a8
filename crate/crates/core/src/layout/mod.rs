//! Deterministic poses and edge sets for the ten composition structures,
//! the initial semicircle and execution-indicator routing.

mod route;
pub(crate) mod scene;
mod shapes;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Pose;
use crate::model::{AnalysisPhase, CellId, ExecutionOrderKind, LayoutKind, StructureId, Workspace};

pub use route::{polyline_hits, route_edges, RouteWarning};
pub use scene::{initial_circular_layout, layout_skip_layer, linear_workspace_layout};
pub use shapes::{
    cluster_partition, grid_cell, layout_cluster, layout_grid, layout_linear_linear,
    layout_loop_circle, layout_parallel_tree, layout_skip_fold, layout_skip_pile, loop_radius,
    tree_branches,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutConfig {
    pub cell_width: f64,
    pub cell_height: f64,
    pub gap: f64,
    pub min_clearance: f64,
    pub initial_radius: f64,
    pub initial_arc_span: f64,
    pub min_circle_radius: f64,
    pub layer_depth: f64,
    /// (dy, ddepth) applied per item stacked behind a pile head.
    pub pile_offset: [f64; 2],
    pub fold_bar_height: f64,
    pub cluster_gap: f64,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            cell_width: 0.4,
            cell_height: 0.3,
            gap: 0.05,
            min_clearance: 0.01,
            initial_radius: 2.5,
            initial_arc_span: std::f64::consts::PI,
            min_circle_radius: 0.5,
            layer_depth: 0.75,
            pile_offset: [-0.02, 0.01],
            fold_bar_height: 0.05,
            cluster_gap: 0.3,
        }
    }
}

impl LayoutConfig {
    /// Horizontal distance between neighbouring cell centers.
    pub fn step_x(&self) -> f64 {
        self.cell_width + self.gap
    }

    /// Vertical distance between neighbouring rows.
    pub fn step_y(&self) -> f64 {
        self.cell_height + self.gap
    }

    pub fn check(&self) -> Result<()> {
        let positive = [
            ("cell_width", self.cell_width),
            ("cell_height", self.cell_height),
            ("gap", self.gap),
            ("min_clearance", self.min_clearance),
            ("initial_radius", self.initial_radius),
            ("initial_arc_span", self.initial_arc_span),
            ("min_circle_radius", self.min_circle_radius),
            ("layer_depth", self.layer_depth),
            ("fold_bar_height", self.fold_bar_height),
            ("cluster_gap", self.cluster_gap),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Param(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.pile_offset.iter().all(|v| v.is_finite()) {
            return Err(Error::Param("pile_offset must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructureKind {
    LinearLinear,
    MultiRowGrid,
    MultiColumnGrid,
    ParallelTree,
    LoopCircle,
    ClusterByFormat,
    ClusterByTask,
    SkipLayer,
    SkipFold,
    SkipPile,
}

impl StructureKind {
    pub const ALL: [StructureKind; 10] = [
        StructureKind::LinearLinear,
        StructureKind::MultiRowGrid,
        StructureKind::MultiColumnGrid,
        StructureKind::ParallelTree,
        StructureKind::LoopCircle,
        StructureKind::ClusterByFormat,
        StructureKind::ClusterByTask,
        StructureKind::SkipLayer,
        StructureKind::SkipFold,
        StructureKind::SkipPile,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StructureKind::LinearLinear => "linear-linear",
            StructureKind::MultiRowGrid => "multi-row-grid",
            StructureKind::MultiColumnGrid => "multi-column-grid",
            StructureKind::ParallelTree => "parallel-tree",
            StructureKind::LoopCircle => "loop-circle",
            StructureKind::ClusterByFormat => "cluster-by-format",
            StructureKind::ClusterByTask => "cluster-by-task",
            StructureKind::SkipLayer => "skip-layer",
            StructureKind::SkipFold => "skip-fold",
            StructureKind::SkipPile => "skip-pile",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        StructureKind::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Execution order and layout this structure combines.
    pub fn design(self) -> (ExecutionOrderKind, LayoutKind) {
        use ExecutionOrderKind as O;
        use LayoutKind as L;
        match self {
            StructureKind::LinearLinear => (O::Linear, L::Linear),
            StructureKind::MultiRowGrid | StructureKind::MultiColumnGrid => {
                (O::MultipleLinear, L::Grid)
            }
            StructureKind::ParallelTree => (O::Parallel, L::Tree),
            StructureKind::LoopCircle => (O::Loop, L::Circle),
            StructureKind::ClusterByFormat | StructureKind::ClusterByTask => (O::NoOrder, L::Grid),
            StructureKind::SkipLayer => (O::Skip, L::Layer),
            StructureKind::SkipFold => (O::Skip, L::Fold),
            StructureKind::SkipPile => (O::Skip, L::Pile),
        }
    }

    pub fn default_phase(self) -> AnalysisPhase {
        match self.design().0 {
            ExecutionOrderKind::NoOrder | ExecutionOrderKind::Skip => AnalysisPhase::Storytelling,
            _ => AnalysisPhase::Exploratory,
        }
    }

    pub fn is_grid(self) -> bool {
        matches!(
            self,
            StructureKind::MultiRowGrid | StructureKind::MultiColumnGrid
        )
    }

    pub fn is_cluster(self) -> bool {
        matches!(
            self,
            StructureKind::ClusterByFormat | StructureKind::ClusterByTask
        )
    }

    /// Kinds whose members may overlap on purpose.
    pub fn allows_overlap(self) -> bool {
        matches!(self, StructureKind::SkipPile | StructureKind::SkipFold)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

impl Orientation {
    pub fn toggled(self) -> Self {
        match self {
            Orientation::Horizontal => Orientation::Vertical,
            Orientation::Vertical => Orientation::Horizontal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusterMode {
    ByFormat,
    ByTask,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SkipDirection {
    Closer,
    Away,
}

/// Kind-specific knobs. Only the fields relevant to a structure's kind are
/// populated once normalized.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StructureParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orientation: Option<Orientation>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub branch_roots: Vec<CellId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circle_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layer_depth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub visible_head: Option<CellId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub keep: Option<Vec<CellId>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<SkipDirection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Structure {
    pub id: StructureId,
    pub kind: StructureKind,
    pub members: Vec<CellId>,
    pub anchor: Pose,
    pub params: StructureParams,
    pub phase: AnalysisPhase,
}

/// An edge a layout wants, by member index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlannedEdge {
    pub from: usize,
    pub to: usize,
    pub visible: bool,
    pub is_skip: bool,
}

impl PlannedEdge {
    pub fn visible(from: usize, to: usize) -> Self {
        PlannedEdge {
            from,
            to,
            visible: true,
            is_skip: false,
        }
    }
}

/// How a layout's edges combine with the edges already among its members.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgePolicy {
    /// Drop existing intra-member edges, install the planned ones.
    Replace,
    /// Keep existing intra-member edges but hide them all.
    HideAll,
    /// Keep everything and upsert the planned edges on top.
    Overlay,
}

/// Result of laying out one structure: a world pose per member (in member
/// order), fold flags and the structure's own edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub poses: Vec<Pose>,
    pub folded: Vec<bool>,
    pub edges: Vec<PlannedEdge>,
    pub policy: EdgePolicy,
}

fn position_of(members: &[CellId], id: CellId) -> Option<usize> {
    members.iter().position(|m| *m == id)
}

fn check_members(members: &[CellId]) -> Result<()> {
    if members.is_empty() {
        return Err(Error::Precondition(
            "a structure needs at least one member".into(),
        ));
    }
    let mut seen = members.to_vec();
    seen.sort();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Param("duplicate member in selection".into()));
    }
    Ok(())
}

/// Validates `params` for `kind` over `members` and returns the canonical
/// parameter set: irrelevant fields cleared, defaults filled in, derived
/// values (circle radius) computed.
pub fn normalize_params(
    kind: StructureKind,
    members: &[CellId],
    params: &StructureParams,
    cfg: &LayoutConfig,
) -> Result<StructureParams> {
    check_members(members)?;
    let n = members.len();
    let mut out = StructureParams {
        gap: Some(cfg.gap),
        ..Default::default()
    };
    match kind {
        StructureKind::LinearLinear
        | StructureKind::ClusterByFormat
        | StructureKind::ClusterByTask => {}
        StructureKind::MultiRowGrid | StructureKind::MultiColumnGrid => {
            let (count, name) = if kind == StructureKind::MultiRowGrid {
                (params.rows, "rows")
            } else {
                (params.cols, "cols")
            };
            let count =
                count.ok_or_else(|| Error::Param(format!("{} requires {name}", kind.name())))?;
            if count < 2 || count > n {
                return Err(Error::Param(format!(
                    "{name} must lie in [2, {n}] for {n} members, got {count}"
                )));
            }
            if kind == StructureKind::MultiRowGrid {
                out.rows = Some(count);
                out.orientation = Some(Orientation::Horizontal);
            } else {
                out.cols = Some(count);
                out.orientation = Some(Orientation::Vertical);
            }
        }
        StructureKind::ParallelTree => {
            if params.branch_roots.is_empty() {
                return Err(Error::Param(
                    "parallel-tree requires at least one branch root".into(),
                ));
            }
            let mut idx = Vec::with_capacity(params.branch_roots.len());
            for r in &params.branch_roots {
                match position_of(members, *r) {
                    Some(0) => {
                        return Err(Error::Param(format!(
                            "{r} is the parent of the tree and cannot start a branch"
                        )))
                    }
                    Some(i) => idx.push(i),
                    None => return Err(Error::Param(format!("branch root {r} is not a member"))),
                }
            }
            idx.sort_unstable();
            idx.dedup();
            out.branch_roots = idx.into_iter().map(|i| members[i]).collect();
            out.orientation = Some(params.orientation.unwrap_or(Orientation::Horizontal));
        }
        StructureKind::LoopCircle => {
            if n < 2 {
                return Err(Error::Precondition(format!(
                    "loop-circle needs at least 2 members, got {n}"
                )));
            }
            out.circle_radius = Some(loop_radius(n, cfg));
        }
        StructureKind::SkipLayer => {
            out.direction = Some(params.direction.unwrap_or(SkipDirection::Closer));
            out.layer_depth = Some(cfg.layer_depth);
        }
        StructureKind::SkipFold => {
            let keep = params.keep.clone().unwrap_or_default();
            let mut idx = Vec::with_capacity(keep.len());
            for k in &keep {
                idx.push(
                    position_of(members, *k)
                        .ok_or_else(|| Error::Param(format!("kept cell {k} is not a member")))?,
                );
            }
            idx.sort_unstable();
            idx.dedup();
            out.keep = Some(idx.into_iter().map(|i| members[i]).collect());
        }
        StructureKind::SkipPile => {
            let head = params.visible_head.unwrap_or(members[0]);
            if position_of(members, head).is_none() {
                return Err(Error::Param(format!("pile head {head} is not a member")));
            }
            out.visible_head = Some(head);
        }
    }
    Ok(out)
}

/// Brings parameters back into range after the member list changed
/// (detach, insert, merge), then normalizes them.
pub fn repair_params(
    kind: StructureKind,
    members: &[CellId],
    params: &StructureParams,
    cfg: &LayoutConfig,
) -> Result<StructureParams> {
    let n = members.len();
    let mut p = params.clone();
    match kind {
        StructureKind::MultiRowGrid => p.rows = p.rows.map(|r| r.clamp(2, n.max(2))),
        StructureKind::MultiColumnGrid => p.cols = p.cols.map(|c| c.clamp(2, n.max(2))),
        StructureKind::ParallelTree => {
            p.branch_roots
                .retain(|r| position_of(members, *r).is_some_and(|i| i > 0));
            if p.branch_roots.is_empty() && n >= 2 {
                p.branch_roots.push(members[1]);
            }
        }
        StructureKind::SkipFold => {
            if let Some(keep) = p.keep.as_mut() {
                keep.retain(|k| members.contains(k));
            }
        }
        StructureKind::SkipPile if !p.visible_head.is_some_and(|h| members.contains(&h)) => {
            p.visible_head = members.first().copied();
        }
        _ => {}
    }
    normalize_params(kind, members, &p, cfg)
}

/// Lays out `structure` against the current workspace (cell metadata is
/// needed for clustering; skip layers keep the current poses).
pub fn layout_structure(w: &Workspace, structure: &Structure) -> Result<Placement> {
    let cfg = &w.config;
    let members = &structure.members;
    let n = members.len();
    let p = &structure.params;
    let anchor = &structure.anchor;
    let index = |id: CellId| position_of(members, id).ok_or(Error::UnknownCell(id));
    match structure.kind {
        StructureKind::LinearLinear => Ok(layout_linear_linear(n, anchor, cfg)),
        StructureKind::MultiRowGrid => {
            layout_grid(n, p.rows.unwrap_or(2), Orientation::Horizontal, anchor, cfg)
        }
        StructureKind::MultiColumnGrid => {
            layout_grid(n, p.cols.unwrap_or(2), Orientation::Vertical, anchor, cfg)
        }
        StructureKind::ParallelTree => {
            let roots = p
                .branch_roots
                .iter()
                .map(|r| index(*r))
                .collect::<Result<Vec<_>>>()?;
            layout_parallel_tree(
                n,
                &roots,
                p.orientation.unwrap_or(Orientation::Horizontal),
                anchor,
                cfg,
            )
        }
        StructureKind::LoopCircle => layout_loop_circle(n, anchor, cfg),
        StructureKind::ClusterByFormat | StructureKind::ClusterByTask => {
            let mode = if structure.kind == StructureKind::ClusterByFormat {
                ClusterMode::ByFormat
            } else {
                ClusterMode::ByTask
            };
            let keys = cluster_keys(w, members, mode)?;
            Ok(layout_cluster(&keys, anchor, cfg))
        }
        StructureKind::SkipLayer => {
            let poses = members
                .iter()
                .map(|id| w.cell(*id).map(|c| c.pose).ok_or(Error::UnknownCell(*id)))
                .collect::<Result<Vec<_>>>()?;
            let edges = (1..n)
                .map(|i| PlannedEdge {
                    from: i - 1,
                    to: i,
                    visible: true,
                    is_skip: true,
                })
                .collect();
            Ok(Placement {
                poses,
                folded: vec![false; n],
                edges,
                policy: EdgePolicy::Overlay,
            })
        }
        StructureKind::SkipFold => {
            let keep = p.keep.clone().unwrap_or_default();
            let flags: Vec<bool> = members.iter().map(|m| keep.contains(m)).collect();
            Ok(layout_skip_fold(&flags, anchor, cfg))
        }
        StructureKind::SkipPile => {
            let head = index(p.visible_head.unwrap_or(members[0]))?;
            layout_skip_pile(n, head, anchor, cfg)
        }
    }
}

/// Cluster label per member.
pub fn cluster_keys(w: &Workspace, members: &[CellId], mode: ClusterMode) -> Result<Vec<String>> {
    members
        .iter()
        .map(|id| {
            let c = w.cell(*id).ok_or(Error::UnknownCell(*id))?;
            Ok(match mode {
                ClusterMode::ByFormat => match c.format_class() {
                    crate::model::CellKind::Code => "code".to_string(),
                    crate::model::CellKind::Markdown => "markdown".to_string(),
                    crate::model::CellKind::OutputVisualization => {
                        "output-visualization".to_string()
                    }
                },
                ClusterMode::ByTask => match &c.task_tag {
                    Some(t) => format!("task:{t}"),
                    None => "untagged".to_string(),
                },
            })
        })
        .collect()
}
