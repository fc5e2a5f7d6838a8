//! Cells, execution edges and the workspace that holds them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::geom::{Panel, Point, Pose};
use crate::layout::{LayoutConfig, Structure};

macro_rules! prefixed_id {
    ($name:ident, $prefix:literal) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                s.strip_prefix($prefix)
                    .and_then(|n| n.parse().ok())
                    .map($name)
                    .ok_or_else(|| {
                        format!(concat!("expected an id like ", $prefix, "12, got {:?}"), s)
                    })
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

prefixed_id!(CellId, "c");
prefixed_id!(StructureId, "s");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellKind {
    Code,
    Markdown,
    OutputVisualization,
}

/// What a code cell produced when it last ran.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum OutputArtifact {
    Text { text: String },
    Image { mime: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExecutionOrderKind {
    Linear,
    MultipleLinear,
    Parallel,
    Loop,
    Skip,
    NoOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayoutKind {
    Linear,
    Grid,
    Tree,
    Circle,
    Layer,
    Fold,
    Pile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnalysisPhase {
    Exploratory,
    Storytelling,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub id: CellId,
    pub kind: CellKind,
    pub content: String,
    pub outputs: Vec<OutputArtifact>,
    pub width: f64,
    pub height: f64,
    pub highlight: bool,
    pub task_tag: Option<String>,
    pub folded: bool,
    pub pose: Pose,
}

impl Cell {
    pub fn new(id: CellId, kind: CellKind, content: impl Into<String>, cfg: &LayoutConfig) -> Self {
        Cell {
            id,
            kind,
            content: content.into(),
            outputs: Vec::new(),
            width: cfg.cell_width,
            height: cfg.cell_height,
            highlight: false,
            task_tag: None,
            folded: false,
            pose: Pose::identity(),
        }
    }

    /// Kind used when clustering by content format: a code cell that
    /// produced an image counts as a visualization.
    pub fn format_class(&self) -> CellKind {
        match self.kind {
            CellKind::Code
                if self
                    .outputs
                    .iter()
                    .any(|o| matches!(o, OutputArtifact::Image { .. })) =>
            {
                CellKind::OutputVisualization
            }
            k => k,
        }
    }

    /// Rendered footprint; folded cells shrink to a bar.
    pub fn panel(&self, cfg: &LayoutConfig) -> Panel {
        let height = if self.folded {
            cfg.fold_bar_height
        } else {
            self.height
        };
        Panel::new(self.pose, self.width, height)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionEdge {
    pub from: CellId,
    pub to: CellId,
    pub visible: bool,
    pub is_skip: bool,
    pub polyline: Vec<Point>,
}

impl ExecutionEdge {
    pub fn new(from: CellId, to: CellId) -> Self {
        ExecutionEdge {
            from,
            to,
            visible: true,
            is_skip: false,
            polyline: Vec::new(),
        }
    }

    pub fn key(&self) -> (CellId, CellId) {
        (self.from, self.to)
    }
}

/// The whole scene.
///
/// Cells are kept sorted by id, edges by `(from, to)` and structures by id,
/// so equal workspaces compare (and serialize) equal.
#[derive(Debug, Clone, PartialEq)]
pub struct Workspace {
    pub cells: Vec<Cell>,
    pub edges: Vec<ExecutionEdge>,
    pub structures: Vec<Structure>,
    pub config: LayoutConfig,
    pub user_position: Point,
}

impl Default for Workspace {
    fn default() -> Self {
        Workspace::new(LayoutConfig::default())
    }
}

impl Workspace {
    pub fn new(config: LayoutConfig) -> Self {
        Workspace {
            cells: Vec::new(),
            edges: Vec::new(),
            structures: Vec::new(),
            config,
            user_position: Point::origin(),
        }
    }

    fn cell_index(&self, id: CellId) -> Option<usize> {
        self.cells.binary_search_by_key(&id, |c| c.id).ok()
    }

    pub fn cell(&self, id: CellId) -> Option<&Cell> {
        self.cell_index(id).map(|i| &self.cells[i])
    }

    pub fn cell_mut(&mut self, id: CellId) -> Option<&mut Cell> {
        self.cell_index(id).map(move |i| &mut self.cells[i])
    }

    pub fn contains_cell(&self, id: CellId) -> bool {
        self.cell_index(id).is_some()
    }

    pub fn cell_ids(&self) -> Vec<CellId> {
        self.cells.iter().map(|c| c.id).collect()
    }

    pub fn structure(&self, id: StructureId) -> Option<&Structure> {
        self.structures.iter().find(|s| s.id == id)
    }

    pub fn structure_mut(&mut self, id: StructureId) -> Option<&mut Structure> {
        self.structures.iter_mut().find(|s| s.id == id)
    }

    /// The structure a cell belongs to, if any.
    pub fn structure_of(&self, cell: CellId) -> Option<&Structure> {
        self.structures.iter().find(|s| s.members.contains(&cell))
    }

    /// Cells that belong to no structure, in id order.
    pub fn free_cells(&self) -> Vec<CellId> {
        self.cells
            .iter()
            .map(|c| c.id)
            .filter(|id| self.structure_of(*id).is_none())
            .collect()
    }

    pub fn next_structure_id(&self) -> StructureId {
        StructureId(
            self.structures
                .iter()
                .map(|s| s.id.0 + 1)
                .max()
                .unwrap_or(0),
        )
    }

    pub fn edge(&self, from: CellId, to: CellId) -> Option<&ExecutionEdge> {
        self.edges
            .binary_search_by_key(&(from, to), |e| e.key())
            .ok()
            .map(|i| &self.edges[i])
    }

    pub fn edge_mut(&mut self, from: CellId, to: CellId) -> Option<&mut ExecutionEdge> {
        self.edges
            .binary_search_by_key(&(from, to), |e| e.key())
            .ok()
            .map(move |i| &mut self.edges[i])
    }

    /// Inserts an edge, or updates the flags of the existing one for the
    /// same ordered pair.
    pub fn upsert_edge(&mut self, from: CellId, to: CellId, visible: bool, is_skip: bool) {
        match self.edges.binary_search_by_key(&(from, to), |e| e.key()) {
            Ok(i) => {
                self.edges[i].visible = visible;
                self.edges[i].is_skip = is_skip;
            }
            Err(i) => {
                let mut e = ExecutionEdge::new(from, to);
                e.visible = visible;
                e.is_skip = is_skip;
                self.edges.insert(i, e);
            }
        }
    }

    pub fn sort(&mut self) {
        self.cells.sort_by_key(|c| c.id);
        self.edges.sort_by_key(|e| e.key());
        self.structures.sort_by_key(|s| s.id);
    }

    /// `ids` in reading order: member order when they all sit in one
    /// structure, document (id) order otherwise.
    pub fn reading_order(&self, ids: &[CellId]) -> Vec<CellId> {
        let mut out = ids.to_vec();
        let shared = ids
            .first()
            .and_then(|first| self.structure_of(*first))
            .filter(|s| ids.iter().all(|id| s.members.contains(id)));
        match shared {
            Some(s) => out.sort_by_key(|id| s.members.iter().position(|m| m == id)),
            None => out.sort(),
        }
        out.dedup();
        out
    }

    /// Cell whose panel an edge endpoint attaches to. Cells buried in a pile
    /// hand their indicators over to the pile head.
    pub fn attachment_cell(&self, id: CellId) -> CellId {
        match self.structure_of(id) {
            Some(s) if s.kind == crate::layout::StructureKind::SkipPile => {
                s.params.visible_head.unwrap_or(id)
            }
            _ => id,
        }
    }
}
