//! Canonical scene documents and JSON Lines files.
//!
//! Serialization is canonical: object keys are sorted, every float is
//! rounded to 9 significant digits, and magnitudes below 1e-12 (including
//! negative zero) are written as 0. Equal workspaces therefore produce
//! byte-identical documents, and parse then serialize is byte-stable.

use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Number, Value};

use crate::error::{Error, Result};
use crate::geom::{Point, Pose};
use crate::layout::{LayoutConfig, Structure};
use crate::model::{Cell, CellId, CellKind, ExecutionEdge, OutputArtifact, Workspace};

pub const SCENE_VERSION: &str = "spatial-notebook-scene/1";

const SIGNIFICANT: usize = 9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellDoc {
    pub id: CellId,
    pub kind: CellKind,
    pub content: String,
    #[serde(default)]
    pub outputs: Vec<OutputArtifact>,
    pub pose: Pose,
    /// `[width, height]` in meters.
    pub size: [f64; 2],
    pub folded: bool,
    pub highlight: bool,
    #[serde(default)]
    pub task_tag: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub from: CellId,
    pub to: CellId,
    pub visible: bool,
    pub is_skip: bool,
    pub polyline: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDocument {
    pub version: String,
    pub config: LayoutConfig,
    pub user_position: Point,
    pub cells: Vec<CellDoc>,
    pub edges: Vec<EdgeDoc>,
    pub structures: Vec<Structure>,
}

impl From<&Cell> for CellDoc {
    fn from(c: &Cell) -> Self {
        CellDoc {
            id: c.id,
            kind: c.kind,
            content: c.content.clone(),
            outputs: c.outputs.clone(),
            pose: c.pose,
            size: [c.width, c.height],
            folded: c.folded,
            highlight: c.highlight,
            task_tag: c.task_tag.clone(),
        }
    }
}

impl From<CellDoc> for Cell {
    fn from(d: CellDoc) -> Self {
        Cell {
            id: d.id,
            kind: d.kind,
            content: d.content,
            outputs: d.outputs,
            width: d.size[0],
            height: d.size[1],
            highlight: d.highlight,
            task_tag: d.task_tag,
            folded: d.folded,
            pose: d.pose,
        }
    }
}

impl From<&ExecutionEdge> for EdgeDoc {
    fn from(e: &ExecutionEdge) -> Self {
        EdgeDoc {
            from: e.from,
            to: e.to,
            visible: e.visible,
            is_skip: e.is_skip,
            polyline: e.polyline.clone(),
        }
    }
}

impl From<EdgeDoc> for ExecutionEdge {
    fn from(d: EdgeDoc) -> Self {
        ExecutionEdge {
            from: d.from,
            to: d.to,
            visible: d.visible,
            is_skip: d.is_skip,
            polyline: d.polyline,
        }
    }
}

impl SceneDocument {
    pub fn from_workspace(w: &Workspace) -> Self {
        SceneDocument {
            version: SCENE_VERSION.to_string(),
            config: w.config.clone(),
            user_position: w.user_position,
            cells: w.cells.iter().map(CellDoc::from).collect(),
            edges: w.edges.iter().map(EdgeDoc::from).collect(),
            structures: w.structures.clone(),
        }
    }

    pub fn into_workspace(self) -> Result<Workspace> {
        if self.version != SCENE_VERSION {
            return Err(Error::Schema(format!(
                "unsupported scene version {:?}, expected {SCENE_VERSION:?}",
                self.version
            )));
        }
        let mut w = Workspace::new(self.config);
        w.user_position = self.user_position;
        w.cells = self.cells.into_iter().map(Cell::from).collect();
        w.edges = self.edges.into_iter().map(ExecutionEdge::from).collect();
        w.structures = self.structures;
        w.sort();
        Ok(w)
    }
}

/// Rounds to 9 significant digits and flushes tiny values to zero.
pub fn canonical_float(v: f64) -> f64 {
    if !v.is_finite() || v.abs() < 1e-12 {
        return if v.is_finite() { 0.0 } else { v };
    }
    let r: f64 = format!("{:.*e}", SIGNIFICANT - 1, v).parse().unwrap_or(v);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn canonicalize(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let f = canonical_float(n.as_f64().unwrap_or(0.0));
            *n = Number::from_f64(f).unwrap_or_else(|| Number::from(0));
        }
        Value::Array(items) => items.iter_mut().for_each(canonicalize),
        Value::Object(map) => map.values_mut().for_each(canonicalize),
        _ => {}
    }
}

/// Canonical JSON value of anything serializable. Keys come out sorted
/// because `serde_json::Map` is ordered.
pub fn canonical_value<T: Serialize>(value: &T) -> Result<Value> {
    let mut v = serde_json::to_value(value).map_err(|e| Error::Schema(e.to_string()))?;
    canonicalize(&mut v);
    Ok(v)
}

/// One-line canonical JSON, as used in JSON Lines files.
pub fn canonical_line<T: Serialize>(value: &T) -> Result<String> {
    Ok(canonical_value(value)?.to_string())
}

/// The canonical scene document for `w`, pretty-printed with a trailing
/// newline.
pub fn serialize_scene(w: &Workspace) -> String {
    let v = canonical_value(&SceneDocument::from_workspace(w))
        .expect("scene documents always serialize");
    let mut s = serde_json::to_string_pretty(&v).expect("values always print");
    s.push('\n');
    s
}

pub fn parse_scene(bytes: &[u8]) -> Result<Workspace> {
    let doc: SceneDocument =
        serde_json::from_slice(bytes).map_err(|e| Error::from_json(&e, bytes))?;
    let w = doc.into_workspace()?;
    let finite = w.cells.iter().all(|c| c.pose.is_finite())
        && w.edges
            .iter()
            .flat_map(|e| &e.polyline)
            .all(|p| p.iter().all(|x| x.is_finite()));
    if !finite {
        return Err(Error::Schema(
            "scene contains non-finite coordinates".into(),
        ));
    }
    Ok(w)
}

/// Parses JSON Lines, skipping blank lines. Errors carry the byte offset
/// within the whole input.
pub fn read_jsonl<T: DeserializeOwned>(bytes: &[u8]) -> Result<Vec<T>> {
    let mut out = Vec::new();
    let mut start = 0;
    for line in bytes.split(|b| *b == b'\n') {
        let here = start;
        start += line.len() + 1;
        if line.iter().all(u8::is_ascii_whitespace) {
            continue;
        }
        match serde_json::from_slice(line) {
            Ok(v) => out.push(v),
            Err(e) => {
                return Err(match Error::from_json(&e, line) {
                    Error::Parse { offset, message } => Error::Parse {
                        offset: here + offset,
                        message,
                    },
                    Error::Schema(m) => Error::Schema(format!("line starting at byte {here}: {m}")),
                    other => other,
                })
            }
        }
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(items: &[T]) -> Result<String> {
    let mut s = String::new();
    for item in items {
        s.push_str(&canonical_line(item)?);
        s.push('\n');
    }
    Ok(s)
}

/// Writes through a temporary file in the same directory, then renames it
/// over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
