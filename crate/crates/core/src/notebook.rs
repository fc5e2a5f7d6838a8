//! Jupyter nbformat-4 ingestion.

use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::layout::{linear_workspace_layout, LayoutConfig};
use crate::model::{Cell, CellId, CellKind, OutputArtifact, Workspace};

#[derive(Debug, Clone, PartialEq)]
pub struct ImportWarning {
    pub cell: CellId,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct Imported {
    pub workspace: Workspace,
    pub warnings: Vec<ImportWarning>,
}

#[derive(Deserialize)]
struct Notebook {
    cells: Vec<RawCell>,
}

#[derive(Deserialize)]
struct RawCell {
    cell_type: String,
    #[serde(default)]
    source: Source,
    #[serde(default)]
    outputs: Vec<Value>,
    #[serde(default)]
    metadata: Value,
}

#[derive(Deserialize, Default)]
#[serde(untagged)]
enum Source {
    #[default]
    Empty,
    Text(String),
    Lines(Vec<String>),
}

impl Source {
    fn joined(self) -> String {
        match self {
            Source::Empty => String::new(),
            Source::Text(s) => s,
            Source::Lines(v) => v.concat(),
        }
    }
}

/// Parses a notebook into a workspace of free cells laid out on one row in
/// front of the user, with linear edges between consecutive code cells.
pub fn import_notebook(bytes: &[u8], config: &LayoutConfig) -> Result<Imported> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse {
        offset: e.valid_up_to(),
        message: "notebook is not UTF-8".into(),
    })?;
    let value: Value = serde_json::from_str(text).map_err(|e| Error::from_json(&e, bytes))?;
    if value.get("cells").is_none() {
        return Err(Error::Schema("notebook has no \"cells\" array".into()));
    }
    let nb: Notebook = serde_json::from_value(value).map_err(|e| Error::Schema(e.to_string()))?;

    let mut w = Workspace::new(config.clone());
    let mut warnings = Vec::new();
    let mut tag: Option<String> = None;
    for (i, raw) in nb.cells.into_iter().enumerate() {
        let id = CellId(i as u32);
        let kind = match raw.cell_type.as_str() {
            "code" => CellKind::Code,
            "markdown" => CellKind::Markdown,
            other => {
                warnings.push(ImportWarning {
                    cell: id,
                    message: format!("unknown cell_type {other:?}; kept as markdown"),
                });
                CellKind::Markdown
            }
        };
        let content = raw.source.joined();
        if kind == CellKind::Markdown {
            if let Some(h) = last_heading(&content) {
                tag = Some(h);
            }
        }
        let mut cell = Cell::new(id, kind, content, config);
        cell.outputs = raw.outputs.iter().filter_map(output_artifact).collect();
        let own = raw.metadata["tags"]
            .as_array()
            .and_then(|t| {
                t.iter()
                    .filter_map(Value::as_str)
                    .find(|t| !t.trim().is_empty())
            })
            .map(|t| t.trim().to_string());
        cell.task_tag = own.or_else(|| tag.clone());
        w.cells.push(cell);
    }

    let code: Vec<CellId> = w
        .cells
        .iter()
        .filter(|c| c.kind == CellKind::Code)
        .map(|c| c.id)
        .collect();
    for pair in code.windows(2) {
        w.upsert_edge(pair[0], pair[1], true, false);
    }
    Ok(Imported {
        workspace: linear_workspace_layout(&w),
        warnings,
    })
}

fn last_heading(markdown: &str) -> Option<String> {
    markdown
        .lines()
        .filter_map(|l| l.trim_start().strip_prefix('#'))
        .map(|h| h.trim_start_matches('#').trim().to_string())
        .rfind(|h| !h.is_empty())
}

fn output_artifact(out: &Value) -> Option<OutputArtifact> {
    let joined = |v: &Value| match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
        _ => String::new(),
    };
    match out.get("output_type")?.as_str()? {
        "stream" => Some(OutputArtifact::Text {
            text: joined(out.get("text")?),
        }),
        "display_data" | "execute_result" => {
            let data = out.get("data")?.as_object()?;
            if let Some(mime) = data.keys().find(|k| k.starts_with("image/")) {
                return Some(OutputArtifact::Image { mime: mime.clone() });
            }
            data.get("text/plain")
                .map(|t| OutputArtifact::Text { text: joined(t) })
        }
        "error" => {
            let name = out.get("ename").and_then(Value::as_str).unwrap_or("error");
            let msg = out.get("evalue").and_then(Value::as_str).unwrap_or("");
            Some(OutputArtifact::Text {
                text: format!("{name}: {msg}"),
            })
        }
        _ => None,
    }
}
