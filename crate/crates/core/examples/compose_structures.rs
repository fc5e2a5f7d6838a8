//! Applies every structure kind to the same row of cells and reports the
//! resulting footprint and edge counts.

use spatial_notebook::layout::{
    linear_workspace_layout, LayoutConfig, SkipDirection, StructureKind, StructureParams,
};
use spatial_notebook::model::{Cell, CellId, CellKind, ExecutionEdge, Workspace};
use spatial_notebook::ops::{execute, Operation};
use spatial_notebook::validate::validate_workspace;

fn row(n: u32) -> Workspace {
    let cfg = LayoutConfig::default();
    let mut w = Workspace::new(cfg.clone());
    for i in 0..n {
        let mut c = Cell::new(CellId(i), CellKind::Code, format!("step_{i}()"), &cfg);
        c.task_tag = Some(if i < n / 2 { "prepare" } else { "analyse" }.to_string());
        w.cells.push(c);
    }
    for i in 1..n {
        w.edges.push(ExecutionEdge::new(CellId(i - 1), CellId(i)));
    }
    linear_workspace_layout(&w)
}

fn main() -> spatial_notebook::Result<()> {
    let w = row(12);
    let all = w.cell_ids();
    for kind in StructureKind::ALL {
        let mut params = StructureParams::default();
        let mut selection = all.clone();
        match kind {
            StructureKind::MultiRowGrid => params.rows = Some(3),
            StructureKind::MultiColumnGrid => params.cols = Some(3),
            StructureKind::ParallelTree => params.branch_roots = vec![CellId(4), CellId(8)],
            StructureKind::SkipFold => params.keep = Some(vec![CellId(0), CellId(11)]),
            StructureKind::SkipPile => params.visible_head = Some(CellId(0)),
            StructureKind::SkipLayer => {
                selection = vec![CellId(2), CellId(6), CellId(10)];
                params.direction = Some(SkipDirection::Closer);
            }
            _ => {}
        }
        let out = execute(
            &w,
            &Operation::Apply {
                selection,
                kind,
                params,
            },
            0.3,
        )?;
        let xs = out.cells.iter().map(|c| c.pose.position.x);
        let ys = out.cells.iter().map(|c| c.pose.position.y);
        let span = |v: Vec<f64>| {
            v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - v.iter().cloned().fold(f64::INFINITY, f64::min)
        };
        println!(
            "{:<18} width {:.2} m, height {:.2} m, {} visible edges, {} violations",
            kind.name(),
            span(xs.collect()),
            span(ys.collect()),
            out.edges.iter().filter(|e| e.visible).count(),
            validate_workspace(&out).violations.len()
        );
    }
    Ok(())
}
