//! Builds a grid, then moves, reshapes, reorients and detaches from it,
//! printing the log a session keeps along the way.

use nalgebra::Vector3;
use spatial_notebook::geom::Pose;
use spatial_notebook::gesture::GestureThresholds;
use spatial_notebook::layout::{
    linear_workspace_layout, LayoutConfig, StructureKind, StructureParams,
};
use spatial_notebook::model::{Cell, CellId, CellKind, ExecutionEdge, StructureId, Workspace};
use spatial_notebook::ops::{structure_centroid, Operation};
use spatial_notebook::session::Session;

fn main() -> spatial_notebook::Result<()> {
    let cfg = LayoutConfig::default();
    let mut w = Workspace::new(cfg.clone());
    for i in 0..9 {
        w.cells
            .push(Cell::new(CellId(i), CellKind::Code, format!("x{i}"), &cfg));
    }
    for i in 1..9 {
        w.edges.push(ExecutionEdge::new(CellId(i - 1), CellId(i)));
    }
    let mut s = Session::new(linear_workspace_layout(&w), GestureThresholds::default());

    let grid = Operation::Apply {
        selection: s.workspace().cell_ids(),
        kind: StructureKind::MultiRowGrid,
        params: StructureParams {
            rows: Some(3),
            ..Default::default()
        },
    };
    s.perform(0.0, grid, None)?;
    let id = StructureId(0);
    let grab = structure_centroid(s.workspace(), id)?;
    let release = grab + Vector3::new(0.5, 0.2, 0.3);
    s.perform(
        1.0,
        Operation::Move {
            structure: id,
            grab,
            release,
        },
        None,
    )?;
    s.perform(
        2.0,
        Operation::Dims {
            structure: id,
            delta: -1,
        },
        None,
    )?;
    s.perform(3.0, Operation::Orient { structure: id }, None)?;
    let aside = Pose::new(release + Vector3::new(1.5, 0.0, 0.0), 0.0);
    s.perform(
        4.0,
        Operation::DetachOrInsert {
            cell: CellId(8),
            release: aside,
        },
        None,
    )?;

    for e in s.log() {
        println!(
            "t={} {:<18} cost {:>2}  affected {:?}",
            e.t,
            serde_json::to_value(&e.op).unwrap()["op"]
                .as_str()
                .unwrap_or("?"),
            e.primitive_cost,
            e.affected
        );
    }
    let st = &s.workspace().structures[0];
    println!(
        "final: {} with {} members, params {:?}",
        st.kind.name(),
        st.members.len(),
        st.params.cols.or(st.params.rows)
    );
    Ok(())
}
