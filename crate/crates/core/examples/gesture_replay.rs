//! Synthesizes hand-tracking traces for the canonical gestures, runs them
//! through the interpreter and shows the commands each one produces.

use spatial_notebook::gesture::synth::{canonical_trace, Canonical};
use spatial_notebook::gesture::GestureThresholds;
use spatial_notebook::layout::{linear_workspace_layout, LayoutConfig};
use spatial_notebook::model::{Cell, CellId, CellKind, ExecutionEdge, Workspace};
use spatial_notebook::session::Session;

fn main() -> spatial_notebook::Result<()> {
    let cfg = LayoutConfig::default();
    let mut w = Workspace::new(cfg.clone());
    for i in 0..6 {
        w.cells
            .push(Cell::new(CellId(i), CellKind::Code, format!("x{i}"), &cfg));
    }
    for i in 1..6 {
        w.edges.push(ExecutionEdge::new(CellId(i - 1), CellId(i)));
    }
    let w = linear_workspace_layout(&w);
    let th = GestureThresholds::default();
    let selection = w.cell_ids();

    for g in [
        Canonical::PullApart,
        Canonical::Diagonal { rows: 2 },
        Canonical::Pile,
        Canonical::Squeeze,
    ] {
        let trace = canonical_trace(&w, g, &selection, &th, Some((0.005, 7)));
        let mut session = Session::new(w.clone(), th.clone());
        let outcome = session.replay_trace(&trace)?;
        println!("{g:?}: {} events", trace.len());
        for c in &outcome.commands {
            println!(
                "  t={:>6.0} ms  {}",
                c.t,
                serde_json::to_string(&c.command).unwrap()
            );
        }
        for r in &outcome.rejected {
            println!("  rejected: {}", r.reason);
        }
        let made: Vec<_> = session
            .workspace()
            .structures
            .iter()
            .map(|s| s.kind.name())
            .collect();
        println!("  structures: {made:?}");
    }
    Ok(())
}
