//! Imports a notebook and prints where each cell lands on the initial
//! semicircle.
//!
//! `cargo run --example import_notebook [path.ipynb]`

use spatial_notebook::layout::{initial_circular_layout, LayoutConfig};
use spatial_notebook::notebook::import_notebook;

fn main() -> spatial_notebook::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/digits.ipynb").to_string()
    });
    let bytes = std::fs::read(&path)?;
    let imported = import_notebook(&bytes, &LayoutConfig::default())?;
    for w in &imported.warnings {
        eprintln!("warning: {w:?}");
    }
    let w = initial_circular_layout(&imported.workspace);
    for c in &w.cells {
        let p = c.pose.position;
        println!(
            "{:>4} {:<8} tag={:<8} at ({:+.3}, {:+.3}, {:+.3}) yaw {:+.3}",
            c.id.to_string(),
            format!("{:?}", c.kind),
            c.task_tag.as_deref().unwrap_or("-"),
            p.x,
            p.y,
            p.z,
            c.pose.yaw
        );
    }
    println!("{} cells, {} edges", w.cells.len(), w.edges.len());
    Ok(())
}
