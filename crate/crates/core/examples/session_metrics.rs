//! Effort metrics: travel distance and movement count for a walking trace,
//! and the manual versus compositional operation count for a task script.

use spatial_notebook::geom::Point;
use spatial_notebook::layout::{initial_circular_layout, LayoutConfig};
use spatial_notebook::metrics::{MetricsReport, PositionSample, MOVEMENT_EPS};
use spatial_notebook::notebook::import_notebook;
use spatial_notebook::ops::Operation;
use spatial_notebook::scene::read_jsonl;

fn main() -> spatial_notebook::Result<()> {
    // Forty steps along a 0.8 m arc, a pause, then back again.
    let angle = |i: i32| if i < 40 { i } else if i < 80 { 40 } else { 120 - i } as f64 * 0.02;
    let trace: Vec<PositionSample> = (0..=120)
        .map(|i| PositionSample {
            t: i as f64 * 100.0,
            position: Point::new(angle(i).sin() * 0.8, 1.6, 0.8 - angle(i).cos() * 0.8),
        })
        .collect();
    let walk = MetricsReport::from_trace(&trace, MOVEMENT_EPS)?;
    println!("walk: {}", serde_json::to_string(&walk).unwrap());

    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");
    let nb = std::fs::read(format!("{dir}/fixture50.ipynb"))?;
    let w = initial_circular_layout(&import_notebook(&nb, &LayoutConfig::default())?.workspace);
    for task in ["task1.jsonl", "task2.jsonl"] {
        let script: Vec<Operation> = read_jsonl(&std::fs::read(format!("{dir}/{task}"))?)?;
        let report = MetricsReport::comparison(&w, &script, 0.3)?;
        println!("{task}: {}", serde_json::to_string(&report).unwrap());
    }
    Ok(())
}
