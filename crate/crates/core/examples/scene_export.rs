//! Drives the viewer-facing engine: sends a few viewer commands, prints the
//! scene diffs it returns, then writes the scene document and command log.

use spatial_notebook::gesture::{GestureThresholds, TriggerCommand};
use spatial_notebook::layout::{initial_circular_layout, LayoutConfig, Orientation};
use spatial_notebook::model::{CellId, StructureId};
use spatial_notebook::notebook::import_notebook;
use spatial_notebook::protocol::{ViewerCommand, ViewerEngine};
use spatial_notebook::scene::{serialize_scene, write_atomic, write_jsonl};

fn main() -> spatial_notebook::Result<()> {
    let nb = std::fs::read(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/fixtures/digits.ipynb"
    ))?;
    let w = initial_circular_layout(&import_notebook(&nb, &LayoutConfig::default())?.workspace);
    let mut engine = ViewerEngine::new(w, GestureThresholds::default());

    let mut commands: Vec<ViewerCommand> = (0..6)
        .map(|i| ViewerCommand::Trigger(TriggerCommand::SelectCell { cell: CellId(i) }))
        .collect();
    commands.push(ViewerCommand::Trigger(TriggerCommand::CreateGrid {
        orientation: Orientation::Horizontal,
        count: 2,
    }));
    commands.push(ViewerCommand::Orbit {
        yaw: 0.3,
        pitch: -0.1,
    });
    commands.push(ViewerCommand::Trigger(TriggerCommand::AdjustOrientation {
        structure: StructureId(0),
    }));

    for cmd in &commands {
        let diff = engine.handle(cmd)?;
        println!(
            "{:<70} -> {} cells, {} edges, {} structures changed",
            serde_json::to_string(cmd).unwrap(),
            diff.cells.len(),
            diff.edges.len(),
            diff.structures.len()
        );
    }

    let out = std::env::temp_dir().join("spatial-notebook-example");
    std::fs::create_dir_all(&out)?;
    write_atomic(
        &out.join("scene.json"),
        serialize_scene(engine.workspace()).as_bytes(),
    )?;
    write_atomic(
        &out.join("commands.jsonl"),
        write_jsonl(engine.command_log())?.as_bytes(),
    )?;
    println!("wrote {}", out.display());
    Ok(())
}
