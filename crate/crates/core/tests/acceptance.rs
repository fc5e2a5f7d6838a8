//! Acceptance run: one PASS/FAIL line per primary criterion, with the
//! tolerance each one is held to. Exits non-zero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use spatial_notebook::geom::{Point, Pose};
use spatial_notebook::gesture::synth::{canonical_trace, Canonical};
use spatial_notebook::gesture::GestureThresholds;
use spatial_notebook::layout::{
    layout_grid, layout_loop_circle, layout_parallel_tree, LayoutConfig, Orientation,
    SkipDirection, StructureKind, StructureParams,
};
use spatial_notebook::metrics::{
    movement_count, op_count, travel_distance, Policy, PositionSample, MOVEMENT_EPS,
};
use spatial_notebook::model::{CellId, Workspace};
use spatial_notebook::notebook::import_notebook;
use spatial_notebook::ops::{execute, structure_centroid, Operation};
use spatial_notebook::scene::{parse_scene, read_jsonl, serialize_scene};
use spatial_notebook::session::ingest;
use spatial_notebook::validate::validate_workspace;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

const PROXIMITY: f64 = 0.3;

fn fixture_selection(kind: StructureKind, w: &Workspace) -> (Vec<CellId>, StructureParams) {
    let all = w.cell_ids();
    let p = StructureParams::default;
    match kind {
        StructureKind::MultiRowGrid => (
            all,
            StructureParams {
                rows: Some(5),
                ..p()
            },
        ),
        StructureKind::MultiColumnGrid => (
            all,
            StructureParams {
                cols: Some(5),
                ..p()
            },
        ),
        StructureKind::ParallelTree => (
            all,
            StructureParams {
                branch_roots: vec![CellId(12), CellId(24), CellId(36)],
                ..p()
            },
        ),
        StructureKind::SkipLayer => (
            vec![CellId(2), CellId(7), CellId(9)],
            StructureParams {
                direction: Some(SkipDirection::Closer),
                ..p()
            },
        ),
        StructureKind::SkipFold => (
            all,
            StructureParams {
                keep: Some(vec![CellId(0), CellId(49)]),
                ..p()
            },
        ),
        StructureKind::SkipPile => (
            all,
            StructureParams {
                visible_head: Some(CellId(0)),
                ..p()
            },
        ),
        _ => (all, p()),
    }
}

/// Every kind applied to the 50-cell fixture, with timing.
fn fixture_structures() -> Vec<(StructureKind, Result<Workspace, String>, Duration)> {
    let w = fixture50();
    StructureKind::ALL
        .into_iter()
        .map(|kind| {
            let (selection, params) = fixture_selection(kind, &w);
            let start = Instant::now();
            let r = execute(
                &w,
                &Operation::Apply {
                    selection,
                    kind,
                    params,
                },
                PROXIMITY,
            )
            .map_err(|e| e.to_string());
            (kind, r, start.elapsed())
        })
        .collect()
}

fn intra_structure_overlaps(w: &Workspace) -> usize {
    let mut n = 0;
    for s in w.structures.iter().filter(|s| !s.kind.allows_overlap()) {
        let panels: Vec<_> = s
            .members
            .iter()
            .map(|m| w.cell(*m).unwrap().panel(&w.config))
            .collect();
        for (i, a) in panels.iter().enumerate() {
            for b in &panels[i + 1..] {
                if a.coplanar_overlap(b, w.config.min_clearance) {
                    n += 1;
                }
            }
        }
    }
    n
}

fn criterion_1() -> Outcome {
    let mut failures = Vec::new();
    let mut slowest = Duration::ZERO;
    for (kind, r, took) in fixture_structures() {
        slowest = slowest.max(took);
        match r {
            Err(e) => failures.push(format!("{}: {e}", kind.name())),
            Ok(w) => {
                let v = validate_workspace(&w);
                if !v.is_empty() {
                    failures.push(format!(
                        "{}: {} violations",
                        kind.name(),
                        v.violations.len()
                    ));
                }
                if intra_structure_overlaps(&w) > 0 {
                    failures.push(format!("{}: overlapping members", kind.name()));
                }
                if took >= Duration::from_secs(1) {
                    failures.push(format!("{}: took {took:?}", kind.name()));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("10/10 kinds valid on 50 cells, slowest {slowest:.0?} (< 1 s)")
        } else {
            failures.join("; ")
        },
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut counts = [0usize; 3];
    for i in 0..200 {
        let cfg = LayoutConfig {
            cell_width: rng.random_range(0.2..0.6),
            cell_height: rng.random_range(0.15..0.45),
            gap: rng.random_range(0.01..0.1),
            ..LayoutConfig::default()
        };
        let anchor = Pose::new(
            Point::new(
                rng.random_range(-3.0..3.0),
                rng.random_range(-1.0..2.0),
                rng.random_range(-3.0..3.0),
            ),
            rng.random_range(-PI..PI),
        );
        let n = rng.random_range(2..=60usize);
        let err = match i % 3 {
            0 => {
                let count = rng.random_range(2..=n);
                let columns = rng.random_bool(0.5);
                let o = if columns {
                    Orientation::Vertical
                } else {
                    Orientation::Horizontal
                };
                let p = layout_grid(n, count, o, &anchor, &cfg).unwrap();
                max_error(&p.poses, &oracle_grid(n, count, columns, &cfg), &anchor)
            }
            1 => {
                let p = layout_loop_circle(n, &anchor, &cfg).unwrap();
                max_error(&p.poses, &oracle_circle(n, &cfg), &anchor)
            }
            _ => {
                let mut roots: Vec<usize> = (1..n).filter(|_| rng.random_bool(0.3)).collect();
                if roots.is_empty() {
                    roots.push(rng.random_range(1..n));
                }
                let vertical = rng.random_bool(0.5);
                let p = layout_parallel_tree(n, &roots, tree_orientation(vertical), &anchor, &cfg)
                    .unwrap();
                max_error(&p.poses, &oracle_tree(n, &roots, vertical, &cfg), &anchor)
            }
        };
        counts[i % 3] += 1;
        worst = worst.max(err);
    }
    outcome(
        worst <= 1e-9,
        format!(
            "{} grid, {} circle, {} tree instances; max deviation {worst:.2e} m (tolerance 1e-9 m)",
            counts[0], counts[1], counts[2]
        ),
    )
}

/// Every routed scene the other criteria produce.
fn routed_corpus() -> Vec<(String, Workspace)> {
    let mut corpus = vec![("fixture".to_string(), fixture50())];
    for (kind, r, _) in fixture_structures() {
        if let Ok(w) = r {
            corpus.push((format!("fixture/{}", kind.name()), w));
        }
    }
    for task in ["task1.jsonl", "task2.jsonl"] {
        let ops: Vec<Operation> = read_jsonl(&std::fs::read(fixture_path(task)).unwrap()).unwrap();
        let mut w = fixture50();
        for (i, op) in ops.iter().enumerate() {
            w = execute(&w, op, PROXIMITY).unwrap();
            corpus.push((format!("{task}#{i}"), w.clone()));
        }
    }
    for case in kind_cases() {
        corpus.push((
            format!("gesture/{}", case.kind.name()),
            gesture_path(&case, None).0,
        ));
    }
    corpus
}

fn criterion_3() -> Outcome {
    let corpus = routed_corpus();
    let polylines: usize = corpus
        .iter()
        .map(|(_, w)| {
            w.edges
                .iter()
                .filter(|e| e.visible && !e.polyline.is_empty())
                .count()
        })
        .sum();
    let bad: Vec<_> = corpus
        .iter()
        .map(|(name, w)| (name, polyline_intrusions(w)))
        .filter(|(_, n)| *n > 0)
        .collect();
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            format!(
                "{} scenes, {polylines} polylines, 0 cell-interior intersections",
                corpus.len()
            )
        } else {
            format!("intersections in {bad:?}")
        },
    )
}

fn criterion_4() -> Outcome {
    let th = GestureThresholds::default();
    let mut exact = 0;
    let mut lines = Vec::new();
    let mut pass = true;
    let mut seen = Vec::new();
    for g in Canonical::EIGHT {
        let (w, sel) = gesture_case(g);
        let want = expected_command(g, &sel, &w);
        let got = decisive(&ingest(&canonical_trace(&w, g, &sel, &th, None), &w, &th).unwrap());
        if got.as_ref() == Some(&want) {
            exact += 1;
        }
        seen.push(got);
        let (mut right, mut cancel, mut wrong) = (0, 0, 0);
        for seed in 0..100u64 {
            let trace = canonical_trace(&w, g, &sel, &th, Some((0.005, seed)));
            let cmds = ingest(&trace, &w, &th).unwrap();
            match decisive(&cmds) {
                Some(c) if c == want => right += 1,
                Some(c) if is_composition(&c) => wrong += 1,
                _ => cancel += 1,
            }
        }
        if right < 95 || wrong > 0 {
            pass = false;
        }
        lines.push(format!(
            "{g:?} {right}/100 (cancel {cancel}, wrong {wrong})"
        ));
    }
    let distinct = (0..seen.len()).all(|i| (i + 1..seen.len()).all(|j| seen[i] != seen[j]));
    pass &= exact == 8 && distinct;
    outcome(
        pass,
        format!(
            "canonical {exact}/8, pairwise distinct: {distinct}; sigma 5 mm: {} (floor 95/100, wrong 0)",
            lines.join(", ")
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut failures = Vec::new();
    for case in kind_cases() {
        let (a, rejected) = gesture_path(&case, None);
        let (b, _) = gesture_path(&case, None);
        let direct = direct_path(&case);
        let (sa, sb, sd) = (scene_bytes(&a), scene_bytes(&b), scene_bytes(&direct));
        if sa != sb {
            failures.push(format!("{}: replay not deterministic", case.kind.name()));
        }
        if sa != sd {
            failures.push(format!(
                "{}: gesture and direct scenes differ",
                case.kind.name()
            ));
        }
        if rejected > 0 || a.structures.iter().all(|s| s.kind != case.kind) {
            failures.push(format!(
                "{}: gesture path did not build it",
                case.kind.name()
            ));
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            "10/10 kinds: replay twice byte-identical, gesture path == direct path byte-identical"
                .to_string()
        } else {
            failures.join("; ")
        },
    )
}

fn criterion_6() -> Outcome {
    let sample = |i: usize, x: f64, z: f64| PositionSample {
        t: i as f64 * 100.0,
        position: Point::new(x, 1.6, z),
    };
    let walk: Vec<_> = (0..=10).map(|i| sample(i, i as f64, 0.0)).collect();
    let square: Vec<_> = [(0.0, 0.0), (2.5, 0.0), (2.5, 2.5), (0.0, 2.5), (0.0, 0.0)]
        .iter()
        .enumerate()
        .map(|(i, (x, z))| sample(i, *x, *z))
        .collect();
    let still: Vec<_> = (0..50).map(|i| sample(i, 0.3, -0.2)).collect();
    let d_walk = travel_distance(&walk).unwrap();
    let d_square = travel_distance(&square).unwrap();
    let moves = movement_count(&still, MOVEMENT_EPS).unwrap();
    outcome(
        (d_walk - 10.0).abs() <= 1e-9 && (d_square - 10.0).abs() <= 1e-9 && moves == 0,
        format!(
            "walk {d_walk} m, square {d_square} m (tolerance 1e-9), stationary movements {moves}"
        ),
    )
}

fn criterion_7() -> Outcome {
    let w = fixture50();
    let mut pass = true;
    let mut parts = Vec::new();
    for task in ["task1.jsonl", "task2.jsonl"] {
        let ops: Vec<Operation> = read_jsonl(&std::fs::read(fixture_path(task)).unwrap()).unwrap();
        let manual = op_count(&w, &ops, Policy::Manual, PROXIMITY).unwrap();
        let comp = op_count(&w, &ops, Policy::Compositional, PROXIMITY).unwrap();
        let ratio = manual as f64 / comp as f64;
        pass &= comp < manual && ratio > 1.5;
        parts.push(format!(
            "{task}: manual {manual}, compositional {comp}, ratio {ratio:.2}"
        ));
    }
    outcome(pass, format!("{} (floor 1.5)", parts.join("; ")))
}

fn max_shift(a: &Workspace, b: &Workspace) -> f64 {
    a.cells
        .iter()
        .zip(&b.cells)
        .map(|(x, y)| (x.pose.position - y.pose.position).norm())
        .fold(0.0, f64::max)
}

fn criterion_8() -> Outcome {
    let bytes = std::fs::read(fixture_path("fixture50.ipynb")).unwrap();
    let w = spatial_notebook::layout::initial_circular_layout(
        &import_notebook(&bytes, &LayoutConfig::default())
            .unwrap()
            .workspace,
    );
    let first = serialize_scene(&w);
    let second = serialize_scene(&parse_scene(first.as_bytes()).unwrap());
    let stable = first == second;

    let run = |w: &Workspace, ops: &[Operation]| -> Workspace {
        ops.iter()
            .fold(w.clone(), |acc, op| execute(&acc, op, PROXIMITY).unwrap())
    };
    let all = w.cell_ids();
    let grid = apply(
        &w,
        &all,
        StructureKind::MultiRowGrid,
        StructureParams {
            rows: Some(5),
            ..Default::default()
        },
    );
    let tree = apply(
        &w,
        &all,
        StructureKind::ParallelTree,
        StructureParams {
            branch_roots: vec![CellId(10), CellId(30)],
            ..Default::default()
        },
    );
    let sid = grid.structures[0].id;
    let toggle = Operation::Toggle {
        selection: all[..20].to_vec(),
    };
    let c = structure_centroid(&grid, sid).unwrap();
    let away = c + nalgebra::Vector3::new(0.7, -0.2, 0.4);
    let sel = vec![CellId(2), CellId(7), CellId(9)];
    let layer = |d| Operation::Apply {
        selection: sel.clone(),
        kind: StructureKind::SkipLayer,
        params: StructureParams {
            direction: Some(d),
            ..Default::default()
        },
    };
    let cases = [
        (
            "toggle^2",
            grid.clone(),
            run(&grid, &[toggle.clone(), toggle]),
        ),
        (
            "grid orientation^2",
            grid.clone(),
            run(
                &grid,
                &[
                    Operation::Orient { structure: sid },
                    Operation::Orient { structure: sid },
                ],
            ),
        ),
        (
            "tree orientation^2",
            tree.clone(),
            run(
                &tree,
                &[
                    Operation::Orient {
                        structure: tree.structures[0].id,
                    },
                    Operation::Orient {
                        structure: tree.structures[0].id,
                    },
                ],
            ),
        ),
        (
            "move and back",
            grid.clone(),
            run(
                &grid,
                &[
                    Operation::Move {
                        structure: sid,
                        grab: c,
                        release: away,
                    },
                    Operation::Move {
                        structure: sid,
                        grab: away,
                        release: c,
                    },
                ],
            ),
        ),
        (
            "closer then away",
            w.clone(),
            run(
                &w,
                &[layer(SkipDirection::Closer), layer(SkipDirection::Away)],
            ),
        ),
    ];
    let mut worst: f64 = 0.0;
    let mut visibility_ok = true;
    for (name, before, after) in &cases {
        worst = worst.max(max_shift(before, after));
        if *name != "closer then away" {
            let vis = |w: &Workspace| {
                w.edges
                    .iter()
                    .map(|e| (e.key(), e.visible))
                    .collect::<Vec<_>>()
            };
            visibility_ok &= vis(before) == vis(after);
        }
    }
    outcome(
        stable && worst <= 1e-9 && visibility_ok,
        format!(
            "serialize/parse/serialize byte-stable: {stable}; {} involutions restore within {worst:.2e} m (tolerance 1e-9 m)",
            cases.len()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("structure coverage", criterion_1),
        ("geometry oracles", criterion_2),
        ("edge routing", criterion_3),
        ("gesture classification", criterion_4),
        ("replay determinism and path equivalence", criterion_5),
        ("metrics", criterion_6),
        ("effort direction", criterion_7),
        ("round-trip and involutions", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} {} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!(
        "acceptance: {}/{} passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
