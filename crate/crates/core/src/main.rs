//! Command-line front end. Usage errors exit 2, domain errors exit 1.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use spatial_notebook::config::Settings;
use spatial_notebook::geom::{Point, Pose};
use spatial_notebook::gesture::{HandPoseEvent, TimedCommand};
use spatial_notebook::layout::{
    initial_circular_layout, Orientation, SkipDirection, StructureKind, StructureParams,
};
use spatial_notebook::metrics::{MetricsReport, PositionSample, MOVEMENT_EPS};
use spatial_notebook::model::{CellId, StructureId, Workspace};
use spatial_notebook::notebook::import_notebook;
use spatial_notebook::ops::{execute, EdgeEnd, Operation};
use spatial_notebook::scene::{
    parse_scene, read_jsonl, serialize_scene, write_atomic, write_jsonl,
};
use spatial_notebook::session::Session;
use spatial_notebook::validate::validate_workspace;
use spatial_notebook::{Error, Result};

#[derive(Parser)]
#[command(
    name = "spatial-notebook",
    version,
    about = "Compose notebook cells into 3D structures"
)]
struct Cli {
    /// JSON file with `layout` and `gestures` overrides.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Import a Jupyter notebook onto the initial semicircle.
    Import {
        notebook: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply a structure to a selection.
    Apply {
        scene: PathBuf,
        /// Comma-separated cell ids, or `all`.
        #[arg(long)]
        select: String,
        /// Structure kind, e.g. `multi-row-grid`; `cluster` needs `--mode`.
        #[arg(long)]
        structure: String,
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        cols: Option<usize>,
        #[arg(long)]
        roots: Option<String>,
        #[arg(long)]
        keep: Option<String>,
        #[arg(long)]
        head: Option<String>,
        #[arg(long)]
        mode: Option<ClusterArg>,
        #[arg(long)]
        direction: Option<DirectionArg>,
        #[arg(long)]
        orientation: Option<OrientationArg>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a hand-pose trace or a command log against a scene.
    Replay {
        scene: PathBuf,
        trace: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the recognized command log.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Run one editing operation.
    Edit {
        scene: PathBuf,
        #[arg(long)]
        op: EditOp,
        #[arg(long)]
        structure: Option<String>,
        #[arg(long)]
        cell: Option<String>,
        /// `x,y,z`
        #[arg(long)]
        grab: Option<String>,
        /// `x,y,z`
        #[arg(long)]
        release: Option<String>,
        /// `x,y,z[,yaw]`
        #[arg(long)]
        pose: Option<String>,
        #[arg(long)]
        from: Option<String>,
        #[arg(long)]
        to: Option<String>,
        #[arg(long)]
        end: Option<EndArg>,
        #[arg(long)]
        select: Option<String>,
        #[arg(long)]
        src: Option<String>,
        #[arg(long)]
        dst: Option<String>,
        /// `x,y,z`
        #[arg(long)]
        at: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<i64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Travel distance and movement count of a position trace.
    Metrics {
        positions: PathBuf,
        #[arg(long, default_value_t = MOVEMENT_EPS)]
        eps: f64,
    },
    /// Manual versus compositional interaction counts for a script.
    Compare { scene: PathBuf, script: PathBuf },
    /// Check every workspace invariant.
    Validate { scene: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum ClusterArg {
    Format,
    Task,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Closer,
    Away,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrientationArg {
    Horizontal,
    Vertical,
}

#[derive(Clone, Copy, ValueEnum)]
enum EndArg {
    From,
    To,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum EditOp {
    Move,
    Detach,
    Insert,
    Rewire,
    Toggle,
    Merge,
    Dims,
    Orient,
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => Ok(std::io::stdout().write_all(text.as_bytes())?),
    }
}

fn param<T: std::str::FromStr<Err = String>>(s: &str) -> Result<T> {
    s.trim().parse().map_err(Error::Param)
}

fn ids<T: std::str::FromStr<Err = String>>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(param)
        .collect()
}

fn selection(w: &Workspace, s: &str) -> Result<Vec<CellId>> {
    if s.trim() == "all" {
        Ok(w.cell_ids())
    } else {
        ids(s)
    }
}

fn numbers(s: &str, want: &[usize]) -> Result<Vec<f64>> {
    let v = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| Error::Param(format!("{p:?}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if !want.contains(&v.len()) || !v.iter().all(|x| x.is_finite()) {
        return Err(Error::Param(format!(
            "expected {want:?} finite numbers, got {s:?}"
        )));
    }
    Ok(v)
}

fn point(s: &str) -> Result<Point> {
    let v = numbers(s, &[3])?;
    Ok(Point::new(v[0], v[1], v[2]))
}

fn pose(s: &str) -> Result<Pose> {
    let v = numbers(s, &[3, 4])?;
    Ok(Pose::new(
        Point::new(v[0], v[1], v[2]),
        v.get(3).copied().unwrap_or(0.0),
    ))
}

fn required<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str> {
    v.as_deref()
        .ok_or_else(|| Error::Param(format!("this operation needs --{flag}")))
}

fn load_scene(path: &Path, settings: Option<&Settings>) -> Result<Workspace> {
    let mut w = parse_scene(&read(path)?)?;
    if let Some(s) = settings {
        w.config = s.layout.clone();
    }
    Ok(w)
}

fn run(cli: Cli) -> Result<()> {
    let overrides = cli
        .config
        .as_deref()
        .map(|p| Settings::parse(&read(p)?))
        .transpose()?;
    let settings = overrides.clone().unwrap_or_default();
    let th = settings.gestures.clone();
    match cli.command {
        Command::Import { notebook, out } => {
            let imported = import_notebook(&read(&notebook)?, &settings.layout)?;
            for w in &imported.warnings {
                eprintln!("warning: {}: {}", w.cell, w.message);
            }
            emit(
                out.as_deref(),
                &serialize_scene(&initial_circular_layout(&imported.workspace)),
            )
        }
        Command::Apply {
            scene,
            select,
            structure,
            rows,
            cols,
            roots,
            keep,
            head,
            mode,
            direction,
            orientation,
            out,
        } => {
            let w = load_scene(&scene, overrides.as_ref())?;
            let kind = match (structure.as_str(), mode) {
                ("cluster", Some(ClusterArg::Format)) => StructureKind::ClusterByFormat,
                ("cluster", Some(ClusterArg::Task)) => StructureKind::ClusterByTask,
                ("cluster", None) => {
                    return Err(Error::Param("cluster needs --mode format|task".into()))
                }
                (name, _) => StructureKind::parse(name)
                    .ok_or_else(|| Error::Param(format!("unknown structure kind {name:?}")))?,
            };
            let params = StructureParams {
                rows,
                cols,
                orientation: orientation.map(|o| match o {
                    OrientationArg::Horizontal => Orientation::Horizontal,
                    OrientationArg::Vertical => Orientation::Vertical,
                }),
                branch_roots: roots.as_deref().map(ids).transpose()?.unwrap_or_default(),
                keep: keep.as_deref().map(ids).transpose()?,
                visible_head: head.as_deref().map(param).transpose()?,
                direction: direction.map(|d| match d {
                    DirectionArg::Closer => SkipDirection::Closer,
                    DirectionArg::Away => SkipDirection::Away,
                }),
                ..Default::default()
            };
            let op = Operation::Apply {
                selection: selection(&w, &select)?,
                kind,
                params,
            };
            emit(
                out.as_deref(),
                &serialize_scene(&execute(&w, &op, th.proximity_grabber)?),
            )
        }
        Command::Replay {
            scene,
            trace,
            out,
            log,
        } => {
            let w = load_scene(&scene, overrides.as_ref())?;
            let bytes = read(&trace)?;
            let first: Option<serde_json::Value> =
                read_jsonl::<serde_json::Value>(&bytes)?.into_iter().next();
            let is_log = first.as_ref().is_some_and(|v| v.get("cmd").is_some());
            let mut session = Session::new(w, th);
            let outcome = if is_log {
                session.replay_commands(&read_jsonl::<TimedCommand>(&bytes)?)
            } else {
                session.replay_trace(&read_jsonl::<HandPoseEvent>(&bytes)?)?
            };
            for r in &outcome.rejected {
                eprintln!("warning: t={} {:?} rejected: {}", r.t, r.command, r.reason);
            }
            if let Some(p) = log {
                write_atomic(&p, write_jsonl(&outcome.commands)?.as_bytes())?;
            }
            emit(out.as_deref(), &serialize_scene(session.workspace()))
        }
        Command::Edit {
            scene,
            op,
            structure,
            cell,
            grab,
            release,
            pose: at_pose,
            from,
            to,
            end,
            select,
            src,
            dst,
            at,
            delta,
            out,
        } => {
            let w = load_scene(&scene, overrides.as_ref())?;
            let structure_id =
                || -> Result<StructureId> { param(required(&structure, "structure")?) };
            let operation = match op {
                EditOp::Move => Operation::Move {
                    structure: structure_id()?,
                    grab: point(required(&grab, "grab")?)?,
                    release: point(required(&release, "release")?)?,
                },
                EditOp::Detach | EditOp::Insert => Operation::DetachOrInsert {
                    cell: param(required(&cell, "cell")?)?,
                    release: pose(required(&at_pose, "pose")?)?,
                },
                EditOp::Rewire => Operation::Rewire {
                    from: param(required(&from, "from")?)?,
                    to: param(required(&to, "to")?)?,
                    end: match end
                        .ok_or_else(|| Error::Param("rewire needs --end from|to".into()))?
                    {
                        EndArg::From => EdgeEnd::From,
                        EndArg::To => EdgeEnd::To,
                    },
                    cell: param(required(&cell, "cell")?)?,
                },
                EditOp::Toggle => Operation::Toggle {
                    selection: selection(&w, required(&select, "select")?)?,
                },
                EditOp::Merge => Operation::Merge {
                    src: param(required(&src, "src")?)?,
                    dst: param(required(&dst, "dst")?)?,
                    at: at.as_deref().map(point).transpose()?,
                },
                EditOp::Dims => Operation::Dims {
                    structure: structure_id()?,
                    delta: delta.ok_or_else(|| Error::Param("dims needs --delta".into()))?,
                },
                EditOp::Orient => Operation::Orient {
                    structure: structure_id()?,
                },
            };
            emit(
                out.as_deref(),
                &serialize_scene(&execute(&w, &operation, th.proximity_grabber)?),
            )
        }
        Command::Metrics { positions, eps } => {
            if !(eps.is_finite() && eps >= 0.0) {
                return Err(Error::Param(format!(
                    "--eps must be a non-negative number, got {eps}"
                )));
            }
            let trace: Vec<PositionSample> = read_jsonl(&read(&positions)?)?;
            let report = MetricsReport::from_trace(&trace, eps)?;
            emit(
                None,
                &format!(
                    "{}\n",
                    serde_json::to_string_pretty(&report).expect("report prints")
                ),
            )
        }
        Command::Compare { scene, script } => {
            let w = load_scene(&scene, overrides.as_ref())?;
            let ops: Vec<Operation> = read_jsonl(&read(&script)?)?;
            let report = MetricsReport::comparison(&w, &ops, th.proximity_grabber)?;
            emit(
                None,
                &format!(
                    "{}\n",
                    serde_json::to_string_pretty(&report).expect("report prints")
                ),
            )
        }
        Command::Validate { scene } => {
            let w = load_scene(&scene, overrides.as_ref())?;
            let report = validate_workspace(&w);
            emit(
                None,
                &format!(
                    "{}\n",
                    serde_json::to_string_pretty(&report).expect("report prints")
                ),
            )?;
            if report.is_empty() {
                Ok(())
            } else {
                Err(Error::Precondition(format!(
                    "{} invariant violation(s)",
                    report.violations.len()
                )))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
