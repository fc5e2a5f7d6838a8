//! A live editing session: workspace, current selection, pending grabs and
//! the operation log. Gesture commands and scripted operations both land
//! here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::gesture::{GestureThresholds, HandPoseEvent, Interpreter, TimedCommand, TriggerCommand};
use crate::layout::{Orientation, StructureKind, StructureParams};
use crate::metrics::{op_cost, Policy};
use crate::model::{CellId, StructureId, Workspace};
use crate::ops::{affected, execute, EdgeEnd, Operation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperationLogEntry {
    pub t: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<TriggerCommand>,
    pub op: Operation,
    pub affected: Vec<String>,
    /// Cost under the compositional policy.
    pub primitive_cost: u64,
}

/// A command the session could not carry out. The workspace is unchanged.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rejection {
    pub t: f64,
    pub command: TriggerCommand,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReplayOutcome {
    pub commands: Vec<TimedCommand>,
    pub rejected: Vec<Rejection>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Grab {
    Structure {
        id: StructureId,
        at: Point,
    },
    Cell(CellId),
    Edge {
        from: CellId,
        to: CellId,
        end: EdgeEnd,
    },
}

#[derive(Debug, Clone)]
pub struct Session {
    workspace: Workspace,
    thresholds: GestureThresholds,
    selection: Vec<CellId>,
    grab: Option<Grab>,
    log: Vec<OperationLogEntry>,
}

impl Session {
    pub fn new(workspace: Workspace, thresholds: GestureThresholds) -> Self {
        Session {
            workspace,
            thresholds,
            selection: Vec::new(),
            grab: None,
            log: Vec::new(),
        }
    }

    pub fn workspace(&self) -> &Workspace {
        &self.workspace
    }

    pub fn into_workspace(self) -> Workspace {
        self.workspace
    }

    pub fn selection(&self) -> &[CellId] {
        &self.selection
    }

    pub fn log(&self) -> &[OperationLogEntry] {
        &self.log
    }

    /// Applies an operation and logs it.
    pub fn perform(
        &mut self,
        t: f64,
        op: Operation,
        command: Option<TriggerCommand>,
    ) -> Result<()> {
        let next = execute(&self.workspace, &op, self.thresholds.proximity_grabber)?;
        let entry = OperationLogEntry {
            t,
            affected: affected(&self.workspace, &op),
            primitive_cost: op_cost(&self.workspace, &next, &op, Policy::Compositional),
            command,
            op,
        };
        self.log.push(entry);
        self.workspace = next;
        Ok(())
    }

    /// Members of a new parallel tree: the common structure of the roots,
    /// or every free cell when the roots are free.
    fn tree_host(&self, roots: &[CellId]) -> Result<Vec<CellId>> {
        let w = &self.workspace;
        let first = *roots
            .first()
            .ok_or_else(|| Error::Precondition("a tree needs at least one branch root".into()))?;
        match w.structure_of(first) {
            Some(s) if roots.iter().all(|r| s.members.contains(r)) => Ok(s.members.clone()),
            None if roots.iter().all(|r| w.structure_of(*r).is_none()) => Ok(w.free_cells()),
            _ => Err(Error::Precondition(
                "branch roots must all be free or all in one structure".into(),
            )),
        }
    }

    fn creation(&self, cmd: &TriggerCommand) -> Result<Operation> {
        let apply = |selection: Vec<CellId>, kind, params| Operation::Apply {
            selection,
            kind,
            params,
        };
        let sel = self.selection.clone();
        if sel.is_empty() {
            return Err(Error::Precondition("nothing is selected".into()));
        }
        let none = StructureParams::default();
        Ok(match cmd {
            TriggerCommand::CreateLinearLinear => apply(sel, StructureKind::LinearLinear, none),
            TriggerCommand::CreateGrid { orientation, count } => match orientation {
                Orientation::Horizontal => apply(
                    sel,
                    StructureKind::MultiRowGrid,
                    StructureParams {
                        rows: Some(*count),
                        ..none
                    },
                ),
                Orientation::Vertical => apply(
                    sel,
                    StructureKind::MultiColumnGrid,
                    StructureParams {
                        cols: Some(*count),
                        ..none
                    },
                ),
            },
            TriggerCommand::CreateParallelTree { roots } => apply(
                self.tree_host(roots)?,
                StructureKind::ParallelTree,
                StructureParams {
                    branch_roots: roots.clone(),
                    ..none
                },
            ),
            TriggerCommand::CreateLoopCircle => apply(sel, StructureKind::LoopCircle, none),
            TriggerCommand::CreateSkipFold { keep } => apply(
                sel,
                StructureKind::SkipFold,
                StructureParams {
                    keep: Some(keep.clone()),
                    ..none
                },
            ),
            TriggerCommand::CreateSkipPile { head } => apply(
                sel,
                StructureKind::SkipPile,
                StructureParams {
                    visible_head: Some(*head),
                    ..none
                },
            ),
            TriggerCommand::ApplySkipLayer { direction } => apply(
                sel,
                StructureKind::SkipLayer,
                StructureParams {
                    direction: Some(*direction),
                    ..none
                },
            ),
            other => unreachable!("{other:?} is not a creation"),
        })
    }

    fn take_grab(&mut self) -> Result<Grab> {
        self.grab
            .take()
            .ok_or_else(|| Error::Precondition("release without a matching grab".into()))
    }

    /// Carries out one command at time `t`.
    pub fn handle(&mut self, t: f64, cmd: &TriggerCommand) -> Result<()> {
        let w = &self.workspace;
        let op = match cmd {
            TriggerCommand::SelectCell { cell } => {
                if !w.contains_cell(*cell) {
                    return Err(Error::UnknownCell(*cell));
                }
                if !self.selection.contains(cell) {
                    self.selection.push(*cell);
                }
                return Ok(());
            }
            TriggerCommand::DeselectAll => {
                self.selection.clear();
                return Ok(());
            }
            TriggerCommand::Cancel => {
                self.grab = None;
                return Ok(());
            }
            c if c.creates_structure() => {
                let op = self.creation(c);
                self.selection.clear();
                op?
            }
            TriggerCommand::CycleClusterMode { structure } => {
                let s = w
                    .structure(*structure)
                    .ok_or(Error::UnknownStructure(*structure))?;
                let kind = match s.kind {
                    StructureKind::ClusterByFormat => StructureKind::ClusterByTask,
                    _ => StructureKind::ClusterByFormat,
                };
                Operation::Apply {
                    selection: s.members.clone(),
                    kind,
                    params: StructureParams::default(),
                }
            }
            TriggerCommand::GrabStructure { structure, at } => {
                w.structure(*structure)
                    .ok_or(Error::UnknownStructure(*structure))?;
                self.grab = Some(Grab::Structure {
                    id: *structure,
                    at: *at,
                });
                return Ok(());
            }
            TriggerCommand::GrabCell { cell } => {
                w.cell(*cell).ok_or(Error::UnknownCell(*cell))?;
                self.grab = Some(Grab::Cell(*cell));
                return Ok(());
            }
            TriggerCommand::GrabEdgeEndpoint { from, to, end } => {
                w.edge(*from, *to).ok_or(Error::UnknownEdge {
                    from: *from,
                    to: *to,
                })?;
                self.grab = Some(Grab::Edge {
                    from: *from,
                    to: *to,
                    end: *end,
                });
                return Ok(());
            }
            TriggerCommand::ReleaseStructure { at } => match self.take_grab()? {
                Grab::Structure { id, at: grab } => Operation::Move {
                    structure: id,
                    grab,
                    release: *at,
                },
                _ => return Err(Error::Precondition("no structure is grabbed".into())),
            },
            TriggerCommand::MergeStructures { src, dst, at } => {
                self.grab = None;
                Operation::Merge {
                    src: *src,
                    dst: *dst,
                    at: Some(*at),
                }
            }
            TriggerCommand::ReleaseCell { pose } => match self.take_grab()? {
                Grab::Cell(cell) => Operation::DetachOrInsert {
                    cell,
                    release: *pose,
                },
                _ => return Err(Error::Precondition("no cell is grabbed".into())),
            },
            TriggerCommand::ReleaseEdgeEndpoint { cell } => match self.take_grab()? {
                Grab::Edge { from, to, end } => Operation::Rewire {
                    from,
                    to,
                    end,
                    cell: *cell,
                },
                _ => {
                    return Err(Error::Precondition(
                        "no indicator endpoint is grabbed".into(),
                    ))
                }
            },
            TriggerCommand::ToggleIndicators { selection } => Operation::Toggle {
                selection: selection.clone(),
            },
            TriggerCommand::AdjustDimensions { structure, delta } => Operation::Dims {
                structure: *structure,
                delta: *delta,
            },
            TriggerCommand::AdjustOrientation { structure } => Operation::Orient {
                structure: *structure,
            },
            _ => unreachable!("creations handled above"),
        };
        self.perform(t, op, Some(cmd.clone()))
    }

    /// Replays a command log. Commands the session cannot carry out are
    /// reported and skipped.
    pub fn replay_commands(&mut self, commands: &[TimedCommand]) -> ReplayOutcome {
        let mut out = ReplayOutcome::default();
        for c in commands {
            if let Err(e) = self.handle(c.t, &c.command) {
                out.rejected.push(Rejection {
                    t: c.t,
                    command: c.command.clone(),
                    reason: e.to_string(),
                });
            }
            out.commands.push(c.clone());
        }
        out
    }

    /// Runs a hand trace through a fresh interpreter, carrying out each
    /// command as it is recognized. Malformed streams abort.
    pub fn replay_trace(&mut self, events: &[HandPoseEvent]) -> Result<ReplayOutcome> {
        let mut interp = Interpreter::new(self.thresholds.clone());
        let mut out = ReplayOutcome::default();
        let mut last_t = 0.0;
        for e in events {
            last_t = e.t;
            for command in interp.feed(e, &self.workspace)? {
                let c = TimedCommand { t: e.t, command };
                let mut r = self.replay_commands(std::slice::from_ref(&c));
                out.commands.append(&mut r.commands);
                out.rejected.append(&mut r.rejected);
            }
        }
        for command in interp.finish() {
            let c = TimedCommand { t: last_t, command };
            let mut r = self.replay_commands(std::slice::from_ref(&c));
            out.commands.append(&mut r.commands);
            out.rejected.append(&mut r.rejected);
        }
        Ok(out)
    }
}

/// Commands recognized in `events` when played against `w`.
pub fn ingest(
    events: &[HandPoseEvent],
    w: &Workspace,
    th: &GestureThresholds,
) -> Result<Vec<TriggerCommand>> {
    let mut s = Session::new(w.clone(), th.clone());
    Ok(s.replay_trace(events)?
        .commands
        .into_iter()
        .map(|c| c.command)
        .collect())
}
