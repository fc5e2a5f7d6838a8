//! Session measures: physical travel, movement counts, and a primitive
//! interaction cost model contrasting manual placement with compositional
//! gestures.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::model::Workspace;
use crate::ops::{execute, Operation};

/// Default displacement (m) below which a step does not count as a
/// movement.
pub const MOVEMENT_EPS: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositionSample {
    pub t: f64,
    #[serde(rename = "pos")]
    pub position: Point,
}

fn check_trace(trace: &[PositionSample]) -> Result<()> {
    if trace.is_empty() {
        return Err(Error::Precondition("position trace is empty".into()));
    }
    for pair in trace.windows(2) {
        if pair[1].t <= pair[0].t {
            return Err(Error::Stream(format!(
                "sample times must increase strictly: {} then {}",
                pair[0].t, pair[1].t
            )));
        }
    }
    if trace
        .iter()
        .any(|s| !s.position.iter().all(|c| c.is_finite()))
    {
        return Err(Error::Stream("non-finite position".into()));
    }
    Ok(())
}

/// Sum of straight-line distances between consecutive samples.
pub fn travel_distance(trace: &[PositionSample]) -> Result<f64> {
    check_trace(trace)?;
    Ok(trace
        .windows(2)
        .map(|p| (p[1].position - p[0].position).norm())
        .sum())
}

/// Number of consecutive sample pairs displaced by more than `eps`.
pub fn movement_count(trace: &[PositionSample], eps: f64) -> Result<usize> {
    check_trace(trace)?;
    Ok(trace
        .windows(2)
        .filter(|p| (p[1].position - p[0].position).norm() > eps)
        .count())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    /// Cells placed one or two at a time by hand.
    Manual,
    /// Cells selected, then one gesture builds the structure.
    Compositional,
}

/// Primitive interactions one operation takes under `policy`. `before` and
/// `after` are the workspaces around the operation.
///
/// Unit costs: select, grab, release, gesture and per-cell fine alignment
/// each cost 1. Manually building a structure over n cells means moving
/// each cell (grab, move, release), wiring each visible indicator (grab,
/// release) and aligning each cell.
pub fn op_cost(before: &Workspace, after: &Workspace, op: &Operation, policy: Policy) -> u64 {
    let manual = policy == Policy::Manual;
    let size = |w: &Workspace, s| w.structure(s).map_or(0, |s| s.members.len() as u64);
    match op {
        Operation::Apply { selection, .. } => {
            let n = selection.len() as u64;
            if !manual {
                return n + 1;
            }
            let edges = after
                .edges
                .iter()
                .filter(|e| e.visible && selection.contains(&e.from) && selection.contains(&e.to))
                .count() as u64;
            3 * n + 2 * edges + n
        }
        Operation::Move { structure, .. } => {
            if manual {
                4 * size(before, *structure)
            } else {
                3
            }
        }
        Operation::Merge { src, .. } => {
            if manual {
                4 * size(before, *src) + 2
            } else {
                3
            }
        }
        Operation::Dims { structure, .. } | Operation::Orient { structure } => {
            let n = size(before, *structure);
            if manual {
                4 * n
            } else {
                n + 1
            }
        }
        Operation::DetachOrInsert { .. } | Operation::Rewire { .. } => 3,
        Operation::Toggle { selection } => selection.len() as u64 + 1,
    }
}

/// Total cost of reaching the end of `script` from `start` under `policy`.
pub fn op_count(
    start: &Workspace,
    script: &[Operation],
    policy: Policy,
    proximity: f64,
) -> Result<u64> {
    let mut w = start.clone();
    let mut total = 0;
    for op in script {
        let next = execute(&w, op, proximity)?;
        total += op_cost(&w, &next, op, policy);
        w = next;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub travel_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub movements: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub op_count_manual: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub op_count_compositional: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
}

impl MetricsReport {
    pub fn from_trace(trace: &[PositionSample], eps: f64) -> Result<Self> {
        Ok(MetricsReport {
            travel_m: Some(travel_distance(trace)?),
            movements: Some(movement_count(trace, eps)?),
            op_count_manual: None,
            op_count_compositional: None,
            ratio: None,
        })
    }

    pub fn comparison(start: &Workspace, script: &[Operation], proximity: f64) -> Result<Self> {
        let manual = op_count(start, script, Policy::Manual, proximity)?;
        let comp = op_count(start, script, Policy::Compositional, proximity)?;
        Ok(MetricsReport {
            travel_m: None,
            movements: None,
            op_count_manual: Some(manual),
            op_count_compositional: Some(comp),
            ratio: (comp > 0).then(|| manual as f64 / comp as f64),
        })
    }
}
