//! Invariant checks over a whole workspace. Validation never fails; it
//! reports.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use serde::Serialize;

use crate::layout::normalize_params;
use crate::model::Workspace;
use crate::scene::canonical_value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    DuplicateCell,
    BadSize,
    EmptyTag,
    BadPose,
    SelfEdge,
    DanglingEdge,
    DuplicateEdge,
    BadPolyline,
    EmptyStructure,
    DuplicateMember,
    UnknownMember,
    SharedMember,
    BadParams,
    Overlap,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Offending cell and structure ids, as printed.
    pub ids: Vec<String>,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }

    fn push(&mut self, kind: ViolationKind, ids: Vec<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            kind,
            ids,
            message: message.into(),
        });
    }
}

const ENDPOINT_TOL: f64 = 1e-6;

pub fn validate_workspace(w: &Workspace) -> ValidationReport {
    use ViolationKind::*;
    let mut r = ValidationReport::default();
    let cfg = &w.config;

    let mut seen = BTreeSet::new();
    for c in &w.cells {
        let id = c.id.to_string();
        if !seen.insert(c.id) {
            r.push(DuplicateCell, vec![id.clone()], "cell id appears twice");
        }
        if !(c.width > 0.0 && c.height > 0.0) {
            r.push(
                BadSize,
                vec![id.clone()],
                format!("size {}x{}", c.width, c.height),
            );
        }
        if c.task_tag.as_deref().is_some_and(str::is_empty) {
            r.push(EmptyTag, vec![id.clone()], "task tag is empty");
        }
        if !c.pose.is_finite() || c.pose.yaw <= -PI || c.pose.yaw > PI {
            r.push(BadPose, vec![id], format!("{:?}", c.pose));
        }
    }

    let mut pairs = BTreeSet::new();
    for e in &w.edges {
        let ids = vec![e.from.to_string(), e.to.to_string()];
        if e.from == e.to {
            r.push(SelfEdge, ids.clone(), "edge loops onto its own cell");
        }
        if !w.contains_cell(e.from) || !w.contains_cell(e.to) {
            r.push(DanglingEdge, ids, "edge endpoint does not exist");
            continue;
        }
        if !pairs.insert(e.key()) {
            r.push(
                DuplicateEdge,
                ids.clone(),
                "more than one edge for this pair",
            );
        }
        if e.polyline.is_empty() {
            continue;
        }
        if e.polyline.len() < 2 {
            r.push(BadPolyline, ids, "polyline has a single point");
            continue;
        }
        let src = w.cell(w.attachment_cell(e.from)).map(|c| c.panel(cfg));
        let tgt = w.cell(w.attachment_cell(e.to)).map(|c| c.panel(cfg));
        if let (Some(src), Some(tgt)) = (src, tgt) {
            let first = e.polyline.first().unwrap();
            let last = e.polyline.last().unwrap();
            if src.boundary_distance(first) > ENDPOINT_TOL
                || tgt.boundary_distance(last) > ENDPOINT_TOL
            {
                r.push(
                    BadPolyline,
                    ids,
                    "polyline does not start and end on the cell boundaries",
                );
            }
        }
    }

    let mut owner: BTreeMap<_, _> = BTreeMap::new();
    for s in &w.structures {
        let sid = s.id.to_string();
        if s.members.is_empty() {
            r.push(
                EmptyStructure,
                vec![sid.clone()],
                "structure has no members",
            );
            continue;
        }
        let mut members = BTreeSet::new();
        for m in &s.members {
            if !members.insert(*m) {
                r.push(
                    DuplicateMember,
                    vec![sid.clone(), m.to_string()],
                    "member listed twice",
                );
            }
            if !w.contains_cell(*m) {
                r.push(
                    UnknownMember,
                    vec![sid.clone(), m.to_string()],
                    "member does not exist",
                );
            }
            if let Some(prev) = owner.insert(*m, s.id) {
                if prev != s.id {
                    r.push(
                        SharedMember,
                        vec![prev.to_string(), sid.clone(), m.to_string()],
                        "cell belongs to two structures",
                    );
                }
            }
        }
        match normalize_params(s.kind, &s.members, &s.params, cfg) {
            // Compared as serialized, so a parsed scene's rounded floats match.
            Ok(canonical)
                if canonical_value(&canonical).ok() == canonical_value(&s.params).ok() => {}
            Ok(_) => r.push(BadParams, vec![sid], "params are not in canonical form"),
            Err(e) => r.push(BadParams, vec![sid], e.to_string()),
        }
    }

    let panels: Vec<_> = w.cells.iter().map(|c| (c.id, c.panel(cfg))).collect();
    for (i, (a, pa)) in panels.iter().enumerate() {
        for (b, pb) in &panels[i + 1..] {
            let shared = owner.get(a).filter(|s| owner.get(b) == Some(*s));
            let exempt = shared
                .and_then(|s| w.structure(*s))
                .is_some_and(|s| s.kind.allows_overlap());
            if !exempt && pa.coplanar_overlap(pb, cfg.min_clearance) {
                r.push(Overlap, vec![a.to_string(), b.to_string()], "cells overlap");
            }
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Point, Pose};
    use crate::layout::{route_edges, LayoutConfig};
    use crate::model::{Cell, CellId, CellKind};

    fn row(n: u32) -> Workspace {
        let cfg = LayoutConfig::default();
        let mut w = Workspace::new(cfg.clone());
        for i in 0..n {
            let mut c = Cell::new(CellId(i), CellKind::Code, "", &cfg);
            c.pose = Pose::new(Point::new(i as f64 * 0.45, 0.0, -2.5), 0.0);
            w.cells.push(c);
        }
        for i in 1..n {
            w.upsert_edge(CellId(i - 1), CellId(i), true, false);
        }
        route_edges(&mut w);
        w
    }

    #[test]
    fn clean_row() {
        assert!(validate_workspace(&row(5)).is_empty());
    }

    #[test]
    fn dangling_edge_named() {
        let mut w = row(3);
        w.cells.remove(2);
        let r = validate_workspace(&w);
        assert_eq!(r.count(ViolationKind::DanglingEdge), 1);
        assert_eq!(r.violations[0].ids, vec!["c1", "c2"]);
    }

    #[test]
    fn stacked_cells_overlap() {
        let mut w = row(3);
        w.cells[1].pose = w.cells[0].pose;
        route_edges(&mut w);
        let r = validate_workspace(&w);
        assert_eq!(r.count(ViolationKind::Overlap), 1);
    }

    #[test]
    fn tight_but_clear_spacing_passes() {
        let mut w = row(2);
        // exactly one clearance apart edge to edge
        w.cells[1].pose = Pose::new(Point::new(0.41, 0.0, -2.5), 0.0);
        route_edges(&mut w);
        assert_eq!(validate_workspace(&w).count(ViolationKind::Overlap), 0);
        w.cells[1].pose = Pose::new(Point::new(0.405, 0.0, -2.5), 0.0);
        assert_eq!(validate_workspace(&w).count(ViolationKind::Overlap), 1);
    }
}
