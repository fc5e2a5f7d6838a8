//! Execution-indicator routing.
//!
//! An indicator leaves its source through the right-edge midpoint and enters
//! its target through the left-edge midpoint. A straight segment is used when
//! it clears every other panel; otherwise the router tries four-point detours
//! that drop below (or, failing that, rise above) the panels in the way,
//! nearest level first.

use crate::geom::{Panel, Point};
use crate::model::{CellId, Workspace};

use super::StructureKind;

#[derive(Debug, Clone, PartialEq)]
pub struct RouteWarning {
    pub from: CellId,
    pub to: CellId,
    pub message: String,
}

struct Obstacle {
    id: CellId,
    panel: Panel,
    lo: Point,
    hi: Point,
}

impl Obstacle {
    fn new(id: CellId, panel: Panel) -> Self {
        let (lo, hi) = bounds(&panel.corners());
        Obstacle { id, panel, lo, hi }
    }

    /// Cheap reject: boxes further apart than `margin` cannot interact.
    fn near(&self, lo: &Point, hi: &Point, margin: f64) -> bool {
        (0..3).all(|i| self.lo[i] - margin <= hi[i] && lo[i] <= self.hi[i] + margin)
    }
}

fn bounds(points: &[Point]) -> (Point, Point) {
    let mut lo = points[0];
    let mut hi = points[0];
    for p in &points[1..] {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (lo, hi)
}

/// Routes every visible edge; hidden edges lose their polyline.
pub fn route_edges(w: &mut Workspace) -> Vec<RouteWarning> {
    let obstacles: Vec<Obstacle> = w
        .cells
        .iter()
        .map(|c| Obstacle::new(c.id, c.panel(&w.config)))
        .collect();
    let mut warnings = Vec::new();
    let mut routes = Vec::with_capacity(w.edges.len());
    for e in &w.edges {
        if !e.visible {
            routes.push(Vec::new());
            continue;
        }
        let src = w.attachment_cell(e.from);
        let tgt = w.attachment_cell(e.to);
        let (Some(sp), Some(tp)) = (panel_of(&obstacles, src), panel_of(&obstacles, tgt)) else {
            warnings.push(RouteWarning {
                from: e.from,
                to: e.to,
                message: "endpoint does not exist".into(),
            });
            routes.push(Vec::new());
            continue;
        };
        let p = sp.right_edge_mid();
        let q = tp.left_edge_mid();
        if src == tgt || (p - q).norm() < 1e-9 {
            warnings.push(RouteWarning {
                from: e.from,
                to: e.to,
                message: "endpoints coincide; indicator left unrouted".into(),
            });
            routes.push(Vec::new());
            continue;
        }
        let exempt = exempt_cells(w, src, tgt);
        match route_one(
            &obstacles,
            &exempt,
            sp,
            tp,
            w.config.gap,
            w.config.min_clearance,
        ) {
            Some(line) => routes.push(line),
            None => {
                warnings.push(RouteWarning {
                    from: e.from,
                    to: e.to,
                    message: "no detour clears every panel; straight indicator kept".into(),
                });
                routes.push(vec![p, q]);
            }
        }
    }
    for (e, line) in w.edges.iter_mut().zip(routes) {
        e.polyline = line;
    }
    warnings
}

fn panel_of(obstacles: &[Obstacle], id: CellId) -> Option<&Panel> {
    obstacles
        .binary_search_by_key(&id, |o| o.id)
        .ok()
        .map(|i| &obstacles[i].panel)
}

/// Cells excused from the clearance margin: the endpoints themselves and
/// anything buried in a pile they front.
fn exempt_cells(w: &Workspace, src: CellId, tgt: CellId) -> Vec<CellId> {
    let mut out = vec![src, tgt];
    for id in [src, tgt] {
        if let Some(s) = w.structure_of(id) {
            if s.kind == StructureKind::SkipPile {
                out.extend(s.members.iter().copied());
            }
        }
    }
    out
}

fn route_one(
    obstacles: &[Obstacle],
    exempt: &[CellId],
    src: &Panel,
    tgt: &Panel,
    gap: f64,
    clearance: f64,
) -> Option<Vec<Point>> {
    let p = src.right_edge_mid();
    let q = tgt.left_edge_mid();
    let exit = p + src.pose.right() * (gap / 2.0);
    let entry = q - tgt.pose.right() * (gap / 2.0);

    let mut below: Vec<f64> = obstacles
        .iter()
        .map(|o| o.panel.bottom() - gap / 2.0)
        .filter(|l| *l < p.y)
        .collect();
    below.sort_by(|a, b| b.total_cmp(a));
    below.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let floor = obstacles
        .iter()
        .map(|o| o.panel.bottom())
        .fold(f64::INFINITY, f64::min)
        - gap;
    let mut above: Vec<f64> = obstacles
        .iter()
        .map(|o| o.panel.top() + gap / 2.0)
        .filter(|l| *l > p.y)
        .collect();
    above.sort_by(|a, b| a.total_cmp(b));
    above.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let ceiling = obstacles
        .iter()
        .map(|o| o.panel.top())
        .fold(f64::NEG_INFINITY, f64::max)
        + gap;

    let detour = |level: f64| {
        vec![
            p,
            Point::new(exit.x, level, exit.z),
            Point::new(entry.x, level, entry.z),
            q,
        ]
    };
    let candidates = std::iter::once(vec![p, q])
        .chain(below.into_iter().map(detour))
        .chain(std::iter::once(detour(floor)))
        .chain(above.into_iter().map(detour))
        .chain(std::iter::once(detour(ceiling)));

    let mut fallback = None;
    for line in candidates {
        let (lo, hi) = bounds(&line);
        let nearby: Vec<&Obstacle> = obstacles
            .iter()
            .filter(|o| o.near(&lo, &hi, clearance))
            .collect();
        if !polyline_hits(nearby.iter().map(|o| &o.panel), &line) {
            if clears(&nearby, exempt, &line, clearance) {
                return Some(line);
            }
            fallback.get_or_insert(line);
        }
    }
    fallback
}

fn clears(obstacles: &[&Obstacle], exempt: &[CellId], line: &[Point], clearance: f64) -> bool {
    obstacles
        .iter()
        .filter(|o| !exempt.contains(&o.id))
        .all(|o| {
            line.windows(2)
                .all(|s| o.panel.segment_distance(&s[0], &s[1]) >= clearance - 1e-12)
        })
}

/// True when any segment of `line` passes through a panel interior.
pub fn polyline_hits<'a>(panels: impl IntoIterator<Item = &'a Panel>, line: &[Point]) -> bool {
    panels.into_iter().any(|panel| {
        line.windows(2)
            .any(|s| panel.segment_hits_interior(&s[0], &s[1]))
    })
}
