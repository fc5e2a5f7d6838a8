//! Poses, panel rectangles and the handful of geometric predicates the
//! layout engine and router rely on.
//!
//! World frame: right-handed, +y up. A structure's local frame has x to the
//! viewer's right, y up and a depth coordinate that grows away from the
//! viewer; [`Pose::to_world`] maps local `(x, y, depth)` into world space.
//! A cell with yaw 0 faces +z, so a cell straight ahead of a user at the
//! origin sits at negative z with yaw 0.

use std::f64::consts::PI;

use nalgebra::{Point3, Rotation3, Vector3};
use serde::{Deserialize, Serialize};

pub type Point = Point3<f64>;
pub type Vector = Vector3<f64>;

/// Tolerance used for "strictly inside" and coplanarity tests.
pub const EPS: f64 = 1e-9;

/// Wraps an angle into (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a % (2.0 * PI);
    if r <= -PI {
        r += 2.0 * PI;
    } else if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// Position plus rotation about +y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: Point,
    pub yaw: f64,
}

impl Default for Pose {
    fn default() -> Self {
        Pose::identity()
    }
}

impl Pose {
    pub fn identity() -> Self {
        Pose {
            position: Point::origin(),
            yaw: 0.0,
        }
    }

    pub fn new(position: Point, yaw: f64) -> Self {
        Pose {
            position,
            yaw: wrap_angle(yaw),
        }
    }

    /// Pose at `position` whose front normal points horizontally at `target`.
    pub fn facing(position: Point, target: &Point) -> Self {
        let d = target - position;
        let yaw = if d.x.abs() < EPS && d.z.abs() < EPS {
            0.0
        } else {
            d.x.atan2(d.z)
        };
        Pose::new(position, yaw)
    }

    pub fn rotation(&self) -> Rotation3<f64> {
        Rotation3::from_axis_angle(&Vector::y_axis(), self.yaw)
    }

    /// Viewer-right axis of the frame.
    pub fn right(&self) -> Vector {
        self.rotation() * Vector::x()
    }

    /// Front normal (points at the viewer).
    pub fn normal(&self) -> Vector {
        self.rotation() * Vector::z()
    }

    /// Maps local `(x, y, depth)` to world coordinates.
    pub fn to_world(&self, x: f64, y: f64, depth: f64) -> Point {
        self.position + self.rotation() * Vector::new(x, y, -depth)
    }

    /// Inverse of [`Pose::to_world`]: returns local `(x, y, depth)`.
    pub fn to_local(&self, p: &Point) -> Vector {
        let v = self.rotation().inverse() * (p - self.position);
        Vector::new(v.x, v.y, -v.z)
    }

    /// Composes a pose expressed in this frame.
    pub fn compose(&self, local: &LocalPose) -> Pose {
        Pose::new(
            self.to_world(local.x, local.y, local.depth),
            self.yaw + local.yaw,
        )
    }

    pub fn is_finite(&self) -> bool {
        self.position.iter().all(|c| c.is_finite()) && self.yaw.is_finite()
    }

    pub fn translated(&self, by: &Vector) -> Pose {
        Pose {
            position: self.position + by,
            yaw: self.yaw,
        }
    }
}

/// A pose inside a structure frame, before the anchor is applied.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LocalPose {
    pub x: f64,
    pub y: f64,
    pub depth: f64,
    pub yaw: f64,
}

impl LocalPose {
    pub fn at(x: f64, y: f64) -> Self {
        LocalPose {
            x,
            y,
            ..Default::default()
        }
    }
}

/// A flat rectangular panel: the physical footprint of a cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub pose: Pose,
    pub width: f64,
    pub height: f64,
}

impl Panel {
    pub fn new(pose: Pose, width: f64, height: f64) -> Self {
        Panel {
            pose,
            width,
            height,
        }
    }

    /// Local (x, y, normal-offset) of a world point.
    fn local(&self, p: &Point) -> Vector {
        self.pose.rotation().inverse() * (p - self.pose.position)
    }

    pub fn right_edge_mid(&self) -> Point {
        self.pose.to_world(self.width / 2.0, 0.0, 0.0)
    }

    pub fn left_edge_mid(&self) -> Point {
        self.pose.to_world(-self.width / 2.0, 0.0, 0.0)
    }

    pub fn corners(&self) -> [Point; 4] {
        let (hw, hh) = (self.width / 2.0, self.height / 2.0);
        [
            self.pose.to_world(-hw, -hh, 0.0),
            self.pose.to_world(hw, -hh, 0.0),
            self.pose.to_world(hw, hh, 0.0),
            self.pose.to_world(-hw, hh, 0.0),
        ]
    }

    /// Lowest world y of the panel.
    pub fn bottom(&self) -> f64 {
        self.pose.position.y - self.height / 2.0
    }

    pub fn top(&self) -> f64 {
        self.pose.position.y + self.height / 2.0
    }

    /// Distance from a point to the panel's boundary outline.
    pub fn boundary_distance(&self, p: &Point) -> f64 {
        let l = self.local(p);
        let (hw, hh) = (self.width / 2.0, self.height / 2.0);
        // nearest point on the rectangle outline in the panel plane
        let inside = l.x.abs() <= hw && l.y.abs() <= hh;
        let planar = if inside {
            (hw - l.x.abs()).min(hh - l.y.abs())
        } else {
            let dx = (l.x.abs() - hw).max(0.0);
            let dy = (l.y.abs() - hh).max(0.0);
            (dx * dx + dy * dy).sqrt()
        };
        (planar * planar + l.z * l.z).sqrt()
    }

    /// Whether the segment `a..b` passes through the open interior of the
    /// panel. Touching the outline does not count.
    pub fn segment_hits_interior(&self, a: &Point, b: &Point) -> bool {
        let la = self.local(a);
        let lb = self.local(b);
        let (hw, hh) = (self.width / 2.0 - EPS, self.height / 2.0 - EPS);
        if hw <= 0.0 || hh <= 0.0 {
            return false;
        }
        let inside = |x: f64, y: f64| x.abs() < hw && y.abs() < hh;
        let a_on = la.z.abs() <= EPS;
        let b_on = lb.z.abs() <= EPS;
        match (a_on, b_on) {
            (true, true) => clip_open_rect(la.x, la.y, lb.x, lb.y, hw, hh),
            (true, false) => inside(la.x, la.y),
            (false, true) => inside(lb.x, lb.y),
            (false, false) => {
                if la.z.signum() == lb.z.signum() {
                    return false;
                }
                let t = la.z / (la.z - lb.z);
                let x = la.x + t * (lb.x - la.x);
                let y = la.y + t * (lb.y - la.y);
                inside(x, y)
            }
        }
    }

    /// Distance along the ray `origin + t·dir` (t > 0) at which it meets
    /// the closed panel rectangle.
    pub fn ray_hit(&self, origin: &Point, dir: &Vector) -> Option<f64> {
        let lo = self.local(origin);
        let ld = self.pose.rotation().inverse() * dir;
        if ld.z.abs() < 1e-300 {
            return None;
        }
        let t = -lo.z / ld.z;
        if t <= 0.0 {
            return None;
        }
        let x = lo.x + t * ld.x;
        let y = lo.y + t * ld.y;
        (x.abs() <= self.width / 2.0 && y.abs() <= self.height / 2.0).then_some(t)
    }

    /// Distance from a point to the closed panel.
    pub fn point_distance(&self, p: &Point) -> f64 {
        self.segment_distance(p, p)
    }

    /// Minimum distance between the segment `a..b` and the (closed) panel.
    pub fn segment_distance(&self, a: &Point, b: &Point) -> f64 {
        let la = self.local(a);
        let lb = self.local(b);
        let (hw, hh) = (self.width / 2.0, self.height / 2.0);
        // crossing the plane inside the closed rectangle
        if la.z.signum() != lb.z.signum() || la.z == 0.0 || lb.z == 0.0 {
            let denom = la.z - lb.z;
            let t = if denom.abs() < 1e-300 {
                0.0
            } else {
                la.z / denom
            };
            if (0.0..=1.0).contains(&t) {
                let x = la.x + t * (lb.x - la.x);
                let y = la.y + t * (lb.y - la.y);
                if x.abs() <= hw && y.abs() <= hh {
                    return 0.0;
                }
            }
        }
        let point_rect = |p: &Vector| {
            let dx = (p.x.abs() - hw).max(0.0);
            let dy = (p.y.abs() - hh).max(0.0);
            (dx * dx + dy * dy + p.z * p.z).sqrt()
        };
        let mut best = point_rect(&la).min(point_rect(&lb));
        let c = [
            Vector::new(-hw, -hh, 0.0),
            Vector::new(hw, -hh, 0.0),
            Vector::new(hw, hh, 0.0),
            Vector::new(-hw, hh, 0.0),
        ];
        for i in 0..4 {
            best = best.min(segment_segment_distance(&la, &lb, &c[i], &c[(i + 1) % 4]));
        }
        best
    }

    /// Coplanar clearance violation: both panels lie in (nearly) the same
    /// plane and their rectangles come closer than `clearance` in it.
    pub fn coplanar_overlap(&self, other: &Panel, clearance: f64) -> bool {
        if wrap_angle(self.pose.yaw - other.pose.yaw).abs() > 1e-9 {
            return false;
        }
        let l = self.local(&other.pose.position);
        if l.z.abs() >= clearance {
            return false;
        }
        let gap_x = l.x.abs() - (self.width + other.width) / 2.0;
        let gap_y = l.y.abs() - (self.height + other.height) / 2.0;
        gap_x < clearance - EPS && gap_y < clearance - EPS
    }
}

/// Liang–Barsky clip of a 2D segment against an open axis-aligned box.
fn clip_open_rect(x0: f64, y0: f64, x1: f64, y1: f64, hw: f64, hh: f64) -> bool {
    let (dx, dy) = (x1 - x0, y1 - y0);
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    for (p, q) in [(-dx, x0 + hw), (dx, hw - x0), (-dy, y0 + hh), (dy, hh - y0)] {
        if p.abs() < 1e-300 {
            if q <= 0.0 {
                return false;
            }
            continue;
        }
        let r = q / p;
        if p < 0.0 {
            t0 = t0.max(r);
        } else {
            t1 = t1.min(r);
        }
        if t0 > t1 {
            return false;
        }
    }
    // an interval of positive length, or a single point strictly inside
    t0 < t1 || {
        let x = x0 + t0 * dx;
        let y = y0 + t0 * dy;
        x.abs() < hw && y.abs() < hh
    }
}

/// Distance between segments `p0..p1` and `q0..q1`.
pub fn segment_segment_distance(p0: &Vector, p1: &Vector, q0: &Vector, q1: &Vector) -> f64 {
    let d1 = p1 - p0;
    let d2 = q1 - q0;
    let r = p0 - q0;
    let a = d1.dot(&d1);
    let e = d2.dot(&d2);
    let f = d2.dot(&r);
    let (s, t);
    if a <= 1e-300 && e <= 1e-300 {
        return r.norm();
    }
    if a <= 1e-300 {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= 1e-300 {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 1e-300 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    ((p0 + d1 * s) - (q0 + d2 * t)).norm()
}

pub fn centroid<'a>(points: impl IntoIterator<Item = &'a Point>) -> Option<Point> {
    let mut sum = Vector::zeros();
    let mut n = 0usize;
    for p in points {
        sum += p.coords;
        n += 1;
    }
    (n > 0).then(|| Point::from(sum / n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn panel_at(x: f64, y: f64) -> Panel {
        Panel::new(Pose::new(Point::new(x, y, 0.0), 0.0), 0.4, 0.3)
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert_eq!(wrap_angle(0.25), 0.25);
    }

    #[test]
    fn facing_origin_from_ahead_and_right() {
        let ahead = Pose::facing(Point::new(0.0, 0.0, -2.5), &Point::origin());
        assert!(ahead.yaw.abs() < 1e-12);
        let right = Pose::facing(Point::new(2.5, 0.0, 0.0), &Point::origin());
        assert!((right.yaw + PI / 2.0).abs() < 1e-12);
        // the viewer-right axis of the right-hand panel points to +z
        assert!((right.right() - Vector::z()).norm() < 1e-12);
    }

    #[test]
    fn local_world_round_trip() {
        let p = Pose::new(Point::new(1.0, 2.0, -3.0), 0.7);
        let w = p.to_world(0.3, -0.2, 0.5);
        let l = p.to_local(&w);
        assert!((l - Vector::new(0.3, -0.2, 0.5)).norm() < 1e-12);
    }

    #[test]
    fn depth_points_away_from_viewer() {
        let p = Pose::identity();
        // yaw 0 faces +z, so moving away from the viewer is −z
        assert!((p.to_world(0.0, 0.0, 1.0) - Point::new(0.0, 0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn segment_crossing_panel_interior() {
        let p = panel_at(0.0, 0.0);
        assert!(p.segment_hits_interior(&Point::new(0.0, 0.0, 1.0), &Point::new(0.0, 0.0, -1.0)));
        assert!(!p.segment_hits_interior(&Point::new(0.5, 0.0, 1.0), &Point::new(0.5, 0.0, -1.0)));
        // coplanar pass straight through
        assert!(p.segment_hits_interior(&Point::new(-1.0, 0.0, 0.0), &Point::new(1.0, 0.0, 0.0)));
        // coplanar, ends on the edge
        assert!(!p.segment_hits_interior(&Point::new(0.2, 0.0, 0.0), &Point::new(1.0, 0.0, 0.0)));
        // grazing along the outline
        assert!(!p.segment_hits_interior(&Point::new(-1.0, 0.15, 0.0), &Point::new(1.0, 0.15, 0.0)));
    }

    #[test]
    fn segment_distance_cases() {
        let p = panel_at(0.0, 0.0);
        let d = p.segment_distance(&Point::new(-1.0, 0.2, 0.0), &Point::new(1.0, 0.2, 0.0));
        assert!((d - 0.05).abs() < 1e-12);
        let d = p.segment_distance(&Point::new(0.0, 0.0, 0.3), &Point::new(0.1, 0.0, 0.3));
        assert!((d - 0.3).abs() < 1e-12);
        assert_eq!(
            p.segment_distance(&Point::new(0.0, 0.0, 1.0), &Point::new(0.0, 0.0, -1.0)),
            0.0
        );
    }

    #[test]
    fn coplanar_overlap_respects_clearance() {
        let a = panel_at(0.0, 0.0);
        assert!(a.coplanar_overlap(&panel_at(0.0, 0.0), 0.01));
        assert!(!a.coplanar_overlap(&panel_at(0.45, 0.0), 0.01));
        assert!(a.coplanar_overlap(&panel_at(0.405, 0.0), 0.01));
        let mut rotated = panel_at(0.0, 0.0);
        rotated.pose.yaw = 0.3;
        assert!(!a.coplanar_overlap(&rotated, 0.01));
    }

    #[test]
    fn boundary_distance_on_edge_is_zero() {
        let p = panel_at(1.0, 0.0);
        assert!(p.boundary_distance(&p.left_edge_mid()) < 1e-12);
        assert!((p.boundary_distance(&Point::new(1.0, 0.0, 0.0)) - 0.15).abs() < 1e-12);
    }
}
