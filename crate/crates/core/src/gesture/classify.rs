//! Motion classification for one grab segment on the Proxy Window.
//!
//! Rules are tried in a fixed order and the first match wins: circular
//! sweep, squeeze, pull, diagonal drag, rotation.

use nalgebra::UnitQuaternion;

use crate::geom::Point;

use super::{GestureThresholds, Hand, ProxyWindow};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub position: Point,
    pub rotation: UnitQuaternion<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HandTrack {
    pub hand: Hand,
    pub samples: Vec<Sample>,
}

/// Samples of the hand that started the grab and, if it joined, the other
/// hand, each from its grip onset to the end of the segment.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub primary: HandTrack,
    pub secondary: Option<HandTrack>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GestureKind {
    Circular,
    /// `delta` is the change in hand separation (two hands) or in distance
    /// from the proxy center (one hand); negative here.
    Squeeze {
        two_handed: bool,
        delta: f64,
    },
    /// As for `Squeeze`, but positive.
    Pull {
        two_handed: bool,
        delta: f64,
    },
    /// `dy` is the vertical component of the drag.
    Diagonal {
        dy: f64,
    },
    Rotate,
}

/// Elevation of `v` above the horizontal plane, in degrees.
fn elevation(v: &nalgebra::Vector3<f64>) -> f64 {
    v.y.abs().atan2(v.x.hypot(v.z)).to_degrees()
}

/// Total signed angle (degrees) swept by the track around `center`,
/// measured about the normal of the track's area vector.
pub(crate) fn sweep_degrees(samples: &[Sample], center: &Point) -> f64 {
    let v: Vec<_> = samples.iter().map(|s| s.position - center).collect();
    let area: nalgebra::Vector3<f64> = v.windows(2).map(|w| w[0].cross(&w[1])).sum();
    let norm = area.norm();
    if norm < 1e-12 {
        return 0.0;
    }
    let n = area / norm;
    v.windows(2)
        .map(|w| n.dot(&w[0].cross(&w[1])).atan2(w[0].dot(&w[1])))
        .sum::<f64>()
        .to_degrees()
}

fn position_at(track: &HandTrack, t: f64) -> Option<Point> {
    track
        .samples
        .iter()
        .take_while(|s| s.t <= t)
        .last()
        .or(track.samples.first())
        .map(|s| s.position)
}

pub fn classify_segment(
    segment: &Segment,
    proxy: &ProxyWindow,
    th: &GestureThresholds,
) -> Option<GestureKind> {
    let first = segment.primary.samples.first()?;
    let last = segment.primary.samples.last()?;
    let center = proxy.center;
    let [flat, steep] = th.diag_angle;

    if sweep_degrees(&segment.primary.samples, &center).abs() >= th.sweep_min {
        return Some(GestureKind::Circular);
    }

    let drag = last.position - first.position;
    if let Some(other) = segment.secondary.as_ref().filter(|o| !o.samples.is_empty()) {
        let joined = other.samples[0];
        let start = position_at(&segment.primary, joined.t)?;
        let end_other = other.samples.last()?.position;
        let d0 = (joined.position - start).norm();
        let d1 = (end_other - last.position).norm();
        let delta = d1 - d0;
        if d1 < th.squeeze_max && -delta > th.min_drag / 2.0 {
            return Some(GestureKind::Squeeze {
                two_handed: true,
                delta,
            });
        }
        if delta > th.pull_apart_min && elevation(&(end_other - last.position)) < flat {
            return Some(GestureKind::Pull {
                two_handed: true,
                delta,
            });
        }
    } else {
        let delta = (last.position - center).norm() - (first.position - center).norm();
        if delta < -th.min_drag {
            return Some(GestureKind::Squeeze {
                two_handed: false,
                delta,
            });
        }
        if delta > th.pull_apart_min && elevation(&drag) < flat {
            return Some(GestureKind::Pull {
                two_handed: false,
                delta,
            });
        }
        let e = elevation(&drag);
        if drag.norm() > th.min_drag && (flat..=steep).contains(&e) {
            return Some(GestureKind::Diagonal { dy: drag.y });
        }
    }

    let turned = first.rotation.angle_to(&last.rotation).to_degrees();
    if turned >= th.rotate_toggle && drag.norm() < th.min_drag {
        return Some(GestureKind::Rotate);
    }
    None
}
