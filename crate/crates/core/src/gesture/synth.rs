//! Synthetic hand traces: a small builder plus the canonical trace for each
//! of the eight composition gestures. Used by tests, examples and anyone
//! who wants to drive the interpreter without a headset.

use nalgebra::{UnitQuaternion, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::geom::{Point, Vector};
use crate::model::{CellId, Workspace};

use super::{GestureThresholds, Hand, HandPoseEvent};

/// Sampling period of generated traces (ms).
pub const DT: f64 = 20.0;
/// Speed of unhurried hand repositioning (m/s), well under swipe speed.
const CRUISE: f64 = 0.5;
/// Distance from the user at which selection pinches happen (m).
const REACH: f64 = 0.6;

#[derive(Debug, Clone, Copy)]
struct HandPose {
    position: Point,
    rotation: UnitQuaternion<f64>,
    grip: f64,
    pinch: f64,
}

/// Emits both hands every [`DT`] ms. Gaussian noise, when enabled, is
/// added to the emitted positions only, so the underlying motion stays
/// exact.
pub struct TraceBuilder {
    t: f64,
    hands: [HandPose; 2],
    events: Vec<HandPoseEvent>,
    noise: Option<(ChaCha8Rng, Normal<f64>)>,
}

impl TraceBuilder {
    pub fn new(left: Point, right: Point) -> Self {
        let pose = |position| HandPose {
            position,
            rotation: UnitQuaternion::identity(),
            grip: 0.0,
            pinch: 0.0,
        };
        TraceBuilder {
            t: 0.0,
            hands: [pose(left), pose(right)],
            events: Vec::new(),
            noise: None,
        }
    }

    pub fn with_noise(mut self, sigma: f64, seed: u64) -> Self {
        if sigma > 0.0 {
            let normal = Normal::new(0.0, sigma).expect("sigma is positive and finite");
            self.noise = Some((ChaCha8Rng::seed_from_u64(seed), normal));
        }
        self
    }

    pub fn position(&self, hand: Hand) -> Point {
        self.hands[hand.index()].position
    }

    /// Emits one sample per hand and advances the clock.
    pub fn tick(&mut self) {
        for hand in [Hand::Left, Hand::Right] {
            let h = self.hands[hand.index()];
            let mut position = h.position;
            if let Some((rng, normal)) = self.noise.as_mut() {
                position += Vector::new(normal.sample(rng), normal.sample(rng), normal.sample(rng));
            }
            let q = h.rotation.quaternion();
            self.events.push(HandPoseEvent {
                t: self.t,
                hand,
                position,
                orientation: [q.i, q.j, q.k, q.w],
                grip: h.grip,
                pinch: h.pinch,
            });
        }
        self.t += DT;
    }

    pub fn hold(&mut self, ms: f64) {
        for _ in 0..(ms / DT).round() as usize {
            self.tick();
        }
    }

    pub fn set_grip(&mut self, hand: Hand, grip: f64) {
        self.hands[hand.index()].grip = grip;
    }

    pub fn set_pinch(&mut self, hand: Hand, pinch: f64) {
        self.hands[hand.index()].pinch = pinch;
    }

    /// Moves both hands along `left(f)` / `right(f)` for f in (0, 1] over
    /// `ms`, one sample per tick.
    pub fn motion(&mut self, ms: f64, left: impl Fn(f64) -> Point, right: impl Fn(f64) -> Point) {
        let steps = ((ms / DT).round() as usize).max(1);
        for i in 1..=steps {
            let f = i as f64 / steps as f64;
            self.hands[0].position = left(f);
            self.hands[1].position = right(f);
            self.tick();
        }
    }

    /// Moves one hand along `path(f)` over `ms`; the other stays put.
    pub fn path(&mut self, hand: Hand, ms: f64, path: impl Fn(f64) -> Point) {
        let other = self.hands[1 - hand.index()].position;
        match hand {
            Hand::Left => self.motion(ms, path, |_| other),
            Hand::Right => self.motion(ms, |_| other, path),
        }
    }

    /// Straight move at `speed` m/s.
    pub fn move_to(&mut self, hand: Hand, to: Point, speed: f64) {
        let from = self.position(hand);
        let ms = (to - from).norm() / speed * 1000.0;
        if ms > 0.0 {
            self.path(hand, ms.max(DT), move |f| from + (to - from) * f);
        }
    }

    /// Unhurried straight move.
    pub fn travel(&mut self, hand: Hand, to: Point) {
        self.move_to(hand, to, CRUISE);
    }

    /// Turns a hand by `angle` radians about `axis` over `ms`.
    pub fn rotate(&mut self, hand: Hand, axis: Vector3<f64>, angle: f64, ms: f64) {
        let steps = ((ms / DT).round() as usize).max(1);
        let start = self.hands[hand.index()].rotation;
        let axis = nalgebra::Unit::new_normalize(axis);
        for i in 1..=steps {
            let f = i as f64 / steps as f64;
            self.hands[hand.index()].rotation =
                UnitQuaternion::from_axis_angle(&axis, angle * f) * start;
            self.tick();
        }
    }

    /// A pinch held for `ms` at the hand's current position.
    pub fn pinch(&mut self, hand: Hand, ms: f64) {
        self.set_pinch(hand, 1.0);
        self.hold(ms);
        self.set_pinch(hand, 0.0);
        self.tick();
    }

    pub fn finish(mut self) -> Vec<HandPoseEvent> {
        self.tick();
        self.events
    }
}

/// The eight composition gestures, each in its textbook form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Canonical {
    /// Two hands pull the proxy apart horizontally: linear.
    PullApart,
    /// One hand drags the proxy down and to the side: grid with `rows`.
    Diagonal { rows: usize },
    /// One hand pulls away from the proxy: parallel tree.
    OneHandPull,
    /// One hand circles the proxy 300°: loop.
    Sweep,
    /// Two hands squeeze the proxy: fold.
    Squeeze,
    /// One hand pushes into the proxy: pile.
    Pile,
    /// Grab a selected cell and pull it toward the body: layer.
    FollowMe,
    /// Grab a selected cell and push it away: layer, away.
    GoAway,
    /// Open-hand lateral flick across a structure: cluster cycle.
    Swipe,
    /// Grip the proxy and turn the wrist a quarter turn: orientation swap
    /// on a selected grid or tree.
    Turn,
}

impl Canonical {
    pub const EIGHT: [Canonical; 8] = [
        Canonical::PullApart,
        Canonical::Diagonal { rows: 5 },
        Canonical::OneHandPull,
        Canonical::Sweep,
        Canonical::Squeeze,
        Canonical::Pile,
        Canonical::FollowMe,
        Canonical::Swipe,
    ];
}

fn toward(w: &Workspace, cell: CellId, distance: f64) -> Point {
    let target = w
        .cell(cell)
        .map(|c| c.pose.position)
        .unwrap_or(Point::new(0.0, 0.0, -1.0));
    let d = target - w.user_position;
    w.user_position + d / d.norm() * distance
}

/// Resting hand positions: low and in front of the user.
pub fn rest(w: &Workspace) -> (Point, Point) {
    let u = w.user_position;
    (
        u + Vector::new(-0.25, -0.35, -0.3),
        u + Vector::new(0.25, -0.35, -0.3),
    )
}

/// Right-hand pinches over each cell in turn. Returns the spot of the
/// first pinch, where the Proxy Window opens.
pub fn select(b: &mut TraceBuilder, w: &Workspace, cells: &[CellId]) -> Option<Point> {
    let mut first = None;
    for c in cells {
        let spot = toward(w, *c, REACH);
        b.travel(Hand::Right, spot);
        b.pinch(Hand::Right, 60.0);
        first.get_or_insert(spot);
    }
    first
}

/// Appends gesture `g` performed on a Proxy Window centered at `proxy`.
/// `cell` is the selected cell a depth pull grabs, or for a swipe a member
/// of the structure to cross.
pub fn perform(
    b: &mut TraceBuilder,
    w: &Workspace,
    g: Canonical,
    proxy: Point,
    cell: CellId,
    th: &GestureThresholds,
) {
    let x = Vector::x();
    let y = Vector::y();
    match g {
        Canonical::PullApart => {
            b.travel(Hand::Left, proxy - x * 0.05);
            b.travel(Hand::Right, proxy + x * 0.05);
            b.set_grip(Hand::Right, 1.0);
            b.tick();
            b.set_grip(Hand::Left, 1.0);
            b.tick();
            b.motion(
                600.0,
                |f| proxy - x * (0.05 + 0.175 * f),
                |f| proxy + x * (0.05 + 0.175 * f),
            );
        }
        Canonical::Diagonal { rows } => {
            let dy = rows as f64 * th.row_step;
            b.travel(Hand::Right, proxy);
            b.set_grip(Hand::Right, 1.0);
            b.tick();
            b.path(Hand::Right, 600.0, |f| {
                proxy + (x * dy.max(0.3) - y * dy) * f
            });
        }
        Canonical::OneHandPull => {
            let start = proxy + x * 0.02;
            b.travel(Hand::Right, start);
            b.set_grip(Hand::Right, 1.0);
            b.tick();
            b.path(Hand::Right, 500.0, |f| start + x * (0.35 * f));
        }
        Canonical::Sweep => {
            let r = 0.15;
            let at = move |deg: f64| {
                let a = deg.to_radians();
                proxy + x * (r * a.cos()) + y * (r * a.sin())
            };
            b.travel(Hand::Right, at(0.0));
            b.set_grip(Hand::Right, 1.0);
            b.tick();
            b.path(Hand::Right, 900.0, |f| at(-300.0 * f));
        }
        Canonical::Squeeze => {
            b.travel(Hand::Left, proxy - x * 0.15);
            b.travel(Hand::Right, proxy + x * 0.15);
            b.set_grip(Hand::Right, 1.0);
            b.tick();
            b.set_grip(Hand::Left, 1.0);
            b.tick();
            b.motion(
                500.0,
                |f| proxy - x * (0.15 - 0.11 * f),
                |f| proxy + x * (0.15 - 0.11 * f),
            );
        }
        Canonical::Pile => {
            let start = proxy + x * 0.27;
            b.travel(Hand::Right, start);
            b.set_grip(Hand::Right, 1.0);
            b.tick();
            b.path(Hand::Right, 500.0, |f| start - x * (0.25 * f));
        }
        Canonical::FollowMe | Canonical::GoAway => {
            let start = toward(w, cell, 2.0 * REACH);
            let back = (w.user_position - start).normalize();
            let sign = if g == Canonical::FollowMe { 1.0 } else { -1.0 };
            b.travel(Hand::Right, start);
            b.set_grip(Hand::Right, 1.0);
            b.tick();
            b.path(Hand::Right, 500.0, |f| start + back * (sign * 0.4 * f));
        }
        Canonical::Swipe => {
            let mid = toward(w, cell, REACH);
            let across = {
                let d = mid - w.user_position;
                Vector::new(-d.z, 0.0, d.x).normalize()
            };
            b.travel(Hand::Right, mid - across * 0.2);
            b.hold(100.0);
            b.move_to(Hand::Right, mid + across * 0.2, 2.0);
            b.hold(100.0);
            return;
        }
        Canonical::Turn => {
            b.travel(Hand::Right, proxy);
            b.set_grip(Hand::Right, 1.0);
            b.tick();
            b.rotate(Hand::Right, Vector::z(), std::f64::consts::FRAC_PI_2, 400.0);
        }
    }
    b.set_grip(Hand::Left, 0.0);
    b.set_grip(Hand::Right, 0.0);
    b.tick();
    b.hold(100.0);
}

/// Full trace: select `selection`, then perform `g`. For a swipe nothing is
/// selected and `selection[0]` names a cell of the structure to cross.
pub fn canonical_trace(
    w: &Workspace,
    g: Canonical,
    selection: &[CellId],
    th: &GestureThresholds,
    noise: Option<(f64, u64)>,
) -> Vec<HandPoseEvent> {
    let (l, r) = rest(w);
    let mut b = TraceBuilder::new(l, r);
    if let Some((sigma, seed)) = noise {
        b = b.with_noise(sigma, seed);
    }
    b.hold(100.0);
    let target = selection.last().copied().unwrap_or(CellId(0));
    let proxy = if g == Canonical::Swipe {
        Point::origin()
    } else {
        select(&mut b, w, selection).unwrap_or(Point::origin())
    };
    let cell = if g == Canonical::Swipe {
        selection.first().copied().unwrap_or(target)
    } else {
        target
    };
    perform(&mut b, w, g, proxy, cell, th);
    b.finish()
}
