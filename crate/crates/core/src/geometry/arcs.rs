use serde::{Deserialize, Serialize};

use super::{GridPoint, Point};

/// One full turn.
pub const TAU: f64 = std::f64::consts::TAU;

/// Normalize an angle to `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let mut t = theta % TAU;
    if t < 0.0 {
        t += TAU;
    }
    // Guard against -0.0 and rounding to exactly TAU.
    if t >= TAU {
        t = 0.0;
    }
    t
}

/// Distance between two angles on the circle, in `[0, π]`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = normalize_angle(a - b);
    d.min(TAU - d)
}

/// True iff `theta` lies in the counterclockwise interval that starts at
/// `start` and extends by `extent` (closed on both ends).
pub fn angle_in_interval(theta: f64, start: f64, extent: f64) -> bool {
    if extent >= TAU {
        return true;
    }
    let rel = normalize_angle(theta - start);
    rel <= extent
}

/// A counterclockwise circle arc. The circle has its center at a grid
/// site and the arc sweeps from `start_angle` by `extent`.
///
/// Invariant: `start_angle` is in `[0, 2π)` and `extent` is in `(0, 2π]`;
/// a full circle is a single arc of extent exactly `2π`. All arcs produced
/// by [`super::disk_union_boundary`] are counterclockwise with respect to
/// their own center (`ccw` is true).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Arc {
    pub center: GridPoint,
    pub radius: f64,
    pub start_angle: f64,
    pub extent: f64,
    pub ccw: bool,
}

impl Arc {
    pub fn full_circle(center: GridPoint, radius: f64) -> Self {
        Arc {
            center,
            radius,
            start_angle: 0.0,
            extent: TAU,
            ccw: true,
        }
    }

    pub fn is_full_circle(&self) -> bool {
        self.extent >= TAU
    }

    pub fn end_angle(&self) -> f64 {
        normalize_angle(self.start_angle + self.extent)
    }

    /// Angle of the arc midpoint. A full circle has no distinguished
    /// midpoint; by convention it is taken at angle `0`.
    pub fn midpoint_angle(&self) -> f64 {
        if self.is_full_circle() {
            0.0
        } else {
            normalize_angle(self.start_angle + 0.5 * self.extent)
        }
    }

    pub fn point_at(&self, theta: f64, epsilon: f64) -> Point {
        let c = self.center.coords(epsilon);
        Point::new(
            c.x + self.radius * theta.cos(),
            c.y + self.radius * theta.sin(),
        )
    }

    pub fn start_point(&self, epsilon: f64) -> Point {
        self.point_at(self.start_angle, epsilon)
    }

    pub fn end_point(&self, epsilon: f64) -> Point {
        self.point_at(self.start_angle + self.extent, epsilon)
    }

    pub fn midpoint(&self, epsilon: f64) -> Point {
        self.point_at(self.midpoint_angle(), epsilon)
    }

    /// Largest y-coordinate attained on the arc.
    pub fn max_y(&self, epsilon: f64) -> f64 {
        let c = self.center.coords(epsilon);
        if angle_in_interval(0.5 * std::f64::consts::PI, self.start_angle, self.extent) {
            c.y + self.radius
        } else {
            self.start_point(epsilon).y.max(self.end_point(epsilon).y)
        }
    }

    /// True iff the angle (about this arc's center) lies on the arc.
    pub fn covers_angle(&self, theta: f64) -> bool {
        angle_in_interval(theta, self.start_angle, self.extent)
    }
}

/// Euclidean distance from `p` to the arc (as a point set).
pub fn point_arc_distance(p: Point, arc: &Arc, epsilon: f64) -> f64 {
    let c = arc.center.coords(epsilon);
    let d = p.dist(c);
    let theta = (p.y - c.y).atan2(p.x - c.x);
    if arc.covers_angle(theta) {
        (d - arc.radius).abs()
    } else {
        p.dist(arc.start_point(epsilon))
            .min(p.dist(arc.end_point(epsilon)))
    }
}
