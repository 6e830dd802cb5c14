//! Planar geometry primitives: points, model parameters, grid snapping,
//! hard-core tests, cell-list neighbor search, and disk-union boundaries.

mod arcs;
mod cell_index;
mod union_boundary;

pub use arcs::{
    angle_in_interval, angular_distance, normalize_angle, point_arc_distance, Arc, TAU,
};
pub use cell_index::CellIndex;
pub use union_boundary::{
    curve_total_turning, disk_union_boundary, outer_curve_index, GeometryError,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A point in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist_sq(&self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn dist(&self, other: Point) -> f64 {
        self.dist_sq(other).sqrt()
    }

    /// Euclidean norm, i.e. distance to the origin.
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y).sqrt()
    }

    pub fn offset(&self, dx: f64, dy: f64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }
}

/// A site of the square grid with pitch `epsilon`; the site `(i, j)` sits
/// at coordinates `(epsilon * i, epsilon * j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridPoint {
    pub i: i64,
    pub j: i64,
}

impl GridPoint {
    pub fn new(i: i64, j: i64) -> Self {
        GridPoint { i, j }
    }

    pub fn coords(&self, epsilon: f64) -> Point {
        Point::new(self.i as f64 * epsilon, self.j as f64 * epsilon)
    }
}

/// Snap a point to the grid of pitch `epsilon` by the half-open rule: the
/// cell of site `(i, j)` is `[εi − ε/2, εi + ε/2) × [εj − ε/2, εj + ε/2)`.
///
/// The snapped site is within `epsilon` of the input (in fact within
/// `epsilon / sqrt(2)`).
pub fn snap_to_grid(p: Point, epsilon: f64) -> GridPoint {
    debug_assert!(epsilon > 0.0);
    GridPoint {
        i: (p.x / epsilon + 0.5).floor() as i64,
        j: (p.y / epsilon + 0.5).floor() as i64,
    }
}

/// Model parameters. Invariants are enforced by [`ModelParams::new`]:
///
/// - `r > 0`, activity `z >= 0`, `box_half_width > 0`
/// - `connection_diameter > 3r`
/// - `0 < delta < r/2` and `0 < epsilon < delta/2`
/// - `3r + 2·delta + 2·epsilon < connection_diameter`
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ModelParams {
    /// Hard-core radius; pairwise point distances are at least `2r`.
    pub r: f64,
    /// Connection diameter `L`: points within `L` of one another are linked.
    pub connection_diameter: f64,
    /// Contour margin `delta`.
    pub delta: f64,
    /// Grid pitch `epsilon`.
    pub epsilon: f64,
    /// Activity `z` weighting configurations by `z^N`.
    pub z: f64,
    /// Half-width `n` of the box `[-n, n]^2`.
    pub box_half_width: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamsError {
    #[error("invalid parameters: {0}")]
    Invalid(String),
}

impl ModelParams {
    pub fn new(
        r: f64,
        connection_diameter: f64,
        delta: f64,
        epsilon: f64,
        z: f64,
        box_half_width: f64,
    ) -> Result<Self, ParamsError> {
        let p = ModelParams {
            r,
            connection_diameter,
            delta,
            epsilon,
            z,
            box_half_width,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        let fail = |msg: String| Err(ParamsError::Invalid(msg));
        for (name, v) in [
            ("r", self.r),
            ("connection_diameter", self.connection_diameter),
            ("delta", self.delta),
            ("epsilon", self.epsilon),
            ("z", self.z),
            ("box_half_width", self.box_half_width),
        ] {
            if !v.is_finite() {
                return fail(format!("{name} must be finite, got {v}"));
            }
        }
        if self.r <= 0.0 {
            return fail(format!("requires r > 0, got r = {}", self.r));
        }
        if self.connection_diameter <= 3.0 * self.r {
            return fail(format!(
                "requires L > 3r, got L = {}, 3r = {}",
                self.connection_diameter,
                3.0 * self.r
            ));
        }
        if !(self.delta > 0.0 && self.delta < self.r / 2.0) {
            return fail(format!(
                "requires 0 < delta < r/2, got delta = {}, r/2 = {}",
                self.delta,
                self.r / 2.0
            ));
        }
        if !(self.epsilon > 0.0 && self.epsilon < self.delta / 2.0) {
            return fail(format!(
                "requires 0 < epsilon < delta/2, got epsilon = {}, delta/2 = {}",
                self.epsilon,
                self.delta / 2.0
            ));
        }
        let lhs = 3.0 * self.r + 2.0 * self.delta + 2.0 * self.epsilon;
        if lhs >= self.connection_diameter {
            return fail(format!(
                "requires 3r + 2 delta + 2 epsilon < L, got {} >= {}",
                lhs, self.connection_diameter
            ));
        }
        if self.z < 0.0 {
            return fail(format!("requires z >= 0, got z = {}", self.z));
        }
        if self.box_half_width <= 0.0 {
            return fail(format!(
                "requires box_half_width > 0, got {}",
                self.box_half_width
            ));
        }
        Ok(())
    }

    /// Component radius `R = delta + 3r/2`: components are read off the
    /// overlap graph of radius-`R` disks around snapped centers.
    pub fn component_radius(&self) -> f64 {
        self.delta + 1.5 * self.r
    }

    /// Contour radius `delta + 2r`: contours are boundaries of unions of
    /// disks of this radius around snapped centers.
    pub fn contour_radius(&self) -> f64 {
        self.delta + 2.0 * self.r
    }

    /// Side length of the box.
    pub fn box_side(&self) -> f64 {
        2.0 * self.box_half_width
    }

    /// Area of the box, the reference Lebesgue mass for one point.
    pub fn box_area(&self) -> f64 {
        self.box_side() * self.box_side()
    }

    pub fn in_box(&self, p: Point) -> bool {
        p.x.abs() <= self.box_half_width && p.y.abs() <= self.box_half_width
    }

    /// Geometric tolerance for endpoint matching and tangency detection.
    pub fn tol_geom(&self) -> f64 {
        1e-9 * self.r.max(1.0)
    }
}

/// True iff every pair of distinct points is at distance `>= 2r`
/// (closed-ball convention: exactly `2r` is allowed).
///
/// Uses a cell list, so typical cost is linear in the number of points.
pub fn is_hard_core(points: &[Point], r: f64) -> bool {
    debug_assert!(r > 0.0);
    let exclusion = 2.0 * r;
    let index = CellIndex::build(exclusion, points);
    let threshold = exclusion * exclusion;
    for (id, &p) in points.iter().enumerate() {
        let mut ok = true;
        index.for_each_within(p, exclusion, |other, d2| {
            if other != id && d2 < threshold {
                ok = false;
            }
        });
        if !ok {
            return false;
        }
    }
    true
}
