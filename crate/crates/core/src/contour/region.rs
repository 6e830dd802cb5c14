use crate::geometry::{angular_distance, normalize_angle, point_arc_distance, Arc, Point};

use super::ContourError;

/// Golden-angle sequence of ray directions; deterministic and quickly
/// escapes any single degenerate alignment.
const GOLDEN_ANGLE: f64 = 2.399963229728653;
const MAX_DIRECTIONS: usize = 64;

/// Parity ray casting against a closed curve of circle arcs.
///
/// Directions that graze an arc tangentially or pass too close to an arc
/// endpoint are discarded and the ray is re-aimed. Points within `tol` of
/// the curve are reported as [`ContourError::OnBoundary`].
pub(crate) fn curve_contains(
    arcs: &[Arc],
    epsilon: f64,
    p: Point,
    tol: f64,
) -> Result<bool, ContourError> {
    for arc in arcs {
        if point_arc_distance(p, arc, epsilon) <= tol {
            return Err(ContourError::OnBoundary);
        }
    }
    'directions: for k in 0..MAX_DIRECTIONS {
        let dir = 0.1234567 + k as f64 * GOLDEN_ANGLE;
        let u = (dir.cos(), dir.sin());
        let mut crossings = 0usize;
        for arc in arcs {
            let c = arc.center.coords(epsilon);
            let rel = (p.x - c.x, p.y - c.y);
            let b = u.0 * rel.0 + u.1 * rel.1;
            let c0 = rel.0 * rel.0 + rel.1 * rel.1 - arc.radius * arc.radius;
            let disc = b * b - c0;
            if disc <= 0.0 {
                continue;
            }
            let half_chord = disc.sqrt();
            // Tangential grazing: the chord the ray cuts is too short to
            // classify reliably.
            if half_chord < 1e3 * tol {
                continue 'directions;
            }
            let angular_margin = 1e3 * tol / arc.radius;
            for t in [-b - half_chord, -b + half_chord] {
                if t <= tol {
                    continue;
                }
                let q = Point::new(p.x + t * u.0, p.y + t * u.1);
                let theta = normalize_angle((q.y - c.y).atan2(q.x - c.x));
                if !arc.is_full_circle() {
                    let near_start = angular_distance(theta, arc.start_angle) < angular_margin;
                    let near_end =
                        angular_distance(theta, arc.start_angle + arc.extent) < angular_margin;
                    if near_start || near_end {
                        continue 'directions;
                    }
                }
                if arc.covers_angle(theta) {
                    crossings += 1;
                }
            }
        }
        return Ok(crossings % 2 == 1);
    }
    Err(ContourError::DegenerateRay)
}

/// Winding-number membership via a dense polygonal approximation of the
/// arcs. Independent route used to cross-check `curve_contains`.
pub fn polygonal_winding_contains(
    arcs: &[Arc],
    epsilon: f64,
    p: Point,
    segments_total: usize,
) -> bool {
    let total_extent: f64 = arcs.iter().map(|a| a.extent).sum();
    let mut polygon: Vec<Point> = Vec::with_capacity(segments_total + arcs.len());
    for arc in arcs {
        let n = ((arc.extent / total_extent) * segments_total as f64).ceil() as usize;
        let n = n.max(2);
        for k in 0..n {
            let theta = arc.start_angle + arc.extent * k as f64 / n as f64;
            polygon.push(arc.point_at(theta, epsilon));
        }
    }
    let mut winding = 0i64;
    let mut prev = polygon[polygon.len() - 1];
    for &q in &polygon {
        if prev.y <= p.y {
            if q.y > p.y && cross(prev, q, p) > 0.0 {
                winding += 1;
            }
        } else if q.y <= p.y && cross(prev, q, p) < 0.0 {
            winding -= 1;
        }
        prev = q;
    }
    winding != 0
}

fn cross(a: Point, b: Point, p: Point) -> f64 {
    (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GridPoint;

    #[test]
    fn single_circle_membership() {
        let arcs = vec![Arc::full_circle(GridPoint::new(0, 0), 1.0)];
        let eps = 0.1;
        assert!(curve_contains(&arcs, eps, Point::new(0.3, 0.2), 1e-9).unwrap());
        assert!(!curve_contains(&arcs, eps, Point::new(2.0, 0.0), 1e-9).unwrap());
        assert!(matches!(
            curve_contains(&arcs, eps, Point::new(1.0, 0.0), 1e-9),
            Err(ContourError::OnBoundary)
        ));
    }

    #[test]
    fn agrees_with_winding_oracle() {
        use crate::geometry::disk_union_boundary;
        let eps = 0.1;
        let rho = 1.3;
        let centers = [
            GridPoint::new(0, 0),
            GridPoint::new(14, 3),
            GridPoint::new(7, 14),
            GridPoint::new(-8, 8),
        ];
        let curves = disk_union_boundary(&centers, eps, rho, 1e-9).unwrap();
        let outer = crate::geometry::outer_curve_index(&curves, eps);
        let arcs = &curves[outer];
        let mut state = 5u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut agreements = 0;
        for _ in 0..2000 {
            let p = Point::new(next() * 8.0 - 4.0, next() * 8.0 - 4.0);
            match curve_contains(arcs, eps, p, 1e-9) {
                Ok(inside) => {
                    let oracle = polygonal_winding_contains(arcs, eps, p, 10_000);
                    assert_eq!(inside, oracle, "disagreement at {p:?}");
                    agreements += 1;
                }
                Err(ContourError::OnBoundary) => {}
                Err(e) => panic!("unexpected: {e}"),
            }
        }
        assert!(agreements > 1900);
    }
}
