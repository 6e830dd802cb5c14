use std::collections::HashMap;

use thiserror::Error;

use super::arcs::{normalize_angle, Arc, TAU};
use super::{GridPoint, Point};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    /// Two circles meet at (numerically) a single point, or three circles
    /// pass (numerically) through a common point. The no-tangency
    /// assumption behind contour extraction fails here; callers report the
    /// case instead of perturbing it away.
    #[error("degenerate tangency within tolerance: {0}")]
    DegenerateTangency(String),
    /// Arc endpoints could not be chained into simple closed curves.
    #[error("degenerate arc chain: {0}")]
    DegenerateChain(String),
    #[error("{0}")]
    EmptyInput(String),
}

/// An angular slice of a circle covered by one neighboring disk.
#[derive(Clone, Copy)]
struct Covering {
    start: f64,
    end: f64, // start + extent, extent in (0, π)
}

/// Boundary of the union of equal-radius disks centered at grid sites.
///
/// For each circle, the angular intervals not strictly covered by any
/// other disk are emitted as counterclockwise arcs; arcs are stitched into
/// closed curves by endpoint adjacency. Every boundary point of the union
/// lies on exactly one returned curve. Curves are returned in traversal
/// order: each arc's end point coincides with the next arc's start point
/// within `tol`, cyclically.
pub fn disk_union_boundary(
    centers: &[GridPoint],
    epsilon: f64,
    rho: f64,
    tol: f64,
) -> Result<Vec<Vec<Arc>>, GeometryError> {
    if centers.is_empty() {
        return Err(GeometryError::EmptyInput(
            "disk union of zero centers".into(),
        ));
    }
    assert!(rho > 0.0 && epsilon > 0.0 && tol > 0.0);

    let mut sites: Vec<GridPoint> = centers.to_vec();
    sites.sort();
    sites.dedup();

    let coords: Vec<Point> = sites.iter().map(|g| g.coords(epsilon)).collect();
    let tol_angle = tol / rho;
    let two_rho = 2.0 * rho;

    // Coverage intervals per circle. Component sizes are modest, so the
    // quadratic pair scan is fine here; hot callers pre-filter by distance.
    let mut arcs: Vec<Arc> = Vec::new();
    for (i, &ci) in coords.iter().enumerate() {
        let mut cov: Vec<Covering> = Vec::new();
        for (j, &cj) in coords.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = ci.dist(cj);
            if d >= two_rho + tol {
                continue;
            }
            if (d - two_rho).abs() <= tol {
                return Err(GeometryError::DegenerateTangency(format!(
                    "circles at {:?} and {:?} meet at a single point (d = {d}, 2 rho = {two_rho})",
                    sites[i], sites[j]
                )));
            }
            let phi = (cj.y - ci.y).atan2(cj.x - ci.x);
            let beta = (d / two_rho).acos();
            let start = normalize_angle(phi - beta);
            cov.push(Covering {
                start,
                end: start + 2.0 * beta,
            });
        }
        for gap in uncovered_gaps(&cov, tol_angle).map_err(|what| {
            GeometryError::DegenerateTangency(format!("on circle at {:?}: {what}", sites[i]))
        })? {
            let (start, end) = gap;
            arcs.push(Arc {
                center: sites[i],
                radius: rho,
                start_angle: normalize_angle(start),
                extent: end - start,
                ccw: true,
            });
        }
    }

    stitch_curves(arcs, epsilon, tol)
}

/// Complement of the union of coverage intervals on one circle, as a
/// depth-counting sweep over `[0, 2π)`. Returns exposed runs as
/// `(start, end)` with `end - start` in `(0, 2π]`; an untouched circle
/// yields the single run `(0, 2π)`.
///
/// Degenerate cases are reported as errors: an exposed or covered run
/// shorter than `tol_angle`, or two coverage transitions from distinct
/// neighbors within `tol_angle` of an exposed-run boundary (a numerical
/// triple point).
fn uncovered_gaps(cov: &[Covering], tol_angle: f64) -> Result<Vec<(f64, f64)>, String> {
    if cov.is_empty() {
        return Ok(vec![(0.0, TAU)]);
    }
    // Events (angle, depth delta, source interval). Intervals wrapping
    // past 2π are split; the two split events share a source id so the
    // proximity check below does not mistake them for a triple point.
    let mut events: Vec<(f64, i32, usize)> = Vec::new();
    let mut depth_at_zero = 0i32;
    for (id, c) in cov.iter().enumerate() {
        if c.end <= TAU {
            events.push((c.start, 1, id));
            events.push((c.end, -1, id));
        } else {
            events.push((c.start, 1, id));
            events.push((TAU, -1, id));
            events.push((0.0, 1, id));
            events.push((c.end - TAU, -1, id));
            depth_at_zero += 1;
        }
        if c.start == 0.0 {
            depth_at_zero += 1;
        }
    }
    events.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    // Sweep, collecting maximal exposed runs in [0, 2π).
    let mut depth = depth_at_zero;
    let mut exposed: Vec<(f64, f64)> = Vec::new();
    let mut open_start = if depth == 0 { Some(0.0) } else { None };
    for &(angle, delta, _) in &events {
        if angle <= 0.0 || angle >= TAU {
            continue; // accounted for in depth_at_zero / end handling
        }
        let before = depth;
        depth += delta;
        if before == 0 && depth > 0 {
            exposed.push((open_start.take().expect("open exposure"), angle));
        } else if before > 0 && depth == 0 {
            open_start = Some(angle);
        }
    }
    if let Some(s) = open_start {
        exposed.push((s, TAU));
    }
    if exposed.is_empty() {
        return Ok(Vec::new());
    }
    // Join a run ending at 2π with a run starting at 0.
    if exposed.len() >= 2 {
        let first = exposed[0];
        let last = *exposed.last().unwrap();
        if first.0 == 0.0 && last.1 == TAU {
            exposed.pop();
            exposed[0] = (last.0, first.1 + TAU);
        }
    } else if exposed[0] == (0.0, TAU) {
        // Coverage exists but leaves the full circle exposed only if every
        // interval is empty, which cannot happen; still, be safe.
        return Ok(vec![(0.0, TAU)]);
    }

    // Degeneracy checks. Exposed runs and the covered runs between them
    // must not be slivers.
    for &(a, b) in &exposed {
        if b - a < tol_angle {
            return Err(format!("sliver exposed arc of extent {:e} rad", b - a));
        }
    }
    for k in 0..exposed.len() {
        let next = exposed[(k + 1) % exposed.len()];
        let covered = normalize_angle(next.0 - exposed[k].1);
        if covered < tol_angle && exposed.len() > 1 {
            return Err(format!("sliver covered run of extent {covered:e} rad"));
        }
    }
    // Each exposed-run boundary must be a clean single-pair junction.
    for &(a, b) in &exposed {
        for boundary in [normalize_angle(a), normalize_angle(b)] {
            let mut close_sources: Vec<usize> = events
                .iter()
                .filter(|&&(angle, _, _)| {
                    let d = (angle - boundary).abs();
                    d.min(TAU - d) < tol_angle
                })
                .map(|&(_, _, id)| id)
                .collect();
            close_sources.sort_unstable();
            close_sources.dedup();
            if close_sources.len() > 1 {
                return Err(format!(
                    "{} distinct disks meet within tolerance of one junction",
                    close_sources.len()
                ));
            }
        }
    }
    Ok(exposed)
}

/// Chain arcs into closed curves by matching each arc's end point to the
/// unique arc starting there.
fn stitch_curves(arcs: Vec<Arc>, epsilon: f64, tol: f64) -> Result<Vec<Vec<Arc>>, GeometryError> {
    let mut curves: Vec<Vec<Arc>> = Vec::new();
    let mut open: Vec<Arc> = Vec::new();
    for arc in arcs {
        if arc.is_full_circle() {
            curves.push(vec![arc]);
        } else {
            open.push(arc);
        }
    }
    if open.is_empty() {
        return Ok(curves);
    }

    // Deterministic walk order.
    open.sort_by(|a, b| {
        (a.center, ordered(a.start_angle))
            .partial_cmp(&(b.center, ordered(b.start_angle)))
            .unwrap()
    });

    // Spatial hash of start points, quantized at 2*tol; queries scan the
    // 3x3 neighborhood so matches cannot straddle a bucket boundary.
    let q = 2.0 * tol;
    let mut starts: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (idx, arc) in open.iter().enumerate() {
        let p = arc.start_point(epsilon);
        starts
            .entry(((p.x / q).floor() as i64, (p.y / q).floor() as i64))
            .or_default()
            .push(idx);
    }
    let successor = |end: Point, of: usize| -> Result<usize, GeometryError> {
        let (ci, cj) = ((end.x / q).floor() as i64, (end.y / q).floor() as i64);
        let mut found: Option<usize> = None;
        for di in -1..=1 {
            for dj in -1..=1 {
                if let Some(bucket) = starts.get(&(ci + di, cj + dj)) {
                    for &idx in bucket {
                        if idx != of && open[idx].start_point(epsilon).dist(end) <= tol {
                            if found.is_some() {
                                return Err(GeometryError::DegenerateChain(
                                    "multiple arcs start at one junction".into(),
                                ));
                            }
                            found = Some(idx);
                        }
                    }
                }
            }
        }
        found.ok_or_else(|| {
            GeometryError::DegenerateChain(format!(
                "arc end point ({}, {}) of arc {:?} has no continuation",
                end.x, end.y, open[of]
            ))
        })
    };

    let mut used = vec![false; open.len()];
    for first in 0..open.len() {
        if used[first] {
            continue;
        }
        let mut curve = vec![open[first]];
        used[first] = true;
        let mut at = first;
        loop {
            let next = successor(open[at].end_point(epsilon), at)?;
            if next == first {
                break;
            }
            if used[next] {
                return Err(GeometryError::DegenerateChain(
                    "arc chain re-enters a finished curve".into(),
                ));
            }
            used[next] = true;
            curve.push(open[next]);
            at = next;
        }
        curves.push(curve);
    }
    Ok(curves)
}

fn ordered(x: f64) -> f64 {
    debug_assert!(x.is_finite());
    x
}

/// Total turning of a closed curve of counterclockwise arcs: the sum of
/// arc extents plus the exterior angles at the junctions. `+2π` for an
/// outer boundary, `-2π` for a hole boundary.
pub fn curve_total_turning(curve: &[Arc], _epsilon: f64) -> f64 {
    if curve.len() == 1 && curve[0].is_full_circle() {
        return TAU;
    }
    let mut total: f64 = curve.iter().map(|a| a.extent).sum();
    for (k, arc) in curve.iter().enumerate() {
        let next = &curve[(k + 1) % curve.len()];
        let t_out = arc.start_angle + arc.extent + std::f64::consts::FRAC_PI_2;
        let t_in = next.start_angle + std::f64::consts::FRAC_PI_2;
        let mut ext = normalize_angle(t_in - t_out);
        if ext > std::f64::consts::PI {
            ext -= TAU;
        }
        total += ext;
    }
    total
}

/// The curve attaining the global maximum y-coordinate: for boundaries of
/// a connected disk union this is the unique outer curve.
pub fn outer_curve_index(curves: &[Vec<Arc>], epsilon: f64) -> usize {
    let mut best = 0;
    let mut best_y = f64::NEG_INFINITY;
    for (k, curve) in curves.iter().enumerate() {
        let y = curve
            .iter()
            .map(|a| a.max_y(epsilon))
            .fold(f64::NEG_INFINITY, f64::max);
        if y > best_y {
            best_y = y;
            best = k;
        }
    }
    best
}
