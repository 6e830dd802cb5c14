use serde::{Deserialize, Serialize};

use crate::contour::Contour;
use crate::geometry::{normalize_angle, point_arc_distance, ModelParams, Point};

use super::constants::PeierlsConstants;
use super::PeierlsError;

/// Arc midpoints with outward normal angles: one entry per arc, the angle
/// pointing from the arc's generating center through its midpoint. The
/// full-circle arc takes its midpoint at angle 0 by convention.
pub fn outward_normals(contour: &Contour) -> Vec<(Point, f64)> {
    contour
        .arcs()
        .iter()
        .map(|arc| (arc.midpoint(contour.epsilon()), arc.midpoint_angle()))
        .collect()
}

/// The shift plan for one contour: the chosen normal-angle window, the
/// shift vector, and the separated midpoints with their insertion points.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShiftPlan {
    /// Left endpoint `v` of the window `I = [v, v + alpha)`.
    pub interval_start: f64,
    /// Number of normal angles in the window.
    pub count_in_interval: usize,
    /// `theta_0 = inf I`.
    pub theta0: f64,
    /// Shift vector of magnitude `delta/2 + r` in direction `theta_0`.
    pub u0: Point,
    /// Midpoints selected greedily at pairwise distance `>= delta + 2r`.
    pub selected_midpoints: Vec<Point>,
    /// `x_i = m_i - u_0`.
    pub insertion_points: Vec<Point>,
    /// `M = ceil(c K)`.
    pub m_required: usize,
}

/// Choose the window maximizing the number of enclosed normal angles
/// (ties to the smallest left endpoint over the candidate set, which is
/// the normal angles themselves), then greedily pick `M = ceil(cK)`
/// midpoints at pairwise distance at least `delta + 2r`.
pub fn plan_shift(
    contour: &Contour,
    constants: &PeierlsConstants,
    params: &ModelParams,
) -> Result<ShiftPlan, PeierlsError> {
    let normals = outward_normals(contour);
    if normals.is_empty() {
        return Err(PeierlsError::Invalid("contour of size zero".into()));
    }
    let alpha = constants.alpha;

    // The count of angles in [v, v + alpha) as v varies is piecewise
    // constant and right-continuous with jumps only at the angles
    // themselves, so scanning candidate left endpoints v in {theta_a} is
    // an exact maximization.
    let mut best_v = f64::INFINITY;
    let mut best_count = 0usize;
    let mut candidates: Vec<f64> = normals.iter().map(|&(_, t)| t).collect();
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    candidates.dedup();
    for &v in &candidates {
        let count = normals
            .iter()
            .filter(|&&(_, t)| normalize_angle(t - v) < alpha)
            .count();
        if count > best_count {
            best_count = count;
            best_v = v;
        }
    }

    let required = constants.pigeonhole_count(contour.size());
    debug_assert!(
        best_count >= required,
        "pigeonhole: window holds {best_count} angles, expected >= {required}"
    );

    let theta0 = best_v;
    let magnitude = params.delta / 2.0 + params.r;
    let u0 = Point::new(magnitude * theta0.cos(), magnitude * theta0.sin());

    // Candidates in the window, ordered by angle offset from v (ties by
    // coordinates) for determinism.
    let mut in_window: Vec<(f64, Point)> = normals
        .iter()
        .filter(|&&(_, t)| normalize_angle(t - best_v) < alpha)
        .map(|&(m, t)| (normalize_angle(t - best_v), m))
        .collect();
    in_window.sort_by(|a, b| {
        (a.0, a.1.x, a.1.y)
            .partial_cmp(&(b.0, b.1.x, b.1.y))
            .unwrap()
    });

    let m_required = constants.insertion_count(contour.size());
    let min_sep = params.delta + 2.0 * params.r;
    let mut selected: Vec<Point> = Vec::with_capacity(m_required);
    for &(_, m) in &in_window {
        if selected.len() == m_required {
            break;
        }
        if selected.iter().all(|s| s.dist(m) >= min_sep) {
            selected.push(m);
        }
    }
    if selected.len() < m_required {
        return Err(PeierlsError::PlanInfeasible {
            found: selected.len(),
            need: m_required,
        });
    }
    let insertion_points = selected
        .iter()
        .map(|m| Point::new(m.x - u0.x, m.y - u0.y))
        .collect();
    Ok(ShiftPlan {
        interval_start: best_v,
        count_in_interval: best_count,
        theta0,
        u0,
        selected_midpoints: selected,
        insertion_points,
        m_required,
    })
}

/// The region shift: points inside the contour region translate by
/// `-u_0`, points outside stay put. Output cardinality equals input
/// cardinality. Errs when no point lies inside (not a contour of this
/// configuration).
pub fn apply_phi(
    config: &[Point],
    contour: &Contour,
    plan: &ShiftPlan,
) -> Result<Vec<Point>, PeierlsError> {
    let mut out = Vec::with_capacity(config.len());
    let mut inside_count = 0usize;
    for &p in config {
        let inside = contour.contains(p).map_err(PeierlsError::Contour)?;
        if inside {
            inside_count += 1;
            out.push(Point::new(p.x - plan.u0.x, p.y - plan.u0.y));
        } else {
            out.push(p);
        }
    }
    if inside_count == 0 {
        return Err(PeierlsError::EmptyInside);
    }
    Ok(out)
}

/// Verification record for one contour: every quantity the shift
/// construction promises, measured on the actual configuration. Failures
/// are recorded, not thrown.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Lemma1Report {
    pub size: usize,
    pub m_required: usize,
    /// Angles found in the chosen window vs the pigeonhole guarantee.
    pub window_count: usize,
    pub pigeonhole_required: usize,
    /// Smallest pairwise distance among insertion points (vs `delta + 2r`).
    pub pair_separation_min: f64,
    /// Smallest distance from an insertion point to the shifted
    /// configuration (vs `delta/2 + 2r`).
    pub clearance_min: f64,
    /// Smallest distance from an outside point to the contour
    /// (vs `delta/2 + r`).
    pub outside_gap_min: f64,
    /// Smallest distance from an inside point to the contour
    /// (vs `delta/2 + 2r`).
    pub inside_gap_min: f64,
    /// Smallest distance between a shifted inside point and an outside
    /// point (vs `delta/2 + 2r`).
    pub in_out_gap_min: f64,
    /// Largest number of arcs contributed by one generating center (vs 6).
    pub max_arcs_per_center: usize,
    /// Largest number of other midpoints within `delta + 2r` of one
    /// midpoint (vs 486).
    pub max_local_midpoints: usize,
    /// Shift structure: cardinality preserved, inside points rigidly
    /// translated, outside points fixed, translated points still in the
    /// box, image hard-core.
    pub translation_ok: bool,
    /// Inserting disks of radius `delta/2` at every insertion point keeps
    /// the hard core.
    pub insertion_hardcore_ok: bool,
    pub failures: Vec<String>,
}

impl Lemma1Report {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Check every promise of the shift construction on one configuration.
pub fn verify_lemma1(
    config: &[Point],
    contour: &Contour,
    plan: &ShiftPlan,
    params: &ModelParams,
    constants: &PeierlsConstants,
) -> Result<Lemma1Report, PeierlsError> {
    let mut failures = Vec::new();
    let eps_len = params.tol_geom();

    // (ii) pairwise separation of insertion points.
    let xs = &plan.insertion_points;
    let mut pair_min = f64::INFINITY;
    for i in 0..xs.len() {
        for j in (i + 1)..xs.len() {
            pair_min = pair_min.min(xs[i].dist(xs[j]));
        }
    }
    let sep_needed = params.delta + 2.0 * params.r;
    if pair_min < sep_needed - eps_len {
        failures.push(format!(
            "insertion points too close: {pair_min} < {sep_needed}"
        ));
    }

    // Shift map and (iii) clearance.
    let shifted = apply_phi(config, contour, plan)?;
    let clearance_needed = params.delta / 2.0 + 2.0 * params.r;
    let mut clearance_min = f64::INFINITY;
    for x in xs {
        for q in &shifted {
            clearance_min = clearance_min.min(x.dist(*q));
        }
    }
    if clearance_min < clearance_needed - eps_len {
        failures.push(format!(
            "insertion clearance violated: {clearance_min} < {clearance_needed}"
        ));
    }

    // Separation facts: distances from configuration points to the curve,
    // and between shifted inside points and (unshifted) outside points.
    let mut outside_gap = f64::INFINITY;
    let mut inside_gap = f64::INFINITY;
    let mut inside_idx = Vec::new();
    let mut outside_idx = Vec::new();
    for (i, &p) in config.iter().enumerate() {
        let d = contour
            .arcs()
            .iter()
            .map(|a| point_arc_distance(p, a, contour.epsilon()))
            .fold(f64::INFINITY, f64::min);
        if contour.contains(p).map_err(PeierlsError::Contour)? {
            inside_gap = inside_gap.min(d);
            inside_idx.push(i);
        } else {
            outside_gap = outside_gap.min(d);
            outside_idx.push(i);
        }
    }
    let mut in_out_gap = f64::INFINITY;
    for &i in &inside_idx {
        for &j in &outside_idx {
            in_out_gap = in_out_gap.min(shifted[i].dist(config[j]));
        }
    }
    if in_out_gap < params.delta / 2.0 + 2.0 * params.r {
        failures.push(format!(
            "shifted inside point within {in_out_gap} of an outside point (needs > {})",
            params.delta / 2.0 + 2.0 * params.r
        ));
    }
    if outside_gap < params.delta / 2.0 + params.r {
        failures.push(format!(
            "outside point within {} of the curve (needs > {})",
            outside_gap,
            params.delta / 2.0 + params.r
        ));
    }
    if inside_gap < params.delta / 2.0 + 2.0 * params.r {
        failures.push(format!(
            "inside point within {} of the curve (needs > {})",
            inside_gap,
            params.delta / 2.0 + 2.0 * params.r
        ));
    }

    // Snapped-center separation from the curve, split by membership in
    // the generating component: member centers sit at depth >= delta + 2r
    // (the curve is made of radius-(delta + 2r) arcs around them), while
    // snapped centers of other components nested inside the region keep
    // the larger clearance sqrt(5r² + 8rδ + 3δ²).
    let arc_centers = contour.centers();
    let decomposition = crate::contour::decompose_components(config, params);
    let component_snapped: std::collections::BTreeSet<crate::geometry::GridPoint> = decomposition
        .components
        .iter()
        .find(|comp| {
            comp.point_indices.iter().any(|&i| {
                arc_centers.contains(&crate::geometry::snap_to_grid(config[i], params.epsilon))
            })
        })
        .map(|comp| {
            comp.point_indices
                .iter()
                .map(|&i| crate::geometry::snap_to_grid(config[i], params.epsilon))
                .collect()
        })
        .unwrap_or_default();
    let foreign_floor = (5.0 * params.r * params.r
        + 8.0 * params.r * params.delta
        + 3.0 * params.delta * params.delta)
        .sqrt();
    for &i in &inside_idx {
        let g = crate::geometry::snap_to_grid(config[i], params.epsilon);
        let snapped = g.coords(params.epsilon);
        let d = contour
            .arcs()
            .iter()
            .map(|a| point_arc_distance(snapped, a, contour.epsilon()))
            .fold(f64::INFINITY, f64::min);
        if component_snapped.contains(&g) {
            if d < params.contour_radius() - eps_len {
                failures.push(format!(
                    "member snapped center at {d} from the curve (needs >= {})",
                    params.contour_radius()
                ));
            }
        } else if d <= foreign_floor {
            failures.push(format!(
                "foreign inside snapped center at {d} from the curve (needs > {foreign_floor})"
            ));
        }
    }

    // Arc multiplicity per generating center.
    let mut per_center: std::collections::HashMap<(i64, i64), usize> =
        std::collections::HashMap::new();
    for arc in contour.arcs() {
        *per_center.entry((arc.center.i, arc.center.j)).or_insert(0) += 1;
    }
    let max_arcs = per_center.values().copied().max().unwrap_or(0);
    if max_arcs > 6 {
        failures.push(format!("a center contributes {max_arcs} arcs (max 6)"));
    }

    // Local midpoint count.
    let normals = outward_normals(contour);
    let mut max_local = 0usize;
    for (i, &(m, _)) in normals.iter().enumerate() {
        let near = normals
            .iter()
            .enumerate()
            .filter(|&(j, &(q, _))| j != i && m.dist(q) < sep_needed)
            .count();
        max_local = max_local.max(near);
    }
    if max_local as u64 > constants.j_bound {
        failures.push(format!(
            "{} midpoints within {} of one midpoint (max {})",
            max_local, sep_needed, constants.j_bound
        ));
    }

    // Pigeonhole.
    let required = constants.pigeonhole_count(contour.size());
    if plan.count_in_interval < required {
        failures.push(format!(
            "window holds {} angles, pigeonhole requires {}",
            plan.count_in_interval, required
        ));
    }

    // Translation structure.
    let mut translation_ok = shifted.len() == config.len();
    for (&p, &q) in config.iter().zip(&shifted) {
        let inside = contour.contains(p).map_err(PeierlsError::Contour)?;
        if inside {
            let expect = Point::new(p.x - plan.u0.x, p.y - plan.u0.y);
            translation_ok &= q.dist(expect) == 0.0;
            translation_ok &= params.in_box(q);
        } else {
            translation_ok &= p.dist(q) == 0.0;
        }
    }
    translation_ok &= crate::geometry::is_hard_core(&shifted, params.r);
    if !translation_ok {
        failures.push("shift structure violated".into());
    }

    // Insertions: disks of radius delta/2 at the insertion points.
    let mut insertion_ok = true;
    let mut augmented = shifted.clone();
    augmented.extend_from_slice(xs);
    insertion_ok &= crate::geometry::is_hard_core(&augmented, params.r);
    // Extreme placements: push each inserted point toward the window
    // direction by almost delta/2.
    let push = 0.999 * params.delta / 2.0;
    let quarter = std::f64::consts::FRAC_PI_2;
    for dir in [0.0, quarter, 2.0 * quarter, 3.0 * quarter] {
        let mut aug = shifted.clone();
        for x in xs {
            aug.push(Point::new(
                x.x + push * (plan.theta0 + dir).cos(),
                x.y + push * (plan.theta0 + dir).sin(),
            ));
        }
        insertion_ok &= crate::geometry::is_hard_core(&aug, params.r);
    }
    if !insertion_ok {
        failures.push("insertion of fresh points breaks the hard core".into());
    }

    Ok(Lemma1Report {
        size: contour.size(),
        m_required: plan.m_required,
        window_count: plan.count_in_interval,
        pigeonhole_required: required,
        pair_separation_min: pair_min,
        clearance_min,
        outside_gap_min: outside_gap,
        inside_gap_min: inside_gap,
        in_out_gap_min: in_out_gap,
        max_arcs_per_center: max_arcs,
        max_local_midpoints: max_local,
        translation_ok,
        insertion_hardcore_ok: insertion_ok,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::extract_contour;
    use crate::geometry::ModelParams;
    use crate::peierls::compute_constants;

    fn params() -> ModelParams {
        ModelParams::new(0.5, 2.1, 0.2, 0.09, 1.0, 10.0).unwrap()
    }

    #[test]
    fn full_circle_normal_convention() {
        let p = params();
        let contour = extract_contour(&[Point::new(0.5, 0.5)], &p).unwrap();
        let normals = outward_normals(&contour);
        assert_eq!(normals.len(), 1);
        assert_eq!(normals[0].1, 0.0);
        // Midpoint sits at angle 0 from the center.
        let c = contour.arcs()[0].center.coords(p.epsilon);
        assert!((normals[0].0.x - (c.x + contour.radius())).abs() < 1e-12);
        assert!((normals[0].0.y - c.y).abs() < 1e-12);
    }

    #[test]
    fn symmetric_pair_normals_differ_by_pi() {
        // Horizontally aligned centers: the two cap midpoints face away
        // from each other.
        let p = params();
        let contour = extract_contour(&[Point::new(-0.5, 0.0), Point::new(0.5, 0.0)], &p).unwrap();
        let normals = outward_normals(&contour);
        assert_eq!(normals.len(), 2);
        let gap = crate::geometry::angular_distance(normals[0].1, normals[1].1);
        assert!(
            (gap - std::f64::consts::PI).abs() < 1e-9,
            "normals {} and {} should oppose",
            normals[0].1,
            normals[1].1
        );
    }

    #[test]
    fn two_disk_normals_point_outward() {
        let p = params();
        let contour = extract_contour(&[Point::new(-0.5, 0.0), Point::new(0.5, 0.0)], &p).unwrap();
        let tol = p.tol_geom();
        for (m, theta) in outward_normals(&contour) {
            // Stepping outward along the normal leaves the region.
            let probe = Point::new(m.x + 1e3 * tol * theta.cos(), m.y + 1e3 * tol * theta.sin());
            assert!(!contour.contains(probe).unwrap());
            // Stepping inward stays inside.
            let probe_in = Point::new(m.x - 1e3 * tol * theta.cos(), m.y - 1e3 * tol * theta.sin());
            assert!(contour.contains(probe_in).unwrap());
        }
    }

    #[test]
    fn single_arc_plan() {
        let p = params();
        let k = compute_constants(&p);
        let contour = extract_contour(&[Point::new(0.5, 0.5)], &p).unwrap();
        let plan = plan_shift(&contour, &k, &p).unwrap();
        assert_eq!(plan.m_required, 1);
        assert_eq!(plan.selected_midpoints.len(), 1);
        assert!((plan.u0.norm() - (0.1 + 0.5)).abs() < 1e-12);
        // x_i = m_i - u0.
        let m = plan.selected_midpoints[0];
        let x = plan.insertion_points[0];
        assert!((m.x - plan.u0.x - x.x).abs() < 1e-15);
        assert!((m.y - plan.u0.y - x.y).abs() < 1e-15);
    }

    #[test]
    fn m_is_one_for_small_contours() {
        // With the reference constants, every contour up to size 18506 has
        // M = 1.
        let p = params();
        let k = compute_constants(&p);
        assert_eq!(k.insertion_count(200), 1);
    }

    #[test]
    fn phi_translates_single_component_entirely() {
        let p = params();
        let k = compute_constants(&p);
        let config = vec![Point::new(0.0, 0.0), Point::new(1.2, 0.2)];
        let contour = extract_contour(&config, &p).unwrap();
        let plan = plan_shift(&contour, &k, &p).unwrap();
        let shifted = apply_phi(&config, &contour, &plan).unwrap();
        for (a, b) in config.iter().zip(&shifted) {
            assert!((a.x - plan.u0.x - b.x).abs() < 1e-15);
            assert!((a.y - plan.u0.y - b.y).abs() < 1e-15);
        }
    }

    #[test]
    fn phi_requires_inside_points() {
        let p = params();
        let k = compute_constants(&p);
        let component = vec![Point::new(5.0, 5.0)];
        let contour = extract_contour(&component, &p).unwrap();
        let plan = plan_shift(&contour, &k, &p).unwrap();
        // A "configuration" that misses the region entirely.
        let err = apply_phi(&[Point::new(-5.0, -5.0)], &contour, &plan).unwrap_err();
        assert!(matches!(err, PeierlsError::EmptyInside));
    }

    #[test]
    fn verify_single_point_component() {
        let p = params();
        let k = compute_constants(&p);
        let config = vec![Point::new(0.3, -0.4)];
        let contour = extract_contour(&config, &p).unwrap();
        let plan = plan_shift(&contour, &k, &p).unwrap();
        let report = verify_lemma1(&config, &contour, &plan, &p, &k).unwrap();
        assert!(report.pass(), "failures: {:?}", report.failures);
        assert_eq!(report.size, 1);
        assert!(report.clearance_min >= 0.1 / 2.0 + 1.0);
    }

    #[test]
    fn verify_multi_point_component_with_outsiders() {
        let p = params();
        let k = compute_constants(&p);
        // A finite component near the origin plus a distant point.
        let config = vec![
            Point::new(0.0, 0.0),
            Point::new(1.05, 0.15),
            Point::new(0.4, 1.1),
            Point::new(6.0, 6.0),
        ];
        let d = crate::contour::decompose_components(&config, &p);
        let (idx, _) = d
            .finite_components()
            .find(|(_, c)| c.point_indices.len() == 3)
            .unwrap();
        let contour = crate::contour::extract_component_contour(&config, &d, idx, &p).unwrap();
        let plan = plan_shift(&contour, &k, &p).unwrap();
        let report = verify_lemma1(&config, &contour, &plan, &p, &k).unwrap();
        assert!(report.pass(), "failures: {:?}", report.failures);
        assert!(report.outside_gap_min > 0.1 / 2.0 + 0.5);
        assert!(report.inside_gap_min > 0.1 / 2.0 + 1.0);
    }

    #[test]
    fn verify_with_foreign_component_nested_in_hole() {
        // A ring with a central hole, plus a separate single-point
        // component parked inside the hole: the nested point is inside
        // the region, belongs to another component, and must keep the
        // larger snapped clearance from the curve.
        let p = params();
        let k = compute_constants(&p);
        let mut config: Vec<Point> = (0..8)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / 8.0;
                Point::new(2.2 * t.cos(), 2.2 * t.sin())
            })
            .collect();
        config.push(Point::new(0.0, 0.0));
        let d = crate::contour::decompose_components(&config, &p);
        let (idx, comp) = d
            .finite_components()
            .find(|(_, c)| c.point_indices.len() == 8)
            .expect("the ring is one component");
        assert!(!comp.point_indices.contains(&8));
        let contour = crate::contour::extract_component_contour(&config, &d, idx, &p).unwrap();
        assert!(contour.contains(config[8]).unwrap());
        let plan = plan_shift(&contour, &k, &p).unwrap();
        let report = verify_lemma1(&config, &contour, &plan, &p, &k).unwrap();
        assert!(report.pass(), "failures: {:?}", report.failures);
    }
}
