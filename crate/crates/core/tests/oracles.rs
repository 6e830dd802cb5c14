//! Oracle equivalences: the optimized paths must agree with brute-force
//! references on randomized inputs.

use proptest::prelude::*;

use hdpc_core::contour::extract_contour;
use hdpc_core::geometry::{is_hard_core, snap_to_grid, CellIndex, ModelParams, Point};
use hdpc_core::percolation::{build_clusters, Topology};

fn point_strategy(range: f64) -> impl Strategy<Value = Point> {
    (-range..range, -range..range).prop_map(|(x, y)| Point::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn snap_displacement_below_pitch(
        p in point_strategy(50.0),
        eps in 0.001f64..2.0,
    ) {
        let g = snap_to_grid(p, eps).coords(eps);
        prop_assert!(g.dist(p) < eps);
    }

    #[test]
    fn neighbor_search_equals_exhaustive_scan(
        points in prop::collection::vec(point_strategy(8.0), 0..80),
        query in point_strategy(9.0),
        s in 0.05f64..5.0,
        cell in 0.1f64..3.0,
    ) {
        let index = CellIndex::build(cell, &points);
        let mut got: Vec<(u64, u64)> = index
            .neighbors_within(query, s)
            .iter()
            .map(|p| (p.x.to_bits(), p.y.to_bits()))
            .collect();
        let mut want: Vec<(u64, u64)> = points
            .iter()
            .filter(|p| p.dist(query) <= s)
            .map(|p| (p.x.to_bits(), p.y.to_bits()))
            .collect();
        got.sort_unstable();
        want.sort_unstable();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn hard_core_equals_pairwise_check(
        points in prop::collection::vec(point_strategy(4.0), 0..40),
        r in 0.05f64..1.5,
    ) {
        let brute = points.iter().enumerate().all(|(i, p)| {
            points
                .iter()
                .enumerate()
                .all(|(j, q)| i == j || p.dist(*q) >= 2.0 * r)
        });
        prop_assert_eq!(is_hard_core(&points, r), brute);
    }

    #[test]
    fn clusters_equal_bfs_on_explicit_edges(
        points in prop::collection::vec(point_strategy(6.0), 0..60),
        l in 0.2f64..3.0,
    ) {
        let labels = build_clusters(&points, l, Topology::Plane);
        // BFS over the explicit O(N²) adjacency.
        let n = points.len();
        let mut comp = vec![usize::MAX; n];
        let mut next_id = 0;
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut queue = vec![start];
            comp[start] = next_id;
            while let Some(i) = queue.pop() {
                for j in 0..n {
                    if comp[j] == usize::MAX && points[i].dist(points[j]) <= l {
                        comp[j] = next_id;
                        queue.push(j);
                    }
                }
            }
            next_id += 1;
        }
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(
                    labels.label[i] == labels.label[j],
                    comp[i] == comp[j],
                    "pair ({}, {})", i, j
                );
            }
        }
    }

    #[test]
    fn adding_a_point_never_disconnects(
        points in prop::collection::vec(point_strategy(6.0), 1..50),
        extra in point_strategy(6.0),
        l in 0.2f64..3.0,
    ) {
        let before = build_clusters(&points, l, Topology::Plane);
        let mut bigger = points.clone();
        bigger.push(extra);
        let after = build_clusters(&bigger, l, Topology::Plane);
        for i in 0..points.len() {
            for j in 0..points.len() {
                if before.label[i] == before.label[j] {
                    prop_assert_eq!(after.label[i], after.label[j]);
                }
            }
        }
    }
}

/// Contour keys must coincide exactly when the arc sets coincide, and
/// differ otherwise. The oracle is direct comparison of sorted arc data.
#[test]
fn canonical_key_equality_matches_arc_sets() {
    let params = ModelParams::new(0.5, 2.1, 0.2, 0.09, 1.0, 10.0).unwrap();
    let mut state = 99u64;
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut contours = Vec::new();
    let mut produced = 0;
    while produced < 60 {
        let m = 1 + (next() * 4.0) as usize;
        let mut pts: Vec<Point> = Vec::new();
        let mut tries = 0;
        while pts.len() < m && tries < 100 {
            tries += 1;
            let cand = Point::new((next() - 0.5) * 3.0, (next() - 0.5) * 3.0);
            if pts.iter().all(|q| q.dist(cand) >= 1.0) {
                pts.push(cand);
            }
        }
        let Ok(contour) = extract_contour(&pts, &params) else {
            continue;
        };
        // Shuffled input must give the identical key.
        let mut rev = pts.clone();
        rev.reverse();
        let same = extract_contour(&rev, &params).unwrap();
        assert_eq!(contour.canonical_key(), same.canonical_key());
        contours.push(contour);
        produced += 1;
    }
    for a in &contours {
        for b in &contours {
            let arcs_equal = {
                let mut xs: Vec<_> = a
                    .arcs()
                    .iter()
                    .map(|arc| (arc.center, arc.start_angle.to_bits(), arc.extent.to_bits()))
                    .collect();
                let mut ys: Vec<_> = b
                    .arcs()
                    .iter()
                    .map(|arc| (arc.center, arc.start_angle.to_bits(), arc.extent.to_bits()))
                    .collect();
                xs.sort_unstable();
                ys.sort_unstable();
                xs == ys
            };
            assert_eq!(
                a.canonical_key() == b.canonical_key(),
                arcs_equal,
                "key/arc-set disagreement"
            );
        }
    }
}
