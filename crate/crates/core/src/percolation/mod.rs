//! Connectivity of the excluded-volume graph: points at distance at most
//! the connection diameter `L` are joined (closed-ball rule, matching
//! disks of radius `L/2` that touch or overlap). Spanning or winding
//! clusters are the finite-box proxy for infinite components.

mod union_find;

pub use union_find::UnionFind;

use serde::{Deserialize, Serialize};

use crate::contour::{ComponentClass, ComponentDecomposition};
use crate::geometry::{CellIndex, ModelParams, Point};

/// Underlying space for cluster analysis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Topology {
    /// The box as a subset of the plane.
    Plane,
    /// The box glued into a torus of the given side.
    Torus { side: f64 },
}

/// Per-cluster summary.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClusterInfo {
    pub size: usize,
    /// Axis-aligned bounding box of the member points.
    pub min_x: f64,
    pub max_x: f64,
    pub min_y: f64,
    pub max_y: f64,
    /// Smallest distance from a member point to the origin.
    pub min_norm: f64,
    /// Torus winding flags (always false on the plane).
    pub winds_x: bool,
    pub winds_y: bool,
}

/// Result of union-find clustering: a cluster id per point plus summaries.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClusterLabels {
    /// Cluster id per configuration point; ids are `0..clusters.len()`.
    pub label: Vec<usize>,
    pub clusters: Vec<ClusterInfo>,
}

impl ClusterLabels {
    pub fn cluster_of(&self, point_idx: usize) -> &ClusterInfo {
        &self.clusters[self.label[point_idx]]
    }
}

/// Union-find clustering at connection diameter `connection` (closed rule:
/// distance exactly `connection` connects). Result is independent of point
/// order. Under [`Topology::Torus`], edges across the seam are honored and
/// winding is tracked.
pub fn build_clusters(points: &[Point], connection: f64, topology: Topology) -> ClusterLabels {
    assert!(connection > 0.0);
    let n = points.len();
    let mut uf = UnionFind::new(n);
    let index = CellIndex::build(connection, points);
    match topology {
        Topology::Plane => {
            for (i, &p) in points.iter().enumerate() {
                index.for_each_within(p, connection, |j, _| {
                    if j != i {
                        uf.union(i, j, [0, 0]);
                    }
                });
            }
        }
        Topology::Torus { side } => {
            assert!(
                connection < side,
                "connection diameter must be below the torus side"
            );
            for (i, &p) in points.iter().enumerate() {
                for sx in -1i32..=1 {
                    for sy in -1i32..=1 {
                        // The image of i shifted by (sx, sy) periods is near
                        // j's stored position: lift(i) - lift(j) = (sx, sy).
                        let q = p.offset(sx as f64 * side, sy as f64 * side);
                        index.for_each_within(q, connection, |j, _| {
                            if j != i {
                                uf.union(i, j, [sx, sy]);
                            }
                        });
                    }
                }
            }
        }
    }

    // Compress to dense cluster ids in first-appearance order.
    let mut root_to_id: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    let mut label = vec![0usize; n];
    let mut clusters: Vec<ClusterInfo> = Vec::new();
    for i in 0..n {
        let (root, _) = uf.find(i);
        let winds = uf.winds(root);
        let next_id = clusters.len();
        let id = *root_to_id.entry(root).or_insert(next_id);
        if id == clusters.len() {
            clusters.push(ClusterInfo {
                size: 0,
                min_x: f64::INFINITY,
                max_x: f64::NEG_INFINITY,
                min_y: f64::INFINITY,
                max_y: f64::NEG_INFINITY,
                min_norm: f64::INFINITY,
                winds_x: false,
                winds_y: false,
            });
        }
        label[i] = id;
        let info = &mut clusters[id];
        let p = points[i];
        info.size += 1;
        info.min_x = info.min_x.min(p.x);
        info.max_x = info.max_x.max(p.x);
        info.min_y = info.min_y.min(p.y);
        info.max_y = info.max_y.max(p.y);
        info.min_norm = info.min_norm.min(p.norm());
        info.winds_x |= winds[0];
        info.winds_y |= winds[1];
    }
    ClusterLabels { label, clusters }
}

/// The percolation observables read off one configuration.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct PercolationObservation {
    pub spans_horizontally: bool,
    pub spans_vertically: bool,
    /// Size of the largest cluster over the point count (0 when empty).
    pub largest_cluster_fraction: f64,
    /// Some spanning cluster's disk union comes within `L/2` of the origin.
    pub origin_event: bool,
    /// Some spanning component's snapped center set comes within
    /// `delta + 2r` of the origin (the discretized analogue).
    pub origin_event_discrete: bool,
}

/// Spanning detection. On the plane a cluster spans horizontally iff it
/// has points within `L/2` of both the left and right box edges (so its
/// disk union touches both); on the torus, iff it winds. The origin event
/// asks additionally for a spanning cluster whose disk union covers the
/// `L/2`-neighborhood of the origin, i.e. whose nearest point is within
/// `L` of the origin.
pub fn detect_spanning(
    labels: &ClusterLabels,
    params: &ModelParams,
    topology: Topology,
) -> PercolationObservation {
    let band = params.connection_diameter / 2.0;
    let half = params.box_half_width;
    let total: usize = labels.clusters.iter().map(|c| c.size).sum();
    let mut obs = PercolationObservation::default();
    let mut largest = 0usize;
    for cluster in &labels.clusters {
        largest = largest.max(cluster.size);
        let (spans_x, spans_y) = match topology {
            Topology::Plane => (
                cluster.min_x <= -half + band && cluster.max_x >= half - band,
                cluster.min_y <= -half + band && cluster.max_y >= half - band,
            ),
            Topology::Torus { .. } => (cluster.winds_x, cluster.winds_y),
        };
        obs.spans_horizontally |= spans_x;
        obs.spans_vertically |= spans_y;
        if (spans_x || spans_y) && cluster.min_norm <= params.connection_diameter {
            obs.origin_event = true;
        }
    }
    obs.largest_cluster_fraction = if total == 0 {
        0.0
    } else {
        largest as f64 / total as f64
    };
    obs
}

/// The discretized origin event: true iff some spanning component of the
/// decomposition has a snapped center within `delta + 2r` of the origin.
///
/// Whenever this fires, the continuous origin event fires as well (the
/// spanning component sits inside one connection-diameter cluster and its
/// points are within a grid cell of their snapped centers).
pub fn origin_proximity_discrete(
    config: &[Point],
    params: &ModelParams,
    decomposition: &ComponentDecomposition,
) -> bool {
    let reach = params.contour_radius();
    decomposition
        .components
        .iter()
        .filter(|c| c.class == ComponentClass::Spanning)
        .any(|c| {
            c.point_indices.iter().any(|&i| {
                crate::geometry::snap_to_grid(config[i], params.epsilon)
                    .coords(params.epsilon)
                    .norm()
                    <= reach
            })
        })
}
