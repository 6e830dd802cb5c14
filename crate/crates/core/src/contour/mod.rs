//! Component decomposition over snapped centers and contour extraction.
//!
//! Points whose snapped centers sit within `2R` of each other (overlap of
//! radius-`R` disks, `R = delta + 3r/2`) form one component. Each finite
//! component owns one contour: the outer boundary curve of the union of
//! radius-`(delta + 2r)` disks around its snapped centers. The contour's
//! size is its arc count.

mod region;

pub use region::polygonal_winding_contains;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    disk_union_boundary, outer_curve_index, snap_to_grid, Arc, CellIndex, GeometryError, GridPoint,
    ModelParams, Point, TAU,
};
use crate::percolation::UnionFind;

#[derive(Debug, Error)]
pub enum ContourError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("component is not finite in the box (class {0:?})")]
    InfiniteComponent(ComponentClass),
    #[error("empty component")]
    Empty,
    #[error("component is disconnected at the contour radius")]
    Disconnected,
    #[error("query point lies on the contour within tolerance")]
    OnBoundary,
    #[error("no clean ray direction for point-in-region test")]
    DegenerateRay,
}

/// Finite-box classification of a component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComponentClass {
    /// Entirely in the box interior; eligible for contour extraction.
    Finite,
    /// Some snapped center within `2R` of a box edge. Too close to the
    /// window edge to trust a contour, but not a spanning proxy either.
    BoundaryTouching,
    /// Snapped centers reach within `R` of both opposite edges of some
    /// axis: the finite-box proxy for an infinite component.
    Spanning,
}

/// One component of the decomposition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Component {
    pub point_indices: Vec<usize>,
    pub class: ComponentClass,
}

/// Partition of a configuration induced by overlaps of radius-`R` disks
/// around snapped centers.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComponentDecomposition {
    /// Component id per configuration point.
    pub component_of: Vec<usize>,
    pub components: Vec<Component>,
}

impl ComponentDecomposition {
    pub fn finite_components(&self) -> impl Iterator<Item = (usize, &Component)> {
        self.components
            .iter()
            .enumerate()
            .filter(|(_, c)| c.class == ComponentClass::Finite)
    }
}

/// Decompose a configuration: snapped centers within `2R` (closed rule)
/// are joined. Classification is per [`ComponentClass`], with the box
/// treated as a window of the plane.
pub fn decompose_components(config: &[Point], params: &ModelParams) -> ComponentDecomposition {
    decompose_components_with_topology(config, params, crate::percolation::Topology::Plane)
}

/// Like [`decompose_components`], but on the torus the overlap graph
/// includes edges across the seam and a component is `Spanning` iff it
/// winds. A winding component always sits inside a winding cluster of the
/// connection graph, so the discretized origin event entails the
/// continuous one in both topologies.
pub fn decompose_components_with_topology(
    config: &[Point],
    params: &ModelParams,
    topology: crate::percolation::Topology,
) -> ComponentDecomposition {
    let eps = params.epsilon;
    let r_comp = params.component_radius();
    let reach = 2.0 * r_comp;
    let snapped: Vec<Point> = config
        .iter()
        .map(|&p| snap_to_grid(p, eps).coords(eps))
        .collect();
    let mut uf = UnionFind::new(config.len());
    let index = CellIndex::build(reach.max(eps), &snapped);
    match topology {
        crate::percolation::Topology::Plane => {
            for (i, &c) in snapped.iter().enumerate() {
                index.for_each_within(c, reach, |j, _| {
                    if j != i {
                        uf.union(i, j, [0, 0]);
                    }
                });
            }
        }
        crate::percolation::Topology::Torus { side } => {
            assert!(reach < side, "component reach must be below the torus side");
            for (i, &c) in snapped.iter().enumerate() {
                for sx in -1i32..=1 {
                    for sy in -1i32..=1 {
                        let q = c.offset(sx as f64 * side, sy as f64 * side);
                        index.for_each_within(q, reach, |j, _| {
                            if j != i {
                                uf.union(i, j, [sx, sy]);
                            }
                        });
                    }
                }
            }
        }
    }

    let half = params.box_half_width;
    let mut root_to_id = std::collections::HashMap::new();
    let mut components: Vec<Component> = Vec::new();
    let mut component_of = vec![0usize; config.len()];
    let mut winding = Vec::new();
    // First pass: membership.
    for (i, slot) in component_of.iter_mut().enumerate() {
        let (root, _) = uf.find(i);
        let winds = uf.winds(i);
        let next = components.len();
        let id = *root_to_id.entry(root).or_insert(next);
        if id == components.len() {
            components.push(Component {
                point_indices: Vec::new(),
                class: ComponentClass::Finite,
            });
            winding.push(false);
        }
        *slot = id;
        components[id].point_indices.push(i);
        winding[id] |= winds[0] || winds[1];
    }
    // Second pass: classification from snapped centers.
    for (id, comp) in components.iter_mut().enumerate() {
        let mut touch = false;
        let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
        for &i in &comp.point_indices {
            let c = snapped[i];
            min_x = min_x.min(c.x);
            max_x = max_x.max(c.x);
            min_y = min_y.min(c.y);
            max_y = max_y.max(c.y);
            if c.x.abs() >= half - 2.0 * r_comp || c.y.abs() >= half - 2.0 * r_comp {
                touch = true;
            }
        }
        let spanning = match topology {
            crate::percolation::Topology::Plane => {
                let spans_x = min_x <= -half + r_comp && max_x >= half - r_comp;
                let spans_y = min_y <= -half + r_comp && max_y >= half - r_comp;
                spans_x || spans_y
            }
            crate::percolation::Topology::Torus { .. } => winding[id],
        };
        comp.class = if spanning {
            ComponentClass::Spanning
        } else if touch {
            ComponentClass::BoundaryTouching
        } else {
            ComponentClass::Finite
        };
    }
    ComponentDecomposition {
        component_of,
        components,
    }
}

/// A contour: the outer boundary curve of a finite component's disk union,
/// as a cyclically ordered arc list.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Contour {
    arcs: Vec<Arc>,
    epsilon: f64,
    radius: f64,
    tol: f64,
}

/// Canonical, rotation-minimal encoding of a contour: the arc sequence as
/// integer center coordinates plus quantized angular intervals. Two
/// contours compare equal iff they are identical as arc sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ContourKey(Vec<(i64, i64, i64, i64)>);

/// JSON-friendly arc record: grid center plus start/end angles.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ArcRecord {
    pub center_i: i64,
    pub center_j: i64,
    pub start_angle: f64,
    pub end_angle: f64,
}

impl Contour {
    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Contour size: the number of arcs.
    pub fn size(&self) -> usize {
        self.arcs.len()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// The distinct grid sites generating the arcs.
    pub fn centers(&self) -> BTreeSet<GridPoint> {
        self.arcs.iter().map(|a| a.center).collect()
    }

    /// Membership in the enclosed region (the filled outer curve).
    pub fn contains(&self, p: Point) -> Result<bool, ContourError> {
        region::curve_contains(&self.arcs, self.epsilon, p, self.tol)
    }

    /// True iff the origin lies in the enclosed region.
    pub fn encloses_origin(&self) -> Result<bool, ContourError> {
        self.contains(Point::new(0.0, 0.0))
    }

    /// Rotation-minimal canonical encoding, stable across runs.
    pub fn canonical_key(&self) -> ContourKey {
        let quant = |angle: f64| -> i64 {
            let t = crate::geometry::normalize_angle(angle) / TAU;
            (t * 1e9).round() as i64 % 1_000_000_000
        };
        let items: Vec<(i64, i64, i64, i64)> = self
            .arcs
            .iter()
            .map(|a| {
                (
                    a.center.i,
                    a.center.j,
                    quant(a.start_angle),
                    (a.extent / TAU * 1e9).round() as i64,
                )
            })
            .collect();
        let n = items.len();
        let mut best = 0usize;
        for cand in 1..n {
            for k in 0..n {
                let a = &items[(cand + k) % n];
                let b = &items[(best + k) % n];
                match a.cmp(b) {
                    std::cmp::Ordering::Less => {
                        best = cand;
                        break;
                    }
                    std::cmp::Ordering::Greater => break,
                    std::cmp::Ordering::Equal => {}
                }
            }
        }
        ContourKey((0..n).map(|k| items[(best + k) % n]).collect())
    }

    pub fn records(&self) -> Vec<ArcRecord> {
        self.arcs
            .iter()
            .map(|a| ArcRecord {
                center_i: a.center.i,
                center_j: a.center.j,
                start_angle: a.start_angle,
                end_angle: a.end_angle(),
            })
            .collect()
    }
}

/// Extract the contour of a finite component given as a raw point set.
/// The set must be non-empty and connected at the contour radius.
pub fn extract_contour(points: &[Point], params: &ModelParams) -> Result<Contour, ContourError> {
    if points.is_empty() {
        return Err(ContourError::Empty);
    }
    let eps = params.epsilon;
    let rho = params.contour_radius();
    let centers: Vec<GridPoint> = {
        let mut v: Vec<GridPoint> = points.iter().map(|&p| snap_to_grid(p, eps)).collect();
        v.sort();
        v.dedup();
        v
    };
    // Connectivity of the disk union (overlap rule at the contour radius).
    {
        let coords: Vec<Point> = centers.iter().map(|g| g.coords(eps)).collect();
        let index = CellIndex::build((2.0 * rho).max(eps), &coords);
        let mut uf = UnionFind::new(coords.len());
        for (i, &c) in coords.iter().enumerate() {
            index.for_each_within(c, 2.0 * rho, |j, _| {
                if j != i {
                    uf.union(i, j, [0, 0]);
                }
            });
        }
        let root = uf.find(0).0;
        for i in 1..coords.len() {
            if uf.find(i).0 != root {
                return Err(ContourError::Disconnected);
            }
        }
    }
    let tol = params.tol_geom();
    let curves = disk_union_boundary(&centers, eps, rho, tol)?;
    let outer = outer_curve_index(&curves, eps);
    Ok(Contour {
        arcs: curves[outer].clone(),
        epsilon: eps,
        radius: rho,
        tol,
    })
}

/// Extract the contour of one component of a decomposition; only finite
/// components carry contours.
pub fn extract_component_contour(
    config: &[Point],
    decomposition: &ComponentDecomposition,
    component_idx: usize,
    params: &ModelParams,
) -> Result<Contour, ContourError> {
    let comp = &decomposition.components[component_idx];
    if comp.class != ComponentClass::Finite {
        return Err(ContourError::InfiniteComponent(comp.class));
    }
    let pts: Vec<Point> = comp.point_indices.iter().map(|&i| config[i]).collect();
    extract_contour(&pts, params)
}

/// All curves of a component's disk union (outer curve first). Used by
/// verification code that inspects hole nesting.
pub fn component_boundary_curves(
    points: &[Point],
    params: &ModelParams,
) -> Result<Vec<Vec<Arc>>, ContourError> {
    if points.is_empty() {
        return Err(ContourError::Empty);
    }
    let eps = params.epsilon;
    let centers: Vec<GridPoint> = {
        let mut v: Vec<GridPoint> = points.iter().map(|&p| snap_to_grid(p, eps)).collect();
        v.sort();
        v.dedup();
        v
    };
    let mut curves =
        disk_union_boundary(&centers, eps, params.contour_radius(), params.tol_geom())?;
    let outer = outer_curve_index(&curves, eps);
    curves.swap(0, outer);
    Ok(curves)
}
