//! Hard-disk model toolkit.
//!
//! Configurations are finite point sets in the plane with a hard-core
//! exclusion (pairwise distance at least `2r`). This crate provides:
//!
//! - [`geometry`]: grid snapping, cell-list neighbor search, hard-core
//!   tests, and boundaries of unions of equal-radius disks.
//! - [`sampler`]: grand-canonical Monte Carlo in a square box with
//!   insertion / deletion / translation moves, plus an exact small-box
//!   reference distribution computed by quasi-random integration.
//! - [`percolation`]: union-find clustering at a connection diameter,
//!   spanning / winding detection, and origin-proximity observables.
//! - [`contour`]: component decomposition over snapped centers and
//!   extraction of the outer boundary curve (the contour) of each finite
//!   component's disk union.
//! - [`peierls`]: the shift-map construction, probability and counting
//!   bounds per contour size, exact enumeration of small contours, and
//!   an empirical contour census.

pub mod contour;
pub mod geometry;
pub mod peierls;
pub mod percolation;
pub mod sampler;

pub use geometry::{GridPoint, ModelParams, Point};

/// A finite point set in the box. Callers maintain the hard-core property.
pub type Configuration = Vec<Point>;
