use serde::{Deserialize, Serialize};

use crate::geometry::{ModelParams, TAU};

/// Maximum number of other arc midpoints within `delta + 2r` of a given
/// midpoint: 6 arcs per disk times the 81-disk area bound.
pub const J_BOUND: u64 = 486;

/// The constants of the shift construction, all derived from `delta` and
/// `r` alone.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PeierlsConstants {
    /// `alpha = 2π / n_star`, the largest such value strictly below
    /// `delta / (delta + 2r)`.
    pub alpha: f64,
    pub n_star: u64,
    /// `c = alpha / (2π (J + 1))`; a contour of size `K` admits
    /// `ceil(c K)` separated midpoints with normals in one `alpha` window.
    pub c: f64,
    /// `H = 5 sqrt(2π) r`, the per-step factor of the contour count bound.
    pub h: f64,
    pub j_bound: u64,
}

/// Compute the constants for valid parameters.
///
/// `alpha` is found by scanning `n` upward until `2π/n` drops strictly
/// below `delta / (delta + 2r)`; admissibility
/// `(delta/2 + r) * alpha < delta/2` is asserted (it is equivalent to the
/// strict threshold inequality).
pub fn compute_constants(params: &ModelParams) -> PeierlsConstants {
    let threshold = params.delta / (params.delta + 2.0 * params.r);
    let mut n = 2u64;
    while TAU / n as f64 >= threshold {
        n += 1;
    }
    let alpha = TAU / n as f64;
    assert!(
        (params.delta / 2.0 + params.r) * alpha < params.delta / 2.0,
        "alpha admissibility must follow from the threshold inequality"
    );
    PeierlsConstants {
        alpha,
        n_star: n,
        c: alpha / (TAU * (J_BOUND as f64 + 1.0)),
        h: 5.0 * TAU.sqrt() * params.r,
        j_bound: J_BOUND,
    }
}

impl PeierlsConstants {
    /// `M = ceil(c K)`, the number of insertion points for size `K`.
    pub fn insertion_count(&self, size: usize) -> usize {
        (self.c * size as f64).ceil() as usize
    }

    /// Pigeonhole guarantee: at least `ceil(alpha K / 2π)` outward normal
    /// angles fall in the best `alpha` window.
    pub fn pigeonhole_count(&self, size: usize) -> usize {
        (self.alpha * size as f64 / TAU).ceil() as usize
    }
}
