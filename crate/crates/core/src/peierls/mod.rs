//! The shift-map machinery: admissible constants, outward normals, the
//! pigeonhole interval and separated midpoints, the region shift, bound
//! evaluation per contour size, exact enumeration of small contours, and
//! an empirical contour census.

mod bounds;
mod census;
mod constants;
mod enumerate;
mod shift;

pub use bounds::{lemma3_bound, lemma4_bound, lemma4_bound_ln, Lemma3Bound};
pub use census::{contour_census, CensusReport, CensusRow, KeyStat};
pub use constants::{compute_constants, PeierlsConstants};
pub use enumerate::{enumerate_small_contours, SmallContourCounts, ENUMERATION_CANDIDATE_CAP};
pub use shift::{apply_phi, outward_normals, plan_shift, verify_lemma1, Lemma1Report, ShiftPlan};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PeierlsError {
    /// Fewer separated midpoints exist than the counting argument
    /// guarantees. Must never occur; treated as a hard failure upstream.
    #[error("shift plan infeasible: found {found} separated midpoints, need {need}")]
    PlanInfeasible { found: usize, need: usize },
    #[error("no configuration points inside the contour region")]
    EmptyInside,
    #[error(transparent)]
    Contour(#[from] crate::contour::ContourError),
    #[error("search too large: {sites} candidate grid sites exceed the cap {cap}")]
    SearchTooLarge { sites: usize, cap: usize },
    #[error("invalid request: {0}")]
    Invalid(String),
}
