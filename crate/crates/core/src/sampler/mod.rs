//! Grand-canonical Monte Carlo for the hard-disk model in a square box.
//!
//! The chain targets the finite-volume distribution proportional to
//! `z^N / N!` on hard-core configurations compatible with the boundary
//! condition, using insertion, deletion and translation moves. Insertion
//! and deletion balance each other exactly; translations accelerate
//! mixing at high activity.

mod oracle;

pub use oracle::{OracleError, PartitionOracle};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{CellIndex, ModelParams, Point};
use crate::Configuration;

/// Boundary condition for the box `[-n, n]^2`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum BoundaryCondition {
    /// No points outside the box.
    Empty,
    /// Torus wrap of the box; distances are torus distances.
    Periodic,
    /// An explicit hard-core point set outside the box.
    Fixed(Vec<Point>),
}

impl BoundaryCondition {
    pub fn name(&self) -> &'static str {
        match self {
            BoundaryCondition::Empty => "empty",
            BoundaryCondition::Periodic => "periodic",
            BoundaryCondition::Fixed(_) => "fixed",
        }
    }
}

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid boundary condition: {0}")]
    InvalidBoundary(String),
    #[error("invalid checkpoint: {0}")]
    InvalidCheckpoint(String),
}

/// Move proposal/acceptance counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveStats {
    pub insert_proposed: u64,
    pub insert_accepted: u64,
    pub delete_proposed: u64,
    pub delete_accepted: u64,
    pub translate_proposed: u64,
    pub translate_accepted: u64,
    pub sweeps: u64,
}

impl MoveStats {
    fn rate(acc: u64, prop: u64) -> f64 {
        if prop == 0 {
            0.0
        } else {
            acc as f64 / prop as f64
        }
    }

    pub fn insert_rate(&self) -> f64 {
        Self::rate(self.insert_accepted, self.insert_proposed)
    }

    pub fn delete_rate(&self) -> f64 {
        Self::rate(self.delete_accepted, self.delete_proposed)
    }

    pub fn translate_rate(&self) -> f64 {
        Self::rate(self.translate_accepted, self.translate_proposed)
    }
}

/// A sampled configuration together with the sweep it was taken at.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub sweep: u64,
    pub points: Vec<Point>,
}

/// Sweep schedule: `sweeps` sweeps of `moves_per_sweep` elementary moves,
/// sampling every `sample_every` sweeps once `burn_in` sweeps have passed.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SweepPlan {
    pub sweeps: u64,
    pub moves_per_sweep: u64,
    pub sample_every: u64,
    pub burn_in: u64,
}

impl SweepPlan {
    /// Default burn-in: the first 20% of sweeps are discarded.
    pub fn new(sweeps: u64, moves_per_sweep: u64, sample_every: u64) -> Self {
        SweepPlan {
            sweeps,
            moves_per_sweep,
            sample_every,
            burn_in: sweeps / 5,
        }
    }

    pub fn with_burn_in(mut self, burn_in: u64) -> Self {
        self.burn_in = burn_in;
        self
    }
}

/// Serializable image of a chain; restoring it continues the identical
/// trajectory (the RNG position is captured exactly).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainCheckpoint {
    pub params: ModelParams,
    pub boundary: BoundaryCondition,
    pub points: Vec<Point>,
    pub rng_seed: [u8; 32],
    pub rng_stream: u64,
    pub rng_word_pos: u128,
    pub stats: MoveStats,
    pub sweep: u64,
    pub exclusion_enabled: bool,
    pub max_displacement: f64,
}

/// Markov chain state: configuration, spatial index, boundary condition,
/// RNG and move statistics.
#[derive(Clone, Debug)]
pub struct ChainState {
    params: ModelParams,
    boundary: BoundaryCondition,
    index: CellIndex,
    boundary_index: Option<CellIndex>,
    rng: ChaCha8Rng,
    stats: MoveStats,
    sweep: u64,
    exclusion_enabled: bool,
    max_displacement: f64,
}

/// Proposal mixture: insertions and deletions must be proposed with equal
/// probability for exact balance; the remainder goes to translations.
const P_INSERT: f64 = 0.4;
const P_DELETE: f64 = 0.4;

impl ChainState {
    /// New chain with an empty initial configuration and a deterministic
    /// RNG stream derived from `seed`.
    pub fn new(
        params: ModelParams,
        boundary: BoundaryCondition,
        seed: u64,
    ) -> Result<Self, SamplerError> {
        params
            .validate()
            .map_err(|e| SamplerError::InvalidParams(e.to_string()))?;
        let boundary_index = match &boundary {
            BoundaryCondition::Empty => None,
            BoundaryCondition::Periodic => {
                if params.box_side() <= 4.0 * params.r {
                    return Err(SamplerError::InvalidBoundary(format!(
                        "periodic box side {} must exceed 4r = {}",
                        params.box_side(),
                        4.0 * params.r
                    )));
                }
                None
            }
            BoundaryCondition::Fixed(zeta) => {
                for p in zeta {
                    if params.in_box(*p) {
                        return Err(SamplerError::InvalidBoundary(format!(
                            "fixed boundary point ({}, {}) lies inside the box",
                            p.x, p.y
                        )));
                    }
                }
                if !crate::geometry::is_hard_core(zeta, params.r) {
                    return Err(SamplerError::InvalidBoundary(
                        "fixed boundary points violate the hard core".into(),
                    ));
                }
                Some(CellIndex::build(2.0 * params.r, zeta))
            }
        };
        Ok(ChainState {
            max_displacement: params.r,
            index: CellIndex::new(2.0 * params.r),
            boundary_index,
            rng: ChaCha8Rng::seed_from_u64(seed),
            stats: MoveStats::default(),
            sweep: 0,
            exclusion_enabled: true,
            params,
            boundary,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn boundary(&self) -> &BoundaryCondition {
        &self.boundary
    }

    pub fn stats(&self) -> &MoveStats {
        &self.stats
    }

    pub fn sweep(&self) -> u64 {
        self.sweep
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        self.index.points()
    }

    /// Maximum translation displacement per axis (defaults to `r`).
    pub fn set_max_displacement(&mut self, max_disp: f64) {
        assert!(max_disp > 0.0);
        self.max_displacement = max_disp;
    }

    /// Ideal-gas reference mode: disables the hard-core check so the chain
    /// targets a Poisson process of intensity `z`. Used for calibration
    /// tests; exclusion is on by default.
    pub fn set_exclusion_enabled(&mut self, enabled: bool) {
        self.exclusion_enabled = enabled;
    }

    /// True iff placing a point at `p` violates the hard core against the
    /// current configuration (excluding `exclude`), its periodic images,
    /// or the fixed boundary points.
    fn conflicts(&self, p: Point, exclude: Option<usize>) -> bool {
        if !self.exclusion_enabled {
            return false;
        }
        let exclusion = 2.0 * self.params.r;
        match &self.boundary {
            BoundaryCondition::Periodic => {
                let side = self.params.box_side();
                let reach = self.params.box_half_width + exclusion;
                for dx in -1i32..=1 {
                    for dy in -1i32..=1 {
                        let q = p.offset(dx as f64 * side, dy as f64 * side);
                        if q.x.abs() > reach || q.y.abs() > reach {
                            continue;
                        }
                        if self.index.has_point_closer_than(q, exclusion, exclude) {
                            return true;
                        }
                    }
                }
                false
            }
            _ => {
                if self.index.has_point_closer_than(p, exclusion, exclude) {
                    return true;
                }
                if let Some(b) = &self.boundary_index {
                    if b.has_point_closer_than(p, exclusion, None) {
                        return true;
                    }
                }
                false
            }
        }
    }

    /// Insertion move: a uniform proposal in the box, rejected outright on
    /// a hard-core violation, otherwise accepted with probability
    /// `min(1, z |Λ| / (N + 1))`.
    pub fn step_insert(&mut self) {
        self.stats.insert_proposed += 1;
        let n = self.params.box_half_width;
        let p = Point::new(
            -n + self.rng.random::<f64>() * self.params.box_side(),
            -n + self.rng.random::<f64>() * self.params.box_side(),
        );
        if self.conflicts(p, None) {
            return;
        }
        let ratio = self.params.z * self.params.box_area() / (self.index.len() as f64 + 1.0);
        if ratio >= 1.0 || self.rng.random::<f64>() < ratio {
            let id = self.index.insert(p);
            self.stats.insert_accepted += 1;
            debug_assert!(!self.conflicts(p, Some(id)));
        }
    }

    /// Deletion move: a uniformly chosen point is removed with probability
    /// `min(1, N / (z |Λ|))`. A no-op on the empty configuration.
    pub fn step_delete(&mut self) {
        self.stats.delete_proposed += 1;
        let n = self.index.len();
        if n == 0 {
            return;
        }
        let id = self.rng.random_range(0..n);
        let ratio = n as f64 / (self.params.z * self.params.box_area());
        if ratio >= 1.0 || self.rng.random::<f64>() < ratio {
            self.index.remove(id);
            self.stats.delete_accepted += 1;
        }
    }

    /// Translation move: a uniformly chosen point receives a uniform
    /// displacement in a square of half-width `max_displacement`; accepted
    /// iff the result stays in the box (wraps, under periodic boundary)
    /// and keeps the hard core.
    pub fn step_translate(&mut self) {
        self.stats.translate_proposed += 1;
        let n = self.index.len();
        if n == 0 {
            return;
        }
        let id = self.rng.random_range(0..n);
        let d = self.max_displacement;
        let dx = (2.0 * self.rng.random::<f64>() - 1.0) * d;
        let dy = (2.0 * self.rng.random::<f64>() - 1.0) * d;
        let from = self.index.point(id);
        let mut to = from.offset(dx, dy);
        match self.boundary {
            BoundaryCondition::Periodic => {
                to = self.wrap(to);
            }
            _ => {
                if !self.params.in_box(to) {
                    return;
                }
            }
        }
        if self.conflicts(to, Some(id)) {
            return;
        }
        self.index.move_point(id, to);
        self.stats.translate_accepted += 1;
        debug_assert!(!self.conflicts(to, Some(id)));
    }

    fn wrap(&self, p: Point) -> Point {
        let n = self.params.box_half_width;
        let side = self.params.box_side();
        let wrap1 = |x: f64| {
            let mut t = (x + n) % side;
            if t < 0.0 {
                t += side;
            }
            t - n
        };
        Point::new(wrap1(p.x), wrap1(p.y))
    }

    /// One elementary move of the fixed mixture (insert 40%, delete 40%,
    /// translate 20%).
    pub fn step(&mut self) {
        let u = self.rng.random::<f64>();
        if u < P_INSERT {
            self.step_insert();
        } else if u < P_INSERT + P_DELETE {
            self.step_delete();
        } else {
            self.step_translate();
        }
    }

    /// Verify the hard-core invariant of the full configuration (and the
    /// boundary images). Panics on violation; runs every sweep.
    pub fn audit(&self) {
        if !self.exclusion_enabled {
            return;
        }
        for id in 0..self.index.len() {
            assert!(
                !self.conflicts(self.index.point(id), Some(id)),
                "hard-core invariant violated at point {id}"
            );
        }
    }

    /// Run the sweep schedule and return deep-copied snapshots.
    pub fn run_sweeps(&mut self, plan: &SweepPlan) -> Vec<Snapshot> {
        assert!(plan.moves_per_sweep > 0, "moves_per_sweep must be positive");
        assert!(plan.sample_every > 0, "sample_every must be positive");
        let mut snapshots = Vec::new();
        for s in 1..=plan.sweeps {
            for _ in 0..plan.moves_per_sweep {
                self.step();
            }
            self.sweep += 1;
            self.stats.sweeps += 1;
            self.audit();
            if s > plan.burn_in && (s - plan.burn_in).is_multiple_of(plan.sample_every) {
                snapshots.push(Snapshot {
                    sweep: self.sweep,
                    points: self.index.points().to_vec(),
                });
            }
        }
        snapshots
    }

    /// Current configuration as an owned point list.
    pub fn configuration(&self) -> Configuration {
        self.index.points().to_vec()
    }

    pub fn checkpoint(&self) -> ChainCheckpoint {
        ChainCheckpoint {
            params: self.params,
            boundary: self.boundary.clone(),
            points: self.index.points().to_vec(),
            rng_seed: self.rng.get_seed(),
            rng_stream: self.rng.get_stream(),
            rng_word_pos: self.rng.get_word_pos(),
            stats: self.stats,
            sweep: self.sweep,
            exclusion_enabled: self.exclusion_enabled,
            max_displacement: self.max_displacement,
        }
    }

    pub fn from_checkpoint(cp: ChainCheckpoint) -> Result<Self, SamplerError> {
        let mut chain = ChainState::new(cp.params, cp.boundary, 0)?;
        let mut rng = ChaCha8Rng::from_seed(cp.rng_seed);
        rng.set_stream(cp.rng_stream);
        rng.set_word_pos(cp.rng_word_pos);
        chain.rng = rng;
        chain.index = CellIndex::build(2.0 * cp.params.r, &cp.points);
        chain.stats = cp.stats;
        chain.sweep = cp.sweep;
        chain.exclusion_enabled = cp.exclusion_enabled;
        chain.max_displacement = cp.max_displacement;
        if chain.exclusion_enabled {
            for id in 0..chain.index.len() {
                if !chain.params.in_box(chain.index.point(id)) {
                    return Err(SamplerError::InvalidCheckpoint(
                        "checkpoint point outside the box".into(),
                    ));
                }
                if chain.conflicts(chain.index.point(id), Some(id)) {
                    return Err(SamplerError::InvalidCheckpoint(
                        "checkpoint configuration violates the hard core".into(),
                    ));
                }
            }
        }
        Ok(chain)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(z: f64) -> ModelParams {
        ModelParams::new(0.5, 2.1, 0.2, 0.09, z, 5.0).unwrap()
    }

    #[test]
    fn init_is_empty_and_deterministic() {
        let chain = ChainState::new(params(1.0), BoundaryCondition::Empty, 42).unwrap();
        assert_eq!(chain.len(), 0);
        assert_eq!(chain.sweep(), 0);

        let mut a = ChainState::new(params(1.0), BoundaryCondition::Empty, 42).unwrap();
        let mut b = ChainState::new(params(1.0), BoundaryCondition::Empty, 42).unwrap();
        let plan = SweepPlan::new(50, 20, 5);
        assert_eq!(a.run_sweeps(&plan), b.run_sweeps(&plan));
    }

    #[test]
    fn rejects_l_equal_3r() {
        let p = ModelParams {
            r: 0.5,
            connection_diameter: 1.5,
            delta: 0.2,
            epsilon: 0.09,
            z: 1.0,
            box_half_width: 5.0,
        };
        let err = ChainState::new(p, BoundaryCondition::Empty, 1).unwrap_err();
        assert!(err.to_string().contains("L > 3r"));
    }

    #[test]
    fn insert_into_empty_box_accepts_when_ratio_large() {
        // z |Λ| = 100 >= 1: the first insertion into an empty box cannot
        // be rejected.
        let mut chain = ChainState::new(params(1.0), BoundaryCondition::Empty, 7).unwrap();
        chain.step_insert();
        assert_eq!(chain.len(), 1);
        assert_eq!(chain.stats().insert_accepted, 1);
    }

    #[test]
    fn insert_never_accepted_at_zero_activity() {
        let mut chain = ChainState::new(params(0.0), BoundaryCondition::Empty, 7).unwrap();
        for _ in 0..200 {
            chain.step_insert();
        }
        assert_eq!(chain.len(), 0);
    }

    #[test]
    fn delete_on_empty_is_noop() {
        let mut chain = ChainState::new(params(1.0), BoundaryCondition::Empty, 7).unwrap();
        chain.step_delete();
        assert_eq!(chain.stats().delete_proposed, 1);
        assert_eq!(chain.stats().delete_accepted, 0);
    }

    #[test]
    fn delete_single_point_when_ratio_one() {
        // N = 1 and z |Λ| = 1: acceptance probability exactly 1.
        let p = ModelParams::new(0.5, 2.1, 0.2, 0.09, 1.0 / 100.0, 5.0).unwrap();
        let mut chain = ChainState::new(p, BoundaryCondition::Empty, 3).unwrap();
        chain.index.insert(Point::new(0.0, 0.0));
        chain.step_delete();
        assert_eq!(chain.len(), 0);
    }

    #[test]
    fn insert_delete_ratios_multiply_to_gibbs_weight() {
        // Detailed balance on a two-state truncation: the flow ratio of an
        // insertion at x (proposal density 1/|Λ|) against the deletion of
        // that point (probability 1/(N+1)) must equal the Gibbs weight
        // ratio of the two states, which is z. Holds in both branches of
        // the min.
        for (z, n) in [(2.0, 0usize), (0.002, 0), (1.0, 3), (0.5, 9)] {
            let area = 100.0;
            let a_ins = (z * area / (n as f64 + 1.0)).min(1.0);
            let a_del = ((n as f64 + 1.0) / (z * area)).min(1.0);
            let flow_ratio = (1.0 / area) * a_ins / ((1.0 / (n as f64 + 1.0)) * a_del);
            let gibbs_ratio = z;
            assert!(
                (flow_ratio - gibbs_ratio).abs() < 1e-12 * gibbs_ratio.max(1.0),
                "z={z} n={n}: {flow_ratio} vs {gibbs_ratio}"
            );
        }
    }

    #[test]
    fn translate_zero_displacement_always_accepted() {
        let mut chain = ChainState::new(params(1.0), BoundaryCondition::Empty, 7).unwrap();
        chain.index.insert(Point::new(0.0, 0.0));
        chain.max_displacement = 1e-300; // forces (numerically) zero displacement
        chain.step_translate();
        assert_eq!(chain.stats().translate_accepted, 1);
    }

    #[test]
    fn translate_on_empty_is_noop() {
        let mut chain = ChainState::new(params(1.0), BoundaryCondition::Empty, 7).unwrap();
        chain.step_translate();
        assert_eq!(chain.stats().translate_proposed, 1);
        assert_eq!(chain.stats().translate_accepted, 0);
    }

    #[test]
    fn overlap_proposals_rejected() {
        let mut chain = ChainState::new(params(1000.0), BoundaryCondition::Empty, 11).unwrap();
        let plan = SweepPlan::new(30, 50, 1);
        chain.run_sweeps(&plan); // audit() enforces the invariant each sweep
        assert!(!chain.is_empty());
        assert!(crate::geometry::is_hard_core(chain.points(), 0.5));
    }

    #[test]
    fn fixed_boundary_blocks_nearby_insertions() {
        // A wall of boundary points hugging the right edge: insertions
        // within 2r of the wall must always be rejected.
        let zeta: Vec<Point> = (0..11).map(|k| Point::new(5.3, -5.0 + k as f64)).collect();
        let mut chain = ChainState::new(params(50.0), BoundaryCondition::Fixed(zeta), 5).unwrap();
        let plan = SweepPlan::new(50, 50, 1);
        chain.run_sweeps(&plan);
        for p in chain.points() {
            assert!(p.x < 5.3 - 1.0 + 1e-12, "point {p:?} too close to the wall");
        }
    }

    #[test]
    fn fixed_boundary_validation() {
        let inside = vec![Point::new(0.0, 0.0)];
        assert!(ChainState::new(params(1.0), BoundaryCondition::Fixed(inside), 1).is_err());
        let overlapping = vec![Point::new(6.0, 0.0), Point::new(6.5, 0.0)];
        assert!(ChainState::new(params(1.0), BoundaryCondition::Fixed(overlapping), 1).is_err());
    }

    #[test]
    fn periodic_wraps_translations() {
        let mut chain = ChainState::new(params(1.0), BoundaryCondition::Periodic, 9).unwrap();
        let plan = SweepPlan::new(100, 30, 10);
        let snaps = chain.run_sweeps(&plan);
        for s in &snaps {
            for p in &s.points {
                assert!(chain.params().in_box(*p));
            }
        }
    }

    #[test]
    fn periodic_hard_core_across_seam() {
        // Two points near opposite edges are torus-close.
        let mut chain = ChainState::new(params(1.0), BoundaryCondition::Periodic, 9).unwrap();
        chain.index.insert(Point::new(-4.9, 0.0));
        assert!(chain.conflicts(Point::new(4.9, 0.0), None)); // torus distance 0.2 < 1
        assert!(!chain.conflicts(Point::new(3.0, 0.0), None));
    }

    #[test]
    fn zero_sweeps_no_snapshots() {
        let mut chain = ChainState::new(params(1.0), BoundaryCondition::Empty, 1).unwrap();
        let plan = SweepPlan::new(0, 10, 1);
        assert!(chain.run_sweeps(&plan).is_empty());
    }

    #[test]
    fn checkpoint_resume_matches_uninterrupted() {
        // Split at a multiple of sample_every so the sampling grid of the
        // resumed segment lines up with the uninterrupted run.
        let plan_all = SweepPlan::new(120, 25, 3).with_burn_in(0);
        let mut whole = ChainState::new(params(2.0), BoundaryCondition::Periodic, 77).unwrap();
        let full = whole.run_sweeps(&plan_all);

        let plan_a = SweepPlan::new(51, 25, 3).with_burn_in(0);
        let mut part = ChainState::new(params(2.0), BoundaryCondition::Periodic, 77).unwrap();
        let mut first = part.run_sweeps(&plan_a);
        let cp = part.checkpoint();
        let mut resumed = ChainState::from_checkpoint(cp).unwrap();
        let plan_b = SweepPlan::new(69, 25, 3).with_burn_in(0);
        let mut rest = resumed.run_sweeps(&plan_b);
        first.append(&mut rest);
        assert_eq!(full, first);
    }
}
