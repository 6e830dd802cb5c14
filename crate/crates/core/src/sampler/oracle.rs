use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ModelParams, Point};

#[derive(Debug, Error)]
pub enum OracleError {
    /// Probability mass beyond the particle-count cap exceeds the budget.
    #[error("truncation error: tail mass beyond max_n bounded by {tail:e} exceeds {budget:e}")]
    Truncation { tail: f64, budget: f64 },
    #[error("invalid oracle request: {0}")]
    Invalid(String),
}

/// Quasi-random estimates of the configuration-space volumes
/// `L_N = (1/N!) ∫ 1[hard core] dx_1 … dx_N` over the box, for
/// `N = 0..=max_n`. Weighting by `z^N` gives the exact particle-count
/// distribution of the small box.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartitionOracle {
    pub params: ModelParams,
    pub max_n: usize,
    /// `values[k]` estimates `L_k`; `values[0] = 1` by convention.
    pub values: Vec<f64>,
    /// Batch-means standard errors of `values`.
    pub std_errs: Vec<f64>,
    pub points_per_estimate: u64,
}

/// Additive quasi-random sequence in `[0,1)^d` built from the generalized
/// golden ratio: `x_k = frac(0.5 + k * alpha)` with `alpha_j = phi_d^-(j+1)`
/// and `phi_d` the positive root of `x^(d+1) = x + 1`.
struct RSequence {
    alpha: Vec<f64>,
    state: Vec<f64>,
}

impl RSequence {
    fn new(dim: usize) -> Self {
        let mut phi = 2.0f64;
        for _ in 0..64 {
            phi = (1.0 + phi).powf(1.0 / (dim as f64 + 1.0));
        }
        let mut alpha = Vec::with_capacity(dim);
        let mut a = 1.0;
        for _ in 0..dim {
            a /= phi;
            alpha.push(a);
        }
        RSequence {
            state: vec![0.5; dim],
            alpha,
        }
    }

    fn next_into(&mut self, out: &mut [f64]) {
        for ((s, &a), o) in self.state.iter_mut().zip(&self.alpha).zip(out) {
            *s += a;
            if *s >= 1.0 {
                *s -= 1.0;
            }
            *o = *s;
        }
    }
}

const BATCHES: usize = 64;

impl PartitionOracle {
    /// Estimate `L_0..=L_max_n` with `points_per_estimate` quasi-random
    /// configurations per particle count.
    pub fn estimate(
        params: ModelParams,
        max_n: usize,
        points_per_estimate: u64,
    ) -> Result<Self, OracleError> {
        params
            .validate()
            .map_err(|e| OracleError::Invalid(e.to_string()))?;
        if points_per_estimate < BATCHES as u64 {
            return Err(OracleError::Invalid(format!(
                "points_per_estimate must be at least {BATCHES}"
            )));
        }
        let side = params.box_side();
        let half = params.box_half_width;
        let exclusion_sq = (2.0 * params.r) * (2.0 * params.r);
        let area = params.box_area();

        let mut values = vec![0.0; max_n + 1];
        let mut std_errs = vec![0.0; max_n + 1];
        values[0] = 1.0;
        if max_n >= 1 {
            // A single point never violates the hard core: L_1 = |Λ| exactly.
            values[1] = area;
        }
        let mut coords = Vec::new();
        let mut pts: Vec<Point> = Vec::new();
        for n in 2..=max_n {
            let mut seq = RSequence::new(2 * n);
            coords.resize(2 * n, 0.0);
            pts.resize(n, Point::new(0.0, 0.0));
            let per_batch = points_per_estimate / BATCHES as u64;
            let mut batch_means = [0.0f64; BATCHES];
            for (b, bm) in batch_means.iter_mut().enumerate().take(BATCHES) {
                let mut hits = 0u64;
                for _ in 0..per_batch {
                    seq.next_into(&mut coords);
                    for (k, p) in pts.iter_mut().enumerate() {
                        p.x = -half + side * coords[2 * k];
                        p.y = -half + side * coords[2 * k + 1];
                    }
                    if pairwise_ok(&pts, exclusion_sq) {
                        hits += 1;
                    }
                }
                *bm = hits as f64 / per_batch as f64;
                let _ = b;
            }
            let mean: f64 = batch_means.iter().sum::<f64>() / BATCHES as f64;
            let var: f64 = batch_means
                .iter()
                .map(|m| (m - mean) * (m - mean))
                .sum::<f64>()
                / (BATCHES as f64 - 1.0);
            let se_mean = (var / BATCHES as f64).sqrt();
            // L_n = |Λ|^n / n! * P(hard core)
            let scale = (0..n).fold(1.0f64, |acc, k| acc * area / (k as f64 + 1.0));
            values[n] = scale * mean;
            std_errs[n] = scale * se_mean;
        }
        Ok(PartitionOracle {
            params,
            max_n,
            values,
            std_errs,
            points_per_estimate,
        })
    }

    /// Hard cap from disjoint disks: any hard-core configuration in the box
    /// has at most this many points, so `L_k = 0` beyond it.
    pub fn packing_bound(params: &ModelParams) -> usize {
        let side = params.box_side();
        let cap = (side + 2.0 * params.r).powi(2) / (std::f64::consts::PI * params.r * params.r);
        cap.floor() as usize
    }

    /// The particle-count distribution `P(N = k) ∝ z^k L_k` for `k = 0..=max_n`.
    ///
    /// Fails if the neglected tail (bounded through `L_k <= |Λ|^k / k!`)
    /// could carry more than `1e-6` of the mass.
    pub fn distribution(&self, z: f64) -> Result<Vec<f64>, OracleError> {
        const BUDGET: f64 = 1e-6;
        if z < 0.0 || !z.is_finite() {
            return Err(OracleError::Invalid(format!(
                "activity must be >= 0, got {z}"
            )));
        }
        let weights: Vec<f64> = self
            .values
            .iter()
            .enumerate()
            .map(|(k, &l)| z.powi(k as i32) * l)
            .collect();
        let total: f64 = weights.iter().sum();
        if self.max_n < Self::packing_bound(&self.params) {
            // Tail bound: sum of z^k |Λ|^k / k! beyond max_n.
            let mu = z * self.params.box_area();
            let mut term =
                (0..=self.max_n).fold(
                    1.0f64,
                    |acc, k| {
                        if k == 0 {
                            acc
                        } else {
                            acc * mu / k as f64
                        }
                    },
                );
            let mut tail = 0.0f64;
            let mut k = self.max_n + 1;
            loop {
                term *= mu / k as f64;
                tail += term;
                if !tail.is_finite() || tail > total {
                    break; // hopeless; the share test below fails anyway
                }
                if term < 1e-18 * (total + tail) || k > self.max_n + 100_000 {
                    break;
                }
                k += 1;
            }
            let share = if tail.is_finite() {
                tail / (total + tail)
            } else {
                1.0
            };
            if share > BUDGET {
                return Err(OracleError::Truncation {
                    tail: share,
                    budget: BUDGET,
                });
            }
        }
        Ok(weights.iter().map(|w| w / total).collect())
    }
}

fn pairwise_ok(pts: &[Point], exclusion_sq: f64) -> bool {
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            if pts[i].dist_sq(pts[j]) < exclusion_sq {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_activity_concentrates_on_empty() {
        let params = ModelParams::new(0.5, 1.6, 0.02, 0.009, 1.0, 0.75).unwrap();
        let oracle = PartitionOracle::estimate(params, 5, 10_000).unwrap();
        let dist = oracle.distribution(0.0).unwrap();
        assert!((dist[0] - 1.0).abs() < 1e-12);
        assert!(dist[1..].iter().all(|&p| p == 0.0));
    }

    #[test]
    fn one_point_weight_is_exact_area() {
        let params = ModelParams::new(0.5, 1.6, 0.02, 0.009, 1.0, 0.75).unwrap();
        let oracle = PartitionOracle::estimate(params, 3, 10_000).unwrap();
        assert!((oracle.values[1] - 2.25).abs() < 1e-12);
    }

    #[test]
    fn box_too_small_for_two_disks() {
        // Side 0.7: the diagonal 0.7·√2 < 2r = 1, so no two points can
        // coexist and the ratio P(1)/P(0) is exactly z |Λ|.
        let params = ModelParams::new(0.5, 1.6, 0.02, 0.009, 1.0, 0.35).unwrap();
        let oracle = PartitionOracle::estimate(params, 4, 20_000).unwrap();
        assert_eq!(oracle.values[2], 0.0);
        let z = 3.0;
        let dist = oracle.distribution(z).unwrap();
        let ratio = dist[1] / dist[0];
        let area = params.box_area();
        assert!(
            (ratio - z * area).abs() < 1e-9,
            "ratio {ratio} vs {}",
            z * area
        );
    }

    #[test]
    fn truncation_detected() {
        // Cap far below what z |Λ| would populate in the ideal-gas bound.
        let params = ModelParams::new(0.01, 0.05, 0.004, 0.0019, 50.0, 5.0).unwrap();
        let oracle = PartitionOracle::estimate(params, 3, 6_400).unwrap();
        match oracle.distribution(50.0) {
            Err(OracleError::Truncation { .. }) => {}
            other => panic!("expected truncation, got {other:?}"),
        }
    }

    #[test]
    fn packing_bound_small_box() {
        let params = ModelParams::new(0.5, 1.6, 0.02, 0.009, 1.0, 0.75).unwrap();
        // (1.5 + 1)^2 / (π 0.25) ≈ 7.96
        assert_eq!(PartitionOracle::packing_bound(&params), 7);
    }
}
