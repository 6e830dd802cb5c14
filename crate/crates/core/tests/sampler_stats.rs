//! Distributional checks of the chain: stationarity against the exact
//! small-box reference, the ideal-gas limit, and torus homogeneity.
//! The acceptance suite runs stricter versions at full scale.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use hdpc_core::geometry::ModelParams;
use hdpc_core::sampler::{BoundaryCondition, ChainState, PartitionOracle, SweepPlan};

fn small_box(z: f64) -> ModelParams {
    // Box [-0.75, 0.75]^2: at most five disks of radius 0.5 fit.
    ModelParams::new(0.5, 1.6, 0.02, 0.009, z, 0.75).unwrap()
}

/// Total variation distance between the empirical counts and a reference
/// distribution.
fn total_variation(counts: &[u64], reference: &[f64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let mut tv = 0.0;
    for k in 0..counts.len().max(reference.len()) {
        let emp = counts.get(k).copied().unwrap_or(0) as f64 / n as f64;
        let re = reference.get(k).copied().unwrap_or(0.0);
        tv += (emp - re).abs();
    }
    tv / 2.0
}

#[test]
fn small_box_counts_match_oracle() {
    let params = small_box(1.0);
    let oracle = PartitionOracle::estimate(params, 7, 200_000).unwrap();
    let reference = oracle.distribution(1.0).unwrap();
    let mut chain = ChainState::new(params, BoundaryCondition::Empty, 31).unwrap();
    let plan = SweepPlan::new(60_000, 10, 1);
    let mut counts = vec![0u64; 8];
    for snap in chain.run_sweeps(&plan) {
        counts[snap.points.len().min(7)] += 1;
    }
    let tv = total_variation(&counts, &reference);
    assert!(tv < 0.02, "TV distance {tv} (counts {counts:?})");
}

#[test]
fn ideal_gas_limit_is_poisson() {
    // Exclusion disabled: N is Poisson(z |Λ|). Chi-square over the bulk
    // bins at significance 0.01.
    let params = small_box(4.0); // z |Λ| = 9
    let mu = params.z * params.box_area();
    let mut chain = ChainState::new(params, BoundaryCondition::Empty, 57).unwrap();
    chain.set_exclusion_enabled(false);
    let plan = SweepPlan::new(80_000, 12, 1);
    let mut counts = std::collections::HashMap::<usize, u64>::new();
    let mut total = 0u64;
    for snap in chain.run_sweeps(&plan) {
        *counts.entry(snap.points.len()).or_insert(0) += 1;
        total += 1;
    }
    // Poisson pmf via the recurrence p_{k+1} = p_k mu / (k+1).
    let kmax = 40usize;
    let mut pmf = vec![0.0f64; kmax + 1];
    pmf[0] = (-mu).exp();
    for k in 0..kmax {
        pmf[k + 1] = pmf[k] * mu / (k + 1) as f64;
    }
    let mut chi2 = 0.0;
    let mut dof = 0i64;
    for (k, &p) in pmf.iter().enumerate() {
        let expected = p * total as f64;
        if expected < 8.0 {
            continue;
        }
        let observed = counts.get(&k).copied().unwrap_or(0) as f64;
        chi2 += (observed - expected) * (observed - expected) / expected;
        dof += 1;
    }
    assert!(dof > 3);
    let dist = ChiSquared::new((dof - 1) as f64).unwrap();
    let p_value = 1.0 - dist.cdf(chi2);
    assert!(p_value > 0.01, "chi2 {chi2} with {dof} bins, p = {p_value}");
}

#[test]
fn periodic_density_is_homogeneous() {
    // Torus chains are translation invariant: bin occupation over a 3x3
    // grid should be uniform. Chi-square at significance 0.001.
    let params = ModelParams::new(0.5, 2.1, 0.2, 0.09, 1.5, 6.0).unwrap();
    let mut chain = ChainState::new(params, BoundaryCondition::Periodic, 101).unwrap();
    let plan = SweepPlan::new(4_000, 150, 4);
    let mut bins = [0u64; 9];
    let mut total = 0u64;
    for snap in chain.run_sweeps(&plan) {
        for p in &snap.points {
            let i = (((p.x + 6.0) / 4.0) as usize).min(2);
            let j = (((p.y + 6.0) / 4.0) as usize).min(2);
            bins[3 * i + j] += 1;
            total += 1;
        }
    }
    let expected = total as f64 / 9.0;
    let chi2: f64 = bins
        .iter()
        .map(|&o| (o as f64 - expected) * (o as f64 - expected) / expected)
        .sum();
    // Snapshots are correlated, which inflates the statistic; the check
    // is a coarse homogeneity guard, so test at a loose threshold.
    let dist = ChiSquared::new(8.0).unwrap();
    let p_value = 1.0 - dist.cdf(chi2 / 8.0);
    assert!(p_value > 0.001, "chi2 {chi2}, bins {bins:?}");
}
