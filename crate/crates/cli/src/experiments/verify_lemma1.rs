use anyhow::Result;

use hdpc_core::contour::{decompose_components, extract_component_contour};
use hdpc_core::peierls::{compute_constants, plan_shift, verify_lemma1};

use crate::io;

use super::{run_cell, Experiment, RunContext};

/// Sample configurations and check the shift construction on every
/// contour: pairwise insertion-point separation, clearance after the
/// shift, arc multiplicities, the local midpoint cap, and the structural
/// properties of the region shift. Zero failures expected.
pub struct VerifyLemma1;

impl Experiment for VerifyLemma1 {
    fn name(&self) -> &'static str {
        "verify-lemma1"
    }

    fn about(&self) -> &'static str {
        "check the shift construction on every sampled contour"
    }

    fn run(&self, ctx: &RunContext) -> Result<()> {
        let config = &ctx.config;
        let &z = config
            .z_values
            .first()
            .ok_or_else(|| anyhow::anyhow!("verify-lemma1 needs a non-empty z grid"))?;
        let seed = crate::seeding::cell_seed(config.seed, 0, 0);
        let (chain, snapshots) = run_cell(config, z, seed)?;
        let params = *chain.params();
        let constants = compute_constants(&params);

        let mut verified = 0u64;
        let mut degenerate = 0u64;
        let mut configs_with_contours = 0u64;
        let mut failures: Vec<String> = Vec::new();
        let mut min_pair_sep = f64::INFINITY;
        let mut min_clearance = f64::INFINITY;
        let mut max_arcs_per_center = 0usize;
        let mut max_local_midpoints = 0usize;
        let mut largest_size = 0usize;
        for snap in &snapshots {
            let d = decompose_components(&snap.points, &params);
            let mut any = false;
            for (idx, _) in d.finite_components() {
                let contour = match extract_component_contour(&snap.points, &d, idx, &params) {
                    Ok(c) => c,
                    Err(hdpc_core::contour::ContourError::Geometry(_)) => {
                        degenerate += 1;
                        continue;
                    }
                    Err(e) => return Err(e.into()),
                };
                any = true;
                let plan = plan_shift(&contour, &constants, &params)?;
                let report = verify_lemma1(&snap.points, &contour, &plan, &params, &constants)?;
                verified += 1;
                largest_size = largest_size.max(report.size);
                min_pair_sep = min_pair_sep.min(report.pair_separation_min);
                min_clearance = min_clearance.min(report.clearance_min);
                max_arcs_per_center = max_arcs_per_center.max(report.max_arcs_per_center);
                max_local_midpoints = max_local_midpoints.max(report.max_local_midpoints);
                if !report.pass() {
                    failures.extend(report.failures);
                }
            }
            configs_with_contours += any as u64;
        }

        std::fs::create_dir_all(&ctx.out)?;
        let summary = serde_json::json!({
            "schemaVersion": io::SCHEMA_VERSION,
            "z": z,
            "seed": seed,
            "snapshots": snapshots.len(),
            "configsWithContours": configs_with_contours,
            "contoursVerified": verified,
            "degenerateContours": degenerate,
            "largestContourSize": largest_size,
            "minPairSeparation": finite_or_null(min_pair_sep),
            "minClearance": finite_or_null(min_clearance),
            "maxArcsPerCenter": max_arcs_per_center,
            "maxLocalMidpoints": max_local_midpoints,
            "requiredPairSeparation": params.delta + 2.0 * params.r,
            "requiredClearance": params.delta / 2.0 + 2.0 * params.r,
            "failures": failures,
        });
        io::atomic_write(
            &ctx.out.join("verify_lemma1.json"),
            serde_json::to_string_pretty(&summary)?.as_bytes(),
        )?;
        super::write_meta(ctx, self.name())?;
        println!(
            "verify-lemma1: {} contours verified, {} failures",
            verified,
            summary["failures"].as_array().map(|a| a.len()).unwrap_or(0)
        );
        Ok(())
    }
}

fn finite_or_null(x: f64) -> serde_json::Value {
    if x.is_finite() {
        serde_json::json!(x)
    } else {
        serde_json::Value::Null
    }
}
