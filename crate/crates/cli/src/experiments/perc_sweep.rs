use anyhow::Result;
use rayon::prelude::*;

use hdpc_core::contour::decompose_components_with_topology;
use hdpc_core::percolation::{
    build_clusters, detect_spanning, origin_proximity_discrete, Topology,
};
use hdpc_core::sampler::BoundaryCondition;

use crate::config::RunConfig;
use crate::io;

use super::{run_cell, Experiment, RunContext};

/// Percolation sweep across the activity grid: per (z, seed) cell, the
/// spanning probability with confidence interval, densities and origin
/// events, plus one aggregate row per activity.
pub struct PercSweep;

struct CellResult {
    z: f64,
    seed: u64,
    sweeps: u64,
    snapshots: u64,
    spanning: u64,
    mean_density: f64,
    largest_frac: f64,
    origin_events: u64,
    origin_events_discrete: u64,
    insert_accept: f64,
    delete_accept: f64,
    translate_accept: f64,
}

pub(crate) const CSV_HEADER: &str = "schemaVersion,z,seed,sweeps,meanDensity,spanProb,spanCI_lo,spanCI_hi,largestFrac,originEventFreq,originEventDiscreteFreq,insertAccept,deleteAccept,translateAccept";

impl Experiment for PercSweep {
    fn name(&self) -> &'static str {
        "perc-sweep"
    }

    fn about(&self) -> &'static str {
        "sweep activities; measure spanning probability and origin events"
    }

    fn run(&self, ctx: &RunContext) -> Result<()> {
        let config = &ctx.config;
        let cells: Vec<(usize, u64)> = (0..config.z_values.len())
            .flat_map(|zi| (0..config.replicas).map(move |rep| (zi, rep)))
            .collect();

        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(ctx.jobs.max(1))
            .build()?;
        let results: Vec<Result<CellResult>> = pool.install(|| {
            cells
                .par_iter()
                .map(|&(zi, rep)| run_percolation_cell(config, zi, rep))
                .collect()
        });

        let mut rows = Vec::new();
        let mut failures = Vec::new();
        for r in results {
            match r {
                Ok(cell) => rows.push(cell),
                Err(e) => failures.push(e.to_string()),
            }
        }

        let mut csv = String::from(CSV_HEADER);
        csv.push('\n');
        for cell in &rows {
            let (lo, hi) = io::wilson_interval(cell.spanning, cell.snapshots);
            let span_prob = ratio(cell.spanning, cell.snapshots);
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                io::SCHEMA_VERSION,
                cell.z,
                cell.seed,
                cell.sweeps,
                cell.mean_density,
                span_prob,
                lo,
                hi,
                cell.largest_frac,
                ratio(cell.origin_events, cell.snapshots),
                ratio(cell.origin_events_discrete, cell.snapshots),
                cell.insert_accept,
                cell.delete_accept,
                cell.translate_accept,
            ));
        }
        // Aggregate rows: replicas pooled per activity, seed column "all".
        for (zi, &z) in config.z_values.iter().enumerate() {
            let group: Vec<&CellResult> =
                rows.iter().filter(|c| config.z_values[zi] == c.z).collect();
            if group.is_empty() {
                continue;
            }
            let snaps: u64 = group.iter().map(|c| c.snapshots).sum();
            let spans: u64 = group.iter().map(|c| c.spanning).sum();
            let origins: u64 = group.iter().map(|c| c.origin_events).sum();
            let origins_d: u64 = group.iter().map(|c| c.origin_events_discrete).sum();
            let (lo, hi) = io::wilson_interval(spans, snaps);
            let mean = |f: &dyn Fn(&CellResult) -> f64| {
                group.iter().map(|c| f(c)).sum::<f64>() / group.len() as f64
            };
            csv.push_str(&format!(
                "{},{},all,{},{},{},{},{},{},{},{},{},{},{}\n",
                io::SCHEMA_VERSION,
                z,
                group[0].sweeps,
                mean(&|c| c.mean_density),
                ratio(spans, snaps),
                lo,
                hi,
                mean(&|c| c.largest_frac),
                ratio(origins, snaps),
                ratio(origins_d, snaps),
                mean(&|c| c.insert_accept),
                mean(&|c| c.delete_accept),
                mean(&|c| c.translate_accept),
            ));
        }

        std::fs::create_dir_all(&ctx.out)?;
        io::atomic_write(&ctx.out.join("perc_sweep.csv"), csv.as_bytes())?;
        if !failures.is_empty() {
            let report = serde_json::json!({
                "schemaVersion": io::SCHEMA_VERSION,
                "failedCells": failures,
            });
            io::atomic_write(
                &ctx.out.join("failures.json"),
                serde_json::to_string_pretty(&report)?.as_bytes(),
            )?;
        }
        super::write_meta(ctx, self.name())?;
        println!(
            "perc-sweep: {} cells ({} failed) across {} activities",
            rows.len(),
            failures.len(),
            config.z_values.len()
        );
        Ok(())
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn run_percolation_cell(config: &RunConfig, z_index: usize, replica: u64) -> Result<CellResult> {
    let z = config.z_values[z_index];
    let seed = crate::seeding::cell_seed(config.seed, z_index as u64, replica);
    let (chain, snapshots) = run_cell(config, z, seed)?;
    let params = *chain.params();
    let topology = match chain.boundary() {
        BoundaryCondition::Periodic => Topology::Torus {
            side: params.box_side(),
        },
        _ => Topology::Plane,
    };

    let mut spanning = 0u64;
    let mut origin_events = 0u64;
    let mut origin_events_discrete = 0u64;
    let mut density_sum = 0.0;
    let mut largest_sum = 0.0;
    for snap in &snapshots {
        let labels = build_clusters(&snap.points, params.connection_diameter, topology);
        let obs = detect_spanning(&labels, &params, topology);
        let decomposition = decompose_components_with_topology(&snap.points, &params, topology);
        let discrete = origin_proximity_discrete(&snap.points, &params, &decomposition);
        // The discretized origin event entails the continuous one.
        assert!(
            !discrete || obs.origin_event,
            "discrete origin event without the continuous one (z = {z}, seed = {seed})"
        );
        spanning += (obs.spans_horizontally || obs.spans_vertically) as u64;
        origin_events += obs.origin_event as u64;
        origin_events_discrete += discrete as u64;
        density_sum += snap.points.len() as f64 / params.box_area();
        largest_sum += obs.largest_cluster_fraction;
    }
    let n = snapshots.len().max(1) as f64;
    let stats = chain.stats();
    Ok(CellResult {
        z,
        seed,
        sweeps: config.sweeps,
        snapshots: snapshots.len() as u64,
        spanning,
        mean_density: density_sum / n,
        largest_frac: largest_sum / n,
        origin_events,
        origin_events_discrete,
        insert_accept: stats.insert_rate(),
        delete_accept: stats.delete_rate(),
        translate_accept: stats.translate_rate(),
    })
}
