use anyhow::{bail, Context, Result};
use hdpc_core::sampler::ChainState;

use crate::config::SnapshotFormat;
use crate::io;

use super::{run_cell, sweep_plan, Experiment, RunContext};

/// Run one chain at the first grid activity and persist the snapshot
/// stream plus a resumable checkpoint.
pub struct Sample;

impl Experiment for Sample {
    fn name(&self) -> &'static str {
        "sample"
    }

    fn about(&self) -> &'static str {
        "run one chain and write its snapshot stream and checkpoint"
    }

    fn run(&self, ctx: &RunContext) -> Result<()> {
        let config = &ctx.config;
        let (chain, snapshots) = match &ctx.resume {
            None => {
                let &z = config
                    .z_values
                    .first()
                    .ok_or_else(|| anyhow::anyhow!("sample needs a non-empty z grid"))?;
                let seed = crate::seeding::cell_seed(config.seed, 0, 0);
                run_cell(config, z, seed)?
            }
            Some(path) => {
                let bytes = std::fs::read(path)
                    .with_context(|| format!("reading checkpoint {}", path.display()))?;
                let cp = io::checkpoint_from_bytes(&bytes)?;
                let mut chain = ChainState::from_checkpoint(cp)?;
                // A resumed segment continues the trajectory; its sampling
                // grid lines up with the uninterrupted run when the first
                // segment ended on a sampling boundary.
                let plan = sweep_plan(config).with_burn_in(0);
                let snapshots = chain.run_sweeps(&plan);
                (chain, snapshots)
            }
        };

        std::fs::create_dir_all(&ctx.out)?;
        if matches!(
            config.snapshot_format,
            SnapshotFormat::Csv | SnapshotFormat::Both
        ) {
            io::atomic_write(
                &ctx.out.join("snapshots.csv"),
                io::snapshots_to_csv(&snapshots).as_bytes(),
            )?;
        }
        if matches!(
            config.snapshot_format,
            SnapshotFormat::Binary | SnapshotFormat::Both
        ) {
            io::atomic_write(
                &ctx.out.join("snapshots.bin"),
                &io::snapshots_to_binary(&snapshots),
            )?;
        }
        io::atomic_write(
            &ctx.out.join("checkpoint.hdck"),
            &io::checkpoint_to_bytes(&chain.checkpoint()),
        )?;
        let stats = chain.stats();
        let summary = serde_json::json!({
            "schemaVersion": io::SCHEMA_VERSION,
            "z": chain.params().z,
            "boundary": super::boundary_label(chain.boundary()),
            "sweeps": stats.sweeps,
            "finalCount": chain.len(),
            "snapshots": snapshots.len(),
            "insertAccept": stats.insert_rate(),
            "deleteAccept": stats.delete_rate(),
            "translateAccept": stats.translate_rate(),
        });
        io::atomic_write(
            &ctx.out.join("stats.json"),
            serde_json::to_string_pretty(&summary)?.as_bytes(),
        )?;
        super::write_meta(ctx, self.name())?;
        if snapshots.is_empty() && config.sweeps > 0 && config.burn_in() >= config.sweeps {
            bail!("burn-in consumed every sweep; no snapshots were taken");
        }
        println!(
            "sample: {} snapshots at z = {} ({} points at the end)",
            snapshots.len(),
            chain.params().z,
            chain.len()
        );
        Ok(())
    }
}
