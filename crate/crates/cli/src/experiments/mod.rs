//! Experiments behind a common trait, registered by name and selected on
//! the command line. Each subcommand is one experiment.

mod contour_census;
mod enum_bounds;
mod oracle_smallbox;
mod perc_sweep;
mod sample;
mod verify_lemma1;

use std::path::PathBuf;

use anyhow::Result;
use hdpc_core::sampler::{BoundaryCondition, ChainState, Snapshot, SweepPlan};

use crate::config::RunConfig;

/// Everything an experiment needs to run.
pub struct RunContext {
    pub config: RunConfig,
    pub out: PathBuf,
    pub jobs: usize,
    pub resume: Option<PathBuf>,
}

pub trait Experiment: Sync {
    /// Subcommand name.
    fn name(&self) -> &'static str;
    /// One-line description for `--help`.
    fn about(&self) -> &'static str;
    fn run(&self, ctx: &RunContext) -> Result<()>;
}

/// Name-indexed collection of the available experiments.
pub struct Registry {
    entries: Vec<Box<dyn Experiment>>,
}

impl Registry {
    pub fn builtin() -> Self {
        Registry {
            entries: vec![
                Box::new(sample::Sample),
                Box::new(perc_sweep::PercSweep),
                Box::new(contour_census::ContourCensus),
                Box::new(verify_lemma1::VerifyLemma1),
                Box::new(enum_bounds::EnumBounds),
                Box::new(oracle_smallbox::OracleSmallBox),
            ],
        }
    }

    pub fn find(&self, name: &str) -> Option<&dyn Experiment> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .map(|e| e.as_ref())
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Experiment> {
        self.entries.iter().map(|e| e.as_ref())
    }
}

/// Shared cell runner: one chain at one activity, from an empty initial
/// configuration, with the configured schedule.
pub(crate) fn run_cell(
    config: &RunConfig,
    z: f64,
    seed: u64,
) -> Result<(ChainState, Vec<Snapshot>)> {
    let params = config.params_at(z);
    let boundary = config.boundary_condition()?;
    let mut chain = ChainState::new(params, boundary, seed)?;
    if let Some(d) = config.max_displacement {
        chain.set_max_displacement(d);
    }
    let plan = sweep_plan(config);
    let snapshots = chain.run_sweeps(&plan);
    Ok((chain, snapshots))
}

pub(crate) fn sweep_plan(config: &RunConfig) -> SweepPlan {
    SweepPlan::new(config.sweeps, config.moves_per_sweep, config.sample_every)
        .with_burn_in(config.burn_in())
}

/// Metadata sidecar; the single place wall-clock time may appear.
pub(crate) fn write_meta(ctx: &RunContext, experiment: &str) -> Result<()> {
    let meta = serde_json::json!({
        "experiment": experiment,
        "schemaVersion": crate::io::SCHEMA_VERSION,
        "unixTime": std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    });
    crate::io::atomic_write(
        &ctx.out.join("run_meta.json"),
        serde_json::to_string_pretty(&meta)?.as_bytes(),
    )
}

pub(crate) fn boundary_label(b: &BoundaryCondition) -> &'static str {
    b.name()
}
