//! `hdpc`: hard-disk sampling, percolation sweeps and contour censuses.
//!
//! Each subcommand is an experiment registered by name; global flags
//! select the configuration file and override its key sweep knobs.

use std::path::PathBuf;

use anyhow::Result;
use clap::{Arg, ArgAction, Command};

use hdpc_cli::config::{Overrides, RunConfig};
use hdpc_cli::experiments::{Registry, RunContext};

fn common_args(cmd: Command) -> Command {
    cmd.arg(
        Arg::new("config")
            .long("config")
            .value_name("PATH")
            .help("run configuration file (key = value lines)"),
    )
    .arg(
        Arg::new("seed")
            .long("seed")
            .value_name("U64")
            .value_parser(clap::value_parser!(u64))
            .help("master seed; per-cell seeds derive from it"),
    )
    .arg(
        Arg::new("jobs")
            .long("jobs")
            .value_name("N")
            .value_parser(clap::value_parser!(usize))
            .help("parallel cells (default: one)"),
    )
    .arg(
        Arg::new("out")
            .long("out")
            .value_name("DIR")
            .help("output directory (default: ./out)"),
    )
    .arg(
        Arg::new("z-min")
            .long("z-min")
            .value_name("F64")
            .value_parser(clap::value_parser!(f64))
            .help("activity grid minimum (overrides the file grid)"),
    )
    .arg(
        Arg::new("z-max")
            .long("z-max")
            .value_name("F64")
            .value_parser(clap::value_parser!(f64))
            .help("activity grid maximum"),
    )
    .arg(
        Arg::new("z-steps")
            .long("z-steps")
            .value_name("N")
            .value_parser(clap::value_parser!(usize))
            .help("activity grid size"),
    )
    .arg(
        Arg::new("sweeps")
            .long("sweeps")
            .value_name("N")
            .value_parser(clap::value_parser!(u64))
            .help("sweeps per chain"),
    )
    .arg(
        Arg::new("box")
            .long("box")
            .value_name("F64")
            .value_parser(clap::value_parser!(f64))
            .help("box half-width n (the box is [-n, n]^2)"),
    )
    .arg(
        Arg::new("resume")
            .long("resume")
            .value_name("PATH")
            .help("continue from a checkpoint (sample only)"),
    )
}

fn main() -> Result<()> {
    let registry = Registry::builtin();
    let mut cmd = Command::new("hdpc")
        .about("hard-disk model: sampling, excluded-volume percolation, contours")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .disable_help_subcommand(true);
    for exp in registry.iter() {
        cmd = cmd.subcommand(common_args(
            Command::new(exp.name())
                .about(exp.about())
                .arg(Arg::new("quiet").long("quiet").action(ArgAction::SetTrue)),
        ));
    }
    let matches = cmd.get_matches();
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let experiment = registry
        .find(name)
        .unwrap_or_else(|| panic!("registered subcommand {name} must resolve"));

    let overrides = Overrides {
        seed: sub.get_one::<u64>("seed").copied(),
        z_min: sub.get_one::<f64>("z-min").copied(),
        z_max: sub.get_one::<f64>("z-max").copied(),
        z_steps: sub.get_one::<usize>("z-steps").copied(),
        sweeps: sub.get_one::<u64>("sweeps").copied(),
        box_half_width: sub.get_one::<f64>("box").copied(),
    };
    let config_path = sub.get_one::<String>("config").map(PathBuf::from);
    let config = RunConfig::load(config_path.as_deref(), &overrides)?;
    let ctx = RunContext {
        config,
        out: sub
            .get_one::<String>("out")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("out")),
        jobs: sub.get_one::<usize>("jobs").copied().unwrap_or(1),
        resume: sub.get_one::<String>("resume").map(PathBuf::from),
    };
    experiment.run(&ctx)
}
