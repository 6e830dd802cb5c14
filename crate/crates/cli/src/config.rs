//! Flat key-value run configuration with full validation up front.
//!
//! The format is one `key = value` pair per line; `#` starts a comment.
//! Unknown keys are errors. Command-line flags override file values.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use hdpc_core::geometry::{ModelParams, Point};
use hdpc_core::sampler::BoundaryCondition;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryMode {
    Empty,
    Periodic,
    Fixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SnapshotFormat {
    Csv,
    Binary,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZScale {
    Linear,
    Log,
}

/// Fully validated run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub r: f64,
    pub connection_diameter: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub box_half_width: f64,
    pub boundary: BoundaryMode,
    pub boundary_points_file: Option<PathBuf>,
    pub z_values: Vec<f64>,
    pub replicas: u64,
    pub sweeps: u64,
    pub moves_per_sweep: u64,
    pub sample_every: u64,
    pub burn_in_sweeps: Option<u64>,
    pub seed: u64,
    pub max_displacement: Option<f64>,
    pub snapshot_format: SnapshotFormat,
    pub kmax: u32,
    pub oracle_max_n: usize,
    pub oracle_points: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            r: 0.5,
            connection_diameter: 1.6,
            delta: 0.02,
            epsilon: 0.009,
            box_half_width: 25.0,
            boundary: BoundaryMode::Periodic,
            boundary_points_file: None,
            z_values: vec![1.0],
            replicas: 4,
            sweeps: 2000,
            moves_per_sweep: 1000,
            sample_every: 10,
            burn_in_sweeps: None,
            seed: 1,
            max_displacement: None,
            snapshot_format: SnapshotFormat::Csv,
            kmax: 3,
            oracle_max_n: 7,
            oracle_points: 1_000_000,
        }
    }
}

/// Grid description accumulated during parsing; resolved into explicit
/// activities at the end.
#[derive(Clone, Copy, Debug, Default)]
struct ZGrid {
    min: Option<f64>,
    max: Option<f64>,
    steps: Option<usize>,
    scale: Option<ZScale>,
}

/// Command-line overrides (each `None` keeps the file/default value).
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub z_min: Option<f64>,
    pub z_max: Option<f64>,
    pub z_steps: Option<usize>,
    pub sweeps: Option<u64>,
    pub box_half_width: Option<f64>,
}

impl RunConfig {
    /// Parse a config file (when given) and apply overrides; every field
    /// is validated before anything runs.
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut grid = ZGrid::default();
        let mut explicit_z: Option<Vec<f64>> = None;
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
                path: path.display().to_string(),
                source,
            })?;
            parse_into(&text, &mut cfg, &mut grid, &mut explicit_z)?;
        }
        // Flag overrides replace file values; a grid flag discards an
        // explicit z list from the file.
        if let Some(seed) = overrides.seed {
            cfg.seed = seed;
        }
        if let Some(s) = overrides.sweeps {
            cfg.sweeps = s;
        }
        if let Some(b) = overrides.box_half_width {
            cfg.box_half_width = b;
        }
        if overrides.z_min.is_some() || overrides.z_max.is_some() || overrides.z_steps.is_some() {
            explicit_z = None;
            grid.min = overrides.z_min.or(grid.min);
            grid.max = overrides.z_max.or(grid.max);
            grid.steps = overrides.z_steps.or(grid.steps);
        }
        if let Some(z) = explicit_z {
            cfg.z_values = z;
        } else if grid.min.is_some() || grid.max.is_some() || grid.steps.is_some() {
            cfg.z_values = resolve_grid(&grid)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        // Parameter constraints are delegated to the model-parameter
        // validator so the reported message names the violated inequality.
        let probe_z = self.z_values.first().copied().unwrap_or(0.0);
        ModelParams::new(
            self.r,
            self.connection_diameter,
            self.delta,
            self.epsilon,
            probe_z,
            self.box_half_width,
        )
        .map_err(|e| ConfigError::Validation(e.to_string()))?;
        for &z in &self.z_values {
            if !(z.is_finite() && z >= 0.0) {
                return Err(ConfigError::Validation(format!(
                    "activities must be finite and >= 0, got {z}"
                )));
            }
        }
        if self.replicas == 0 {
            return Err(ConfigError::Validation("replicas must be positive".into()));
        }
        if self.moves_per_sweep == 0 || self.sample_every == 0 {
            return Err(ConfigError::Validation(
                "moves_per_sweep and sample_every must be positive".into(),
            ));
        }
        if let Some(b) = self.burn_in_sweeps {
            if b >= self.sweeps && self.sweeps > 0 {
                return Err(ConfigError::Validation(format!(
                    "burn_in_sweeps {b} must be below sweeps {}",
                    self.sweeps
                )));
            }
        }
        if let Some(d) = self.max_displacement {
            if !(d.is_finite() && d > 0.0) {
                return Err(ConfigError::Validation(
                    "max_displacement must be positive".into(),
                ));
            }
        }
        if self.boundary == BoundaryMode::Fixed && self.boundary_points_file.is_none() {
            return Err(ConfigError::Validation(
                "boundary = fixed requires boundary_points_file".into(),
            ));
        }
        if self.kmax == 0 || self.kmax > 3 {
            return Err(ConfigError::Validation(format!(
                "kmax must be in 1..=3, got {}",
                self.kmax
            )));
        }
        if self.oracle_max_n == 0 || self.oracle_points < 64 {
            return Err(ConfigError::Validation(
                "oracle_max_n must be >= 1 and oracle_points >= 64".into(),
            ));
        }
        Ok(())
    }

    /// Model parameters at one activity of the grid.
    pub fn params_at(&self, z: f64) -> ModelParams {
        ModelParams {
            r: self.r,
            connection_diameter: self.connection_diameter,
            delta: self.delta,
            epsilon: self.epsilon,
            z,
            box_half_width: self.box_half_width,
        }
    }

    /// Resolve the boundary condition, reading the fixed-point file when
    /// needed (one `x,y` pair per line).
    pub fn boundary_condition(&self) -> Result<BoundaryCondition, ConfigError> {
        match self.boundary {
            BoundaryMode::Empty => Ok(BoundaryCondition::Empty),
            BoundaryMode::Periodic => Ok(BoundaryCondition::Periodic),
            BoundaryMode::Fixed => {
                let path = self.boundary_points_file.as_ref().expect("validated");
                let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                let mut points = Vec::new();
                for (ln, line) in text.lines().enumerate() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    let mut it = line.split(',');
                    let bad = |msg: &str| ConfigError::Parse {
                        line: ln + 1,
                        col: 1,
                        msg: msg.into(),
                    };
                    let x: f64 = it
                        .next()
                        .ok_or_else(|| bad("missing x"))?
                        .trim()
                        .parse()
                        .map_err(|_| bad("bad x coordinate"))?;
                    let y: f64 = it
                        .next()
                        .ok_or_else(|| bad("missing y"))?
                        .trim()
                        .parse()
                        .map_err(|_| bad("bad y coordinate"))?;
                    points.push(Point::new(x, y));
                }
                Ok(BoundaryCondition::Fixed(points))
            }
        }
    }

    /// Burn-in: explicit value or the 20% default.
    pub fn burn_in(&self) -> u64 {
        self.burn_in_sweeps.unwrap_or(self.sweeps / 5)
    }
}

fn resolve_grid(grid: &ZGrid) -> Result<Vec<f64>, ConfigError> {
    let bad = |msg: &str| ConfigError::Validation(msg.into());
    let min = grid.min.ok_or_else(|| bad("z grid needs z_min"))?;
    let max = grid.max.ok_or_else(|| bad("z grid needs z_max"))?;
    let steps = grid.steps.ok_or_else(|| bad("z grid needs z_steps"))?;
    let scale = grid.scale.unwrap_or(ZScale::Log);
    if steps == 0 {
        return Ok(Vec::new());
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    if !(min.is_finite() && max.is_finite() && min <= max) {
        return Err(bad("z grid requires z_min <= z_max"));
    }
    if scale == ZScale::Log && min <= 0.0 {
        return Err(bad("log z grid requires z_min > 0"));
    }
    let n = steps as f64 - 1.0;
    Ok((0..steps)
        .map(|k| match scale {
            ZScale::Linear => min + (max - min) * k as f64 / n,
            ZScale::Log => (min.ln() + (max.ln() - min.ln()) * k as f64 / n).exp(),
        })
        .collect())
}

fn parse_into(
    text: &str,
    cfg: &mut RunConfig,
    grid: &mut ZGrid,
    explicit_z: &mut Option<Vec<f64>>,
) -> Result<(), ConfigError> {
    let mut seen: HashSet<String> = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        let eq = line.find('=').ok_or(ConfigError::Parse {
            line: line_no,
            col: line.len(),
            msg: "expected `key = value`".into(),
        })?;
        let key = line[..eq].trim().to_string();
        let value = line[eq + 1..].trim().to_string();
        if key.is_empty() {
            return Err(ConfigError::Parse {
                line: line_no,
                col: 1,
                msg: "empty key".into(),
            });
        }
        if !seen.insert(key.clone()) {
            return Err(ConfigError::Parse {
                line: line_no,
                col: 1,
                msg: format!("duplicate key `{key}`"),
            });
        }
        let col = eq + 2;
        let parse_err = |msg: String| ConfigError::Parse {
            line: line_no,
            col,
            msg,
        };
        macro_rules! num {
            ($t:ty) => {
                value
                    .parse::<$t>()
                    .map_err(|_| parse_err(format!("`{value}` is not a valid number")))?
            };
        }
        match key.as_str() {
            "r" => cfg.r = num!(f64),
            "connection_diameter" => cfg.connection_diameter = num!(f64),
            "delta" => cfg.delta = num!(f64),
            "epsilon" => cfg.epsilon = num!(f64),
            "box_half_width" => cfg.box_half_width = num!(f64),
            "boundary" => {
                cfg.boundary = match value.as_str() {
                    "empty" => BoundaryMode::Empty,
                    "periodic" => BoundaryMode::Periodic,
                    "fixed" => BoundaryMode::Fixed,
                    other => {
                        return Err(parse_err(format!(
                            "`{other}` is not a boundary mode (empty|periodic|fixed)"
                        )))
                    }
                }
            }
            "boundary_points_file" => cfg.boundary_points_file = Some(PathBuf::from(value)),
            "z_min" => grid.min = Some(num!(f64)),
            "z_max" => grid.max = Some(num!(f64)),
            "z_steps" => grid.steps = Some(num!(usize)),
            "z_scale" => {
                grid.scale = Some(match value.as_str() {
                    "linear" => ZScale::Linear,
                    "log" => ZScale::Log,
                    other => {
                        return Err(parse_err(format!(
                            "`{other}` is not a z scale (linear|log)"
                        )))
                    }
                })
            }
            "z_values" => {
                let mut out = Vec::new();
                for piece in value.split(',') {
                    out.push(piece.trim().parse::<f64>().map_err(|_| {
                        parse_err(format!("`{}` is not a valid activity", piece.trim()))
                    })?);
                }
                *explicit_z = Some(out);
            }
            "replicas" => cfg.replicas = num!(u64),
            "sweeps" => cfg.sweeps = num!(u64),
            "moves_per_sweep" => cfg.moves_per_sweep = num!(u64),
            "sample_every" => cfg.sample_every = num!(u64),
            "burn_in_sweeps" => cfg.burn_in_sweeps = Some(num!(u64)),
            "seed" => cfg.seed = num!(u64),
            "max_displacement" => cfg.max_displacement = Some(num!(f64)),
            "snapshot_format" => {
                cfg.snapshot_format = match value.as_str() {
                    "csv" => SnapshotFormat::Csv,
                    "binary" => SnapshotFormat::Binary,
                    "both" => SnapshotFormat::Both,
                    other => {
                        return Err(parse_err(format!(
                            "`{other}` is not a snapshot format (csv|binary|both)"
                        )))
                    }
                }
            }
            "kmax" => cfg.kmax = num!(u32),
            "oracle_max_n" => cfg.oracle_max_n = num!(usize),
            "oracle_points" => cfg.oracle_points = num!(u64),
            other => {
                return Err(ConfigError::Parse {
                    line: line_no,
                    col: 1,
                    msg: format!("unknown key `{other}`"),
                })
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut grid = ZGrid::default();
        let mut z = None;
        parse_into(text, &mut cfg, &mut grid, &mut z)?;
        if let Some(z) = z {
            cfg.z_values = z;
        } else if grid.min.is_some() {
            cfg.z_values = resolve_grid(&grid)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse("").unwrap();
        assert_eq!(cfg.r, 0.5);
        assert_eq!(cfg.z_values, vec![1.0]);
        assert_eq!(cfg.burn_in(), cfg.sweeps / 5);
    }

    #[test]
    fn l_equal_3r_names_the_constraint() {
        let err = parse("r = 0.5\nconnection_diameter = 1.5\n").unwrap_err();
        assert!(err.to_string().contains("L > 3r"), "{err}");
    }

    #[test]
    fn unknown_key_is_an_error() {
        let err = parse("r = 0.5\nfrobnicate = 3\n").unwrap_err();
        match err {
            ConfigError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn duplicate_key_is_an_error() {
        let err = parse("seed = 1\nseed = 2\n").unwrap_err();
        assert!(err.to_string().contains("duplicate"));
    }

    #[test]
    fn parse_error_carries_line_and_column() {
        let err = parse("sweeps = banana\n").unwrap_err();
        match err {
            ConfigError::Parse { line, col, .. } => {
                assert_eq!(line, 1);
                assert!(col > 1);
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let cfg = parse("# full-line comment\n\nseed = 9 # trailing\n").unwrap();
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn z_list_and_grids() {
        let cfg = parse("z_values = 0.5, 1, 2\n").unwrap();
        assert_eq!(cfg.z_values, vec![0.5, 1.0, 2.0]);

        let cfg = parse("z_min = 1\nz_max = 100\nz_steps = 3\nz_scale = log\n").unwrap();
        assert_eq!(cfg.z_values.len(), 3);
        assert!((cfg.z_values[1] - 10.0).abs() < 1e-9);

        let cfg = parse("z_min = 1\nz_max = 3\nz_steps = 3\nz_scale = linear\n").unwrap();
        assert_eq!(cfg.z_values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn flag_override_replaces_file_grid() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "z_values = 5, 6, 7\nseed = 3\n").unwrap();
        let overrides = Overrides {
            z_min: Some(1.0),
            z_max: Some(2.0),
            z_steps: Some(2),
            ..Default::default()
        };
        let cfg = RunConfig::load(Some(&path), &overrides).unwrap();
        assert_eq!(cfg.z_values, vec![1.0, 2.0]);
        assert_eq!(cfg.seed, 3);
    }

    #[test]
    fn empty_grid_is_allowed() {
        let cfg = parse("z_min = 1\nz_max = 2\nz_steps = 0\n").unwrap();
        assert!(cfg.z_values.is_empty());
    }
}
