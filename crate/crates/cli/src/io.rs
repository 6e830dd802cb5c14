//! File emission: atomic writes, snapshot streams (CSV and binary
//! frames), the checksummed chain checkpoint, and small stats helpers.
//!
//! Every emitted data file is deterministic for a given configuration;
//! wall-clock information is confined to `run_meta.json`.

use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use hdpc_core::geometry::Point;
use hdpc_core::sampler::{BoundaryCondition, ChainCheckpoint, MoveStats, Snapshot};
use sha2::{Digest, Sha256};

/// Schema tag stamped into the first column of every CSV row.
pub const SCHEMA_VERSION: u32 = 1;

/// Binary snapshot frame magic and version.
pub const SNAPSHOT_MAGIC: &[u8; 4] = b"HDPC";
pub const SNAPSHOT_VERSION: u32 = 1;

/// Checkpoint file magic and version.
pub const CHECKPOINT_MAGIC: &[u8; 4] = b"HDCK";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Write via a temp file and rename, so partial outputs never appear
/// under the final name.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f =
            std::fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// Snapshot stream as CSV: one record per snapshot holding the sweep
/// index, the count, then the coordinate pairs.
pub fn snapshots_to_csv(snapshots: &[Snapshot]) -> String {
    let mut out = String::from("schemaVersion,sweep,N,coords\n");
    for s in snapshots {
        out.push_str(&format!(
            "{},{},{}",
            SCHEMA_VERSION,
            s.sweep,
            s.points.len()
        ));
        for p in &s.points {
            out.push_str(&format!(",{},{}", p.x, p.y));
        }
        out.push('\n');
    }
    out
}

/// Snapshot stream as binary frames: per frame the magic "HDPC", a u32
/// version, the u64 sweep index, a u32 count, then count little-endian
/// float64 (x, y) pairs.
pub fn snapshots_to_binary(snapshots: &[Snapshot]) -> Vec<u8> {
    let mut out = Vec::new();
    for s in snapshots {
        out.extend_from_slice(SNAPSHOT_MAGIC);
        out.extend_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
        out.extend_from_slice(&s.sweep.to_le_bytes());
        out.extend_from_slice(&(s.points.len() as u32).to_le_bytes());
        for p in &s.points {
            out.extend_from_slice(&p.x.to_le_bytes());
            out.extend_from_slice(&p.y.to_le_bytes());
        }
    }
    out
}

/// Parse a binary snapshot stream (the inverse of
/// [`snapshots_to_binary`]).
pub fn snapshots_from_binary(bytes: &[u8]) -> Result<Vec<Snapshot>> {
    let mut out = Vec::new();
    let mut cur = bytes;
    while !cur.is_empty() {
        if cur.len() < 20 {
            bail!("truncated snapshot frame header");
        }
        if &cur[..4] != SNAPSHOT_MAGIC {
            bail!("bad snapshot frame magic");
        }
        let version = u32::from_le_bytes(cur[4..8].try_into().unwrap());
        if version != SNAPSHOT_VERSION {
            bail!("snapshot frame version {version} (expected {SNAPSHOT_VERSION})");
        }
        let sweep = u64::from_le_bytes(cur[8..16].try_into().unwrap());
        let n = u32::from_le_bytes(cur[16..20].try_into().unwrap()) as usize;
        let need = 20 + 16 * n;
        if cur.len() < need {
            bail!("truncated snapshot frame body");
        }
        let mut points = Vec::with_capacity(n);
        for k in 0..n {
            let off = 20 + 16 * k;
            let x = f64::from_le_bytes(cur[off..off + 8].try_into().unwrap());
            let y = f64::from_le_bytes(cur[off + 8..off + 16].try_into().unwrap());
            points.push(Point::new(x, y));
        }
        out.push(Snapshot { sweep, points });
        cur = &cur[need..];
    }
    Ok(out)
}

#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error("corrupt checkpoint: {0}")]
    Corrupt(String),
    #[error("checkpoint version mismatch: file has {found}, this build reads {expected}")]
    VersionMismatch { found: u32, expected: u32 },
}

struct ByteWriter(Vec<u8>);

impl ByteWriter {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u128(&mut self, v: u128) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_bits().to_le_bytes());
    }
    fn points(&mut self, pts: &[Point]) {
        self.u64(pts.len() as u64);
        for p in pts {
            self.f64(p.x);
            self.f64(p.y);
        }
    }
}

struct ByteReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CheckpointError> {
        if self.pos + n > self.bytes.len() {
            return Err(CheckpointError::Corrupt("truncated payload".into()));
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }
    fn u8(&mut self) -> Result<u8, CheckpointError> {
        Ok(self.take(1)?[0])
    }
    fn u64(&mut self) -> Result<u64, CheckpointError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn u128(&mut self) -> Result<u128, CheckpointError> {
        Ok(u128::from_le_bytes(self.take(16)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64, CheckpointError> {
        Ok(f64::from_bits(u64::from_le_bytes(
            self.take(8)?.try_into().unwrap(),
        )))
    }
    fn points(&mut self) -> Result<Vec<Point>, CheckpointError> {
        let n = self.u64()? as usize;
        if n > 1 << 32 {
            return Err(CheckpointError::Corrupt("absurd point count".into()));
        }
        let mut out = Vec::with_capacity(n.min(1 << 20));
        for _ in 0..n {
            let x = self.f64()?;
            let y = self.f64()?;
            out.push(Point::new(x, y));
        }
        Ok(out)
    }
}

/// Bit-exact binary encoding: magic, version, payload, SHA-256 trailer.
pub fn checkpoint_to_bytes(cp: &ChainCheckpoint) -> Vec<u8> {
    let mut w = ByteWriter(Vec::new());
    w.f64(cp.params.r);
    w.f64(cp.params.connection_diameter);
    w.f64(cp.params.delta);
    w.f64(cp.params.epsilon);
    w.f64(cp.params.z);
    w.f64(cp.params.box_half_width);
    match &cp.boundary {
        BoundaryCondition::Empty => w.u8(0),
        BoundaryCondition::Periodic => w.u8(1),
        BoundaryCondition::Fixed(pts) => {
            w.u8(2);
            w.points(pts);
        }
    }
    w.points(&cp.points);
    w.0.extend_from_slice(&cp.rng_seed);
    w.u64(cp.rng_stream);
    w.u128(cp.rng_word_pos);
    for v in [
        cp.stats.insert_proposed,
        cp.stats.insert_accepted,
        cp.stats.delete_proposed,
        cp.stats.delete_accepted,
        cp.stats.translate_proposed,
        cp.stats.translate_accepted,
        cp.stats.sweeps,
    ] {
        w.u64(v);
    }
    w.u64(cp.sweep);
    w.u8(cp.exclusion_enabled as u8);
    w.f64(cp.max_displacement);

    let payload = w.0;
    let mut out = Vec::with_capacity(payload.len() + 48);
    out.extend_from_slice(CHECKPOINT_MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(&payload);
    out.extend_from_slice(&Sha256::digest(&payload));
    out
}

pub fn checkpoint_from_bytes(bytes: &[u8]) -> Result<ChainCheckpoint, CheckpointError> {
    if bytes.len() < 16 {
        return Err(CheckpointError::Corrupt("file shorter than header".into()));
    }
    if &bytes[..4] != CHECKPOINT_MAGIC {
        return Err(CheckpointError::Corrupt("bad magic".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != CHECKPOINT_VERSION {
        return Err(CheckpointError::VersionMismatch {
            found: version,
            expected: CHECKPOINT_VERSION,
        });
    }
    let len = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    if bytes.len() != 16 + len + 32 {
        return Err(CheckpointError::Corrupt(format!(
            "length mismatch: header says {len} payload bytes, file has {}",
            bytes.len().saturating_sub(48)
        )));
    }
    let payload = &bytes[16..16 + len];
    let digest = Sha256::digest(payload);
    if digest.as_slice() != &bytes[16 + len..] {
        return Err(CheckpointError::Corrupt("checksum mismatch".into()));
    }

    let mut r = ByteReader {
        bytes: payload,
        pos: 0,
    };
    let params = hdpc_core::geometry::ModelParams {
        r: r.f64()?,
        connection_diameter: r.f64()?,
        delta: r.f64()?,
        epsilon: r.f64()?,
        z: r.f64()?,
        box_half_width: r.f64()?,
    };
    let boundary = match r.u8()? {
        0 => BoundaryCondition::Empty,
        1 => BoundaryCondition::Periodic,
        2 => BoundaryCondition::Fixed(r.points()?),
        other => {
            return Err(CheckpointError::Corrupt(format!(
                "unknown boundary tag {other}"
            )))
        }
    };
    let points = r.points()?;
    let rng_seed: [u8; 32] = r.take(32)?.try_into().unwrap();
    let rng_stream = r.u64()?;
    let rng_word_pos = r.u128()?;
    let stats = MoveStats {
        insert_proposed: r.u64()?,
        insert_accepted: r.u64()?,
        delete_proposed: r.u64()?,
        delete_accepted: r.u64()?,
        translate_proposed: r.u64()?,
        translate_accepted: r.u64()?,
        sweeps: r.u64()?,
    };
    let sweep = r.u64()?;
    let exclusion_enabled = r.u8()? != 0;
    let max_displacement = r.f64()?;
    if r.pos != payload.len() {
        return Err(CheckpointError::Corrupt("trailing payload bytes".into()));
    }
    Ok(ChainCheckpoint {
        params,
        boundary,
        points,
        rng_seed,
        rng_stream,
        rng_word_pos,
        stats,
        sweep,
        exclusion_enabled,
        max_displacement,
    })
}

/// Wilson 95% interval for a Bernoulli proportion.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959963984540054f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = (z / denom) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}
