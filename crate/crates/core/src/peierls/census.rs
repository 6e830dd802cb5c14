use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::contour::{
    decompose_components, extract_component_contour, ArcRecord, ContourError, ContourKey,
};
use crate::geometry::ModelParams;
use crate::sampler::Snapshot;

use super::bounds::{lemma3_bound, lemma4_bound, lemma4_bound_ln, Lemma3Bound};
use super::constants::PeierlsConstants;

/// Census statistics for one contour size.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CensusRow {
    pub size: usize,
    /// Snapshots in which some contour of this size encloses the origin.
    pub origin_event_count: u64,
    pub origin_event_freq: f64,
    pub lemma3: Lemma3Bound,
    /// Distinct keys of origin-enclosing contours of this size.
    pub distinct_origin_keys: u64,
    pub lemma4_value: f64,
    pub lemma4_ln: f64,
}

/// Per-key occurrence statistics (the empirical analogue of the
/// probability that a given contour arises).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KeyStat {
    pub key: ContourKey,
    pub size: usize,
    /// Snapshots in which this exact contour arises.
    pub count: u64,
    pub freq: f64,
    pub encloses_origin: bool,
    /// The contour itself as serializable arc records.
    pub arcs: Vec<ArcRecord>,
}

/// An empirical contour census over sampled configurations, paired with
/// the probability bound per size and the count bound per size.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CensusReport {
    pub snapshots: u64,
    pub rows: Vec<CensusRow>,
    pub keys: Vec<KeyStat>,
    /// Contours skipped because the geometry met a degenerate tangency.
    pub degenerate_contours: u64,
    /// Snapshots containing at least one finite component.
    pub snapshots_with_finite_components: u64,
}

/// Tabulate all contours of finite components across the snapshots.
///
/// Within one snapshot a key is counted once (the event "this contour
/// arises"). Origin enclosure on the boundary (within tolerance) counts
/// as enclosing, matching the closed-region convention of the exact
/// enumeration.
pub fn contour_census(
    snapshots: &[Snapshot],
    params: &ModelParams,
    constants: &PeierlsConstants,
) -> CensusReport {
    struct KeyAgg {
        size: usize,
        count: u64,
        encloses: bool,
        arcs: Vec<ArcRecord>,
    }
    let mut keys: HashMap<ContourKey, KeyAgg> = HashMap::new();
    let mut origin_events: HashMap<usize, u64> = HashMap::new();
    let mut degenerate = 0u64;
    let mut with_finite = 0u64;

    for snap in snapshots {
        let decomposition = decompose_components(&snap.points, params);
        let mut sizes_enclosing: Vec<usize> = Vec::new();
        let mut any_finite = false;
        for (idx, _) in decomposition.finite_components() {
            any_finite = true;
            let contour = match extract_component_contour(&snap.points, &decomposition, idx, params)
            {
                Ok(c) => c,
                Err(ContourError::Geometry(_)) => {
                    degenerate += 1;
                    continue;
                }
                Err(e) => panic!("contour extraction on a finite component: {e}"),
            };
            let encloses = match contour.encloses_origin() {
                Ok(b) => b,
                Err(ContourError::OnBoundary) => true,
                Err(ContourError::DegenerateRay) => {
                    degenerate += 1;
                    continue;
                }
                Err(e) => panic!("origin test: {e}"),
            };
            let size = contour.size();
            let entry = keys
                .entry(contour.canonical_key())
                .or_insert_with(|| KeyAgg {
                    size,
                    count: 0,
                    encloses,
                    arcs: contour.records(),
                });
            entry.count += 1;
            if encloses {
                sizes_enclosing.push(size);
            }
        }
        if any_finite {
            with_finite += 1;
        }
        sizes_enclosing.sort_unstable();
        sizes_enclosing.dedup();
        for size in sizes_enclosing {
            *origin_events.entry(size).or_insert(0) += 1;
        }
    }

    let n = snapshots.len() as u64;
    let mut sizes: Vec<usize> = keys
        .values()
        .map(|a| a.size)
        .chain(origin_events.keys().copied())
        .collect();
    sizes.sort_unstable();
    sizes.dedup();

    let rows = sizes
        .iter()
        .map(|&size| {
            let count = origin_events.get(&size).copied().unwrap_or(0);
            let distinct_origin = keys
                .values()
                .filter(|a| a.size == size && a.encloses)
                .count() as u64;
            CensusRow {
                size,
                origin_event_count: count,
                origin_event_freq: if n == 0 { 0.0 } else { count as f64 / n as f64 },
                lemma3: lemma3_bound(size, params, constants),
                distinct_origin_keys: distinct_origin,
                lemma4_value: lemma4_bound(size, params, constants),
                lemma4_ln: lemma4_bound_ln(size, params, constants),
            }
        })
        .collect();

    let mut key_stats: Vec<KeyStat> = keys
        .into_iter()
        .map(|(key, agg)| KeyStat {
            key,
            size: agg.size,
            count: agg.count,
            freq: if n == 0 {
                0.0
            } else {
                agg.count as f64 / n as f64
            },
            encloses_origin: agg.encloses,
            arcs: agg.arcs,
        })
        .collect();
    key_stats.sort_by(|a, b| (a.size, &a.key).cmp(&(b.size, &b.key)));

    CensusReport {
        snapshots: n,
        rows,
        keys: key_stats,
        degenerate_contours: degenerate,
        snapshots_with_finite_components: with_finite,
    }
}
