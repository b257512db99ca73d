//! Suite manifests: the list of generator specs behind a suite directory.
//!
//! A manifest is a JSON document `{"name": ..., "entries": [...]}`. Each entry
//! names an instance and carries its full [`GenSpec`]. An entry may set
//! `share_nodes_with` to the id of an earlier entry; it is then generated
//! from the seed that produced that entry's accepted draw, so both instances
//! have identical node placement (and identical zones when `zone_k` is set).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use hfsp_core::generators::{Calibration, GenSpec};
use serde::{Deserialize, Serialize};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub name: String,
    pub entries: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub id: String,
    pub spec: GenSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub share_nodes_with: Option<String>,
    /// Instance file name inside the suite directory; filled in by `generate`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    /// Seed of the accepted draw; filled in by `generate`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attempt_seed: Option<u64>,
}

impl Entry {
    pub fn new(id: impl Into<String>, spec: GenSpec) -> Entry {
        Entry {
            id: id.into(),
            spec,
            share_nodes_with: None,
            file: None,
            attempt_seed: None,
        }
    }

    pub fn file_name(&self) -> String {
        self.file
            .clone()
            .unwrap_or_else(|| format!("{}.json", self.id))
    }
}

impl Manifest {
    pub fn from_json(text: &str) -> Result<Manifest> {
        let manifest: Manifest = serde_json::from_str(text).context("parsing manifest")?;
        manifest.check()?;
        Ok(manifest)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        text
    }

    /// Ids are unique and usable as file names; shared placements point at
    /// an earlier entry.
    pub fn check(&self) -> Result<()> {
        let mut seen = HashMap::new();
        for (i, e) in self.entries.iter().enumerate() {
            if e.id.is_empty() || e.id.contains(['/', '\\']) || e.id.starts_with('.') {
                bail!("entry {i}: id `{}` is not a plain file stem", e.id);
            }
            if seen.insert(e.id.as_str(), i).is_some() {
                bail!("duplicate entry id `{}`", e.id);
            }
            if let Some(base) = &e.share_nodes_with {
                match seen.get(base.as_str()) {
                    Some(&j) if j < i => {}
                    _ => bail!(
                        "entry `{}` shares nodes with `{base}`, which is not an earlier entry",
                        e.id
                    ),
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// Size sweeps over all four families, ten instances per cell.
    Scaling,
    /// 2000-node 2D Euclidean graphs with k = 4, 8, 12 on shared placements.
    Connectivity,
    /// Small mixed instances the brute-force oracle can enumerate.
    Oracle,
    /// A handful of small instances for quick checks.
    Smoke,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::Scaling,
        Preset::Connectivity,
        Preset::Oracle,
        Preset::Smoke,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Scaling => "scaling",
            Preset::Connectivity => "connectivity",
            Preset::Oracle => "oracle",
            Preset::Smoke => "smoke",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| {
                format!("unknown preset `{s}` (expected scaling, connectivity, oracle or smoke)")
            })
    }
}

/// Knobs shared by all presets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PresetOptions {
    pub seed: u64,
    /// Instances per (family, dimension, size) cell.
    pub per_cell: usize,
    /// Drop cells larger than this.
    pub max_nodes: Option<usize>,
}

impl Default for PresetOptions {
    fn default() -> Self {
        PresetOptions {
            seed: 0,
            per_cell: 10,
            max_nodes: None,
        }
    }
}

pub const SCALING_EUCLIDEAN_2D: [usize; 6] = [500, 1000, 2000, 5000, 10_000, 20_000];
pub const SCALING_EUCLIDEAN_3D: [usize; 5] = [500, 1000, 2000, 5000, 10_000];
pub const SCALING_LATTICE_2D: [usize; 5] = [20, 30, 50, 70, 100];
/// 3D lattice boxes, twenty layers high.
pub const SCALING_LATTICE_3D: [[usize; 3]; 5] = [
    [5, 5, 20],
    [8, 8, 20],
    [12, 12, 20],
    [16, 16, 20],
    [25, 25, 20],
];
pub const CONNECTIVITY_KS: [usize; 3] = [4, 8, 12];
pub const CONNECTIVITY_NODES: usize = 2000;
pub const ORACLE_INSTANCES: usize = 200;

/// Seed of instance `i` in cell `cell`: distinct across cells and instances.
fn cell_seed(opts: &PresetOptions, cell: usize, i: usize) -> u64 {
    opts.seed.wrapping_add((cell * 1000 + i) as u64)
}

pub fn preset(which: Preset, opts: &PresetOptions) -> Manifest {
    let entries = match which {
        Preset::Scaling => scaling(opts),
        Preset::Connectivity => connectivity(opts),
        Preset::Oracle => oracle(opts),
        Preset::Smoke => smoke(opts),
    };
    let entries = entries
        .into_iter()
        .filter(|e| opts.max_nodes.is_none_or(|m| e.spec.n_nodes <= m))
        .collect();
    Manifest {
        name: which.as_str().to_owned(),
        entries,
    }
}

fn scaling(opts: &PresetOptions) -> Vec<Entry> {
    let mut cells: Vec<(String, GenSpec)> = Vec::new();
    for n in SCALING_EUCLIDEAN_2D {
        cells.push((format!("euclidean-2d-n{n}"), GenSpec::euclidean(2, n, 0)));
    }
    for n in SCALING_EUCLIDEAN_3D {
        cells.push((format!("euclidean-3d-n{n}"), GenSpec::euclidean(3, n, 0)));
    }
    for side in SCALING_LATTICE_2D {
        let n = side * side;
        cells.push((format!("lattice-2d-n{n}"), GenSpec::lattice(2, n, 0)));
    }
    for dims in SCALING_LATTICE_3D {
        let spec = GenSpec::lattice(3, 0, 0).with_lattice_dims(dims);
        cells.push((format!("lattice-3d-n{}", spec.n_nodes), spec));
    }
    let mut out = Vec::new();
    for (cell, (stem, spec)) in cells.into_iter().enumerate() {
        for i in 0..opts.per_cell {
            let seed = cell_seed(opts, cell, i);
            out.push(Entry::new(
                format!("{stem}-{i:02}"),
                GenSpec {
                    seed,
                    ..spec.clone()
                },
            ));
        }
    }
    out
}

fn connectivity(opts: &PresetOptions) -> Vec<Entry> {
    let mut out = Vec::new();
    for i in 0..opts.per_cell {
        let seed = cell_seed(opts, 0, i);
        let base_id = format!(
            "connectivity-n{CONNECTIVITY_NODES}-{i:02}-k{}",
            CONNECTIVITY_KS[0]
        );
        for k in CONNECTIVITY_KS {
            let spec = GenSpec {
                zone_k: Some(CONNECTIVITY_KS[0]),
                ..GenSpec::euclidean(2, CONNECTIVITY_NODES, seed).with_k(k)
            };
            let id = format!("connectivity-n{CONNECTIVITY_NODES}-{i:02}-k{k}");
            let mut entry = Entry::new(id.clone(), spec);
            if id != base_id {
                entry.share_nodes_with = Some(base_id.clone());
            }
            out.push(entry);
        }
    }
    out
}

/// Mixed families at 4 to 10 nodes. Calibrations vary so the suite holds
/// zero-fuel, zero-startup and large-startup cases, and draws are kept even
/// when infeasible.
fn oracle(opts: &PresetOptions) -> Vec<Entry> {
    let mut out = Vec::new();
    for i in 0..ORACLE_INSTANCES {
        let seed = cell_seed(opts, 0, i);
        let base = match i % 5 {
            0 | 1 => GenSpec::euclidean(2, 5 + i % 6, seed).with_k(2 + i % 3),
            2 => GenSpec::euclidean(3, 6 + i % 5, seed).with_k(3),
            3 => GenSpec::lattice(2, if i % 2 == 0 { 9 } else { 4 }, seed),
            _ => GenSpec::lattice(3, 0, seed).with_lattice_dims([2, 2, 2]),
        };
        let calibration = Calibration {
            b_frac: [0.3, 0.5, 1.0][i % 3],
            q_frac: [0.0, 0.6, 1.2, 2.0][i % 4],
            v_frac: [0.0, 0.05, 0.25][(i / 3) % 3],
        };
        out.push(Entry::new(
            format!("oracle-{i:03}"),
            GenSpec {
                calibration,
                verify: false,
                ..base
            },
        ));
    }
    out
}

fn smoke(opts: &PresetOptions) -> Vec<Entry> {
    let specs = [
        ("euclidean-2d-n60", GenSpec::euclidean(2, 60, 0)),
        ("euclidean-3d-n60", GenSpec::euclidean(3, 60, 0)),
        ("lattice-2d-n36", GenSpec::lattice(2, 36, 0)),
        ("lattice-3d-n27", GenSpec::lattice(3, 27, 0)),
    ];
    let mut out = Vec::new();
    for (cell, (stem, spec)) in specs.into_iter().enumerate() {
        for i in 0..opts.per_cell.min(2) {
            let seed = cell_seed(opts, cell, i);
            out.push(Entry::new(
                format!("{stem}-{i:02}"),
                GenSpec {
                    seed,
                    ..spec.clone()
                },
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_preset_has_ten_per_cell() {
        let m = preset(Preset::Scaling, &PresetOptions::default());
        let cells = SCALING_EUCLIDEAN_2D.len()
            + SCALING_EUCLIDEAN_3D.len()
            + SCALING_LATTICE_2D.len()
            + SCALING_LATTICE_3D.len();
        assert_eq!(m.entries.len(), 10 * cells);
        let mut per_cell: HashMap<(String, u8, usize), usize> = HashMap::new();
        for e in &m.entries {
            *per_cell
                .entry((
                    e.spec.family.as_str().to_owned(),
                    e.spec.dim,
                    e.spec.n_nodes,
                ))
                .or_default() += 1;
        }
        assert!(per_cell.values().all(|&c| c == 10));
        assert!(m.check().is_ok());
        assert!(m
            .entries
            .iter()
            .any(|e| e.spec.n_nodes == 12_500 && e.spec.dim == 3));
    }

    #[test]
    fn seeds_are_distinct() {
        let m = preset(Preset::Scaling, &PresetOptions::default());
        let mut seeds: Vec<u64> = m.entries.iter().map(|e| e.spec.seed).collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), m.entries.len());
    }

    #[test]
    fn connectivity_entries_share_the_k4_placement() {
        let m = preset(Preset::Connectivity, &PresetOptions::default());
        assert_eq!(m.entries.len(), 30);
        for e in &m.entries {
            assert_eq!(e.spec.zone_k, Some(4));
            match e.spec.k_neighbors {
                4 => assert!(e.share_nodes_with.is_none()),
                _ => assert!(e.share_nodes_with.as_deref().unwrap().ends_with("-k4")),
            }
        }
    }

    #[test]
    fn oracle_suite_is_small_and_mixed() {
        let m = preset(Preset::Oracle, &PresetOptions::default());
        assert_eq!(m.entries.len(), ORACLE_INSTANCES);
        assert!(m.entries.iter().all(|e| e.spec.n_nodes <= 10));
        assert!(m.entries.iter().any(|e| e.spec.calibration.q_frac == 0.0));
        assert!(m.entries.iter().any(|e| e.spec.calibration.v_frac > 0.0));
        assert!(m.entries.iter().any(|e| e.spec.dim == 3));
    }

    #[test]
    fn max_nodes_filters_cells() {
        let opts = PresetOptions {
            max_nodes: Some(1000),
            per_cell: 2,
            ..PresetOptions::default()
        };
        let m = preset(Preset::Scaling, &opts);
        assert!(m.entries.iter().all(|e| e.spec.n_nodes <= 1000));
        assert!(!m.entries.is_empty());
    }

    #[test]
    fn manifest_round_trip_and_checks() {
        let m = preset(Preset::Smoke, &PresetOptions::default());
        assert_eq!(Manifest::from_json(&m.to_json()).unwrap(), m);
        let mut bad = m.clone();
        bad.entries[1].id = bad.entries[0].id.clone();
        assert!(bad.check().is_err());
        let mut forward = m.clone();
        forward.entries[0].share_nodes_with = Some(m.entries[1].id.clone());
        assert!(forward.check().is_err());
        let mut path = m;
        path.entries[0].id = "../x".into();
        assert!(path.check().is_err());
    }
}
