//! Seeded instance families: random Euclidean k-nearest-neighbour graphs and
//! unit lattices, in 2D or 3D, with rectangular noise zones.
//!
//! A [`GenSpec`] plus its seed fully determines the instance. Each attempt
//! draws geometry and zones from its own derived seed; an attempt is
//! discarded when start and goal are disconnected or when the calibrated
//! resources admit no feasible schedule, and the next seed is tried.

mod geometry;
mod rng;
mod zones;

pub use geometry::{farthest_pair, grid_length, knn_pairs, LENGTH_GRID};
pub use rng::{derive_seed, SeededRng};
pub use zones::{place_zones, restricted, Zone, ZonePlan};

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::heuristics::{sup_path, HeuristicKind};
use crate::instance::{Edge, Instance, NodeCoord};
use crate::labeling::{solve, Limits, Selection, SolveError, SolveOutcome, SolverConfig};
use crate::units::{Quantization, Units};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Euclidean,
    Lattice,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Euclidean => "euclidean",
            Family::Lattice => "lattice",
        }
    }
}

/// Battery drain `C = alpha D` and recharge `Z = beta D` on level edges.
/// Climbing edges multiply both by `uphill_factor`; descending edges glide
/// with `C = 0` and `Z = glide_z_factor * beta D`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergyModel {
    pub alpha: f64,
    pub beta: f64,
    pub uphill_factor: f64,
    pub glide_z_factor: f64,
}

impl Default for EnergyModel {
    fn default() -> Self {
        EnergyModel {
            alpha: 1.0,
            beta: 1.5,
            uphill_factor: 1.5,
            glide_z_factor: 0.5,
        }
    }
}

/// Resources as fractions of the battery energy `E` needed to fly the
/// shortest unconstrained path: `Bmax = B0 = b_frac E`, `Q0 = q_frac E`,
/// `V = v_frac Bmax`, `Bmin = 0`. `Bmax` is raised to twice the largest
/// drain on that path when `b_frac E` is smaller, which only happens on
/// paths of a handful of edges.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Calibration {
    pub b_frac: f64,
    pub q_frac: f64,
    pub v_frac: f64,
}

impl Default for Calibration {
    fn default() -> Self {
        Calibration {
            b_frac: 0.3,
            q_frac: 1.2,
            v_frac: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSpec {
    pub family: Family,
    pub dim: u8,
    pub n_nodes: usize,
    #[serde(default = "defaults::k_neighbors")]
    pub k_neighbors: usize,
    /// Lattice box `[nx, ny, nz]`; required for 3D lattices whose size is
    /// not a perfect cube.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice_dims: Option<Vec<usize>>,
    #[serde(default = "defaults::noise_target")]
    pub noise_target: f64,
    #[serde(default = "defaults::noise_tolerance")]
    pub noise_tolerance: f64,
    /// Zone side as a fraction of the domain extent, per axis.
    #[serde(default = "defaults::zone_side")]
    pub zone_side: (f64, f64),
    /// Fit zones on the k-NN graph with this `k` instead of `k_neighbors`,
    /// so graphs of different connectivity share node placement and zones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zone_k: Option<usize>,
    #[serde(default)]
    pub energy: EnergyModel,
    #[serde(default)]
    pub calibration: Calibration,
    #[serde(default = "defaults::quantization")]
    pub quantization: f64,
    /// Solve each draw and reject infeasible ones.
    #[serde(default = "defaults::verify")]
    pub verify: bool,
    /// Label budget of the verification solve; a draw that exhausts it is
    /// kept and marked unverified.
    #[serde(default = "defaults::verify_max_labels")]
    pub verify_max_labels: u64,
    #[serde(default = "defaults::max_attempts")]
    pub max_attempts: u32,
    pub seed: u64,
}

mod defaults {
    pub fn k_neighbors() -> usize {
        4
    }
    pub fn noise_target() -> f64 {
        0.32
    }
    pub fn noise_tolerance() -> f64 {
        0.03
    }
    pub fn zone_side() -> (f64, f64) {
        (0.10, 0.35)
    }
    pub fn quantization() -> f64 {
        1e-3
    }
    pub fn verify() -> bool {
        true
    }
    pub fn verify_max_labels() -> u64 {
        5_000_000
    }
    pub fn max_attempts() -> u32 {
        16
    }
}

impl GenSpec {
    pub fn euclidean(dim: u8, n_nodes: usize, seed: u64) -> GenSpec {
        GenSpec {
            family: Family::Euclidean,
            dim,
            n_nodes,
            k_neighbors: defaults::k_neighbors(),
            lattice_dims: None,
            noise_target: defaults::noise_target(),
            noise_tolerance: defaults::noise_tolerance(),
            zone_side: defaults::zone_side(),
            zone_k: None,
            energy: EnergyModel::default(),
            calibration: Calibration::default(),
            quantization: defaults::quantization(),
            verify: defaults::verify(),
            verify_max_labels: defaults::verify_max_labels(),
            max_attempts: defaults::max_attempts(),
            seed,
        }
    }

    pub fn lattice(dim: u8, n_nodes: usize, seed: u64) -> GenSpec {
        GenSpec {
            family: Family::Lattice,
            ..GenSpec::euclidean(dim, n_nodes, seed)
        }
    }

    pub fn with_k(mut self, k: usize) -> GenSpec {
        self.k_neighbors = k;
        self
    }

    pub fn with_lattice_dims(mut self, dims: [usize; 3]) -> GenSpec {
        self.n_nodes = dims.iter().product();
        self.lattice_dims = Some(dims.to_vec());
        self
    }

    pub fn check(&self) -> Result<(), GenError> {
        let bad = |m: String| Err(GenError::InvalidSpec(m));
        if self.dim != 2 && self.dim != 3 {
            return bad(format!("dim must be 2 or 3, got {}", self.dim));
        }
        if self.n_nodes < 2 {
            return bad(format!("n_nodes must be at least 2, got {}", self.n_nodes));
        }
        if self.k_neighbors == 0 || self.zone_k == Some(0) {
            return bad("k_neighbors must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.noise_target) {
            return bad(format!(
                "noise_target must lie in [0, 1), got {}",
                self.noise_target
            ));
        }
        let (lo, hi) = self.zone_side;
        if !(0.0 < lo && lo <= hi && hi <= 1.0) {
            return bad(format!(
                "zone_side must satisfy 0 < lo <= hi <= 1, got ({lo}, {hi})"
            ));
        }
        if Quantization::new(self.quantization).is_none() {
            return bad(format!(
                "quantization must be positive and finite, got {}",
                self.quantization
            ));
        }
        if self.max_attempts == 0 {
            return bad("max_attempts must be at least 1".into());
        }
        if self.family == Family::Lattice {
            self.lattice_shape()?;
        }
        Ok(())
    }

    /// `[nx, ny, nz]` of a lattice spec (`nz = 1` in 2D).
    pub fn lattice_shape(&self) -> Result<[usize; 3], GenError> {
        let n = self.n_nodes;
        let shape = match (&self.lattice_dims, self.dim) {
            (Some(d), 2) if d.len() == 2 => [d[0], d[1], 1],
            (Some(d), 3) if d.len() == 3 => [d[0], d[1], d[2]],
            (Some(d), _) => {
                return Err(GenError::InvalidSpec(format!(
                    "lattice_dims has {} entries for a {}D lattice",
                    d.len(),
                    self.dim
                )))
            }
            (None, 2) => match exact_root(n, 2) {
                Some(m) => [m, m, 1],
                None => {
                    return Err(GenError::InvalidSpec(format!(
                        "2D lattice needs a perfect square, got {n}"
                    )))
                }
            },
            (None, _) => match exact_root(n, 3) {
                Some(m) => [m, m, m],
                None => {
                    return Err(GenError::InvalidSpec(format!(
                        "3D lattice of {n} nodes is not a cube; give lattice_dims"
                    )))
                }
            },
        };
        if shape.iter().product::<usize>() != n || shape.contains(&0) {
            return Err(GenError::InvalidSpec(format!(
                "lattice_dims {shape:?} do not multiply to {n}"
            )));
        }
        Ok(shape)
    }
}

fn exact_root(n: usize, p: u32) -> Option<usize> {
    let guess = (n as f64).powf(1.0 / p as f64).round() as usize;
    (guess.saturating_sub(1)..=guess + 1).find(|&m| m.checked_pow(p) == Some(n))
}

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("no usable draw in {attempts} attempts ({disconnected} disconnected, {infeasible} infeasible)")]
    Exhausted {
        attempts: u32,
        disconnected: u32,
        infeasible: u32,
    },
}

/// Geometry and undirected adjacency before energies are assigned.
struct Skeleton {
    points: Vec<NodeCoord>,
    pairs: Vec<(usize, usize)>,
    /// Pairs used to fit noise zones.
    zone_pairs: Option<Vec<(usize, usize)>>,
}

pub fn generate(spec: &GenSpec) -> Result<Instance, GenError> {
    spec.check()?;
    let quantization = Quantization::new(spec.quantization).expect("checked");
    let (mut disconnected, mut infeasible) = (0u32, 0u32);
    for attempt in 0..spec.max_attempts {
        let seed = derive_seed(spec.seed, attempt);
        let mut rng = SeededRng::new(seed);
        let skeleton = match spec.family {
            Family::Euclidean => euclidean_skeleton(spec, &mut rng),
            Family::Lattice => lattice_skeleton(spec),
        };
        let fit_on = skeleton.zone_pairs.as_deref().unwrap_or(&skeleton.pairs);
        let plan = place_zones(
            &skeleton.points,
            fit_on,
            spec.dim,
            spec.noise_target,
            spec.noise_tolerance,
            spec.zone_side,
            &mut rng,
        );
        let quiet = restricted(&plan.zones, &skeleton.points, &skeleton.pairs);
        let (start, goal) = farthest_pair(&skeleton.points);
        let mut inst = Instance {
            edges: build_edges(&skeleton, &quiet, &spec.energy, &quantization),
            nodes: skeleton.points,
            start,
            goal,
            b0: Units::ZERO,
            bmin: Units::ZERO,
            bmax: Units::ZERO,
            q0: Units::ZERO,
            startup: Units::ZERO,
            quantization,
            meta: None,
        };
        let Ok(sup) = sup_path(&inst) else {
            disconnected += 1;
            continue;
        };
        let energy: i64 = sup.edges.iter().map(|&e| inst.edges[e].drain.0).sum();
        let widest = sup
            .edges
            .iter()
            .map(|&e| inst.edges[e].drain.0)
            .max()
            .unwrap_or(0);
        let c = &spec.calibration;
        let bmax = ((c.b_frac * energy as f64).round() as i64)
            .max(2 * widest)
            .max(1);
        inst.bmax = Units(bmax);
        inst.b0 = Units(bmax);
        inst.q0 = Units((c.q_frac * energy as f64).round() as i64);
        inst.startup = Units((c.v_frac * bmax as f64).round() as i64);

        let verified = if spec.verify {
            let config = SolverConfig {
                limits: Limits {
                    max_labels: Some(spec.verify_max_labels),
                    max_time: None,
                },
                ..SolverConfig::new(Selection::Label, HeuristicKind::Sup)
            };
            match solve(&inst, &config) {
                Ok(SolveOutcome::Optimal { .. }) => "feasible",
                Ok(SolveOutcome::Infeasible { .. }) => {
                    infeasible += 1;
                    continue;
                }
                Err(SolveError::LimitExceeded { .. }) => "label_limit",
                Err(e) => panic!("generated instance failed to solve: {e}"),
            }
        } else {
            "skipped"
        };

        inst.meta = Some(json!({
            "generator": spec,
            "rng": "xoshiro256++ seeded by splitmix64",
            "attempt": attempt,
            "attempt_seed": seed,
            "disconnected_draws": disconnected,
            "infeasible_draws": infeasible,
            "zones": plan.zones.len(),
            "noise_fraction": inst.noise_fraction(),
            "noise_target_met": plan.target_met,
            "sup_cost": sup.cost,
            "sup_energy": quantization.to_nominal(Units(energy)),
            "verified": verified,
        }));
        return Ok(inst);
    }
    Err(GenError::Exhausted {
        attempts: spec.max_attempts,
        disconnected,
        infeasible,
    })
}

/// Uniform points in the unit square or cube, coordinates drawn x, y, z.
fn euclidean_skeleton(spec: &GenSpec, rng: &mut SeededRng) -> Skeleton {
    let n = spec.n_nodes;
    let points: Vec<NodeCoord> = (0..n)
        .map(|_| {
            let x = rng.uniform();
            let y = rng.uniform();
            if spec.dim == 3 {
                NodeCoord::spatial(x, y, rng.uniform())
            } else {
                NodeCoord::planar(x, y)
            }
        })
        .collect();
    let k = spec.k_neighbors.min(n - 1);
    let pairs = knn_pairs(&points, spec.dim, k);
    let zone_pairs = spec
        .zone_k
        .filter(|&zk| zk != spec.k_neighbors)
        .map(|zk| knn_pairs(&points, spec.dim, zk.min(n - 1)));
    Skeleton {
        points,
        pairs,
        zone_pairs,
    }
}

/// Unit lattice, node `(x, y, z)` at index `(z ny + y) nx + x`. 2D uses the
/// 4-neighbourhood; 3D adds the four planar moves combined with one step up
/// or down, for 12 neighbours.
fn lattice_skeleton(spec: &GenSpec) -> Skeleton {
    let [nx, ny, nz] = spec.lattice_shape().expect("checked");
    let index = |x: usize, y: usize, z: usize| (z * ny + y) * nx + x;
    let mut points = Vec::with_capacity(spec.n_nodes);
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                points.push(if spec.dim == 3 {
                    NodeCoord::spatial(x as f64, y as f64, z as f64)
                } else {
                    NodeCoord::planar(x as f64, y as f64)
                });
            }
        }
    }
    let planar: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
    let vertical: &[isize] = if spec.dim == 3 { &[0, 1, -1] } else { &[0] };
    let mut pairs = Vec::new();
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                let here = index(x, y, z);
                for &(dx, dy) in &planar {
                    for &dz in vertical {
                        let (tx, ty, tz) = (x as isize + dx, y as isize + dy, z as isize + dz);
                        if tx < 0
                            || ty < 0
                            || tz < 0
                            || tx >= nx as isize
                            || ty >= ny as isize
                            || tz >= nz as isize
                        {
                            continue;
                        }
                        let there = index(tx as usize, ty as usize, tz as usize);
                        if here < there {
                            pairs.push((here, there));
                        }
                    }
                }
            }
        }
    }
    pairs.sort_unstable();
    Skeleton {
        points,
        pairs,
        zone_pairs: None,
    }
}

/// Both directions of every pair, `(i, j)` before `(j, i)`.
fn build_edges(
    skeleton: &Skeleton,
    quiet: &[bool],
    energy: &EnergyModel,
    q: &Quantization,
) -> Vec<Edge> {
    let mut edges = Vec::with_capacity(2 * skeleton.pairs.len());
    for (k, &(i, j)) in skeleton.pairs.iter().enumerate() {
        let (a, b) = (&skeleton.points[i], &skeleton.points[j]);
        let cost = grid_length(a.distance(b));
        for (from, to, p, r) in [(i, j, a, b), (j, i, b, a)] {
            let climb = r.z.unwrap_or(0.0) - p.z.unwrap_or(0.0);
            let (drain, recharge, gliding) = if climb > 0.0 {
                (
                    energy.alpha * cost * energy.uphill_factor,
                    energy.beta * cost * energy.uphill_factor,
                    false,
                )
            } else if climb < 0.0 {
                (0.0, energy.beta * cost * energy.glide_z_factor, true)
            } else {
                (energy.alpha * cost, energy.beta * cost, false)
            };
            edges.push(Edge {
                from,
                to,
                cost,
                drain: q.to_units(drain).0,
                recharge: q.to_units(recharge).0,
                gen_allowed: !quiet[k],
                gliding,
            });
        }
    }
    edges
}
