//! Axis-aligned noise zones. An edge is restricted when both endpoints lie
//! in the same zone.

use super::rng::SeededRng;
use crate::instance::NodeCoord;

/// Upper bound on zone draws for one instance.
const MAX_DRAWS: u32 = 4000;

#[derive(Clone, Debug, PartialEq)]
pub struct Zone {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl Zone {
    pub fn contains(&self, p: &NodeCoord) -> bool {
        let c = [p.x, p.y, p.z.unwrap_or(0.0)];
        (0..3).all(|a| self.lo[a] <= c[a] && c[a] <= self.hi[a])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZonePlan {
    pub zones: Vec<Zone>,
    /// Restricted share of the pairs the plan was fitted on.
    pub fraction: f64,
    pub target_met: bool,
    pub draws: u32,
}

/// Bounding box of the points, one entry per axis.
pub fn bounds(points: &[NodeCoord]) -> ([f64; 3], [f64; 3]) {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in points {
        for (a, v) in [p.x, p.y, p.z.unwrap_or(0.0)].into_iter().enumerate() {
            lo[a] = lo[a].min(v);
            hi[a] = hi[a].max(v);
        }
    }
    (lo, hi)
}

pub fn restricted(zones: &[Zone], points: &[NodeCoord], pairs: &[(usize, usize)]) -> Vec<bool> {
    pairs
        .iter()
        .map(|&(i, j)| {
            zones
                .iter()
                .any(|z| z.contains(&points[i]) && z.contains(&points[j]))
        })
        .collect()
}

/// Adds random boxes until the restricted fraction of `pairs` is within
/// `tol / 2` of `target`, rejecting boxes that would overshoot it. When the
/// draw budget runs out the plan counts as met if it lies within `tol`.
pub fn place_zones(
    points: &[NodeCoord],
    pairs: &[(usize, usize)],
    dim: u8,
    target: f64,
    tol: f64,
    side: (f64, f64),
    rng: &mut SeededRng,
) -> ZonePlan {
    let m = pairs.len();
    let mut plan = ZonePlan {
        zones: Vec::new(),
        fraction: 0.0,
        target_met: false,
        draws: 0,
    };
    if m == 0 || target <= 0.0 {
        plan.target_met = true;
        return plan;
    }
    let (lo, hi) = bounds(points);
    let mut hit = vec![false; m];
    let mut count = 0usize;
    let inner = tol / 2.0;
    while plan.draws < MAX_DRAWS && (count as f64 / m as f64) < target - inner {
        plan.draws += 1;
        let mut zone = Zone {
            lo: [0.0; 3],
            hi: [0.0; 3],
        };
        for a in 0..3 {
            if a >= dim as usize {
                zone.lo[a] = f64::NEG_INFINITY;
                zone.hi[a] = f64::INFINITY;
                continue;
            }
            let extent = hi[a] - lo[a];
            let len = rng.range(side.0, side.1) * extent;
            zone.lo[a] = lo[a] + rng.range(0.0, extent - len);
            zone.hi[a] = zone.lo[a] + len;
        }
        let fresh: Vec<usize> = (0..m)
            .filter(|&e| {
                !hit[e] && zone.contains(&points[pairs[e].0]) && zone.contains(&points[pairs[e].1])
            })
            .collect();
        if fresh.is_empty() || (count + fresh.len()) as f64 / m as f64 > target + inner {
            continue;
        }
        count += fresh.len();
        for e in fresh {
            hit[e] = true;
        }
        plan.zones.push(zone);
    }
    plan.fraction = count as f64 / m as f64;
    plan.target_met = (plan.fraction - target).abs() <= tol;
    plan
}
