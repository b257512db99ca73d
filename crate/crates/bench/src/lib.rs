//! Fixed instances for the criterion benchmarks, generated once per process.

use hfsp_core::generators::{generate, GenSpec};
use hfsp_core::Instance;

/// A verified 2D Euclidean instance with `n` nodes.
pub fn euclidean_2d(n: usize, seed: u64) -> Instance {
    generate(&GenSpec::euclidean(2, n, seed)).expect("benchmark instance generates")
}

/// A verified 3D lattice, twenty layers high with a `side` x `side` base.
pub fn lattice_3d(side: usize, seed: u64) -> Instance {
    generate(&GenSpec::lattice(3, 0, seed).with_lattice_dims([side, side, 20]))
        .expect("benchmark instance generates")
}
