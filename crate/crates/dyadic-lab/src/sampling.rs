//! Seeded generators for the Monte Carlo verification batches.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::grid::DyadicGrid;
use crate::weight::{GridFunction, LeafSet, Weight};

/// Weight with iid log-uniform leaf values in `[e^-spread, e^spread]`.
pub fn random_weight(grid: DyadicGrid, rng: &mut ChaCha8Rng, spread: f64) -> Weight {
    let values = (0..grid.leaf_count())
        .map(|_| rng.gen_range(-spread..spread).exp())
        .collect();
    Weight::new(grid, values).expect("positive by construction")
}

/// Signed function with iid uniform values in `[-1, 1]`.
pub fn random_function(grid: DyadicGrid, rng: &mut ChaCha8Rng) -> GridFunction {
    let values = (0..grid.leaf_count())
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    GridFunction::new(grid, values).expect("finite by construction")
}

/// Strictly positive function with log-uniform values.
pub fn random_positive_function(
    grid: DyadicGrid,
    rng: &mut ChaCha8Rng,
    spread: f64,
) -> GridFunction {
    let values = (0..grid.leaf_count())
        .map(|_| rng.gen_range(-spread..spread).exp())
        .collect();
    GridFunction::new(grid, values).expect("finite by construction")
}

/// Nonempty proper random leaf subset.
pub fn random_leaf_set(grid: DyadicGrid, rng: &mut ChaCha8Rng) -> LeafSet {
    let n = grid.leaf_count();
    loop {
        let leaves: Vec<usize> = (0..n).filter(|_| rng.gen::<bool>()).collect();
        if !leaves.is_empty() && leaves.len() < n {
            return LeafSet::Leaves(leaves);
        }
    }
}

/// Multiplicative cascade: the leaf with binary digits b_1..b_N gets the
/// value `prod(2 theta if b_i = 0 else 2(1 - theta))`. Every cube average
/// is a product of the same factors, so mass splits `theta : 1 - theta`
/// at every scale. The classical extremal shape for reverse Holder
/// sharpness.
pub fn cascade_weight(grid: DyadicGrid, theta: f64) -> Weight {
    assert!(theta > 0.0 && theta < 1.0);
    let depth = grid.depth();
    let values = (0..grid.leaf_count())
        .map(|j| {
            let mut v = 1.0f64;
            for bit in 0..depth {
                if (j >> (depth - 1 - bit)) & 1 == 0 {
                    v *= 2.0 * theta;
                } else {
                    v *= 2.0 * (1.0 - theta);
                }
            }
            v
        })
        .collect();
    Weight::new(grid, values).expect("cascade values are positive")
}

/// Anchored spike: `u * 2^N` on the first cell, 1 elsewhere, so the spike
/// carries mass `u` against a unit background.
pub fn spike_weight(grid: DyadicGrid, u: f64) -> Weight {
    assert!(u > 0.0);
    let mut values = vec![1.0; grid.leaf_count()];
    values[0] = u * grid.leaf_count() as f64;
    Weight::new(grid, values).expect("spike values are positive")
}
