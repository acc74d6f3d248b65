//! Dyadic maximal operators.
//!
//! All four maximal functions are pointwise suprema of cube averages over
//! the cubes containing a point, so each one is a single top-down sweep: a
//! per-level vector carries the running maximum along every root-to-leaf
//! chain, giving O(2^N) work. `local_maximal_integrals` repeats the sweep
//! once per starting level to produce `int_Q M(w chi_Q)` for every cube Q
//! in O(N 2^N) total, which is what the Wilson constant and the L log L
//! functional consume.

use crate::grid::{cube_integrals, Cube, DyadicGrid};
use crate::par;
use crate::weight::{GridFunction, Weight};

/// `M_d f (x) = sup_{Q ∋ x} <|f|>_Q`.
pub fn dyadic_maximal(f: &GridFunction) -> GridFunction {
    let grid = *f.grid();
    let ints = cube_integrals(&grid, f.abs().values());
    let values = top_down_max(&grid, |id| ints[id] / Cube::from_id(id).measure());
    GridFunction::new(grid, values).expect("averages of a finite function are finite")
}

/// Weighted maximal function `M_{d,sigma} f`: sup of sigma-averages of |f|.
pub fn weighted_maximal(f: &GridFunction, sigma: &Weight) -> GridFunction {
    let grid = *f.grid();
    assert_eq!(&grid, sigma.grid());
    let fsig: Vec<f64> = f
        .values()
        .iter()
        .zip(sigma.values())
        .map(|(&a, &s)| a.abs() * s)
        .collect();
    let ints = cube_integrals(&grid, &fsig);
    let values = top_down_max(&grid, |id| ints[id] / sigma.mass(&Cube::from_id(id)));
    GridFunction::new(grid, values).expect("sigma-averages are finite")
}

/// Logarithmic maximal function `M_0 f = sup_Q exp(<log |f|>_Q)`.
///
/// A zero leaf value makes the geometric mean of every containing cube 0.
pub fn log_maximal(f: &GridFunction) -> GridFunction {
    let grid = *f.grid();
    // a zero value makes log-averages -inf; exp brings them back to 0
    let logs: Vec<f64> = f.values().iter().map(|&v| v.abs().ln()).collect();
    let ints = cube_integrals(&grid, &logs);
    let sup_log = top_down_max(&grid, |id| ints[id] / Cube::from_id(id).measure());
    GridFunction::new(grid, sup_log.into_iter().map(f64::exp).collect())
        .expect("exp of log-averages is finite")
}

/// `M_r w = (M_d(w^r))^{1/r}` with leafwise exponentiation; requires r > 1.
pub fn mr_maximal(w: &Weight, r: f64) -> GridFunction {
    assert!(r > 1.0, "mr_maximal needs r > 1");
    dyadic_maximal(&w.pow(r).as_function()).map(|v| v.powf(1.0 / r))
}

/// Weak `L^{1,infty}(w)` quasi-norm: `sup_t t * w({|g| > t})`, computed
/// exactly by maximizing `v * w({|g| >= v})` over the distinct leaf values.
pub fn weak_quasinorm(g: &GridFunction, w: &Weight) -> f64 {
    let grid = g.grid();
    assert_eq!(grid, w.grid());
    let cell = grid.leaf_measure();
    let mut pairs: Vec<(f64, f64)> = g
        .values()
        .iter()
        .zip(w.values())
        .map(|(&v, &wi)| (v.abs(), wi * cell))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut cum = 0.0;
    let mut best = 0.0f64;
    let mut i = 0;
    while i < pairs.len() {
        let v = pairs[i].0;
        while i < pairs.len() && pairs[i].0 == v {
            cum += pairs[i].1;
            i += 1;
        }
        best = best.max(v * cum);
    }
    best
}

/// For every cube Q, the localized maximal integral
/// `int_Q M_d(w chi_Q)`, where the supremum defining `M_d(w chi_Q)` on Q
/// runs over the subcubes R with x in R ⊆ Q. Indexed by cube id.
pub fn local_maximal_integrals(w: &Weight) -> Vec<f64> {
    let grid = *w.grid();
    let depth = grid.depth();
    let cell = grid.leaf_measure();
    // One top-down sweep per root level; levels are independent.
    let per_level: Vec<Vec<f64>> = par::map_indexed(depth + 1, |k| {
        let mut running: Vec<f64> = grid.cubes_at_level(k).map(|q| w.average(&q)).collect();
        for level in k + 1..=depth {
            let mut next = Vec::with_capacity(1 << level);
            for pos in 0..1usize << level {
                let avg = w.average(&Cube { level, pos });
                next.push(running[pos / 2].max(avg));
            }
            running = next;
        }
        // running now holds M_d(w chi_Q) per leaf, for the level-k root
        // containing each leaf; integrate per root.
        let span = 1usize << (depth - k);
        (0..1usize << k)
            .map(|pos| running[pos * span..(pos + 1) * span].iter().sum::<f64>() * cell)
            .collect()
    });
    let mut out = vec![0.0; grid.cube_count()];
    for (k, per_root) in per_level.iter().enumerate() {
        let base = (1usize << k) - 1;
        out[base..base + per_root.len()].copy_from_slice(per_root);
    }
    out
}

/// Top-down running maximum of a per-cube score along root-to-leaf chains.
fn top_down_max(grid: &DyadicGrid, score: impl Fn(usize) -> f64) -> Vec<f64> {
    let depth = grid.depth();
    let mut running = vec![score(0)];
    for level in 1..=depth {
        let mut next = Vec::with_capacity(1 << level);
        for pos in 0..1usize << level {
            let id = (1usize << level) - 1 + pos;
            next.push(running[pos / 2].max(score(id)));
        }
        running = next;
    }
    running
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Cube, DyadicGrid};

    fn grid(n: usize) -> DyadicGrid {
        DyadicGrid::new(n).unwrap()
    }

    fn gf(n: usize, v: &[f64]) -> GridFunction {
        GridFunction::new(grid(n), v.to_vec()).unwrap()
    }

    // Brute-force oracle: per leaf, enumerate all containing cubes.
    fn bf_dyadic_maximal(f: &GridFunction) -> Vec<f64> {
        let g = f.grid();
        (0..g.leaf_count())
            .map(|j| {
                g.ancestors_of_leaf(j)
                    .map(|q| {
                        g.leaf_range(&q).map(|i| f.values()[i].abs()).sum::<f64>()
                            / g.leaf_range(&q).len() as f64
                    })
                    .fold(0.0f64, f64::max)
            })
            .collect()
    }

    #[test]
    fn spike_example() {
        let m = dyadic_maximal(&gf(2, &[4.0, 0.0, 0.0, 0.0]));
        assert_eq!(m.values(), &[4.0, 2.0, 1.0, 1.0]);
    }

    #[test]
    fn constant_is_fixed_point() {
        let m = dyadic_maximal(&GridFunction::constant(grid(3), -2.5));
        for &v in m.values() {
            assert_eq!(v, 2.5);
        }
    }

    #[test]
    fn signed_function_uses_absolute_averages() {
        let m = dyadic_maximal(&gf(1, &[1.0, -1.0]));
        assert_eq!(m.values(), &[1.0, 1.0]);
    }

    #[test]
    fn matches_brute_force_on_random_input() {
        let f = gf(
            4,
            &[
                0.3, -1.2, 4.0, 0.1, 2.2, 0.0, -0.5, 1.0, 0.9, 3.3, -2.8, 0.4, 1.5, 0.2, 0.6, -0.1,
            ],
        );
        let m = dyadic_maximal(&f);
        let oracle = bf_dyadic_maximal(&f);
        for (a, b) in m.values().iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn weighted_maximal_examples() {
        let g = grid(1);
        let f = gf(1, &[1.0, 0.0]);
        let sigma = Weight::new(g, vec![3.0, 1.0]).unwrap();
        let m = weighted_maximal(&f, &sigma);
        assert!((m.values()[0] - 1.0).abs() < 1e-15);
        assert!((m.values()[1] - 0.75).abs() < 1e-15);

        // sigma = 1 reduces to the dyadic maximal function
        let f = gf(2, &[0.5, 2.0, 0.0, 1.0]);
        let ones = Weight::constant(grid(2), 1.0);
        let a = weighted_maximal(&f, &ones);
        let b = dyadic_maximal(&f);
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-13);
        }

        // f = 1 has every sigma-average 1
        let one = GridFunction::constant(grid(3), 1.0);
        let sigma = Weight::new(grid(3), (1..=8).map(|k| k as f64).collect()).unwrap();
        for &v in weighted_maximal(&one, &sigma).values() {
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn log_maximal_examples() {
        let m = log_maximal(&gf(1, &[4.0, 1.0]));
        assert!((m.values()[0] - 4.0).abs() < 1e-12);
        assert!((m.values()[1] - 2.0).abs() < 1e-12);

        let c = log_maximal(&GridFunction::constant(grid(3), 0.7));
        for &v in c.values() {
            assert!((v - 0.7).abs() < 1e-12);
        }

        // zero value kills the geometric mean of every containing cube
        let m = log_maximal(&gf(1, &[0.0, 3.0]));
        assert_eq!(m.values()[0], 0.0);
        assert!((m.values()[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn mr_maximal_example() {
        let g = grid(1);
        let w = Weight::new(g, vec![4.0, 1.0]).unwrap();
        let m = mr_maximal(&w, 2.0);
        assert!((m.values()[0] - 4.0).abs() < 1e-12);
        assert!((m.values()[1] - 8.5f64.sqrt()).abs() < 1e-12);

        let ones = Weight::constant(grid(4), 1.0);
        for &v in mr_maximal(&ones, 3.0).values() {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn weak_quasinorm_examples() {
        let g = grid(1);
        let ones = Weight::constant(g, 1.0);
        assert!((weak_quasinorm(&gf(1, &[2.0, 1.0]), &ones) - 1.0).abs() < 1e-15);

        let g2 = grid(2);
        let ones2 = Weight::constant(g2, 1.0);
        assert!((weak_quasinorm(&gf(2, &[3.0, 0.0, 0.0, 0.0]), &ones2) - 0.75).abs() < 1e-15);

        // constant g: |c| * w([0,1))
        let w = Weight::new(g, vec![2.0, 4.0]).unwrap();
        let c = GridFunction::constant(g, -1.5);
        assert!((weak_quasinorm(&c, &w) - 1.5 * 3.0).abs() < 1e-15);

        // closed-level vs open-level maximization agrees on a 3-value example
        let g3 = grid(2);
        let w3 = Weight::new(g3, vec![1.0, 2.0, 1.0, 2.0]).unwrap();
        let f3 = gf(2, &[3.0, 2.0, 1.0, 1.0]);
        let exact = weak_quasinorm(&f3, &w3);
        // sup over open thresholds, sampled just below each value
        let mut open_best = 0.0f64;
        for &lam in &[3.0 - 1e-9, 2.0 - 1e-9, 1.0 - 1e-9] {
            let mass: f64 = f3
                .values()
                .iter()
                .zip(w3.values())
                .filter(|(v, _)| v.abs() > lam)
                .map(|(_, &wi)| wi * g3.leaf_measure())
                .sum();
            open_best = open_best.max(lam * mass);
        }
        assert!((exact - open_best).abs() < 1e-6);
    }

    #[test]
    fn localized_integrals_match_direct_enumeration() {
        let g = grid(3);
        let w = Weight::new(g, vec![8.0, 1.0, 0.5, 2.0, 1.0, 4.0, 0.25, 1.0]).unwrap();
        let ints = local_maximal_integrals(&w);
        for q in g.cubes() {
            // direct: per leaf in Q, max average over R with leaf ⊆ R ⊆ Q
            let direct: f64 = g
                .leaf_range(&q)
                .map(|j| {
                    (q.level..=g.depth())
                        .map(|lev| {
                            let r = Cube {
                                level: lev,
                                pos: j >> (g.depth() - lev),
                            };
                            w.average(&r)
                        })
                        .fold(0.0f64, f64::max)
                })
                .sum::<f64>()
                * g.leaf_measure();
            assert!(
                (ints[q.id()] - direct).abs() < 1e-12 * direct.max(1.0),
                "cube {:?}",
                q
            );
        }
    }

    #[test]
    fn wilson_integral_depth_one_example() {
        // two-valued t=3 on the left half at N=1: int_[0,1) M = 5/2
        let g = grid(1);
        let w = Weight::new(g, vec![3.0, 1.0]).unwrap();
        let ints = local_maximal_integrals(&w);
        assert!((ints[0] - 2.5).abs() < 1e-15);
    }
}
