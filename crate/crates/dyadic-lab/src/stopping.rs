//! Stopping-time constructions: Calderon-Zygmund cubes and principal cubes.

use crate::grid::{cube_integrals, Cube, DyadicGrid};
use crate::weight::{GridFunction, Weight};

/// The maximal dyadic cubes on which the average of a nonnegative function
/// first exceeds a threshold.
#[derive(Debug, Clone)]
pub struct CZDecomposition {
    pub lambda: f64,
    pub cubes: Vec<Cube>,
    /// Average of the function over each selected cube.
    pub averages: Vec<f64>,
    /// Set when the root average already exceeded lambda, in which case the
    /// root itself is returned as the single cube and the two-sided bound
    /// does not apply.
    pub root_flagged: bool,
}

/// Maximal dyadic cubes with `<f>_Q > lambda`, for nonnegative `f`.
///
/// When `lambda >= <f>_root`, every selected cube Q satisfies the two-sided
/// bound `lambda < <f>_Q <= 2 lambda` (its parent average is at most
/// lambda, and halving an interval at most doubles the average).
pub fn cz_decompose(f: &GridFunction, lambda: f64) -> CZDecomposition {
    assert!(lambda > 0.0, "cz_decompose needs lambda > 0");
    debug_assert!(f.values().iter().all(|&v| v >= 0.0));
    let grid = *f.grid();
    let ints = cube_integrals(&grid, f.values());
    let avg = |cube: &Cube| ints[cube.id()] / cube.measure();

    if avg(&Cube::ROOT) > lambda {
        return CZDecomposition {
            lambda,
            averages: vec![avg(&Cube::ROOT)],
            cubes: vec![Cube::ROOT],
            root_flagged: true,
        };
    }

    let mut cubes = Vec::new();
    let mut averages = Vec::new();
    // depth-first search; stop descending at the first cube over threshold
    let mut stack = vec![Cube::ROOT];
    while let Some(q) = stack.pop() {
        let a = avg(&q);
        if a > lambda {
            cubes.push(q);
            averages.push(a);
        } else if q.level < grid.depth() {
            let [l, r] = q.children();
            stack.push(r);
            stack.push(l);
        }
    }
    CZDecomposition {
        lambda,
        cubes,
        averages,
        root_flagged: false,
    }
}

/// Principal cubes of a measure: the stopping family where the running
/// sigma-average more than doubles.
#[derive(Debug, Clone)]
pub struct PrincipalCubes {
    pub root: Cube,
    /// Generation index of each principal cube (0 = the starting layer).
    pub generations: Vec<Vec<usize>>,
    /// All principal cubes, in discovery (generation) order.
    pub cubes: Vec<Cube>,
    /// sigma-average of each principal cube.
    pub sigma_averages: Vec<f64>,
    /// Index into `cubes` of the principal parent; `None` for generation 0.
    pub parents: Vec<Option<usize>>,
}

impl PrincipalCubes {
    /// `|E(S)| = |S| - sum |S'|` over the principal cubes S' maximal
    /// strictly inside S (the next generation within S).
    pub fn e_measure(&self, idx: usize) -> f64 {
        let mut m = self.cubes[idx].measure();
        for (j, parent) in self.parents.iter().enumerate() {
            if *parent == Some(idx) {
                m -= self.cubes[j].measure();
            }
        }
        m
    }

    /// Weighted mass of `E(S)` against an arbitrary weight.
    pub fn e_mass(&self, idx: usize, w: &Weight) -> f64 {
        let mut m = w.mass(&self.cubes[idx]);
        for (j, parent) in self.parents.iter().enumerate() {
            if *parent == Some(idx) {
                m -= w.mass(&self.cubes[j]);
            }
        }
        m
    }

    /// Partition a collection of cubes into stopping regions: each cube is
    /// assigned to the smallest principal cube containing it. Cubes not
    /// contained in any principal cube are dropped.
    pub fn assign_regions(&self, cubes: &[Cube]) -> Vec<Vec<Cube>> {
        let mut regions = vec![Vec::new(); self.cubes.len()];
        for q in cubes {
            // smallest principal cube containing q: scan generations deep-first
            let mut best: Option<usize> = None;
            for (i, s) in self.cubes.iter().enumerate() {
                if s.contains(q) {
                    match best {
                        Some(b) if self.cubes[b].level >= s.level => {}
                        _ => best = Some(i),
                    }
                }
            }
            if let Some(i) = best {
                regions[i].push(*q);
            }
        }
        regions
    }
}

/// Principal cubes of `sigma` below `root`.
///
/// Without a filter, generation 0 is `{root}` and generation k+1 consists
/// of the maximal cubes Q strictly inside a generation-k cube S with
/// `<sigma>_Q > 2 <sigma>_S`. With a filter, the recursion runs inside the
/// filtered collection: generation 0 is the set of maximal filtered cubes
/// under `root`, and maximality is relative to the filter.
pub fn principal_cubes(
    sigma: &Weight,
    root: Cube,
    filter: Option<&dyn Fn(&Cube) -> bool>,
) -> PrincipalCubes {
    let grid = *sigma.grid();
    debug_assert!(grid.contains_cube(&root));

    let mut cubes = Vec::new();
    let mut sigma_averages = Vec::new();
    let mut parents = Vec::new();
    let mut generations: Vec<Vec<usize>> = Vec::new();

    // Generation 0.
    let gen0: Vec<Cube> = match filter {
        None => vec![root],
        Some(pred) => maximal_filtered(&grid, &root, pred),
    };
    let mut frontier = Vec::new();
    let mut g0 = Vec::new();
    for q in gen0 {
        let idx = cubes.len();
        sigma_averages.push(sigma.average(&q));
        cubes.push(q);
        parents.push(None);
        g0.push(idx);
        frontier.push(idx);
    }
    generations.push(g0);

    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &s_idx in &frontier {
            let s = cubes[s_idx];
            let threshold = 2.0 * sigma_averages[s_idx];
            // maximal cubes inside s (relative to the filter) whose average
            // exceeds the doubling threshold
            let mut stack: Vec<Cube> = vec![s];
            while let Some(q) = stack.pop() {
                let candidate = q != s && filter.is_none_or(|pred| pred(&q));
                if candidate && sigma.average(&q) > threshold {
                    let idx = cubes.len();
                    sigma_averages.push(sigma.average(&q));
                    cubes.push(q);
                    parents.push(Some(s_idx));
                    next.push(idx);
                } else if q.level < grid.depth() {
                    let [l, r] = q.children();
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        generations.push(next.clone());
        frontier = next;
    }

    PrincipalCubes {
        root,
        generations,
        cubes,
        sigma_averages,
        parents,
    }
}

/// Maximal cubes under `root` satisfying a predicate.
fn maximal_filtered(grid: &DyadicGrid, root: &Cube, pred: &dyn Fn(&Cube) -> bool) -> Vec<Cube> {
    let mut out = Vec::new();
    let mut stack = vec![*root];
    while let Some(q) = stack.pop() {
        if pred(&q) {
            out.push(q);
        } else if q.level < grid.depth() {
            let [l, r] = q.children();
            stack.push(r);
            stack.push(l);
        }
    }
    out
}

/// Band index of the two-weight product `<w>_K <sigma>_K`: the integer `a`
/// with `2^a < product <= 2^{a+1}`.
pub fn a2_band(w: &Weight, sigma: &Weight, cube: &Cube) -> i32 {
    let prod = w.average(cube) * sigma.average(cube);
    debug_assert!(prod > 0.0);
    (prod.log2()).ceil() as i32 - 1
}

/// Largest Carleson packing ratio `sup_R (sum_{Q ⊆ R} a_Q) / sigma(R)` of a
/// per-cube nonnegative sequence, computed bottom-up.
pub fn carleson_packing_constant(a: &[f64], sigma: &Weight) -> f64 {
    let grid = sigma.grid();
    assert_eq!(a.len(), grid.cube_count());
    let mut subtree = a.to_vec();
    let leaf_base = grid.leaf_count() - 1;
    for id in (0..leaf_base).rev() {
        subtree[id] += subtree[2 * id + 1] + subtree[2 * id + 2];
    }
    grid.cubes()
        .map(|q| subtree[q.id()] / sigma.mass(&q))
        .fold(0.0f64, f64::max)
}
