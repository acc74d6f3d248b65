//! Weight functionals: A_p and A_infty constants, the two-weight pair
//! functionals, reverse Holder exponents, BMO norms, and the A_1 helper.
//!
//! Every supremum is an exact maximum over all `2^(N+1) - 1` cubes, taken
//! from cached bottom-up aggregates; nothing here is sampled.

use serde::{Deserialize, Serialize};

use crate::grid::{cube_integrals, cube_mins, Cube};
use crate::maximal::local_maximal_integrals;
use crate::par;
use crate::weight::{dual_weight, GridFunction, Weight};

/// Dimensional constant in the sharp reverse Holder exponent, `2^(11+d)`
/// with `d = 1`.
pub const RHI_TAU: f64 = 4096.0;

/// `[w]_{A_p} = sup_Q <w>_Q <w^{-1/(p-1)}>_Q^{p-1}`.
pub fn ap_constant(w: &Weight, p: f64) -> f64 {
    assert!(p > 1.0, "A_p needs p > 1");
    let sigma = dual_weight(w, p).expect("p > 1");
    let grid = w.grid();
    par::max_indexed(grid.cube_count(), |id| {
        let q = Cube::from_id(id);
        w.average(&q) * sigma.average(&q).powf(p - 1.0)
    })
}

/// Hruscev A_infty constant `sup_Q <w>_Q exp(<log w^{-1}>_Q)`.
pub fn ainfty_hruscev(w: &Weight) -> f64 {
    let grid = w.grid();
    let logs: Vec<f64> = w.values().iter().map(|&v| v.ln()).collect();
    let log_ints = cube_integrals(grid, &logs);
    par::max_indexed(grid.cube_count(), |id| {
        let q = Cube::from_id(id);
        w.average(&q) * (-log_ints[id] / q.measure()).exp()
    })
}

/// Wilson A_infty constant `sup_Q w(Q)^{-1} int_Q M_d(w chi_Q)`, with the
/// localized dyadic maximal function (suprema over subcubes of Q only).
pub fn ainfty_wilson(w: &Weight) -> f64 {
    let ints = local_maximal_integrals(w);
    let grid = w.grid();
    grid.cubes()
        .map(|q| ints[q.id()] / w.mass(&q))
        .fold(0.0f64, f64::max)
}

/// Two-weight pair functionals over a common cube supremum.
#[derive(Debug, Clone, Copy)]
pub struct TwoWeightConstants {
    /// `A_p[w,sigma] = sup_Q <w>_Q <sigma>_Q^{p-1}`.
    pub a_p_pair: f64,
    /// `B_p[w,sigma] = sup_Q <w>_Q <sigma>_Q^p exp(<log sigma^{-1}>_Q)`.
    pub b_p_pair: f64,
}

pub fn two_weight_bp(w: &Weight, sigma: &Weight, p: f64) -> TwoWeightConstants {
    assert!(p > 1.0, "B_p needs p > 1");
    let grid = w.grid();
    assert_eq!(grid, sigma.grid());
    let logs: Vec<f64> = sigma.values().iter().map(|&v| v.ln()).collect();
    let log_ints = cube_integrals(grid, &logs);
    let folded = par::map_indexed(grid.cube_count(), |id| {
        let q = Cube::from_id(id);
        let wq = w.average(&q);
        let sq = sigma.average(&q);
        let geo_inv = (-log_ints[id] / q.measure()).exp();
        (wq * sq.powf(p - 1.0), wq * sq.powf(p) * geo_inv)
    });
    let mut out = TwoWeightConstants {
        a_p_pair: 0.0,
        b_p_pair: 0.0,
    };
    for (a, b) in folded {
        out.a_p_pair = out.a_p_pair.max(a);
        out.b_p_pair = out.b_p_pair.max(b);
    }
    out
}

/// Sharp reverse Holder exponent `r(w) = 1 + 1/(tau [w]_{A_infty}')`.
pub fn rhi_exponent(w: &Weight) -> f64 {
    rhi_exponent_with_tau(w, RHI_TAU)
}

/// Same with an explicit tau (the negative control runs tau = 2).
pub fn rhi_exponent_with_tau(w: &Weight, tau: f64) -> f64 {
    1.0 + 1.0 / (tau * ainfty_wilson(w))
}

#[derive(Debug, Clone, Copy)]
pub struct RhiReport {
    pub holds: bool,
    /// `max_Q (<w^r>_Q)^{1/r} / <w>_Q`.
    pub worst_ratio: f64,
    pub worst_cube: Cube,
}

/// Check the reverse Holder inequality `(<w^r>_Q)^{1/r} <= 2 <w>_Q` over
/// every cube.
pub fn rhi_verify(w: &Weight, r: f64) -> RhiReport {
    assert!(r > 1.0, "reverse Holder needs r > 1");
    let grid = w.grid();
    let pow_ints = cube_integrals(
        grid,
        &w.values().iter().map(|v| v.powf(r)).collect::<Vec<_>>(),
    );
    let mut worst_ratio = 0.0;
    let mut worst_cube = Cube::ROOT;
    for q in grid.cubes() {
        let lhs = (pow_ints[q.id()] / q.measure()).powf(1.0 / r);
        let ratio = lhs / w.average(&q);
        if ratio > worst_ratio {
            worst_ratio = ratio;
            worst_cube = q;
        }
    }
    RhiReport {
        holds: worst_ratio <= 2.0,
        worst_ratio,
        worst_cube,
    }
}

/// Constant-free core of the converse reverse Holder estimate: a weight
/// satisfying the inequality with constant K at exponent r has Wilson
/// constant at most `c_d K r'`.
pub fn rhi_inverse_bound(k: f64, r: f64) -> f64 {
    assert!(k >= 1.0 && r > 1.0);
    k * r / (r - 1.0)
}

/// `A_1` constant on the grid: `sup_Q <w>_Q * ess sup_Q w^{-1}`.
pub fn a1_constant(w: &Weight) -> f64 {
    let grid = w.grid();
    let mins = cube_mins(grid, w.values());
    grid.cubes()
        .map(|q| w.average(&q) / mins[q.id()])
        .fold(0.0f64, f64::max)
}

/// `BMO(w)` norm: per cube the inner infimum over c is attained at a
/// w-weighted median of f, computed exactly by sorting; `None` means
/// Lebesgue measure.
pub fn bmo_norm(f: &GridFunction, w: Option<&Weight>) -> f64 {
    let grid = f.grid();
    let cell = grid.leaf_measure();
    par::max_indexed(grid.cube_count(), |id| {
        let q = Cube::from_id(id);
        let mut pairs: Vec<(f64, f64)> = grid
            .leaf_range(&q)
            .map(|j| {
                let mass = match w {
                    Some(w) => w.values()[j] * cell,
                    None => cell,
                };
                (f.values()[j], mass)
            })
            .collect();
        weighted_median_oscillation(&mut pairs)
    })
}

/// `min_c sum |f_i - c| m_i / sum m_i`, attained at the weighted median.
fn weighted_median_oscillation(pairs: &mut [(f64, f64)]) -> f64 {
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    let mut cum = 0.0;
    let mut median = pairs[pairs.len() - 1].0;
    for &(v, mass) in pairs.iter() {
        cum += mass;
        if cum >= 0.5 * total {
            median = v;
            break;
        }
    }
    pairs
        .iter()
        .map(|&(v, m)| (v - median).abs() * m)
        .sum::<f64>()
        / total
}

/// All weight functionals of a weight (and its dual) in one record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub p: f64,
    pub ap: f64,
    pub ainfty_hruscev: f64,
    pub ainfty_wilson: f64,
    pub dual_ap: f64,
    pub dual_ainfty_hruscev: f64,
    pub dual_ainfty_wilson: f64,
    pub a1: f64,
    pub a_p_pair: f64,
    pub b_p_pair: f64,
    pub rhi_exponent: f64,
}

pub fn constants_report(w: &Weight, p: f64) -> ConstantsReport {
    assert!(p > 1.0);
    let sigma = dual_weight(w, p).expect("p > 1");
    let p_conj = p / (p - 1.0);
    let pair = two_weight_bp(w, &sigma, p);
    let wilson = ainfty_wilson(w);
    ConstantsReport {
        p,
        ap: ap_constant(w, p),
        ainfty_hruscev: ainfty_hruscev(w),
        ainfty_wilson: wilson,
        dual_ap: ap_constant(&sigma, p_conj),
        dual_ainfty_hruscev: ainfty_hruscev(&sigma),
        dual_ainfty_wilson: ainfty_wilson(&sigma),
        a1: a1_constant(w),
        a_p_pair: pair.a_p_pair,
        b_p_pair: pair.b_p_pair,
        rhi_exponent: 1.0 + 1.0 / (RHI_TAU * wilson),
    }
}

impl ConstantsReport {
    /// An all-ones report (the constant weight), useful as a normalization
    /// reference for bound cores.
    pub fn unit(p: f64) -> ConstantsReport {
        ConstantsReport {
            p,
            ap: 1.0,
            ainfty_hruscev: 1.0,
            ainfty_wilson: 1.0,
            dual_ap: 1.0,
            dual_ainfty_hruscev: 1.0,
            dual_ainfty_wilson: 1.0,
            a1: 1.0,
            a_p_pair: 1.0,
            b_p_pair: 1.0,
            rhi_exponent: 1.0 + 1.0 / RHI_TAU,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::DyadicGrid;
    use crate::weight::{materialize, LeafSet, WeightFamilySpec};

    fn grid(n: usize) -> DyadicGrid {
        DyadicGrid::new(n).unwrap()
    }

    fn two_valued(t: f64, n: usize) -> Weight {
        materialize(
            &WeightFamilySpec::TwoValued {
                t,
                e: LeafSet::LeftHalf,
            },
            &grid(n),
        )
        .unwrap()
    }

    #[test]
    fn ap_examples() {
        assert!((ap_constant(&Weight::constant(grid(4), 1.0), 2.0) - 1.0).abs() < 1e-14);
        // two-valued t=3, left half: (t+1)^2 / 4t = 4/3, attained at the root
        let w = two_valued(3.0, 6);
        assert!((ap_constant(&w, 2.0) - 4.0 / 3.0).abs() < 1e-12);
        // raw [4,1]: root (5/2)(5/8) = 25/16
        let w = Weight::new(grid(1), vec![4.0, 1.0]).unwrap();
        assert!((ap_constant(&w, 2.0) - 25.0 / 16.0).abs() < 1e-14);
    }

    #[test]
    fn hruscev_examples() {
        assert!((ainfty_hruscev(&Weight::constant(grid(3), 7.3)) - 1.0).abs() < 1e-12);
        // (t+1)/(2 sqrt t) at t=4 is 1.25
        let w = two_valued(4.0, 5);
        assert!((ainfty_hruscev(&w) - 1.25).abs() < 1e-12);
        let w = Weight::new(grid(1), vec![4.0, 1.0]).unwrap();
        assert!((ainfty_hruscev(&w) - 1.25).abs() < 1e-12);
    }

    #[test]
    fn wilson_examples() {
        assert!((ainfty_wilson(&Weight::constant(grid(4), 2.0)) - 1.0).abs() < 1e-12);
        // two-valued t=3 at N=1: root integral 5/2 over mass 2
        let w = two_valued(3.0, 1);
        assert!((ainfty_wilson(&w) - 1.25).abs() < 1e-14);
        // closed form for the left-half family: (3t+1)/(2t+2), any depth
        for n in [2usize, 4, 7] {
            for t in [2.0f64, 5.0, 100.0] {
                let w = two_valued(t, n);
                let expected = (3.0 * t + 1.0) / (2.0 * t + 2.0);
                assert!((ainfty_wilson(&w) - expected).abs() < 1e-12, "t={t}, n={n}");
            }
        }
    }

    #[test]
    fn wilson_matches_brute_force_oracle() {
        // independent route: per cube Q, walk every leaf of Q and take the
        // maximum average over the chain of subcubes of Q containing it
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;
        let g = grid(4);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let w = Weight::new(
                g,
                (0..16).map(|_| rng.gen_range(-2.5..2.5f64).exp()).collect(),
            )
            .unwrap();
            let mut oracle = 0.0f64;
            for q in g.cubes() {
                let integral: f64 = g
                    .leaf_range(&q)
                    .map(|j| {
                        (q.level..=g.depth())
                            .map(|lev| {
                                w.average(&Cube {
                                    level: lev,
                                    pos: j >> (g.depth() - lev),
                                })
                            })
                            .fold(0.0f64, f64::max)
                            * g.leaf_measure()
                    })
                    .sum();
                oracle = oracle.max(integral / w.mass(&q));
            }
            let fast = ainfty_wilson(&w);
            assert!(
                (fast - oracle).abs() <= 1e-12 * oracle,
                "sweep {fast} vs oracle {oracle}"
            );
        }
    }

    #[test]
    fn bp_examples() {
        let g = grid(3);
        let ones = Weight::constant(g, 1.0);
        let tw = two_weight_bp(&ones, &ones, 2.0);
        assert!((tw.b_p_pair - 1.0).abs() < 1e-14);

        // sigma = 1: B_p = A_p-pair = max average of w
        let w = Weight::new(g, (1..=8).map(|k| k as f64).collect()).unwrap();
        let tw = two_weight_bp(&w, &ones, 3.0);
        assert!((tw.a_p_pair - 8.0).abs() < 1e-12);
        assert!((tw.b_p_pair - tw.a_p_pair).abs() < 1e-12);

        // [4,1] against [1,4] at p=2: 125/16 at the root
        let w = Weight::new(grid(1), vec![4.0, 1.0]).unwrap();
        let s = Weight::new(grid(1), vec![1.0, 4.0]).unwrap();
        let tw = two_weight_bp(&w, &s, 2.0);
        assert!((tw.b_p_pair - 125.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn rhi_exponent_examples() {
        let ones = Weight::constant(grid(3), 1.0);
        assert!((rhi_exponent(&ones) - (1.0 + 1.0 / 4096.0)).abs() < 1e-15);
        let w = two_valued(3.0, 1); // wilson = 1.25
        assert!((rhi_exponent(&w) - (1.0 + 1.0 / 5120.0)).abs() < 1e-15);
        // conjugate exponent identity r' = 1 + tau * wilson
        let r = rhi_exponent(&w);
        let expected = 1.0 + 4096.0 * 1.25;
        assert!((r / (r - 1.0) - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn rhi_verify_examples() {
        let ones = Weight::constant(grid(4), 1.0);
        let rep = rhi_verify(&ones, 3.0);
        assert!(rep.holds && (rep.worst_ratio - 1.0).abs() < 1e-12);

        let w = Weight::new(grid(1), vec![4.0, 1.0]).unwrap();
        let rep = rhi_verify(&w, 2.0);
        let expected = (17.0f64 / 2.0).sqrt() / 2.5;
        assert!((rep.worst_ratio - expected).abs() < 1e-12);
        assert_eq!(rep.worst_cube, Cube::ROOT);
    }

    #[test]
    fn rhi_inverse_bound_arithmetic() {
        assert!((rhi_inverse_bound(1.0, 2.0) - 2.0).abs() < 1e-15);
        assert!((rhi_inverse_bound(2.0, 1.5) - 6.0).abs() < 1e-15);
    }

    #[test]
    fn bmo_examples() {
        let g = grid(4);
        assert_eq!(bmo_norm(&GridFunction::constant(g, 9.0), None), 0.0);

        // f = [log t, 0] at depth 1: oscillation (log t)/2; at t = e^2 it is 1
        let t: f64 = std::f64::consts::E * std::f64::consts::E;
        let f = GridFunction::new(grid(1), vec![t.ln(), 0.0]).unwrap();
        assert!((bmo_norm(&f, None) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bmo_weighted_median_matches_scan_oracle() {
        let g = grid(3);
        let f = GridFunction::new(g, vec![1.0, -2.0, 0.5, 3.0, 0.0, 1.5, -1.0, 2.0]).unwrap();
        let w = Weight::new(g, vec![0.5, 2.0, 1.0, 3.0, 1.0, 0.25, 1.0, 2.0]).unwrap();
        let fast = bmo_norm(&f, Some(&w));
        // oracle: brute-force the infimum over candidate constants per cube
        let mut worst = 0.0f64;
        for q in g.cubes() {
            let mut best = f64::MAX;
            for c_src in g.leaf_range(&q) {
                let c = f.values()[c_src];
                let cost: f64 = g
                    .leaf_range(&q)
                    .map(|j| (f.values()[j] - c).abs() * w.values()[j] * g.leaf_measure())
                    .sum();
                best = best.min(cost / w.mass(&q));
            }
            worst = worst.max(best);
        }
        assert!((fast - worst).abs() < 1e-12);
    }

    #[test]
    fn a1_constant_examples() {
        assert!((a1_constant(&Weight::constant(grid(3), 4.0)) - 1.0).abs() < 1e-14);
        // two-valued left half: root average (t+1)/2 over min 1
        let w = two_valued(5.0, 4);
        assert!((a1_constant(&w) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn duality_symmetry_identity() {
        // [sigma]_{A_{p'}}^{p-1} = [w]_{A_p}, exactly
        let w = Weight::new(grid(4), (0..16).map(|j| 0.5 + (j % 5) as f64).collect()).unwrap();
        for p in [1.5, 2.0, 3.0] {
            let sigma = dual_weight(&w, p).unwrap();
            let p_conj = p / (p - 1.0);
            let lhs = ap_constant(&sigma, p_conj).powf(p - 1.0);
            let rhs = ap_constant(&w, p);
            assert!((lhs - rhs).abs() < 1e-10 * rhs, "p={p}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn report_on_unit_weight() {
        let rep = constants_report(&Weight::constant(grid(5), 1.0), 2.0);
        assert!((rep.ap - 1.0).abs() < 1e-12);
        assert!((rep.ainfty_hruscev - 1.0).abs() < 1e-12);
        assert!((rep.ainfty_wilson - 1.0).abs() < 1e-12);
        assert!((rep.b_p_pair - 1.0).abs() < 1e-12);
        assert!((rep.rhi_exponent - (1.0 + 1.0 / 4096.0)).abs() < 1e-14);
    }
}
