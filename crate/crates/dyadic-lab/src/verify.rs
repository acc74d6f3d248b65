//! The verification battery: every quantitative statement the library can
//! check, packaged as named results. Checks with an explicit constant are
//! hard assertions; statements whose leading constant is only dimensional
//! report a fitted constant instead. The negative control deliberately
//! misconfigures the reverse Holder exponent and must detect violations,
//! guarding the comparators against passing vacuously.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bounds;
use crate::constants::{
    a1_constant, ainfty_hruscev, ainfty_wilson, ap_constant, bmo_norm, constants_report,
    rhi_exponent_with_tau, rhi_verify, two_weight_bp, RHI_TAU,
};
use crate::grid::{cube_integrals, Cube, DyadicGrid};
use crate::maximal::{dyadic_maximal, local_maximal_integrals, log_maximal, mr_maximal};
use crate::norms::{
    sawyer_testing_constant, two_weight_maximal_norm_estimate, weighted_lp_norm_estimate,
    OperatorHandle,
};
use crate::sampling::{random_function, random_positive_function, random_weight};
use crate::shift::{apply_shift, build_shift, commutator_matrix, shift_as_matrix, CoeffSource};
use crate::stopping::{a2_band, carleson_packing_constant, cz_decompose, principal_cubes};
use crate::weight::{dual_weight, materialize, GridFunction, LeafSet, Weight, WeightFamilySpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// Inequality with a pinned constant; failure is a bug or a wrong theorem.
    Hard,
    /// Dimensional constant unspecified; the fitted constant is reported
    /// and only sanity requirements (finiteness, stability) are asserted.
    Fitted,
    /// Deliberate misconfiguration that must produce violations.
    Control,
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub kind: CheckKind,
    pub passed: bool,
    pub detail: String,
    pub fitted_constant: Option<f64>,
}

impl CheckResult {
    fn hard(name: &'static str, passed: bool, detail: String) -> CheckResult {
        CheckResult {
            name,
            kind: CheckKind::Hard,
            passed,
            detail,
            fitted_constant: None,
        }
    }

    fn fitted(name: &'static str, passed: bool, fitted: f64, detail: String) -> CheckResult {
        CheckResult {
            name,
            kind: CheckKind::Fitted,
            passed,
            detail,
            fitted_constant: Some(fitted),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub depth: usize,
    pub seed: u64,
    pub trials: usize,
    pub budget: usize,
}

impl Default for VerifyConfig {
    fn default() -> VerifyConfig {
        VerifyConfig {
            depth: 8,
            seed: 42,
            trials: 50,
            budget: 100,
        }
    }
}

fn rng_for(cfg_seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg_seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Run every check whose name contains one of the filters (all when empty).
pub fn run_suite(cfg: &VerifyConfig, filters: &[String]) -> Vec<CheckResult> {
    let all: Vec<fn(&VerifyConfig) -> CheckResult> = vec![
        check_weight_aggregates,
        check_dual_involution,
        check_maximal_pointwise,
        check_m0_lp_bound,
        check_llogl,
        check_wilson_vs_hruscev,
        check_ainfty_ap_chain,
        check_bp_sandwich,
        check_rhi,
        check_rhi_inverse,
        check_shift_contraction,
        check_shift_domination,
        check_cz_structure,
        check_principal_structure,
        check_packing,
        check_carleson,
        check_mixed_maximal,
        check_duality_symmetry,
        check_exp_decay,
        check_a2_shift_fitted,
        check_a1_fitted,
        check_commutator_fitted,
        check_john_nirenberg,
        check_bmo_log,
        check_bmo_embedding,
        check_sawyer,
        check_extrapolation_audit,
        check_buckley_vs_mixed,
        check_power_ap_comparability,
    ];
    let mut out = Vec::new();
    for f in all {
        let result = f(cfg);
        if filters.is_empty() || filters.iter().any(|flt| result.name.contains(flt.as_str())) {
            out.push(result);
        }
    }
    out
}

pub fn check_weight_aggregates(cfg: &VerifyConfig) -> CheckResult {
    let grid = DyadicGrid::new(cfg.depth.min(8)).unwrap();
    let mut rng = rng_for(cfg.seed, 1);
    let mut worst = 0.0f64;
    for _ in 0..cfg.trials.min(20) {
        let w = random_weight(grid, &mut rng, 3.0);
        for q in grid.cubes() {
            let direct: f64 =
                grid.leaf_range(&q).map(|j| w.values()[j]).sum::<f64>() * grid.leaf_measure();
            worst = worst.max((w.mass(&q) - direct).abs() / direct.max(1e-300));
        }
    }
    CheckResult::hard(
        "weight-aggregates",
        worst <= 1e-12,
        format!("worst relative cache error {worst:.2e} (tolerance 1e-12)"),
    )
}

pub fn check_dual_involution(cfg: &VerifyConfig) -> CheckResult {
    let grid = DyadicGrid::new(cfg.depth.min(8)).unwrap();
    let mut rng = rng_for(cfg.seed, 2);
    let mut worst = 0.0f64;
    for _ in 0..cfg.trials.min(20) {
        let w = random_weight(grid, &mut rng, 3.0);
        for p in [1.5, 2.0, 4.0] {
            let p_conj = p / (p - 1.0);
            let back = dual_weight(&dual_weight(&w, p).unwrap(), p_conj).unwrap();
            for (a, b) in back.values().iter().zip(w.values()) {
                worst = worst.max((a - b).abs() / b);
            }
        }
    }
    CheckResult::hard(
        "dual-involution",
        worst <= 1e-12,
        format!("worst relative roundtrip error {worst:.2e}"),
    )
}

pub fn check_maximal_pointwise(cfg: &VerifyConfig) -> CheckResult {
    let grid = DyadicGrid::new(cfg.depth.min(8)).unwrap();
    let mut rng = rng_for(cfg.seed, 3);
    let mut ok = true;
    for _ in 0..cfg.trials.min(30) {
        let f = random_positive_function(grid, &mut rng, 2.0);
        let m0 = log_maximal(&f);
        let md = dyadic_maximal(&f);
        ok &= m0
            .values()
            .iter()
            .zip(md.values())
            .all(|(a, b)| *a <= b * (1.0 + 1e-12));
        let w = random_weight(grid, &mut rng, 2.0);
        let m15 = mr_maximal(&w, 1.5);
        let m3 = mr_maximal(&w, 3.0);
        ok &= m15
            .values()
            .iter()
            .zip(m3.values())
            .all(|(a, b)| *a <= b * (1.0 + 1e-12));
    }
    CheckResult::hard(
        "maximal-pointwise",
        ok,
        "M_0 <= M_d and M_r monotone in r pointwise".into(),
    )
}

/// `||M_0 f||_p^p <= e ||f||_p^p` for p in {1/2, 1, 2}.
pub fn check_m0_lp_bound(cfg: &VerifyConfig) -> CheckResult {
    let grid = DyadicGrid::new(cfg.depth).unwrap();
    let mut rng = rng_for(cfg.seed, 4);
    let mut worst = 0.0f64;
    for _ in 0..cfg.trials {
        let f = random_positive_function(grid, &mut rng, 3.0);
        let m0 = log_maximal(&f);
        for p in [0.5, 1.0, 2.0] {
            let ratio = m0.lp_norm_pow(p, None) / f.lp_norm_pow(p, None);
            worst = worst.max(ratio);
        }
    }
    CheckResult::hard(
        "m0-lp-bound",
        worst <= std::f64::consts::E + 1e-9,
        format!("worst ||M_0 f||_p^p / ||f||_p^p = {worst:.6} (bound e)"),
    )
}

/// `int_Q w log(e + w/<w>_Q) <= 4 int_Q M_d(w chi_Q)` for every cube.
pub fn check_llogl(cfg: &VerifyConfig) -> CheckResult {
    let grid = DyadicGrid::new(cfg.depth).unwrap();
    let mut rng = rng_for(cfg.seed, 5);
    let cell = grid.leaf_measure();
    let mut worst = 0.0f64;
    for _ in 0..cfg.trials {
        let w = random_weight(grid, &mut rng, 3.0);
        let maximal_ints = local_maximal_integrals(&w);
        for q in grid.cubes() {
            let avg = w.average(&q);
            let lhs: f64 = grid
                .leaf_range(&q)
                .map(|j| {
                    let v = w.values()[j];
                    v * (std::f64::consts::E + v / avg).ln() * cell
                })
                .sum();
            worst = worst.max(lhs / (4.0 * maximal_ints[q.id()]));
        }
    }
    CheckResult::hard(
        "llogl",
        worst <= 1.0 + 1e-9,
        format!("worst LHS / (4 int M) = {worst:.6}"),
    )
}

pub fn check_wilson_vs_hruscev(cfg: &VerifyConfig) -> CheckResult {
    let grid = DyadicGrid::new(cfg.depth).unwrap();
    let mut rng = rng_for(cfg.seed, 6);
    let mut worst = 0.0f64;
    for _ in 0..cfg.trials {
        let w = random_weight(grid, &mut rng, 3.0);
        worst = worst.max(ainfty_wilson(&w) / (std::f64::consts::E * ainfty_hruscev(&w)));
    }
    CheckResult::hard(
        "wilson-vs-hruscev",
        worst <= 1.0 + 1e-9,
        format!("worst [w]'/(e [w]_inf) = {worst:.6}"),
    )
}

pub fn check_ainfty_ap_chain(cfg: &VerifyConfig) -> CheckResult {
    let grid = DyadicGrid::new(cfg.depth).unwrap();
    let mut rng = rng_for(cfg.seed, 7);
    let mut ok = true;
    for _ in 0..cfg.trials.min(25) {
        let w = random_weight(grid, &mut rng, 2.5);
        let hru = ainfty_hruscev(&w);
        for p in [1.5, 2.0, 3.0] {
            ok &= hru <= ap_constant(&w, p) * (1.0 + 1e-10);
        }
    }
    CheckResult::hard(
        "ainfty-ap-chain",
        ok,
        "[w]_{A_infty} <= [w]_{A_p} for p in {1.5, 2, 3}".into(),
    )
}

pub fn check_bp_sandwich(cfg: &VerifyConfig) -> CheckResult {
    let grid = DyadicGrid::new(cfg.depth).unwrap();
    let mut rng = rng_for(cfg.seed, 8);
    let mut ok = true;
    for _ in 0..cfg.trials.min(30) {
        let w = random_weight(grid, &mut rng, 2.0);
        let sigma = random_weight(grid, &mut rng, 2.0);
        for p in [1.5, 2.0, 3.0] {
            let tw = two_weight_bp(&w, &sigma, p);
            let hru_sigma = ainfty_hruscev(&sigma);
            ok &= tw.a_p_pair <= tw.b_p_pair * (1.0 + 1e-10);
            ok &= tw.b_p_pair <= tw.a_p_pair * hru_sigma * (1.0 + 1e-10);
        }
    }
    CheckResult::hard(
        "bp-sandwich",
        ok,
        "A_p[w,s] <= B_p[w,s] <= A_p[w,s] [s]_{A_infty}".into(),
    )
}

/// Reverse Holder at the sharp exponent; `tau` is the 2^(11+d) constant.
pub fn check_rhi(cfg: &VerifyConfig) -> CheckResult {
    let (violations, worst, total) = rhi_scan(cfg.depth, cfg.seed, cfg.trials, RHI_TAU);
    CheckResult::hard(
        "rhi",
        violations == 0,
        format!("{violations}/{total} violations, worst ratio {worst:.6} (bound 2)"),
    )
}

/// Converse direction: a weight satisfying the inequality with constant K
/// at exponent r has `[w]' <= C K r'`; the fitted C is reported.
pub fn check_rhi_inverse(cfg: &VerifyConfig) -> CheckResult {
    let grid = DyadicGrid::new(cfg.depth).unwrap();
    let mut rng = rng_for(cfg.seed, 26);
    let mut fitted = 0.0f64;
    for _ in 0..cfg.trials.min(30) {
        let w = random_weight(grid, &mut rng, 3.0);
        let wilson = ainfty_wilson(&w);
        let r = 1.0 + 1.0 / (RHI_TAU * wilson);
        let measured_k = rhi_verify(&w, r).worst_ratio.max(1.0);
        fitted = fitted.max(wilson / crate::constants::rhi_inverse_bound(measured_k, r));
    }
    CheckResult::fitted(
        "rhi-inverse",
        fitted.is_finite() && fitted > 0.0 && fitted <= 1.0 + 1e-9,
        fitted,
        format!("[w]' <= {fitted:.6} x (K r'); the dyadic converse holds with constant 1"),
    )
}

/// Shared scan: random weights plus near-singular power weights.
pub fn rhi_scan(depth: usize, seed: u64, trials: usize, tau: f64) -> (usize, f64, usize) {
    let grid = DyadicGrid::new(depth).unwrap();
    let mut rng = rng_for(seed, 9);
    let mut weights: Vec<Weight> = (0..trials)
        .map(|_| {
            let spread = rng.gen_range(0.5..3.5);
            random_weight(grid, &mut rng, spread)
        })
        .collect();
    for alpha in [-0.6, -0.8, -0.9, -0.95] {
        weights.push(materialize(&WeightFamilySpec::Power { alpha }, &grid).unwrap());
    }
    let total = weights.len();
    let results = crate::par::map_slice(&weights, |w| {
        let r = rhi_exponent_with_tau(w, tau);
        rhi_verify(w, r).worst_ratio
    });
    let violations = results.iter().filter(|&&r| r > 2.0).count();
    let worst = results.iter().fold(0.0f64, |m, &r| m.max(r));
    (violations, worst, total)
}

/// The negative control: a deliberately faulty tau must be detected.
///
/// The control family is chosen adversarially: besides random weights it
/// contains the shapes that maximize the reverse Holder ratio on this
/// model (multiplicative cascades, anchored spikes, near-singular power
/// weights). On finite grids the dyadic inequality is much sharper than
/// the safe constant tau = 2^12: the measured worst ratio stays below 2
/// for every materializable weight until tau drops to about 1, so choose
/// the injected tau accordingly (tau = 1 fires reliably from depth 10 up).
pub fn negative_control_rhi(cfg: &VerifyConfig, tau: f64) -> CheckResult {
    let (violations, worst, total) = rhi_control_scan(cfg.depth.max(10), cfg.seed, cfg.trials, tau);
    CheckResult {
        name: "rhi-negative-control",
        kind: CheckKind::Control,
        passed: violations >= 1,
        detail: format!(
            "tau={tau} produced {violations}/{total} violations, worst ratio {worst:.4}"
        ),
        fitted_constant: None,
    }
}

/// Control-family scan: random weights plus the extremal shapes.
pub fn rhi_control_scan(depth: usize, seed: u64, trials: usize, tau: f64) -> (usize, f64, usize) {
    let grid = DyadicGrid::new(depth).unwrap();
    let mut rng = rng_for(seed, 9);
    let mut weights: Vec<Weight> = (0..trials)
        .map(|_| {
            let spread = rng.gen_range(0.5..3.5);
            random_weight(grid, &mut rng, spread)
        })
        .collect();
    for alpha in [-0.8, -0.9, -0.95] {
        weights.push(materialize(&WeightFamilySpec::Power { alpha }, &grid).unwrap());
    }
    for theta in [0.85, 0.9, 0.95] {
        weights.push(crate::sampling::cascade_weight(grid, theta));
    }
    for u in [0.05, 0.1, 0.2] {
        weights.push(crate::sampling::spike_weight(grid, u));
    }
    let total = weights.len();
    let results = crate::par::map_slice(&weights, |w| {
        let r = rhi_exponent_with_tau(w, tau);
        rhi_verify(w, r).worst_ratio
    });
    let violations = results.iter().filter(|&&r| r > 2.0).count();
    let worst = results.iter().fold(0.0f64, |m, &r| m.max(r));
    (violations, worst, total)
}

pub fn check_shift_contraction(cfg: &VerifyConfig) -> CheckResult {
    let grid = DyadicGrid::new(cfg.depth.min(7)).unwrap();
    let mut rng = rng_for(cfg.seed, 10);
    let mut worst = 0.0f64;
    for (seed_offset, cancellative) in [(0u64, true), (1, false)] {
        let sha = build_shift(
            grid,
            1,
            2,
            CoeffSource::Random {
                seed: cfg.seed.wrapping_add(seed_offset),
            },
            cancellative,
        )
        .unwrap();
        let cube_ids: Vec<usize> = sha.blocks().iter().map(|b| b.cube.id()).collect();
        for _ in 0..20 {
            let keep: std::collections::HashSet<usize> = cube_ids
                .iter()
                .copied()
                .filter(|_| rng.gen::<bool>())
                .collect();
            for _ in 0..20 {
                let f = random_function(grid, &mut rng);
                let out = apply_shift(&sha, &f, Some(&|q: &Cube| keep.contains(&q.id())));
                worst = worst.max(out.l2_norm(None) / f.l2_norm(None));
            }
        }
    }
    CheckResult::hard(
        "shift-contraction",
        worst <= 1.0 + 1e-10,
        format!("worst subcollection ||sha f||_2/||f||_2 = {worst:.6}"),
    )
}

pub fn check_shift_domination(cfg: &VerifyConfig) -> CheckResult {
    let grid = DyadicGrid::new(cfg.depth.min(6)).unwrap();
    let mut rng = rng_for(cfg.seed, 11);
    let mut ok = true;
    for cancellative in [true, false] {
        let sha = build_shift(
            grid,
            2,
            1,
            CoeffSource::Random { seed: cfg.seed },
            cancellative,
        )
        .unwrap();
        let f = random_function(grid, &mut rng);
        let abs_ints = cube_integrals(&grid, f.abs().values());
        for block in sha.blocks() {
            let kq = block.cube;
            let single = apply_shift(&sha, &f, Some(&|c: &Cube| *c == kq));
            let bound = abs_ints[kq.id()] / kq.measure();
            for j in 0..grid.leaf_count() {
                let inside = grid.leaf_range(&kq).contains(&j);
                let v = single.values()[j].abs();
                ok &= if inside { v <= bound + 1e-12 } else { v == 0.0 };
            }
        }
    }
    CheckResult::hard(
        "shift-domination",
        ok,
        "|A_K f| <= chi_K <|f|>_K for every block".into(),
    )
}

pub fn check_cz_structure(cfg: &VerifyConfig) -> CheckResult {
    let grid = DyadicGrid::new(cfg.depth).unwrap();
    let mut rng = rng_for(cfg.seed, 12);
    let mut ok = true;
    for _ in 0..cfg.trials.min(40) {
        let f = random_positive_function(grid, &mut rng, 2.0);
        let sigma = random_weight(grid, &mut rng, 1.5);
        let fsigma = f.mul(&sigma.as_function());
        let root_avg = fsigma.integral_on(&Cube::ROOT);
        let lambda = root_avg * rng.gen_range(1.0..4.0);
        let dec = cz_decompose(&fsigma, lambda);
        ok &= !dec.root_flagged;
        // disjoint, two-sided bound
        for (i, q) in dec.cubes.iter().enumerate() {
            ok &= dec.averages[i] > lambda && dec.averages[i] <= 2.0 * lambda + 1e-12;
            for r in dec.cubes.iter().skip(i + 1) {
                ok &= !q.contains(r) && !r.contains(q);
            }
        }
        // union equals the superlevel set of M_d(f sigma)
        let md = dyadic_maximal(&fsigma);
        let mut in_union = vec![false; grid.leaf_count()];
        for q in &dec.cubes {
            for j in grid.leaf_range(q) {
                in_union[j] = true;
            }
        }
        for (covered, &m) in in_union.iter().zip(md.values()) {
            ok &= *covered == (m > lambda);
        }
    }
    CheckResult::hard(
        "cz-structure",
        ok,
        "maximal cubes: disjoint, lambda < avg <= 2 lambda, union = {M > lambda}".into(),
    )
}

pub fn check_principal_structure(cfg: &VerifyConfig) -> CheckResult {
    let grid = DyadicGrid::new(cfg.depth).unwrap();
    let mut rng = rng_for(cfg.seed, 13);
    let mut ok = true;
    for _ in 0..cfg.trials {
        let sigma = random_weight(grid, &mut rng, 3.0);
        let pc = principal_cubes(&sigma, Cube::ROOT, None);
        let mut e_total = 0.0;
        for i in 0..pc.cubes.len() {
            let e = pc.e_measure(i);
            ok &= e >= 0.5 * pc.cubes[i].measure() - 1e-12;
            e_total += e;
        }
        ok &= (e_total - 1.0).abs() < 1e-10;
    }
    CheckResult::hard(
        "principal-structure",
        ok,
        "|E(S)| >= |S|/2 and the E(S) partition the root".into(),
    )
}

/// Packing of principal cubes against the Wilson constant, both for the
/// plain construction and inside A_2 bands.
pub fn check_packing(cfg: &VerifyConfig) -> CheckResult {
    let grid = DyadicGrid::new(cfg.depth).unwrap();
    let mut rng = rng_for(cfg.seed, 14);
    let mut worst = 0.0f64;
    for _ in 0..cfg.trials {
        let w = random_weight(grid, &mut rng, 2.5);
        let sigma = dual_weight(&w, 2.0).unwrap();
        let wilson = ainfty_wilson(&w);
        let budget = 2.0 * wilson * w.total_mass();

        let pc = principal_cubes(&sigma, Cube::ROOT, None);
        let sum: f64 = pc.cubes.iter().map(|s| w.mass(s)).sum();
        worst = worst.max(sum / budget);

        // banded variant: stop on sigma-averages inside one A_2 band
        let band_of_root = a2_band(&w, &sigma, &Cube::ROOT);
        for a in [band_of_root, band_of_root + 1] {
            let filter = |q: &Cube| a2_band(&w, &sigma, q) == a;
            let pc = principal_cubes(&sigma, Cube::ROOT, Some(&filter));
            let sum: f64 = pc.cubes.iter().map(|s| w.mass(s)).sum();
            worst = worst.max(sum / budget);
        }
    }
    CheckResult::hard(
        "principal-packing",
        worst <= 1.0 + 1e-9,
        format!("worst sum w(S) / (2 [w]' w(Q)) = {worst:.6}"),
    )
}

/// Dyadic Carleson embedding with constant `A^{1/p} p'`.
pub fn check_carleson(cfg: &VerifyConfig) -> CheckResult {
    let grid = DyadicGrid::new(cfg.depth).unwrap();
    let mut rng = rng_for(cfg.seed, 15);
    let cell = grid.leaf_measure();
    let mut worst = 0.0f64;
    for _ in 0..cfg.trials {
        let sigma = random_weight(grid, &mut rng, 2.0);
        // random nonnegative sequence, scaled per cube by its sigma-mass
        let a: Vec<f64> = grid
            .cubes()
            .map(|q| {
                if rng.gen::<f64>() < 0.4 {
                    rng.gen_range(0.0..1.0) * sigma.mass(&q)
                } else {
                    0.0
                }
            })
            .collect();
        let packing = carleson_packing_constant(&a, &sigma);
        let f = random_positive_function(grid, &mut rng, 2.0);
        let fsig_ints = cube_integrals(
            &grid,
            &f.values()
                .iter()
                .zip(sigma.values())
                .map(|(&x, &s)| x * s)
                .collect::<Vec<_>>(),
        );
        for p in [1.5, 2.0, 3.0] {
            let lhs: f64 = grid
                .cubes()
                .map(|q| {
                    let avg = fsig_ints[q.id()] / sigma.mass(&q);
                    a[q.id()] * avg.powf(p)
                })
                .sum();
            let p_conj = p / (p - 1.0);
            let rhs = packing
                * p_conj.powf(p)
                * f.values()
                    .iter()
                    .zip(sigma.values())
                    .map(|(&x, &s)| x.powf(p) * s * cell)
                    .sum::<f64>();
            worst = worst.max(lhs / rhs);
        }
    }
    CheckResult::hard(
        "carleson",
        worst <= 1.0 + 1e-9,
        format!("worst sum a_Q <f>_Q^p / (A p'^p ||f||^p) = {worst:.6}"),
    )
}

/// Two-weight maximal inequality with the explicit constant `4e p'`.
pub fn check_mixed_maximal(cfg: &VerifyConfig) -> CheckResult {
    let (worst, violations, total) =
        mixed_maximal_scan(cfg.depth, cfg.seed, cfg.trials, 10, &[1.5, 2.0, 3.0]);
    CheckResult::hard(
        "mixed-maximal",
        violations == 0,
        format!("{violations}/{total} violations, worst ratio to the 4e p' bound {worst:.6}"),
    )
}

pub fn mixed_maximal_scan(
    depth: usize,
    seed: u64,
    pairs: usize,
    funcs_per_pair: usize,
    ps: &[f64],
) -> (f64, usize, usize) {
    let grid = DyadicGrid::new(depth).unwrap();
    let mut rng = rng_for(seed, 16);
    let mut tasks = Vec::new();
    for _ in 0..pairs {
        let w = random_weight(grid, &mut rng, 2.0);
        let sigma = random_weight(grid, &mut rng, 2.0);
        let fs: Vec<GridFunction> = (0..funcs_per_pair)
            .map(|_| random_function(grid, &mut rng))
            .collect();
        tasks.push((w, sigma, fs));
    }
    let ratios = crate::par::map_slice(&tasks, |(w, sigma, fs)| {
        let mut worst: f64 = 0.0;
        for &p in ps {
            let bound_lead = bounds::MIXED_MAXIMAL_CONSTANT
                * bounds::conjugate(p)
                * two_weight_bp(w, sigma, p).b_p_pair.powf(1.0 / p);
            for f in fs {
                let lhs = dyadic_maximal(&f.mul(&sigma.as_function())).lp_norm(p, Some(w));
                let rhs = bound_lead * f.lp_norm(p, Some(sigma));
                worst = worst.max(lhs / rhs);
            }
        }
        worst
    });
    let worst = ratios.iter().fold(0.0f64, |m, &r| m.max(r));
    let violations = ratios.iter().filter(|&&r| r > 1.0 + 1e-9).count();
    (worst, violations, tasks.len() * ps.len())
}

pub fn check_duality_symmetry(cfg: &VerifyConfig) -> CheckResult {
    let grid = DyadicGrid::new(cfg.depth).unwrap();
    let mut rng = rng_for(cfg.seed, 17);
    let mut worst = 0.0f64;
    for _ in 0..cfg.trials.min(25) {
        let w = random_weight(grid, &mut rng, 2.5);
        for p in [1.5, 2.0, 3.0] {
            let sigma = dual_weight(&w, p).unwrap();
            let lhs = ap_constant(&sigma, p / (p - 1.0)).powf(p - 1.0);
            let rhs = ap_constant(&w, p);
            worst = worst.max((lhs - rhs).abs() / rhs);
        }
    }
    CheckResult::hard(
        "duality-symmetry",
        worst <= 1e-9,
        format!("worst relative defect of [s]_{{A_p'}}^{{p-1}} = [w]_{{A_p}}: {worst:.2e}"),
    )
}

/// Distributional decay of shifts restricted to stopping regions: the upper
/// envelope of `sigma(|sha_{K(S)}(w chi_Q)| > t <w>_S)/sigma(S)` over
/// sampled regions must decay with negative log-linear slope.
pub fn check_exp_decay(cfg: &VerifyConfig) -> CheckResult {
    let grid = DyadicGrid::new(cfg.depth.clamp(7, 9)).unwrap();
    let mut rng = rng_for(cfg.seed, 18);
    let mut envelope = [0.0f64; 8];
    let mut samples = 0usize;
    let shifts = [
        build_shift(
            grid,
            0,
            0,
            CoeffSource::HaarMultiplier {
                seed: Some(cfg.seed),
            },
            true,
        )
        .unwrap(),
        build_shift(grid, 0, 1, CoeffSource::Petermichl, true).unwrap(),
        build_shift(grid, 1, 1, CoeffSource::Random { seed: cfg.seed }, true).unwrap(),
    ];
    for sha in &shifts {
        let r = sha.complexity();
        // random weights see the shift only through their multiscale
        // imbalance; cascades keep the A_2 band product near constant over
        // long chains and exercise the actual tail
        let mut weights: Vec<Weight> = (0..cfg.trials.min(8))
            .map(|_| random_weight(grid, &mut rng, 3.0))
            .collect();
        for theta in [0.58, 0.62, 0.68] {
            weights.push(crate::sampling::cascade_weight(grid, theta));
        }
        for w in &weights {
            let w = w.clone();
            let sigma = dual_weight(&w, 2.0).unwrap();
            let w_chi = w.as_function();
            for class in 0..=r {
                let band_root = a2_band(&w, &sigma, &Cube::ROOT);
                for a in [band_root, band_root + 1, band_root - 1] {
                    let in_class = |q: &Cube| q.level % (r + 1) == class;
                    let in_band = |q: &Cube| a2_band(&w, &sigma, q) == a;
                    let filter = |q: &Cube| in_class(q) && in_band(q);
                    let pc = principal_cubes(&sigma, Cube::ROOT, Some(&filter));
                    if pc.cubes.is_empty() {
                        continue;
                    }
                    let members: Vec<Cube> = grid.cubes().filter(|q| filter(q)).collect();
                    let regions = pc.assign_regions(&members);
                    for (i, region) in regions.iter().enumerate() {
                        if region.is_empty() {
                            continue;
                        }
                        let s = pc.cubes[i];
                        let region_set: std::collections::HashSet<usize> =
                            region.iter().map(|q| q.id()).collect();
                        let g = apply_shift(
                            sha,
                            &w_chi,
                            Some(&|q: &Cube| region_set.contains(&q.id())),
                        );
                        let scale = w.average(&s);
                        let sigma_s = sigma.mass(&s);
                        samples += 1;
                        for (ti, env) in envelope.iter_mut().enumerate() {
                            let t = (ti + 1) as f64;
                            let mass: f64 = g
                                .values()
                                .iter()
                                .zip(sigma.values())
                                .filter(|(gv, _)| gv.abs() > t * scale)
                                .map(|(_, &sv)| sv * grid.leaf_measure())
                                .sum();
                            *env = env.max(mass / sigma_s);
                        }
                    }
                }
            }
        }
    }
    // envelope is automatically nonincreasing; the content is a negative fit
    let pts: Vec<(f64, f64)> = envelope
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0.0)
        .map(|(i, &e)| ((i + 1) as f64, e.ln()))
        .collect();
    let slope = if pts.len() >= 2 {
        fit_slope(&pts)
    } else {
        -1.0
    };
    CheckResult::hard(
        "exp-decay",
        slope < -0.05,
        format!(
            "envelope over {samples} stopping regions: {:?}, log-linear slope {slope:.3}",
            envelope.map(|e| (e * 1e4).round() / 1e4)
        ),
    )
}

fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Exact shift norms against the mixed A_2 core; fitted constant reported.
pub fn check_a2_shift_fitted(cfg: &VerifyConfig) -> CheckResult {
    let depth = cfg.depth.min(8);
    let ts: Vec<f64> = (1..=7).map(|k| (1u64 << (2 * k)) as f64).collect();
    match a2_shift_fitted_constant(depth, cfg.seed, &ts, 3) {
        Some(fitted) => CheckResult::fitted(
            "a2-shift-fitted",
            fitted.is_finite() && fitted > 0.0,
            fitted,
            format!("max measured/core over two-valued sweep at depth {depth}: {fitted:.4}"),
        ),
        None => CheckResult::fitted("a2-shift-fitted", false, f64::NAN, "no data".into()),
    }
}

/// Max over (shift, t) of exact norm / mixed core for the two-valued family.
pub fn a2_shift_fitted_constant(
    depth: usize,
    seed: u64,
    ts: &[f64],
    random_shifts: usize,
) -> Option<f64> {
    let grid = DyadicGrid::new(depth).unwrap();
    let mut shifts = vec![build_shift(grid, 0, 1, CoeffSource::Petermichl, true).ok()?];
    let mut rng = rng_for(seed, 19);
    for _ in 0..random_shifts {
        let m = rng.gen_range(0..=2usize);
        let n = rng.gen_range(0..=2usize);
        let s = rng.gen::<u64>();
        shifts.push(build_shift(grid, m, n, CoeffSource::Random { seed: s }, true).ok()?);
    }
    // one dense matrix lives at a time; the t grid runs on the pool
    let mut best: Option<f64> = None;
    for sha in &shifts {
        let t_matrix = shift_as_matrix(sha, 12).ok()?;
        let complexity = sha.complexity();
        let ratios = crate::par::map_slice(ts, |&t| {
            let w = materialize(
                &WeightFamilySpec::TwoValued {
                    t,
                    e: LeafSet::LeftHalf,
                },
                &grid,
            )
            .unwrap();
            let cr = constants_report(&w, 2.0);
            let core = bounds::bound_a2_shift(&cr, complexity);
            let norm = crate::norms::weighted_l2_norm_exact(&t_matrix, &w);
            norm / core
        });
        for r in ratios {
            best = Some(best.map_or(r, |b: f64| b.max(r)));
        }
    }
    best
}

/// Fitted constants for the A_1 family (strong, weak, dual-weak).
pub fn check_a1_fitted(cfg: &VerifyConfig) -> CheckResult {
    let grid = DyadicGrid::new(cfg.depth.min(8)).unwrap();
    let sha = build_shift(grid, 0, 1, CoeffSource::Petermichl, true).unwrap();
    let mut fitted_strong = 0.0f64;
    let mut fitted_weak = 0.0f64;
    let mut fitted_dual = 0.0f64;
    let mut rng = rng_for(cfg.seed, 20);
    for k in 1..=5 {
        let t = (1u64 << (2 * k)) as f64;
        let w = materialize(
            &WeightFamilySpec::TwoValued {
                t,
                e: LeafSet::LeftHalf,
            },
            &grid,
        )
        .unwrap();
        let a1 = a1_constant(&w);
        let wilson = ainfty_wilson(&w);
        for p in [1.5, 2.0] {
            let measured =
                weighted_lp_norm_estimate(OperatorHandle::Shift(&sha), &w, &w, p, 0, cfg.seed);
            fitted_strong = fitted_strong.max(measured / bounds::bound_a1_strong(a1, wilson, p));
        }
        for _ in 0..cfg.trials.min(10) {
            let f = random_function(grid, &mut rng);
            let g = apply_shift(&sha, &f, None);
            let l1w = f.abs().lp_norm_pow(1.0, Some(&w));
            fitted_weak = fitted_weak.max(
                crate::maximal::weak_quasinorm(&g, &w) / (bounds::bound_a1_weak(a1, wilson) * l1w),
            );
            let g_over_w = GridFunction::new(
                grid,
                g.values()
                    .iter()
                    .zip(w.values())
                    .map(|(&gv, &wv)| gv / wv)
                    .collect(),
            )
            .unwrap();
            let l1 = f.abs().lp_norm_pow(1.0, None);
            fitted_dual = fitted_dual.max(
                crate::maximal::weak_quasinorm(&g_over_w, &w)
                    / (bounds::bound_a1_dual_weak(a1, wilson) * l1),
            );
        }
    }
    let all_finite =
        fitted_strong.is_finite() && fitted_weak.is_finite() && fitted_dual.is_finite();
    CheckResult::fitted(
        "a1-fitted",
        all_finite && fitted_strong > 0.0,
        fitted_strong,
        format!(
            "fitted constants: strong {fitted_strong:.4}, weak {fitted_weak:.4}, dual-weak {fitted_dual:.4}"
        ),
    )
}

/// Exact commutator norms against the k = 1 core with b = log w.
pub fn check_commutator_fitted(cfg: &VerifyConfig) -> CheckResult {
    let ratios = commutator_ratio_sweep(cfg.depth.min(8), &[4.0, 64.0, 1024.0, 16384.0], 1);
    let hi = ratios.iter().fold(0.0f64, |m, &r| m.max(r));
    let lo = ratios.iter().fold(f64::MAX, |m, &r| m.min(r));
    CheckResult::fitted(
        "commutator-fitted",
        hi.is_finite() && lo > 0.0,
        hi,
        format!("ratio range over t sweep: [{lo:.4}, {hi:.4}]"),
    )
}

/// `||[b, sha]||_{B(L^2(w))} / (core * ||b||_BMO)` over the two-valued
/// family with b = log w, exact norms.
pub fn commutator_ratio_sweep(depth: usize, ts: &[f64], order: usize) -> Vec<f64> {
    let grid = DyadicGrid::new(depth).unwrap();
    let sha = build_shift(grid, 0, 1, CoeffSource::Petermichl, true).unwrap();
    let t_matrix = shift_as_matrix(&sha, 12).unwrap();
    crate::par::map_slice(ts, |&t| {
        let w = materialize(
            &WeightFamilySpec::TwoValued {
                t,
                e: LeafSet::LeftHalf,
            },
            &grid,
        )
        .unwrap();
        let b = GridFunction::new(grid, w.values().iter().map(|v| v.ln()).collect()).unwrap();
        let b_bmo = bmo_norm(&b, None);
        let cr = constants_report(&w, 2.0);
        let core = bounds::bound_commutator(&cr, order) * b_bmo.powi(order as i32);
        let c = commutator_matrix(&b, &t_matrix, order);
        let norm = crate::norms::weighted_l2_norm_exact(&c, &w);
        norm / core
    })
}

/// Sharp John-Nirenberg with the dyadic exponent `alpha = 1/8`:
/// `sup_Q avg_Q exp(alpha |b - <b>_Q| / ||b||_BMO)` stays bounded; the
/// bounding beta is dimensional and unnamed, so it is fitted and only
/// finiteness and cross-depth stability are asserted.
pub fn check_john_nirenberg(cfg: &VerifyConfig) -> CheckResult {
    let mut betas = Vec::new();
    for depth in [cfg.depth.saturating_sub(2).max(4), cfg.depth] {
        let grid = DyadicGrid::new(depth).unwrap();
        let mut rng = rng_for(cfg.seed, 27);
        let mut beta = 0.0f64;
        for _ in 0..cfg.trials.min(20) {
            let b = random_function(grid, &mut rng);
            let b_bmo = bmo_norm(&b, None);
            if b_bmo < 1e-9 {
                continue;
            }
            let ints = cube_integrals(&grid, b.values());
            for q in grid.cubes() {
                let avg = ints[q.id()] / q.measure();
                let exp_avg: f64 = grid
                    .leaf_range(&q)
                    .map(|j| (0.125 * (b.values()[j] - avg).abs() / b_bmo).exp())
                    .sum::<f64>()
                    / grid.leaf_range(&q).len() as f64;
                beta = beta.max(exp_avg);
            }
        }
        betas.push(beta);
    }
    let hi = betas.iter().cloned().fold(0.0f64, f64::max);
    let lo = betas.iter().cloned().fold(f64::MAX, f64::min);
    CheckResult::fitted(
        "john-nirenberg",
        hi.is_finite() && hi >= 1.0 && hi / lo <= 1.5,
        hi,
        format!("fitted beta per depth {betas:?} (exponent 1/8)"),
    )
}

/// `||log w||_BMO <= log(2e [w]_{A_infty})`.
pub fn check_bmo_log(cfg: &VerifyConfig) -> CheckResult {
    let grid = DyadicGrid::new(cfg.depth).unwrap();
    let mut rng = rng_for(cfg.seed, 21);
    let mut worst = 0.0f64;
    for _ in 0..cfg.trials {
        let w = random_weight(grid, &mut rng, 3.0);
        let b = GridFunction::new(grid, w.values().iter().map(|v| v.ln()).collect()).unwrap();
        let lhs = bmo_norm(&b, None);
        let rhs = (2.0 * std::f64::consts::E * ainfty_hruscev(&w)).ln();
        worst = worst.max(lhs / rhs);
    }
    CheckResult::hard(
        "bmo-log",
        worst <= 1.0 + 1e-9,
        format!("worst ||log w||_BMO / log(2e [w]_inf) = {worst:.6}"),
    )
}

/// Embedding `BMO -> BMO(w)`: measured ratio against the Wilson core over
/// a search family, fitted constant reported.
pub fn check_bmo_embedding(cfg: &VerifyConfig) -> CheckResult {
    let grid = DyadicGrid::new(cfg.depth).unwrap();
    let mut rng = rng_for(cfg.seed, 22);
    let mut fitted = 0.0f64;
    for _ in 0..cfg.trials.min(15) {
        let w = random_weight(grid, &mut rng, 2.5);
        let ratio = bmo_embedding_ratio(&w, cfg.seed);
        fitted = fitted.max(ratio / bounds::bound_bmo_embedding(ainfty_wilson(&w)));
    }
    CheckResult::fitted(
        "bmo-embedding",
        fitted.is_finite() && fitted > 0.0,
        fitted,
        format!("fitted embedding constant {fitted:.4}"),
    )
}

/// Best `||f||_{BMO(w)} / ||f||_BMO` over the embedding search family:
/// the discretized logarithm, log w itself, Haar functions, indicators,
/// and a few random functions.
pub fn bmo_embedding_ratio(w: &Weight, seed: u64) -> f64 {
    let grid = *w.grid();
    let mut best = 0.0f64;
    let mut consider = |f: &GridFunction| {
        let plain = bmo_norm(f, None);
        if plain > 1e-12 {
            best = best.max(bmo_norm(f, Some(w)) / plain);
        }
    };
    consider(&discretized_log(grid));
    consider(&GridFunction::new(grid, w.values().iter().map(|v| v.ln()).collect()).unwrap());
    for level in 0..grid.depth().min(4) {
        let q = Cube { level, pos: 0 };
        consider(&GridFunction::haar(grid, &q));
        consider(&GridFunction::indicator(grid, &q));
    }
    let mut rng = rng_for(seed, 23);
    for _ in 0..8 {
        consider(&random_function(grid, &mut rng));
    }
    best
}

/// Leaf averages of `log(1/x)` on the grid (exact cell averages:
/// the antiderivative of -log x is x - x log x).
pub fn discretized_log(grid: DyadicGrid) -> GridFunction {
    let cell = grid.leaf_measure();
    let anti = |x: f64| {
        if x == 0.0 {
            0.0
        } else {
            x - x * x.ln()
        }
    };
    let values = (0..grid.leaf_count())
        .map(|j| {
            let a = j as f64 * cell;
            let b = (j + 1) as f64 * cell;
            (anti(b) - anti(a)) / cell
        })
        .collect();
    GridFunction::new(grid, values).unwrap()
}

/// Sawyer testing condition, both directions with fitted constants.
pub fn check_sawyer(cfg: &VerifyConfig) -> CheckResult {
    let grid = DyadicGrid::new(cfg.depth.min(6)).unwrap();
    let mut rng = rng_for(cfg.seed, 24);
    let mut direction_a = 0.0f64; // testing / measured, must stay <= 1
    let mut direction_b = 0.0f64; // measured / testing, fitted
    for _ in 0..cfg.trials.min(10) {
        let w = random_weight(grid, &mut rng, 1.5);
        let sigma = random_weight(grid, &mut rng, 1.5);
        for p in [1.5, 2.0] {
            let testing = sawyer_testing_constant(&w, &sigma, p);
            let measured = two_weight_maximal_norm_estimate(&w, &sigma, p, cfg.budget, cfg.seed);
            direction_a = direction_a.max(testing / measured);
            direction_b = direction_b.max(measured / testing);
        }
    }
    CheckResult::fitted(
        "sawyer-testing",
        direction_a <= 1.0 + 1e-9 && direction_b.is_finite(),
        direction_b,
        format!(
            "testing <= measured holds (max ratio {direction_a:.4}); \
             measured <= {direction_b:.4} x testing"
        ),
    )
}

/// Numeric audits of the extrapolation transformers.
pub fn check_extrapolation_audit(cfg: &VerifyConfig) -> CheckResult {
    let grid = DyadicGrid::new(cfg.depth.min(8)).unwrap();
    let mut rng = rng_for(cfg.seed, 25);
    let w = random_weight(grid, &mut rng, 2.0);
    let phi = |x: f64, y: f64, z: f64| x.sqrt() * (y + z).sqrt();
    let mut ok = true;

    // p = r leaves only the doubling
    let cr2 = constants_report(&w, 2.0);
    let at_r = bounds::extrapolate_lower(&phi, 2.0, &cr2, 5.0);
    let direct = 2.0
        * phi(
            cr2.ap,
            cr2.ainfty_hruscev,
            cr2.dual_ainfty_hruscev.powf(cr2.p - 1.0),
        );
    ok &= (at_r - direct).abs() <= 1e-10 * direct;

    // round trip p < r -> back up dominates the original one-sided
    let cr15 = constants_report(&w, 1.5);
    let down = bounds::extrapolate_lower(
        &phi,
        2.0,
        &cr15,
        bounds::maximal_norm_bound(&cr15, 1.5) / (4.0 * std::f64::consts::E),
    );
    ok &= down >= phi(cr2.ap, cr2.ainfty_hruscev, cr2.dual_ainfty_hruscev) * (1.0 - 1e-9);

    let cr3 = constants_report(&w, 3.0);
    let up = bounds::extrapolate_upper(
        &phi,
        2.0,
        &cr3,
        bounds::dual_maximal_norm_bound(&cr3, 3.0) / (4.0 * std::f64::consts::E),
    );
    ok &= up > 0.0 && up.is_finite();

    CheckResult::hard(
        "extrapolation-audit",
        ok,
        "p = r doubling, positivity, and one-sided domination".into(),
    )
}

/// For the two-valued family the mixed bound beats Buckley once t is large.
pub fn check_buckley_vs_mixed(cfg: &VerifyConfig) -> CheckResult {
    let grid = DyadicGrid::new(cfg.depth).unwrap();
    let mut ok = true;
    let mut detail = String::new();
    for t in [16.0, 100.0, 4096.0] {
        let w = materialize(
            &WeightFamilySpec::TwoValued {
                t,
                e: LeafSet::LeftHalf,
            },
            &grid,
        )
        .unwrap();
        let cr = constants_report(&w, 2.0);
        let buckley = bounds::bound_buckley(&cr, 2.0);
        let mixed = bounds::bound_mixed_maximal(&cr, 2.0).via_bp / bounds::MIXED_MAXIMAL_CONSTANT;
        ok &= mixed < buckley;
        detail.push_str(&format!(
            "t={t}: mixed core {mixed:.2} vs buckley {buckley:.2}; "
        ));
    }
    CheckResult::hard("buckley-vs-mixed", ok, detail)
}

/// Power weights: dyadic `A_2` grows like `1/(1+alpha)` within a fixed
/// multiplicative factor.
pub fn check_power_ap_comparability(cfg: &VerifyConfig) -> CheckResult {
    let grid = DyadicGrid::new(cfg.depth).unwrap();
    let mut ok = true;
    let mut detail = String::new();
    for alpha in [-0.5, -0.75, -0.875, -0.9375] {
        let w = materialize(&WeightFamilySpec::Power { alpha }, &grid).unwrap();
        let ap = ap_constant(&w, 2.0);
        let model = 1.0 / (1.0 + alpha);
        let ratio = ap / model;
        ok &= (0.25..=4.0).contains(&ratio);
        detail.push_str(&format!("alpha={alpha}: ap {ap:.2}, 1/(1+a) {model:.2}; "));
    }
    CheckResult::hard("power-ap-comparability", ok, detail)
}
