//! Evaluatable right-hand sides of the quantitative theorems, split into
//! explicit constant times constant-free core so comparators can assert
//! hard inequalities exactly where a constant is pinned and report fitted
//! constants elsewhere.

use crate::constants::ConstantsReport;

pub fn conjugate(p: f64) -> f64 {
    assert!(p > 1.0);
    p / (p - 1.0)
}

/// Buckley: `||M||_{B(L^p(w))} <= c_{p,d} [w]_{A_p}^{1/(p-1)}`, core with
/// the p' dependence.
pub fn bound_buckley(cr: &ConstantsReport, p: f64) -> f64 {
    conjugate(p) * cr.ap.powf(1.0 / (p - 1.0))
}

/// The dyadic two-weight maximal bound carries the explicit constant 4e.
pub const MIXED_MAXIMAL_CONSTANT: f64 = 4.0 * std::f64::consts::E;

#[derive(Debug, Clone, Copy)]
pub struct MixedMaximalBound {
    /// `4e p' (B_p[w,sigma])^{1/p}`.
    pub via_bp: f64,
    /// `4e p' ([w]_{A_p} [sigma]_{A_infty}')^{1/p}`.
    pub via_ap_ainfty: f64,
}

pub fn bound_mixed_maximal(cr: &ConstantsReport, p: f64) -> MixedMaximalBound {
    let lead = MIXED_MAXIMAL_CONSTANT * conjugate(p);
    MixedMaximalBound {
        via_bp: lead * cr.b_p_pair.powf(1.0 / p),
        via_ap_ainfty: lead * (cr.ap * cr.dual_ainfty_wilson).powf(1.0 / p),
    }
}

/// Shift bound core `(r+1)^2 [w]_{A_2}^{1/2} ([w]' + [sigma]')^{1/2}`;
/// the leading constant is dimensional and unspecified.
pub fn bound_a2_shift(cr: &ConstantsReport, r_complexity: usize) -> f64 {
    let r = (r_complexity + 1) as f64;
    r * r * cr.ap.sqrt() * (cr.ainfty_wilson + cr.dual_ainfty_wilson).sqrt()
}

#[derive(Debug, Clone, Copy)]
pub struct CzApBounds {
    /// `[w]_{A_p}^{2/p} ([sigma]')^{2/p-1}` for p in (1,2].
    pub lower_simple: f64,
    /// `[w]_{A_p}^{2/p-1/2} ([w]_inf^{1/2} + [sigma]_inf^{(p-1)/2}) ([sigma]')^{2/p-1}`.
    pub lower_full: f64,
    /// `[w]_{A_p}^{2/p} ([w]')^{1-2/p}` for p in [2, inf).
    pub upper_simple: f64,
    /// `[w]_{A_p}^{2/p-1/[2(p-1)]} ([w]_inf^{1/[2(p-1)]} + [sigma]_inf^{1/2}) ([w]')^{1-2/p}`.
    pub upper_full: f64,
}

/// Extrapolated Calderon-Zygmund bounds on either side of p = 2.
pub fn bound_cz_ap(cr: &ConstantsReport, p: f64) -> CzApBounds {
    assert!(p > 1.0);
    CzApBounds {
        lower_simple: cr.ap.powf(2.0 / p) * cr.dual_ainfty_wilson.powf(2.0 / p - 1.0),
        lower_full: cr.ap.powf(2.0 / p - 0.5)
            * (cr.ainfty_hruscev.sqrt() + cr.dual_ainfty_hruscev.powf((p - 1.0) / 2.0))
            * cr.dual_ainfty_wilson.powf(2.0 / p - 1.0),
        upper_simple: cr.ap.powf(2.0 / p) * cr.ainfty_wilson.powf(1.0 - 2.0 / p),
        upper_full: cr.ap.powf(2.0 / p - 1.0 / (2.0 * (p - 1.0)))
            * (cr.ainfty_hruscev.powf(1.0 / (2.0 * (p - 1.0))) + cr.dual_ainfty_hruscev.sqrt())
            * cr.ainfty_wilson.powf(1.0 - 2.0 / p),
    }
}

/// An `L^r(w)` bound as an increasing function of
/// `([w]_{A_r}, [w]_{A_infty}, [w^{-1/(r-1)}]_{A_infty}^{r-1})`.
pub type Phi<'a> = &'a dyn Fn(f64, f64, f64) -> f64;

/// Push an `L^r` bound down to `p < r`. `maximal_norm` is
/// `||M||_{B(L^p(w))}`, either measured or the explicit bound
/// [`maximal_norm_bound`]; the arguments are read off the report at
/// exponent p.
pub fn extrapolate_lower(phi: Phi<'_>, r: f64, cr: &ConstantsReport, maximal_norm: f64) -> f64 {
    let p = cr.p;
    assert!(1.0 < p && p <= r);
    let k = (2.0 * maximal_norm).powf(r - p);
    2.0 * phi(
        k * cr.ap,
        k * cr.ainfty_hruscev,
        k * cr.dual_ainfty_hruscev.powf(p - 1.0),
    )
}

/// Push an `L^r` bound up to `p > r`. `dual_maximal_norm` is
/// `||M||_{B(L^{p'}(w^{1-p'}))}`, measured or bounded by
/// [`dual_maximal_norm_bound`].
pub fn extrapolate_upper(
    phi: Phi<'_>,
    r: f64,
    cr: &ConstantsReport,
    dual_maximal_norm: f64,
) -> f64 {
    let p = cr.p;
    assert!(p >= r && r > 1.0);
    let k = (2.0 * dual_maximal_norm).powf((p - r) / (p - 1.0));
    let shrink = (r - 1.0) / (p - 1.0);
    2.0 * phi(
        k * cr.ap.powf(shrink),
        k * cr.ainfty_hruscev.powf(shrink),
        k * cr.dual_ainfty_hruscev.powf(r - 1.0),
    )
}

/// Explicit dyadic bound for `||M||_{B(L^p(w))}`:
/// `4e p' ([w]_{A_p} [sigma]_{A_infty}')^{1/p}`.
pub fn maximal_norm_bound(cr: &ConstantsReport, p: f64) -> f64 {
    MIXED_MAXIMAL_CONSTANT * conjugate(p) * (cr.ap * cr.dual_ainfty_wilson).powf(1.0 / p)
}

/// Explicit dyadic bound for `||M||_{B(L^{p'}(sigma))}`, using the duality
/// `[sigma]_{A_{p'}}^{p-1} = [w]_{A_p}` (the dual weight of sigma is w).
pub fn dual_maximal_norm_bound(cr: &ConstantsReport, p: f64) -> f64 {
    let p_conj = conjugate(p);
    MIXED_MAXIMAL_CONSTANT * p * (cr.dual_ap * cr.ainfty_wilson).powf(1.0 / p_conj)
}

/// `A_1`-strong core `p p' [w]_{A_1}^{1/p} ([w]')^{1/p'}`.
pub fn bound_a1_strong(a1: f64, ainfty_wilson: f64, p: f64) -> f64 {
    p * conjugate(p) * a1.powf(1.0 / p) * ainfty_wilson.powf(1.0 - 1.0 / p)
}

/// Weak (1,1) core `[w]_{A_1} log(e + [w]')`.
pub fn bound_a1_weak(a1: f64, ainfty_wilson: f64) -> f64 {
    a1 * (std::f64::consts::E + ainfty_wilson).ln()
}

/// Dual weak (1,1) core `[w]' log(e + [w]_{A_1})`.
pub fn bound_a1_dual_weak(a1: f64, ainfty_wilson: f64) -> f64 {
    ainfty_wilson * (std::f64::consts::E + a1).ln()
}

/// Order-k commutator core
/// `[w]_{A_2}^{1/2} ([w]' + [sigma]')^{k+1/2}` per unit BMO norm.
pub fn bound_commutator(cr: &ConstantsReport, k: usize) -> f64 {
    cr.ap.sqrt() * (cr.ainfty_wilson + cr.dual_ainfty_wilson).powf(k as f64 + 0.5)
}

/// Radius of the conjugation disc used to produce the commutator bound,
/// per unit dimensional constant: `1 / (||b||_BMO ([w]' + [sigma]'))`.
pub fn commutator_conjugation_radius(b_bmo_norm: f64, cr: &ConstantsReport) -> f64 {
    1.0 / (b_bmo_norm * (cr.ainfty_wilson + cr.dual_ainfty_wilson))
}

/// Embedding core: plain BMO embeds in BMO(w) with norm `<= c [w]'`.
pub fn bound_bmo_embedding(ainfty_wilson: f64) -> f64 {
    ainfty_wilson
}

/// Declarative entry for the CLI report: name, explicit constant when the
/// theorem pins one, and the constant-free core.
pub struct BoundExpr {
    pub name: &'static str,
    pub explicit_constant: Option<f64>,
    pub has_unspecified_dimensional_constant: bool,
    pub core: fn(&ConstantsReport, f64) -> f64,
}

impl BoundExpr {
    pub fn core(&self, cr: &ConstantsReport, p: f64) -> f64 {
        (self.core)(cr, p)
    }

    pub fn value(&self, cr: &ConstantsReport, p: f64) -> f64 {
        self.explicit_constant.unwrap_or(1.0) * self.core(cr, p)
    }
}

pub fn bound_registry() -> Vec<BoundExpr> {
    vec![
        BoundExpr {
            name: "buckley",
            explicit_constant: None,
            has_unspecified_dimensional_constant: true,
            core: bound_buckley,
        },
        BoundExpr {
            name: "mixed-maximal-bp",
            explicit_constant: Some(MIXED_MAXIMAL_CONSTANT),
            has_unspecified_dimensional_constant: false,
            core: |cr, p| conjugate(p) * cr.b_p_pair.powf(1.0 / p),
        },
        BoundExpr {
            name: "mixed-maximal-ap-ainfty",
            explicit_constant: Some(MIXED_MAXIMAL_CONSTANT),
            has_unspecified_dimensional_constant: false,
            core: |cr, p| conjugate(p) * (cr.ap * cr.dual_ainfty_wilson).powf(1.0 / p),
        },
        BoundExpr {
            name: "a2-shift",
            explicit_constant: None,
            has_unspecified_dimensional_constant: true,
            core: |cr, _| bound_a2_shift(cr, 0),
        },
        BoundExpr {
            name: "cz-lower",
            explicit_constant: None,
            has_unspecified_dimensional_constant: true,
            core: |cr, p| bound_cz_ap(cr, p).lower_simple,
        },
        BoundExpr {
            name: "cz-upper",
            explicit_constant: None,
            has_unspecified_dimensional_constant: true,
            core: |cr, p| bound_cz_ap(cr, p).upper_simple,
        },
        BoundExpr {
            name: "a1-strong",
            explicit_constant: None,
            has_unspecified_dimensional_constant: true,
            core: |cr, p| bound_a1_strong(cr.a1, cr.ainfty_wilson, p),
        },
        BoundExpr {
            name: "a1-weak",
            explicit_constant: None,
            has_unspecified_dimensional_constant: true,
            core: |cr, _| bound_a1_weak(cr.a1, cr.ainfty_wilson),
        },
        BoundExpr {
            name: "a1-dual-weak",
            explicit_constant: None,
            has_unspecified_dimensional_constant: true,
            core: |cr, _| bound_a1_dual_weak(cr.a1, cr.ainfty_wilson),
        },
        BoundExpr {
            name: "commutator-k1",
            explicit_constant: None,
            has_unspecified_dimensional_constant: true,
            core: |cr, _| bound_commutator(cr, 1),
        },
        BoundExpr {
            name: "bmo-embedding",
            explicit_constant: None,
            has_unspecified_dimensional_constant: true,
            core: |cr, _| bound_bmo_embedding(cr.ainfty_wilson),
        },
    ]
}
