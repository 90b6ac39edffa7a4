//! Dominant-singularity candidates and case classification for walks.
//!
//! The boundary generating function continues meromorphically to the cut
//! plane; its dominant singularity is the smallest of three competitors:
//! the branch point `x3`, the zero `x*` of `h1(x, Y0(x))` on `(1, x3]`, and
//! the reflected pole `x~1 = X1(y~0)` induced by a zero `y~0` of
//! `h2(X0(y), y)` on the mirror interval. Zeros are found by a dense grid
//! scan plus bisection, exploiting that both branches are real between the
//! cuts; candidate uniqueness is verified rather than assumed.

use crate::error::AnalysisError;
use crate::kernel::{BranchPoints, KernelSystem};
use crate::model::WalkClass;
use crate::poly::Poly;

/// Grid resolution for bracketing zeros on a pole-search interval.
pub const GRID_POINTS: usize = 10_000;

/// Relative width at which bisection stops.
pub const BISECT_REL_TOL: f64 = 1e-12;

/// Relative threshold for accepting a zero at the closed right endpoint,
/// where a zero touches without a sign change (square-root contact).
pub const ENDPOINT_ZERO_TOL: f64 = 1e-6;

/// Default relative tolerance for equality of singularity candidates.
pub const EPS_EQ_DEFAULT: f64 = 1e-9;

/// Relative tolerance of the `Y0(x~1) = y~0` sheet-consistency filter.
pub const SHEET_CONSISTENCY_TOL: f64 = 1e-8;

/// The competing dominant-singularity candidates of a walk.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleCandidates {
    /// Zero of `h1(x, Y0(x))` in `(1, x3]`, or `+infinity` if none exists.
    pub x_star: f64,
    /// Zero of `h2(X0(y), y)` in `(1, y3]`, when one exists.
    pub y_tilde: Option<f64>,
    /// `X1(y_tilde)`, accepted only when `Y0` maps it back onto `y_tilde`
    /// (the pole premise); `+infinity` otherwise.
    pub x_tilde1: f64,
    /// Candidate `X1(y_tilde)` that failed the sheet-consistency filter,
    /// kept for reporting.
    pub rejected_x1: Option<f64>,
    /// Branch point limiting the search interval.
    pub x3: f64,
}

/// Case classification of the dominant singularity.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseLabel {
    /// 1: simple pole; 2: pole and branch point coincide; 3: branch point
    /// only; 4: double pole (both pole candidates coincide below `x3`).
    pub case_id: u8,
    /// Dominant singularity `min(x3, x_star, x_tilde1)`.
    pub x_dom: f64,
    /// True when a candidate pair is within ten equality tolerances of a
    /// case boundary without being identified; the label could flip under
    /// tiny parameter perturbations.
    pub near_degenerate: bool,
    /// Human-readable multiplicity and proximity notes.
    pub notes: Vec<String>,
}

/// Locate all pole candidates for a classified walk. X-shaped walks are
/// refused: their boundary coefficients split into parity classes that
/// oscillate with period two, so no single dominant singularity governs
/// the tail and the transfer step does not apply.
pub fn pole_candidates(
    ks: &KernelSystem,
    bp: &BranchPoints,
    class: &WalkClass,
) -> Result<PoleCandidates, AnalysisError> {
    if class.x_shaped {
        return Err(AnalysisError::XShaped);
    }
    let x_star = find_x_star(ks, bp)?;
    let xt = find_x_tilde(ks, bp)?;
    Ok(PoleCandidates {
        x_star,
        y_tilde: xt.y_tilde,
        x_tilde1: xt.x_tilde1,
        rejected_x1: xt.rejected_x1,
        x3: bp.x.p3,
    })
}

/// The unique zero of `h1(x, Y0(x))` on `(1, x3]`, or `+infinity` when the
/// function has no zero there. A second zero violates the uniqueness this
/// continuation step relies on and is surfaced as [`AnalysisError::MultipleZeros`].
pub fn find_x_star(ks: &KernelSystem, bp: &BranchPoints) -> Result<f64, AnalysisError> {
    let d_scale = 1.0 + ks.d1.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let f = |x: f64| -> Result<f64, AnalysisError> {
        let (y0, _) = clamped_roots(&ks.a, &ks.b, &ks.c, &ks.d1, x, d_scale, "x")?;
        Ok(ks.h1.eval(x, y0))
    };
    let zero = unique_zero(&f, 1.0, bp.x.p3, "h1(x, Y0(x))")?;
    match zero {
        Some(z) => {
            #[cfg(debug_assertions)]
            cross_check_resultant(ks, z, true);
            Ok(z)
        }
        None => Ok(f64::INFINITY),
    }
}

/// Result of the mirror search: the zero `y~0` of `h2(X0(y), y)` when one
/// exists, and the accepted reflected pole `x~1`.
#[derive(Debug, Clone, PartialEq)]
pub struct XTilde {
    pub y_tilde: Option<f64>,
    /// `X1(y_tilde)` after the sheet-consistency filter; `+infinity` when
    /// no zero exists or the candidate fails the filter.
    pub x_tilde1: f64,
    /// The filtered-out candidate, if any, kept for reporting.
    pub rejected_x1: Option<f64>,
}

/// Mirror search: the unique zero `y~0` of `h2(X0(y), y)` on `(1, y3]`,
/// mapped through `X1` and accepted only when `Y0(X1(y~0))` returns to
/// `y~0`. A candidate `X1(y~0)` where `y~0` sits on the `Y1` sheet is not a
/// pole of the continued boundary function and is rejected to `+infinity`.
pub fn find_x_tilde(ks: &KernelSystem, bp: &BranchPoints) -> Result<XTilde, AnalysisError> {
    let d2_scale = 1.0 + ks.d2.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let g = |y: f64| -> Result<f64, AnalysisError> {
        let (x0, _) = clamped_roots(&ks.at, &ks.bt, &ks.ct, &ks.d2, y, d2_scale, "y")?;
        Ok(ks.h2.eval(x0, y))
    };
    let y_tilde = match unique_zero(&g, 1.0, bp.y.p3, "h2(X0(y), y)")? {
        Some(z) => {
            #[cfg(debug_assertions)]
            cross_check_resultant(ks, z, false);
            z
        }
        None => {
            return Ok(XTilde { y_tilde: None, x_tilde1: f64::INFINITY, rejected_x1: None })
        }
    };

    let (_, x1) = clamped_roots(&ks.at, &ks.bt, &ks.ct, &ks.d2, y_tilde, d2_scale, "y")?;
    let accepted = x1.is_finite()
        && x1 > 1.0 + BISECT_REL_TOL
        && x1 <= bp.x.p3 * (1.0 + EPS_EQ_DEFAULT)
        && {
            let d1_scale = 1.0 + ks.d1.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            match clamped_roots(&ks.a, &ks.b, &ks.c, &ks.d1, x1, d1_scale, "x") {
                Ok((y0, _)) => (y0 - y_tilde).abs() < SHEET_CONSISTENCY_TOL * (1.0 + y_tilde.abs()),
                Err(_) => false,
            }
        };
    Ok(XTilde {
        y_tilde: Some(y_tilde),
        x_tilde1: if accepted { x1 } else { f64::INFINITY },
        rejected_x1: if accepted { None } else { Some(x1) },
    })
}

/// Classify the dominant singularity with the default equality tolerance.
pub fn classify(pc: &PoleCandidates) -> CaseLabel {
    classify_with_eps(pc, EPS_EQ_DEFAULT)
}

/// Classify the dominant singularity into one of four cases:
///
/// 1. a simple pole strictly below `x3` (or all three candidates coincide),
/// 2. a pole exactly at the branch point,
/// 3. the branch point alone,
/// 4. both pole candidates coincide strictly below `x3` (double pole).
///
/// Equality is relative to `eps_eq`; two infinite candidates are equal.
/// Distinct candidates within ten tolerances of an equality boundary set
/// the `near_degenerate` flag.
pub fn classify_with_eps(pc: &PoleCandidates, eps_eq: f64) -> CaseLabel {
    classify_triple(pc.x_star, pc.x_tilde1, pc.x3, eps_eq, ["x*", "x~1", "x3"])
}

/// The case tree over the raw candidate triple. Shared by the discrete
/// walk classifier and the continuous SRBM classifier, which differ only
/// in how the candidates are computed and named.
pub(crate) fn classify_triple(
    x_star: f64,
    x_tilde: f64,
    branch: f64,
    eps_eq: f64,
    names: [&str; 3],
) -> CaseLabel {
    let equal = |a: f64, b: f64| -> bool {
        if a.is_infinite() || b.is_infinite() {
            return a == b;
        }
        (a - b).abs() <= eps_eq * a.abs().max(b.abs()).max(1.0)
    };
    let near = |a: f64, b: f64| -> bool {
        if a.is_infinite() || b.is_infinite() {
            return false;
        }
        let d = (a - b).abs();
        let s = a.abs().max(b.abs()).max(1.0);
        d > eps_eq * s && d <= 10.0 * eps_eq * s
    };
    let [star_name, tilde_name, branch_name] = names;

    let m = x_star.min(x_tilde);
    let poles_equal = equal(x_star, x_tilde);
    let mut notes = Vec::new();
    let mut near_degenerate = false;
    if near(x_star, x_tilde) {
        near_degenerate = true;
        notes.push(format!(
            "pole candidates {star_name} = {x_star} and {tilde_name} = {x_tilde} are within 10*eps_eq of coinciding"
        ));
    }
    if near(m, branch) {
        near_degenerate = true;
        notes.push(format!(
            "pole candidate {m} is within 10*eps_eq of the branch point {branch_name} = {branch}"
        ));
    }

    let (case_id, x_dom) = if poles_equal {
        if m.is_finite() && equal(m, branch) {
            notes.push(format!(
                "{star_name} = {tilde_name} = {branch_name} = {branch}: all candidates coincide; simple-pole case applies"
            ));
            (1, branch)
        } else if m < branch {
            notes.push(format!(
                "{star_name} = {tilde_name} = {m}: double pole below the branch point"
            ));
            (4, m)
        } else {
            (3, branch)
        }
    } else if m.is_finite() && equal(m, branch) {
        let which = if equal(x_star, branch) { star_name } else { tilde_name };
        notes.push(format!(
            "pole {which} coincides with the branch point {branch_name} = {branch} within eps_eq"
        ));
        (2, branch)
    } else if m < branch {
        (1, m)
    } else {
        (3, branch)
    };

    CaseLabel { case_id, x_dom, near_degenerate, notes }
}

/// Both real roots of `a(t) s^2 + b(t) s + c(t)` at a point `t` between the
/// cuts, ordered by modulus, with the discriminant clamped to zero when it
/// rounds slightly negative at a branch point. The second root is infinite
/// where the leading coefficient vanishes.
fn clamped_roots(
    a: &Poly,
    b: &Poly,
    c: &Poly,
    d: &Poly,
    t: f64,
    d_scale: f64,
    which: &'static str,
) -> Result<(f64, f64), AnalysisError> {
    let av = a.eval(t);
    let bv = b.eval(t);
    let cv = c.eval(t);
    let scale = av.abs().max(bv.abs()).max(cv.abs()).max(1e-300);
    let mut disc = d.eval(t);
    if disc < 0.0 {
        if disc >= -1e-10 * d_scale {
            disc = 0.0;
        } else {
            return Err(AnalysisError::OrderingViolated {
                which,
                details: format!(
                    "discriminant {disc:e} negative inside the pole-search interval at {t}"
                ),
            });
        }
    }
    if av.abs() < 1e-14 * scale {
        if bv.abs() < 1e-14 * scale {
            return Err(AnalysisError::OrderingViolated {
                which,
                details: format!("kernel quadratic degenerates to a constant at {t}"),
            });
        }
        return Ok((-cv / bv, f64::INFINITY));
    }
    let sq = disc.sqrt();
    let q = -0.5 * (bv + bv.signum() * sq);
    let (r1, r2) = if q != 0.0 { (q / av, cv / q) } else { (0.0, -bv / av) };
    Ok(if r1.abs() <= r2.abs() { (r1, r2) } else { (r2, r1) })
}

/// Find the unique zero of `f` on the half-open interval `(lo, hi]`.
///
/// Samples [`GRID_POINTS`] points, bisects every sign change to
/// [`BISECT_REL_TOL`], and additionally accepts a zero at the right
/// endpoint when `|f(hi)|` is small relative to the grid maximum (a zero
/// touching the branch point produces no sign change). More than one
/// distinct zero is an error, never silently resolved.
pub(crate) fn unique_zero(
    f: &impl Fn(f64) -> Result<f64, AnalysisError>,
    lo: f64,
    hi: f64,
    function_name: &'static str,
) -> Result<Option<f64>, AnalysisError> {
    debug_assert!(hi > lo);
    let step = (hi - lo) / GRID_POINTS as f64;
    let mut zeros: Vec<f64> = Vec::new();
    let mut max_abs = 0.0f64;
    let mut prev: Option<(f64, f64)> = None;
    let mut f_hi = 0.0;
    for k in 1..=GRID_POINTS {
        let x = if k == GRID_POINTS { hi } else { lo + step * k as f64 };
        let v = f(x)?;
        max_abs = max_abs.max(v.abs());
        if k == GRID_POINTS {
            f_hi = v;
        }
        if v == 0.0 {
            zeros.push(x);
        } else if let Some((px, pv)) = prev {
            if pv != 0.0 && (pv > 0.0) != (v > 0.0) {
                zeros.push(bisect(f, px, pv, x)?);
            }
        }
        prev = Some((x, v));
    }

    // Endpoint zero without a sign change: square-root contact at hi.
    let endpoint_hit = f_hi.abs() <= ENDPOINT_ZERO_TOL * (1.0 + max_abs);
    if endpoint_hit && !zeros.iter().any(|z| hi - z < 2.0 * step) {
        zeros.push(hi);
    }

    zeros.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * (1.0 + a.abs()));
    match zeros.len() {
        0 => Ok(None),
        1 => Ok(Some(zeros[0])),
        _ => Err(AnalysisError::MultipleZeros {
            function: function_name,
            interval: format!("({lo}, {hi}]"),
            locations: zeros,
        }),
    }
}

/// Bisect a bracketing pair down to [`BISECT_REL_TOL`] relative width,
/// then polish with a few secant steps inside the final bracket. The
/// polish costs three evaluations and brings the root from the bisection
/// tolerance down to rounding level, which the downstream rate
/// computations (`theta = 1/x_dom`) rely on.
fn bisect(
    f: &impl Fn(f64) -> Result<f64, AnalysisError>,
    mut a: f64,
    fa: f64,
    mut b: f64,
) -> Result<f64, AnalysisError> {
    let a_positive = fa > 0.0;
    let mut fa_cur = fa;
    let mut fb_cur = f(b)?;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if b - a <= BISECT_REL_TOL * (1.0 + mid.abs()) {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == a_positive {
            a = mid;
            fa_cur = fm;
        } else {
            b = mid;
            fb_cur = fm;
        }
    }

    let mut best = 0.5 * (a + b);
    for _ in 0..3 {
        let denom = fb_cur - fa_cur;
        if denom == 0.0 {
            break;
        }
        let x = b - fb_cur * (b - a) / denom;
        if !x.is_finite() || x < a || x > b {
            break;
        }
        let fx = f(x)?;
        best = x;
        if fx == 0.0 {
            break;
        }
        if (fx > 0.0) == a_positive {
            a = x;
            fa_cur = fx;
        } else {
            b = x;
            fb_cur = fx;
        }
    }
    Ok(best)
}

/// Debug cross-check: a reported zero of `h1(x, Y0(x))` (or the mirror)
/// must also annihilate the resultant in the eliminated variable, since a
/// common root of the kernel quadratic and the linear boundary polynomial
/// exists exactly where the resultant vanishes.
#[cfg(debug_assertions)]
fn cross_check_resultant(ks: &KernelSystem, t: f64, x_side: bool) {
    // For p = a s^2 + b s + c and q = q1 s + q0, Res(p, q) = a q0^2 - b q0 q1 + c q1^2.
    let (a, b, c, q0, q1) = if x_side {
        (
            ks.a.eval(t),
            ks.b.eval(t),
            ks.c.eval(t),
            ks.h1.coeff_of_y(0).eval(t),
            ks.h1.coeff_of_y(1).eval(t),
        )
    } else {
        (
            ks.at.eval(t),
            ks.bt.eval(t),
            ks.ct.eval(t),
            ks.h2.coeff_of_x(0).eval(t),
            ks.h2.coeff_of_x(1).eval(t),
        )
    };
    let res = a * q0 * q0 - b * q0 * q1 + c * q1 * q1;
    let scale = a.abs().max(b.abs()).max(c.abs()) * (q0 * q0 + q1 * q1).max(1.0);
    debug_assert!(
        res.abs() <= 1e-5 * scale.max(1.0),
        "resultant cross-check failed at {t}: residual {res:e}"
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{branch_points, build_kernel};
    use crate::model::{classify_walk, WalkSpec};

    fn candidates(spec: &WalkSpec) -> PoleCandidates {
        let ks = build_kernel(spec).unwrap();
        let bp = branch_points(&ks).unwrap();
        let class = classify_walk(spec);
        pole_candidates(&ks, &bp, &class).unwrap()
    }

    /// Single-coordinate nearest-neighbor walk with matching wall rates:
    /// reversible, stationary distribution exactly (3/4)^2 (1/4)^{m+n}.
    fn symmetric_nsew() -> WalkSpec {
        let mut spec = WalkSpec::default();
        spec.interior[2][1] = 0.1; // (1, 0)
        spec.interior[1][2] = 0.1; // (0, 1)
        spec.interior[0][1] = 0.4; // (-1, 0)
        spec.interior[1][0] = 0.4; // (0, -1)
        spec.hwall[2][0] = 0.1; // (1, 0)
        spec.hwall[1][1] = 0.1; // (0, 1)
        spec.hwall[0][0] = 0.4; // (-1, 0)
        spec.hwall[1][0] = 0.4; // stay
        spec.vwall[0][2] = 0.1; // (0, 1)
        spec.vwall[1][1] = 0.1; // (1, 0)
        spec.vwall[0][0] = 0.4; // (0, -1)
        spec.vwall[0][1] = 0.4; // stay
        spec.origin[1][0] = 0.1; // (1, 0)
        spec.origin[0][1] = 0.1; // (0, 1)
        spec.origin[0][0] = 0.8; // stay
        spec
    }

    #[test]
    fn test_x_star_closed_form_case1() {
        // Zero of h1(x, Y0(x)) at mu1/lambda = 1.5, strictly below x3.
        let pc = candidates(&WalkSpec::two_demand(0.2, 0.3, 0.5));
        assert!((pc.x_star - 1.5).abs() < 1e-10, "x_star = {}", pc.x_star);
        assert!(pc.x_star < pc.x3);
    }

    #[test]
    fn test_x_star_endpoint_case2() {
        // mu1 = mu2: the pole sits exactly at the branch point x3 = 2.
        let pc = candidates(&WalkSpec::two_demand(0.2, 0.4, 0.4));
        assert!((pc.x3 - 2.0).abs() < 1e-9, "x3 = {}", pc.x3);
        assert!((pc.x_star - 2.0).abs() < 1e-9, "x_star = {}", pc.x_star);
    }

    #[test]
    fn test_x_star_absent_case3() {
        // mu1 > mu2: no zero on (1, x3]; the branch point dominates.
        let pc = candidates(&WalkSpec::two_demand(0.2, 0.5, 0.3));
        assert!(pc.x_star.is_infinite());
    }

    #[test]
    fn test_x_tilde_absent() {
        // mu2 > mu1: the mirror function has no zero at all on (1, y3].
        let pc = candidates(&WalkSpec::two_demand(0.2, 0.3, 0.5));
        assert_eq!(pc.y_tilde, None);
        assert!(pc.x_tilde1.is_infinite());
        assert_eq!(pc.rejected_x1, None);
    }

    #[test]
    fn test_x_tilde_rejected_wrong_sheet() {
        // mu1 > mu2: the mirror zero y~0 = mu2/lambda = 1.5 exists, and
        // X1(1.5) = 5/3, but Y0(5/3) = 0.6 -- the candidate sees y~0 on the
        // Y1 sheet and must be rejected.
        let pc = candidates(&WalkSpec::two_demand(0.2, 0.5, 0.3));
        let y_tilde = pc.y_tilde.expect("mirror zero exists");
        assert!((y_tilde - 1.5).abs() < 1e-10, "y_tilde = {y_tilde}");
        assert!(pc.x_tilde1.is_infinite());
        let rejected = pc.rejected_x1.expect("candidate recorded");
        assert!((rejected - 5.0 / 3.0).abs() < 1e-9, "rejected = {rejected}");
    }

    #[test]
    fn test_x_tilde_rejected_endpoint_case2() {
        // mu1 = mu2: the mirror zero sits at the branch point y3 = 2 where
        // X0 = X1 = 1; the candidate maps below 1 and is rejected.
        let pc = candidates(&WalkSpec::two_demand(0.2, 0.4, 0.4));
        let y_tilde = pc.y_tilde.expect("mirror zero exists");
        assert!((y_tilde - 2.0).abs() < 1e-8, "y_tilde = {y_tilde}");
        assert!(pc.x_tilde1.is_infinite());
    }

    #[test]
    fn test_symmetric_walk_sheet_filter() {
        // Product-form walk: pi_{m,n} = (9/16)(1/4)^{m+n}. The boundary
        // sequence decays purely geometrically, so the classification must
        // come out Case 1 with x_dom = 4 even though a naive mirror
        // candidate X1(y~0) = 4 = x* suggests a double pole (Case 4). The
        // sheet filter rejects it: Y0(4) = 1, not y~0 = 4.
        let spec = symmetric_nsew();
        let pc = candidates(&spec);
        assert!((pc.x_star - 4.0).abs() < 1e-10, "x_star = {}", pc.x_star);
        let y_tilde = pc.y_tilde.expect("mirror zero exists");
        assert!((y_tilde - 4.0).abs() < 1e-10, "y_tilde = {y_tilde}");
        assert!(pc.x_tilde1.is_infinite());
        let rejected = pc.rejected_x1.expect("candidate recorded");
        assert!((rejected - 4.0).abs() < 1e-9);
        assert!((pc.x3 - (3.0 + 5.0f64.sqrt())).abs() < 1e-10);

        let label = classify(&pc);
        assert_eq!(label.case_id, 1);
        assert!((label.x_dom - 4.0).abs() < 1e-10);
    }

    #[test]
    fn test_classify_two_demand_cases() {
        let label1 = classify(&candidates(&WalkSpec::two_demand(0.2, 0.3, 0.5)));
        assert_eq!(label1.case_id, 1);
        assert!((label1.x_dom - 1.5).abs() < 1e-10);

        let label2 = classify(&candidates(&WalkSpec::two_demand(0.2, 0.4, 0.4)));
        assert_eq!(label2.case_id, 2);
        assert!((label2.x_dom - 2.0).abs() < 1e-9);
        assert!(!label2.notes.is_empty());

        let label3 = classify(&candidates(&WalkSpec::two_demand(0.2, 0.5, 0.3)));
        assert_eq!(label3.case_id, 3);
        assert!((label3.x_dom - 2.820198612683778).abs() < 1e-9);
    }

    #[test]
    fn test_classify_synthetic_boundaries() {
        let pc = |x_star: f64, x_tilde1: f64, x3: f64| PoleCandidates {
            x_star,
            y_tilde: None,
            x_tilde1,
            rejected_x1: None,
            x3,
        };
        let inf = f64::INFINITY;

        // Case 4: both poles coincide strictly below x3.
        let label = classify(&pc(1.5, 1.5, 2.0));
        assert_eq!(label.case_id, 4);
        assert!((label.x_dom - 1.5).abs() < 1e-12);

        // Triple coincidence goes to Case 1.
        let label = classify(&pc(2.0, 2.0, 2.0));
        assert_eq!(label.case_id, 1);

        // Reflected pole alone below x3 is Case 1.
        let label = classify(&pc(inf, 1.8, 2.0));
        assert_eq!(label.case_id, 1);
        assert!((label.x_dom - 1.8).abs() < 1e-12);

        // Reflected pole at the branch point is Case 2.
        let label = classify(&pc(inf, 2.0, 2.0));
        assert_eq!(label.case_id, 2);

        // Nothing finite: Case 3.
        let label = classify(&pc(inf, inf, 2.0));
        assert_eq!(label.case_id, 3);
        assert!((label.x_dom - 2.0).abs() < 1e-12);

        // Equality holds within eps_eq, so this is still Case 4.
        let label = classify(&pc(1.5, 1.5 * (1.0 + 0.5e-9), 2.0));
        assert_eq!(label.case_id, 4);
        assert!(!label.near_degenerate);

        // Just outside eps_eq but within ten of it: Case 1 with a warning.
        let label = classify(&pc(1.5, 1.5 * (1.0 + 5e-9), 2.0));
        assert_eq!(label.case_id, 1);
        assert!(label.near_degenerate);

        // Far from every boundary: no warning.
        let label = classify(&pc(1.5, 1.7, 2.0));
        assert_eq!(label.case_id, 1);
        assert!(!label.near_degenerate);
    }

    #[test]
    fn test_classify_perturbation_stability() {
        // Perturbing a candidate by less than eps_eq / 10 never flips the
        // label, whichever side of an equality boundary it started on.
        let base = PoleCandidates {
            x_star: 1.5,
            y_tilde: None,
            x_tilde1: f64::INFINITY,
            rejected_x1: None,
            x3: 2.0,
        };
        let reference = classify(&base).case_id;
        for k in -5..=5 {
            let mut pc = base.clone();
            pc.x_star = 1.5 * (1.0 + k as f64 * 1e-11);
            assert_eq!(classify(&pc).case_id, reference);
        }
    }

    #[test]
    fn test_x_shaped_rejected() {
        let spec = WalkSpec::two_demand(0.2, 0.3, 0.5);
        let ks = build_kernel(&spec).unwrap();
        let bp = branch_points(&ks).unwrap();
        let mut class = classify_walk(&spec);
        class.x_shaped = true;
        let err = pole_candidates(&ks, &bp, &class).unwrap_err();
        assert!(matches!(err, AnalysisError::XShaped));
    }

    #[test]
    fn test_unique_zero_interior() {
        let f = |x: f64| Ok(libm::cos(x));
        let z = unique_zero(&f, 1.0, 3.0, "cos").unwrap().unwrap();
        assert!((z - std::f64::consts::FRAC_PI_2).abs() < 1e-11);
    }

    #[test]
    fn test_unique_zero_endpoint_contact() {
        // sqrt(3 - x) touches zero at the endpoint without a sign change.
        let f = |x: f64| Ok((3.0 - x).max(0.0).sqrt());
        let z = unique_zero(&f, 1.0, 3.0, "sqrt contact").unwrap().unwrap();
        assert_eq!(z, 3.0);
    }

    #[test]
    fn test_unique_zero_none() {
        let f = |x: f64| Ok(1.0 + x * x);
        assert_eq!(unique_zero(&f, 1.0, 3.0, "positive").unwrap(), None);
    }

    #[test]
    fn test_multiple_zeros_reported() {
        let f = |x: f64| Ok((x - 1.5) * (x - 2.5));
        let err = unique_zero(&f, 1.0, 3.0, "two zeros").unwrap_err();
        match err {
            AnalysisError::MultipleZeros { locations, .. } => {
                assert_eq!(locations.len(), 2);
                assert!((locations[0] - 1.5).abs() < 1e-10);
                assert!((locations[1] - 2.5).abs() < 1e-10);
            }
            other => panic!("expected MultipleZeros, got {other:?}"),
        }
    }
}
