//! Kernel polynomials, discriminants, branch points, and the analytic
//! branches `Y0/Y1` (and mirrored `X0/X1`) of the walk's characteristic
//! equation `h(x, y) = a(x) y^2 + b(x) y + c(x) = 0`.

use num_complex::Complex64;

use crate::error::AnalysisError;
use crate::model::{mean_drift, DriftVector, WalkSpec};
use crate::poly::{quadratic_roots, BiPoly, Poly};

/// Distance to a cut below which branch evaluation is refused.
pub const CUT_TOL: f64 = 1e-12;

/// Relative root separation below which a discriminant root counts as
/// repeated (genus 0).
pub const GENUS_SEP_TOL: f64 = 1e-8;

/// Effective repeated-root threshold. A true double root is only resolvable
/// to about `sqrt(machine epsilon)` (~1.5e-8) by any floating-point root
/// finder, so the detection floor sits a factor of three above that; the
/// advertised [`GENUS_SEP_TOL`] applies whenever it is the larger of the two.
pub(crate) fn genus_sep_floor() -> f64 {
    GENUS_SEP_TOL.max(3.0 * f64::EPSILON.sqrt())
}

/// Relative modulus difference below which the min-modulus branch selection
/// is considered tied and falls back to the lexicographic rule.
const TIE_TOL: f64 = 1e-9;

/// The kernel data of a walk: the characteristic polynomial `h`, the three
/// boundary polynomials, the quadratic coefficient polynomials in both
/// directions, and both discriminants.
#[derive(Debug, Clone)]
pub struct KernelSystem {
    /// `h(x,y) = xy (sum p_{i,j} x^i y^j - 1)`.
    pub h: BiPoly,
    /// `h1(x,y) = x (sum p^{(1)}_{i,j} x^i y^j - 1)` (horizontal wall).
    pub h1: BiPoly,
    /// `h2(x,y) = y (sum p^{(2)}_{i,j} x^i y^j - 1)` (vertical wall).
    pub h2: BiPoly,
    /// `h0(x,y) = sum p^{(0)}_{i,j} x^i y^j - 1` (origin).
    pub h0: BiPoly,
    /// `h` as a quadratic in y: `a(x) y^2 + b(x) y + c(x)`.
    pub a: Poly,
    pub b: Poly,
    pub c: Poly,
    /// Discriminant `D1(x) = b^2 - 4ac`.
    pub d1: Poly,
    /// `h` as a quadratic in x: `at(y) x^2 + bt(y) x + ct(y)`.
    pub at: Poly,
    pub bt: Poly,
    pub ct: Poly,
    /// Discriminant `D2(y)`.
    pub d2: Poly,
    /// Interior mean drift (used by the branch-point ordering checks).
    pub drift: DriftVector,
}

/// Build the kernel system from a validated walk. Fails with
/// `SingularKernel` when `h` is not quadratic in one of the variables.
pub fn build_kernel(spec: &WalkSpec) -> Result<KernelSystem, AnalysisError> {
    let h = spec.interior_h();

    let a = h.coeff_of_y(2);
    let b = h.coeff_of_y(1);
    let c = h.coeff_of_y(0);
    let at = h.coeff_of_x(2);
    let bt = h.coeff_of_x(1);
    let ct = h.coeff_of_x(0);
    if a.degree().is_none() {
        return Err(AnalysisError::SingularKernel("no upward transitions: a(x) vanishes identically"));
    }
    if c.degree().is_none() {
        return Err(AnalysisError::SingularKernel("no downward transitions: c(x) vanishes identically"));
    }
    if at.degree().is_none() {
        return Err(AnalysisError::SingularKernel("no rightward transitions: the x^2 coefficient vanishes identically"));
    }
    if ct.degree().is_none() {
        return Err(AnalysisError::SingularKernel("no leftward transitions: the x^0 coefficient vanishes identically"));
    }

    let mut h1 = BiPoly::zeros(2, 1);
    for (i, j, p) in spec.jumps_hwall() {
        h1.coeffs[(i + 1) as usize][j as usize] += p;
    }
    h1.coeffs[1][0] -= 1.0;

    let mut h2 = BiPoly::zeros(1, 2);
    for (i, j, p) in spec.jumps_vwall() {
        h2.coeffs[i as usize][(j + 1) as usize] += p;
    }
    h2.coeffs[0][1] -= 1.0;

    let mut h0 = BiPoly::zeros(1, 1);
    for (i, j, p) in spec.jumps_origin() {
        h0.coeffs[i as usize][j as usize] += p;
    }
    h0.coeffs[0][0] -= 1.0;

    let d1 = b.mul(&b).sub(&a.mul(&c).scale(4.0));
    let d2 = bt.mul(&bt).sub(&at.mul(&ct).scale(4.0));

    Ok(KernelSystem { h, h1, h2, h0, a, b, c, d1, d2, at, bt, ct, drift: mean_drift(spec) })
}

/// Four branch points of one direction, ordered by modulus:
/// `|p1| < p2 < 1 < p3 < |p4|`, with `p4 = ±infinity` admitted when the
/// discriminant is cubic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchQuad {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
    /// Root multiplicities; always 1 for a genus-1 walk.
    pub multiplicity: [u8; 4],
}

impl BranchQuad {
    /// The two cuts of the branch plane as real segments (second one may be
    /// a ray when `p4` is infinite).
    pub fn cuts(&self) -> [(f64, f64); 2] {
        let second = if self.p4.is_infinite() && self.p4 < 0.0 {
            // Cut wraps through infinity: [p3, +inf) plus (-inf, p4]; the
            // finite part below p4 is returned as the second segment's tail.
            (self.p3, f64::INFINITY)
        } else {
            (self.p3, self.p4)
        };
        [(self.p1, self.p2), second]
    }

    /// Euclidean distance from a complex point to the nearest cut, including
    /// the wrap-around segment `(-inf, p4]` when `p4 = -infinity` was
    /// replaced by a finite negative fourth root.
    pub fn cut_distance(&self, z: Complex64) -> f64 {
        let seg_dist = |lo: f64, hi: f64| {
            let re = z.re.clamp(lo, hi);
            ((z.re - re).powi(2) + z.im * z.im).sqrt()
        };
        let [(l1, h1), (l2, h2)] = self.cuts();
        let mut d = seg_dist(l1, h1).min(seg_dist(l2, h2));
        if self.p4 < 0.0 && self.p4.is_finite() {
            // Ordering |p1| < p2 < 1 < p3 < |p4| with p4 negative: the second
            // cut is [p3, +inf) joined with (-inf, p4] through infinity.
            d = d.min(seg_dist(f64::NEG_INFINITY, self.p4));
            d = d.min(seg_dist(self.p3, f64::INFINITY));
        }
        d
    }
}

/// Branch points in both directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoints {
    pub x: BranchQuad,
    pub y: BranchQuad,
}

fn quad_from_discriminant(
    which: &'static str,
    d: &Poly,
    drift_transverse: f64,
) -> Result<BranchQuad, AnalysisError> {
    let deg = match d.degree_with_tol(1e-13) {
        Some(deg) if deg >= 3 => deg,
        other => {
            return Err(AnalysisError::OrderingViolated {
                which,
                details: format!(
                    "discriminant degree {:?} < 3: four-branch-point structure absent",
                    other
                ),
            })
        }
    };

    let roots = d.roots();
    for z in &roots {
        if z.im.abs() >= crate::poly::REAL_ROOT_TOL * (1.0 + z.norm()) {
            return Err(AnalysisError::OrderingViolated {
                which,
                details: format!("non-real branch point {z}: realness check failed"),
            });
        }
    }
    let sep_tol = genus_sep_floor();
    for p in 0..roots.len() {
        for q in (p + 1)..roots.len() {
            let scale = 1.0 + roots[p].norm().max(roots[q].norm());
            if (roots[p] - roots[q]).norm() < sep_tol * scale {
                return Err(AnalysisError::GenusZero { which, root: roots[p].re });
            }
        }
    }

    let mut real: Vec<f64> = roots.iter().map(|z| z.re).collect();
    real.sort_by(|u, v| u.abs().partial_cmp(&v.abs()).unwrap());
    let (p1, p2, p3) = (real[0], real[1], real[2]);
    let p4 = if deg == 4 {
        real[3]
    } else {
        // Cubic discriminant: the fourth branch point sits at infinity, on
        // the side where the discriminant is eventually negative.
        let lead = d.coeffs[3];
        if lead < 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    };

    if drift_transverse.abs() < 1e-12 {
        return Err(AnalysisError::OrderingViolated {
            which,
            details: "null transverse drift: a branch point collides with 1".into(),
        });
    }
    let ordered = p1.abs() < p2 && p2 < 1.0 && 1.0 < p3 && p3 < p4.abs() && p2 > 0.0;
    if !ordered {
        return Err(AnalysisError::OrderingViolated {
            which,
            details: format!(
                "expected |p1| < p2 < 1 < p3 < |p4|, got p1={p1}, p2={p2}, p3={p3}, p4={p4}"
            ),
        });
    }
    Ok(BranchQuad { p1, p2, p3, p4, multiplicity: [1, 1, 1, 1] })
}

/// Compute and order the branch points of both discriminants. Errors:
/// `GenusZero` on repeated roots, `OrderingViolated` when realness or the
/// ordering `|p1| < p2 < 1 < p3 < |p4|` fails (including the null transverse
/// drift case where a branch point sits at 1).
pub fn branch_points(ks: &KernelSystem) -> Result<BranchPoints, AnalysisError> {
    // x-direction branch points collide with 1 exactly when My = 0
    // (D1(1) = My^2), and mirror-wise for D2.
    let x = quad_from_discriminant("D1", &ks.d1, ks.drift.my)?;
    let y = quad_from_discriminant("D2", &ks.d2, ks.drift.mx)?;
    Ok(BranchPoints { x, y })
}

fn select_min_modulus(r1: Complex64, r2: Complex64) -> (Complex64, Complex64) {
    let (n1, n2) = (r1.norm(), r2.norm());
    let scale = n1.max(n2).max(1e-300);
    if (n1 - n2).abs() / scale < TIE_TOL {
        // Lexicographic tie-break: smaller real part, then smaller imaginary.
        if (r1.re, r1.im) <= (r2.re, r2.im) {
            (r1, r2)
        } else {
            (r2, r1)
        }
    } else if n1 < n2 {
        (r1, r2)
    } else {
        (r2, r1)
    }
}

fn eval_two_roots(
    a: &Poly,
    b: &Poly,
    c: &Poly,
    quad: &BranchQuad,
    z: Complex64,
) -> Result<(Complex64, Complex64), AnalysisError> {
    let dist = quad.cut_distance(z);
    if dist < CUT_TOL {
        return Err(AnalysisError::OnCut { point: format!("{z}"), distance: dist });
    }
    let av = a.eval_complex(z);
    let bv = b.eval_complex(z);
    let cv = c.eval_complex(z);
    let scale = av.norm().max(bv.norm()).max(cv.norm()).max(1e-300);
    if av.norm() < 1e-14 * scale {
        let finite = -cv / bv;
        return Err(AnalysisError::PoleOfBranch { finite_root: finite.re });
    }
    let disc = bv * bv - 4.0 * av * cv;
    let sq = disc.sqrt();
    // Avoid cancellation: pick the sign that enlarges |b + sq|.
    let sgn = if (bv + sq).norm() >= (bv - sq).norm() { 1.0 } else { -1.0 };
    let q = -0.5 * (bv + sgn * sq);
    let r1 = q / av;
    let r2 = cv / q;
    Ok(select_min_modulus(r1, r2))
}

/// Evaluate the y-branches at a complex x off the cuts. Returns `(Y0, Y1)`
/// with `|Y0| <= |Y1|`; ties are broken lexicographically.
pub fn eval_branch(
    ks: &KernelSystem,
    bp: &BranchPoints,
    x: Complex64,
) -> Result<(Complex64, Complex64), AnalysisError> {
    eval_two_roots(&ks.a, &ks.b, &ks.c, &bp.x, x)
}

/// Evaluate the x-branches at a complex y off the cuts (mirror of
/// [`eval_branch`] using the y-direction discriminant).
pub fn x_branches(
    ks: &KernelSystem,
    bp: &BranchPoints,
    y: Complex64,
) -> Result<(Complex64, Complex64), AnalysisError> {
    eval_two_roots(&ks.at, &ks.bt, &ks.ct, &bp.y, y)
}

/// Both y-roots at a real x where the discriminant is nonnegative, ordered
/// by modulus. Returns `(Y0, Y1)` as reals; `Y1` is infinite where `a(x)`
/// vanishes. Intended for the real-axis zero searches between the cuts.
pub fn branch_real(ks: &KernelSystem, x: f64) -> Option<(f64, f64)> {
    real_two_roots(&ks.a, &ks.b, &ks.c, x)
}

/// Mirror of [`branch_real`]: both x-roots at a real y, ordered by modulus.
pub fn x_branch_real(ks: &KernelSystem, y: f64) -> Option<(f64, f64)> {
    real_two_roots(&ks.at, &ks.bt, &ks.ct, y)
}

fn real_two_roots(a: &Poly, b: &Poly, c: &Poly, t: f64) -> Option<(f64, f64)> {
    let av = a.eval(t);
    let bv = b.eval(t);
    let cv = c.eval(t);
    let scale = av.abs().max(bv.abs()).max(cv.abs()).max(1e-300);
    if av.abs() < 1e-14 * scale {
        if bv.abs() < 1e-14 * scale {
            return None;
        }
        return Some((-cv / bv, f64::INFINITY));
    }
    let disc = bv * bv - 4.0 * av * cv;
    if disc < 0.0 {
        return None;
    }
    let (r1, r2) = quadratic_roots(av, bv, cv);
    let (y0, y1) = if r1.re.abs() <= r2.re.abs() { (r1.re, r2.re) } else { (r2.re, r1.re) };
    Some((y0, y1))
}

/// Branch evaluation along a path with a continuity cache: when the
/// min-modulus rule is ambiguous (tie), the root nearer the previous value
/// is chosen. One `BranchPath` per path; paths must not cross cuts.
#[derive(Debug, Default)]
pub struct BranchPath {
    last: Option<Complex64>,
}

impl BranchPath {
    pub fn new() -> Self {
        BranchPath { last: None }
    }

    pub fn eval(
        &mut self,
        ks: &KernelSystem,
        bp: &BranchPoints,
        x: Complex64,
    ) -> Result<(Complex64, Complex64), AnalysisError> {
        let (y0, y1) = eval_branch(ks, bp, x)?;
        let picked = match self.last {
            Some(prev) => {
                let tied = (y0.norm() - y1.norm()).abs() < TIE_TOL * y1.norm().max(1e-300);
                if tied && (y1 - prev).norm() < (y0 - prev).norm() {
                    (y1, y0)
                } else {
                    (y0, y1)
                }
            }
            None => (y0, y1),
        };
        self.last = Some(picked.0);
        Ok(picked)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_demand_kernel(lambda: f64, mu1: f64, mu2: f64) -> KernelSystem {
        build_kernel(&WalkSpec::two_demand(lambda, mu1, mu2)).unwrap()
    }

    #[test]
    fn test_two_demand_coefficients() {
        // h = lambda x^2 y^2 - xy + mu1 y + mu2 x
        let ks = two_demand_kernel(0.2, 0.3, 0.5);
        assert_eq!(ks.a.coeffs, vec![0.0, 0.0, 0.2]); // a(x) = lambda x^2
        assert_eq!(ks.b.coeffs, vec![0.3, -1.0, 0.0]); // b(x) = mu1 - x
        assert_eq!(ks.c.coeffs, vec![0.0, 0.5, 0.0]); // c(x) = mu2 x
        // h1 = lambda x^2 y - (lambda + mu1) x + mu1
        assert!((ks.h1.eval(1.5, 2.0) - (0.2 * 2.25 * 2.0 - 0.5 * 1.5 + 0.3)).abs() < 1e-15);
        // h2 = lambda x y^2 - (lambda + mu2) y + mu2
        assert!((ks.h2.eval(1.5, 2.0) - (0.2 * 1.5 * 4.0 - 0.7 * 2.0 + 0.5)).abs() < 1e-15);
        // h0 = lambda (xy - 1)
        assert!((ks.h0.eval(1.5, 2.0) - 0.2 * (3.0 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn test_uniform_interior_coefficients() {
        let mut interior = [[1.0 / 9.0; 3]; 3];
        interior[1][1] = 1.0 / 9.0;
        let spec = WalkSpec { interior, ..WalkSpec::two_demand(0.2, 0.3, 0.5) };
        let ks = build_kernel(&spec).unwrap();
        for (k, expect) in [(0, 1.0 / 9.0), (1, 1.0 / 9.0), (2, 1.0 / 9.0)] {
            assert!((ks.a.coeffs[k] - expect).abs() < 1e-15);
            assert!((ks.c.coeffs[k] - expect).abs() < 1e-15);
        }
        assert!((ks.b.coeffs[0] - 1.0 / 9.0).abs() < 1e-15);
        assert!((ks.b.coeffs[1] - (1.0 / 9.0 - 1.0)).abs() < 1e-15);
        assert!((ks.b.coeffs[2] - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn test_singular_kernel_rejected() {
        // All mass on (0,1): c(x) vanishes identically.
        let mut interior = [[0.0; 3]; 3];
        interior[1][2] = 1.0;
        let spec = WalkSpec { interior, ..WalkSpec::two_demand(0.2, 0.3, 0.5) };
        assert!(matches!(build_kernel(&spec), Err(AnalysisError::SingularKernel(_))));
    }

    #[test]
    fn test_coefficient_reconstruction() {
        // Expanding a(x) y^2 + b(x) y + c(x) recovers every p_{i,j}.
        let spec = WalkSpec::two_demand(0.2, 0.3, 0.5);
        let ks = build_kernel(&spec).unwrap();
        for i in -1..=1i32 {
            for j in -1..=1i32 {
                let poly = match j {
                    1 => &ks.a,
                    0 => &ks.b,
                    -1 => &ks.c,
                    _ => unreachable!(),
                };
                let coeff = poly.coeffs.get((i + 1) as usize).copied().unwrap_or(0.0);
                let expect = spec.interior_p(i, j) - if i == 0 && j == 0 { 1.0 } else { 0.0 };
                assert!(
                    (coeff - expect).abs() < 1e-14,
                    "mismatch at ({i},{j}): {coeff} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn test_branch_points_two_demand() {
        // lambda=0.2, mu1=0.5, mu2=0.3: D1 = (0.5 - x)^2 - 0.24 x^3,
        // x3 in (2.819, 2.8205); cubic => x4 infinite.
        let ks = two_demand_kernel(0.2, 0.5, 0.3);
        let bp = branch_points(&ks).unwrap();
        assert!(bp.x.p3 > 2.819 && bp.x.p3 < 2.8205, "x3 = {}", bp.x.p3);
        assert!(bp.x.p4.is_infinite() && bp.x.p4 > 0.0);
        assert!(bp.x.p1.abs() < bp.x.p2);
        assert!(bp.x.p2 < 1.0 && 1.0 < bp.x.p3);
        // Frozen from the same computation run independently.
        assert!((bp.x.p1 - 0.3836054263698565).abs() < 1e-10);
        assert!((bp.x.p2 - 0.9628626276130312).abs() < 1e-10);
        assert!((bp.x.p3 - 2.820198612683778).abs() < 1e-10);
    }

    #[test]
    fn test_branch_points_d1_at_one_is_drift_squared() {
        for (l, m1, m2) in [(0.2, 0.3, 0.5), (0.2, 0.5, 0.3), (0.1, 0.45, 0.45)] {
            let ks = two_demand_kernel(l, m1, m2);
            let my = ks.drift.my;
            assert!((ks.d1.eval(1.0) - my * my).abs() < 1e-14);
        }
    }

    #[test]
    fn test_genus_zero_detected() {
        // Perfect square discriminant: b(x) = x^2+1, a c = ((x^2+1)/2)^2 via
        // a = c = (x^2+1)/2 gives D1 = 0 identically; use a synthetic poly
        // check through the public API instead: a kernel whose D1 has a
        // double root. Simple random walk on the diagonal: p_{1,1} = p,
        // p_{-1,-1} = 1-p gives h = p x^2 y^2 + (1-p) - xy,
        // D1 = x^2 - 4 p (1-p) x^2 = x^2 (1 - 4p(1-p)); at p=1/2 this is 0.
        let mut interior = [[0.0; 3]; 3];
        interior[2][2] = 0.3;
        interior[0][0] = 0.7;
        let spec = WalkSpec { interior, ..WalkSpec::two_demand(0.2, 0.3, 0.5) };
        let ks = build_kernel(&spec).unwrap();
        // D1 = x^2 (1 - 0.84) has a double root at 0.
        let err = branch_points(&ks).unwrap_err();
        assert!(
            matches!(err, AnalysisError::GenusZero { .. } | AnalysisError::OrderingViolated { .. }),
            "got {err:?}"
        );
    }

    #[test]
    fn test_eval_branch_at_one() {
        // 2-demand at x=1: h(1,y) = 0.2 y^2 - 0.7 y + 0.5, roots {1, 2.5}.
        let ks = two_demand_kernel(0.2, 0.3, 0.5);
        let bp = branch_points(&ks).unwrap();
        let (y0, y1) = eval_branch(&ks, &bp, Complex64::new(1.0, 0.0)).unwrap();
        assert!((y0 - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((y1 - Complex64::new(2.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn test_eval_branch_vieta() {
        let ks = two_demand_kernel(0.2, 0.3, 0.5);
        let bp = branch_points(&ks).unwrap();
        for &(re, im) in &[(1.3, 0.4), (0.1, -0.9), (-2.0, 1.0), (1.5, 0.0)] {
            let x = Complex64::new(re, im);
            let (y0, y1) = eval_branch(&ks, &bp, x).unwrap();
            let av = ks.a.eval_complex(x);
            let bv = ks.b.eval_complex(x);
            let cv = ks.c.eval_complex(x);
            assert!((y0 * y1 - cv / av).norm() < 1e-10 * (1.0 + (cv / av).norm()));
            assert!((y0 + y1 + bv / av).norm() < 1e-10 * (1.0 + (bv / av).norm()));
            assert!(y0.norm() <= y1.norm() * (1.0 + 1e-12));
            // Kernel residual.
            let resid = ks.h.eval_complex(x, y0).norm() / (1.0 + x.norm().powi(2));
            assert!(resid < 1e-10, "kernel residual {resid}");
        }
    }

    #[test]
    fn test_eval_branch_on_cut_rejected() {
        let ks = two_demand_kernel(0.2, 0.3, 0.5);
        let bp = branch_points(&ks).unwrap();
        let mid = 0.5 * (bp.x.p1 + bp.x.p2);
        assert!(matches!(
            eval_branch(&ks, &bp, Complex64::new(mid, 0.0)),
            Err(AnalysisError::OnCut { .. })
        ));
        // At the branch point itself the discriminant vanishes: Y0 = Y1.
        // Just inside the analytic region both branches are nearly equal.
        let x = Complex64::new(bp.x.p3, 1e-6);
        let (y0, y1) = eval_branch(&ks, &bp, x).unwrap();
        assert!((y0 - y1).norm() < 1e-2);
    }

    #[test]
    fn test_x_branches_mirror() {
        // 2-demand at y=1: the x-quadratic is lambda x^2 - (lambda+mu1) x + mu1,
        // so X0(1) = 1 and X1(1) = mu1/lambda by the mirrored Vieta product
        // X0 X1 = ct(1)/at(1).
        let ks = two_demand_kernel(0.2, 0.3, 0.5);
        let bp = branch_points(&ks).unwrap();
        let (x0, x1) = x_branches(&ks, &bp, Complex64::new(1.0, 0.0)).unwrap();
        assert!((x0 - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((x1 - Complex64::new(1.5, 0.0)).norm() < 1e-12);
        let prod = (x0 * x1).re;
        assert!((prod - ks.ct.eval(1.0) / ks.at.eval(1.0)).abs() < 1e-12);
    }

    #[test]
    fn test_branch_real_matches_complex() {
        let ks = two_demand_kernel(0.2, 0.3, 0.5);
        let bp = branch_points(&ks).unwrap();
        for &x in &[1.1, 1.25, 1.4, 1.49] {
            let (ry0, _) = branch_real(&ks, x).unwrap();
            let (cy0, _) = eval_branch(&ks, &bp, Complex64::new(x, 0.0)).unwrap();
            assert!((ry0 - cy0.re).abs() < 1e-12);
        }
    }

    #[test]
    fn test_branch_continuity_on_circle() {
        let ks = two_demand_kernel(0.2, 0.3, 0.5);
        let bp = branch_points(&ks).unwrap();
        let mut path = BranchPath::new();
        let mut prev: Option<Complex64> = None;
        let n = 720;
        for k in 0..=n {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            let x = Complex64::new(1.2 * t.cos(), 1.2 * t.sin());
            if bp.x.cut_distance(x) < 1e-3 {
                prev = None;
                continue;
            }
            let (y0, _) = path.eval(&ks, &bp, x).unwrap();
            if let Some(p) = prev {
                assert!((y0 - p).norm() < 0.05, "jump at sample {k}: {y0} vs {p}");
            }
            prev = Some(y0);
        }
    }
}
