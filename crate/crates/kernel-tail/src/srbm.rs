//! Continuous-state pipeline for semimartingale reflected Brownian motion
//! in the quarter plane: the quadratic kernel `gamma`, its two branch
//! points, the `Y0 = Y-` branch, pole candidates from the boundary linear
//! forms, and the four-case classification of the boundary measure's
//! exponential decay rate `tau1`.
//!
//! The structure mirrors the discrete walk pipeline with two
//! simplifications the continuous setting provides: the discriminant is a
//! degree-2 polynomial (two branch points instead of four), and the
//! analytic branch is always `Y-` (no modulus comparison needed).

use crate::asymptotics::{ContinuousTailForm, Provenance};
use crate::error::AnalysisError;
use crate::model::SrbmSpec;
use crate::poly::Poly;
use crate::singularity::{classify_triple, unique_zero, CaseLabel};
use crate::singularity::{BISECT_REL_TOL, EPS_EQ_DEFAULT, SHEET_CONSISTENCY_TOL};

/// Kernel data of an SRBM: `gamma(x, y) = a y^2 + b(x) y + c(x)` grouped in
/// `y`, the mirror grouping in `x`, and the boundary linear forms.
#[derive(Debug, Clone)]
pub struct SrbmKernel {
    /// Coefficient of `y^2`: `Sigma_22 / 2`.
    pub a: f64,
    /// Coefficient of `y`: `mu_2 + Sigma_12 x`.
    pub b: Poly,
    /// Constant term in `y`: `Sigma_11 x^2 / 2 + mu_1 x`.
    pub c: Poly,
    /// Discriminant `b(x)^2 - 4 a c(x)`, degree 2 with negative leading
    /// coefficient `-det(Sigma)`.
    pub d1: Poly,
    /// Mirror coefficient of `x^2`: `Sigma_11 / 2`.
    pub at: f64,
    /// Mirror coefficient of `x`: `mu_1 + Sigma_12 y`.
    pub bt: Poly,
    /// Mirror constant term: `Sigma_22 y^2 / 2 + mu_2 y`.
    pub ct: Poly,
    /// Mirror discriminant `bt(y)^2 - 4 at ct(y)`.
    pub d2: Poly,
    /// Reflection matrix; column `i` is the reflection direction on face `i`.
    pub refl: [[f64; 2]; 2],
    pub mu: [f64; 2],
    pub sigma: [[f64; 2]; 2],
}

impl SrbmKernel {
    /// The kernel `gamma(x, y) = (x, y) Sigma (x, y)^T / 2 + mu . (x, y)`.
    pub fn gamma(&self, x: f64, y: f64) -> f64 {
        self.a * y * y + self.b.eval(x) * y + self.c.eval(x)
    }

    /// Boundary form of the horizontal face: `gamma_1 = r_11 x + r_21 y`.
    pub fn gamma1(&self, x: f64, y: f64) -> f64 {
        self.refl[0][0] * x + self.refl[1][0] * y
    }

    /// Boundary form of the vertical face: `gamma_2 = r_12 x + r_22 y`.
    pub fn gamma2(&self, x: f64, y: f64) -> f64 {
        self.refl[0][1] * x + self.refl[1][1] * y
    }
}

/// Assemble the kernel polynomials from a validated spec.
pub fn build_srbm_kernel(spec: &SrbmSpec) -> Result<SrbmKernel, AnalysisError> {
    let s = &spec.sigma;
    let det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
    if s[0][0] <= 0.0 || s[1][1] <= 0.0 || det <= 0.0 {
        return Err(AnalysisError::DegenerateCovariance(format!(
            "sigma_11 = {}, sigma_22 = {}, det = {}",
            s[0][0], s[1][1], det
        )));
    }
    let a = s[1][1] / 2.0;
    let b = Poly::new(vec![spec.mu[1], s[0][1]]);
    let c = Poly::new(vec![0.0, spec.mu[0], s[0][0] / 2.0]);
    let d1 = b.mul(&b).sub(&c.scale(4.0 * a));
    let at = s[0][0] / 2.0;
    let bt = Poly::new(vec![spec.mu[0], s[0][1]]);
    let ct = Poly::new(vec![0.0, spec.mu[1], s[1][1] / 2.0]);
    let d2 = bt.mul(&bt).sub(&ct.scale(4.0 * at));
    Ok(SrbmKernel {
        a,
        b,
        c,
        d1,
        at,
        bt,
        ct,
        d2,
        refl: spec.refl,
        mu: spec.mu,
        sigma: spec.sigma,
    })
}

/// Real roots `x1 <= 0 < x2` of the degree-2 discriminant.
///
/// The leading coefficient is `-det(Sigma) < 0` and `D1(0) = mu_2^2 >= 0`,
/// so two real roots straddling (or touching) zero always exist for a
/// positive-definite covariance; anything else is reported, not repaired.
pub fn srbm_branch_points(sk: &SrbmKernel) -> Result<(f64, f64), AnalysisError> {
    roots_of_concave_quadratic(&sk.d1, "x")
}

/// Mirror branch points `y1 <= 0 < y2` of `D2`.
pub fn srbm_mirror_branch_points(sk: &SrbmKernel) -> Result<(f64, f64), AnalysisError> {
    roots_of_concave_quadratic(&sk.d2, "y")
}

fn roots_of_concave_quadratic(d: &Poly, which: &'static str) -> Result<(f64, f64), AnalysisError> {
    let c0 = d.coeffs.first().copied().unwrap_or(0.0);
    let c1 = d.coeffs.get(1).copied().unwrap_or(0.0);
    let c2 = d.coeffs.get(2).copied().unwrap_or(0.0);
    if c2 >= 0.0 {
        return Err(AnalysisError::DegenerateCovariance(format!(
            "discriminant in {which} is not concave (leading coefficient {c2:e})"
        )));
    }
    let (r1, r2) = crate::poly::quadratic_roots(c2, c1, c0);
    let scale = 1.0 + r1.norm().max(r2.norm());
    if r1.im.abs() > 1e-9 * scale || r2.im.abs() > 1e-9 * scale {
        return Err(AnalysisError::OrderingViolated {
            which,
            details: format!("discriminant roots are complex: {r1}, {r2}"),
        });
    }
    let (lo, hi) = if r1.re <= r2.re { (r1.re, r2.re) } else { (r2.re, r1.re) };
    if lo > 1e-9 * scale || hi <= 0.0 {
        return Err(AnalysisError::OrderingViolated {
            which,
            details: format!("branch points {lo}, {hi} do not satisfy lo <= 0 < hi"),
        });
    }
    Ok((lo.min(0.0), hi))
}

/// Both branches of the kernel in `y` at a real `x` between the branch
/// points: `Y0 = Y- = (-b - sqrt(D1)) / (2a)` first, then `Y1 = Y+`.
/// Outside `[x1, x2]` the branches are complex and the request is refused.
pub fn srbm_branch_eval(sk: &SrbmKernel, x: f64) -> Result<(f64, f64), AnalysisError> {
    branch_pair(sk.a, &sk.b, &sk.d1, x)
}

/// Mirror branches in `x` at a real `y`: `(X0, X1) = (X-, X+)`.
pub fn srbm_mirror_eval(sk: &SrbmKernel, y: f64) -> Result<(f64, f64), AnalysisError> {
    branch_pair(sk.at, &sk.bt, &sk.d2, y)
}

fn branch_pair(a: f64, b: &Poly, d: &Poly, t: f64) -> Result<(f64, f64), AnalysisError> {
    let d_scale = 1.0 + d.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut disc = d.eval(t);
    if disc < 0.0 {
        if disc >= -1e-10 * d_scale {
            disc = 0.0;
        } else {
            return Err(AnalysisError::OnCut {
                point: format!("{t}"),
                distance: disc.abs() / d_scale,
            });
        }
    }
    let sq = libm::sqrt(disc);
    let bv = b.eval(t);
    Ok(((-bv - sq) / (2.0 * a), (-bv + sq) / (2.0 * a)))
}

/// Pole candidates for the boundary measures.
#[derive(Debug, Clone, PartialEq)]
pub struct SrbmPoles {
    /// Zero of `gamma_2(x, Y0(x))` on `(0, x2]`, or `+infinity` if none.
    pub x_star: f64,
    /// Zero of `gamma_1(X0(y), y)` on `(0, y2]`, when one exists.
    pub y_tilde: Option<f64>,
    /// `X1(y_tilde)` accepted under the sheet-consistency filter
    /// `Y0(x~) = y~`; `+infinity` otherwise.
    pub x_tilde: f64,
    /// The filtered-out candidate, kept for reporting.
    pub rejected_x_tilde: Option<f64>,
}

/// Locate the pole candidates. Both searches run on open-left intervals
/// because `gamma_2(0, Y0(0)) = 0` is a structural zero (the kernel root
/// `Y0(0) = 0` annihilates every linear form through the origin), not a
/// pole of the boundary transform.
pub fn srbm_poles(sk: &SrbmKernel) -> Result<SrbmPoles, AnalysisError> {
    let (_, x2) = srbm_branch_points(sk)?;
    let (_, y2) = srbm_mirror_branch_points(sk)?;

    let f = |x: f64| -> Result<f64, AnalysisError> {
        let (y0, _) = srbm_branch_eval(sk, x)?;
        Ok(sk.gamma2(x, y0))
    };
    let x_star = unique_zero(&f, 0.0, x2, "gamma2(x, Y0(x))")?.unwrap_or(f64::INFINITY);

    let g = |y: f64| -> Result<f64, AnalysisError> {
        let (x0, _) = srbm_mirror_eval(sk, y)?;
        Ok(sk.gamma1(x0, y))
    };
    let y_tilde = match unique_zero(&g, 0.0, y2, "gamma1(X0(y), y)")? {
        Some(z) => z,
        None => {
            return Ok(SrbmPoles {
                x_star,
                y_tilde: None,
                x_tilde: f64::INFINITY,
                rejected_x_tilde: None,
            })
        }
    };

    let (_, x1_of_y) = srbm_mirror_eval(sk, y_tilde)?;
    let accepted = x1_of_y.is_finite()
        && x1_of_y > BISECT_REL_TOL
        && x1_of_y <= x2 * (1.0 + EPS_EQ_DEFAULT)
        && match srbm_branch_eval(sk, x1_of_y) {
            Ok((y0, _)) => (y0 - y_tilde).abs() < SHEET_CONSISTENCY_TOL * (1.0 + y_tilde.abs()),
            Err(_) => false,
        };
    Ok(SrbmPoles {
        x_star,
        y_tilde: Some(y_tilde),
        x_tilde: if accepted { x1_of_y } else { f64::INFINITY },
        rejected_x_tilde: if accepted { None } else { Some(x1_of_y) },
    })
}

/// Complete singularity analysis of the horizontal boundary measure.
#[derive(Debug, Clone, PartialEq)]
pub struct SrbmSingularity {
    /// Branch points of `D1`: `x1 <= 0 < x2`.
    pub x1: f64,
    pub x2: f64,
    /// Mirror branch points of `D2`.
    pub y1: f64,
    pub y2: f64,
    pub poles: SrbmPoles,
    /// Dominant singularity `tau1 = min(x2, x_star, x_tilde) > 0`.
    pub tau1: f64,
    pub case_id: u8,
    pub near_degenerate: bool,
    pub notes: Vec<String>,
}

/// Classify the dominant singularity of the boundary measure with the
/// default equality tolerance.
pub fn srbm_classify(sk: &SrbmKernel) -> Result<SrbmSingularity, AnalysisError> {
    srbm_classify_with_eps(sk, EPS_EQ_DEFAULT)
}

/// Classification with an explicit equality tolerance; the case tree and
/// tolerance policy are shared verbatim with the discrete pipeline.
pub fn srbm_classify_with_eps(
    sk: &SrbmKernel,
    eps_eq: f64,
) -> Result<SrbmSingularity, AnalysisError> {
    let (x1, x2) = srbm_branch_points(sk)?;
    let (y1, y2) = srbm_mirror_branch_points(sk)?;
    let poles = srbm_poles(sk)?;
    let label: CaseLabel =
        classify_triple(poles.x_star, poles.x_tilde, x2, eps_eq, ["x*", "x~", "x2"]);
    let mut notes = label.notes;
    if poles.rejected_x_tilde.is_some() {
        notes.push(
            "mirror candidate rejected by the sheet-consistency filter; complex-pole \
             scenarios beyond the real-axis search are not treated"
                .to_string(),
        );
    }
    if let Some(rate) = independent_component_rate(sk) {
        notes.push(format!(
            "independent components: exponential marginal with rate 2|mu_1|/sigma_11 = {rate}"
        ));
    }
    Ok(SrbmSingularity {
        x1,
        x2,
        y1,
        y2,
        poles,
        tau1: label.x_dom,
        case_id: label.case_id,
        near_degenerate: label.near_degenerate,
        notes,
    })
}

/// Tail law of the boundary measure: `x^power * exp(-tau1 * x)` with the
/// same case-to-power mapping as the discrete family. The multiplicative
/// constants have no displayed closed form and are reported as
/// unavailable rather than invented.
pub fn srbm_tail(ss: &SrbmSingularity) -> ContinuousTailForm {
    let power = crate::asymptotics::case_tail_power(ss.case_id).expect("case id in 1..=4");
    ContinuousTailForm {
        decay_rate: ss.tau1,
        power,
        constant: None,
        provenance: Provenance::Unavailable,
    }
}

/// When the components decouple (`R = I`, diagonal covariance, negative
/// drift) the first coordinate is a one-dimensional reflected Brownian
/// motion whose stationary law is exponential with rate
/// `2 |mu_1| / sigma_11`; used as an independent cross-check of `tau1`.
pub fn independent_component_rate(sk: &SrbmKernel) -> Option<f64> {
    let r = &sk.refl;
    let identity = (r[0][0] - 1.0).abs() < 1e-12
        && (r[1][1] - 1.0).abs() < 1e-12
        && r[0][1].abs() < 1e-12
        && r[1][0].abs() < 1e-12;
    let diagonal = sk.sigma[0][1].abs() < 1e-12 && sk.sigma[1][0].abs() < 1e-12;
    let stable = sk.mu[0] < 0.0 && sk.mu[1] < 0.0;
    (identity && diagonal && stable).then(|| 2.0 * sk.mu[0].abs() / sk.sigma[0][0])
}
