//! From case label to tail law: the Tauberian-like transfer that turns the
//! singular behavior of the boundary generating function at its dominant
//! singularity into exact asymptotics of the boundary sequence, plus the
//! closed-form constants available for the two-demand family and a numeric
//! constant estimator for everything else.
//!
//! Conventions: the boundary generating function is
//! `pi_1(x) = sum_{m >= 1} pi_{m,0} x^{m-1}`, and tail laws are reported as
//! `pi_{n,0} ~ c * n^power * theta^n` with `theta = 1/x_dom`.

use crate::error::{AnalysisError, Result};
use crate::kernel::{branch_real, BranchPoints, KernelSystem};
use crate::oracle::{eval_gf, GfQuery, TruncatedSolution};
use crate::singularity::CaseLabel;

/// Where a tail constant came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Evaluated from a displayed closed-form expression.
    ClosedForm,
    /// Estimated numerically (truncated series or extrapolation).
    NumericEstimate,
    /// No constant is available for this configuration.
    Unavailable,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::ClosedForm => "closed_form",
            Provenance::NumericEstimate => "numeric_estimate",
            Provenance::Unavailable => "unavailable",
        }
    }
}

/// Exact tail law `pi_{n,0} ~ c * n^power * theta^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailForm {
    /// Geometric rate `theta = 1/x_dom`, in `(0, 1)`.
    pub rate: f64,
    /// Exponent of `n`: 0, -1/2, -3/2, or 1 for cases 1 through 4.
    pub power: f64,
    /// Multiplicative constant, when available.
    pub constant: Option<f64>,
    pub provenance: Provenance,
    /// Extrapolation spread for numeric estimates, in the units of
    /// `constant`.
    pub error_band: Option<f64>,
}

/// Exponential tail law `V(x) ~ C * x^power * exp(-decay_rate * x)` for the
/// continuous-state families.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousTailForm {
    pub decay_rate: f64,
    /// Exponent of `x` at the dominant singularity.
    pub power: f64,
    /// Multiplicative constant, when available.
    pub constant: Option<f64>,
    pub provenance: Provenance,
}

/// Singular behavior of `pi_1` at the dominant singularity `x_dom`:
/// `(1 - x/x_dom)^alpha * f(x) -> g`, where `f` is `pi_1` itself or, on the
/// derivative route, `pi_1'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularBehavior {
    pub alpha: f64,
    pub g: f64,
    /// When set, the statement concerns `pi_1'` rather than `pi_1`.
    pub derivative_route: bool,
}

/// Singular exponent and route for a case label:
/// case 1 simple pole, case 2 square-root branch point, case 3 square-root
/// behavior of the derivative, case 4 double pole.
pub fn case_exponent(case_id: u8) -> Option<(f64, bool)> {
    match case_id {
        1 => Some((1.0, false)),
        2 => Some((0.5, false)),
        3 => Some((0.5, true)),
        4 => Some((2.0, false)),
        _ => None,
    }
}

/// The exponent of `n` in the tail law for a case label.
pub fn case_tail_power(case_id: u8) -> Option<f64> {
    match case_id {
        1 => Some(0.0),
        2 => Some(-0.5),
        3 => Some(-1.5),
        4 => Some(1.0),
        _ => None,
    }
}

/// Transfer singular behavior at `x_dom` to coefficient asymptotics.
///
/// For `(1 - x/R)^alpha f(x) -> g` the coefficients of `f` satisfy
/// `a_n ~ (g / Gamma(alpha)) n^{alpha-1} R^{-n}`. Since `pi_1` carries the
/// boundary sequence with a one-index shift (`a_n = pi_{n+1,0}`), the
/// sequence law gains one factor of `R`; the derivative route gains a
/// second (`pi_1'` coefficients are `(n+1) a_{n+1}`) and lowers the power
/// of `n` by one more.
pub fn tauberian_map(
    sb: &SingularBehavior,
    x_dom: f64,
    provenance: Provenance,
) -> Result<TailForm, AnalysisError> {
    let alpha = sb.alpha;
    if alpha <= 1e-9 && (alpha - libm::round(alpha)).abs() < 1e-9 {
        return Err(AnalysisError::DegenerateExponent { alpha });
    }
    let gamma = libm::tgamma(alpha);
    let (power, constant) = if sb.derivative_route {
        (alpha - 2.0, sb.g * x_dom * x_dom / gamma)
    } else {
        (alpha - 1.0, sb.g * x_dom / gamma)
    };
    Ok(TailForm {
        rate: 1.0 / x_dom,
        power,
        constant: Some(constant),
        provenance,
        error_band: None,
    })
}

/// Tail constants of the two-demand family from its displayed closed
/// forms. Case 3 needs `P_2` and `P_2'` at `Y_0(x_3)`, which only the
/// truncated-chain oracle supplies, so its constant is flagged as a
/// numeric estimate; without an oracle solution it is an error. No closed
/// form is displayed for case 4, so that configuration reports only the
/// rate and power.
#[allow(clippy::too_many_arguments)]
pub fn constants_2demand(
    lambda: f64,
    mu1: f64,
    mu2: f64,
    ks: &KernelSystem,
    bp: &BranchPoints,
    label: &CaseLabel,
    ts: Option<&TruncatedSolution>,
) -> Result<TailForm> {
    let x_hat = mu1 / lambda;
    let p2_at_one = 1.0 - lambda / mu1;
    let rate = 1.0 / label.x_dom;
    let power = case_tail_power(label.case_id).expect("case label out of range");
    let x1 = bp.x.p1;
    let x2 = bp.x.p2;
    let x3 = bp.x.p3;
    let sqrt_pi = libm::sqrt(std::f64::consts::PI);

    let (constant, provenance) = match label.case_id {
        1 => {
            let c1 = (mu2 - lambda * x_hat) * p2_at_one / mu2;
            (Some(c1), Provenance::ClosedForm)
        }
        2 => {
            let c2 = mu1 * (x_hat - 1.0) * p2_at_one
                / (libm::sqrt(mu1 * mu2 * (x_hat - x1) * (x_hat - x2)) * sqrt_pi);
            (Some(c2), Provenance::ClosedForm)
        }
        3 => {
            let ts = ts.ok_or(AnalysisError::OracleRequired(
                "case 3 constant needs P_2 and P_2' at Y_0(x_3)",
            ))?;
            let y0 = branch_real(ks, x3)
                .ok_or(AnalysisError::OnCut { point: format!("x = {x3}"), distance: 0.0 })?
                .0;
            let gf = eval_gf(ts, GfQuery::Boundary2 { y: y0 }, true)?;
            let p2 = ts.origin() + y0 * gf.value;
            let p2_prime = gf.value + y0 * gf.derivative.unwrap_or(0.0);
            let radical = libm::sqrt(4.0 * mu2 * lambda * x3 * (x3 - x1) * (x3 - x2));
            let front = (x3 - 1.0) * mu1 * radical / (4.0 * mu2 * lambda * x3.powi(3) * sqrt_pi);
            let bracket =
                (p2 + y0 * (1.0 - y0) * p2_prime) / ((y0 - 1.0) * (y0 - 1.0));
            (Some(front * bracket), Provenance::NumericEstimate)
        }
        _ => (None, Provenance::Unavailable),
    };

    Ok(TailForm { rate, power, constant, provenance, error_band: None })
}

/// A numeric limit estimate with its extrapolation spread.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantEstimate {
    pub value: f64,
    /// Absolute spread between the two extrapolation stages.
    pub band: f64,
}

/// Depths `10^-k` of the geometric approach to the singularity.
const APPROACH_DEPTHS: [i32; 4] = [3, 4, 5, 6];

/// Evaluate `pi_1(x)` through the functional-equation interplay
/// `pi_1(x) = (-h_2(x, Y_0(x)) pi_2(Y_0(x)) - h_0(x, Y_0(x)) pi_00) / h_1(x, Y_0(x))`,
/// with `pi_2` and `pi_00` supplied by the truncated-chain oracle. Valid
/// for `x` in `(1, x_3)` off the cut; the analytic continuation it
/// provides is exactly what carries `pi_1` beyond the unit disk.
pub fn interplay_pi1(ks: &KernelSystem, ts: &TruncatedSolution, x: f64) -> Result<f64> {
    let y0 = branch_real(ks, x)
        .ok_or(AnalysisError::OnCut { point: format!("x = {x}"), distance: 0.0 })?
        .0;
    let gf = eval_gf(ts, GfQuery::Boundary2 { y: y0 }, false)?;
    let num = -ks.h2.eval(x, y0) * gf.value - ks.h0.eval(x, y0) * ts.origin();
    Ok(num / ks.h1.eval(x, y0))
}

/// Derivative of the interplay expression, differentiating through
/// `Y_0' = -h_x / h_y` along the branch.
pub fn interplay_pi1_derivative(
    ks: &KernelSystem,
    ts: &TruncatedSolution,
    x: f64,
) -> Result<f64> {
    let y0 = branch_real(ks, x)
        .ok_or(AnalysisError::OnCut { point: format!("x = {x}"), distance: 0.0 })?
        .0;
    let gf = eval_gf(ts, GfQuery::Boundary2 { y: y0 }, true)?;
    let pi2 = gf.value;
    let pi2_prime = gf.derivative.unwrap_or(0.0);
    let pi00 = ts.origin();

    let hx = ks.h.dx().eval(x, y0);
    let hy = ks.h.dy().eval(x, y0);
    let y_prime = -hx / hy;

    let h1 = ks.h1.eval(x, y0);
    let h2 = ks.h2.eval(x, y0);
    let h0 = ks.h0.eval(x, y0);
    let d_h1 = ks.h1.dx().eval(x, y0) + ks.h1.dy().eval(x, y0) * y_prime;
    let d_h2 = ks.h2.dx().eval(x, y0) + ks.h2.dy().eval(x, y0) * y_prime;
    let d_h0 = ks.h0.dx().eval(x, y0) + ks.h0.dy().eval(x, y0) * y_prime;

    let num = -h2 * pi2 - h0 * pi00;
    let d_num = -d_h2 * pi2 - h2 * pi2_prime * y_prime - d_h0 * pi00;
    Ok(d_num / h1 - num * d_h1 / (h1 * h1))
}

/// Aitken delta-squared extrapolation of three successive values;
/// falls back to the last value when the step differences degenerate.
fn aitken(a: f64, b: f64, c: f64) -> f64 {
    let d1 = b - a;
    let d2 = c - b;
    let denom = d2 - d1;
    if denom.abs() < 1e-14 * d2.abs().max(1e-300) {
        return c;
    }
    let extrapolated = c - d2 * d2 / denom;
    if extrapolated.is_finite() {
        extrapolated
    } else {
        c
    }
}

/// Estimate the singular limit `g = lim (1 - x/x_dom)^alpha f(x)` by
/// evaluating the interplay formula at `x = x_dom (1 - 10^-k)` for
/// `k = 3..6` and extrapolating; `f` is `pi_1` or, for case 3, `pi_1'`.
/// The spread between the two extrapolation stages is the error band; a
/// band above ten percent of the estimate is a convergence failure.
pub fn constant_numeric(
    ks: &KernelSystem,
    x_dom: f64,
    label: &CaseLabel,
    ts: &TruncatedSolution,
) -> Result<ConstantEstimate> {
    let (alpha, derivative_route) =
        case_exponent(label.case_id).expect("case label out of range");
    let mut g = [0.0f64; 4];
    for (slot, &k) in g.iter_mut().zip(APPROACH_DEPTHS.iter()) {
        let eps = libm::pow(10.0, -k as f64);
        let x = x_dom * (1.0 - eps);
        let f = if derivative_route {
            interplay_pi1_derivative(ks, ts, x)?
        } else {
            interplay_pi1(ks, ts, x)?
        };
        *slot = libm::pow(eps, alpha) * f;
    }
    let e1 = aitken(g[0], g[1], g[2]);
    let e2 = aitken(g[1], g[2], g[3]);
    let band = (e2 - e1).abs();
    if !e2.is_finite() || band > 0.1 * e2.abs() {
        return Err(AnalysisError::NoConvergence { estimate: e2, spread: band }.into());
    }
    Ok(ConstantEstimate { value: e2, band })
}

/// Full numeric tail form: estimate the singular constant, then map it
/// through the Tauberian transfer, propagating the error band through the
/// same scaling.
pub fn numeric_tail_form(
    ks: &KernelSystem,
    label: &CaseLabel,
    ts: &TruncatedSolution,
) -> Result<TailForm> {
    let (alpha, derivative_route) =
        case_exponent(label.case_id).expect("case label out of range");
    let est = constant_numeric(ks, label.x_dom, label, ts)?;
    let sb = SingularBehavior { alpha, g: est.value, derivative_route };
    let mut tf = tauberian_map(&sb, label.x_dom, Provenance::NumericEstimate)?;
    let scale = if derivative_route {
        label.x_dom * label.x_dom
    } else {
        label.x_dom
    } / libm::tgamma(alpha);
    tf.error_band = Some(est.band * scale.abs());
    Ok(tf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{branch_points, build_kernel};
    use crate::model::WalkSpec;
    use crate::oracle::solve_truncated;
    use crate::singularity::{classify, pole_candidates};

    fn analyze(lambda: f64, mu1: f64, mu2: f64) -> (KernelSystem, BranchPoints, CaseLabel) {
        let spec = WalkSpec::two_demand(lambda, mu1, mu2);
        let ks = build_kernel(&spec).unwrap();
        let bp = branch_points(&ks).unwrap();
        let class = crate::model::classify_walk(&spec);
        let pc = pole_candidates(&ks, &bp, &class).unwrap();
        let label = classify(&pc);
        (ks, bp, label)
    }

    #[test]
    fn test_case_mapping_is_the_tail_theorem() {
        // (case, alpha, n-power) triples of the four displayed tail forms.
        let expected = [(1u8, 1.0, 0.0), (2, 0.5, -0.5), (3, 0.5, -1.5), (4, 2.0, 1.0)];
        for (case_id, alpha, power) in expected {
            let (a, derivative_route) = case_exponent(case_id).unwrap();
            assert_eq!(a, alpha);
            assert_eq!(case_tail_power(case_id).unwrap(), power);
            let sb = SingularBehavior { alpha: a, g: 1.0, derivative_route };
            let tf = tauberian_map(&sb, 2.0, Provenance::ClosedForm).unwrap();
            assert_eq!(tf.power, power, "case {case_id}");
        }
    }

    #[test]
    fn test_gamma_factors() {
        // Case 1: Gamma(1) = 1, constant g R.
        let tf = tauberian_map(
            &SingularBehavior { alpha: 1.0, g: 0.3, derivative_route: false },
            2.0,
            Provenance::ClosedForm,
        )
        .unwrap();
        assert!((tf.constant.unwrap() - 0.6).abs() < 1e-15);
        // Case 2: Gamma(1/2) = sqrt(pi).
        let tf = tauberian_map(
            &SingularBehavior { alpha: 0.5, g: 1.0, derivative_route: false },
            1.0,
            Provenance::ClosedForm,
        )
        .unwrap();
        assert!((tf.constant.unwrap() - 1.0 / libm::sqrt(std::f64::consts::PI)).abs() < 1e-15);
        // Case 4: alpha = 2, Gamma(2) = 1, power n^{alpha - 1} = n.
        let tf = tauberian_map(
            &SingularBehavior { alpha: 2.0, g: 0.5, derivative_route: false },
            3.0,
            Provenance::ClosedForm,
        )
        .unwrap();
        assert_eq!(tf.power, 1.0);
        assert!((tf.constant.unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn test_degenerate_exponent_rejected() {
        for alpha in [0.0, -1.0, -2.0] {
            let sb = SingularBehavior { alpha, g: 1.0, derivative_route: false };
            assert!(matches!(
                tauberian_map(&sb, 2.0, Provenance::ClosedForm),
                Err(AnalysisError::DegenerateExponent { .. })
            ));
        }
    }

    #[test]
    fn test_tauberian_synthetic_series() {
        // With a_n = binom(n + alpha - 1, n) R^{-n} the generating function
        // is exactly (1 - z/R)^{-alpha}, so the scaled value at
        // z = R (1 - 1e-4) must be 1 up to the truncation remainder.
        let alpha = 0.5;
        let r: f64 = 2.0;
        let z = r * (1.0 - 1e-4);
        let mut coeff_log = 0.0f64; // log of binom(n + alpha - 1, n)
        let mut sum = 0.0f64;
        let log_ratio = libm::log(z / r);
        for n in 1..=400_000u32 {
            let nf = n as f64;
            coeff_log += libm::log((nf + alpha - 1.0) / nf);
            sum += libm::exp(coeff_log + nf * log_ratio);
        }
        let scaled = libm::pow(1.0 - z / r, alpha) * (1.0 + sum);
        assert!(
            (scaled - 1.0).abs() < 1e-3,
            "scaled series value {scaled}, expected 1"
        );
    }

    #[test]
    fn test_constants_case1_closed_form() {
        let (ks, bp, label) = analyze(0.2, 0.3, 0.5);
        assert_eq!(label.case_id, 1);
        let tf = constants_2demand(0.2, 0.3, 0.5, &ks, &bp, &label, None).unwrap();
        assert_eq!(tf.provenance, Provenance::ClosedForm);
        assert_eq!(tf.power, 0.0);
        assert!((tf.rate - 2.0 / 3.0).abs() < 1e-12);
        assert!(
            (tf.constant.unwrap() - 2.0 / 15.0).abs() < 1e-12,
            "c1 = {:?}",
            tf.constant
        );
    }

    #[test]
    fn test_constants_case2_closed_form() {
        let (ks, bp, label) = analyze(0.2, 0.4, 0.4);
        assert_eq!(label.case_id, 2);
        let tf = constants_2demand(0.2, 0.4, 0.4, &ks, &bp, &label, None).unwrap();
        assert_eq!(tf.provenance, Provenance::ClosedForm);
        assert_eq!(tf.power, -0.5);
        assert!((tf.rate - 0.5).abs() < 1e-12);
        assert!(
            (tf.constant.unwrap() - 0.199471140).abs() < 1e-8,
            "c2 = {:?}",
            tf.constant
        );
    }

    #[test]
    fn test_constants_case3_needs_oracle() {
        let (ks, bp, label) = analyze(0.2, 0.5, 0.3);
        assert_eq!(label.case_id, 3);
        let err = constants_2demand(0.2, 0.5, 0.3, &ks, &bp, &label, None).unwrap_err();
        assert!(matches!(
            err,
            crate::error::Error::Analysis(AnalysisError::OracleRequired(_))
        ));
    }

    #[test]
    fn test_constants_case3_with_oracle() {
        let (ks, bp, label) = analyze(0.2, 0.5, 0.3);
        let spec = WalkSpec::two_demand(0.2, 0.5, 0.3);
        let ts = solve_truncated(&spec, 150).unwrap();
        let tf = constants_2demand(0.2, 0.5, 0.3, &ks, &bp, &label, Some(&ts)).unwrap();
        assert_eq!(tf.provenance, Provenance::NumericEstimate);
        assert_eq!(tf.power, -1.5);
        assert!(
            (tf.constant.unwrap() - 1.179842851).abs() < 1e-4 * 1.18,
            "c3 = {:?}",
            tf.constant
        );
    }

    #[test]
    fn test_constant_numeric_case1_matches_closed_form() {
        let (ks, _bp, label) = analyze(0.2, 0.3, 0.5);
        let spec = WalkSpec::two_demand(0.2, 0.3, 0.5);
        let ts = solve_truncated(&spec, 150).unwrap();
        let tf = numeric_tail_form(&ks, &label, &ts).unwrap();
        let c = tf.constant.unwrap();
        assert!(
            (c - 2.0 / 15.0).abs() < 0.02 * (2.0 / 15.0),
            "numeric constant {c}, closed form {}",
            2.0 / 15.0
        );
        assert!(tf.error_band.unwrap() < 0.1 * c);
    }

    #[test]
    fn test_constant_numeric_case2_matches_closed_form() {
        let (ks, _bp, label) = analyze(0.2, 0.4, 0.4);
        let spec = WalkSpec::two_demand(0.2, 0.4, 0.4);
        let ts = solve_truncated(&spec, 150).unwrap();
        let tf = numeric_tail_form(&ks, &label, &ts).unwrap();
        let c = tf.constant.unwrap();
        assert!(
            (c - 0.199471140).abs() < 0.02 * 0.199471140,
            "numeric constant {c}, closed form 0.199471140"
        );
    }

    #[test]
    fn test_constant_numeric_case3_derivative_route() {
        let (ks, _bp, label) = analyze(0.2, 0.5, 0.3);
        let spec = WalkSpec::two_demand(0.2, 0.5, 0.3);
        let ts = solve_truncated(&spec, 150).unwrap();
        let tf = numeric_tail_form(&ks, &label, &ts).unwrap();
        let c = tf.constant.unwrap();
        assert!(
            (c - 1.179842851).abs() < 0.02 * 1.179842851,
            "numeric constant {c}, closed form 1.179842851"
        );
        assert_eq!(tf.power, -1.5);
    }

    #[test]
    fn test_interplay_matches_direct_series() {
        // Inside the disk of convergence the interplay value must agree
        // with the directly summed boundary series.
        // Points must avoid the cut [x1, x2] ~ [0.30, 0.82] where Y_0 is
        // complex, avoid the removable zero of h_1(x, Y_0(x)) at x = 1, and
        // stay well inside the pi_1 radius 1.5 so the directly summed
        // series is converged at this truncation.
        let spec = WalkSpec::two_demand(0.2, 0.3, 0.5);
        let ks = build_kernel(&spec).unwrap();
        let ts = solve_truncated(&spec, 150).unwrap();
        for x in [0.9, 1.1, 1.2] {
            let via_interplay = interplay_pi1(&ks, &ts, x).unwrap();
            let direct = eval_gf(&ts, GfQuery::Boundary1 { x }, false).unwrap().value;
            assert!(
                (via_interplay - direct).abs() < 1e-8 * direct.abs().max(1.0),
                "x = {x}: interplay {via_interplay}, direct {direct}"
            );
        }
    }
}
