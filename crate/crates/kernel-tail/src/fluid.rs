//! Mixed discrete/continuous pipeline for a fluid queue driven by an M/M/c
//! chain: the kernel `H(alpha, z)` (quadratic in the chain direction `z`,
//! linear in the fluid direction `alpha`), its two branch points in closed
//! form, the continued-fraction boundary kernel, the search for the pole
//! candidate `alpha*`, the three-case classification of the dominant
//! singularity, and the resulting tail laws for the boundary-layer density,
//! the buffer-content distribution, and the chain-direction boundary
//! sequence.
//!
//! For `c = 1` the boundary data are fully explicit (the only atom is at an
//! empty buffer in an empty system), so the tail constants are computed in
//! closed form; for `c >= 2` the constants depend on boundary unknowns that
//! the singularity analysis does not need, and they are reported as
//! unavailable.

use crate::asymptotics::{ContinuousTailForm, Provenance};
use crate::error::AnalysisError;
use crate::model::FluidSpec;
use crate::poly::Poly;
use crate::singularity::{unique_zero, EPS_EQ_DEFAULT};

/// Denominator threshold below which the continued-fraction recursion is
/// reported as hitting a pole.
pub const RECURSION_POLE_TOL: f64 = 1e-14;

/// Kernel data of the fluid queue: `H(alpha, z) = a z^2 + b(alpha) z + d`.
#[derive(Debug, Clone)]
pub struct FluidKernel {
    pub lambda: f64,
    pub mu: f64,
    pub c: u32,
    pub r: f64,
    /// Coefficient of `z^2`: `-lambda`.
    pub a: f64,
    /// Coefficient of `z` as a polynomial in `alpha`: `-alpha r + lambda + c mu`.
    pub b: Poly,
    /// Constant term: `-c mu`.
    pub d: f64,
    /// Discriminant `b(alpha)^2 - 4 a d`, degree 2 in `alpha`.
    pub delta: Poly,
}

impl FluidKernel {
    /// The kernel `H(alpha, z)`.
    pub fn h(&self, alpha: f64, z: f64) -> f64 {
        self.a * z * z + self.b.eval(alpha) * z + self.d
    }

    /// The single-valued inverse map: the unique `alpha` with
    /// `H(alpha, z) = 0` for a given `z != 0`.
    pub fn alpha_of_z(&self, z: f64) -> f64 {
        let cmu = self.c as f64 * self.mu;
        (-self.lambda * z * z + (self.lambda + cmu) * z - cmu) / (z * self.r)
    }

    /// Chain-direction boundary kernel `H_2(z) = lambda z^2 - (lambda + c mu) z + c mu`.
    pub fn h2(&self, z: f64) -> f64 {
        let cmu = self.c as f64 * self.mu;
        self.lambda * z * z - (self.lambda + cmu) * z + cmu
    }

    /// Fluid-direction boundary kernel
    /// `H_1(alpha, z) = (mu - alpha r - alpha) z^c - c mu z^{c-1}`.
    pub fn h1(&self, alpha: f64, z: f64) -> f64 {
        let c = self.c as i32;
        (self.mu - alpha * self.r - alpha) * z.powi(c)
            - self.c as f64 * self.mu * z.powi(c - 1)
    }

    /// Known part of the inhomogeneous boundary kernel:
    /// `H_0(z) = mu z^c - c mu z^{c-1}`.
    pub fn h0(&self, z: f64) -> f64 {
        let c = self.c as i32;
        self.mu * z.powi(c) - self.c as f64 * self.mu * z.powi(c - 1)
    }

    /// Continued-fraction coefficient `A_{c-2}(alpha)` by the forward
    /// recursion `A_{-1} = 0`, `A_i = (i+1) mu / (alpha + lambda + i mu - lambda A_{i-1})`.
    pub fn continued_fraction(&self, alpha: f64) -> Result<f64, AnalysisError> {
        let mut a = 0.0;
        for i in 0..self.c.saturating_sub(1) {
            let den = alpha + self.lambda + i as f64 * self.mu - self.lambda * a;
            if den.abs() < RECURSION_POLE_TOL {
                return Err(AnalysisError::RecursionPole {
                    index: i as usize,
                    denominator: den,
                });
            }
            a = (i + 1) as f64 * self.mu / den;
        }
        Ok(a)
    }

    /// Composite boundary kernel
    /// `H1_hat(alpha, z) = lambda z^c A_{c-2}(alpha) + H_1(alpha, z)`;
    /// for `c = 1` the continued-fraction term vanishes (`A_{-1} = 0`).
    pub fn h1_hat(&self, alpha: f64, z: f64) -> Result<f64, AnalysisError> {
        let a = self.continued_fraction(alpha)?;
        Ok(self.lambda * z.powi(self.c as i32) * a + self.h1(alpha, z))
    }
}

/// Assemble the kernel polynomials from a validated spec.
pub fn build_fluid_kernel(spec: &FluidSpec) -> FluidKernel {
    let cmu = spec.c as f64 * spec.mu;
    let a = -spec.lambda;
    let b = Poly::new(vec![spec.lambda + cmu, -spec.r]);
    let d = -cmu;
    let delta = b.mul(&b).sub(&Poly::new(vec![4.0 * a * d]));
    FluidKernel {
        lambda: spec.lambda,
        mu: spec.mu,
        c: spec.c,
        r: spec.r,
        a,
        b,
        d,
        delta,
    }
}

/// Branch points of `Z(alpha)` in closed form:
/// `alpha_1 = (sqrt(c mu) - sqrt(lambda))^2 / r` and
/// `alpha_2 = (sqrt(c mu) + sqrt(lambda))^2 / r`, with the discriminant
/// positive outside `[alpha_1, alpha_2]` and negative inside.
pub fn fluid_branch_points(fk: &FluidKernel) -> (f64, f64) {
    let s = libm::sqrt(fk.c as f64 * fk.mu);
    let t = libm::sqrt(fk.lambda);
    let a1 = (s - t) * (s - t) / fk.r;
    let a2 = (s + t) * (s + t) / fk.r;
    (a1, a2)
}

/// Both branches of the kernel in `z` at a real `alpha` off the cut
/// `(alpha_1, alpha_2)`: `Z0` first, then `Z1`. The branch assignment
/// follows the sign of `Re(alpha) - (lambda + c mu)/r`: at or below that
/// threshold `Z0 = Z+`, above it `Z0 = Z-`.
pub fn fluid_branches(fk: &FluidKernel, alpha: f64) -> Result<(f64, f64), AnalysisError> {
    let d_scale = 1.0 + fk.delta.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut disc = fk.delta.eval(alpha);
    if disc < 0.0 {
        if disc >= -1e-10 * d_scale {
            disc = 0.0;
        } else {
            return Err(AnalysisError::OnCut {
                point: format!("alpha = {alpha}"),
                distance: disc.abs() / d_scale,
            });
        }
    }
    let sq = libm::sqrt(disc);
    let bv = fk.b.eval(alpha);
    let z_plus = (-bv + sq) / (2.0 * fk.a);
    let z_minus = (-bv - sq) / (2.0 * fk.a);
    let threshold = (fk.lambda + fk.c as f64 * fk.mu) / fk.r;
    if alpha <= threshold {
        Ok((z_plus, z_minus))
    } else {
        Ok((z_minus, z_plus))
    }
}

/// Result of the pole-candidate search on `(0, alpha_1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaStar {
    /// The zero of `H1_hat(alpha, Z0(alpha))`, or `+infinity` if none.
    pub value: f64,
    /// Estimated vanishing order at the zero (1 for a simple zero). Fixed
    /// at 1 when the zero sits on the branch point, where the square-root
    /// scale of the singularity replaces the order analysis.
    pub multiplicity: u32,
}

/// Locate the pole candidate `alpha*` on `(0, alpha_1]`.
///
/// The interval is open at 0 because `H1_hat(0, Z0(0)) = 0` is a structural
/// zero for every `c` (stationarity of the driving chain: `Z0(0) = 1` and
/// `lambda A_{c-2}(0) = (c-1) mu`), not a pole of the boundary transform.
/// The vanishing order of an interior zero is estimated from the log-slope
/// of `|H1_hat|` over two decades of approach and rounded to the nearest
/// integer at least 1.
pub fn find_alpha_star(fk: &FluidKernel) -> Result<AlphaStar, AnalysisError> {
    let (a1, _) = fluid_branch_points(fk);
    let f = |alpha: f64| -> Result<f64, AnalysisError> {
        let (z0, _) = fluid_branches(fk, alpha)?;
        fk.h1_hat(alpha, z0)
    };
    let root = unique_zero(&f, 0.0, a1, "H1_hat(alpha, Z0(alpha))")?;
    match root {
        None => Ok(AlphaStar {
            value: f64::INFINITY,
            multiplicity: 1,
        }),
        Some(a_star) => {
            let at_branch = (a1 - a_star).abs() <= 1e-9 * (1.0 + a1);
            let multiplicity = if at_branch {
                1
            } else {
                vanishing_order(&f, a_star)?
            };
            Ok(AlphaStar {
                value: a_star,
                multiplicity,
            })
        }
    }
}

/// Log-slope estimate of the vanishing order of `f` at an interior zero:
/// `|f(a - delta)| ~ C delta^k` for small `delta`, so the decade-to-decade
/// log-ratio approaches `k`.
fn vanishing_order(
    f: &impl Fn(f64) -> Result<f64, AnalysisError>,
    a_star: f64,
) -> Result<u32, AnalysisError> {
    let d0 = (a_star / 2.0).min(a_star * 1e-3);
    let mut slopes = Vec::new();
    for j in 0..2 {
        let d_hi = d0 * libm::pow(10.0, -(j as f64));
        let d_lo = d_hi / 10.0;
        let f_hi = f(a_star - d_hi)?.abs();
        let f_lo = f(a_star - d_lo)?.abs();
        if f_hi > 0.0 && f_lo > 0.0 {
            slopes.push(libm::log10(f_hi / f_lo));
        }
    }
    if slopes.is_empty() {
        return Ok(1);
    }
    let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
    Ok((libm::round(mean) as i64).max(1) as u32)
}

/// Complete singularity analysis in the fluid direction, plus the fixed
/// chain-direction singularity.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidSingularity {
    /// Branch points `0 < alpha_1 < alpha_2`.
    pub alpha1: f64,
    pub alpha2: f64,
    /// Pole candidate on `(0, alpha_1]`, or `+infinity`.
    pub alpha_star: f64,
    /// Vanishing order of the pole candidate.
    pub multiplicity: u32,
    /// Dominant singularity `min(alpha_1, alpha_star)`.
    pub alpha_dom: f64,
    /// Chain-direction dominant singularity `z_dom = c mu / lambda`.
    pub z_dom: f64,
    /// 1: pole strictly inside; 2: pole on the branch point; 3: branch
    /// point alone.
    pub case_id: u8,
    pub near_degenerate: bool,
    pub notes: Vec<String>,
}

/// Classify the dominant singularity with the default equality tolerance.
pub fn fluid_classify(fk: &FluidKernel) -> Result<FluidSingularity, AnalysisError> {
    fluid_classify_with_eps(fk, EPS_EQ_DEFAULT)
}

/// Classification with an explicit equality tolerance. Two candidates
/// (pole and branch point) give three cases; the equality and
/// near-degeneracy policies match the other families.
pub fn fluid_classify_with_eps(
    fk: &FluidKernel,
    eps_eq: f64,
) -> Result<FluidSingularity, AnalysisError> {
    let (a1, a2) = fluid_branch_points(fk);
    let star = find_alpha_star(fk)?;
    let scale = 1.0f64.max(a1).max(if star.value.is_finite() {
        star.value.abs()
    } else {
        0.0
    });
    let gap = if star.value.is_finite() {
        (star.value - a1).abs()
    } else {
        f64::INFINITY
    };
    let (case_id, alpha_dom) = if !star.value.is_finite() {
        (3, a1)
    } else if gap <= eps_eq * scale {
        (2, a1)
    } else {
        (1, star.value)
    };
    let near_degenerate = gap > eps_eq * scale && gap <= 10.0 * eps_eq * scale;
    let mut notes = Vec::new();
    if near_degenerate {
        notes.push(format!(
            "alpha* and alpha_1 agree to within 10x the equality tolerance \
             (|alpha* - alpha_1| = {gap:.3e}); the classification is sensitive to eps_eq"
        ));
    }
    if case_id == 1 && star.multiplicity > 1 {
        notes.push(format!(
            "pole candidate has estimated vanishing order {}; orders above 1 are \
             unusual for this family",
            star.multiplicity
        ));
    }
    Ok(FluidSingularity {
        alpha1: a1,
        alpha2: a2,
        alpha_star: star.value,
        multiplicity: star.multiplicity,
        alpha_dom,
        z_dom: fk.c as f64 * fk.mu / fk.lambda,
        case_id,
        near_degenerate,
        notes,
    })
}

/// The three coupled tail reports of the fluid queue.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidTailForms {
    /// Boundary-layer density `pi_{c-1}(x) ~ C x^power e^{-alpha_dom x}`.
    pub density: ContinuousTailForm,
    /// Survival function of the buffer content,
    /// `P(X > x) ~ S x^power e^{-alpha_dom x}` (the distribution function
    /// approaches 1 from below).
    pub marginal: ContinuousTailForm,
    /// Chain-direction boundary sequence decays geometrically with this
    /// ratio, `lambda / (c mu) = 1/z_dom`.
    pub boundary_ratio: f64,
    /// Constant of the chain-direction geometric law; not computed.
    pub boundary_constant: Option<f64>,
    pub notes: Vec<String>,
}

/// Tail exponent of `x` for a fluid case: `k - 1` for a pole of order `k`,
/// `-1/2` on the branch point, `-3/2` for the branch point alone.
pub fn fluid_tail_power(case_id: u8, multiplicity: u32) -> Option<f64> {
    match case_id {
        1 => Some(multiplicity as f64 - 1.0),
        2 => Some(-0.5),
        3 => Some(-1.5),
        _ => None,
    }
}

/// Assemble the tail laws for a classified fluid queue. Constants are
/// closed-form for `c = 1` (all three cases; large fill rates give a pole,
/// `r = sqrt(mu/lambda) - 1` puts it on the branch point, and smaller fill
/// rates leave the branch point alone) and unavailable otherwise.
pub fn fluid_tails(fk: &FluidKernel, fs: &FluidSingularity) -> FluidTailForms {
    let power = fluid_tail_power(fs.case_id, fs.multiplicity).expect("case id in 1..=3");
    let mut notes = Vec::new();
    let constants = if fk.c == 1 {
        mm1_constants(fk, fs, &mut notes)
    } else {
        notes.push(
            "tail constants for c >= 2 depend on boundary unknowns outside the \
             singularity analysis and are not computed"
                .to_string(),
        );
        None
    };
    let (density_c, marginal_c) = match constants {
        Some((dc, mc)) => (Some(dc), Some(mc)),
        None => (None, None),
    };
    let provenance = if constants.is_some() {
        Provenance::ClosedForm
    } else {
        Provenance::Unavailable
    };
    notes.push(format!(
        "boundary atoms exist only in the draining states; the chain-direction \
         sequence terminates at level {} and the geometric ratio describes the \
         decay scale of the boundary-value sequence",
        fk.c - 1
    ));
    FluidTailForms {
        density: ContinuousTailForm {
            decay_rate: fs.alpha_dom,
            power,
            constant: density_c,
            provenance,
        },
        marginal: ContinuousTailForm {
            decay_rate: fs.alpha_dom,
            power,
            constant: marginal_c,
            provenance,
        },
        boundary_ratio: fk.lambda / (fk.c as f64 * fk.mu),
        boundary_constant: None,
        notes,
    }
}

/// Closed-form pole candidate for the single-server family:
/// `alpha* = mu/(r+1) - lambda`.
///
/// The candidate solves `H(alpha, z) = H_1(alpha, z) = 0` with
/// `z* = mu/(lambda (r+1))`, but it is a pole of the boundary transform
/// only when `z*` sits on the principal branch `Z0`, which holds exactly
/// when `z* <= sqrt(mu/lambda)`, i.e. `lambda (r+1)^2 >= mu`. For smaller
/// fill rates the zero migrates to the second sheet, `H1_hat(alpha,
/// Z0(alpha))` has no zero on `(0, alpha_1]`, and the branch point
/// dominates. Returns `None` when the candidate is not a principal-branch
/// zero or the queue is unstable (`alpha* <= 0`).
pub fn mm1_alpha_star(fk: &FluidKernel) -> Option<f64> {
    if fk.c != 1 {
        return None;
    }
    let a_star = fk.mu / (fk.r + 1.0) - fk.lambda;
    let on_principal = fk.lambda * (fk.r + 1.0) * (fk.r + 1.0) >= fk.mu;
    (a_star > 0.0 && on_principal).then_some(a_star)
}

/// Closed-form constants for `c = 1`: returns `(density, survival)`.
///
/// The single-server boundary data are explicit: the only atom is
/// `P(empty buffer, empty system) = 1 - lambda (r+1)/mu`, the boundary
/// transform is `phi_0(alpha) = -N(alpha) / H1_hat(alpha, Z0(alpha))` with
/// `N(alpha) = lambda P_00 Z0 (Z0 - 1)`, and the survival constant carries
/// the factor `(r+1)/r` (the mass of the decay mode across chain states)
/// divided by the decay rate.
fn mm1_constants(
    fk: &FluidKernel,
    fs: &FluidSingularity,
    notes: &mut Vec<String>,
) -> Option<(f64, f64)> {
    let (lambda, mu, r) = (fk.lambda, fk.mu, fk.r);
    let p00 = 1.0 - lambda * (r + 1.0) / mu;
    let numerator = |z: f64| lambda * p00 * z * (z - 1.0);
    match fs.case_id {
        1 => {
            if fs.multiplicity != 1 {
                notes.push(format!(
                    "pole of estimated order {}; the simple-pole residue formula \
                     does not apply and constants are not reported",
                    fs.multiplicity
                ));
                return None;
            }
            let a_star = fs.alpha_dom;
            let z0 = mu / (lambda * (r + 1.0));
            let n = numerator(z0);
            if n.abs() <= 1e-12 * (1.0 + z0 * z0) {
                notes.push(
                    "interplay numerator vanishes at the pole candidate; constants \
                     are not reported"
                        .to_string(),
                );
                return None;
            }
            // Derivative of H1_hat(alpha, Z0(alpha)) at the simple zero.
            let h_z = 2.0 * fk.a * z0 + fk.b.eval(a_star);
            let z0_prime = r * z0 / h_z;
            let d = -(r + 1.0) * z0 + (mu - a_star * (r + 1.0)) * z0_prime;
            let c1 = n / d;
            let density = c1; // order-1 pole: Gamma(1) = 1
            let survival = (r + 1.0) / r * c1 / a_star;
            Some((density, survival))
        }
        2 => {
            let a1 = fs.alpha1;
            let z1 = -fk.b.eval(a1) / (2.0 * fk.a);
            let n = numerator(z1);
            if n.abs() <= 1e-12 * (1.0 + z1 * z1) {
                notes.push(
                    "interplay numerator vanishes at the branch point; constants \
                     are not reported"
                        .to_string(),
                );
                return None;
            }
            let c2 = n / ((r + 1.0) * libm::sqrt(r * lambda * z1));
            let density = c2 / libm::sqrt(core::f64::consts::PI);
            let survival = (r + 1.0) / r * density / a1;
            Some((density, survival))
        }
        _ => {
            // Branch point dominates: phi_0 stays analytic at alpha_1, and the
            // x^{-3/2} constant comes from the sqrt(alpha_1 - alpha)
            // correction of phi_0 = -N/H1_hat through
            // Z0 = z1 - g sqrt(alpha_1 - alpha) + O(alpha_1 - alpha).
            let a1 = fs.alpha1;
            let z1 = libm::sqrt(mu / lambda);
            let g = libm::sqrt(r * z1 / lambda);
            let h1z = mu - a1 * (r + 1.0);
            let d1 = h1z * z1 - mu;
            let n1 = numerator(z1);
            let np = lambda * p00 * (2.0 * z1 - 1.0);
            let sqrt_coef = g * (np * d1 - n1 * h1z) / (d1 * d1);
            let density = -sqrt_coef / (2.0 * libm::sqrt(core::f64::consts::PI));
            let survival = (r + 1.0) / r * density / a1;
            Some((density, survival))
        }
    }
}
