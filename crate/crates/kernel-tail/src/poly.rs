//! Dense real polynomials in one and two variables.
//!
//! Roots are computed from the companion matrix (Schur-based eigenvalues via
//! nalgebra, iteration-capped) and polished with two Newton steps, which
//! keeps near-degenerate discriminants well resolved. Polynomials with
//! repeated roots can stall the Schur iteration, so a bounded Durand-Kerner
//! sweep stands in when the cap is reached. Realness of a root is decided by
//! `|Im| < 1e-9 * (1 + |root|)`.

use nalgebra::linalg::Schur;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Relative imaginary-part tolerance below which a complex root counts as real.
pub const REAL_ROOT_TOL: f64 = 1e-9;

/// Iteration cap for the Schur eigenvalue solve. Companion matrices of
/// polynomials with repeated roots can make an uncapped iteration crawl;
/// past the cap a Durand-Kerner sweep takes over.
const SCHUR_MAX_ITER: usize = 400;

/// Real polynomial, coefficients in ascending order (`coeffs[k]` is the
/// coefficient of `x^k`). Trailing zeros are permitted; [`Poly::degree`]
/// ignores them.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    /// Degree after dropping trailing coefficients that are exactly zero.
    /// Returns `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0.0)
    }

    /// Degree after dropping trailing coefficients smaller than `tol` in
    /// magnitude relative to the largest coefficient.
    pub fn degree_with_tol(&self, tol: f64) -> Option<usize> {
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if scale == 0.0 {
            return None;
        }
        self.coeffs.iter().rposition(|&c| c.abs() > tol * scale)
    }

    /// True if every coefficient is below `tol` relative to `scale`.
    pub fn is_zero_rel(&self, scale: f64, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.abs() <= tol * scale)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, x: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, &c)| (k as f64 + 1.0) * c)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| s * c).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0.0; n];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = self.coeffs.get(k).copied().unwrap_or(0.0)
                + other.coeffs.get(k).copied().unwrap_or(0.0);
        }
        Poly::new(out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// All complex roots: companion-matrix eigenvalues polished by two
    /// Newton steps. Returns an empty vector for constants and the zero
    /// polynomial. Tiny leading coefficients (relative to the largest) are
    /// treated as zero so that near-degenerate high-order terms do not
    /// manufacture spurious huge roots.
    ///
    /// The Schur iteration is capped at [`SCHUR_MAX_ITER`] sweeps; repeated
    /// roots can otherwise stall it for seconds on a 4x4 companion matrix.
    /// When the cap is hit, a Durand-Kerner sweep supplies the roots instead.
    pub fn roots(&self) -> Vec<Complex64> {
        let deg = match self.degree_with_tol(1e-14) {
            Some(d) if d >= 1 => d,
            _ => return vec![],
        };
        let lead = self.coeffs[deg];
        let monic: Vec<f64> = self.coeffs[..deg].iter().map(|&c| c / lead).collect();
        let n = deg;
        let mut companion = DMatrix::<f64>::zeros(n, n);
        for (k, &c) in monic.iter().enumerate() {
            companion[(k, n - 1)] = -c;
        }
        for k in 1..n {
            companion[(k, k - 1)] = 1.0;
        }
        let eigen: Vec<Complex64> = match Schur::try_new(companion, 1e-14, SCHUR_MAX_ITER) {
            Some(schur) => schur.complex_eigenvalues().iter().copied().collect(),
            None => durand_kerner(&monic),
        };
        let deriv = self.derivative();
        eigen
            .into_iter()
            .map(|z| {
                let mut root = z;
                for _ in 0..2 {
                    let f = self.eval_complex(root);
                    let df = deriv.eval_complex(root);
                    if df.norm() > 1e-300 {
                        let step = f / df;
                        if step.norm() < 1.0 + root.norm() {
                            root -= step;
                        }
                    }
                }
                root
            })
            .collect()
    }

    /// Real roots in ascending order, deduced from [`Poly::roots`] by the
    /// imaginary-part tolerance.
    pub fn real_roots(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .roots()
            .into_iter()
            .filter(|z| z.im.abs() < REAL_ROOT_TOL * (1.0 + z.norm()))
            .map(|z| z.re)
            .collect();
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }
}

/// Real bivariate polynomial; `coeffs[i][j]` is the coefficient of `x^i y^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiPoly {
    pub coeffs: Vec<Vec<f64>>,
}

impl BiPoly {
    pub fn new(coeffs: Vec<Vec<f64>>) -> Self {
        BiPoly { coeffs }
    }

    pub fn zeros(deg_x: usize, deg_y: usize) -> Self {
        BiPoly { coeffs: vec![vec![0.0; deg_y + 1]; deg_x + 1] }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        // Horner in x over Horner-in-y row values.
        self.coeffs.iter().rev().fold(0.0, |acc, row| {
            let row_val = row.iter().rev().fold(0.0, |r, &c| r * y + c);
            acc * x + row_val
        })
    }

    pub fn eval_complex(&self, x: Complex64, y: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, row| {
            let row_val = row
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |r, &c| r * y + c);
            acc * x + row_val
        })
    }

    /// Partial derivative in x.
    pub fn dx(&self) -> BiPoly {
        if self.coeffs.len() <= 1 {
            return BiPoly::new(vec![vec![0.0]]);
        }
        BiPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, row)| row.iter().map(|&c| (i as f64 + 1.0) * c).collect())
                .collect(),
        )
    }

    /// Partial derivative in y.
    pub fn dy(&self) -> BiPoly {
        BiPoly::new(
            self.coeffs
                .iter()
                .map(|row| {
                    if row.len() <= 1 {
                        vec![0.0]
                    } else {
                        row[1..]
                            .iter()
                            .enumerate()
                            .map(|(j, &c)| (j as f64 + 1.0) * c)
                            .collect()
                    }
                })
                .collect(),
        )
    }

    /// Coefficient polynomial of `y^j`, as a polynomial in x.
    pub fn coeff_of_y(&self, j: usize) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .map(|row| row.get(j).copied().unwrap_or(0.0))
                .collect(),
        )
    }

    /// Coefficient polynomial of `x^i`, as a polynomial in y.
    pub fn coeff_of_x(&self, i: usize) -> Poly {
        Poly::new(self.coeffs.get(i).cloned().unwrap_or_default())
    }

    /// Largest coefficient magnitude.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|row| row.iter())
            .fold(0.0f64, |m, c| m.max(c.abs()))
    }
}

/// Durand-Kerner iteration for a monic polynomial given by its ascending
/// non-leading coefficients. Bounded at 600 sweeps; used as the fallback
/// when the Schur iteration hits its cap. Repeated roots come back as a
/// cluster of radius around `sqrt(machine epsilon)`, which is the best any
/// black-box finder can certify for a double root.
fn durand_kerner(monic: &[f64]) -> Vec<Complex64> {
    let n = monic.len();
    let eval = |z: Complex64| -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for &c in monic.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    // Start points on a circle just above the Cauchy root bound, rotated off
    // the real axis so conjugate symmetry cannot lock the iteration.
    let bound = 1.0 + monic.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.5;
            Complex64::from_polar(bound, angle)
        })
        .collect();
    for _ in 0..600 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() < 1e-280 {
                continue;
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            moved = moved.max(step.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Roots of `a x^2 + b x + c` with real coefficients, returned as a complex
/// pair. Uses the numerically stable form that avoids cancellation between
/// `-b` and the square root. Requires `a != 0`.
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> (Complex64, Complex64) {
    debug_assert!(a != 0.0);
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        let q = -0.5 * (b + b.signum() * sq);
        let (r1, r2) = if b == 0.0 {
            let r = (-c / a).max(0.0).sqrt();
            (r, -r)
        } else if q != 0.0 {
            (q / a, c / q)
        } else {
            (0.0, -b / a)
        };
        (Complex64::new(r1, 0.0), Complex64::new(r2, 0.0))
    } else {
        let sq = (-disc).sqrt();
        let re = -b / (2.0 * a);
        let im = sq / (2.0 * a);
        (Complex64::new(re, im), Complex64::new(re, -im))
    }
}
