//! Error taxonomy for model validation, analysis, and the numerical oracle.
//!
//! The three enums map onto the CLI's exit codes: [`ModelError`] is a problem
//! with the user's input (exit 2), [`AnalysisError`] is a mathematical failure
//! or an unsupported structure discovered during analysis (exit 3), and
//! [`OracleError`] is a failure of the independent numerical verification
//! (exit 4).

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Any error the library can produce.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl Error {
    /// Process exit code the CLI uses for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Model(_) => 2,
            Error::Analysis(_) => 3,
            Error::Oracle(_) => 4,
        }
    }

    /// Short machine-readable tag for the concrete error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Model(e) => e.kind(),
            Error::Analysis(e) => e.kind(),
            Error::Oracle(e) => e.kind(),
        }
    }
}

/// Rejections raised while validating a model specification.
#[derive(Debug, Error)]
pub enum ModelError {
    /// A kernel's entries do not sum to one within 1e-12. Automatic
    /// renormalization is refused: a bad sum is almost always an input bug.
    #[error("kernel `{kernel}` is not stochastic: row sum deviates from 1 by {deviation:e}")]
    NonStochastic { kernel: &'static str, deviation: f64 },
    /// A transition probability is negative.
    #[error("kernel `{kernel}` has a negative entry {value} at jump ({i}, {j})")]
    NegativeEntry { kernel: &'static str, value: f64, i: i32, j: i32 },
    /// A kernel array has the wrong dimensions.
    #[error("kernel `{kernel}` has shape {got}, expected {expected}")]
    WrongShape { kernel: &'static str, got: String, expected: &'static str },
    /// A scalar parameter is outside its admissible range.
    #[error("parameter `{name}` = {value} is invalid: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },
    /// The model file could not be parsed against the schema.
    #[error("model file does not match the schema: {0}")]
    Schema(String),
}

impl ModelError {
    pub fn kind(&self) -> &'static str {
        match self {
            ModelError::NonStochastic { .. } => "non_stochastic",
            ModelError::NegativeEntry { .. } => "negative_entry",
            ModelError::WrongShape { .. } => "wrong_shape",
            ModelError::InvalidParameter { .. } => "invalid_parameter",
            ModelError::Schema(_) => "schema",
        }
    }
}

/// Mathematical failures and unsupported structures found during analysis.
#[derive(Debug, Error)]
pub enum AnalysisError {
    /// The kernel is not quadratic in the relevant variable (a or c vanishes
    /// identically), so the two-branch machinery does not apply.
    #[error("singular kernel: {0}")]
    SingularKernel(&'static str),
    /// The discriminant has a repeated root (relative separation < 1e-8);
    /// the walk is genus 0 and outside the scope of this pipeline.
    #[error("genus-0 walk: discriminant {which} has a repeated root near {root}")]
    GenusZero { which: &'static str, root: f64 },
    /// The computed branch points violate the expected ordering (or realness).
    #[error("branch-point ordering violated for {which}: {details}")]
    OrderingViolated { which: &'static str, details: String },
    /// A branch evaluation was requested within 1e-12 of a cut.
    #[error("evaluation point {point} lies on a branch cut (distance {distance:e})")]
    OnCut { point: String, distance: f64 },
    /// The leading coefficient vanishes at this point: one root of the
    /// quadratic escapes to infinity; the finite root is reported.
    #[error("branch pole: leading coefficient vanishes, finite root {finite_root}, other root at infinity")]
    PoleOfBranch { finite_root: f64 },
    /// A boundary-kernel zero search found more than one zero where the
    /// theory asserts uniqueness. Reported, never silently resolved.
    #[error("multiple zeros of {function} in {interval}: found near {locations:?}")]
    MultipleZeros { function: &'static str, interval: String, locations: Vec<f64> },
    /// The Tauberian transfer requires alpha outside {0, -1, -2, ...}.
    #[error("degenerate exponent alpha = {alpha}: transfer theorem does not apply")]
    DegenerateExponent { alpha: f64 },
    /// Closed-form constant evaluation needed oracle data that was absent.
    #[error("constant evaluation requires oracle results ({0})")]
    OracleRequired(&'static str),
    /// Extrapolation of the constant estimate did not settle.
    #[error("constant extrapolation did not converge: spread {spread:e} exceeds 10% of estimate {estimate:e}")]
    NoConvergence { estimate: f64, spread: f64 },
    /// Covariance matrix is not symmetric positive definite.
    #[error("degenerate covariance: {0}")]
    DegenerateCovariance(String),
    /// A continued-fraction denominator vanished.
    #[error("continued-fraction recursion hit a pole at index {index} (|denominator| = {denominator:e})")]
    RecursionPole { index: usize, denominator: f64 },
    /// X-shaped walks have two dominant singularities and periodic tails;
    /// the single-singularity transfer machinery does not apply.
    #[error("X-shaped walk: tail oscillates between two dominant singularities; not supported")]
    XShaped,
    /// The spec failed its stability test.
    #[error("unstable model: {0}")]
    Unstable(String),
}

impl AnalysisError {
    pub fn kind(&self) -> &'static str {
        match self {
            AnalysisError::SingularKernel(_) => "singular_kernel",
            AnalysisError::GenusZero { .. } => "genus_zero",
            AnalysisError::OrderingViolated { .. } => "ordering_violated",
            AnalysisError::OnCut { .. } => "on_cut",
            AnalysisError::PoleOfBranch { .. } => "pole_of_branch",
            AnalysisError::MultipleZeros { .. } => "multiple_zeros",
            AnalysisError::DegenerateExponent { .. } => "degenerate_exponent",
            AnalysisError::OracleRequired(_) => "oracle_required",
            AnalysisError::NoConvergence { .. } => "no_convergence",
            AnalysisError::DegenerateCovariance(_) => "degenerate_covariance",
            AnalysisError::RecursionPole { .. } => "recursion_pole",
            AnalysisError::XShaped => "x_shaped",
            AnalysisError::Unstable(_) => "unstable",
        }
    }
}

/// Failures of the truncated-lattice oracle and the tail regression.
#[derive(Debug, Error)]
pub enum OracleError {
    /// The iterative solver did not meet the residual target.
    #[error("solver did not converge: residual {residual:e} after {iterations} iterations")]
    NotConverged { residual: f64, iterations: usize },
    /// Too much stationary mass sits on the truncation frontier for the
    /// solution to be trusted as a tail oracle.
    #[error("truncation suspect: frontier mass {mass_at_edge:e} exceeds 1e-8; increase N")]
    TruncationSuspect { mass_at_edge: f64 },
    /// Truncation size below the supported minimum.
    #[error("truncation N = {n} is too small; need N >= {min}")]
    TruncationTooSmall { n: usize, min: usize },
    /// A generating-function evaluation point lies at or beyond the fitted
    /// radius of convergence of the truncated series.
    #[error("evaluation point |{point}| = {modulus} is outside the fitted convergence radius {radius}")]
    OutsideConvergence { point: String, modulus: f64, radius: f64 },
    /// The regression window gave inconsistent fits.
    #[error("tail-fit window too noisy: {0}")]
    WindowTooNoisy(String),
    /// Plot data was requested without oracle results attached.
    #[error("no oracle results attached; run with verification enabled")]
    NoOracle,
    /// Verification ran but the analytic prediction and the oracle disagree.
    #[error("oracle disagrees with analysis: {0}")]
    Disagreement(String),
}

impl OracleError {
    pub fn kind(&self) -> &'static str {
        match self {
            OracleError::NotConverged { .. } => "not_converged",
            OracleError::TruncationSuspect { .. } => "truncation_suspect",
            OracleError::TruncationTooSmall { .. } => "truncation_too_small",
            OracleError::OutsideConvergence { .. } => "outside_convergence",
            OracleError::WindowTooNoisy(_) => "window_too_noisy",
            OracleError::NoOracle => "no_oracle",
            OracleError::Disagreement(_) => "disagreement",
        }
    }
}
