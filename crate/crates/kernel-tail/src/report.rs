//! Report assembly: one entry point per model family runs validation,
//! kernel construction, classification, and tail-form computation, and
//! packages the results (with optional oracle verification for discrete
//! walks) into a single document.
//!
//! Reports serialize deterministically: object keys appear in a fixed
//! order and every floating-point number is written with 17 significant
//! digits, so re-running the same input yields a byte-identical document.

use serde_json::{Map, Value};

use crate::asymptotics::{
    case_tail_power, constants_2demand, numeric_tail_form, ContinuousTailForm, Provenance,
    TailForm,
};
use crate::error::{AnalysisError, Error, OracleError, Result};
use crate::fluid::{
    build_fluid_kernel, fluid_classify_with_eps, fluid_tails, mm1_alpha_star, FluidKernel,
    FluidSingularity, FluidTailForms,
};
use crate::kernel::{branch_points, build_kernel, BranchPoints, BranchQuad, KernelSystem};
use crate::model::{
    classify_walk, fluid_stability, mean_drift, srbm_stability, walk_stability, DriftVector,
    FluidSpec, Model, SrbmSpec, Stability, StabilityVerdict, WalkClass, WalkSpec,
};
use crate::oracle::{boundary_sequence, fit_tail, solve_truncated, TailFit, TruncatedSolution};
use crate::poly::{BiPoly, Poly};
use crate::singularity::{
    classify_with_eps, pole_candidates, CaseLabel, PoleCandidates, EPS_EQ_DEFAULT,
};
use crate::srbm::{
    build_srbm_kernel, independent_component_rate, srbm_classify_with_eps, SrbmSingularity,
};

/// Oracle agreement tolerance on the geometric rate `theta`.
pub const ORACLE_THETA_TOL: f64 = 1e-3;
/// Oracle agreement tolerance on the polynomial exponent `alpha`.
pub const ORACLE_ALPHA_TOL: f64 = 0.2;
/// Oracle agreement tolerance (relative) on a closed-form constant.
pub const ORACLE_C_REL_TOL: f64 = 0.05;
/// Default lattice truncation for the verification oracle.
pub const DEFAULT_TRUNCATION: usize = 400;

/// Knobs shared by every analysis; echoed verbatim into the report so a
/// classification decision can be audited later.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    /// Relative tolerance deciding when two singularity candidates
    /// coincide.
    pub eps_eq: f64,
    /// Lattice truncation for the verification oracle (walks only).
    pub truncation: usize,
    /// Solve the truncated chain and attach an oracle-comparison block.
    pub verify: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { eps_eq: EPS_EQ_DEFAULT, truncation: DEFAULT_TRUNCATION, verify: false }
    }
}

/// Oracle cross-check of a discrete walk's predicted tail law.
#[derive(Debug, Clone)]
pub struct OracleBlock {
    /// Truncation level the chain was solved at.
    pub truncation: usize,
    /// Regression fit of the boundary sequence `pi_{n,0}`.
    pub fit: TailFit,
    /// `|theta_hat - rate|`.
    pub theta_error: f64,
    /// `|alpha_hat - power|`.
    pub alpha_error: f64,
    /// `|c_hat - constant| / |constant|` when a constant was predicted.
    pub c_rel_error: Option<f64>,
    /// All applicable tolerances hold. The constant participates only
    /// when its provenance is closed-form (a numeric estimate is itself
    /// oracle-derived, so comparing it would be circular).
    pub agrees: bool,
    /// The boundary sequence `pi_{m,0}`, `m = 1..=N`; feeds plot data.
    pub boundary: Vec<f64>,
}

/// Analysis results for a discrete walk.
#[derive(Debug, Clone)]
pub struct WalkReport {
    pub spec: WalkSpec,
    pub stability: StabilityVerdict,
    pub class: WalkClass,
    pub drift: DriftVector,
    pub branch: BranchPoints,
    pub poles: PoleCandidates,
    pub label: CaseLabel,
    /// Tail law of the horizontal boundary sequence `pi_{n,0}`.
    pub tail: TailForm,
    /// `(lambda, mu1, mu2)` when the spec matches the two-demand family.
    pub two_demand: Option<(f64, f64, f64)>,
    pub oracle: Option<OracleBlock>,
    pub warnings: Vec<String>,
}

/// Analysis results for a reflected Brownian motion.
#[derive(Debug, Clone)]
pub struct SrbmReport {
    pub spec: SrbmSpec,
    pub stability: StabilityVerdict,
    pub sing: SrbmSingularity,
    /// Tail law of the face-1 boundary measure in the x direction.
    pub tail: ContinuousTailForm,
    /// Exponential rate of the first coordinate when the components
    /// decouple; an independent check of `tau1`.
    pub independent_rate: Option<f64>,
    pub warnings: Vec<String>,
}

/// Analysis results for a fluid queue.
#[derive(Debug, Clone)]
pub struct FluidReport {
    pub spec: FluidSpec,
    pub stability: StabilityVerdict,
    pub sing: FluidSingularity,
    pub tails: FluidTailForms,
    /// The single-server pole formula `mu/(r+1) - lambda` when it applies;
    /// an independent check of the searched pole.
    pub pole_formula: Option<f64>,
    pub warnings: Vec<String>,
}

/// Family-specific body of a report.
#[derive(Debug, Clone)]
pub enum ReportBody {
    Walk(WalkReport),
    Srbm(SrbmReport),
    Fluid(FluidReport),
}

/// A complete analysis report for one model file.
#[derive(Debug, Clone)]
pub struct SingularityReport {
    pub options: AnalysisOptions,
    pub body: ReportBody,
}

/// Analyze any supported model.
pub fn analyze(model: &Model, opts: &AnalysisOptions) -> Result<SingularityReport> {
    match model {
        Model::Walk(w) => analyze_walk(w, opts),
        Model::Srbm(s) => analyze_srbm(s, opts),
        Model::Fluid(f) => analyze_fluid(f, opts),
    }
}

fn stability_warnings(v: &StabilityVerdict, warnings: &mut Vec<String>) {
    match v.status {
        Stability::Indeterminate => {
            warnings.push(format!(
                "stability indeterminate ({}); the analysis assumes a stationary \
                 distribution exists",
                v.reason
            ));
        }
        Stability::Stable if !v.verified => {
            warnings.push(
                "stability accepted from drift conditions only; the verdict is \
                 advisory, not verified"
                    .to_string(),
            );
        }
        _ => {}
    }
}

/// Rate and power of a discrete case without a constant.
fn rough_tail_form(label: &CaseLabel) -> TailForm {
    let power = case_tail_power(label.case_id).expect("case id in 1..=4");
    TailForm {
        rate: 1.0 / label.x_dom,
        power,
        constant: None,
        provenance: Provenance::Unavailable,
        error_band: None,
    }
}

fn oracle_block(
    tail: &TailForm,
    ts: &TruncatedSolution,
    truncation: usize,
) -> Result<OracleBlock, OracleError> {
    let boundary = boundary_sequence(ts);
    let fit = fit_tail(&boundary, None)?;
    let theta_error = (fit.theta_hat - tail.rate).abs();
    let alpha_error = (fit.alpha_hat - tail.power).abs();
    let c_rel_error = tail
        .constant
        .filter(|c| c.abs() > 0.0)
        .map(|c| (fit.c_hat - c).abs() / c.abs());
    let mut agrees = theta_error <= ORACLE_THETA_TOL && alpha_error <= ORACLE_ALPHA_TOL;
    if tail.provenance == Provenance::ClosedForm {
        if let Some(rel) = c_rel_error {
            agrees = agrees && rel <= ORACLE_C_REL_TOL;
        }
    }
    Ok(OracleBlock { truncation, fit, theta_error, alpha_error, c_rel_error, agrees, boundary })
}

/// Full pipeline for a discrete walk: stability, structural classification,
/// kernel and branch points, pole candidates, case label, tail law, and
/// (optionally) the oracle comparison.
pub fn analyze_walk(spec: &WalkSpec, opts: &AnalysisOptions) -> Result<SingularityReport> {
    let mut warnings = Vec::new();
    let stability = walk_stability(spec)?;
    stability_warnings(&stability, &mut warnings);

    let class = classify_walk(spec);
    if class.x_shaped {
        return Err(AnalysisError::XShaped.into());
    }
    if class.possibly_reducible {
        warnings.push(
            "the interior kernel admits a numeric bilinear factorization (residual \
             below 1e-10); the walk may be reducible and the four-case theory may \
             not apply"
                .to_string(),
        );
    }

    let ks = build_kernel(spec)?;
    let bp = branch_points(&ks)?;
    let poles = pole_candidates(&ks, &bp, &class)?;
    let label = classify_with_eps(&poles, opts.eps_eq);
    warnings.extend(label.notes.iter().cloned());

    let ts = if opts.verify { Some(solve_truncated(spec, opts.truncation)?) } else { None };

    let two_demand = spec.detect_two_demand();
    let tail = match two_demand {
        Some((lambda, mu1, mu2)) => {
            match constants_2demand(lambda, mu1, mu2, &ks, &bp, &label, ts.as_ref()) {
                Ok(tf) => tf,
                Err(Error::Analysis(AnalysisError::OracleRequired(what))) => {
                    warnings.push(format!(
                        "tail constant unavailable without the oracle ({what}); rerun \
                         with --verify to attach a numeric estimate"
                    ));
                    rough_tail_form(&label)
                }
                Err(e) => return Err(e),
            }
        }
        None => match ts.as_ref() {
            Some(ts) => match numeric_tail_form(&ks, &label, ts) {
                Ok(tf) => tf,
                Err(Error::Analysis(AnalysisError::NoConvergence { estimate, spread })) => {
                    warnings.push(format!(
                        "numeric constant estimate did not converge (estimate \
                         {estimate:e}, extrapolation spread {spread:e}); reporting \
                         rate and power only"
                    ));
                    rough_tail_form(&label)
                }
                Err(Error::Analysis(AnalysisError::DegenerateExponent { alpha })) => {
                    warnings.push(format!(
                        "transfer theorem does not apply at exponent {alpha} \
                         (nonpositive integer); reporting rate and power only"
                    ));
                    rough_tail_form(&label)
                }
                Err(e) => return Err(e),
            },
            None => {
                if case_tail_power(label.case_id).is_some() {
                    warnings.push(
                        "tail constant for a general walk requires the numeric \
                         estimator; rerun with --verify to attach it"
                            .to_string(),
                    );
                }
                rough_tail_form(&label)
            }
        },
    };

    let oracle = match ts.as_ref() {
        Some(ts) => Some(oracle_block(&tail, ts, opts.truncation)?),
        None => None,
    };

    Ok(SingularityReport {
        options: *opts,
        body: ReportBody::Walk(WalkReport {
            spec: spec.clone(),
            stability,
            drift: mean_drift(spec),
            class,
            branch: bp,
            poles,
            label,
            tail,
            two_demand,
            oracle,
            warnings,
        }),
    })
}

/// Full pipeline for a reflected Brownian motion.
pub fn analyze_srbm(spec: &SrbmSpec, opts: &AnalysisOptions) -> Result<SingularityReport> {
    let mut warnings = Vec::new();
    let stability = srbm_stability(spec)?;
    stability_warnings(&stability, &mut warnings);

    let sk = build_srbm_kernel(spec)?;
    let sing = srbm_classify_with_eps(&sk, opts.eps_eq)?;
    warnings.extend(sing.notes.iter().cloned());
    let tail = crate::srbm::srbm_tail(&sing);
    warnings.push(
        "tail constants for this family depend on boundary integrals outside the \
         singularity analysis and are not computed"
            .to_string(),
    );
    if opts.verify {
        warnings.push(
            "no numerical oracle is available for this family; --verify adds no \
             comparison block"
                .to_string(),
        );
    }
    let independent_rate = independent_component_rate(&sk);

    Ok(SingularityReport {
        options: *opts,
        body: ReportBody::Srbm(SrbmReport {
            spec: spec.clone(),
            stability,
            sing,
            tail,
            independent_rate,
            warnings,
        }),
    })
}

/// Full pipeline for a fluid queue; reports both the buffer direction
/// (exponential tail in x) and the chain direction (geometric scale in z).
pub fn analyze_fluid(spec: &FluidSpec, opts: &AnalysisOptions) -> Result<SingularityReport> {
    let mut warnings = Vec::new();
    let stability = fluid_stability(spec)?;
    stability_warnings(&stability, &mut warnings);

    let fk = build_fluid_kernel(spec);
    let sing = fluid_classify_with_eps(&fk, opts.eps_eq)?;
    warnings.extend(sing.notes.iter().cloned());
    let tails = fluid_tails(&fk, &sing);
    warnings.extend(tails.notes.iter().cloned());

    let pole_formula = mm1_alpha_star(&fk);
    if let Some(cf) = pole_formula {
        let sep = (cf - sing.alpha_star).abs();
        if !(sep <= 1e-10 * (1.0 + cf.abs())) {
            warnings.push(format!(
                "single-server pole formula ({cf:e}) disagrees with the searched \
                 pole ({:e}) beyond 1e-10",
                sing.alpha_star
            ));
        }
    }
    if opts.verify {
        warnings.push(
            "no numerical oracle is available for this family; --verify adds no \
             comparison block"
                .to_string(),
        );
    }

    Ok(SingularityReport {
        options: *opts,
        body: ReportBody::Fluid(FluidReport {
            spec: spec.clone(),
            stability,
            sing,
            tails,
            pole_formula,
            warnings,
        }),
    })
}

impl SingularityReport {
    pub fn family(&self) -> &'static str {
        match &self.body {
            ReportBody::Walk(_) => "rwqp",
            ReportBody::Srbm(_) => "srbm",
            ReportBody::Fluid(_) => "fluid",
        }
    }

    /// Oracle comparison block, when one was computed.
    pub fn oracle(&self) -> Option<&OracleBlock> {
        match &self.body {
            ReportBody::Walk(w) => w.oracle.as_ref(),
            _ => None,
        }
    }

    /// The report as a JSON document with deterministic key order.
    pub fn to_json(&self) -> Value {
        let mut doc = Map::new();
        doc.insert("schema_version".into(), Value::from(1));
        doc.insert("family".into(), Value::String(self.family().into()));
        doc.insert(
            "inputs".into(),
            match &self.body {
                ReportBody::Walk(w) => walk_inputs(&w.spec),
                ReportBody::Srbm(s) => srbm_inputs(&s.spec),
                ReportBody::Fluid(f) => fluid_inputs(&f.spec),
            },
        );
        doc.insert(
            "options".into(),
            obj(vec![
                ("eps_eq", num(self.options.eps_eq)),
                ("truncation", Value::from(self.options.truncation)),
                ("verify", Value::Bool(self.options.verify)),
            ]),
        );
        let (stability, warnings) = match &self.body {
            ReportBody::Walk(w) => (&w.stability, &w.warnings),
            ReportBody::Srbm(s) => (&s.stability, &s.warnings),
            ReportBody::Fluid(f) => (&f.stability, &f.warnings),
        };
        doc.insert("stability".into(), stability_json(stability));
        match &self.body {
            ReportBody::Walk(w) => walk_body_json(w, &mut doc),
            ReportBody::Srbm(s) => srbm_body_json(s, &mut doc),
            ReportBody::Fluid(f) => fluid_body_json(f, &mut doc),
        }
        doc.insert(
            "warnings".into(),
            Value::Array(warnings.iter().map(|w| Value::String(w.clone())).collect()),
        );
        Value::Object(doc)
    }

    /// Pretty-printed JSON document, newline-terminated.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json())
            .expect("report document serializes");
        s.push('\n');
        s
    }

    /// Plain-text rendering for terminals.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let push = |out: &mut String, line: String| {
            out.push_str(&line);
            out.push('\n');
        };
        push(&mut out, format!("family: {}", self.family()));
        let (stability, warnings) = match &self.body {
            ReportBody::Walk(w) => (&w.stability, &w.warnings),
            ReportBody::Srbm(s) => (&s.stability, &s.warnings),
            ReportBody::Fluid(f) => (&f.stability, &f.warnings),
        };
        push(
            &mut out,
            format!(
                "stability: {} ({}verified): {}",
                match stability.status {
                    Stability::Stable => "stable",
                    Stability::Unstable => "unstable",
                    Stability::Indeterminate => "indeterminate",
                },
                if stability.verified { "" } else { "un" },
                stability.reason
            ),
        );
        match &self.body {
            ReportBody::Walk(w) => {
                push(
                    &mut out,
                    format!(
                        "branch points x: ({}, {}, {}, {}); y: ({}, {}, {}, {})",
                        w.branch.x.p1,
                        w.branch.x.p2,
                        w.branch.x.p3,
                        w.branch.x.p4,
                        w.branch.y.p1,
                        w.branch.y.p2,
                        w.branch.y.p3,
                        w.branch.y.p4
                    ),
                );
                push(
                    &mut out,
                    format!(
                        "pole candidates: x* = {}, x~ = {}, x3 = {}",
                        display_or_absent(w.poles.x_star),
                        display_or_absent(w.poles.x_tilde1),
                        w.poles.x3
                    ),
                );
                push(
                    &mut out,
                    format!(
                        "case {} ({}); x_dom = {}{}",
                        w.label.case_id,
                        case_description(w.label.case_id),
                        w.label.x_dom,
                        if w.label.near_degenerate { " [near-degenerate]" } else { "" }
                    ),
                );
                push(
                    &mut out,
                    format!(
                        "tail: pi_(n,0) ~ c * n^a * theta^n with theta = {}, a = {}, c = {} ({})",
                        w.tail.rate,
                        w.tail.power,
                        w.tail
                            .constant
                            .map_or("unavailable".to_string(), |c| c.to_string()),
                        w.tail.provenance.as_str()
                    ),
                );
                if let Some(ob) = &w.oracle {
                    push(
                        &mut out,
                        format!(
                            "oracle (N = {}): theta_hat = {}, alpha_hat = {}, c_hat = {}, \
                             window = [{}, {}]; agreement: {}",
                            ob.truncation,
                            ob.fit.theta_hat,
                            ob.fit.alpha_hat,
                            ob.fit.c_hat,
                            ob.fit.window.0,
                            ob.fit.window.1,
                            if ob.agrees { "pass" } else { "FAIL" }
                        ),
                    );
                }
            }
            ReportBody::Srbm(s) => {
                push(
                    &mut out,
                    format!(
                        "branch points: x = ({}, {}); y = ({}, {})",
                        s.sing.x1, s.sing.x2, s.sing.y1, s.sing.y2
                    ),
                );
                push(
                    &mut out,
                    format!(
                        "pole candidates: x* = {}, x~ = {}",
                        display_or_absent(s.sing.poles.x_star),
                        display_or_absent(s.sing.poles.x_tilde)
                    ),
                );
                push(
                    &mut out,
                    format!(
                        "case {} ({}); tau1 = {}{}",
                        s.sing.case_id,
                        case_description(s.sing.case_id),
                        s.sing.tau1,
                        if s.sing.near_degenerate { " [near-degenerate]" } else { "" }
                    ),
                );
                push(
                    &mut out,
                    format!(
                        "tail: boundary measure ~ C * x^p * exp(-tau1 x) with p = {}, \
                         C unavailable",
                        s.tail.power
                    ),
                );
                if let Some(rate) = s.independent_rate {
                    push(
                        &mut out,
                        format!("cross-check: independent-component rate = {rate}"),
                    );
                }
            }
            ReportBody::Fluid(f) => {
                push(
                    &mut out,
                    format!("branch points: alpha1 = {}, alpha2 = {}", f.sing.alpha1, f.sing.alpha2),
                );
                push(
                    &mut out,
                    format!(
                        "pole candidate: alpha* = {} (vanishing order {})",
                        display_or_absent(f.sing.alpha_star),
                        f.sing.multiplicity
                    ),
                );
                push(
                    &mut out,
                    format!(
                        "case {} ({}); alpha_dom = {}{}",
                        f.sing.case_id,
                        case_description(f.sing.case_id),
                        f.sing.alpha_dom,
                        if f.sing.near_degenerate { " [near-degenerate]" } else { "" }
                    ),
                );
                push(
                    &mut out,
                    format!(
                        "x direction: density ~ C * x^p * exp(-alpha_dom x) with p = {}, \
                         C = {} ({}); survival constant = {}",
                        f.tails.density.power,
                        f.tails
                            .density
                            .constant
                            .map_or("unavailable".to_string(), |c| c.to_string()),
                        f.tails.density.provenance.as_str(),
                        f.tails
                            .marginal
                            .constant
                            .map_or("unavailable".to_string(), |c| c.to_string()),
                    ),
                );
                push(
                    &mut out,
                    format!(
                        "z direction: z_dom = {}, geometric ratio = {}, constant unavailable",
                        f.sing.z_dom, f.tails.boundary_ratio
                    ),
                );
            }
        }
        if !warnings.is_empty() {
            push(&mut out, "warnings:".to_string());
            for w in warnings {
                push(&mut out, format!("  - {w}"));
            }
        }
        out
    }
}

/// Plot data for the verified walk: one row per boundary index with the
/// observed probability, the predicted tail law, and their ratio. CSV with
/// a header row, LF line endings.
pub fn plot_data(report: &SingularityReport) -> Result<String, OracleError> {
    let ReportBody::Walk(w) = &report.body else {
        return Err(OracleError::NoOracle);
    };
    let ob = w.oracle.as_ref().ok_or(OracleError::NoOracle)?;
    let c = w.tail.constant.unwrap_or(ob.fit.c_hat);
    let mut out = String::from("n,pi_n0,predicted,ratio\n");
    for (i, &p) in ob.boundary.iter().enumerate() {
        let n = (i + 1) as f64;
        let predicted = c * n.powf(w.tail.power) * w.tail.rate.powf(n);
        let ratio = p / predicted;
        out.push_str(&format!("{},{:.16e},{:.16e},{:.16e}\n", i + 1, p, predicted, ratio));
    }
    Ok(out)
}

/// The kernel and its coefficient polynomials as a JSON document
/// (the `dump-kernel` subcommand).
pub fn dump_kernel(model: &Model) -> Result<Value> {
    match model {
        Model::Walk(w) => {
            let ks: KernelSystem = build_kernel(w)?;
            Ok(obj(vec![
                ("family", Value::String("rwqp".into())),
                ("h", bipoly_json(&ks.h)),
                ("h1", bipoly_json(&ks.h1)),
                ("h2", bipoly_json(&ks.h2)),
                ("h0", bipoly_json(&ks.h0)),
                ("a", poly_json(&ks.a)),
                ("b", poly_json(&ks.b)),
                ("c", poly_json(&ks.c)),
                ("d1", poly_json(&ks.d1)),
                ("at", poly_json(&ks.at)),
                ("bt", poly_json(&ks.bt)),
                ("ct", poly_json(&ks.ct)),
                ("d2", poly_json(&ks.d2)),
                (
                    "conventions",
                    Value::String(
                        "bivariate coeffs[i][j] multiplies x^i y^j; univariate \
                         coefficients ascend in degree"
                            .into(),
                    ),
                ),
            ]))
        }
        Model::Srbm(s) => {
            let sk = build_srbm_kernel(s)?;
            Ok(obj(vec![
                ("family", Value::String("srbm".into())),
                ("a", num(sk.a)),
                ("b", poly_json(&sk.b)),
                ("c", poly_json(&sk.c)),
                ("d1", poly_json(&sk.d1)),
                ("at", num(sk.at)),
                ("bt", poly_json(&sk.bt)),
                ("ct", poly_json(&sk.ct)),
                ("d2", poly_json(&sk.d2)),
                (
                    "conventions",
                    Value::String(
                        "gamma(x,y) = a y^2 + b(x) y + c(x); univariate coefficients \
                         ascend in degree"
                            .into(),
                    ),
                ),
            ]))
        }
        Model::Fluid(f) => {
            let fk: FluidKernel = build_fluid_kernel(f);
            let (a1, a2) = crate::fluid::fluid_branch_points(&fk);
            Ok(obj(vec![
                ("family", Value::String("fluid".into())),
                ("a", num(fk.a)),
                ("b", poly_json(&fk.b)),
                ("d", num(fk.d)),
                ("delta", poly_json(&fk.delta)),
                ("alpha1", num(a1)),
                ("alpha2", num(a2)),
                (
                    "conventions",
                    Value::String(
                        "H(alpha,z) = a z^2 + b(alpha) z + d; delta = b^2 - 4 a d; \
                         univariate coefficients ascend in degree"
                            .into(),
                    ),
                ),
            ]))
        }
    }
}

fn case_description(case_id: u8) -> &'static str {
    match case_id {
        1 => "simple dominant pole",
        2 => "pole on the branch point",
        3 => "branch point alone",
        _ => "coinciding pole candidates (double pole)",
    }
}

fn display_or_absent(v: f64) -> String {
    if v.is_finite() {
        v.to_string()
    } else {
        "absent".to_string()
    }
}

// JSON building: numbers go through `num` so every float in the document
// carries exactly 17 significant digits (enough to round-trip f64).

fn num(v: f64) -> Value {
    if v.is_finite() {
        let literal = format!("{v:.16e}");
        Value::Number(literal.parse().expect("fixed-precision float literal parses"))
    } else if v.is_nan() {
        Value::String("nan".into())
    } else if v > 0.0 {
        Value::String("infinity".into())
    } else {
        Value::String("-infinity".into())
    }
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        num(v)
    } else {
        Value::Null
    }
}

fn opt_num(v: Option<f64>) -> Value {
    v.map_or(Value::Null, num)
}

fn obj(entries: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    for (k, v) in entries {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}

fn strings(items: &[String]) -> Value {
    Value::Array(items.iter().map(|s| Value::String(s.clone())).collect())
}

fn poly_json(p: &Poly) -> Value {
    Value::Array(p.coeffs.iter().map(|&c| num(c)).collect())
}

fn bipoly_json(b: &BiPoly) -> Value {
    Value::Array(
        b.coeffs
            .iter()
            .map(|row| Value::Array(row.iter().map(|&c| num(c)).collect()))
            .collect(),
    )
}

fn mat_json(rows: &[&[f64]]) -> Value {
    Value::Array(
        rows.iter()
            .map(|row| Value::Array(row.iter().map(|&v| num(v)).collect()))
            .collect(),
    )
}

fn walk_inputs(spec: &WalkSpec) -> Value {
    obj(vec![
        ("family", Value::String("rwqp".into())),
        ("interior", mat_json(&spec.interior.iter().map(|r| &r[..]).collect::<Vec<_>>())),
        ("hwall", mat_json(&spec.hwall.iter().map(|r| &r[..]).collect::<Vec<_>>())),
        ("vwall", mat_json(&spec.vwall.iter().map(|r| &r[..]).collect::<Vec<_>>())),
        ("origin", mat_json(&spec.origin.iter().map(|r| &r[..]).collect::<Vec<_>>())),
    ])
}

fn srbm_inputs(spec: &SrbmSpec) -> Value {
    obj(vec![
        ("family", Value::String("srbm".into())),
        ("mu", Value::Array(spec.mu.iter().map(|&v| num(v)).collect())),
        ("sigma", mat_json(&spec.sigma.iter().map(|r| &r[..]).collect::<Vec<_>>())),
        ("R", mat_json(&spec.refl.iter().map(|r| &r[..]).collect::<Vec<_>>())),
    ])
}

fn fluid_inputs(spec: &FluidSpec) -> Value {
    obj(vec![
        ("family", Value::String("fluid".into())),
        ("lambda", num(spec.lambda)),
        ("mu", num(spec.mu)),
        ("c", Value::from(spec.c)),
        ("r", num(spec.r)),
    ])
}

fn stability_json(v: &StabilityVerdict) -> Value {
    obj(vec![
        (
            "status",
            Value::String(
                match v.status {
                    Stability::Stable => "stable",
                    Stability::Unstable => "unstable",
                    Stability::Indeterminate => "indeterminate",
                }
                .into(),
            ),
        ),
        ("verified", Value::Bool(v.verified)),
        ("reason", Value::String(v.reason.clone())),
    ])
}

fn branch_quad_json(q: &BranchQuad) -> Value {
    obj(vec![
        ("p1", num(q.p1)),
        ("p2", num(q.p2)),
        ("p3", num(q.p3)),
        ("p4", num(q.p4)),
    ])
}

fn walk_body_json(w: &WalkReport, doc: &mut Map<String, Value>) {
    doc.insert(
        "walk_class".into(),
        obj(vec![
            ("nonsingular", Value::Bool(w.class.nonsingular)),
            ("genus", Value::from(w.class.genus)),
            ("x_shaped", Value::Bool(w.class.x_shaped)),
            ("quadratic_x", Value::Bool(w.class.quadratic_x)),
            ("quadratic_y", Value::Bool(w.class.quadratic_y)),
            ("possibly_reducible", Value::Bool(w.class.possibly_reducible)),
            (
                "drift",
                obj(vec![
                    ("mx", num(w.drift.mx)),
                    ("my", num(w.drift.my)),
                    ("light_tailed", Value::Bool(w.drift.light_tailed)),
                ]),
            ),
            (
                "two_demand",
                w.two_demand.map_or(Value::Null, |(l, m1, m2)| {
                    obj(vec![("lambda", num(l)), ("mu1", num(m1)), ("mu2", num(m2))])
                }),
            ),
        ]),
    );
    doc.insert(
        "branch_points".into(),
        obj(vec![
            ("x", branch_quad_json(&w.branch.x)),
            ("y", branch_quad_json(&w.branch.y)),
        ]),
    );
    doc.insert(
        "pole_candidates".into(),
        obj(vec![
            (
                "x_star",
                obj(vec![
                    ("value", finite_or_null(w.poles.x_star)),
                    (
                        "provenance",
                        Value::String(
                            "unique zero of h1(x, Y0(x)) on (1, x3]; null when the \
                             search interval has none"
                                .into(),
                        ),
                    ),
                ]),
            ),
            (
                "x_tilde",
                obj(vec![
                    ("value", finite_or_null(w.poles.x_tilde1)),
                    ("y_tilde", opt_num(w.poles.y_tilde)),
                    ("rejected", opt_num(w.poles.rejected_x1)),
                    (
                        "provenance",
                        Value::String(
                            "X1(y~) for the zero y~ of h2(X0(y), y) on (1, y3], \
                             accepted only when Y0(X1(y~)) = y~; the rejected field \
                             records a candidate the sheet-consistency filter \
                             discarded"
                                .into(),
                        ),
                    ),
                ]),
            ),
            (
                "x3",
                obj(vec![
                    ("value", num(w.poles.x3)),
                    (
                        "provenance",
                        Value::String("third branch point of the x-discriminant".into()),
                    ),
                ]),
            ),
        ]),
    );
    doc.insert(
        "case".into(),
        obj(vec![
            ("id", Value::from(w.label.case_id)),
            ("description", Value::String(case_description(w.label.case_id).into())),
            ("x_dom", num(w.label.x_dom)),
            ("near_degenerate", Value::Bool(w.label.near_degenerate)),
            ("notes", strings(&w.label.notes)),
        ]),
    );
    doc.insert(
        "tail".into(),
        obj(vec![
            ("variable", Value::String("pi_(n,0)".into())),
            ("model", Value::String("constant * n^power * rate^n".into())),
            ("rate", num(w.tail.rate)),
            ("power", num(w.tail.power)),
            ("constant", opt_num(w.tail.constant)),
            ("provenance", Value::String(w.tail.provenance.as_str().into())),
            ("error_band", opt_num(w.tail.error_band)),
        ]),
    );
    if let Some(ob) = &w.oracle {
        doc.insert(
            "oracle".into(),
            obj(vec![
                ("truncation", Value::from(ob.truncation)),
                ("theta_hat", num(ob.fit.theta_hat)),
                ("alpha_hat", num(ob.fit.alpha_hat)),
                ("c_hat", num(ob.fit.c_hat)),
                ("r_squared", num(ob.fit.r_squared)),
                (
                    "window",
                    Value::Array(vec![
                        Value::from(ob.fit.window.0),
                        Value::from(ob.fit.window.1),
                    ]),
                ),
                (
                    "window_sensitivity",
                    Value::Array(vec![
                        num(ob.fit.window_sensitivity.0),
                        num(ob.fit.window_sensitivity.1),
                    ]),
                ),
                ("theta_error", num(ob.theta_error)),
                ("alpha_error", num(ob.alpha_error)),
                ("c_rel_error", opt_num(ob.c_rel_error)),
                (
                    "tolerances",
                    obj(vec![
                        ("theta", num(ORACLE_THETA_TOL)),
                        ("alpha", num(ORACLE_ALPHA_TOL)),
                        ("c_rel", num(ORACLE_C_REL_TOL)),
                    ]),
                ),
                ("agrees", Value::Bool(ob.agrees)),
            ]),
        );
    }
}

fn srbm_body_json(s: &SrbmReport, doc: &mut Map<String, Value>) {
    doc.insert(
        "branch_points".into(),
        obj(vec![
            ("x1", num(s.sing.x1)),
            ("x2", num(s.sing.x2)),
            ("y1", num(s.sing.y1)),
            ("y2", num(s.sing.y2)),
        ]),
    );
    doc.insert(
        "pole_candidates".into(),
        obj(vec![
            (
                "x_star",
                obj(vec![
                    ("value", finite_or_null(s.sing.poles.x_star)),
                    (
                        "provenance",
                        Value::String(
                            "zero of gamma_2(x, Y0(x)) on (0, x2]; null when the \
                             search interval has none"
                                .into(),
                        ),
                    ),
                ]),
            ),
            (
                "x_tilde",
                obj(vec![
                    ("value", finite_or_null(s.sing.poles.x_tilde)),
                    ("y_tilde", opt_num(s.sing.poles.y_tilde)),
                    ("rejected", opt_num(s.sing.poles.rejected_x_tilde)),
                    (
                        "provenance",
                        Value::String(
                            "X1(y~) for the zero y~ of gamma_1(X0(y), y) on (0, y2], \
                             accepted only when Y0(X1(y~)) = y~"
                                .into(),
                        ),
                    ),
                ]),
            ),
        ]),
    );
    doc.insert(
        "case".into(),
        obj(vec![
            ("id", Value::from(s.sing.case_id)),
            ("description", Value::String(case_description(s.sing.case_id).into())),
            ("tau1", num(s.sing.tau1)),
            ("near_degenerate", Value::Bool(s.sing.near_degenerate)),
            ("notes", strings(&s.sing.notes)),
        ]),
    );
    doc.insert(
        "tail".into(),
        obj(vec![
            ("variable", Value::String("face-1 boundary measure density".into())),
            ("model", Value::String("constant * x^power * exp(-decay_rate * x)".into())),
            ("decay_rate", num(s.tail.decay_rate)),
            ("power", num(s.tail.power)),
            ("constant", opt_num(s.tail.constant)),
            ("provenance", Value::String(s.tail.provenance.as_str().into())),
        ]),
    );
    doc.insert(
        "cross_checks".into(),
        obj(vec![("independent_component_rate", opt_num(s.independent_rate))]),
    );
}

fn fluid_body_json(f: &FluidReport, doc: &mut Map<String, Value>) {
    doc.insert(
        "branch_points".into(),
        obj(vec![("alpha1", num(f.sing.alpha1)), ("alpha2", num(f.sing.alpha2))]),
    );
    doc.insert(
        "pole_candidates".into(),
        obj(vec![(
            "alpha_star",
            obj(vec![
                ("value", finite_or_null(f.sing.alpha_star)),
                ("multiplicity", Value::from(f.sing.multiplicity)),
                (
                    "provenance",
                    Value::String(
                        "unique zero of H1_hat(alpha, Z0(alpha)) on (0, alpha1]; null \
                         when the search interval has none"
                            .into(),
                    ),
                ),
            ]),
        )]),
    );
    doc.insert(
        "case".into(),
        obj(vec![
            ("id", Value::from(f.sing.case_id)),
            ("description", Value::String(case_description(f.sing.case_id).into())),
            ("alpha_dom", num(f.sing.alpha_dom)),
            ("near_degenerate", Value::Bool(f.sing.near_degenerate)),
            ("notes", strings(&f.sing.notes)),
        ]),
    );
    doc.insert(
        "tail".into(),
        obj(vec![
            (
                "x_direction",
                obj(vec![
                    (
                        "density",
                        obj(vec![
                            ("variable", Value::String("boundary-layer density".into())),
                            (
                                "model",
                                Value::String(
                                    "constant * x^power * exp(-decay_rate * x)".into(),
                                ),
                            ),
                            ("decay_rate", num(f.tails.density.decay_rate)),
                            ("power", num(f.tails.density.power)),
                            ("constant", opt_num(f.tails.density.constant)),
                            (
                                "provenance",
                                Value::String(f.tails.density.provenance.as_str().into()),
                            ),
                        ]),
                    ),
                    (
                        "survival",
                        obj(vec![
                            ("variable", Value::String("P(buffer > x)".into())),
                            (
                                "model",
                                Value::String(
                                    "constant * x^power * exp(-decay_rate * x)".into(),
                                ),
                            ),
                            ("decay_rate", num(f.tails.marginal.decay_rate)),
                            ("power", num(f.tails.marginal.power)),
                            ("constant", opt_num(f.tails.marginal.constant)),
                            (
                                "provenance",
                                Value::String(f.tails.marginal.provenance.as_str().into()),
                            ),
                        ]),
                    ),
                ]),
            ),
            (
                "z_direction",
                obj(vec![
                    ("z_dom", num(f.sing.z_dom)),
                    ("geometric_ratio", num(f.tails.boundary_ratio)),
                    ("constant", opt_num(f.tails.boundary_constant)),
                    ("provenance", Value::String("unavailable".into())),
                ]),
            ),
        ]),
    );
    doc.insert(
        "cross_checks".into(),
        obj(vec![("single_server_pole_formula", opt_num(f.pole_formula))]),
    );
}
