//! Command dispatch for the `stratdeform` binary: one JSON document in, one
//! JSON document and an exit code out.

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use stratdeform::config::{fitted_c, RunConfig};
use stratdeform::deformation::{normalize_projective, DeformError, DeformationContext};
use stratdeform::geometry::{general_position_trial, transversality_at, transversality_trial, GeometryError, GeometryOptions, ImplicitPatch};
use stratdeform::interpolation::{evaluate_full, gamma, psi_inverse, psi_with, InterpolationError, InterpolationInput, InverseOptions, PsiOptions};
use stratdeform::polyalg::{format_rational, parse_rational, ExactMatrix, GaussianRational, MultiPoly, PolyError};
use stratdeform::stratification::{complete_system, stratum_label, validate_system, PolynomialSystem, StratError};
use stratdeform::suite::run_suite;
use stratdeform::symmetric::{generalized_discriminants, multiplicity_type, multiplicity_type_exact, SymmetricError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_UNKNOWN_COMMAND: i32 = 64;
pub const EXIT_MALFORMED: i32 = 65;

pub const COMMANDS: [&str; 12] = [
    "psi-eval",
    "psi-invert",
    "discriminants",
    "validate-system",
    "complete-system",
    "classify",
    "deform",
    "deform-projective",
    "jacobian",
    "transversality",
    "general-position",
    "suite",
];

/// A JSON document and the exit code that goes with it.
#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub code: i32,
    pub body: Value,
}

impl Response {
    fn ok(body: Value) -> Self {
        Self { code: EXIT_OK, body }
    }

    fn failure(code: i32, kind: &str, message: impl Into<String>) -> Self {
        Self { code, body: json!({"error": kind, "message": message.into()}) }
    }
}

type Outcome = Result<Response, Response>;

pub fn dispatch(command: &str, input: &str, config: &RunConfig) -> Response {
    let result = match command {
        "psi-eval" => parse(input).and_then(|i| psi_eval(i, config)),
        "psi-invert" => parse(input).and_then(|i| psi_invert(i, config)),
        "discriminants" => parse(input).and_then(|i| discriminants(i, config)),
        "validate-system" => parse(input).and_then(validate),
        "complete-system" => parse(input).and_then(|i| complete(i, config)),
        "classify" => parse(input).and_then(|i| classify(i, config)),
        "deform" => parse(input).and_then(|i| deform(i, config, false)),
        "deform-projective" => parse(input).and_then(|i| deform(i, config, true)),
        "jacobian" => parse(input).and_then(|i| jacobian(i, config)),
        "transversality" => parse(input).and_then(|i| transversality(i, config)),
        "general-position" => parse(input).and_then(|i| general_position(i, config)),
        "suite" => suite(config),
        other => Err(Response::failure(
            EXIT_UNKNOWN_COMMAND,
            "unknown_command",
            format!("unknown command '{other}'; expected one of {}", COMMANDS.join(", ")),
        )),
    };
    result.unwrap_or_else(|e| e)
}

fn parse<T: DeserializeOwned>(input: &str) -> Result<T, Response> {
    serde_json::from_str(input).map_err(|e| Response::failure(EXIT_MALFORMED, "malformed_json", e.to_string()))
}

/// A complex number written as `x`, `[re, im]` or `{"re": .., "im": ..}`.
#[derive(Deserialize, Clone, Copy)]
#[serde(untagged)]
enum Cplx {
    Real(f64),
    Pair([f64; 2]),
    Named { re: f64, #[serde(default)] im: f64 },
}

impl From<Cplx> for Complex64 {
    fn from(c: Cplx) -> Self {
        match c {
            Cplx::Real(x) => Complex64::new(x, 0.0),
            Cplx::Pair([re, im]) | Cplx::Named { re, im } => Complex64::new(re, im),
        }
    }
}

fn cvec(v: Vec<Cplx>) -> Vec<Complex64> {
    v.into_iter().map(Complex64::from).collect()
}

fn cjson(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn cvec_json(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(|z| cjson(*z)).collect())
}

fn poly_code(e: &PolyError) -> i32 {
    match e {
        PolyError::NonConvergence { .. } => EXIT_NUMERICAL,
        _ => EXIT_VALIDATION,
    }
}

fn interp_failure(e: InterpolationError) -> Response {
    let code = match e {
        InterpolationError::NonConvergence(_) => EXIT_NUMERICAL,
        _ => EXIT_VALIDATION,
    };
    Response::failure(code, "interpolation", e.to_string())
}

fn strat_failure(e: StratError) -> Response {
    let code = match &e {
        StratError::Ambiguous { .. } => EXIT_NUMERICAL,
        StratError::Poly(p) => poly_code(p),
        _ => EXIT_VALIDATION,
    };
    Response::failure(code, "stratification", e.to_string())
}

fn deform_code(e: &DeformError) -> i32 {
    match e {
        DeformError::DimensionMismatch { .. } | DeformError::OutsideRadius { .. } | DeformError::DegreeAboveCap { .. } | DeformError::ZeroVector => {
            EXIT_VALIDATION
        }
        DeformError::Interpolation { source, .. } => match source {
            InterpolationError::NonConvergence(_) | InterpolationError::ContractionViolated(_) => EXIT_NUMERICAL,
            _ => EXIT_VALIDATION,
        },
        DeformError::Strat(StratError::Ambiguous { .. }) => EXIT_NUMERICAL,
        DeformError::Strat(_) => EXIT_VALIDATION,
        _ => EXIT_NUMERICAL,
    }
}

fn deform_failure(e: DeformError) -> Response {
    Response::failure(deform_code(&e), "deformation", e.to_string())
}

fn geometry_failure(e: GeometryError) -> Response {
    let code = match &e {
        GeometryError::Rank { .. } => EXIT_NUMERICAL,
        GeometryError::Deform(d) => deform_code(d),
        GeometryError::Poly(p) => poly_code(p),
        _ => EXIT_VALIDATION,
    };
    Response::failure(code, "geometry", e.to_string())
}

fn psi_opts(config: &RunConfig) -> PsiOptions {
    PsiOptions { snap: config.tolerances.snap }
}

fn check_n(len: usize, config: &RunConfig) -> Result<(), Response> {
    if len > config.n_cap {
        return Err(Response::failure(EXIT_VALIDATION, "n_cap", format!("{len} roots exceed the cap {}", config.n_cap)));
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PsiInput {
    z: Cplx,
    a: Vec<Cplx>,
    b: Vec<Cplx>,
    #[serde(default = "zero")]
    eta: Cplx,
}

fn zero() -> Cplx {
    Cplx::Real(0.0)
}

fn psi_eval(i: PsiInput, config: &RunConfig) -> Outcome {
    check_n(i.a.len(), config)?;
    let input = InterpolationInput::new(i.z.into(), cvec(i.a), cvec(i.b), i.eta.into());
    let e = evaluate_full(&input, &psi_opts(config)).map_err(interp_failure)?;
    let g = gamma(&input.a, &input.b).map_err(interp_failure)?;
    Ok(Response::ok(json!({
        "value": cjson(e.value),
        "dpsi_deta": cjson(e.dpsi),
        "dpsi_deta_log10": finite_or_null(e.dpsi_log10),
        "gamma": g,
    })))
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InvertInput {
    w: Cplx,
    a: Vec<Cplx>,
    b: Vec<Cplx>,
    #[serde(default = "zero")]
    eta: Cplx,
}

fn psi_invert(i: InvertInput, config: &RunConfig) -> Outcome {
    check_n(i.a.len(), config)?;
    let (w, a, b, eta): (Complex64, _, _, Complex64) = (i.w.into(), cvec(i.a), cvec(i.b), i.eta.into());
    let opts = InverseOptions { fitted_c: fitted_c(a.len()), tol: config.tolerances.inverse, max_iter: 500, psi: psi_opts(config) };
    let z = psi_inverse(w, &a, &b, eta, &opts).map_err(interp_failure)?;
    let back = psi_with(&InterpolationInput::new(z, a.clone(), b.clone(), eta), &opts.psi).map_err(interp_failure)?;
    Ok(Response::ok(json!({"z": cjson(z), "residual": (back - w).norm(), "fitted_c": opts.fitted_c})))
}

/// Exact entries are rational strings, or `[re, im]` pairs of them.
#[derive(Deserialize)]
#[serde(untagged)]
enum ExactEntry {
    Real(String),
    Pair([String; 2]),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiscInput {
    #[serde(default)]
    a: Option<Vec<Cplx>>,
    #[serde(default)]
    exact: Option<Vec<ExactEntry>>,
}

fn gaussian_json(g: &GaussianRational) -> Value {
    json!([format_rational(&g.re), format_rational(&g.im)])
}

fn discriminants(i: DiscInput, config: &RunConfig) -> Outcome {
    match (i.a, i.exact) {
        (Some(a), None) => {
            let a = cvec(a);
            if a.is_empty() {
                return Err(Response::failure(EXIT_VALIDATION, "symmetric", "empty root vector"));
            }
            let d = generalized_discriminants(&a);
            let ty = multiplicity_type(&a, config.tolerances.multiplicity).map_err(|e| {
                let code = if matches!(e, SymmetricError::Ambiguous { .. }) { EXIT_NUMERICAL } else { EXIT_VALIDATION };
                Response::failure(code, "symmetric", e.to_string())
            })?;
            Ok(Response::ok(json!({
                "discriminants": cvec_json(&d),
                "distinct_count": ty.distinct_count(),
                "type": ty,
            })))
        }
        (None, Some(exact)) => {
            let mut a = Vec::with_capacity(exact.len());
            for e in exact {
                let parsed = match e {
                    ExactEntry::Real(s) => parse_rational(&s).map(GaussianRational::real),
                    ExactEntry::Pair([re, im]) => parse_rational(&re).and_then(|re| Ok(GaussianRational::new(re, parse_rational(&im)?))),
                };
                a.push(parsed.map_err(|e| Response::failure(EXIT_VALIDATION, "parse", e.to_string()))?);
            }
            if a.is_empty() {
                return Err(Response::failure(EXIT_VALIDATION, "symmetric", "empty root vector"));
            }
            let d = generalized_discriminants(&a);
            let ty = multiplicity_type_exact(&a);
            Ok(Response::ok(json!({
                "discriminants": Value::Array(d.iter().map(gaussian_json).collect()),
                "distinct_count": ty.distinct_count(),
                "type": ty,
            })))
        }
        _ => Err(Response::failure(EXIT_MALFORMED, "malformed_json", "expected exactly one of \"a\" and \"exact\"")),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemInput {
    n: usize,
    polys: Vec<MultiPoly>,
    #[serde(default)]
    coordinate_change: Option<ExactMatrix>,
}

impl SystemInput {
    fn build(self) -> Result<PolynomialSystem, Response> {
        if self.polys.len() != self.n {
            return Err(Response::failure(EXIT_VALIDATION, "stratification", format!("expected {} polynomials, got {}", self.n, self.polys.len())));
        }
        let m = self.coordinate_change.unwrap_or_else(|| ExactMatrix::identity(self.n));
        PolynomialSystem::with_coordinate_change(self.polys, m).map_err(strat_failure)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ValidateInput {
    #[serde(default)]
    n: Option<usize>,
    polys: Vec<MultiPoly>,
    #[serde(default, rename = "coordinate_change")]
    _coordinate_change: Option<ExactMatrix>,
}

fn validate(i: ValidateInput) -> Outcome {
    if let Some(n) = i.n {
        if n != i.polys.len() {
            return Err(Response::failure(EXIT_VALIDATION, "stratification", format!("expected {n} polynomials, got {}", i.polys.len())));
        }
    }
    let report = validate_system(&i.polys);
    let body = serde_json::to_value(&report).expect("report serializes");
    Ok(Response { code: if report.valid { EXIT_OK } else { EXIT_VALIDATION }, body })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CompleteInput {
    n: usize,
    top: MultiPoly,
}

fn complete(i: CompleteInput, config: &RunConfig) -> Outcome {
    let sys = complete_system(&i.top, i.n, config.degree_cap).map_err(strat_failure)?;
    Ok(Response::ok(serde_json::to_value(&sys).expect("system serializes")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassifyInput {
    system: SystemInput,
    point: Vec<Cplx>,
}

fn classify(i: ClassifyInput, config: &RunConfig) -> Outcome {
    let sys = i.system.build()?;
    let label = stratum_label(&cvec(i.point), &sys, config.tolerances.zero_test).map_err(strat_failure)?;
    Ok(Response::ok(json!({"depth": label.depth, "pattern": label.pattern, "margins": label.margins})))
}

fn context(sys: PolynomialSystem, config: &RunConfig) -> Result<DeformationContext, Response> {
    DeformationContext::new(sys, config).map_err(deform_failure)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DeformInput {
    system: SystemInput,
    t: Vec<Cplx>,
    points: Vec<Vec<Cplx>>,
}

/// Label of a point given in system coordinates, or in original homogeneous
/// coordinates when `projective`.
fn label_json(x: &[Complex64], ctx: &DeformationContext, projective: bool) -> Result<Value, Response> {
    let y = if projective { ctx.to_system_coordinates(x).map_err(deform_failure)? } else { x.to_vec() };
    let l = stratum_label(&y, ctx.system(), ctx.zero_test()).map_err(strat_failure)?;
    Ok(json!({"depth": l.depth, "pattern": l.pattern, "margins": l.margins}))
}

fn deform(i: DeformInput, config: &RunConfig, projective: bool) -> Outcome {
    let ctx = context(i.system.build()?, config)?;
    let t = cvec(i.t);
    let mut out = Vec::with_capacity(i.points.len());
    for p in i.points {
        let mut x = cvec(p);
        let y = if projective {
            x = normalize_projective(&x).map_err(deform_failure)?;
            ctx.deform_projective(&t, &x)
        } else {
            ctx.deform(&t, &x)
        }
        .map_err(deform_failure)?;
        out.push(json!({
            "input": cvec_json(&x),
            "output": cvec_json(&y),
            "label_before": label_json(&x, &ctx, projective)?,
            "label_after": label_json(&y, &ctx, projective)?,
        }));
    }
    Ok(Response::ok(json!({"t_radius": ctx.t_radius(), "points": out})))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JacobianInput {
    system: SystemInput,
    t: Vec<Cplx>,
    point: Vec<Cplx>,
}

fn jacobian(i: JacobianInput, config: &RunConfig) -> Outcome {
    let ctx = context(i.system.build()?, config)?;
    let j = ctx.orbit_jacobian(&cvec(i.t), &cvec(i.point)).map_err(deform_failure)?;
    let matrix: Vec<Value> = j.matrix.iter().map(|row| cvec_json(row)).collect();
    Ok(Response::ok(json!({
        "matrix": matrix,
        "diagonal_log10": j.diagonal_log10.iter().map(|&x| finite_or_null(x)).collect::<Vec<_>>(),
        "triangularity_defect": j.triangularity_defect,
        "scale": j.scale,
        "free_levels": j.free_levels,
        "min_free_diagonal_log10": j.min_free_diagonal_log10.map(finite_or_null),
        "max_pinned_diagonal": j.max_pinned_diagonal,
        "t_radius": ctx.t_radius(),
    })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairInput {
    system: SystemInput,
    z: ImplicitPatch,
    w: ImplicitPatch,
    #[serde(default = "default_trials")]
    trials: usize,
}

fn default_trials() -> usize {
    100
}

fn transversality(i: PairInput, config: &RunConfig) -> Outcome {
    let ctx = context(i.system.build()?, config)?;
    let opts = GeometryOptions::from_tolerances(&config.tolerances);
    let at_zero = transversality_at(&i.z, &i.w, &ctx, &vec![0.0; ctx.system().n()], &opts).map_err(geometry_failure)?;
    let report = transversality_trial(&i.z, &i.w, &ctx, i.trials, config.seed, &opts).map_err(geometry_failure)?;
    Ok(Response::ok(json!({"t_radius": ctx.t_radius(), "at_zero": at_zero, "report": report})))
}

fn general_position(i: PairInput, config: &RunConfig) -> Outcome {
    let ctx = context(i.system.build()?, config)?;
    let opts = GeometryOptions::from_tolerances(&config.tolerances);
    let report = general_position_trial(&i.z, &i.w, &ctx, i.trials, config.seed, &opts).map_err(geometry_failure)?;
    Ok(Response::ok(json!({"t_radius": ctx.t_radius(), "report": report})))
}

fn suite(config: &RunConfig) -> Outcome {
    let report = run_suite(config);
    for c in &report.criteria {
        eprintln!(
            "[{}] {:>2} {:<26} {:>8.2}s / {:.0}s",
            if c.passed { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            c.runtime_s,
            c.budget_s
        );
    }
    let code = if report.all_passed { EXIT_OK } else { EXIT_NUMERICAL };
    Ok(Response { code, body: serde_json::to_value(&report).expect("report serializes") })
}
