//! The acceptance battery: twelve checks over seeded random samples, each
//! with a wall-clock budget. Reports are deterministic for a fixed seed and
//! configuration; runtimes are measured but kept out of the serialized form.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{fitted_c, RunConfig};
use crate::deformation::{random_t, sample_point, DeformationContext};
use crate::geometry::{general_position_trial, patch_labels, transversality_at, transversality_trial, GeometryOptions, ImplicitPatch};
use crate::interpolation::{
    evaluate_full, lipschitz_probe, psi_inverse, psi_with, random_domain_point, InterpolationInput, InverseOptions, PsiOptions,
};
use crate::polyalg::{linear_coordinate_change, GaussianRational, MultiPoly, Rational};
use crate::rng::{self, Rng};
use crate::stratification::{complete_system, stratum_label, validate_system, PolynomialSystem, StratumLabel};
use crate::symmetric::{generalized_discriminants, multiplicity_type_exact};

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub measured: Value,
    pub detail: String,
    pub budget_s: f64,
    pub within_budget: bool,
    #[serde(skip)]
    pub runtime_s: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub passed: usize,
    pub total: usize,
    pub all_passed: bool,
    pub criteria: Vec<CriterionResult>,
}

/// Names and budgets (seconds), indexed by criterion id - 1.
pub const CRITERIA: [(&str, f64); 12] = [
    ("identity", 10.0),
    ("interpolation", 30.0),
    ("homogeneity", 10.0),
    ("closed_form_n1", 5.0),
    ("lipschitz_and_inverse", 60.0),
    ("eta_derivative", 10.0),
    ("generalized_discriminants", 30.0),
    ("system_completion", 60.0),
    ("deformation_invariants", 120.0),
    ("orbit_jacobian", 60.0),
    ("transversality", 120.0),
    ("general_position", 120.0),
];

struct Outcome {
    passed: bool,
    measured: Value,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, measured: Value, detail: impl Into<String>) -> Self {
        Self { passed, measured, detail: detail.into() }
    }

    fn error(detail: impl Into<String>) -> Self {
        Self::new(false, Value::Null, detail)
    }
}

pub fn run_suite(config: &RunConfig) -> SuiteReport {
    let criteria: Vec<CriterionResult> = (1..=CRITERIA.len()).map(|id| run_criterion(id, config)).collect();
    let passed = criteria.iter().filter(|c| c.passed).count();
    SuiteReport { seed: config.seed, passed, total: criteria.len(), all_passed: passed == criteria.len(), criteria }
}

/// Runs one criterion (`1..=12`). Panics inside the check are reported as
/// failures.
pub fn run_criterion(id: usize, config: &RunConfig) -> CriterionResult {
    assert!((1..=CRITERIA.len()).contains(&id), "criterion id out of range");
    let (name, budget_s) = CRITERIA[id - 1];
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(|| match id {
        1 => identity(config),
        2 => interpolation(config),
        3 => homogeneity(config),
        4 => closed_form_n1(config),
        5 => lipschitz_and_inverse(config),
        6 => eta_derivative(config),
        7 => discriminants(config),
        8 => completion(config),
        9 => deformation_invariants(config),
        10 => orbit_jacobian(config),
        11 => transversality(config),
        _ => general_position(config),
    }))
    .unwrap_or_else(|e| {
        let msg = e.downcast_ref::<&str>().map(|s| s.to_string()).or_else(|| e.downcast_ref::<String>().cloned());
        Outcome::error(format!("internal panic: {}", msg.unwrap_or_default()))
    });
    let runtime_s = start.elapsed().as_secs_f64();
    let within_budget = runtime_s <= budget_s;
    CriterionResult {
        id,
        name,
        passed: outcome.passed && within_budget,
        measured: outcome.measured,
        detail: outcome.detail,
        budget_s,
        within_budget,
        runtime_s,
    }
}

fn stream(config: &RunConfig, id: u64, k: u64) -> Rng {
    rng::substream(config.seed, id, k)
}

fn polar(r: &mut Rng, radius: f64) -> Complex64 {
    Complex64::from_polar(radius, r.gen_range(0.0..std::f64::consts::TAU))
}

fn disk(r: &mut Rng, radius: f64) -> Complex64 {
    let rad = radius * r.gen::<f64>().sqrt();
    polar(r, rad)
}

fn log_uniform(r: &mut Rng, lo: f64, hi: f64) -> f64 {
    10f64.powf(r.gen_range(lo..hi))
}

/// Mostly uniform in a disk around the data, sometimes close to an `a_i`.
fn sample_z(r: &mut Rng, a: &[Complex64]) -> Complex64 {
    if r.gen_bool(0.2) {
        let center = a[r.gen_range(0..a.len())];
        let dist = log_uniform(r, -8.0, -1.0);
        center + polar(r, dist)
    } else {
        disk(r, 1.5)
    }
}

fn psi_opts(config: &RunConfig) -> PsiOptions {
    PsiOptions { snap: config.tolerances.snap }
}

/// Largest value and the first failure message over per-sample results.
#[derive(Default)]
struct Tally {
    samples: usize,
    failures: usize,
    max_ratio: f64,
    first: Option<String>,
}

impl Tally {
    fn collect(results: Vec<Result<f64, String>>) -> Self {
        let mut t = Tally::default();
        for r in results {
            t.samples += 1;
            match r {
                Ok(ratio) if ratio <= 1.0 => t.max_ratio = t.max_ratio.max(ratio),
                Ok(ratio) => {
                    t.failures += 1;
                    t.max_ratio = t.max_ratio.max(ratio);
                    t.first.get_or_insert_with(|| format!("error/tolerance ratio {ratio:.3e}"));
                }
                Err(e) => {
                    t.failures += 1;
                    t.first.get_or_insert(e);
                }
            }
        }
        t
    }

    fn outcome(self, what: &str) -> Outcome {
        let measured = json!({"samples": self.samples, "failures": self.failures, "max_error_ratio": self.max_ratio});
        let detail = match self.first {
            None => format!("{} samples within tolerance; {what}", self.samples),
            Some(f) => format!("{} of {} samples failed; first: {f}", self.failures, self.samples),
        };
        Outcome::new(self.failures == 0, measured, detail)
    }
}

fn identity(config: &RunConfig) -> Outcome {
    let opts = psi_opts(config);
    let results = (0..10_000u64)
        .into_par_iter()
        .map(|k| {
            let mut r = stream(config, 1, k);
            let n = r.gen_range(1..=5);
            let (a, _, _) = random_domain_point(&mut r, n, 0.0, false);
            let z = sample_z(&mut r, &a);
            let input = InterpolationInput::new(z, a.clone(), a, Complex64::zero());
            let v = psi_with(&input, &opts).map_err(|e| e.to_string())?;
            Ok((v - z).norm() / (1e-12 * input.scale()))
        })
        .collect();
    Tally::collect(results).outcome("ψ(z, a, a, 0) = z")
}

fn interpolation(config: &RunConfig) -> Outcome {
    let opts = psi_opts(config);
    let results = (0..1_000u64)
        .into_par_iter()
        .map(|k| {
            let mut r = stream(config, 2, k);
            let n = r.gen_range(1..=4);
            let spread = log_uniform(&mut r, -3.0, 0.0);
            let (a, b, eta) = random_domain_point(&mut r, n, spread, false);
            let scale = a.iter().chain(&b).map(|x| x.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
            let mut worst: f64 = 0.0;
            for i in 0..n {
                let delta = polar(&mut r, 1e-8);
                let input = InterpolationInput::new(a[i] + delta, a.clone(), b.clone(), eta);
                let v = psi_with(&input, &opts).map_err(|e| e.to_string())?;
                worst = worst.max((v - b[i]).norm() / (1e-5 * scale));
            }
            Ok(worst)
        })
        .collect();
    Tally::collect(results).outcome("|ψ(a_i + δ) - b_i| at |δ| = 1e-8")
}

fn homogeneity(config: &RunConfig) -> Outcome {
    let opts = psi_opts(config);
    let results = (0..1_000u64)
        .into_par_iter()
        .map(|k| {
            let mut r = stream(config, 3, k);
            let n = r.gen_range(1..=5);
            let spread = log_uniform(&mut r, -3.0, -0.5);
            let (a, b, eta) = random_domain_point(&mut r, n, spread, false);
            let z = sample_z(&mut r, &a);
            let modulus = log_uniform(&mut r, -3.0, 3.0);
            let lambda = polar(&mut r, modulus);
            let base = InterpolationInput::new(z, a.clone(), b.clone(), eta);
            let scaled = InterpolationInput::new(lambda * z, a.iter().map(|x| lambda * x).collect(), b.iter().map(|x| lambda * x).collect(), eta);
            let v = psi_with(&base, &opts).map_err(|e| e.to_string())?;
            let w = psi_with(&scaled, &opts).map_err(|e| e.to_string())?;
            Ok((w - lambda * v).norm() / (1e-9 * modulus * base.scale()))
        })
        .collect();
    Tally::collect(results).outcome("ψ(λz, λa, λb, η) = λψ(z, a, b, η)")
}

fn closed_form_n1(config: &RunConfig) -> Outcome {
    let opts = psi_opts(config);
    let results = (0..10_000u64)
        .into_par_iter()
        .map(|k| {
            let mut r = stream(config, 4, k);
            let a = disk(&mut r, 1.0);
            let b = a + disk(&mut r, 1.0);
            let eta = disk(&mut r, 1.0);
            let z = sample_z(&mut r, &[a]);
            let input = InterpolationInput::new(z, vec![a], vec![b], eta);
            let v = psi_with(&input, &opts).map_err(|e| e.to_string())?;
            let expected = z + (z.norm_sqr() * (b - a) + eta * z * (z - a).norm_sqr()) / (z.norm_sqr() + (z - a).norm_sqr());
            Ok((v - expected).norm() / (1e-12 * input.scale()))
        })
        .collect();
    Tally::collect(results).outcome("N = 1 closed form")
}

fn lipschitz_and_inverse(config: &RunConfig) -> Outcome {
    const CONFIGS: u64 = 40;
    const ROUND_TRIPS: usize = 20;
    let opts = psi_opts(config);
    let mut out = Vec::new();
    let mut passed = true;
    let mut first: Option<String> = None;
    for n in 2..=4usize {
        let c = fitted_c(n);
        let inv = InverseOptions { fitted_c: c, tol: config.tolerances.inverse, max_iter: 500, psi: opts };
        let results: Vec<Result<(f64, f64, f64), String>> = (0..CONFIGS)
            .into_par_iter()
            .map(|k| {
                let mut r = stream(config, 5, (n as u64) << 32 | k);
                let spread = 0.25 / c * log_uniform(&mut r, -3.0, 0.0);
                let (a, b, eta) = random_domain_point(&mut r, n, spread, true);
                let report = lipschitz_probe(&a, &b, eta, 1000, r.gen(), c).map_err(|e| e.to_string())?;
                if !report.bound_satisfied {
                    return Err(format!(
                        "N = {n}: Lip {:.6} / coLip {:.6} outside 1 ± {c}·{:.3e}",
                        report.empirical_lipschitz,
                        report.empirical_colipschitz,
                        report.gamma + report.eta_abs
                    ));
                }
                let mut worst: f64 = 0.0;
                for _ in 0..ROUND_TRIPS {
                    let z = sample_z(&mut r, &a);
                    let input = InterpolationInput::new(z, a.clone(), b.clone(), eta);
                    let w = psi_with(&input, &opts).map_err(|e| e.to_string())?;
                    let back = psi_inverse(w, &a, &b, eta, &inv).map_err(|e| format!("N = {n}: inverse: {e}"))?;
                    worst = worst.max((back - z).norm() / input.scale());
                }
                Ok((report.empirical_lipschitz - 1.0, 1.0 - report.empirical_colipschitz, worst))
            })
            .collect();
        let (mut lip, mut colip, mut round, mut fails) = (0.0f64, 0.0f64, 0.0f64, 0usize);
        for res in results {
            match res {
                Ok((l, cl, w)) => {
                    lip = lip.max(l);
                    colip = colip.max(cl);
                    round = round.max(w);
                    if w > 1e-9 {
                        fails += 1;
                        first.get_or_insert_with(|| format!("N = {n}: round trip error {w:.3e}"));
                    }
                }
                Err(e) => {
                    fails += 1;
                    first.get_or_insert(e);
                }
            }
        }
        passed &= fails == 0;
        out.push(json!({"n": n, "fitted_c": c, "configs": CONFIGS, "failures": fails,
            "max_lip_excess": lip, "max_colip_deficit": colip, "max_round_trip_error": round}));
    }
    let detail = first.unwrap_or_else(|| "Lipschitz bounds hold and ψ⁻¹ round-trips for N = 2, 3, 4".to_string());
    Outcome::new(passed, Value::Array(out), detail)
}

fn eta_derivative(config: &RunConfig) -> Outcome {
    let opts = psi_opts(config);
    let results: Vec<Result<(f64, bool), String>> = (0..1_000u64)
        .into_par_iter()
        .map(|k| {
            let mut r = stream(config, 6, k);
            let n = r.gen_range(1..=5);
            let spread = log_uniform(&mut r, -3.0, -0.5);
            let (a, b, eta) = random_domain_point(&mut r, n, spread, false);
            for &pin in std::iter::once(&Complex64::zero()).chain(&a) {
                let e = evaluate_full(&InterpolationInput::new(pin, a.clone(), b.clone(), eta), &opts).map_err(|e| e.to_string())?;
                if e.dpsi != Complex64::zero() {
                    return Err(format!("∂ψ/∂η = {} at pinned point {pin}", e.dpsi));
                }
            }
            let z = sample_z(&mut r, &a);
            let input = InterpolationInput::new(z, a.clone(), b.clone(), eta);
            let h = 1e-6 * input.scale();
            let at = |e: Complex64| psi_with(&InterpolationInput::new(z, a.clone(), b.clone(), e), &opts).map_err(|e| e.to_string());
            let (plus, minus) = (at(eta + h)?, at(eta - h)?);
            let fd = (plus - minus) / (2.0 * h);
            let d = evaluate_full(&input, &opts).map_err(|e| e.to_string())?.dpsi;
            // Rounding bound of the quotient itself: ψ is affine in η, so
            // truncation error is absent and only the cancellation remains.
            let noise = 64.0 * f64::EPSILON * plus.norm().max(minus.norm()) / h;
            let resolved = noise < 1e-6 * d.norm();
            Ok(((fd - d).norm() / (1e-6 * d.norm() + noise), resolved))
        })
        .collect();
    let resolved = results.iter().filter(|r| matches!(r, Ok((_, true)))).count();
    let mut outcome = Tally::collect(results.into_iter().map(|r| r.map(|(x, _)| x)).collect()).outcome("central differences in η agree");
    outcome.measured["resolved_samples"] = json!(resolved);
    outcome
}

fn partitions(n: usize, max: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=n.min(max)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn discriminants(config: &RunConfig) -> Outcome {
    let mut vectors = 0usize;
    let mut fails = Vec::new();
    for n in 1..=7usize {
        for m0 in 0..=n {
            for parts in partitions(n - m0, n - m0) {
                vectors += 1;
                let mut r = stream(config, 7, vectors as u64);
                let mut values: Vec<Rational> = Vec::new();
                while values.len() < parts.len() {
                    let v = Rational::new(BigInt::from(r.gen_range(-40i64..=40)), BigInt::from(r.gen_range(1i64..=9)));
                    if !v.is_zero() && !values.contains(&v) {
                        values.push(v);
                    }
                }
                let mut a: Vec<GaussianRational> = vec![GaussianRational::from(0); m0];
                for (v, &m) in values.iter().zip(&parts) {
                    a.extend(std::iter::repeat(GaussianRational::real(v.clone())).take(m));
                }
                a.shuffle(&mut r);
                let l = parts.len() + usize::from(m0 > 0);
                let d = generalized_discriminants(&a);
                let counts_ok = !d[l - 1].is_zero() && d[l..].iter().all(|x| x.is_zero()) && d[0] == GaussianRational::from(n as i64);
                let ty = multiplicity_type_exact(&a);
                let mut got = ty.parts.clone();
                got.sort_unstable_by(|x, y| y.cmp(x));
                if !counts_ok || ty.m0 != m0 || got != parts {
                    fails.push(format!("N = {n}, m0 = {m0}, parts {parts:?}"));
                }
            }
        }
    }
    let detail = match fails.first() {
        None => format!("{vectors} multiplicity vectors with N ≤ 7 agree exactly"),
        Some(f) => format!("{} of {vectors} vectors disagree; first: {f}", fails.len()),
    };
    Outcome::new(fails.is_empty(), json!({"vectors": vectors, "failures": fails.len()}), detail)
}

pub struct CorpusCase {
    pub name: &'static str,
    pub n: usize,
    pub top: MultiPoly,
}

/// Twenty homogeneous top polynomials with `n ≤ 3` and degree `≤ 6`.
pub fn corpus() -> Vec<CorpusCase> {
    let case = |name, n, terms: &[(&[u32], i64)]| CorpusCase { name, n, top: MultiPoly::from_int_terms(n, terms) };
    vec![
        case("cube", 1, &[(&[3], 1)]),
        case("two_lines", 2, &[(&[0, 2], 1), (&[1, 1], -1)]),
        case("axes", 2, &[(&[1, 1], 1)]),
        case("three_lines", 2, &[(&[0, 3], 1), (&[2, 1], -1)]),
        case("conjugate_pair", 2, &[(&[2, 0], 1), (&[0, 2], 1)]),
        case("double_line", 2, &[(&[0, 3], 1), (&[1, 2], -4), (&[2, 1], 4)]),
        case("quartic_lines", 2, &[(&[0, 4], 1), (&[4, 0], -1)]),
        case("quintic", 2, &[(&[0, 5], 1), (&[1, 4], 1), (&[3, 2], -3), (&[5, 0], 1)]),
        case("sextic_lines", 2, &[(&[0, 6], 1), (&[6, 0], -1)]),
        case("cusp_planes", 3, &[(&[0, 0, 3], 1), (&[1, 0, 2], -1), (&[0, 1, 2], -1), (&[1, 1, 1], 1)]),
        case("quadric_cone", 3, &[(&[0, 0, 2], 1), (&[1, 1, 0], -1)]),
        case("coordinate_planes", 3, &[(&[1, 1, 1], 1)]),
        case("sphere_cone", 3, &[(&[2, 0, 0], 1), (&[0, 2, 0], 1), (&[0, 0, 2], 1)]),
        case("folium", 3, &[(&[0, 0, 3], 1), (&[1, 1, 1], -1), (&[3, 0, 0], 1)]),
        case("plane_and_cone", 3, &[(&[0, 0, 3], 1), (&[2, 0, 1], -1), (&[0, 2, 1], -1)]),
        case("quartic", 3, &[(&[0, 0, 4], 1), (&[2, 2, 0], 1), (&[1, 1, 2], -1)]),
        case("sextic", 3, &[(&[0, 0, 6], 1), (&[2, 4, 0], -1)]),
        case("double_plane", 3, &[(&[0, 0, 3], 1), (&[0, 1, 2], 1), (&[1, 0, 2], -2), (&[1, 1, 1], -2), (&[2, 0, 1], 1), (&[2, 1, 0], 1)]),
        case("constant", 3, &[(&[0, 0, 0], 1)]),
        case("tilted_quadric", 3, &[(&[0, 0, 2], 1), (&[1, 0, 1], 1), (&[0, 2, 0], -1)]),
    ]
}

fn completion(config: &RunConfig) -> Outcome {
    let mut out = Vec::new();
    let mut first: Option<String> = None;
    for case in corpus() {
        let result = complete_system(&case.top, case.n, config.degree_cap).map_err(|e| e.to_string()).and_then(|sys| {
            let report = validate_system(sys.polys());
            if !report.valid {
                return Err(format!("validation: {:?}", report.failures));
            }
            // The top level must be divisible by the input in the new coordinates.
            let moved = linear_coordinate_change(&case.top, sys.coordinate_change()).map_err(|e| e.to_string())?;
            if !moved.divides(&sys.polys()[case.n - 1]) {
                return Err("top level does not contain the input zero set".to_string());
            }
            Ok(sys.degrees().to_vec())
        });
        let entry = match &result {
            Ok(d) => json!({"case": case.name, "valid": true, "degrees": d}),
            Err(e) => {
                first.get_or_insert_with(|| format!("{}: {e}", case.name));
                json!({"case": case.name, "valid": false})
            }
        };
        out.push(entry);
    }
    let failures = out.iter().filter(|e| e["valid"] == json!(false)).count();
    let detail = first.unwrap_or_else(|| format!("{} completed systems validate", out.len()));
    Outcome::new(failures == 0, json!({"cases": out, "failures": failures}), detail)
}

/// Completed corpus systems whose level degrees fit under `n_cap`, with
/// their calibrated contexts.
fn deformable(config: &RunConfig) -> Result<Vec<(&'static str, DeformationContext)>, String> {
    let mut out = Vec::new();
    for case in corpus() {
        let Ok(sys) = complete_system(&case.top, case.n, config.degree_cap) else { continue };
        if sys.degrees().iter().any(|&d| d as usize > config.n_cap) {
            continue;
        }
        let ctx = DeformationContext::new(sys, config).map_err(|e| format!("{}: {e}", case.name))?;
        out.push((case.name, ctx));
    }
    if out.is_empty() {
        return Err("no corpus system fits under the degree cap".to_string());
    }
    Ok(out)
}

fn inf_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn deformation_invariants(config: &RunConfig) -> Outcome {
    const SAMPLES: u64 = 10_000;
    let contexts = match deformable(config) {
        Ok(c) => c,
        Err(e) => return Outcome::error(e),
    };
    let per = SAMPLES / contexts.len() as u64 + 1;
    let mut all = Vec::new();
    let mut systems = Vec::new();
    let mut redraws = 0usize;
    for (s, (name, ctx)) in contexts.iter().enumerate() {
        let results: Vec<(Result<f64, String>, usize)> = (0..per)
            .into_par_iter()
            .map(|k| {
                let mut r = stream(config, 9, (s as u64) << 32 | k);
                let fail = |e: String| format!("{name}: {e}");
                match sample_decided(ctx, &mut r, None) {
                    Ok((x, before, redrawn)) => (check_invariants(ctx, &mut r, &x, &before).map_err(fail), redrawn),
                    Err((e, redrawn)) => (Err(fail(e)), redrawn),
                }
            })
            .collect();
        systems.push(json!({"system": name, "degrees": ctx.system().degrees(), "t_radius": ctx.t_radius(), "samples": per}));
        for (res, k) in results {
            redraws += k;
            all.push(res);
        }
    }
    let mut outcome = Tally::collect(all).outcome("identity at t = 0, equivariance and stratum labels preserved");
    outcome.measured["systems"] = Value::Array(systems);
    outcome.measured["redrawn_ambiguous_points"] = json!(redraws);
    outcome
}

/// Samples a point whose own label is decided at the zero-test tolerance,
/// drawing again up to 16 times. Also returns the number of redraws.
fn sample_decided(
    ctx: &DeformationContext,
    r: &mut Rng,
    sheets: Option<&[bool]>,
) -> Result<(Vec<Complex64>, StratumLabel, usize), (String, usize)> {
    let mut redrawn = 0;
    loop {
        let x = sample_point(ctx, r, sheets, false).map_err(|e| (e.to_string(), redrawn))?;
        match stratum_label(&x, ctx.system(), ctx.zero_test()) {
            Ok(label) => return Ok((x, label, redrawn)),
            Err(_) if redrawn < 16 => redrawn += 1,
            Err(e) => return Err((format!("sampled point: {e}"), redrawn)),
        }
    }
}

/// Identity at `t = 0`, equivariance and label preservation at one point;
/// returns the equivariance defect over its tolerance.
fn check_invariants(ctx: &DeformationContext, r: &mut Rng, x: &[Complex64], before: &StratumLabel) -> Result<f64, String> {
    let n = ctx.system().n();
    let t = random_t(r, n, ctx.t_radius(), false);
    let modulus = log_uniform(r, -3.0, 3.0);
    let lambda = polar(r, modulus);
    if ctx.deform(&vec![Complex64::zero(); n], x).map_err(|e| e.to_string())? != x {
        return Err("Ψ(0, x) differs from x".to_string());
    }
    let y = ctx.deform(&t, x).map_err(|e| e.to_string())?;
    let lx: Vec<Complex64> = x.iter().map(|c| lambda * c).collect();
    let ly = ctx.deform(&t, &lx).map_err(|e| e.to_string())?;
    let defect = ly.iter().zip(&y).map(|(p, q)| (p - lambda * q).norm()).fold(0.0, f64::max);
    let after = stratum_label(&y, ctx.system(), ctx.zero_test()).map_err(|e| format!("after: {e}"))?;
    if !before.same_stratum(&after) {
        return Err(format!("label {:?} became {:?}", before.pattern, after.pattern));
    }
    if defect == 0.0 {
        return Ok(0.0);
    }
    Ok(defect / (1e-9 * modulus * inf_norm(x).max(inf_norm(&y))))
}

fn orbit_jacobian(config: &RunConfig) -> Outcome {
    const PER_TYPE: u64 = 100;
    let contexts = match deformable(config) {
        Ok(c) => c,
        Err(e) => return Outcome::error(e),
    };
    let mut all = Vec::new();
    let mut min_free = f64::INFINITY;
    let mut max_pinned: f64 = 0.0;
    let mut redraws = 0usize;
    for (s, (name, ctx)) in contexts.iter().enumerate() {
        let n = ctx.system().n();
        let results: Vec<(Result<(f64, f64, f64), String>, usize)> = (0..2 * PER_TYPE)
            .into_par_iter()
            .map(|k| {
                let mut r = stream(config, 10, (s as u64) << 32 | k);
                // A constant top level has no root sheet to sample from.
                let first_type = k % 2 == 1 && ctx.system().degrees()[n - 1] > 0;
                let mut sheets: Vec<bool> = (0..n).map(|_| r.gen_bool(0.5)).collect();
                sheets[n - 1] = first_type;
                let fail = |e: String| format!("{name}: {e}");
                let (x, _, redrawn) = match sample_decided(ctx, &mut r, Some(&sheets)) {
                    Ok(s) => s,
                    Err((e, k)) => return (Err(fail(e)), k),
                };
                let t = random_t(&mut r, n, 0.5 * ctx.t_radius(), false);
                (orbit_check(ctx, &t, &x, first_type).map_err(fail), redrawn)
            })
            .collect();
        for (res, k) in results {
            redraws += k;
            all.push(res.map(|(ratio, m, top)| {
                min_free = min_free.min(m);
                max_pinned = max_pinned.max(top);
                ratio
            }));
        }
    }
    let mut outcome = Tally::collect(all).outcome("triangular Jacobians with nonzero free diagonal");
    outcome.measured["min_free_diagonal_log10"] = json!(min_free);
    outcome.measured["max_top_diagonal_first_type"] = json!(max_pinned);
    outcome.measured["systems"] = json!(contexts.iter().map(|(n, _)| *n).collect::<Vec<_>>());
    outcome.measured["redrawn_ambiguous_points"] = json!(redraws);
    outcome
}

/// Error ratio, smallest free diagonal (log10) and pinned top diagonal.
fn orbit_check(ctx: &DeformationContext, t: &[Complex64], x: &[Complex64], first_type: bool) -> Result<(f64, f64, f64), String> {
    let n = ctx.system().n();
    let j = ctx.orbit_jacobian(t, x).map_err(|e| e.to_string())?;
    let top = j.matrix[n - 1][n - 1].norm();
    let ratio = j.triangularity_defect / (1e-7 * j.scale);
    if first_type {
        if j.free_levels[n - 1] {
            return Err("top level free on a root sheet".to_string());
        }
        if top > 1e-12 * j.scale {
            return Err(format!("∂Ψ_n/∂t_n = {top:e} on a first-type point"));
        }
        Ok((ratio, f64::INFINITY, top))
    } else {
        if !j.free_levels[n - 1] {
            return Err("top level vanishes at a random point".to_string());
        }
        match j.min_free_diagonal_log10 {
            Some(m) if m.is_finite() => Ok((ratio, m, 0.0)),
            _ => Err("vanishing free diagonal entry".to_string()),
        }
    }
}

fn cusp_context(config: &RunConfig) -> Result<DeformationContext, String> {
    let case = corpus().into_iter().find(|c| c.name == "cusp_planes").expect("corpus case");
    let sys: PolynomialSystem = complete_system(&case.top, case.n, config.degree_cap).map_err(|e| e.to_string())?;
    DeformationContext::new(sys, config).map_err(|e| e.to_string())
}

/// `(v1 - 30)² + (v2 - 5)² - 100` restricted to `v2 > 12`. Far from the
/// origin of the chart the last coordinate is small against the roots of the
/// top level, where the deformation moves points by about `|t_n| / 2`.
fn upper_arc() -> ImplicitPatch {
    let circle = MultiPoly::from_int_terms(2, &[(&[2, 0], 1), (&[1, 0], -60), (&[0, 2], 1), (&[0, 1], -10), (&[0, 0], 825)]);
    let above = MultiPoly::from_int_terms(2, &[(&[0, 1], 1), (&[0, 0], -12)]);
    ImplicitPatch::new(2, vec![circle], vec![above], 1).with_box(vec![[19.0, 41.0], [12.0, 16.0]])
}

/// The horizontal line `v2 = num/den` over `v1 ∈ [22, 38]`.
fn horizontal(num: i64, den: i64, v2_box: [f64; 2]) -> ImplicitPatch {
    let line = MultiPoly::from_int_terms(2, &[(&[0, 1], den), (&[0, 0], -num)]);
    ImplicitPatch::new(2, vec![line], vec![], 1).with_box(vec![[22.0, 38.0], v2_box])
}

/// Both patches must lie in the open stratum of the system.
fn dense_stratum(patches: &[&ImplicitPatch], ctx: &DeformationContext) -> Result<(), String> {
    for p in patches {
        let labels = patch_labels(p, ctx, 8).map_err(|e| e.to_string())?;
        let n = ctx.system().n();
        if labels.is_empty() || labels.iter().any(|l| l.depth != n) {
            return Err(format!("patch leaves the dense stratum: {:?}", labels.iter().map(|l| &l.pattern).collect::<Vec<_>>()));
        }
    }
    Ok(())
}

fn transversality(config: &RunConfig) -> Outcome {
    let run = || -> Result<Outcome, String> {
        let ctx = cusp_context(config)?;
        let z = horizontal(15, 1, [14.0, 16.0]);
        let w = upper_arc();
        dense_stratum(&[&z, &w], &ctx)?;
        let opts = GeometryOptions::from_tolerances(&config.tolerances);
        let at_zero = transversality_at(&z, &w, &ctx, &[0.0; 3], &opts).map_err(|e| e.to_string())?;
        let tangent = !at_zero.points.is_empty() && !at_zero.transverse;
        let report = transversality_trial(&z, &w, &ctx, 100, config.seed, &opts).map_err(|e| e.to_string())?;
        let passed = tangent && report.transverse_count >= 95;
        let measured = json!({
            "t0_points": at_zero.points.len(),
            "t0_measure": at_zero.measure,
            "trials": report.trials,
            "transverse_count": report.transverse_count,
            "trials_with_intersection": report.records.iter().filter(|r| !r.points.is_empty()).count(),
            "min_measure": report.min_measure,
            "nonconverged_seeds": report.nonconverged,
            "t_radius": ctx.t_radius(),
        });
        let detail = if !tangent {
            "the tangent pair is not detected as non-transverse at t = 0".to_string()
        } else {
            format!("tangent at t = 0; transverse in {}/100 random trials", report.transverse_count)
        };
        Ok(Outcome::new(passed, measured, detail))
    };
    run().unwrap_or_else(Outcome::error)
}

fn general_position(config: &RunConfig) -> Outcome {
    let run = || -> Result<Outcome, String> {
        let ctx = cusp_context(config)?;
        let w = upper_arc();
        // (36, 13) lies on the arc.
        let point = ImplicitPatch::new(
            2,
            vec![MultiPoly::from_int_terms(2, &[(&[1, 0], 1), (&[0, 0], -36)]), MultiPoly::from_int_terms(2, &[(&[0, 1], 1), (&[0, 0], -13)])],
            vec![],
            0,
        )
        .with_box(vec![[35.0, 37.0], [12.0, 14.0]]);
        let line = horizontal(27, 2, [13.0, 14.0]);
        dense_stratum(&[&point, &line, &w], &ctx)?;
        let opts = GeometryOptions::from_tolerances(&config.tolerances);
        let negative = general_position_trial(&point, &w, &ctx, 100, config.seed, &opts).map_err(|e| e.to_string())?;
        let zero = general_position_trial(&line, &w, &ctx, 100, config.seed ^ 1, &opts).map_err(|e| e.to_string())?;
        let finite = zero.records.iter().all(|r| r.fine_count <= 2 * opts.grid);
        let passed = negative.success_count >= 95 && zero.success_count >= 95 && finite;
        let counts: Vec<usize> = zero.records.iter().map(|r| r.fine_count).collect();
        let measured = json!({
            "negative": {"expected_dim": negative.expected_dim, "empty_count": negative.empty_count, "trials": negative.trials},
            "zero": {"expected_dim": zero.expected_dim, "stable_count": zero.stable_count, "trials": zero.trials,
                "min_count": counts.iter().min(), "max_count": counts.iter().max(), "nonconverged_seeds": zero.nonconverged},
        });
        let detail = format!(
            "expected dimension -1: empty in {}/100; expected dimension 0: stable finite count in {}/100",
            negative.success_count, zero.success_count
        );
        Ok(Outcome::new(passed, measured, detail))
    };
    run().unwrap_or_else(Outcome::error)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_are_counted() {
        let counts: Vec<usize> = (0..=7).map(|n| partitions(n, n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15]);
    }

    #[test]
    fn corpus_shape() {
        let c = corpus();
        assert_eq!(c.len(), 20);
        for case in &c {
            assert!(case.n <= 3 && case.top.is_homogeneous());
            assert!(case.top.total_degree().unwrap_or(0) <= 6, "{}", case.name);
        }
    }

    #[test]
    fn arc_contains_the_planted_point() {
        let w = upper_arc();
        assert_eq!(w.equations[0].eval_real(&[36.0, 13.0]).unwrap(), 0.0);
        assert!(w.inequalities[0].eval_real(&[36.0, 13.0]).unwrap() > 0.0);
    }
}
