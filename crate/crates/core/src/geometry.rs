//! Smooth real patches, tangent spaces, a transversality measure, and
//! Monte-Carlo trials of general position and transversality under `Ψ_t`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Tolerances;
use crate::deformation::{DeformError, DeformationContext};
use crate::polyalg::{MultiPoly, NumericPoly, PolyError};
use crate::rng;
use crate::stratification::{stratum_label, StratumLabel};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("patch is singular here: gradient rank {got}, expected {expected}")]
    Rank { expected: usize, got: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("patch polynomials must have real coefficients")]
    NotReal,
    #[error("invalid patch: {0}")]
    Invalid(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Deform(#[from] DeformError),
}

/// `{x : equations = 0, inequalities > 0}` in `R^dim`, a smooth piece of
/// dimension `expected_dim`. `param_box` bounds the region searched for
/// intersections (one `[lo, hi]` per coordinate).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImplicitPatch {
    pub dim: usize,
    pub equations: Vec<MultiPoly>,
    #[serde(default)]
    pub inequalities: Vec<MultiPoly>,
    pub expected_dim: usize,
    #[serde(default)]
    pub param_box: Option<Vec<[f64; 2]>>,
}

impl ImplicitPatch {
    pub fn new(dim: usize, equations: Vec<MultiPoly>, inequalities: Vec<MultiPoly>, expected_dim: usize) -> Self {
        Self { dim, equations, inequalities, expected_dim, param_box: None }
    }

    pub fn with_box(mut self, param_box: Vec<[f64; 2]>) -> Self {
        self.param_box = Some(param_box);
        self
    }

    fn compile(&self) -> Result<Compiled, GeometryError> {
        if self.expected_dim > self.dim {
            return Err(GeometryError::Invalid(format!("expected_dim {} exceeds dim {}", self.expected_dim, self.dim)));
        }
        let mut eqs = Vec::new();
        let mut grads = Vec::new();
        let mut norms = Vec::new();
        let mut degs = Vec::new();
        for p in &self.equations {
            let p = self.check(p)?;
            grads.push((0..self.dim).map(|j| p.derivative(j).to_numeric()).collect());
            norms.push(p.one_norm().max(f64::MIN_POSITIVE));
            degs.push(p.total_degree().unwrap_or(0) as i32);
            eqs.push(p.to_numeric());
        }
        let ineqs = self.inequalities.iter().map(|p| Ok(self.check(p)?.to_numeric())).collect::<Result<_, GeometryError>>()?;
        let bx = match &self.param_box {
            Some(b) if b.len() != self.dim => return Err(GeometryError::Dimension { expected: self.dim, got: b.len() }),
            Some(b) => b.clone(),
            None => vec![[-1.0, 1.0]; self.dim],
        };
        Ok(Compiled { dim: self.dim, codim: self.dim - self.expected_dim, eqs, grads, norms, degs, ineqs, bx })
    }

    fn check(&self, p: &MultiPoly) -> Result<MultiPoly, GeometryError> {
        if !p.has_real_coefficients() {
            return Err(GeometryError::NotReal);
        }
        Ok(p.with_num_vars(self.dim)?)
    }
}

struct Compiled {
    dim: usize,
    codim: usize,
    eqs: Vec<NumericPoly>,
    grads: Vec<Vec<NumericPoly>>,
    norms: Vec<f64>,
    degs: Vec<i32>,
    ineqs: Vec<NumericPoly>,
    bx: Vec<[f64; 2]>,
}

fn complexify(x: &[f64]) -> Vec<Complex64> {
    x.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

impl Compiled {
    /// Equations divided by `‖p‖_1 · max(1, |x|_∞)^deg`.
    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let xc = complexify(x);
        let s = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        self.eqs.iter().zip(&self.norms).zip(&self.degs).map(|((p, n), &d)| p.eval(&xc).re / (n * s.powi(d))).collect()
    }

    fn gradients(&self, x: &[f64]) -> DMatrix<f64> {
        let xc = complexify(x);
        let s = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        DMatrix::from_fn(self.eqs.len(), self.dim, |i, j| self.grads[i][j].eval(&xc).re / (self.norms[i] * s.powi(self.degs[i])))
    }

    fn admits(&self, x: &[f64]) -> bool {
        let xc = complexify(x);
        self.ineqs.iter().all(|p| p.eval(&xc).re > 0.0)
    }

    fn in_box(&self, x: &[f64]) -> bool {
        x.iter().zip(&self.bx).all(|(v, [lo, hi])| *v >= *lo && *v <= *hi)
    }
}

/// Orthonormal basis (columns) of the null space of `rows`, and the rank.
fn null_space(rows: &DMatrix<f64>, dim: usize) -> (usize, DMatrix<f64>) {
    if rows.nrows() == 0 {
        return (0, DMatrix::identity(dim, dim));
    }
    let m = rows.nrows().max(dim);
    let mut square = DMatrix::zeros(m, dim);
    square.view_mut((0, 0), (rows.nrows(), dim)).copy_from(rows);
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let top = svd.singular_values.max();
    let cutoff = 1e-10 * top.max(f64::MIN_POSITIVE);
    let mut null = Vec::new();
    let mut rank = 0;
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff {
            rank += 1;
        } else {
            null.push(v_t.row(k).transpose());
        }
    }
    let basis = if null.is_empty() { DMatrix::zeros(dim, 0) } else { DMatrix::from_columns(&null) };
    (rank, basis)
}

/// Orthonormal basis of the tangent space of the patch at `x` (columns).
pub fn tangent_basis(patch: &ImplicitPatch, x: &[f64]) -> Result<DMatrix<f64>, GeometryError> {
    let c = patch.compile()?;
    tangent_of(&c, x)
}

fn tangent_of(c: &Compiled, x: &[f64]) -> Result<DMatrix<f64>, GeometryError> {
    if x.len() != c.dim {
        return Err(GeometryError::Dimension { expected: c.dim, got: x.len() });
    }
    let (rank, basis) = null_space(&c.gradients(x), c.dim);
    if rank != c.codim {
        return Err(GeometryError::Rank { expected: c.codim, got: rank });
    }
    Ok(basis)
}

fn lex_key(m: &DMatrix<f64>) -> impl Iterator<Item = f64> + '_ {
    std::iter::once(m.ncols() as f64).chain(m.iter().copied())
}

/// Whether the spans of `a` and `b` (orthonormal columns) sum to `R^dim`.
/// The measure is the smallest singular value of the stacked orthonormal
/// bases of the two normal spaces: 1 for orthogonal normals (or an empty
/// normal space), 0 when the normals overlap. The pair is put in a canonical
/// order first, so swapping the arguments gives identical bits.
pub fn is_transverse(a: &DMatrix<f64>, b: &DMatrix<f64>, dim: usize, tol: f64) -> (bool, f64) {
    let swap = lex_key(a).zip(lex_key(b)).map(|(x, y)| x.total_cmp(&y)).find(|o| o.is_ne()) == Some(std::cmp::Ordering::Greater);
    let (a, b) = if swap { (b, a) } else { (a, b) };
    let (_, na) = null_space(&a.transpose(), dim);
    let (_, nb) = null_space(&b.transpose(), dim);
    if na.ncols() + nb.ncols() > dim {
        return (false, 0.0);
    }
    if na.ncols() == 0 || nb.ncols() == 0 {
        return (true, 1.0);
    }
    let stacked = DMatrix::from_columns(&na.column_iter().chain(nb.column_iter()).map(|c| c.into_owned()).collect::<Vec<_>>());
    let measure = stacked.singular_values().min();
    (measure > tol, measure)
}

/// `Ψ_t` read in real coordinates: on `R^n` directly, or on the affine
/// chart `v ↦ [v : 1]` of `P^{n-1}` for a system in `n` homogeneous
/// variables (through the system's coordinate change).
struct ChartMap<'a> {
    ctx: &'a DeformationContext,
    t: Vec<Complex64>,
    projective: bool,
}

impl ChartMap<'_> {
    fn new<'c>(ctx: &'c DeformationContext, t: &[f64], dim: usize) -> Result<ChartMap<'c>, GeometryError> {
        let n = ctx.system().n();
        let projective = match dim {
            d if d == n => false,
            d if d + 1 == n => true,
            d => return Err(GeometryError::Dimension { expected: n, got: d }),
        };
        Ok(ChartMap { ctx, t: complexify(t), projective })
    }

    fn apply(&self, v: &[f64]) -> Result<Vec<f64>, GeometryError> {
        if self.t.iter().all(|c| c.norm() == 0.0) {
            return Ok(v.to_vec());
        }
        let mut x = complexify(v);
        if self.projective {
            x.push(Complex64::new(1.0, 0.0));
            let y = self.ctx.to_system_coordinates(&x)?;
            let out = self.ctx.from_system_coordinates(&self.ctx.deform(&self.t, &y)?);
            let last = out[out.len() - 1];
            Ok(out[..out.len() - 1].iter().map(|c| (c / last).re).collect())
        } else {
            Ok(self.ctx.deform(&self.t, &x)?.iter().map(|c| c.re).collect())
        }
    }

    /// Value and Jacobian by central differences.
    fn jet(&self, v: &[f64]) -> Result<(Vec<f64>, DMatrix<f64>), GeometryError> {
        let f = self.apply(v)?;
        let h = 1e-6 * v.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let mut jac = DMatrix::zeros(f.len(), v.len());
        for j in 0..v.len() {
            let mut p = v.to_vec();
            let mut m = v.to_vec();
            p[j] += h;
            m[j] -= h;
            let (fp, fm) = (self.apply(&p)?, self.apply(&m)?);
            for i in 0..f.len() {
                jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        Ok((f, jac))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryOptions {
    /// Seeds per axis of the search box.
    pub grid: usize,
    pub max_newton: usize,
    pub newton_tol: f64,
    pub cluster_radius: f64,
    pub transversality_tol: f64,
}

impl GeometryOptions {
    pub fn from_tolerances(tol: &Tolerances) -> Self {
        Self {
            grid: 8,
            max_newton: 100,
            newton_tol: tol.newton,
            cluster_radius: tol.cluster_radius,
            transversality_tol: tol.transversality,
        }
    }
}

impl Default for GeometryOptions {
    fn default() -> Self {
        Self::from_tolerances(&Tolerances::default())
    }
}

/// One located point of `Z ∩ Ψ_t^{-1}(W)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub point: Vec<f64>,
    pub measure: f64,
    pub transverse: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub t: Vec<f64>,
    pub points: Vec<PointRecord>,
    /// Seeds whose Newton iteration did not reach the residual target.
    pub nonconverged: usize,
    pub transverse: bool,
    pub measure: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub t: Vec<f64>,
    pub point: Vec<f64>,
    pub measure: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransversalityReport {
    pub trials: usize,
    pub transverse_count: usize,
    /// Smallest measure over all located points of all trials (1 when no
    /// trial meets an intersection).
    pub min_measure: f64,
    pub failures: Vec<TrialFailure>,
    pub nonconverged: usize,
    pub records: Vec<TrialRecord>,
}

struct Intersections {
    points: Vec<Vec<f64>>,
    nonconverged: usize,
}

/// Grid seeds at cell centers of the box, `k` per axis.
fn grid_seeds(bx: &[[f64; 2]], k: usize) -> Vec<Vec<f64>> {
    let dim = bx.len();
    let total = k.pow(dim as u32);
    (0..total)
        .map(|mut idx| {
            (0..dim)
                .map(|j| {
                    let i = idx % k;
                    idx /= k;
                    let [lo, hi] = bx[j];
                    lo + (hi - lo) * (i as f64 + 0.5) / k as f64
                })
                .collect()
        })
        .collect()
}

fn pinv_step(jac: &DMatrix<f64>, r: &[f64]) -> Option<DVector<f64>> {
    let rv = DVector::from_column_slice(r);
    let svd = jac.clone().svd(true, true);
    let top = svd.singular_values.max();
    if !(top > 0.0) || !top.is_finite() {
        return None;
    }
    svd.solve(&rv, 1e-12 * top).ok()
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Gauss–Newton on `Z`'s equations alone, used to bring grid seeds onto `Z`.
fn project(z: &Compiled, mut v: Vec<f64>, iters: usize) -> Option<Vec<f64>> {
    for _ in 0..iters {
        let r = z.residual(&v);
        if norm_inf(&r) <= 1e-12 {
            break;
        }
        let d = pinv_step(&z.gradients(&v), &r)?;
        v.iter_mut().zip(d.iter()).for_each(|(x, dx)| *x -= dx);
        if !v.iter().all(|x| x.is_finite()) {
            return None;
        }
    }
    Some(v)
}

fn stacked(z: &Compiled, w: &Compiled, map: &ChartMap, v: &[f64]) -> Result<(Vec<f64>, DMatrix<f64>), GeometryError> {
    let (image, dphi) = map.jet(v)?;
    let mut r = z.residual(v);
    r.extend(w.residual(&image));
    let jz = z.gradients(v);
    let jw = w.gradients(&image) * dphi;
    let mut jac = DMatrix::zeros(jz.nrows() + jw.nrows(), v.len());
    jac.view_mut((0, 0), (jz.nrows(), v.len())).copy_from(&jz);
    jac.view_mut((jz.nrows(), 0), (jw.nrows(), v.len())).copy_from(&jw);
    Ok((r, jac))
}

fn locate(z: &Compiled, w: &Compiled, map: &ChartMap, opts: &GeometryOptions, k: usize) -> Result<Intersections, GeometryError> {
    let width = z.bx.iter().map(|[lo, hi]| hi - lo).fold(0.0, f64::max);
    let spacing = width / (2 * k) as f64;
    let mut seeds: Vec<Vec<f64>> = Vec::new();
    for s in grid_seeds(&z.bx, k) {
        if let Some(p) = project(z, s, 20) {
            if z.in_box(&p) && !seeds.iter().any(|q| dist(q, &p) < spacing) {
                seeds.push(p);
            }
        }
    }
    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut nonconverged = 0;
    let center: Vec<f64> = z.bx.iter().map(|[lo, hi]| (lo + hi) / 2.0).collect();
    for mut v in seeds {
        // Iterate until the step stalls; the residual decides afterwards
        // whether the limit is an intersection or a least-squares minimum.
        let mut budget_spent = true;
        for _ in 0..opts.max_newton {
            let (r, jac) = match stacked(z, w, map, &v) {
                Ok(x) => x,
                Err(GeometryError::Deform(_)) => break,
                Err(e) => return Err(e),
            };
            let Some(d) = pinv_step(&jac, &r) else { break };
            v.iter_mut().zip(d.iter()).for_each(|(x, dx)| *x -= dx);
            if !v.iter().all(|x| x.is_finite()) || dist(&v, &center) > 10.0 * width {
                budget_spent = false;
                break;
            }
            if d.amax() <= 1e-13 * v.iter().fold(1.0f64, |m, x| m.max(x.abs())) {
                budget_spent = false;
                break;
            }
        }
        let converged = v.iter().all(|x| x.is_finite())
            && matches!(stacked(z, w, map, &v), Ok((r, _)) if norm_inf(&r) <= opts.newton_tol);
        if budget_spent && !converged {
            nonconverged += 1;
        }
        if !converged || !z.in_box(&v) || !z.admits(&v) {
            continue;
        }
        let image = map.apply(&v)?;
        if !w.admits(&image) {
            continue;
        }
        let scale = v.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        if !points.iter().any(|q| dist(q, &v) <= opts.cluster_radius * scale) {
            points.push(v);
        }
    }
    Ok(Intersections { points, nonconverged })
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn check_pair(z: &ImplicitPatch, w: &ImplicitPatch) -> Result<(Compiled, Compiled), GeometryError> {
    if z.dim != w.dim {
        return Err(GeometryError::Dimension { expected: z.dim, got: w.dim });
    }
    Ok((z.compile()?, w.compile()?))
}

/// Intersections of `Z` with `Ψ_t^{-1}(W)` and the transversality of the two
/// at each of them.
pub fn transversality_at(
    z: &ImplicitPatch,
    w: &ImplicitPatch,
    ctx: &DeformationContext,
    t: &[f64],
    opts: &GeometryOptions,
) -> Result<TrialRecord, GeometryError> {
    let (zc, wc) = check_pair(z, w)?;
    record_at(&zc, &wc, ctx, t, opts)
}

fn record_at(zc: &Compiled, wc: &Compiled, ctx: &DeformationContext, t: &[f64], opts: &GeometryOptions) -> Result<TrialRecord, GeometryError> {
    let map = ChartMap::new(ctx, t, zc.dim)?;
    let found = locate(zc, wc, &map, opts, opts.grid)?;
    let mut points = Vec::new();
    for p in found.points {
        let tz = tangent_of(zc, &p)?;
        let (image, dphi) = map.jet(&p)?;
        let rows = wc.gradients(&image) * dphi;
        let (rank, tw) = null_space(&rows, zc.dim);
        if rank != wc.codim {
            return Err(GeometryError::Rank { expected: wc.codim, got: rank });
        }
        let (transverse, measure) = is_transverse(&tz, &tw, zc.dim, opts.transversality_tol);
        points.push(PointRecord { point: p, measure, transverse });
    }
    let measure = points.iter().map(|p| p.measure).fold(1.0, f64::min);
    Ok(TrialRecord { t: t.to_vec(), transverse: points.iter().all(|p| p.transverse), measure, points, nonconverged: found.nonconverged })
}

/// Uniform in `[-r, r]^n` with `r` the calibrated radius.
fn trial_t(ctx: &DeformationContext, seed: u64, index: u64) -> Vec<f64> {
    let mut r = rng::stream(seed, index);
    let radius = ctx.t_radius();
    (0..ctx.system().n()).map(|_| radius * r.gen_range(-1.0..1.0)).collect()
}

/// `trials` random real `t` in the calibrated polydisk, each checked with
/// [`transversality_at`]. Trial `k` draws `t` from its own random stream.
pub fn transversality_trial(
    z: &ImplicitPatch,
    w: &ImplicitPatch,
    ctx: &DeformationContext,
    trials: usize,
    seed: u64,
    opts: &GeometryOptions,
) -> Result<TransversalityReport, GeometryError> {
    let (zc, wc) = check_pair(z, w)?;
    let records = (0..trials as u64)
        .into_par_iter()
        .map(|k| record_at(&zc, &wc, ctx, &trial_t(ctx, seed, k), opts))
        .collect::<Result<Vec<_>, _>>()?;
    let mut failures = Vec::new();
    for r in &records {
        for p in r.points.iter().filter(|p| !p.transverse) {
            failures.push(TrialFailure { t: r.t.clone(), point: p.point.clone(), measure: p.measure });
        }
    }
    Ok(TransversalityReport {
        trials,
        transverse_count: records.iter().filter(|r| r.transverse).count(),
        min_measure: records.iter().map(|r| r.measure).fold(1.0, f64::min),
        failures,
        nonconverged: records.iter().map(|r| r.nonconverged).sum(),
        records,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralPositionRecord {
    pub t: Vec<f64>,
    /// Cluster counts with `grid` and `2 · grid` seeds per axis.
    pub coarse_count: usize,
    pub fine_count: usize,
    pub points: Vec<Vec<f64>>,
    pub success: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralPositionReport {
    /// `dim Z + dim W - dim S`.
    pub expected_dim: i64,
    pub trials: usize,
    /// Trials with no intersection point.
    pub empty_count: usize,
    /// Trials whose cluster count agrees between the two seed grids.
    pub stable_count: usize,
    /// Empty trials when `expected_dim < 0`, stable trials when it is 0.
    pub success_count: usize,
    pub nonconverged: usize,
    pub records: Vec<GeneralPositionRecord>,
}

/// Counts the points of `Z ∩ Ψ_t^{-1}(W)` for random `t`, with two seed
/// densities. Only the regimes `expected_dim ∈ {-1, 0}` are meaningful.
pub fn general_position_trial(
    z: &ImplicitPatch,
    w: &ImplicitPatch,
    ctx: &DeformationContext,
    trials: usize,
    seed: u64,
    opts: &GeometryOptions,
) -> Result<GeneralPositionReport, GeometryError> {
    let (zc, wc) = check_pair(z, w)?;
    let expected_dim = z.expected_dim as i64 + w.expected_dim as i64 - z.dim as i64;
    if expected_dim > 0 {
        return Err(GeometryError::Invalid(format!("expected dimension {expected_dim} is positive")));
    }
    let results = (0..trials as u64)
        .into_par_iter()
        .map(|k| {
            let t = trial_t(ctx, seed, k);
            let map = ChartMap::new(ctx, &t, zc.dim)?;
            let coarse = locate(&zc, &wc, &map, opts, opts.grid)?;
            let fine = locate(&zc, &wc, &map, opts, 2 * opts.grid)?;
            let success = if expected_dim < 0 { fine.points.is_empty() } else { coarse.points.len() == fine.points.len() };
            let record = GeneralPositionRecord {
                t,
                coarse_count: coarse.points.len(),
                fine_count: fine.points.len(),
                points: fine.points,
                success,
            };
            Ok((record, coarse.nonconverged + fine.nonconverged))
        })
        .collect::<Result<Vec<_>, GeometryError>>()?;
    let (records, nonconv): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    Ok(GeneralPositionReport {
        expected_dim,
        trials,
        empty_count: records.iter().filter(|r| r.fine_count == 0).count(),
        stable_count: records.iter().filter(|r| r.coarse_count == r.fine_count).count(),
        success_count: records.iter().filter(|r| r.success).count(),
        nonconverged: nonconv.iter().sum(),
        records,
    })
}

/// Distinct stratum labels met by points of the patch: grid seeds of its
/// box projected onto it, kept when they satisfy the inequalities, read in
/// system coordinates (through the chart for projective systems).
pub fn patch_labels(patch: &ImplicitPatch, ctx: &DeformationContext, grid: usize) -> Result<Vec<StratumLabel>, GeometryError> {
    let c = patch.compile()?;
    let map = ChartMap::new(ctx, &vec![0.0; ctx.system().n()], c.dim)?;
    let mut labels: Vec<StratumLabel> = Vec::new();
    for s in grid_seeds(&c.bx, grid) {
        let Some(p) = project(&c, s, 30) else { continue };
        if !c.in_box(&p) || !c.admits(&p) || norm_inf(&c.residual(&p)) > 1e-9 {
            continue;
        }
        let mut x = complexify(&p);
        if map.projective {
            x.push(Complex64::new(1.0, 0.0));
        }
        let y = ctx.to_system_coordinates(&x)?;
        let label = stratum_label(&y, ctx.system(), ctx.zero_test()).map_err(DeformError::from)?;
        if !labels.iter().any(|l| l.same_stratum(&label)) {
            labels.push(label);
        }
    }
    Ok(labels)
}
