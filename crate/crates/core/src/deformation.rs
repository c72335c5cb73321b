//! The deformation `Ψ(t, x)` built level by level from ψ: at level `i` the
//! roots `a` of `F_i(x_1, ..., x_{i-1}, ·)` are carried to the roots `b` of
//! `F_i(Ψ_1, ..., Ψ_{i-1}, ·)` and `Ψ_i = ψ(x_i, a, b, t_i)`.
//!
//! The pairing of `a` with `b` comes from continuation along `s ↦ s·t`,
//! solving the roots afresh at every step and matching them by nearest
//! neighbour while every root moves less than half the smallest gap.

use num_complex::Complex64;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{fitted_c, RunConfig};
use crate::interpolation::{evaluate_full, gamma, Evaluation, InterpolationError, InterpolationInput, PsiOptions};
use crate::polyalg::{roots_univariate, PolyError, RootOptions};
use crate::rng;
use crate::stratification::{stratum_label, PolynomialSystem, StratError};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeformError {
    #[error("expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("|t| = {norm} exceeds the calibrated radius {radius}")]
    OutsideRadius { norm: f64, radius: f64 },
    #[error("multiplicity type of the roots at level {level} changed along the path (s = {s})")]
    TypeDrift { level: usize, s: f64 },
    #[error("roots at level {level} moved too far to be matched (s = {s})")]
    PathTooWild { level: usize, s: f64 },
    #[error("root finding failed at level {level}: {source}")]
    Roots { level: usize, source: PolyError },
    #[error("interpolation failed at level {level}: {source}")]
    Interpolation { level: usize, source: InterpolationError },
    #[error("no radius passed calibration down to {0}")]
    Calibration(f64),
    #[error("level {level} has degree {degree}, above the cap {cap}")]
    DegreeAboveCap { level: usize, degree: u32, cap: usize },
    #[error("zero vector has no projective class")]
    ZeroVector,
    #[error(transparent)]
    Strat(#[from] StratError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackingPolicy {
    pub initial_step: f64,
    pub min_step: f64,
}

impl Default for TrackingPolicy {
    fn default() -> Self {
        Self { initial_step: 0.5, min_step: 1.0 / 1048576.0 }
    }
}

/// A system together with everything needed to evaluate `Ψ`.
#[derive(Clone, Debug)]
pub struct DeformationContext {
    system: PolynomialSystem,
    t_radius: f64,
    root_opts: RootOptions,
    psi_opts: PsiOptions,
    tracking: TrackingPolicy,
    zero_test: f64,
    /// `M^{-1}` in floating point, absent for the identity.
    inverse_change: Option<Vec<Vec<Complex64>>>,
}

/// Per-level data of one evaluation of `Ψ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelTrace {
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub value: Complex64,
    /// `∂Ψ_i/∂t_i`.
    pub dpsi: Complex64,
    /// `log10|∂Ψ_i/∂t_i|`, finite whenever the derivative is nonzero even if
    /// it underflows.
    pub dpsi_log10: f64,
}

/// Number of calibration samples per candidate radius.
pub const CALIBRATION_SAMPLES: usize = 1000;

impl DeformationContext {
    /// Uses `config.t_radius` when given, otherwise calibrates the radius.
    /// Every level degree must be at most `config.n_cap`.
    pub fn new(system: PolynomialSystem, config: &RunConfig) -> Result<Self, DeformError> {
        if let Some((i, &d)) = system.degrees().iter().enumerate().find(|(_, &d)| d as usize > config.n_cap) {
            return Err(DeformError::DegreeAboveCap { level: i + 1, degree: d, cap: config.n_cap });
        }
        let mut ctx = Self::with_radius(system, config, config.t_radius.unwrap_or(f64::INFINITY));
        if config.t_radius.is_none() {
            ctx.t_radius = ctx.calibrate(config.seed, CALIBRATION_SAMPLES)?;
        }
        Ok(ctx)
    }

    /// No calibration; `radius` is taken as given.
    pub fn with_radius(system: PolynomialSystem, config: &RunConfig, radius: f64) -> Self {
        let tol = &config.tolerances;
        let m = system.coordinate_change();
        let inverse_change = (!m.is_identity()).then(|| {
            let inv = m.inverse().expect("coordinate changes are invertible");
            (0..inv.size()).map(|i| (0..inv.size()).map(|j| inv.get(i, j).to_complex()).collect()).collect()
        });
        Self {
            system,
            t_radius: radius,
            root_opts: RootOptions { tol_root: tol.root_residual, cluster_tol: tol.root_cluster, ..RootOptions::default() },
            psi_opts: PsiOptions { snap: tol.snap },
            tracking: TrackingPolicy::default(),
            zero_test: tol.zero_test,
            inverse_change,
        }
    }

    pub fn system(&self) -> &PolynomialSystem {
        &self.system
    }

    pub fn t_radius(&self) -> f64 {
        self.t_radius
    }

    pub fn zero_test(&self) -> f64 {
        self.zero_test
    }

    /// Roots of `F_i(base, ·)` (level 0-based), repeated by multiplicity.
    /// The base point is rescaled by a power of two before solving, so the
    /// result is exactly equivariant under such rescalings.
    pub fn roots_at_level(&self, level: usize, base: &[Complex64]) -> Result<Vec<Complex64>, DeformError> {
        let d = self.system.degrees()[level] as usize;
        if d == 0 {
            return Ok(Vec::new());
        }
        let nu = base[..level].iter().map(|c| c.norm()).fold(0.0, f64::max);
        if nu == 0.0 {
            return Ok(vec![ZERO; d]);
        }
        let s = 2f64.powi(-(nu.log2().round() as i32));
        let scaled: Vec<Complex64> = base[..level].iter().map(|c| c * s).collect();
        let coeffs = self.system.level_coefficients(level, &scaled);
        let roots = roots_univariate(&coeffs, &self.root_opts).map_err(|source| DeformError::Roots { level: level + 1, source })?;
        Ok(roots.into_iter().map(|r| r / s).collect())
    }

    fn level_map(&self, level: usize, x: Complex64, a: &[Complex64], b: &[Complex64], t: Complex64) -> Result<Evaluation, DeformError> {
        if a.is_empty() {
            return Ok(Evaluation { value: x * (1.0 + t), dpsi: x, dpsi_log10: x.norm().log10() });
        }
        let input = InterpolationInput::new(x, a.to_vec(), b.to_vec(), t);
        evaluate_full(&input, &self.psi_opts).map_err(|source| DeformError::Interpolation { level: level + 1, source })
    }

    /// `Ψ(t, x)`.
    pub fn deform(&self, t: &[Complex64], x: &[Complex64]) -> Result<Vec<Complex64>, DeformError> {
        Ok(self.deform_traced(t, x)?.into_iter().map(|l| l.value).collect())
    }

    /// `Ψ(t, x)` with the per-level root vectors and `∂Ψ_i/∂t_i`.
    pub fn deform_traced(&self, t: &[Complex64], x: &[Complex64]) -> Result<Vec<LevelTrace>, DeformError> {
        let n = self.system.n();
        for v in [t, x] {
            if v.len() != n {
                return Err(DeformError::DimensionMismatch { expected: n, got: v.len() });
            }
        }
        let norm = t.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if norm > self.t_radius {
            return Err(DeformError::OutsideRadius { norm, radius: self.t_radius });
        }
        self.track(t, x)
    }

    /// Continuation over the first `x.len()` levels.
    fn track(&self, t: &[Complex64], x: &[Complex64]) -> Result<Vec<LevelTrace>, DeformError> {
        let n = x.len();
        let mut a = Vec::with_capacity(n);
        for i in 0..n {
            a.push(self.roots_at_level(i, x)?);
        }
        let classes: Vec<Vec<Vec<usize>>> = a.iter().map(|r| classes_of(r)).collect();
        if t.iter().all(|c| *c == ZERO) {
            return (0..n)
                .map(|i| {
                    let e = self.level_map(i, x[i], &a[i], &a[i], ZERO)?;
                    Ok(LevelTrace { a: a[i].clone(), b: a[i].clone(), value: x[i], dpsi: e.dpsi, dpsi_log10: e.dpsi_log10 })
                })
                .collect();
        }
        let mut current = a.clone();
        let mut s = 0.0;
        let mut h = self.tracking.initial_step;
        let mut last = None;
        while s < 1.0 {
            let target = if s + h >= 1.0 { 1.0 } else { s + h };
            match self.step(target, t, x, &a, &classes, &current) {
                Ok(trace) => {
                    current = trace.iter().map(|l| l.b.clone()).collect();
                    s = target;
                    h = (2.0 * h).min(1.0);
                    last = Some(trace);
                }
                Err(StepFailure::Hard(e)) => return Err(e),
                Err(failure) => {
                    h /= 2.0;
                    if h < self.tracking.min_step {
                        return Err(match failure {
                            StepFailure::Drift(level) => DeformError::TypeDrift { level, s },
                            // Steps collapse when two classes are about to
                            // collide; that is a change of type, not a wild path.
                            StepFailure::Wild(level) if relative_gap(&current[level - 1], &a[level - 1], &classes[level - 1]) < 1e-4 => {
                                DeformError::TypeDrift { level, s }
                            }
                            StepFailure::Wild(level) => DeformError::PathTooWild { level, s },
                            StepFailure::Hard(e) => e,
                        });
                    }
                }
            }
        }
        Ok(last.expect("at least one step is taken"))
    }

    fn step(
        &self,
        s: f64,
        t: &[Complex64],
        x: &[Complex64],
        a: &[Vec<Complex64>],
        classes: &[Vec<Vec<usize>>],
        current: &[Vec<Complex64>],
    ) -> Result<Vec<LevelTrace>, StepFailure> {
        let n = x.len();
        let mut y = Vec::with_capacity(n);
        let mut trace = Vec::with_capacity(n);
        for i in 0..n {
            let fresh = self.roots_at_level(i, &y).map_err(StepFailure::Hard)?;
            let b = match_roots(&current[i], &classes[i], &fresh).map_err(|kind| kind.at(i + 1))?;
            let eta = t[i] * s;
            let e = self.level_map(i, x[i], &a[i], &b, eta).map_err(StepFailure::Hard)?;
            y.push(e.value);
            trace.push(LevelTrace { a: a[i].clone(), b, value: e.value, dpsi: e.dpsi, dpsi_log10: e.dpsi_log10 });
        }
        Ok(trace)
    }

    /// Roots of `F_i(x', ·)` paired with the roots of `F_i(Ψ_{<i}(t', x'), ·)`
    /// (`level` is 1-based; `x_prime` and `t_prime` have length `level - 1`).
    pub fn track_roots(&self, level: usize, x_prime: &[Complex64], t_prime: &[Complex64]) -> Result<TrackedRoots, DeformError> {
        let expected = level.saturating_sub(1);
        if level == 0 || level > self.system.n() {
            return Err(DeformError::DimensionMismatch { expected: self.system.n(), got: level });
        }
        for v in [x_prime, t_prime] {
            if v.len() != expected {
                return Err(DeformError::DimensionMismatch { expected, got: v.len() });
            }
        }
        let norm = t_prime.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if norm > self.t_radius {
            return Err(DeformError::OutsideRadius { norm, radius: self.t_radius });
        }
        let mut x = x_prime.to_vec();
        let mut t = t_prime.to_vec();
        x.push(ZERO);
        t.push(ZERO);
        let last = self.track(&t, &x)?.pop().expect("level ≥ 1");
        Ok(TrackedRoots { base: last.a, deformed: last.b })
    }

    /// Halves the radius from 0.1 until `samples` random `(t, x)` deform
    /// without failure and pass the contraction gate
    /// `C(d_i)(γ_i + |t_i|) < 1` at every level.
    pub fn calibrate(&self, seed: u64, samples: usize) -> Result<f64, DeformError> {
        let mut radius = 0.1;
        for _ in 0..16 {
            let ok = (0..samples as u64).into_par_iter().all(|k| {
                let mut r = rng::substream(seed, 0xCA1B, k);
                let x = sample_point(self, &mut r, None, false);
                let t = random_t(&mut r, self.system.n(), radius, false);
                match x.and_then(|x| self.track(&t, &x)) {
                    Ok(trace) => trace.iter().enumerate().all(|(i, l)| {
                        l.a.is_empty() || {
                            let g = gamma(&l.a, &l.b).unwrap_or(f64::INFINITY);
                            fitted_c(self.system.degrees()[i] as usize) * (g + t[i].norm()) < 1.0
                        }
                    }),
                    Err(_) => false,
                }
            });
            if ok {
                return Ok(radius);
            }
            radius /= 2.0;
        }
        Err(DeformError::Calibration(radius))
    }

    /// `∂Ψ/∂t`: diagonal entries in closed form, the rest by central
    /// differences with step `1e-6 · max(1, |t|, |x|)`.
    pub fn orbit_jacobian(&self, t: &[Complex64], x: &[Complex64]) -> Result<JacobianReport, DeformError> {
        let n = self.system.n();
        let base = self.deform_traced(t, x)?;
        let tn = t.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let scale = x.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let h = 1e-6 * tn.max(scale).max(1.0);
        let mut matrix = vec![vec![ZERO; n]; n];
        for j in 0..n {
            let mut tp = t.to_vec();
            let mut tm = t.to_vec();
            tp[j] += h;
            tm[j] -= h;
            let plus = self.track(&tp, x)?;
            let minus = self.track(&tm, x)?;
            for i in 0..n {
                matrix[i][j] = if i == j { base[i].dpsi } else { (plus[i].value - minus[i].value) / (2.0 * h) };
            }
        }
        let label = stratum_label(x, &self.system, self.zero_test)?;
        let free: Vec<bool> = label.pattern.iter().map(|z| !z).collect();
        let mut defect: f64 = 0.0;
        for (i, row) in matrix.iter().enumerate() {
            for v in &row[i + 1..] {
                defect = defect.max(v.norm());
            }
        }
        let diagonal_log10: Vec<f64> = base.iter().map(|l| l.dpsi_log10).collect();
        let min_free = (0..n).filter(|&i| free[i]).map(|i| diagonal_log10[i]).fold(f64::INFINITY, f64::min);
        let max_pinned = (0..n).filter(|&i| !free[i]).map(|i| matrix[i][i].norm()).fold(0.0, f64::max);
        Ok(JacobianReport {
            matrix,
            diagonal_log10,
            triangularity_defect: defect,
            scale: scale.max(1.0),
            free_levels: free,
            min_free_diagonal_log10: (min_free < f64::INFINITY).then_some(min_free),
            max_pinned_diagonal: max_pinned,
        })
    }

    /// Ψ on homogeneous coordinates in the original variables: maps through
    /// the coordinate change of the system, deforms, maps back and returns
    /// the unit-norm representative whose first coordinate above `1e-6` in
    /// modulus is real and positive.
    pub fn deform_projective(&self, t: &[Complex64], x_hom: &[Complex64]) -> Result<Vec<Complex64>, DeformError> {
        let y = self.to_system_coordinates(x_hom)?;
        let out = self.deform(t, &y)?;
        normalize_projective(&self.from_system_coordinates(&out))
    }

    /// `y = M^{-1} x`.
    pub fn to_system_coordinates(&self, x: &[Complex64]) -> Result<Vec<Complex64>, DeformError> {
        let n = self.system.n();
        if x.len() != n {
            return Err(DeformError::DimensionMismatch { expected: n, got: x.len() });
        }
        Ok(match &self.inverse_change {
            None => x.to_vec(),
            Some(inv) => inv.iter().map(|row| row.iter().zip(x).map(|(m, v)| m * v).sum()).collect(),
        })
    }

    /// `x = M y`.
    pub fn from_system_coordinates(&self, y: &[Complex64]) -> Vec<Complex64> {
        match &self.inverse_change {
            None => y.to_vec(),
            Some(_) => self.system.coordinate_change().apply_f64(y),
        }
    }
}

/// Index-aligned roots before and after deforming the base point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackedRoots {
    pub base: Vec<Complex64>,
    pub deformed: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobianReport {
    /// `matrix[i][j] = ∂Ψ_i/∂t_j`.
    pub matrix: Vec<Vec<Complex64>>,
    /// `log10|∂Ψ_i/∂t_i|`; `-∞` only where the entry vanishes exactly.
    pub diagonal_log10: Vec<f64>,
    /// Largest modulus strictly above the diagonal.
    pub triangularity_defect: f64,
    /// `max(1, |x|_∞)`.
    pub scale: f64,
    /// Levels where `F_i(x) ≠ 0`.
    pub free_levels: Vec<bool>,
    /// Smallest `log10|∂Ψ_i/∂t_i|` over free levels; finite means nonzero.
    pub min_free_diagonal_log10: Option<f64>,
    pub max_pinned_diagonal: f64,
}

enum StepFailure {
    Drift(usize),
    Wild(usize),
    Hard(DeformError),
}

enum MatchFailure {
    Drift,
    Wild,
}

impl MatchFailure {
    fn at(self, level: usize) -> StepFailure {
        match self {
            MatchFailure::Drift => StepFailure::Drift(level),
            MatchFailure::Wild => StepFailure::Wild(level),
        }
    }
}

/// Index sets of exactly equal entries, in order of first appearance.
fn classes_of(r: &[Complex64]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, v) in r.iter().enumerate() {
        match out.iter_mut().find(|c| r[c[0]] == *v) {
            Some(c) => c.push(i),
            None => out.push(vec![i]),
        }
    }
    out
}

/// Smallest distance between class values over the largest modulus of the
/// values and the base roots.
fn relative_gap(values: &[Complex64], base: &[Complex64], classes: &[Vec<usize>]) -> f64 {
    let scale = values.iter().chain(base).map(|c| c.norm()).fold(0.0, f64::max);
    let mut gap = f64::INFINITY;
    for i in 0..classes.len() {
        for j in i + 1..classes.len() {
            gap = gap.min((values[classes[i][0]] - values[classes[j][0]]).norm());
        }
    }
    if scale > 0.0 { gap / scale } else { f64::INFINITY }
}

/// Carries each class of `previous` to the nearest distinct fresh value.
fn match_roots(previous: &[Complex64], classes: &[Vec<usize>], fresh: &[Complex64]) -> Result<Vec<Complex64>, MatchFailure> {
    let fresh_classes = classes_of(fresh);
    if fresh_classes.len() != classes.len() {
        return Err(MatchFailure::Drift);
    }
    let values: Vec<Complex64> = classes.iter().map(|c| previous[c[0]]).collect();
    let mut gap = f64::INFINITY;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            gap = gap.min((values[i] - values[j]).norm());
        }
    }
    let mut used = vec![false; fresh_classes.len()];
    let mut out = vec![ZERO; previous.len()];
    for (c, v) in classes.iter().zip(&values) {
        let (k, dist) = fresh_classes
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, fc)| (k, (fresh[fc[0]] - v).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("class counts agree");
        if !(dist < gap / 2.0) {
            return Err(MatchFailure::Wild);
        }
        let target = fresh[fresh_classes[k][0]];
        if fresh_classes[k].len() != c.len() || ((*v == ZERO) != (target == ZERO)) {
            return Err(MatchFailure::Drift);
        }
        used[k] = true;
        for &i in c {
            out[i] = target;
        }
    }
    Ok(out)
}

fn random_complex(r: &mut rng::Rng, real: bool) -> Complex64 {
    let re = r.gen_range(-1.0..1.0);
    if real {
        Complex64::new(re, 0.0)
    } else {
        Complex64::new(re, r.gen_range(-1.0..1.0))
    }
}

/// Uniform in the polydisk (or cube, when `real`) of the given radius.
pub fn random_t(r: &mut rng::Rng, n: usize, radius: f64, real: bool) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            if real {
                Complex64::new(radius * r.gen_range(-1.0..1.0), 0.0)
            } else {
                Complex64::from_polar(radius * r.gen::<f64>().sqrt(), r.gen_range(0.0..std::f64::consts::TAU))
            }
        })
        .collect()
}

/// A random point, level by level: on a root sheet of `F_i` at the levels
/// selected by `sheets` (chosen at random with probability 1/2 when
/// `None`), otherwise a random coordinate. When `real`, coordinates and
/// roots are restricted to real values (a level without real roots falls
/// back to a random coordinate).
pub fn sample_point(
    ctx: &DeformationContext,
    r: &mut rng::Rng,
    sheets: Option<&[bool]>,
    real: bool,
) -> Result<Vec<Complex64>, DeformError> {
    let n = ctx.system.n();
    let mut x = Vec::with_capacity(n);
    for i in 0..n {
        let on_sheet = match sheets {
            Some(s) => s[i],
            None => r.gen_bool(0.5),
        };
        let mut value = random_complex(r, real);
        if on_sheet && ctx.system.degrees()[i] > 0 {
            let roots = ctx.roots_at_level(i, &x)?;
            let mut distinct: Vec<Complex64> = classes_of(&roots).iter().map(|c| roots[c[0]]).collect();
            if real {
                distinct.retain(|z| z.im == 0.0);
            }
            if !distinct.is_empty() {
                value = distinct[r.gen_range(0..distinct.len())];
            }
        }
        x.push(value);
    }
    Ok(x)
}

/// Unit-norm representative with the first coordinate of modulus above
/// `1e-6` rotated onto the positive real axis.
pub fn normalize_projective(v: &[Complex64]) -> Result<Vec<Complex64>, DeformError> {
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(DeformError::ZeroVector);
    }
    let unit: Vec<Complex64> = v.iter().map(|c| c / norm).collect();
    let lead = unit.iter().find(|c| c.norm() > 1e-6).copied().expect("unit vector has a large coordinate");
    let phase = lead.conj() / lead.norm();
    Ok(unit.iter().map(|c| c * phase).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::MultiPoly;
    use crate::stratification::complete_system;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ctx(polys: Vec<MultiPoly>, radius: f64) -> DeformationContext {
        DeformationContext::with_radius(PolynomialSystem::new(polys).unwrap(), &RunConfig::default(), radius)
    }

    #[test]
    fn single_linear_level() {
        let d = ctx(vec![MultiPoly::var(1, 0)], 0.5);
        let out = d.deform(&[c(0.2, 0.0)], &[c(3.0, -1.0)]).unwrap();
        assert!((out[0] - c(3.0, -1.0) * 1.1).norm() < 1e-15);
        let j = d.orbit_jacobian(&[c(0.2, 0.0)], &[c(3.0, -1.0)]).unwrap();
        assert!((j.matrix[0][0] - c(1.5, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn zero_parameter_is_identity() {
        let top = MultiPoly::from_int_terms(2, &[(&[0, 2], 1), (&[1, 1], -1)]);
        let d = DeformationContext::with_radius(complete_system(&top, 2, 64).unwrap(), &RunConfig::default(), 0.1);
        let x = [c(0.3, 0.1), c(-0.7, 2.0)];
        assert_eq!(d.deform(&[ZERO, ZERO], &x).unwrap(), x.to_vec());
    }

    #[test]
    fn two_level_sheets_are_preserved() {
        // F_1 = x1^2, F_2 = x2 (x2 - x1): sheets x2 = 0 and x2 = x1.
        let f1 = MultiPoly::from_int_terms(2, &[(&[2, 0], 1)]);
        let f2 = MultiPoly::from_int_terms(2, &[(&[0, 2], 1), (&[1, 1], -1)]);
        let d = ctx(vec![f1, f2], 0.1);
        let t = [c(0.05, 0.02), c(-0.03, 0.04)];
        let x = [c(1.0, 0.5), c(1.0, 0.5)];
        let y = d.deform(&t, &x).unwrap();
        assert_eq!(y[1], y[0]);
        let x = [c(1.0, 0.5), c(0.2, -0.3)];
        let y = d.deform(&t, &x).unwrap();
        assert!(y[1] != y[0] && y[1] != ZERO);
    }

    #[test]
    fn roots_and_tracking_examples() {
        let f1 = MultiPoly::from_int_terms(2, &[(&[2, 0], 1)]);
        let f2 = MultiPoly::from_int_terms(2, &[(&[0, 2], 1), (&[1, 1], -1)]);
        let d = ctx(vec![f1, f2], 100.0);
        assert_eq!(d.roots_at_level(1, &[c(1.0, 0.0)]).unwrap(), vec![ZERO, c(1.0, 0.0)]);
        assert_eq!(d.roots_at_level(1, &[ZERO]).unwrap(), vec![ZERO, ZERO]);
        assert_eq!(d.roots_at_level(1, &[c(2.0, 0.0)]).unwrap(), vec![ZERO, c(2.0, 0.0)]);
        let tr = d.track_roots(2, &[c(1.0, 0.0)], &[ZERO]).unwrap();
        assert_eq!(tr.base, tr.deformed);
        // Level 1 has a = (0, 0), so Ψ_1 = x_1 (1 + t_1 / 18); the two sheets
        // of level 2 collide when t_1 = -18, and pass through each other
        // beyond it.
        let tr = d.track_roots(2, &[c(1.0, 0.0)], &[c(0.9, 0.0)]).unwrap();
        assert!((tr.deformed[1] - c(1.05, 0.0)).norm() < 1e-12);
        for t1 in [-18.0, -30.0] {
            let err = d.track_roots(2, &[c(1.0, 0.0)], &[c(t1, 0.0)]).unwrap_err();
            assert!(matches!(err, DeformError::TypeDrift { level: 2, .. }), "{err:?}");
        }
    }

    #[test]
    fn radius_is_enforced() {
        let d = ctx(vec![MultiPoly::var(1, 0)], 0.1);
        assert!(matches!(d.deform(&[c(0.2, 0.0)], &[c(1.0, 0.0)]), Err(DeformError::OutsideRadius { .. })));
    }

    #[test]
    fn matching_detects_drift_and_wild_moves() {
        let prev = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)];
        let cls = classes_of(&prev);
        assert!(match_roots(&prev, &cls, &[c(0.0, 0.0), c(1.1, 0.0), c(1.1, 0.0)]).is_ok());
        assert!(matches!(match_roots(&prev, &cls, &[c(0.0, 0.0), c(1.0, 0.0), c(1.2, 0.0)]), Err(MatchFailure::Drift)));
        assert!(matches!(match_roots(&prev, &cls, &[c(0.0, 0.0), c(0.4, 0.0), c(0.4, 0.0)]), Err(MatchFailure::Wild)));
    }

    #[test]
    fn projective_normalization() {
        let v = normalize_projective(&[c(0.0, 0.0), c(0.0, 2.0), c(1.0, 0.0)]).unwrap();
        assert!((v[1] - c(2.0 / 5f64.sqrt(), 0.0)).norm() < 1e-15);
        assert!(normalize_projective(&[ZERO, ZERO]).is_err());
    }
}
