//! The parametrized Whitney interpolation map ψ(z, a, b, η).
//!
//! With `w_i = z / (z - a_i)`, `u_k = σ_k(w)` and
//! `V_k = Σ_i w_i e^{(i)}_{k-1}(w) (b_i - a_i)`,
//!
//! ```text
//! ψ(z) = z + (Σ_k (1/k) |u_k|^(2α_k) V_k / u_k + η z) / (Σ_k |u_k|^(2α_k) + 1),   α_k = N!/k,
//! ```
//!
//! which is the defining formula multiplied through by `|z|^(2N!)`. The
//! weights `|u_k|^(2α_k)` are handled as logarithms and normalized by their
//! maximum before exponentiation.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng;
use crate::symmetric::{elementary_symmetric, elementary_symmetric_without, factorial, MultiplicityType};

pub use crate::symmetric::LogComplex;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InterpolationError {
    #[error("a and b have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("empty root vector")]
    Empty,
    #[error("input outside the domain: a_{i} = a_{j} but b_{i} != b_{j}")]
    MergeViolated { i: usize, j: usize },
    #[error("input outside the domain: a_{0} = 0 but b_{0} != 0")]
    ZeroViolated(usize),
    #[error("multiplicity type does not match a: {0}")]
    TypeMismatch(String),
    #[error("contraction condition fails: C(γ + |η|) = {0} >= 1")]
    ContractionViolated(f64),
    #[error("inverse iteration did not converge (residual {0:e})")]
    NonConvergence(f64),
    #[error("non-finite input")]
    NonFinite,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpolationInput {
    pub z: Complex64,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    #[serde(default)]
    pub eta: Complex64,
}

impl InterpolationInput {
    pub fn new(z: Complex64, a: Vec<Complex64>, b: Vec<Complex64>, eta: Complex64) -> Self {
        Self { z, a, b, eta }
    }

    /// `max(|z|, max|a_i|, max|b_i|)`.
    pub fn scale(&self) -> f64 {
        input_scale(self.z, &self.a, &self.b)
    }
}

fn input_scale(z: Complex64, a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().chain(b).map(|x| x.norm()).fold(z.norm(), f64::max)
}

/// Checks the domain conditions: equal `a` entries carry equal `b` entries,
/// and zero `a` entries carry zero `b` entries (exact comparison).
pub fn check_domain(a: &[Complex64], b: &[Complex64]) -> Result<(), InterpolationError> {
    if a.len() != b.len() {
        return Err(InterpolationError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(InterpolationError::Empty);
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(InterpolationError::NonFinite);
    }
    for i in 0..a.len() {
        if a[i] == Complex64::new(0.0, 0.0) && b[i] != Complex64::new(0.0, 0.0) {
            return Err(InterpolationError::ZeroViolated(i));
        }
        for j in i + 1..a.len() {
            if a[i] == a[j] && b[i] != b[j] {
                return Err(InterpolationError::MergeViolated { i, j });
            }
        }
    }
    Ok(())
}

/// `max_{a_i ≠ a_j} |D_i - D_j| / |a_i - a_j|` with `D_i = b_i - a_i`; 0
/// when all `a_i` coincide.
pub fn gamma(a: &[Complex64], b: &[Complex64]) -> Result<f64, InterpolationError> {
    check_domain(a, b)?;
    let d: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let mut g: f64 = 0.0;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if a[i] != a[j] {
                g = g.max((d[i] - d[j]).norm() / (a[i] - a[j]).norm());
            }
        }
    }
    Ok(g)
}

/// Sorts the pairs `(a_i, b_i)` jointly so that ψ is evaluated in the same
/// order for every permutation of its input.
fn canonical_pairs(a: &[Complex64], b: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut idx: Vec<usize> = (0..a.len()).collect();
    idx.sort_by(|&i, &j| {
        a[i].re
            .total_cmp(&a[j].re)
            .then(a[i].im.total_cmp(&a[j].im))
            .then(b[i].re.total_cmp(&b[j].re))
            .then(b[i].im.total_cmp(&b[j].im))
    });
    (idx.iter().map(|&i| a[i]).collect(), idx.iter().map(|&i| b[i]).collect())
}

/// Power of two close to `1/scale`, so rescaling is exact.
fn rescale_factor(scale: f64) -> f64 {
    2f64.powi(-(scale.log2().round() as i32))
}

enum Snap {
    Value(Complex64),
    None,
}

fn snap(z: Complex64, a: &[Complex64], b: &[Complex64], radius: f64) -> Snap {
    if z.norm() <= radius {
        return Snap::Value(Complex64::new(0.0, 0.0));
    }
    let nearest = (0..a.len()).min_by(|&i, &j| (z - a[i]).norm().total_cmp(&(z - a[j]).norm()));
    match nearest {
        Some(i) if (z - a[i]).norm() <= radius => Snap::Value(b[i]),
        _ => Snap::None,
    }
}

/// Normalized pieces of the stable formula at a non-snapped point, in the
/// rescaled coordinates.
struct Kernel {
    /// `Σ_k (1/k) |u_k|^(2α_k) V_k / u_k`, times `exp(-M)`.
    weighted: Complex64,
    /// `Σ_k |u_k|^(2α_k) + 1`, times `exp(-M)`.
    denom: f64,
    /// `exp(-M)`.
    unit: f64,
    /// `-M`.
    log_unit: f64,
}

fn kernel(z: Complex64, a: &[Complex64], d: &[Complex64]) -> Kernel {
    let n = a.len();
    let nf = factorial(n);
    let w: Vec<Complex64> = a.iter().map(|&ai| z / (z - ai)).collect();
    let u = elementary_symmetric(&w);
    let partial: Vec<Vec<Complex64>> = (0..n).map(|i| elementary_symmetric_without(&w, i)).collect();
    let logs: Vec<f64> = (1..=n)
        .map(|k| {
            let r = u[k - 1].norm();
            if r == 0.0 {
                f64::NEG_INFINITY
            } else {
                2.0 * (nf / k as f64) * r.ln()
            }
        })
        .collect();
    let top = logs.iter().copied().fold(0.0, f64::max);
    let unit = (-top).exp();
    let mut weighted = Complex64::new(0.0, 0.0);
    let mut denom = unit;
    for k in 1..=n {
        if logs[k - 1] == f64::NEG_INFINITY {
            continue;
        }
        let weight = (logs[k - 1] - top).exp();
        denom += weight;
        let v: Complex64 = (0..n).map(|i| w[i] * partial[i][k - 1] * d[i]).sum();
        if v != Complex64::new(0.0, 0.0) {
            weighted += v / u[k - 1] * (weight / k as f64);
        }
    }
    Kernel { weighted, denom, unit, log_unit: -top }
}

/// Evaluation options shared by the ψ routines.
#[derive(Clone, Copy, Debug)]
pub struct PsiOptions {
    /// Snap radius relative to the input scale.
    pub snap: f64,
}

impl Default for PsiOptions {
    fn default() -> Self {
        Self { snap: 1e-12 }
    }
}

/// ψ(z, a, b, η), with ψ(a_i) = b_i and ψ(0) = 0.
pub fn psi(input: &InterpolationInput) -> Result<Complex64, InterpolationError> {
    psi_with(input, &PsiOptions::default())
}

pub fn psi_with(input: &InterpolationInput, opts: &PsiOptions) -> Result<Complex64, InterpolationError> {
    Ok(evaluate(input, opts)?.0)
}

/// Value and η-derivative together.
pub fn evaluate(input: &InterpolationInput, opts: &PsiOptions) -> Result<(Complex64, Complex64), InterpolationError> {
    let e = evaluate_full(input, opts)?;
    Ok((e.value, e.dpsi))
}

/// ψ, `∂ψ/∂η` and `log10|∂ψ/∂η|`. The logarithm stays finite where the
/// derivative itself underflows (its size is about `|z| / max_k |u_k|^(2α_k)`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    pub dpsi: Complex64,
    /// `-∞` exactly when `∂ψ/∂η = 0`, i.e. at `z = 0` and `z = a_i`.
    pub dpsi_log10: f64,
}

pub fn evaluate_full(input: &InterpolationInput, opts: &PsiOptions) -> Result<Evaluation, InterpolationError> {
    let InterpolationInput { z, a, b, eta } = input;
    check_domain(a, b)?;
    if !z.is_finite() || !eta.is_finite() {
        return Err(InterpolationError::NonFinite);
    }
    let zero = Complex64::new(0.0, 0.0);
    let scale = input.scale();
    let pinned = |value| Evaluation { value, dpsi: zero, dpsi_log10: f64::NEG_INFINITY };
    if scale == 0.0 {
        return Ok(pinned(zero));
    }
    if let Snap::Value(v) = snap(*z, a, b, opts.snap * scale) {
        return Ok(pinned(v));
    }
    let (a, b) = canonical_pairs(a, b);
    let lambda = rescale_factor(scale);
    let zs = z * lambda;
    let as_: Vec<Complex64> = a.iter().map(|x| x * lambda).collect();
    let ds: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| (y - x) * lambda).collect();
    let k = kernel(zs, &as_, &ds);
    let dpsi = z * (k.unit / k.denom);
    let dpsi_log10 = z.norm().log10() + k.log_unit / std::f64::consts::LN_10 - k.denom.log10();
    if a == b && *eta == zero {
        return Ok(Evaluation { value: *z, dpsi, dpsi_log10 });
    }
    let frac = (k.weighted + eta * zs * k.unit) / k.denom;
    Ok(Evaluation { value: z + frac / lambda, dpsi, dpsi_log10 })
}

/// `∂ψ/∂η = z / (|z|^(2N!) μ(z) + 1)`; exactly 0 at `z = 0` and `z = a_i`.
pub fn dpsi_deta(input: &InterpolationInput) -> Result<Complex64, InterpolationError> {
    Ok(evaluate(input, &PsiOptions::default())?.1)
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// ψ through the stratum-analytic form: numerator and denominator are
/// multiplied by `|Π_s (z - c_s)|^(2N!)` over the distinct values `c_s` of
/// `a`, which turns every `σ_k((z - a)^{-1})` into the polynomial
/// `R_k(z) = Π_s (z - c_s)^k σ_k`. Nothing is snapped except `z = 0`.
pub fn psi_stratified(input: &InterpolationInput, ty: &MultiplicityType) -> Result<Complex64, InterpolationError> {
    let InterpolationInput { z, a, b, eta } = input;
    check_domain(a, b)?;
    let n = a.len();
    let mismatch = |msg: &str| InterpolationError::TypeMismatch(msg.to_string());
    if ty.len() != n {
        return Err(mismatch("type size differs from N"));
    }
    let mut seen = vec![false; n];
    for &i in ty.zero_set.iter().chain(ty.classes.iter().flatten()) {
        if i >= n || seen[i] {
            return Err(mismatch("partition is not a partition of the indices"));
        }
        seen[i] = true;
    }
    let zero = Complex64::new(0.0, 0.0);
    let scale = input.scale();
    if scale == 0.0 || *z == zero {
        return Ok(zero);
    }
    let tol = 1e-9 * scale.max(f64::MIN_POSITIVE);
    if ty.zero_set.iter().any(|&i| a[i].norm() > tol) {
        return Err(mismatch("zero class holds a nonzero entry"));
    }
    let mut groups: Vec<(Complex64, usize, Complex64)> = Vec::new();
    if ty.m0 > 0 {
        let dsum: Complex64 = ty.zero_set.iter().map(|&i| b[i] - a[i]).sum();
        groups.push((zero, ty.m0, dsum));
    }
    for class in &ty.classes {
        let rep = a[class[0]];
        if rep.norm() <= tol || class.iter().any(|&i| (a[i] - rep).norm() > tol) {
            return Err(mismatch("class entries are not equal"));
        }
        let dsum: Complex64 = class.iter().map(|&i| b[i] - a[i]).sum();
        groups.push((rep, class.len(), dsum));
    }
    for (p, g) in groups.iter().enumerate() {
        if groups[p + 1..].iter().any(|h| (h.0 - g.0).norm() <= tol) {
            return Err(mismatch("two classes share a value"));
        }
    }

    let lambda = rescale_factor(scale);
    let zs = z * lambda;
    let groups: Vec<(Complex64, usize, Complex64)> =
        groups.into_iter().map(|(c, m, ds)| (c * lambda, m, ds * lambda)).collect();
    let nf = factorial(n);
    let log_z = zs.norm().ln();
    let pi: Complex64 = groups.iter().map(|g| zs - g.0).product();
    let log_pi = if pi.norm() == 0.0 { f64::NEG_INFINITY } else { 2.0 * nf * pi.norm().ln() };

    let mut terms: Vec<(f64, Complex64, Complex64, usize)> = Vec::with_capacity(n);
    for k in 1..=n {
        // Dynamic programming over classes on the chosen count j_s.
        let mut r = vec![zero; k + 1];
        let mut t = vec![zero; k + 1];
        r[0] = Complex64::new(1.0, 0.0);
        for &(c, m, dsum) in &groups {
            let mut nr = vec![zero; k + 1];
            let mut nt = vec![zero; k + 1];
            let base = zs - c;
            for cnt in 0..=k {
                if r[cnt] == zero && t[cnt] == zero {
                    continue;
                }
                for j in 0..=m.min(k - cnt) {
                    let pw = base.powu((k - j) as u32);
                    let f = pw * binomial(m, j);
                    nr[cnt + j] += r[cnt] * f;
                    nt[cnt + j] += t[cnt] * f;
                    if j > 0 {
                        nt[cnt + j] += r[cnt] * dsum * pw * binomial(m - 1, j - 1);
                    }
                }
            }
            r = nr;
            t = nt;
        }
        let rk = r[k];
        let lr = if rk.norm() == 0.0 { f64::NEG_INFINITY } else { 2.0 * (nf / k as f64) * rk.norm().ln() + 2.0 * nf * log_z };
        terms.push((lr, rk, t[k], k));
    }
    let top = terms.iter().map(|t| t.0).fold(log_pi, f64::max);
    let pi_w = (log_pi - top).exp();
    let mut num = eta * zs * pi_w;
    let mut den = pi_w;
    for &(lr, rk, tk, k) in &terms {
        if lr == f64::NEG_INFINITY {
            continue;
        }
        let wgt = (lr - top).exp();
        den += wgt;
        num += tk / rk * (wgt / k as f64);
    }
    Ok(z + num / den / lambda)
}

#[derive(Clone, Copy, Debug)]
pub struct InverseOptions {
    pub fitted_c: f64,
    /// Residual target relative to the input scale.
    pub tol: f64,
    pub max_iter: usize,
    pub psi: PsiOptions,
}

/// Solves `ψ(z) = w` by the fixed-point iteration `z ← w - (ψ(z) - z)`,
/// which contracts with rate `C(γ + |η|)`; refuses when that rate is ≥ 1.
pub fn psi_inverse(
    w: Complex64,
    a: &[Complex64],
    b: &[Complex64],
    eta: Complex64,
    opts: &InverseOptions,
) -> Result<Complex64, InterpolationError> {
    let g = gamma(a, b)?;
    let rate = opts.fitted_c * (g + eta.norm());
    if !(rate < 1.0) {
        return Err(InterpolationError::ContractionViolated(rate));
    }
    let zero = Complex64::new(0.0, 0.0);
    let scale = input_scale(w, a, b);
    if scale == 0.0 {
        return Ok(zero);
    }
    let radius = opts.psi.snap * scale;
    if w.norm() <= radius {
        return Ok(zero);
    }
    if let Some(i) = (0..b.len()).find(|&i| (w - b[i]).norm() <= radius) {
        return Ok(a[i]);
    }
    let mut z = w;
    for _ in 0..opts.max_iter {
        let input = InterpolationInput::new(z, a.to_vec(), b.to_vec(), eta);
        let next = w - (psi_with(&input, &opts.psi)? - z);
        let step = (next - z).norm();
        z = next;
        if step <= 4.0 * f64::EPSILON * scale {
            break;
        }
    }
    let residual = (psi_with(&InterpolationInput::new(z, a.to_vec(), b.to_vec(), eta), &opts.psi)? - w).norm();
    if residual <= opts.tol * scale {
        Ok(z)
    } else {
        Err(InterpolationError::NonConvergence(residual / scale))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub gamma: f64,
    pub eta_abs: f64,
    pub empirical_lipschitz: f64,
    pub empirical_colipschitz: f64,
    pub fitted_c: f64,
    pub bound_satisfied: bool,
    /// `max(Lip - 1, 1 - coLip) / (γ + |η|)` for this configuration; the
    /// quantity whose maximum over sweeps estimates `C(N)`.
    pub regression_c: f64,
}

/// Extreme difference quotients of ψ over `samples` pairs. A third of the
/// pairs are uniform in a disk covering `0` and the `a_i`; the rest sit near
/// the `a_i` (alternately straddling them), where the derivative bounds are
/// tight. Pair `p` draws from its own random stream, so the report does not
/// depend on the thread count.
pub fn lipschitz_probe(
    a: &[Complex64],
    b: &[Complex64],
    eta: Complex64,
    samples: usize,
    seed: u64,
    fitted_c: f64,
) -> Result<LipschitzReport, InterpolationError> {
    use rand::Rng;
    let g = gamma(a, b)?;
    let (a, b) = canonical_pairs(a, b);
    let n = a.len();
    let radius = 1.5 * a.iter().chain(&b).map(|x| x.norm()).fold(0.0, f64::max);
    let radius = if radius > 0.0 { radius } else { 1.0 };
    let opts = PsiOptions::default();
    let quotients: Vec<Option<f64>> = (0..samples.max(2) as u64)
        .into_par_iter()
        .map(|p| {
            let mut r = rng::stream(seed, p);
            let polar = |r: &mut rng::Rng, rad: f64| Complex64::from_polar(rad, r.gen_range(0.0..std::f64::consts::TAU));
            let (z1, z2) = match p % 3 {
                0 => {
                    let rad = radius * r.gen::<f64>().sqrt();
                    let z1 = polar(&mut r, rad);
                    let h = radius * 10f64.powf(-r.gen_range(0.0..6.0));
                    (z1, z1 + polar(&mut r, h))
                }
                mode => {
                    let center = a[(p as usize / 3) % n];
                    let dist = radius * 10f64.powf(-r.gen_range(1.0..6.0));
                    let z1 = center + polar(&mut r, dist);
                    let z2 = if mode == 1 {
                        let h = (dist * 10f64.powf(-r.gen_range(0.0..1.5))).max(1e-7 * radius);
                        z1 + polar(&mut r, h)
                    } else {
                        center - (z1 - center) * r.gen_range(0.1..1.0)
                    };
                    (z1, z2)
                }
            };
            let e1 = psi_with(&InterpolationInput::new(z1, a.clone(), b.clone(), eta), &opts).ok()?;
            let e2 = psi_with(&InterpolationInput::new(z2, a.clone(), b.clone(), eta), &opts).ok()?;
            let dz = (z1 - z2).norm();
            (dz > 0.0).then(|| (e1 - e2).norm() / dz)
        })
        .collect();
    let mut lip: f64 = 0.0;
    let mut colip = f64::INFINITY;
    for q in quotients.into_iter().flatten() {
        lip = lip.max(q);
        colip = colip.min(q);
    }
    let spread = g + eta.norm();
    let bound = fitted_c * spread;
    let upper_ok = lip <= 1.0 + bound;
    let lower_ok = bound > 0.5 || colip >= 1.0 - bound - 1e-6;
    let regression_c = if spread > 0.0 { (lip - 1.0).max(1.0 - colip).max(0.0) / spread } else { 0.0 };
    Ok(LipschitzReport {
        gamma: g,
        eta_abs: eta.norm(),
        empirical_lipschitz: lip,
        empirical_colipschitz: colip,
        fitted_c,
        bound_satisfied: upper_ok && lower_ok,
        regression_c,
    })
}

/// A random point of the domain: `a` has `n` entries in the unit disk with
/// random coincidences (and a zero entry first when `with_zero`), `b = a + D`
/// with `D` constant on coincident entries, zero on zero entries, and scaled
/// so that `γ = spread`; `|η|` is uniform in `[0, spread]`.
pub fn random_domain_point(r: &mut rng::Rng, n: usize, spread: f64, with_zero: bool) -> (Vec<Complex64>, Vec<Complex64>, Complex64) {
    use rand::Rng;
    let disk = |r: &mut rng::Rng| Complex64::from_polar(r.gen::<f64>().sqrt(), r.gen_range(0.0..std::f64::consts::TAU));
    let mut values: Vec<Complex64> = Vec::new();
    let mut a = Vec::with_capacity(n);
    for i in 0..n {
        if i == 0 && with_zero {
            values.push(Complex64::new(0.0, 0.0));
            a.push(values[0]);
        } else if i > 0 && r.gen_bool(0.3) {
            a.push(values[r.gen_range(0..values.len())]);
        } else {
            let v = disk(r);
            values.push(v);
            a.push(v);
        }
    }
    let shift: Vec<Complex64> = values.iter().map(|v| if *v == Complex64::new(0.0, 0.0) { *v } else { disk(r) }).collect();
    let d: Vec<Complex64> = a.iter().map(|x| shift[values.iter().position(|v| v == x).expect("value recorded")]).collect();
    let g = gamma(&a, &a.iter().zip(&d).map(|(x, y)| x + y).collect::<Vec<_>>()).expect("domain holds by construction");
    let factor = if g > 0.0 { spread / g } else { 0.0 };
    let b = a.iter().zip(&d).map(|(x, y)| x + y * factor).collect();
    let eta = Complex64::from_polar(spread * r.gen::<f64>(), r.gen_range(0.0..std::f64::consts::TAU));
    (a, b, eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetric::multiplicity_type;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn r(x: f64) -> Complex64 {
        c(x, 0.0)
    }

    fn closed_form_n1(z: Complex64, a: Complex64, b: Complex64, eta: Complex64) -> Complex64 {
        let num = (b - a) * z.norm_sqr() + eta * z * (z - a).norm_sqr();
        z + num / (z.norm_sqr() + (z - a).norm_sqr())
    }

    #[test]
    fn gamma_examples() {
        assert!((gamma(&[r(0.0), r(1.0)], &[r(0.0), r(1.1)]).unwrap() - 0.1).abs() < 1e-12);
        assert_eq!(gamma(&[r(1.0), r(2.0)], &[r(1.0), r(2.0)]).unwrap(), 0.0);
        assert_eq!(gamma(&[r(3.0)], &[r(4.0)]).unwrap(), 0.0);
        assert!(matches!(gamma(&[r(0.0)], &[r(1.0)]), Err(InterpolationError::ZeroViolated(0))));
        assert!(matches!(
            gamma(&[r(1.0), r(1.0)], &[r(1.0), r(2.0)]),
            Err(InterpolationError::MergeViolated { .. })
        ));
    }

    #[test]
    fn psi_examples() {
        let inp = InterpolationInput::new(r(1.0), vec![r(1.0), r(3.0)], vec![r(1.5), r(2.0)], c(0.3, 0.1));
        assert_eq!(psi(&inp).unwrap(), r(1.5));
        let inp = InterpolationInput::new(c(0.7, -0.2), vec![r(1.0), r(3.0)], vec![r(1.0), r(3.0)], r(0.0));
        assert_eq!(psi(&inp).unwrap(), c(0.7, -0.2));
        let inp = InterpolationInput::new(r(2.0), vec![r(1.0)], vec![r(2.0)], r(0.0));
        assert!((psi(&inp).unwrap() - r(2.8)).norm() < 1e-14);
        let inp = InterpolationInput::new(r(0.0), vec![r(1.0)], vec![r(2.0)], r(0.5));
        assert_eq!(psi(&inp).unwrap(), r(0.0));
    }

    #[test]
    fn n1_closed_form() {
        for &(z, a, b, eta) in &[
            (c(0.3, 0.4), c(1.0, 0.0), c(1.2, 0.1), c(0.05, -0.02)),
            (c(-2.0, 1.0), c(0.5, 0.5), c(0.4, 0.7), c(0.0, 0.1)),
            (c(1e-3, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(0.2, 0.0)),
        ] {
            let got = psi(&InterpolationInput::new(z, vec![a], vec![b], eta)).unwrap();
            assert!((got - closed_form_n1(z, a, b, eta)).norm() < 1e-12);
        }
    }

    #[test]
    fn dpsi_examples() {
        let d = dpsi_deta(&InterpolationInput::new(r(1.0), vec![r(2.0)], vec![r(2.0)], r(0.0))).unwrap();
        assert!((d - r(0.5)).norm() < 1e-15);
        assert_eq!(dpsi_deta(&InterpolationInput::new(r(0.0), vec![r(2.0)], vec![r(2.5)], r(0.1))).unwrap(), r(0.0));
        assert_eq!(dpsi_deta(&InterpolationInput::new(r(2.0), vec![r(2.0)], vec![r(2.5)], r(0.1))).unwrap(), r(0.0));
    }

    #[test]
    fn stratified_matches_stable_form() {
        let a = vec![r(0.0), c(1.0, 1.0), c(1.0, 1.0), r(-2.0)];
        let b = vec![r(0.0), c(1.1, 0.9), c(1.1, 0.9), r(-2.1)];
        let ty = multiplicity_type(&a, 1e-9).unwrap();
        for &z in &[c(0.3, 0.2), c(1.0, 1.0), c(-2.0, 0.0), c(5.0, -3.0), c(1.0, 1.0001)] {
            let inp = InterpolationInput::new(z, a.clone(), b.clone(), c(0.01, 0.02));
            let p = psi(&inp).unwrap();
            let q = psi_stratified(&inp, &ty).unwrap();
            assert!((p - q).norm() <= 1e-9 * inp.scale(), "{z}: {p} vs {q}");
        }
        let bad = multiplicity_type(&[r(1.0), r(2.0), r(3.0), r(4.0)], 1e-9).unwrap();
        let inp = InterpolationInput::new(r(0.5), a, b, r(0.0));
        assert!(psi_stratified(&inp, &bad).is_err());
    }

    #[test]
    fn inverse_examples() {
        let a = vec![r(0.0), r(1.0), c(0.0, 2.0)];
        let b = vec![r(0.0), r(1.01), c(0.01, 2.0)];
        let eta = c(0.001, 0.0);
        let opts = InverseOptions { fitted_c: 4.0, tol: 1e-9, max_iter: 500, psi: PsiOptions::default() };
        let z = c(0.4, 0.9);
        let w = psi(&InterpolationInput::new(z, a.clone(), b.clone(), eta)).unwrap();
        let back = psi_inverse(w, &a, &b, eta, &opts).unwrap();
        assert!((back - z).norm() < 1e-9);
        assert_eq!(psi_inverse(b[1], &a, &b, eta, &opts).unwrap(), a[1]);
        let strict = InverseOptions { fitted_c: 1e6, ..opts };
        assert!(matches!(psi_inverse(w, &a, &b, eta, &strict), Err(InterpolationError::ContractionViolated(_))));
    }

    #[test]
    fn probe_identity_and_permutation() {
        let a = vec![r(0.0), r(1.0), c(-0.5, 0.7)];
        let rep = lipschitz_probe(&a, &a, r(0.0), 300, 5, 4.0).unwrap();
        assert_eq!(rep.empirical_lipschitz, 1.0);
        assert_eq!(rep.empirical_colipschitz, 1.0);
        let b = vec![r(0.0), r(1.02), c(-0.49, 0.7)];
        let rep1 = lipschitz_probe(&a, &b, c(0.01, 0.0), 300, 5, 4.0).unwrap();
        let pa = vec![a[2], a[0], a[1]];
        let pb = vec![b[2], b[0], b[1]];
        let rep2 = lipschitz_probe(&pa, &pb, c(0.01, 0.0), 300, 5, 4.0).unwrap();
        assert_eq!(rep1, rep2);
    }
}
