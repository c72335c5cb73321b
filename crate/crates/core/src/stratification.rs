//! Systems of polynomials `F_1, ..., F_n`, their completion from a single top
//! polynomial by discriminant chains, and pointwise classification for the
//! canonical stratification.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polyalg::{
    discriminant_in_var, linear_coordinate_change, make_monic, squarefree_part, ExactMatrix, GaussianRational,
    MultiPoly, NumericPoly, PolyError, UniPolyView,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StratError {
    #[error("top polynomial is identically zero")]
    ZeroTop,
    #[error("top polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("degree {degree} at level {level} exceeds the cap {cap}")]
    DegreeCap { level: usize, degree: u32, cap: u32 },
    #[error("no admissible shear found at level {0}")]
    NoShear(usize),
    #[error("point has length {got}, system has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("zero test at level {level} is ambiguous (log10 margin {margin:.3})")]
    Ambiguous { level: usize, margin: f64 },
    #[error("invalid system: {0}")]
    Invalid(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// `F_i` uses a variable beyond `x_i`.
    Variables,
    Homogeneity,
    Monicity,
    /// `d_i = 0` forces `F_j ≡ 1` for `j ≤ i`.
    Convention,
    /// `x_i = 0` is a root of `F_i`.
    ZeroRoot,
    /// The discriminant of `F_{i,red}` divides `F_{i-1}`.
    Divisibility,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    /// 1-based level.
    pub level: usize,
    pub condition: Condition,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub failures: Vec<Failure>,
}

/// A validated chain `F_1, ..., F_n`, each stored as a polynomial in all `n`
/// variables. `coordinate_change` is the matrix `M` with
/// `F_n(y) ∝ top(M y)` when the system came from [`complete_system`].
#[derive(Clone, Debug)]
pub struct PolynomialSystem {
    n: usize,
    polys: Vec<MultiPoly>,
    degrees: Vec<u32>,
    coordinate_change: ExactMatrix,
    numeric: Vec<LevelPoly>,
}

/// Double-precision coefficients of `F_i` in `x_i`, highest degree first,
/// each a polynomial in `x_1, ..., x_{i-1}`.
#[derive(Clone, Debug)]
struct LevelPoly {
    coeffs: Vec<NumericPoly>,
    full: NumericPoly,
}

impl PartialEq for PolynomialSystem {
    fn eq(&self, other: &Self) -> bool {
        self.polys == other.polys && self.coordinate_change == other.coordinate_change
    }
}

impl PolynomialSystem {
    /// Builds a system after checking it with [`validate_system`].
    pub fn new(polys: Vec<MultiPoly>) -> Result<Self, StratError> {
        let n = polys.len();
        Self::with_coordinate_change(polys, ExactMatrix::identity(n))
    }

    pub fn with_coordinate_change(polys: Vec<MultiPoly>, m: ExactMatrix) -> Result<Self, StratError> {
        let n = polys.len();
        let polys = polys.into_iter().map(|p| p.with_num_vars(n)).collect::<Result<Vec<_>, _>>()?;
        let report = validate_system(&polys);
        if !report.valid {
            let msg = report.failures.iter().map(|f| format!("level {}: {}", f.level, f.message)).collect::<Vec<_>>();
            return Err(StratError::Invalid(msg.join("; ")));
        }
        if m.size() != n {
            return Err(StratError::DimensionMismatch { expected: n, got: m.size() });
        }
        let degrees: Vec<u32> = polys.iter().enumerate().map(|(i, p)| p.degree_in(i)).collect();
        let numeric = polys
            .iter()
            .enumerate()
            .map(|(i, p)| LevelPoly {
                coeffs: p.coefficients_in(i).iter().map(MultiPoly::to_numeric).collect(),
                full: p.to_numeric(),
            })
            .collect();
        Ok(Self { n, polys, degrees, coordinate_change: m, numeric })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn polys(&self) -> &[MultiPoly] {
        &self.polys
    }

    /// `d_1, ..., d_n`.
    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn coordinate_change(&self) -> &ExactMatrix {
        &self.coordinate_change
    }

    /// `F_i` at the first `i` coordinates of `x` (level is 0-based).
    pub fn eval_level(&self, level: usize, x: &[Complex64]) -> Complex64 {
        self.numeric[level].full.eval(x)
    }

    /// Coefficients of `x_i ↦ F_i(base, x_i)`, highest first (level 0-based,
    /// `base` holds at least the first `level` coordinates).
    pub fn level_coefficients(&self, level: usize, base: &[Complex64]) -> Vec<Complex64> {
        self.numeric[level].coeffs.iter().map(|c| c.eval(base)).collect()
    }

    pub fn one_norm(&self, level: usize) -> f64 {
        self.numeric[level].full.one_norm()
    }
}

#[derive(Serialize, Deserialize)]
struct SystemJson {
    n: usize,
    polys: Vec<MultiPoly>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coordinate_change: Option<ExactMatrix>,
}

impl Serialize for PolynomialSystem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let m = (!self.coordinate_change.is_identity()).then(|| self.coordinate_change.clone());
        SystemJson { n: self.n, polys: self.polys.clone(), coordinate_change: m }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolynomialSystem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = SystemJson::deserialize(d)?;
        if j.polys.len() != j.n {
            return Err(serde::de::Error::custom(format!("expected {} polynomials, got {}", j.n, j.polys.len())));
        }
        let m = j.coordinate_change.unwrap_or_else(|| ExactMatrix::identity(j.n));
        PolynomialSystem::with_coordinate_change(j.polys, m).map_err(serde::de::Error::custom)
    }
}

/// Checks the structural conditions and the discriminant divisibility chain.
/// `polys[i]` is `F_{i+1}`; its variable count must be at least `i + 1`.
pub fn validate_system(polys: &[MultiPoly]) -> ValidationReport {
    let mut failures = Vec::new();
    let mut fail = |level: usize, condition: Condition, message: String| {
        failures.push(Failure { level, condition, message });
    };
    let n = polys.len();
    let mut structural_ok = vec![true; n];
    for (i, p) in polys.iter().enumerate() {
        let level = i + 1;
        if p.num_vars() <= i || (i + 1..p.num_vars()).any(|v| p.uses_var(v)) {
            fail(level, Condition::Variables, format!("F_{level} must only use x_1..x_{level}"));
            structural_ok[i] = false;
            continue;
        }
        if p.is_zero() || !p.is_homogeneous() {
            fail(level, Condition::Homogeneity, format!("F_{level} is not homogeneous"));
            structural_ok[i] = false;
            continue;
        }
        let d = p.degree_in(i);
        let coeffs = p.coefficients_in(i);
        if !coeffs[0].is_one() {
            fail(level, Condition::Monicity, format!("F_{level} is not monic in x_{level}"));
            structural_ok[i] = false;
            continue;
        }
        if d == 0 {
            for (j, q) in polys[..i].iter().enumerate() {
                if !q.is_one() {
                    fail(j + 1, Condition::Convention, format!("F_{} must be 1 because d_{level} = 0", j + 1));
                    structural_ok[j] = false;
                }
            }
            continue;
        }
        if !coeffs[d as usize].is_zero() {
            fail(level, Condition::ZeroRoot, format!("x_{level} = 0 is not a root of F_{level}"));
            structural_ok[i] = false;
        }
    }
    for i in 1..n {
        if !structural_ok[i] || !structural_ok[i - 1] {
            continue;
        }
        let p = &polys[i];
        if p.degree_in(i) <= 1 {
            continue;
        }
        let level = i + 1;
        let disc = match squarefree_part(&UniPolyView::new(p.clone(), i)).and_then(|r| discriminant_in_var(&r)) {
            Ok(d) => d,
            Err(e) => {
                fail(level, Condition::Divisibility, format!("discriminant of F_{level},red failed: {e}"));
                continue;
            }
        };
        let below = match polys[i - 1].with_num_vars(disc.num_vars()) {
            Ok(q) => q,
            Err(e) => {
                fail(level, Condition::Divisibility, e.to_string());
                continue;
            }
        };
        if below.exact_div(&disc).is_none() {
            fail(
                level,
                Condition::Divisibility,
                format!("discriminant of F_{level},red does not divide F_{}", level - 1),
            );
        }
    }
    failures.sort_by_key(|f| f.level);
    ValidationReport { valid: failures.is_empty(), failures }
}

/// Small integer vectors in order of increasing max-norm, then
/// lexicographically on the sequence `0, 1, -1, 2, -2, ...`.
fn shear_candidates(len: usize, max_norm: i64) -> Vec<Vec<i64>> {
    let order = |k: i64| -> Vec<i64> {
        let mut v = vec![0];
        for j in 1..=k {
            v.push(j);
            v.push(-j);
        }
        v
    };
    let mut out: Vec<Vec<i64>> = Vec::new();
    for norm in 0..=max_norm {
        let vals = order(norm);
        let mut idx = vec![0usize; len];
        loop {
            let v: Vec<i64> = idx.iter().map(|&i| vals[i]).collect();
            if v.iter().map(|x| x.abs()).max().unwrap_or(0) == norm {
                out.push(v);
            }
            let mut p = 0;
            while p < len {
                idx[p] += 1;
                if idx[p] < vals.len() {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
            if p == len {
                break;
            }
        }
    }
    out
}

/// Shear `x_j ↦ x_j + c_j x_level` for `j < level`, as a matrix.
fn shear_matrix(n: usize, level: usize, c: &[i64]) -> ExactMatrix {
    let mut m = ExactMatrix::identity(n);
    for (j, &cj) in c.iter().enumerate() {
        m.set(j, level, GaussianRational::from(cj));
    }
    m
}

/// Completes `top` (homogeneous in `n` variables) to a system whose last
/// polynomial is `top` in sheared coordinates, made monic and multiplied by
/// `x_n` when `x_n = 0` is not already a root. Each lower level is
/// `x_{i-1}^e · disc(F_{i,red})`, normalized the same way.
pub fn complete_system(top: &MultiPoly, n: usize, degree_cap: u32) -> Result<PolynomialSystem, StratError> {
    let top = top.with_num_vars(n)?;
    if top.is_zero() {
        return Err(StratError::ZeroTop);
    }
    if !top.is_homogeneous() {
        return Err(StratError::NotHomogeneous);
    }
    let mut polys: Vec<MultiPoly> = vec![MultiPoly::one(n); n];
    let mut total = ExactMatrix::identity(n);
    let mut current = top;
    for level in (0..n).rev() {
        if current.is_constant() {
            // Every remaining level is ≡ 1.
            break;
        }
        let deg = current.total_degree().unwrap_or(0);
        if deg > degree_cap {
            return Err(StratError::DegreeCap { level: level + 1, degree: deg, cap: degree_cap });
        }
        if current.degree_in(level) != deg {
            let mut chosen = None;
            for c in shear_candidates(level, 3) {
                let m = shear_matrix(n, level, &c);
                let moved = linear_coordinate_change(&current, &m)?;
                if moved.degree_in(level) == deg {
                    chosen = Some((m, moved));
                    break;
                }
            }
            let (m, moved) = chosen.ok_or(StratError::NoShear(level + 1))?;
            for p in polys.iter_mut().skip(level + 1) {
                *p = linear_coordinate_change(p, &m)?;
            }
            total = total.mul(&m);
            current = moved;
        }
        let mut f = make_monic(&current, level)?;
        let coeffs = f.coefficients_in(level);
        if !coeffs[coeffs.len() - 1].is_zero() {
            f = &f * &MultiPoly::var(n, level);
        }
        polys[level] = f.clone();
        if level == 0 {
            break;
        }
        let red = squarefree_part(&UniPolyView::new(f, level))?;
        let disc = if red.degree() <= 1 { MultiPoly::one(n) } else { discriminant_in_var(&red)? };
        // A constant discriminant still gets the factor x_{level-1}, so every
        // level carries at least the root x_{level-1} = 0.
        current = if disc.is_constant() { MultiPoly::var(n, level - 1) } else { disc };
    }
    PolynomialSystem::with_coordinate_change(polys, total)
}

/// Surrogate stratum label: filtration depth and per-level vanishing flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumLabel {
    pub depth: usize,
    /// `true` where `F_i(x_1, ..., x_i) = 0`.
    pub pattern: Vec<bool>,
    /// `log10(ratio / tol)` of the zero test per level, clamped to ±300;
    /// negative means zero.
    pub margins: Vec<f64>,
}

impl StratumLabel {
    /// Equality of depth and pattern (margins ignored).
    pub fn same_stratum(&self, other: &StratumLabel) -> bool {
        self.depth == other.depth && self.pattern == other.pattern
    }
}

/// Zero tests `|F_i(x)| ≤ tol · ‖F_i‖_1 · ‖x_{≤i}‖_∞^{d_i}`; ratios that fall
/// within a factor `1e3` above the threshold are reported as ambiguous.
pub fn stratum_label(x: &[Complex64], system: &PolynomialSystem, tol: f64) -> Result<StratumLabel, StratError> {
    let n = system.n();
    if x.len() != n {
        return Err(StratError::DimensionMismatch { expected: n, got: x.len() });
    }
    let mut pattern = Vec::with_capacity(n);
    let mut margins = Vec::with_capacity(n);
    let mut norm: f64 = 0.0;
    for i in 0..n {
        norm = norm.max(x[i].norm());
        let d = system.degrees()[i];
        let value = system.eval_level(i, x).norm();
        let scale = system.one_norm(i) * norm.powi(d as i32);
        let ratio = if scale > 0.0 { value / scale } else { 0.0 };
        let margin = if tol > 0.0 { (ratio / tol).log10().clamp(-300.0, 300.0) } else if ratio == 0.0 { -300.0 } else { 300.0 };
        if tol > 0.0 && ratio > tol && ratio <= 1e3 * tol {
            return Err(StratError::Ambiguous { level: i + 1, margin });
        }
        pattern.push(ratio <= tol);
        margins.push(margin);
    }
    // Unfolding the filtration recursion: each level off the zero set of
    // F_i raises the depth by one.
    let depth = pattern.iter().filter(|&&z| !z).count();
    Ok(StratumLabel { depth, pattern, margins })
}

pub fn filtration_depth(x: &[Complex64], system: &PolynomialSystem, tol: f64) -> Result<usize, StratError> {
    Ok(stratum_label(x, system, tol)?.depth)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn sample_system() -> PolynomialSystem {
        let f1 = MultiPoly::from_int_terms(2, &[(&[2, 0], 1)]);
        let f2 = MultiPoly::from_int_terms(2, &[(&[0, 2], 1), (&[1, 1], -1)]);
        PolynomialSystem::new(vec![f1, f2]).unwrap()
    }

    #[test]
    fn validation_examples() {
        let f1 = MultiPoly::from_int_terms(2, &[(&[2, 0], 1)]);
        let f2 = MultiPoly::from_int_terms(2, &[(&[0, 2], 1), (&[1, 1], -1)]);
        assert!(validate_system(&[f1.clone(), f2.clone()]).valid);
        let bad = MultiPoly::from_int_terms(2, &[(&[0, 2], 1), (&[2, 0], 1)]);
        let r = validate_system(&[f1, bad]);
        assert!(!r.valid);
        assert_eq!(r.failures[0].condition, Condition::ZeroRoot);
        let g1 = MultiPoly::from_int_terms(2, &[(&[1, 0], 1)]);
        let r = validate_system(&[g1, f2]);
        assert!(!r.valid);
        assert_eq!(r.failures[0].condition, Condition::Divisibility);
    }

    #[test]
    fn completion_examples() {
        let top = MultiPoly::from_int_terms(2, &[(&[0, 2], 1), (&[1, 1], -1)]);
        let s = complete_system(&top, 2, 64).unwrap();
        assert_eq!(s.polys()[0], MultiPoly::from_int_terms(2, &[(&[2, 0], 1)]));
        assert_eq!(s.polys()[1], top);
        assert!(s.coordinate_change().is_identity());

        let s = complete_system(&MultiPoly::one(3), 3, 64).unwrap();
        assert!(s.polys().iter().all(MultiPoly::is_one));

        // x3 (x3 - x1)(x3 - x2)
        let top = MultiPoly::from_int_terms(3, &[(&[0, 0, 3], 1), (&[1, 0, 2], -1), (&[0, 1, 2], -1), (&[1, 1, 1], 1)]);
        let s = complete_system(&top, 3, 64).unwrap();
        assert!(validate_system(s.polys()).valid);
        assert_eq!(s.polys()[2], linear_coordinate_change(&top, s.coordinate_change()).unwrap());
    }

    #[test]
    fn completion_shears_when_not_monic() {
        // x1 x2: not monic in x2
        let top = MultiPoly::from_int_terms(2, &[(&[1, 1], 1)]);
        let s = complete_system(&top, 2, 64).unwrap();
        assert!(!s.coordinate_change().is_identity());
        assert!(validate_system(s.polys()).valid);
    }

    #[test]
    fn depth_examples() {
        let s = sample_system();
        assert_eq!(filtration_depth(&[c(1.0), c(0.0)], &s, 1e-9).unwrap(), 1);
        assert_eq!(filtration_depth(&[c(1.0), c(2.0)], &s, 1e-9).unwrap(), 2);
        assert_eq!(filtration_depth(&[c(0.0), c(0.0)], &s, 1e-9).unwrap(), 0);
        let l = stratum_label(&[c(1.0), c(0.0)], &s, 1e-9).unwrap();
        assert_eq!(l.pattern, vec![false, true]);
        let l = stratum_label(&[c(0.0), c(0.0)], &s, 1e-9).unwrap();
        assert_eq!(l.pattern, vec![true, true]);
        assert!(matches!(stratum_label(&[c(1.0), c(1e-8)], &s, 1e-9), Err(StratError::Ambiguous { level: 2, .. })));
    }

    #[test]
    fn depth_is_scale_invariant() {
        let s = sample_system();
        for &(x1, x2) in &[(1.0, 0.0), (1.0, 1.0), (0.3, -2.0), (0.0, 0.0)] {
            let base = stratum_label(&[c(x1), c(x2)], &s, 1e-9).unwrap();
            for &lam in &[1e-6, 1e-3, 7.5, 1e5] {
                let l = stratum_label(&[c(x1 * lam), c(x2 * lam)], &s, 1e-9).unwrap();
                assert!(l.same_stratum(&base));
            }
        }
    }
}
