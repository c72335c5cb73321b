//! Elementary symmetric functions, the kernel functions `f_j` and `f`,
//! generalized discriminants and multiplicity types of root vectors.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymmetricError {
    #[error("ambiguous clustering: pair ({i}, {j}) at distance {distance:e} is within the tolerance band around {threshold:e}")]
    Ambiguous { i: usize, j: usize, distance: f64, threshold: f64 },
    #[error("empty root vector")]
    Empty,
    #[error("log-domain range exceeded")]
    Overflow,
}

/// Arithmetic needed by the generic symmetric-function routines; implemented
/// for floating complex numbers and exact Gaussian rationals.
pub trait Field: Clone + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {}

impl<T: Clone + Zero + One + Add<Output = T> + Sub<Output = T> + Mul<Output = T>> Field for T {}

/// `σ_1, ..., σ_N` from the coefficients of `∏ (u + ξ_i)`.
pub fn elementary_symmetric<T: Field>(xi: &[T]) -> Vec<T> {
    let n = xi.len();
    // e[k] = σ_k of the entries seen so far; e[0] = 1.
    let mut e = vec![T::zero(); n + 1];
    e[0] = T::one();
    for (count, x) in xi.iter().enumerate() {
        for k in (1..=count + 1).rev() {
            e[k] = e[k].clone() + e[k - 1].clone() * x.clone();
        }
    }
    e.remove(0);
    e
}

/// `e^{(j)}_0, ..., e^{(j)}_{N-1}`: elementary symmetric functions of the
/// vector with entry `j` removed, starting at the constant 1.
pub fn elementary_symmetric_without<T: Field>(xi: &[T], j: usize) -> Vec<T> {
    let rest: Vec<T> = xi.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, x)| x.clone()).collect();
    let mut e = vec![T::one()];
    e.extend(elementary_symmetric(&rest));
    e
}

/// A complex number stored as `exp(log_mag) · phase`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogComplex {
    pub log_mag: f64,
    pub phase: Complex64,
}

impl LogComplex {
    pub fn zero() -> Self {
        Self { log_mag: f64::NEG_INFINITY, phase: Complex64::new(0.0, 0.0) }
    }

    pub fn from_complex(z: Complex64) -> Self {
        let r = z.norm();
        if r == 0.0 {
            Self::zero()
        } else {
            Self { log_mag: r.ln(), phase: z / r }
        }
    }

    pub fn from_positive(log_mag: f64) -> Self {
        Self { log_mag, phase: Complex64::new(1.0, 0.0) }
    }

    pub fn is_zero(&self) -> bool {
        self.log_mag == f64::NEG_INFINITY
    }

    pub fn mul(&self, other: &LogComplex) -> LogComplex {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Self { log_mag: self.log_mag + other.log_mag, phase: self.phase * other.phase }
    }

    /// `self · exp(shift)`.
    pub fn scale_log(&self, shift: f64) -> LogComplex {
        if self.is_zero() {
            return *self;
        }
        Self { log_mag: self.log_mag + shift, phase: self.phase }
    }

    /// Value as an ordinary complex number; may overflow to infinity.
    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        self.phase * self.log_mag.exp()
    }

    /// `Σ terms` without leaving the log domain.
    pub fn sum(terms: &[LogComplex]) -> LogComplex {
        let top = terms.iter().filter(|t| !t.is_zero()).map(|t| t.log_mag).fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return Self::zero();
        }
        let s: Complex64 = terms.iter().filter(|t| !t.is_zero()).map(|t| t.phase * (t.log_mag - top).exp()).sum();
        Self::from_complex(s).scale_log(top)
    }
}

/// The values `f_1, ..., f_N` and `f = Σ f_j`, in log representation.
#[derive(Clone, Debug)]
pub struct FComponents {
    pub f_values: Vec<LogComplex>,
    /// Natural log of the real, nonnegative `f`.
    pub log_f_total: f64,
}

impl FComponents {
    pub fn f_total(&self) -> f64 {
        self.log_f_total.exp()
    }
}

/// `N!` as a float; exact for every `N` where the construction is usable.
pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `f_j = Σ_k (1/k) |σ_k|^(2 N!/k) ξ_j e^{(j)}_{k-1} / σ_k` and
/// `f = Σ_k |σ_k|^(2 N!/k)`; terms with `σ_k = 0` vanish.
pub fn f_components(xi: &[Complex64]) -> Result<FComponents, SymmetricError> {
    let n = xi.len();
    if n == 0 {
        return Err(SymmetricError::Empty);
    }
    let nf = factorial(n);
    let sigma = elementary_symmetric(xi);
    let mut weights = Vec::with_capacity(n);
    for (k0, s) in sigma.iter().enumerate() {
        let k = k0 + 1;
        let alpha = nf / k as f64;
        let r = s.norm();
        let lw = if r == 0.0 { f64::NEG_INFINITY } else { 2.0 * alpha * r.ln() };
        if lw.is_nan() || lw == f64::INFINITY {
            return Err(SymmetricError::Overflow);
        }
        weights.push(lw);
    }
    let total = LogComplex::sum(&weights.iter().map(|&w| LogComplex::from_positive(w)).collect::<Vec<_>>());
    let mut f_values = Vec::with_capacity(n);
    for j in 0..n {
        let e = elementary_symmetric_without(xi, j);
        let mut terms = Vec::with_capacity(n);
        for k in 1..=n {
            if weights[k - 1] == f64::NEG_INFINITY {
                continue;
            }
            let ratio = xi[j] * e[k - 1] / sigma[k - 1] / k as f64;
            terms.push(LogComplex::from_complex(ratio).scale_log(weights[k - 1]));
        }
        f_values.push(LogComplex::sum(&terms));
    }
    Ok(FComponents { f_values, log_f_total: total.log_mag })
}

/// `D_j = Σ_{|S| = j} ∏_{i < i' in S} (a_i - a_{i'})²` for `j = 1..N`.
/// `D_1 = N`; the last nonzero index is the number of distinct values.
pub fn generalized_discriminants<T: Field>(a: &[T]) -> Vec<T> {
    let n = a.len();
    let mut d = vec![T::zero(); n];
    if n == 0 {
        return d;
    }
    let sq: Vec<Vec<T>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let diff = a[i].clone() - a[j].clone();
                    diff.clone() * diff
                })
                .collect()
        })
        .collect();
    let mut prod: Vec<T> = vec![T::one(); 1 << n];
    for mask in 1usize..(1 << n) {
        let top = usize::BITS as usize - 1 - mask.leading_zeros() as usize;
        let rest = mask & !(1 << top);
        let mut p = prod[rest].clone();
        let mut bits = rest;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            p = p * sq[top][i].clone();
            bits &= bits - 1;
        }
        let size = mask.count_ones() as usize;
        d[size - 1] = d[size - 1].clone() + p.clone();
        prod[mask] = p;
    }
    d
}

/// Type of a root vector: indices of zero entries, and the classes of equal
/// nonzero entries ordered by size (ties by smallest index). Indices are
/// 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicityType {
    pub m0: usize,
    pub parts: Vec<usize>,
    pub zero_set: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
}

impl MultiplicityType {
    pub fn k(&self) -> usize {
        self.classes.len()
    }

    pub fn len(&self) -> usize {
        self.m0 + self.parts.iter().sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of distinct values, counting 0 if present.
    pub fn distinct_count(&self) -> usize {
        self.k() + usize::from(self.m0 > 0)
    }

    /// Same partition up to the ordering of equally sized classes.
    pub fn same_partition(&self, other: &MultiplicityType) -> bool {
        let canon = |t: &MultiplicityType| {
            let mut c = t.classes.clone();
            c.sort();
            (t.zero_set.clone(), c)
        };
        canon(self) == canon(other)
    }

    fn build(zero_set: Vec<usize>, mut classes: Vec<Vec<usize>>) -> Self {
        for c in classes.iter_mut() {
            c.sort_unstable();
        }
        classes.sort_by(|x, y| x.len().cmp(&y.len()).then(x[0].cmp(&y[0])));
        Self { m0: zero_set.len(), parts: classes.iter().map(Vec::len).collect(), zero_set, classes }
    }
}

/// Classes of `a` under `|a_i - a_j| ≤ tol · (1 + max|a|)`, with zero
/// entries (`|a_i| ≤ tol · scale`) split off. A pair at distance within the
/// band `(threshold, 10 · threshold]`, or a class that only holds together by
/// chaining, makes the answer ambiguous and is reported as an error.
pub fn multiplicity_type(a: &[Complex64], tol: f64) -> Result<MultiplicityType, SymmetricError> {
    let n = a.len();
    if n == 0 {
        return Err(SymmetricError::Empty);
    }
    let scale = 1.0 + a.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let thr = tol * scale;
    let ambiguous = |dist: f64| tol > 0.0 && dist > thr && dist <= 10.0 * thr;
    let zero_set: Vec<usize> = (0..n).filter(|&i| a[i].norm() <= thr).collect();
    for i in 0..n {
        if ambiguous(a[i].norm()) {
            return Err(SymmetricError::Ambiguous { i, j: i, distance: a[i].norm(), threshold: thr });
        }
    }
    let rest: Vec<usize> = (0..n).filter(|i| !zero_set.contains(i)).collect();
    let mut label: Vec<usize> = (0..n).collect();
    for (p, &i) in rest.iter().enumerate() {
        for &j in &rest[p + 1..] {
            let dist = (a[i] - a[j]).norm();
            if ambiguous(dist) {
                return Err(SymmetricError::Ambiguous { i, j, distance: dist, threshold: thr });
            }
            if dist <= thr {
                let (li, lj) = (label[i], label[j]);
                let (lo, hi) = if li < lj { (li, lj) } else { (lj, li) };
                for l in label.iter_mut() {
                    if *l == hi {
                        *l = lo;
                    }
                }
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &i in &rest {
        match classes.iter_mut().find(|c| label[c[0]] == label[i]) {
            Some(c) => c.push(i),
            None => classes.push(vec![i]),
        }
    }
    for c in &classes {
        for (p, &i) in c.iter().enumerate() {
            for &j in &c[p + 1..] {
                let dist = (a[i] - a[j]).norm();
                if dist > thr {
                    return Err(SymmetricError::Ambiguous { i, j, distance: dist, threshold: thr });
                }
            }
        }
    }
    Ok(MultiplicityType::build(zero_set, classes))
}

/// Exact type of a vector with exact entries.
pub fn multiplicity_type_exact<T: Field + PartialEq>(a: &[T]) -> MultiplicityType {
    let zero_set: Vec<usize> = (0..a.len()).filter(|&i| a[i].is_zero()).collect();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..a.len() {
        if a[i].is_zero() {
            continue;
        }
        match classes.iter_mut().find(|c| a[c[0]] == a[i]) {
            Some(c) => c.push(i),
            None => classes.push(vec![i]),
        }
    }
    MultiplicityType::build(zero_set, classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::GaussianRational;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn re(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| c(x, 0.0)).collect()
    }

    #[test]
    fn elementary_examples() {
        assert_eq!(elementary_symmetric(&re(&[1.0, 2.0, 3.0])), re(&[6.0, 11.0, 6.0]));
        assert_eq!(elementary_symmetric(&re(&[0.0, 0.0])), re(&[0.0, 0.0]));
        assert_eq!(elementary_symmetric(&[c(2.0, -1.0)]), vec![c(2.0, -1.0)]);
    }

    #[test]
    fn f_examples() {
        let w = c(1.5, -0.5);
        let f = f_components(&[w]).unwrap();
        assert!((f.f_total() - w.norm_sqr()).abs() < 1e-12);
        assert!((f.f_values[0].to_complex() - w.norm_sqr()).norm() < 1e-12);
        let f1 = f_components(&re(&[1.0, 1.0])).unwrap().log_f_total;
        let f2 = f_components(&re(&[2.0, 2.0])).unwrap().log_f_total;
        assert!((f2 - f1 - 4.0 * 2f64.ln()).abs() < 1e-12);
        assert!(f_components(&re(&[0.0, 0.0])).unwrap().f_total() == 0.0);
        assert!(f_components(&re(&[0.0, 1e-3])).unwrap().f_total() > 0.0);
    }

    #[test]
    fn f_large_n_stays_finite() {
        let xi: Vec<Complex64> = (1..=8).map(|k| c(k as f64 * 10.0, 1.0)).collect();
        let f = f_components(&xi).unwrap();
        assert!(f.log_f_total.is_finite() && f.log_f_total > 700.0);
        let sum = LogComplex::sum(&f.f_values);
        assert!((sum.log_mag - f.log_f_total).abs() < 1e-10);
    }

    #[test]
    fn discriminant_examples() {
        let g = |v: &[i64]| v.iter().map(|&x| GaussianRational::from(x)).collect::<Vec<_>>();
        let d = generalized_discriminants(&g(&[1, 1, 2]));
        assert_eq!(d, g(&[3, 2, 0]));
        let d = generalized_discriminants(&g(&[5, 5, 5]));
        assert_eq!(d, g(&[3, 0, 0]));
        let d = generalized_discriminants(&g(&[0, 1, 2]));
        assert_eq!(d[2], GaussianRational::from(4));
    }

    #[test]
    fn type_examples() {
        let t = multiplicity_type(&re(&[0.0, 3.0, 3.0, 5.0]), 1e-9).unwrap();
        assert_eq!(t.m0, 1);
        assert_eq!(t.parts, vec![1, 2]);
        assert_eq!(t.zero_set, vec![0]);
        assert_eq!(t.classes, vec![vec![3], vec![1, 2]]);
        let t = multiplicity_type(&re(&[0.0, 0.0]), 1e-9).unwrap();
        assert_eq!((t.m0, t.k()), (2, 0));
        let t = multiplicity_type(&re(&[1.0, 2.0]), 1e-9).unwrap();
        assert_eq!((t.m0, t.parts.clone()), (0, vec![1, 1]));
        assert!(matches!(
            multiplicity_type(&re(&[1.0, 1.0 + 5e-9]), 1e-9),
            Err(SymmetricError::Ambiguous { .. })
        ));
        let exact = multiplicity_type(&re(&[1.0, 1.0 + 5e-9]), 0.0).unwrap();
        assert_eq!(exact.parts, vec![1, 1]);
    }

    proptest! {
        #[test]
        fn f_homogeneity(parts in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..6), lambda in 0.3f64..3.0) {
            let xi: Vec<Complex64> = parts.iter().map(|&(x, y)| c(x, y)).collect();
            let n = xi.len();
            let f = f_components(&xi).unwrap();
            let scaled: Vec<Complex64> = xi.iter().map(|x| x * lambda).collect();
            let g = f_components(&scaled).unwrap();
            let expected = f.log_f_total + 2.0 * factorial(n) * lambda.ln();
            prop_assert!((g.log_f_total - expected).abs() <= 1e-8 * (1.0 + expected.abs()));
        }

        #[test]
        fn f_permutation_equivariance(parts in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..6), rot in 1usize..5) {
            let xi: Vec<Complex64> = parts.iter().map(|&(x, y)| c(x, y)).collect();
            let n = xi.len();
            let perm: Vec<usize> = (0..n).map(|i| (i + rot) % n).collect();
            let pxi: Vec<Complex64> = perm.iter().map(|&i| xi[i]).collect();
            let f = f_components(&xi).unwrap();
            let g = f_components(&pxi).unwrap();
            prop_assert!((f.log_f_total - g.log_f_total).abs() <= 1e-10 * (1.0 + f.log_f_total.abs()));
            for (j, &i) in perm.iter().enumerate() {
                let a = f.f_values[i].to_complex();
                let b = g.f_values[j].to_complex();
                prop_assert!((a - b).norm() <= 1e-10 * f.f_total().max(1e-300));
            }
            let sum = LogComplex::sum(&f.f_values);
            prop_assert!((sum.to_complex() - f.f_total()).norm() <= 1e-12 * f.f_total().max(1e-300));
        }
    }
}
