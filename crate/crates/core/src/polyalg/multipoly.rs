//! Sparse multivariate polynomials with exact Gaussian-rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::gaussian::{format_rational, parse_rational, GaussianRational};
use super::PolyError;

pub type Exponent = Vec<u32>;

/// A polynomial in `num_vars` variables. Terms are keyed by exponent vector;
/// the map order is lexicographic with `x1` most significant, which is the
/// monomial order used by [`MultiPoly::exact_div`].
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    num_vars: usize,
    terms: BTreeMap<Exponent, GaussianRational>,
}

impl MultiPoly {
    pub fn zero(num_vars: usize) -> Self {
        Self { num_vars, terms: BTreeMap::new() }
    }

    pub fn one(num_vars: usize) -> Self {
        Self::constant(num_vars, GaussianRational::one())
    }

    pub fn constant(num_vars: usize, c: GaussianRational) -> Self {
        Self::monomial(num_vars, vec![0; num_vars], c)
    }

    /// The coordinate function `x_{index+1}` (zero-based index).
    pub fn var(num_vars: usize, index: usize) -> Self {
        let mut e = vec![0; num_vars];
        e[index] = 1;
        Self::monomial(num_vars, e, GaussianRational::one())
    }

    pub fn monomial(num_vars: usize, exp: Exponent, c: GaussianRational) -> Self {
        assert_eq!(exp.len(), num_vars, "exponent length must equal num_vars");
        let mut p = Self::zero(num_vars);
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    /// Builds from `(exponent, coefficient)` pairs, summing duplicates.
    pub fn from_terms<I>(num_vars: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Exponent, GaussianRational)>,
    {
        let mut p = Self::zero(num_vars);
        for (e, c) in terms {
            if e.len() != num_vars {
                return Err(PolyError::DimensionMismatch { expected: num_vars, got: e.len() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Convenience constructor from small integer coefficients.
    pub fn from_int_terms(num_vars: usize, terms: &[(&[u32], i64)]) -> Self {
        Self::from_terms(num_vars, terms.iter().map(|(e, c)| (e.to_vec(), GaussianRational::from(*c))))
            .expect("exponent length")
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, exp: &[u32]) -> GaussianRational {
        self.terms.get(exp).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn add_term(&mut self, exp: Exponent, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.is_constant() && self.terms.values().next().unwrap().is_one()
    }

    pub fn constant_value(&self) -> Option<GaussianRational> {
        if self.is_constant() {
            Some(self.coefficient(&vec![0; self.num_vars]))
        } else {
            None
        }
    }

    pub fn has_real_coefficients(&self) -> bool {
        self.terms.values().all(GaussianRational::is_real)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var] > 0)
    }

    /// Homogeneous means every term has the same total degree. The zero
    /// polynomial counts as homogeneous.
    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|k| k == d),
        }
    }

    /// Lex-largest term.
    pub fn leading_term(&self) -> Option<(&Exponent, &GaussianRational)> {
        self.terms.iter().next_back()
    }

    /// Sum of coefficient magnitudes, as a double.
    pub fn one_norm(&self) -> f64 {
        self.terms.values().map(|c| c.to_complex().norm()).sum()
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.num_vars);
        }
        Self {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, exp: &[u32], c: &GaussianRational) -> Self {
        let mut out = Self::zero(self.num_vars);
        for (e, k) in &self.terms {
            let ne: Exponent = e.iter().zip(exp).map(|(a, b)| a + b).collect();
            out.add_term(ne, k * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one(self.num_vars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.num_vars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[var] -= 1;
            out.add_term(ne, c * &GaussianRational::from(e[var] as i64));
        }
        out
    }

    /// Evaluates at a complex point in double precision. Each monomial is
    /// formed exactly from powers of the coordinates; the terms are summed
    /// with Neumaier compensation on the real and imaginary parts.
    pub fn eval(&self, point: &[Complex64]) -> Result<Complex64, PolyError> {
        if point.len() != self.num_vars {
            return Err(PolyError::DimensionMismatch { expected: self.num_vars, got: point.len() });
        }
        let mut re = Neumaier::default();
        let mut im = Neumaier::default();
        for (e, c) in &self.terms {
            let mut m = c.to_complex();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    m *= x.powu(k);
                }
            }
            re.add(m.re);
            im.add(m.im);
        }
        Ok(Complex64::new(re.total(), im.total()))
    }

    /// Real evaluation using the real parts of the coefficients.
    pub fn eval_real(&self, point: &[f64]) -> Result<f64, PolyError> {
        if point.len() != self.num_vars {
            return Err(PolyError::DimensionMismatch { expected: self.num_vars, got: point.len() });
        }
        let mut acc = Neumaier::default();
        for (e, c) in &self.terms {
            let mut m = c.to_complex().re;
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    m *= x.powi(k as i32);
                }
            }
            acc.add(m);
        }
        Ok(acc.total())
    }

    /// Coefficients with respect to `var`, highest degree first. Each
    /// coefficient keeps the full variable set (it simply does not use `var`).
    pub fn coefficients_in(&self, var: usize) -> Vec<MultiPoly> {
        let deg = self.degree_in(var) as usize;
        let mut coeffs = vec![Self::zero(self.num_vars); deg + 1];
        for (e, c) in &self.terms {
            let k = e[var] as usize;
            let mut ne = e.clone();
            ne[var] = 0;
            coeffs[deg - k].add_term(ne, c.clone());
        }
        coeffs
    }

    /// Inverse of [`coefficients_in`](Self::coefficients_in).
    pub fn from_coefficients_in(num_vars: usize, var: usize, coeffs: &[MultiPoly]) -> Self {
        let deg = coeffs.len().saturating_sub(1);
        let mut out = Self::zero(num_vars);
        for (i, c) in coeffs.iter().enumerate() {
            let k = (deg - i) as u32;
            for (e, v) in &c.terms {
                let mut ne = e.clone();
                ne[var] += k;
                out.add_term(ne, v.clone());
            }
        }
        out
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder (or the divisor is zero).
    pub fn exact_div(&self, divisor: &MultiPoly) -> Option<MultiPoly> {
        let (lead_exp, lead_c) = divisor.leading_term()?;
        let lead_exp = lead_exp.clone();
        let lead_inv = lead_c.inv()?;
        let mut rem = self.clone();
        let mut quot = Self::zero(self.num_vars);
        while let Some((e, c)) = rem.leading_term() {
            if e.iter().zip(&lead_exp).any(|(a, b)| a < b) {
                return None;
            }
            let qe: Exponent = e.iter().zip(&lead_exp).map(|(a, b)| a - b).collect();
            let qc = c * &lead_inv;
            for (de, dc) in &divisor.terms {
                let ne: Exponent = de.iter().zip(&qe).map(|(a, b)| a + b).collect();
                rem.add_term(ne, -(dc * &qc));
            }
            quot.add_term(qe, qc);
        }
        Some(quot)
    }

    pub fn divides(&self, other: &MultiPoly) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.exact_div(self).is_some()
    }

    /// Substitutes `x_var = 1`.
    pub fn dehomogenize(&self, var: usize) -> Self {
        let mut out = Self::zero(self.num_vars);
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            ne[var] = 0;
            out.add_term(ne, c.clone());
        }
        out
    }

    /// Multiplies each term by the power of `x_var` that lifts it to total
    /// degree `degree`. Fails if some term already exceeds it.
    pub fn homogenize(&self, var: usize, degree: u32) -> Result<Self, PolyError> {
        let mut out = Self::zero(self.num_vars);
        for (e, c) in &self.terms {
            let d: u32 = e.iter().sum();
            if d > degree {
                return Err(PolyError::Degree(format!(
                    "term of degree {d} exceeds homogenization degree {degree}"
                )));
            }
            let mut ne = e.clone();
            ne[var] += degree - d;
            out.add_term(ne, c.clone());
        }
        Ok(out)
    }

    /// Re-embeds in a ring with a different number of variables. Variables
    /// beyond the new count must be unused.
    pub fn with_num_vars(&self, num_vars: usize) -> Result<Self, PolyError> {
        let mut out = Self::zero(num_vars);
        for (e, c) in &self.terms {
            if e.iter().skip(num_vars).any(|&k| k > 0) {
                return Err(PolyError::DimensionMismatch { expected: num_vars, got: self.num_vars });
            }
            let mut ne = e.clone();
            ne.resize(num_vars, 0);
            out.add_term(ne, c.clone());
        }
        Ok(out)
    }

    /// Lossy conversion for fast repeated evaluation.
    pub fn to_numeric(&self) -> NumericPoly {
        NumericPoly {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.to_complex())).collect(),
        }
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, k) })
                .collect();
            if mono.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{c}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl<'a> std::ops::Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, o: &MultiPoly) -> MultiPoly {
        assert_eq!(self.num_vars, o.num_vars);
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> std::ops::Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, o: &MultiPoly) -> MultiPoly {
        assert_eq!(self.num_vars, o.num_vars);
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl<'a> std::ops::Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, o: &MultiPoly) -> MultiPoly {
        assert_eq!(self.num_vars, o.num_vars);
        let mut out = MultiPoly::zero(self.num_vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e: Exponent = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl std::ops::Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

/// Double-precision copy of a [`MultiPoly`] for hot evaluation loops.
#[derive(Clone, Debug)]
pub struct NumericPoly {
    num_vars: usize,
    terms: Vec<(Exponent, Complex64)>,
}

impl NumericPoly {
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Evaluates at a point whose length may be shorter than `num_vars` when
    /// the trailing variables are unused.
    pub fn eval(&self, point: &[Complex64]) -> Complex64 {
        let mut re = Neumaier::default();
        let mut im = Neumaier::default();
        for (e, c) in &self.terms {
            let mut m = *c;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    m *= point[i].powu(k);
                }
            }
            re.add(m.re);
            im.add(m.im);
        }
        Complex64::new(re.total(), im.total())
    }

    pub fn one_norm(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).sum()
    }
}

/// Neumaier's improved Kahan summation.
#[derive(Default, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<u32>,
    re: String,
    #[serde(default = "zero_string")]
    im: String,
}

fn zero_string() -> String {
    "0/1".to_string()
}

/// Wire form: `{"vars": [...], "terms": [{"exp": [...], "re": "p/q", "im": "p/q"}]}`.
#[derive(Serialize, Deserialize)]
pub struct MultiPolyJson {
    vars: Vec<String>,
    terms: Vec<TermJson>,
}

impl From<&MultiPoly> for MultiPolyJson {
    fn from(p: &MultiPoly) -> Self {
        MultiPolyJson {
            vars: (1..=p.num_vars).map(|i| format!("x{i}")).collect(),
            terms: p
                .terms
                .iter()
                .rev()
                .map(|(e, c)| TermJson { exp: e.clone(), re: format_rational(&c.re), im: format_rational(&c.im) })
                .collect(),
        }
    }
}

impl TryFrom<MultiPolyJson> for MultiPoly {
    type Error = PolyError;
    fn try_from(j: MultiPolyJson) -> Result<Self, PolyError> {
        let n = j.vars.len();
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in j.terms {
            let c = GaussianRational::new(parse_rational(&t.re)?, parse_rational(&t.im)?);
            terms.push((t.exp, c));
        }
        MultiPoly::from_terms(n, terms)
    }
}

impl Serialize for MultiPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MultiPolyJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = MultiPolyJson::deserialize(d)?;
        MultiPoly::try_from(j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_examples() {
        // x1^2 - x1*x2
        let p = MultiPoly::from_int_terms(2, &[(&[2, 0], 1), (&[1, 1], -1)]);
        assert_eq!(p.eval(&[c(2.0, 0.0), c(1.0, 0.0)]).unwrap(), c(2.0, 0.0));
        assert_eq!(p.eval(&[c(6.0, 0.0), c(3.0, 0.0)]).unwrap(), c(18.0, 0.0));
        assert_eq!(MultiPoly::one(3).eval(&[c(0.3, 1.0), c(-2.0, 0.0), c(5.0, 5.0)]).unwrap(), c(1.0, 0.0));
        assert!(matches!(p.eval(&[c(1.0, 0.0)]), Err(PolyError::DimensionMismatch { .. })));
    }

    #[test]
    fn exact_division() {
        let x = MultiPoly::var(2, 0);
        let y = MultiPoly::var(2, 1);
        let a = &(&x + &y) * &(&x - &y);
        let q = a.exact_div(&(&x - &y)).unwrap();
        assert_eq!(q, &x + &y);
        assert!(a.exact_div(&x).is_none());
        assert!(x.pow(2).divides(&x.pow(2)));
        assert!(!x.pow(2).divides(&x));
    }

    #[test]
    fn coefficients_round_trip() {
        let p = MultiPoly::from_int_terms(3, &[(&[1, 0, 2], 3), (&[0, 1, 1], -2), (&[2, 1, 0], 5)]);
        let cs = p.coefficients_in(2);
        assert_eq!(cs.len(), 3);
        assert_eq!(MultiPoly::from_coefficients_in(3, 2, &cs), p);
    }

    #[test]
    fn homogenize_inverts_dehomogenize() {
        let p = MultiPoly::from_int_terms(2, &[(&[3, 0], 1), (&[1, 2], -4), (&[0, 3], 2)]);
        assert_eq!(p.dehomogenize(0).homogenize(0, 3).unwrap(), p);
    }

    #[test]
    fn json_round_trip() {
        let p = MultiPoly::from_int_terms(2, &[(&[2, 0], 1), (&[1, 1], -1)]);
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"re\":\"-1/1\""));
        let back: MultiPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
