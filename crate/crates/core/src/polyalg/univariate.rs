//! Univariate structure over a multivariate coefficient ring: squarefree
//! parts, Sylvester resultants, discriminants and linear substitutions.
//!
//! Homogeneous inputs are dehomogenized on one auxiliary variable before the
//! expensive steps and lifted back afterwards; for homogeneous data the
//! results have known total degree, so the round trip is exact.

use std::collections::HashMap;

use num_traits::{One, Zero};

use super::matrix::{bareiss_determinant, ExactMatrix};
use super::multipoly::MultiPoly;
use super::PolyError;

/// A [`MultiPoly`] viewed as a polynomial in one main variable.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPolyView {
    base: MultiPoly,
    main: usize,
    coeffs: Vec<MultiPoly>,
}

impl UniPolyView {
    pub fn new(base: MultiPoly, main: usize) -> Self {
        let coeffs = base.coefficients_in(main);
        Self { base, main, coeffs }
    }

    fn from_coeffs(num_vars: usize, main: usize, coeffs: Vec<MultiPoly>) -> Self {
        let coeffs = strip(coeffs, num_vars);
        let base = MultiPoly::from_coefficients_in(num_vars, main, &coeffs);
        Self { base, main, coeffs }
    }

    pub fn base(&self) -> &MultiPoly {
        &self.base
    }

    pub fn into_base(self) -> MultiPoly {
        self.base
    }

    pub fn main_var(&self) -> usize {
        self.main
    }

    /// Coefficients in the main variable, highest degree first.
    pub fn coefficients(&self) -> &[MultiPoly] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &MultiPoly {
        &self.coeffs[0]
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs[0].is_one()
    }

    pub fn derivative(&self) -> UniPolyView {
        UniPolyView::new(self.base.derivative(self.main), self.main)
    }
}

fn strip(mut coeffs: Vec<MultiPoly>, num_vars: usize) -> Vec<MultiPoly> {
    let lead = coeffs.iter().position(|c| !c.is_zero());
    match lead {
        Some(i) => coeffs.drain(..i).for_each(drop),
        None => return vec![MultiPoly::zero(num_vars)],
    }
    coeffs
}

/// A variable other than `main` that the inputs use, if all of them are
/// homogeneous; dehomogenizing on it is injective for fixed degree.
fn dehomogenization_var(polys: &[&MultiPoly], main: usize) -> Option<usize> {
    if !polys.iter().all(|p| p.is_homogeneous()) {
        return None;
    }
    let nv = polys[0].num_vars();
    (0..nv).find(|&v| v != main && polys.iter().any(|p| p.uses_var(v)))
}

fn is_zero_poly(c: &[MultiPoly]) -> bool {
    c.len() == 1 && c[0].is_zero()
}

/// Pseudo-remainder of `a` by `b` (coefficient lists, highest first):
/// `lc(b)^(deg a - deg b + 1) a = q b + r`.
fn prem(a: &[MultiPoly], b: &[MultiPoly]) -> Vec<MultiPoly> {
    let nv = b[0].num_vars();
    let m = a.len() - 1;
    let n = b.len() - 1;
    if m < n {
        return a.to_vec();
    }
    let lb = &b[0];
    let mut r = a.to_vec();
    let mut steps = 0u32;
    while !is_zero_poly(&r) && r.len() > n {
        let lr = r[0].clone();
        let shift = r.len() - 1 - n;
        let mut next: Vec<MultiPoly> = r.iter().map(|c| c * lb).collect();
        for (i, bc) in b.iter().enumerate() {
            next[i] = &next[i] - &(&lr * bc);
        }
        debug_assert!(next[0].is_zero());
        let _ = shift;
        r = strip(next.into_iter().skip(1).collect(), nv);
        steps += 1;
    }
    let total = (m - n + 1) as u32;
    if steps < total && !is_zero_poly(&r) {
        let f = lb.pow(total - steps);
        r = r.iter().map(|c| c * &f).collect();
    }
    r
}

/// Subresultant PRS; returns a ring multiple of the gcd over the fraction
/// field of the coefficient ring.
fn subresultant_gcd(a: &[MultiPoly], b: &[MultiPoly]) -> Vec<MultiPoly> {
    let nv = a[0].num_vars();
    let (mut a, mut b) = if a.len() >= b.len() { (a.to_vec(), b.to_vec()) } else { (b.to_vec(), a.to_vec()) };
    if is_zero_poly(&b) {
        return a;
    }
    let mut g = MultiPoly::one(nv);
    let mut h = MultiPoly::one(nv);
    loop {
        let delta = (a.len() - b.len()) as u32;
        let r = prem(&a, &b);
        if is_zero_poly(&r) {
            return b;
        }
        if r.len() == 1 {
            // Nonzero constant in the main variable: gcd is trivial.
            return r;
        }
        let denom = &g * &h.pow(delta);
        let next: Vec<MultiPoly> = r.iter().map(|c| c.exact_div(&denom).expect("subresultant division")).collect();
        a = b;
        b = next;
        g = a[0].clone();
        h = if delta == 0 {
            h
        } else {
            let num = g.pow(delta);
            let den = h.pow(delta - 1);
            num.exact_div(&den).expect("subresultant h update")
        };
    }
}

/// Divides by a monic divisor; `None` if the remainder is nonzero.
fn div_monic(a: &[MultiPoly], b: &[MultiPoly]) -> Option<Vec<MultiPoly>> {
    debug_assert!(b[0].is_one());
    let nv = b[0].num_vars();
    if a.len() < b.len() {
        return if is_zero_poly(a) { Some(vec![MultiPoly::zero(nv)]) } else { None };
    }
    let mut r = a.to_vec();
    let qlen = a.len() - b.len() + 1;
    let mut q = Vec::with_capacity(qlen);
    for i in 0..qlen {
        let lead = r[i].clone();
        for (j, bc) in b.iter().enumerate() {
            r[i + j] = &r[i + j] - &(&lead * bc);
        }
        q.push(lead);
    }
    if r[qlen..].iter().all(MultiPoly::is_zero) {
        Some(q)
    } else {
        None
    }
}

/// `p / gcd(p, ∂p/∂x_main)`, monic when `p` is monic.
pub fn squarefree_part(p: &UniPolyView) -> Result<UniPolyView, PolyError> {
    if !p.is_monic() {
        return Err(PolyError::NotMonic);
    }
    if p.degree() <= 1 {
        return Ok(p.clone());
    }
    let main = p.main;
    let nv = p.base.num_vars();
    if let Some(v) = dehomogenization_var(&[&p.base], main) {
        let reduced = squarefree_core(&UniPolyView::new(p.base.dehomogenize(v), main));
        let deg = reduced.degree() as u32;
        let lifted = reduced.base.homogenize(v, deg)?;
        return Ok(UniPolyView::new(lifted, main));
    }
    let _ = nv;
    Ok(squarefree_core(p))
}

fn squarefree_core(p: &UniPolyView) -> UniPolyView {
    let nv = p.base.num_vars();
    let dp = p.derivative();
    let g = subresultant_gcd(&p.coeffs, &dp.coeffs);
    if g.len() == 1 {
        return p.clone();
    }
    let lc = g[0].clone();
    let monic_g: Vec<MultiPoly> =
        g.iter().map(|c| c.exact_div(&lc).expect("gcd of a monic polynomial has a monic associate")).collect();
    let q = div_monic(&p.coeffs, &monic_g).expect("gcd divides p");
    UniPolyView::from_coeffs(nv, p.main, q)
}

/// Sylvester resultant with `p`'s coefficients in the top `deg q` rows and
/// `q`'s in the bottom `deg p` rows. With this layout
/// `Res(x - a, x - b) = a - b`.
pub fn resultant(p: &UniPolyView, q: &UniPolyView) -> Result<MultiPoly, PolyError> {
    if p.main != q.main || p.base.num_vars() != q.base.num_vars() {
        return Err(PolyError::DimensionMismatch { expected: p.base.num_vars(), got: q.base.num_vars() });
    }
    let m = p.degree();
    let k = q.degree();
    if m == 0 && k == 0 {
        return Err(PolyError::BothConstant);
    }
    if let Some(v) = dehomogenization_var(&[&p.base, &q.base], p.main) {
        let dp = p.base.total_degree().unwrap_or(0) as i64;
        let dq = q.base.total_degree().unwrap_or(0) as i64;
        let target = m as i64 * dq + k as i64 * dp - (m * k) as i64;
        let r = sylvester_resultant(
            &UniPolyView::new(p.base.dehomogenize(v), p.main),
            &UniPolyView::new(q.base.dehomogenize(v), q.main),
        );
        if r.is_zero() {
            return Ok(r);
        }
        if target < 0 {
            return Err(PolyError::Degree("negative resultant degree".into()));
        }
        return r.homogenize(v, target as u32);
    }
    Ok(sylvester_resultant(p, q))
}

fn sylvester_resultant(p: &UniPolyView, q: &UniPolyView) -> MultiPoly {
    let nv = p.base.num_vars();
    let m = p.degree();
    let k = q.degree();
    if k == 0 {
        return q.coeffs[0].pow(m as u32);
    }
    if m == 0 {
        return p.coeffs[0].pow(k as u32);
    }
    let size = m + k;
    let mut rows = Vec::with_capacity(size);
    for r in 0..k {
        let mut row = vec![MultiPoly::zero(nv); size];
        for (j, c) in p.coeffs.iter().enumerate() {
            row[r + j] = c.clone();
        }
        rows.push(row);
    }
    for r in 0..m {
        let mut row = vec![MultiPoly::zero(nv); size];
        for (j, c) in q.coeffs.iter().enumerate() {
            row[r + j] = c.clone();
        }
        rows.push(row);
    }
    bareiss_determinant(rows)
}

/// `(-1)^(m(m-1)/2) Res(p, p') / lc(p)`; equals `b² - 4c` for `x² + bx + c`.
pub fn discriminant_in_var(p: &UniPolyView) -> Result<MultiPoly, PolyError> {
    let m = p.degree();
    let nv = p.base.num_vars();
    if m == 0 {
        return Err(PolyError::Degree("discriminant of a polynomial of degree 0".into()));
    }
    if m == 1 {
        return Ok(MultiPoly::one(nv));
    }
    let r = resultant(p, &p.derivative())?;
    let r = r.exact_div(p.leading()).ok_or(PolyError::NotMonic)?;
    if (m * (m - 1) / 2) % 2 == 1 {
        Ok(-&r)
    } else {
        Ok(r)
    }
}

/// `p ∘ M`: substitutes `x_j ↦ Σ_k M[j][k] x_k`.
pub fn linear_coordinate_change(p: &MultiPoly, matrix: &ExactMatrix) -> Result<MultiPoly, PolyError> {
    let n = p.num_vars();
    if matrix.size() != n {
        return Err(PolyError::DimensionMismatch { expected: n, got: matrix.size() });
    }
    if matrix.determinant().is_zero() {
        return Err(PolyError::SingularMatrix);
    }
    let forms: Vec<MultiPoly> = (0..n)
        .map(|j| {
            let mut f = MultiPoly::zero(n);
            for k in 0..n {
                let c = matrix.get(j, k);
                if !c.is_zero() {
                    let mut e = vec![0; n];
                    e[k] = 1;
                    f.add_term(e, c.clone());
                }
            }
            f
        })
        .collect();
    let mut powers: HashMap<(usize, u32), MultiPoly> = HashMap::new();
    let mut out = MultiPoly::zero(n);
    for (e, c) in p.terms() {
        let mut t = MultiPoly::constant(n, c.clone());
        for (j, &k) in e.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let pw = powers.entry((j, k)).or_insert_with(|| forms[j].pow(k));
            t = &t * pw;
        }
        out = &out + &t;
    }
    Ok(out)
}

/// Scales so that the leading coefficient in `main` becomes 1; requires that
/// coefficient to be a nonzero constant.
pub fn make_monic(p: &MultiPoly, main: usize) -> Result<MultiPoly, PolyError> {
    let view = UniPolyView::new(p.clone(), main);
    let lc = view.leading().constant_value().ok_or(PolyError::NotMonic)?;
    if lc.is_zero() {
        return Err(PolyError::NotMonic);
    }
    if lc.is_one() {
        return Ok(p.clone());
    }
    Ok(p.scale(&lc.inv().expect("nonzero")))
}
