//! Small dense matrices over the exact coefficient field, and fraction-free
//! determinants over polynomial rings.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::gaussian::{format_rational, parse_rational, GaussianRational};
use super::multipoly::MultiPoly;
use super::PolyError;

/// Square matrix with Gaussian-rational entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: Vec<Vec<GaussianRational>>,
}

impl ExactMatrix {
    pub fn new(rows: Vec<Vec<GaussianRational>>) -> Result<Self, PolyError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(PolyError::DimensionMismatch { expected: n, got: rows.iter().map(Vec::len).max().unwrap_or(0) });
        }
        Ok(Self { rows })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self, PolyError> {
        Self::new(rows.iter().map(|r| r.iter().map(|&v| GaussianRational::from(v)).collect()).collect())
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { GaussianRational::one() } else { GaussianRational::zero() }).collect())
            .collect();
        Self { rows }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &GaussianRational {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: GaussianRational) {
        self.rows[i][j] = v;
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.size())
    }

    pub fn mul(&self, other: &ExactMatrix) -> ExactMatrix {
        let n = self.size();
        let mut rows = vec![vec![GaussianRational::zero(); n]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, out) in row.iter_mut().enumerate() {
                for k in 0..n {
                    if !self.rows[i][k].is_zero() && !other.rows[k][j].is_zero() {
                        *out += &(&self.rows[i][k] * &other.rows[k][j]);
                    }
                }
            }
        }
        ExactMatrix { rows }
    }

    pub fn determinant(&self) -> GaussianRational {
        let entries = self
            .rows
            .iter()
            .map(|r| r.iter().map(|v| MultiPoly::constant(0, v.clone())).collect())
            .collect();
        bareiss_determinant(entries).constant_value().unwrap_or_else(GaussianRational::zero)
    }

    /// Matrix-vector product in double precision.
    pub fn apply_f64(&self, v: &[num_complex::Complex64]) -> Vec<num_complex::Complex64> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(v).map(|(a, x)| a.to_complex() * x).sum())
            .collect()
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<ExactMatrix> {
        let n = self.size();
        let mut a = self.rows.clone();
        let mut inv = Self::identity(n).rows;
        for col in 0..n {
            let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(col, piv);
            inv.swap(col, piv);
            let p_inv = a[col][col].inv()?;
            for j in 0..n {
                a[col][j] = &a[col][j] * &p_inv;
                inv[col][j] = &inv[col][j] * &p_inv;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for j in 0..n {
                    let t = &f * &a[col][j];
                    a[r][j] -= &t;
                    let t = &f * &inv[col][j];
                    inv[r][j] -= &t;
                }
            }
        }
        Some(ExactMatrix { rows: inv })
    }
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    re: String,
    #[serde(default)]
    im: Option<String>,
}

impl Serialize for ExactMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<EntryJson>> = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|v| EntryJson { re: format_rational(&v.re), im: Some(format_rational(&v.im)) })
                    .collect()
            })
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<EntryJson>> = Vec::deserialize(d)?;
        let mut out = Vec::with_capacity(rows.len());
        for r in rows {
            let mut row = Vec::with_capacity(r.len());
            for e in r {
                let re = parse_rational(&e.re).map_err(serde::de::Error::custom)?;
                let im = match e.im {
                    Some(s) => parse_rational(&s).map_err(serde::de::Error::custom)?,
                    None => Zero::zero(),
                };
                row.push(GaussianRational::new(re, im));
            }
            out.push(row);
        }
        ExactMatrix::new(out).map_err(serde::de::Error::custom)
    }
}

/// Fraction-free (Bareiss) determinant over the polynomial ring. Every
/// intermediate division is exact; row swaps flip the sign.
pub fn bareiss_determinant(mut a: Vec<Vec<MultiPoly>>) -> MultiPoly {
    let n = a.len();
    if n == 0 {
        return MultiPoly::one(0);
    }
    let nv = a[0][0].num_vars();
    let mut negate = false;
    let mut prev = MultiPoly::one(nv);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    negate = !negate;
                }
                None => return MultiPoly::zero(nv),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.exact_div(&prev).expect("Bareiss step divides exactly");
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        -&det
    } else {
        det
    }
}
