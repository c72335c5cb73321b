use num_bigint::BigInt;
use num_complex::Complex64;
use proptest::prelude::*;
use stratdeform::polyalg::{
    discriminant_in_var, linear_coordinate_change, resultant, roots_univariate, squarefree_part, ExactMatrix, GaussianRational, MultiPoly,
    Rational, RootOptions, UniPolyView,
};

fn q(num: i64, den: i64) -> GaussianRational {
    GaussianRational::real(Rational::new(BigInt::from(num), BigInt::from(den)))
}

/// `∏ (x_2 - r_i x_1)` in two variables, or `∏ (x_1 - r_i)` in one.
fn from_roots(roots: &[GaussianRational], homogeneous: bool) -> MultiPoly {
    let nv = if homogeneous { 2 } else { 1 };
    let main = nv - 1;
    let mut p = MultiPoly::one(nv);
    for r in roots {
        let mut factor = MultiPoly::var(nv, main);
        let shift = if homogeneous { vec![1, 0] } else { vec![0] };
        factor.add_term(shift, -r.clone());
        p = &p * &factor;
    }
    p
}

fn roots_strategy(max: usize) -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-6i64..=6, 1i64..=3), 1..=max)
}

fn rationals(v: &[(i64, i64)]) -> Vec<GaussianRational> {
    v.iter().map(|&(n, d)| q(n, d)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn resultant_is_the_product_of_root_differences(r in roots_strategy(4), s in roots_strategy(4)) {
        let (r, s) = (rationals(&r), rationals(&s));
        let res = resultant(&UniPolyView::new(from_roots(&r, false), 0), &UniPolyView::new(from_roots(&s, false), 0)).unwrap();
        let mut expected = GaussianRational::from(1);
        for a in &r {
            for b in &s {
                expected = expected * (a.clone() - b.clone());
            }
        }
        prop_assert_eq!(res.constant_value().unwrap_or_else(|| GaussianRational::from(0)), expected);
    }

    #[test]
    fn discriminant_is_the_squared_vandermonde(r in roots_strategy(5)) {
        let r = rationals(&r);
        let mut expected = GaussianRational::from(1);
        for i in 0..r.len() {
            for j in i + 1..r.len() {
                let d = r[i].clone() - r[j].clone();
                expected = expected * d.clone() * d;
            }
        }
        let disc = discriminant_in_var(&UniPolyView::new(from_roots(&r, false), 0)).unwrap();
        prop_assert_eq!(disc.constant_value().unwrap_or_else(|| GaussianRational::from(0)), expected.clone());
        // Homogeneous version: the same constant times x_1^(m(m-1)).
        let m = r.len() as u32;
        let disc = discriminant_in_var(&UniPolyView::new(from_roots(&r, true), 1)).unwrap();
        let want = if expected == GaussianRational::from(0) { MultiPoly::zero(2) } else { MultiPoly::monomial(2, vec![m * (m - 1), 0], expected) };
        prop_assert_eq!(disc, want);
    }

    #[test]
    fn squarefree_part_keeps_each_root_once(r in roots_strategy(4), mult in prop::collection::vec(1u32..=3, 4)) {
        let r = rationals(&r);
        let mut distinct: Vec<GaussianRational> = Vec::new();
        for x in &r {
            if !distinct.contains(x) {
                distinct.push(x.clone());
            }
        }
        let repeated: Vec<GaussianRational> =
            distinct.iter().zip(&mult).flat_map(|(x, &m)| std::iter::repeat(x.clone()).take(m as usize)).collect();
        let sf = squarefree_part(&UniPolyView::new(from_roots(&repeated, true), 1)).unwrap();
        prop_assert_eq!(sf.base().clone(), from_roots(&distinct, true));
        if sf.degree() >= 1 {
            prop_assert!(!discriminant_in_var(&sf).unwrap().is_zero());
        }
    }

    #[test]
    fn homogeneous_evaluation_scales(
        coeffs in prop::collection::vec(-5i64..=5, 10),
        x in prop::collection::vec(-2.0f64..2.0, 6),
        lam in (0.1f64..10.0, 0.0f64..6.28),
    ) {
        // All cubic monomials in three variables.
        let exps: [[u32; 3]; 10] = [[3,0,0],[0,3,0],[0,0,3],[2,1,0],[2,0,1],[1,2,0],[0,2,1],[1,0,2],[0,1,2],[1,1,1]];
        let terms: Vec<(&[u32], i64)> = exps.iter().zip(&coeffs).map(|(e, &c)| (&e[..], c)).collect();
        let p = MultiPoly::from_int_terms(3, &terms);
        prop_assume!(!p.is_zero());
        let pt: Vec<Complex64> = x.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
        let l = Complex64::from_polar(lam.0, lam.1);
        let scaled: Vec<Complex64> = pt.iter().map(|c| l * c).collect();
        let lhs = p.eval(&scaled).unwrap();
        let rhs = l.powi(3) * p.eval(&pt).unwrap();
        let size = p.one_norm() * (lam.0 * pt.iter().map(|c| c.norm()).fold(0.0, f64::max)).powi(3);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * size.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn coordinate_changes_compose(a in prop::collection::vec(-2i64..=2, 4), b in prop::collection::vec(-2i64..=2, 4)) {
        let m1 = ExactMatrix::from_ints(&[&[1, a[0]], &[a[1], 1 + a[0] * a[1] + 1]]).unwrap();
        let m2 = ExactMatrix::from_ints(&[&[1, b[2]], &[0, 1]]).unwrap();
        let p = MultiPoly::from_int_terms(2, &[(&[2, 1], a[2]), (&[0, 3], 1), (&[1, 2], b[0] - a[3])]);
        let lhs = linear_coordinate_change(&p, &m1.mul(&m2)).unwrap();
        let rhs = linear_coordinate_change(&linear_coordinate_change(&p, &m1).unwrap(), &m2).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn planted_roots_are_recovered(r in roots_strategy(6), mult in prop::collection::vec(1usize..=3, 6)) {
        let mut planted: Vec<Complex64> = Vec::new();
        let mut seen: Vec<(i64, i64)> = Vec::new();
        for (&(n, d), &m) in r.iter().zip(&mult) {
            let g = gcd(n, d);
            let key = (n / g, d / g);
            if seen.contains(&key) {
                continue;
            }
            seen.push(key);
            planted.extend(std::iter::repeat(Complex64::new(n as f64 / d as f64, 0.0)).take(m));
        }
        prop_assume!(planted.len() <= 12);
        // Coefficients of ∏ (x - r), highest first.
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for r in &planted {
            let mut next = coeffs.clone();
            next.push(Complex64::new(0.0, 0.0));
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] -= c * r;
            }
            coeffs = next;
        }
        let mut found = roots_univariate(&coeffs, &RootOptions::default()).unwrap();
        planted.sort_by(|a, b| a.re.total_cmp(&b.re));
        found.sort_by(|a, b| a.re.total_cmp(&b.re));
        prop_assert_eq!(found.len(), planted.len());
        for (f, p) in found.iter().zip(&planted) {
            prop_assert!((f - p).norm() <= 1e-6 * (1.0 + p.norm()), "{} vs {}", f, p);
        }
        // Equal entries exactly where the planted roots coincide.
        for i in 1..found.len() {
            prop_assert_eq!(found[i] == found[i - 1], planted[i] == planted[i - 1]);
        }
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

#[test]
fn sylvester_sign_convention() {
    let a = MultiPoly::from_int_terms(1, &[(&[1], 1), (&[0], -3)]);
    let b = MultiPoly::from_int_terms(1, &[(&[1], 1), (&[0], -5)]);
    let r = resultant(&UniPolyView::new(a, 0), &UniPolyView::new(b, 0)).unwrap();
    assert_eq!(r.constant_value(), Some(GaussianRational::from(3 - 5)));
}
