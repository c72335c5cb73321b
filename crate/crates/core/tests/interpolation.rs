use num_complex::Complex64;
use proptest::prelude::*;
use stratdeform::interpolation::{check_domain, psi, psi_stratified, InterpolationInput};
use stratdeform::symmetric::multiplicity_type_exact;

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

/// Root vectors with repeats and zeros, and targets constant on each class
/// and zero on the zero class.
fn domain() -> impl Strategy<Value = (Vec<Complex64>, Vec<Complex64>)> {
    (prop::collection::vec(complex(), 3), prop::collection::vec(complex(), 3), prop::collection::vec(0usize..4, 1..=4)).prop_map(
        |(pool_a, pool_b, picks)| {
            let pick = |pool: &[Complex64], k: usize| if k == 3 { Complex64::new(0.0, 0.0) } else { pool[k] };
            (picks.iter().map(|&k| pick(&pool_a, k)).collect(), picks.iter().map(|&k| pick(&pool_b, k)).collect())
        },
    )
}

fn input(z: Complex64, a: &[Complex64], b: &[Complex64], eta: Complex64) -> InterpolationInput {
    InterpolationInput::new(z, a.to_vec(), b.to_vec(), eta)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn interpolates_exactly((a, b) in domain(), eta in complex()) {
        prop_assert!(check_domain(&a, &b).is_ok());
        for (ai, bi) in a.iter().zip(&b) {
            prop_assert_eq!(psi(&input(*ai, &a, &b, eta)).unwrap(), *bi);
        }
        prop_assert_eq!(psi(&input(Complex64::new(0.0, 0.0), &a, &b, eta)).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn identity_when_targets_equal_roots((a, _) in domain(), z in complex()) {
        let w = psi(&input(z, &a, &a, Complex64::new(0.0, 0.0))).unwrap();
        let scale = input(z, &a, &a, Complex64::new(0.0, 0.0)).scale();
        prop_assert!((w - z).norm() <= 1e-12 * scale, "{} vs {}", w, z);
    }

    #[test]
    fn homogeneous_of_degree_one((a, b) in domain(), z in complex(), eta in complex(), m in -3.0f64..3.0, arg in 0.0f64..6.28) {
        let lam = Complex64::from_polar(10f64.powf(m), arg);
        let base = input(z, &a, &b, eta);
        let scaled_a: Vec<Complex64> = a.iter().map(|x| lam * x).collect();
        let scaled_b: Vec<Complex64> = b.iter().map(|x| lam * x).collect();
        let lhs = psi(&input(lam * z, &scaled_a, &scaled_b, eta)).unwrap();
        let rhs = lam * psi(&base).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-9 * lam.norm() * base.scale(), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn stratified_form_agrees((a, b) in domain(), z in complex(), eta in complex()) {
        let base = input(z, &a, &b, eta);
        let gap = a.iter().map(|x| (z - x).norm()).fold(z.norm(), f64::min);
        prop_assume!(gap >= 0.05 * base.scale());
        let ty = multiplicity_type_exact(&a);
        let direct = psi(&base).unwrap();
        let stratified = psi_stratified(&base, &ty).unwrap();
        prop_assert!((direct - stratified).norm() <= 1e-8 * base.scale(), "{} vs {}", direct, stratified);
    }
}

#[test]
fn domain_violations_are_rejected() {
    let c = |re: f64| Complex64::new(re, 0.0);
    assert!(check_domain(&[c(0.5), c(0.5)], &[c(1.0), c(2.0)]).is_err());
    assert!(check_domain(&[c(0.0), c(0.5)], &[c(0.1), c(0.5)]).is_err());
    assert!(check_domain(&[c(0.5)], &[c(1.0), c(2.0)]).is_err());
}
