use num_complex::Complex64;
use proptest::prelude::*;
use stratdeform::polyalg::{linear_coordinate_change, roots_univariate, MultiPoly, RootOptions};
use stratdeform::stratification::{complete_system, stratum_label, validate_system, PolynomialSystem};
use stratdeform::suite::corpus;

const TOL: f64 = 1e-10;

fn completed() -> Vec<(&'static str, PolynomialSystem)> {
    corpus().into_iter().map(|c| (c.name, complete_system(&c.top, c.n, 64).unwrap())).collect()
}

#[test]
fn completed_corpus_validates_and_keeps_the_top() {
    for (case, (name, sys)) in corpus().iter().zip(completed()) {
        let report = validate_system(sys.polys());
        assert!(report.valid, "{name}: {:?}", report.failures);
        let moved = linear_coordinate_change(&case.top, sys.coordinate_change()).unwrap();
        assert!(moved.divides(&sys.polys()[case.n - 1]), "{name}");
    }
}

#[test]
fn level_one_is_a_power_of_x1() {
    for (name, sys) in completed() {
        let f1 = &sys.polys()[0];
        assert_eq!(f1.num_terms(), 1, "{name}: {f1}");
        let (exp, _) = f1.leading_term().unwrap();
        assert!(exp[1..].iter().all(|&e| e == 0), "{name}: {f1}");
    }
}

#[test]
fn validation_names_the_failing_level() {
    // Level 1 may only depend on x1.
    let f1 = MultiPoly::from_int_terms(2, &[(&[1, 0], 1), (&[0, 1], 1)]);
    let f2 = MultiPoly::from_int_terms(2, &[(&[0, 2], 1), (&[1, 1], -1)]);
    let report = validate_system(&[f1, f2]);
    assert!(!report.valid);
    assert_eq!(report.failures[0].level, 1);
}

fn point() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im)), 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn labels_are_invariant_under_scaling(x in point(), m in -3.0f64..3.0, arg in 0.0f64..6.28) {
        let lam = Complex64::from_polar(10f64.powf(m), arg);
        for (name, sys) in completed() {
            let x = &x[..sys.n()];
            let Ok(before) = stratum_label(x, &sys, TOL) else { continue };
            let scaled: Vec<Complex64> = x.iter().map(|c| lam * c).collect();
            let after = stratum_label(&scaled, &sys, TOL).unwrap();
            prop_assert!(before.same_stratum(&after), "{}", name);
            prop_assert_eq!(before.depth, before.pattern.iter().filter(|z| !**z).count());
        }
    }

    /// Replacing the last coordinate with a root of `F_n` over the same base
    /// lands on the zero set of `F_n` without changing lower levels.
    #[test]
    fn roots_of_the_top_level_are_labelled_zero(x in point()) {
        for (name, sys) in completed() {
            let n = sys.n();
            let coeffs = sys.level_coefficients(n - 1, &x[..n - 1]);
            if coeffs.len() < 2 {
                continue;
            }
            let lead = coeffs[0];
            let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
            let roots = roots_univariate(&monic, &RootOptions::default()).unwrap();
            let Ok(before) = stratum_label(&x[..n], &sys, TOL) else { continue };
            let mut y = x[..n].to_vec();
            y[n - 1] = roots[0];
            let Ok(after) = stratum_label(&y, &sys, TOL) else { continue };
            prop_assert!(after.pattern[n - 1], "{}", name);
            prop_assert_eq!(&after.pattern[..n - 1], &before.pattern[..n - 1], "{}", name);
        }
    }
}
