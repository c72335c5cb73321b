use num_complex::Complex64;
use proptest::prelude::*;
use stratdeform::config::RunConfig;
use stratdeform::deformation::{random_t, sample_point, DeformationContext};
use stratdeform::polyalg::MultiPoly;
use stratdeform::rng;
use stratdeform::stratification::{complete_system, stratum_label};

fn cusp_context() -> DeformationContext {
    // x3 (x3 - x1)(x3 - x2): three planes through a line.
    let top = MultiPoly::from_int_terms(3, &[(&[0, 0, 3], 1), (&[1, 0, 2], -1), (&[0, 1, 2], -1), (&[1, 1, 1], 1)]);
    let system = complete_system(&top, 3, 64).unwrap();
    DeformationContext::new(system, &RunConfig::default()).unwrap()
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

#[test]
fn calibrated_radius_is_positive_and_deterministic() {
    let a = cusp_context();
    let b = cusp_context();
    assert!(a.t_radius() > 0.0 && a.t_radius() <= 0.1);
    assert_eq!(a.t_radius(), b.t_radius());
}

#[test]
fn strata_equivariance_and_identity() {
    let ctx = cusp_context();
    let tol = ctx.zero_test();
    for k in 0..300 {
        let mut r = rng::stream(11, k);
        let x = sample_point(&ctx, &mut r, None, false).unwrap();
        let t = random_t(&mut r, 3, ctx.t_radius(), false);
        let zero = vec![Complex64::new(0.0, 0.0); 3];
        assert_eq!(ctx.deform(&zero, &x).unwrap(), x);
        let y = ctx.deform(&t, &x).unwrap();
        let before = stratum_label(&x, ctx.system(), tol).unwrap();
        let after = stratum_label(&y, ctx.system(), tol).unwrap();
        assert!(before.same_stratum(&after), "{before:?} vs {after:?}");
        let lambda = Complex64::from_polar(10f64.powf(k as f64 % 7.0 - 3.0), k as f64);
        let xs: Vec<Complex64> = x.iter().map(|c| c * lambda).collect();
        let ys = ctx.deform(&t, &xs).unwrap();
        let err = ys.iter().zip(&y).map(|(u, v)| (u - v * lambda).norm()).fold(0.0, f64::max);
        assert!(err <= 1e-9 * lambda.norm() * max_norm(&x).max(1.0), "equivariance error {err}");
    }
}

#[test]
fn orbit_jacobian_is_triangular() {
    let ctx = cusp_context();
    for k in 0..60 {
        let mut r = rng::stream(12, k);
        let sheets = [k % 2 == 0, k % 3 == 0, k % 4 == 0];
        let x = sample_point(&ctx, &mut r, Some(&sheets), false).unwrap();
        let t = random_t(&mut r, 3, ctx.t_radius() / 2.0, false);
        let j = ctx.orbit_jacobian(&t, &x).unwrap();
        assert!(j.triangularity_defect <= 1e-7 * j.scale);
        if let Some(m) = j.min_free_diagonal_log10 {
            assert!(m.is_finite());
        }
        assert_eq!(j.max_pinned_diagonal, 0.0);
        assert_eq!(j.free_levels, sheets.iter().map(|s| !s).collect::<Vec<_>>());
    }
}

#[test]
fn projective_representatives_agree() {
    let top = MultiPoly::from_int_terms(3, &[(&[1, 1, 1], 1), (&[0, 0, 3], 2), (&[2, 0, 1], -1)]);
    let system = complete_system(&top, 3, 64).unwrap();
    let ctx = DeformationContext::new(system, &RunConfig::default()).unwrap();
    let x = [Complex64::new(0.3, 0.2), Complex64::new(-1.0, 0.5), Complex64::new(0.7, 0.0)];
    let t = random_t(&mut rng::stream(5, 0), 3, ctx.t_radius(), false);
    let p = ctx.deform_projective(&t, &x).unwrap();
    for lam in [Complex64::new(2.0, 0.0), Complex64::new(-0.3, 1.7), Complex64::new(1e3, -1e2)] {
        let xs: Vec<Complex64> = x.iter().map(|c| c * lam).collect();
        let q = ctx.deform_projective(&t, &xs).unwrap();
        let err = p.iter().zip(&q).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn deformation_is_continuous_in_t(seed in 0u64..1000) {
        let ctx = cusp_context();
        let mut r = rng::stream(seed, 0);
        let x = sample_point(&ctx, &mut r, None, false).unwrap();
        let t = random_t(&mut r, 3, ctx.t_radius() / 2.0, false);
        let y0 = ctx.deform(&t, &x).unwrap();
        let t1: Vec<Complex64> = t.iter().map(|c| c * (1.0 + 1e-7)).collect();
        let y1 = ctx.deform(&t1, &x).unwrap();
        let d = y0.iter().zip(&y1).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
        prop_assert!(d < 1e-4 * max_norm(&x).max(1.0));
    }
}
