use boundary_ising_core::specfun::*;
use proptest::prelude::*;

#[test]
fn sigma0_scaling_examples() {
    let s1 = sigma0(1.0).unwrap();
    assert!((s1 - 1.35784).abs() < 1e-5);
    assert_eq!(sigma0(256.0).unwrap(), 2.0 * s1);
    for m in [2.0f64, 4.0, 16.0] {
        let r = sigma0(m).unwrap() / s1;
        assert!((r - m.powf(0.125)).abs() <= f64::EPSILON * r, "{m}");
    }
    let truncated = sigma0_with_glaisher(1.0, 1.28243).unwrap();
    assert!((truncated / s1 - 1.0).abs() < 5e-6);
}

#[test]
fn domain_errors() {
    assert!(sigma0(0.0).is_err());
    assert!(bessel_k0(0.0).is_err());
    assert!(bessel_k1(-1.0).is_err());
    assert!(gamma_fn(0.0).is_err());
    assert!(tricomi_psi(0.0, 1.0, 1.0).is_err());
    assert!(tricomi_psi(0.5, 1.0, 0.0).is_err());
    assert!(to_dimensionless(PhysicalInputs { m: -1.0, h: 0.0, y: 1.0 }).is_err());
    assert!(to_dimensionless(PhysicalInputs { m: 1.0, h: 0.0, y: 0.0 }).is_err());
}

proptest! {
    #[test]
    fn dimensionless_scale_invariance(
        m in 0.01f64..100.0,
        h in -10.0f64..10.0,
        y in 0.01f64..100.0,
        s in 0.1f64..10.0,
    ) {
        let a = to_dimensionless(PhysicalInputs { m, h, y }).unwrap();
        let b = to_dimensionless(PhysicalInputs { m: s * m, h: s.sqrt() * h, y: y / s }).unwrap();
        prop_assert!((a.t - b.t).abs() <= 4.0 * f64::EPSILON * a.t);
        prop_assert!((a.lambda - b.lambda).abs() <= 8.0 * f64::EPSILON * a.lambda.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn bessel_positive_decreasing_ordered(x in 1e-6f64..690.0, dx in 1e-3f64..5.0) {
        let (k0, k1) = (bessel_k0(x).unwrap(), bessel_k1(x).unwrap());
        prop_assert!(k0 > 0.0 && k1 > k0);
        let y = x + dx;
        if y < 700.0 {
            prop_assert!(bessel_k0(y).unwrap() < k0);
            prop_assert!(bessel_k1(y).unwrap() < k1);
        }
    }

    #[test]
    fn bessel_derivative_identity(x in 0.05f64..50.0) {
        // K1 = -K0' against a five-point stencil
        let h = 1e-3 * x.min(1.0);
        let f = |z: f64| bessel_k0(z).unwrap();
        let d = (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
        prop_assert!((d / -bessel_k1(x).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn gamma_recurrence(x in 0.05f64..30.0) {
        let g = gamma_fn(x).unwrap();
        let g1 = gamma_fn(x + 1.0).unwrap();
        prop_assert!((g1 / (x * g) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn tricomi_weight_one_family(a in 0.1f64..3.0, x in 0.1f64..50.0) {
        let v = tricomi_psi(a, a + 1.0, x).unwrap();
        prop_assert!((v * x.powf(a) - 1.0).abs() < 1e-10);
    }
}
