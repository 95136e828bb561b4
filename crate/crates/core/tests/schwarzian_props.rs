use proptest::prelude::*;
use qfound::schwarzian::*;
use qfound::Complex64;

fn tan_function(grid: RealGrid) -> SampledFunction {
    SampledFunction::analytic_real(
        grid,
        f64::tan,
        |x| 1.0 / x.cos().powi(2),
        |x| 2.0 * x.tan() / x.cos().powi(2),
        |x| (2.0 + 4.0 * x.tan().powi(2)) / x.cos().powi(2),
    )
}

fn coefficient() -> impl Strategy<Value = f64> {
    -3.0..3.0f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moebius_functions_have_zero_schwarzian(
        a in coefficient(), b in coefficient(), c in coefficient(), d in coefficient()
    ) {
        prop_assume!((a * d - b * c).abs() > 0.1);
        // pole -d/c kept at least 0.5 away from [0, 1]
        prop_assume!(c.abs() < 1e-9 || !(-0.5..=1.5).contains(&(-d / c)));
        let grid = RealGrid::new(0.0, 1.0, 1001).unwrap();
        let id = SampledFunction::analytic_real(grid, |x| x, |_| 1.0, |_| 0.0, |_| 0.0);
        let m = MoebiusMap::real(a, b, c, d).unwrap();
        let f = apply_moebius(&m, &id).unwrap();
        prop_assert!(schwarzian(&f).unwrap().sup_norm() < 1e-6);
        prop_assert!(schwarzian(&f.without_derivatives()).unwrap().sup_norm() < 1e-3);
    }

    #[test]
    fn invariance_under_moebius_maps(
        a in coefficient(), b in coefficient(), c in coefficient(), d in coefficient()
    ) {
        prop_assume!((a * d - b * c).abs() > 0.1);
        let grid = RealGrid::new(0.1, 1.0, 901).unwrap();
        let f = tan_function(grid);
        prop_assume!(f.values().iter().all(|w| (c * w.re + d).abs() > 0.2 * (c.abs() + d.abs())));
        let m = MoebiusMap::real(a, b, c, d).unwrap();
        prop_assert!(moebius_invariance_deviation(&f, &m).unwrap() < 1e-6);
    }

    #[test]
    fn cocycle_for_smooth_monotone_maps(
        alpha in 0.1..2.0f64, beta in 0.1..2.0f64, gamma in -1.5..1.5f64, s in 0.2..3.0f64
    ) {
        let grid = RealGrid::new(0.5, 1.5, 801).unwrap();
        let qa = SampledFunction::analytic_real(
            grid,
            move |x| alpha * x.powi(3) + beta * x,
            move |x| 3.0 * alpha * x * x + beta,
            move |x| 6.0 * alpha * x,
            move |_| 6.0 * alpha,
        );
        let qc = SampledFunction::analytic_real(
            grid,
            move |x| s * (gamma * x).exp() + x,
            move |x| s * gamma * (gamma * x).exp() + 1.0,
            move |x| s * gamma * gamma * (gamma * x).exp(),
            move |x| s * gamma.powi(3) * (gamma * x).exp(),
        );
        prop_assume!(qc.derivative(1).unwrap().iter().all(|d| d.re.abs() > 0.05));
        let k = HjConstants::new(1.0, 0.5);
        prop_assert!(cocycle_deviation(&qa, &grid, &qc, &k).unwrap() < 1e-5);
    }

    #[test]
    fn affine_codomain_rescaling(a in -5.0..5.0f64, b in -5.0..5.0f64) {
        prop_assume!(a.abs() > 0.1);
        let grid = RealGrid::new(0.1, 1.0, 401).unwrap();
        let f = SampledFunction::from_real_fn(grid, f64::tan);
        let g = SampledFunction::from_real_fn(grid, move |x| a * x.tan() + b);
        let sf = schwarzian(&f).unwrap();
        let sg = schwarzian(&g).unwrap();
        prop_assert!(sf.sup_distance(&sg) < 1e-6 * sf.sup_norm().max(1.0));
    }

    #[test]
    fn transform_of_zero_w_is_the_schwarzian_term(alpha in 0.1..2.0f64, beta in 0.1..2.0f64) {
        let grid = RealGrid::new(0.5, 1.5, 401).unwrap();
        let map = SampledFunction::analytic_real(
            grid,
            move |x| alpha * x.powi(3) + beta * x,
            move |x| 3.0 * alpha * x * x + beta,
            move |x| 6.0 * alpha * x,
            move |_| 6.0 * alpha,
        );
        let zero = SampledFunction::from_real_fn(grid, |_| 0.0);
        let k = HjConstants::new(1.0, 0.5);
        let w = transform_w(&zero, &map, &k, TransformLaw::Quantum).unwrap();
        let s = schwarzian(&map).unwrap();
        for (i, q, wi) in w.iter() {
            let d1 = 3.0 * alpha * q * q + beta;
            // -(xi^2/4m) {q, q'} = k (dq/dq')^2 {q', q}
            let expected = k.coefficient() * s.get(i).unwrap() / (d1 * d1);
            prop_assert!((wi - expected).norm() <= 1e-15 * expected.norm().max(1.0));
        }
        let w_classical = transform_w(&zero, &map, &k, TransformLaw::Classical).unwrap();
        prop_assert_eq!(w_classical.sup_norm(), 0.0);
    }
}

#[test]
fn complex_exponential_dilation_example() {
    let grid = RealGrid::new(0.0, 1.0, 401).unwrap();
    let i = Complex64::new(0.0, 1.0);
    let f = SampledFunction::analytic(
        grid,
        move |x| (2.0 * i * x).exp(),
        move |x| 2.0 * i * (2.0 * i * x).exp(),
        move |x| -4.0 * (2.0 * i * x).exp(),
        move |x| -8.0 * i * (2.0 * i * x).exp(),
    );
    let m = MoebiusMap::real(2.0, 0.0, 0.0, 1.0).unwrap();
    assert!(moebius_invariance_deviation(&f, &m).unwrap() < 1e-6);
    let s = schwarzian(&f).unwrap();
    for (_, _, v) in s.iter() {
        assert!((v - 2.0).norm() < 1e-12);
    }
}
