use proptest::prelude::*;
use qfound::schrodinger1d::*;
use qfound::schwarzian::RealGrid;

#[test]
fn numerov_is_fourth_order() {
    let pot = Potential::harmonic(1.0, 1.0, 1.0).unwrap();
    let error = |n: usize| {
        let grid = RealGrid::new(-8.0, 8.0, n).unwrap();
        let found = find_eigenvalues(&pot, &grid, 0.0, 1.0, 1).unwrap();
        (found.energies[0] - 0.5).abs()
    };
    let (coarse, fine) = (error(201), error(401));
    let ratio = coarse / fine;
    assert!(
        ratio > 15.0 && ratio < 17.0,
        "ratio {ratio}, errors {coarse:e} {fine:e}"
    );
}

#[test]
fn node_theorem_and_orthogonality() {
    let cases = [
        (
            Potential::harmonic(1.0, 1.0, 1.0).unwrap(),
            RealGrid::new(-8.0, 8.0, 4001).unwrap(),
            6.0,
        ),
        (
            Potential::infinite_well(1.0, 1.0, 1.0).unwrap(),
            RealGrid::new(0.0, 1.0, 2001).unwrap(),
            200.0,
        ),
    ];
    for (pot, grid, e_max) in cases {
        let found = find_eigenvalues(&pot, &grid, 0.0, e_max, 10).unwrap();
        assert!(found.len() >= 3);
        for (k, psi) in found.wavefunctions.iter().enumerate() {
            assert_eq!(found.node_counts[k], k);
            assert_eq!(psi.sign_changes(), k);
            assert!((psi.norm_squared() - 1.0).abs() < 1e-10);
            for other in &found.wavefunctions[..k] {
                assert!(psi.inner(other).norm() < 1e-6);
            }
        }
        assert!(found.energies.windows(2).all(|w| w[1] > w[0]));
    }
}

#[test]
fn well_levels_match_closed_form() {
    let pot = Potential::infinite_well(1.0, 1.0, 1.0).unwrap();
    let grid = pot.reference_grid(2001).unwrap();
    let found = find_eigenvalues(&pot, &grid, 0.0, 60.0, 10).unwrap();
    assert_eq!(found.len(), 3);
    for (k, e) in found.energies.iter().enumerate() {
        let exact = ((k + 1) as f64 * std::f64::consts::PI).powi(2) / 2.0;
        assert!((e - exact).abs() < 1e-6 * exact);
    }
}

#[test]
fn tabulated_potential_from_csv() {
    let mut text = String::from("q,V\n");
    for i in 0..=400 {
        let q = -6.0 + 12.0 * i as f64 / 400.0;
        text += &format!("{q},{}\n", 0.5 * q * q);
    }
    let file = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(file.path(), &text).unwrap();
    let table = TabulatedPotential::from_csv_path(file.path()).unwrap();
    assert_eq!(
        table,
        TabulatedPotential::from_csv_reader(text.as_bytes()).unwrap()
    );
    let pot = Potential::tabulated(table, 1.0, 1.0).unwrap();
    let grid = RealGrid::new(-6.0, 6.0, 2401).unwrap();
    let found = find_eigenvalues(&pot, &grid, 0.0, 3.0, 5).unwrap();
    assert_eq!(found.len(), 3);
    for (k, e) in found.energies.iter().enumerate() {
        assert!((e - (k as f64 + 0.5)).abs() < 2e-3, "level {k}: {e}");
    }
    assert!(TabulatedPotential::from_csv_reader("q,V\n0,1\n0,2\n".as_bytes()).is_err());
}

#[test]
fn free_particle_has_no_bound_states() {
    let pot = Potential::free(1.0, 1.0).unwrap();
    let grid = RealGrid::new(-5.0, 5.0, 1001).unwrap();
    assert!(matches!(
        find_eigenvalues(&pot, &grid, 0.0, 10.0, 5),
        Err(SchrodingerError::NoEigenvalueInRange { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn wronskian_is_constant(e in 0.05..5.0f64, omega in 0.5..2.0f64) {
        let pot = Potential::harmonic(omega, 1.0, 1.0).unwrap();
        let grid = RealGrid::new(-3.0, 3.0, 6001).unwrap();
        let pair = solution_pair(&pot, e, &grid).unwrap();
        prop_assert!(pair.wronskian_drift() < 1e-7);
        prop_assert_eq!(pair.wronskian, pot.hbar);
    }

    #[test]
    fn linear_pairs_have_constant_wronskian(e in 0.0..3.0f64) {
        let pot = Potential::linear(1.0, 1.0, 1.0).unwrap();
        let grid = RealGrid::new(-3.0, 3.0, 6001).unwrap();
        prop_assert!(solution_pair(&pot, e, &grid).unwrap().wronskian_drift() < 1e-7);
    }

    #[test]
    fn seed_lies_where_motion_is_allowed(e in 0.05..4.0f64) {
        let pot = Potential::linear(1.0, 1.0, 1.0).unwrap();
        let grid = RealGrid::new(-3.0, 3.0, 601).unwrap();
        let i = seed_index(&pot, e, &grid).unwrap();
        prop_assert!(pot.value(grid.point(i)).unwrap() <= e);
        prop_assert!(i >= 1 && i <= grid.len() - 2);
    }
}
