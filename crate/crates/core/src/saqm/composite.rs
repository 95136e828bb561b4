use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::check_dim;
use super::{table_from_density, DensityMatrix, MeasurementBasis, MubSet, Result};

/// Kronecker product; composite index `i_A · N_B + i_B`.
pub fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b)
}

/// `Tr_B ρ` for a state on `N_A · N_B`.
pub fn partial_trace_b(rho: &DensityMatrix, n_a: usize, n_b: usize) -> Result<DensityMatrix> {
    check_dim(n_a * n_b, rho.dim())?;
    let m = rho.entries();
    let reduced = DMatrix::from_fn(n_a, n_a, |i, j| {
        (0..n_b)
            .map(|k| m[(i * n_b + k, j * n_b + k)])
            .sum::<Complex64>()
    });
    DensityMatrix::new((&reduced + reduced.adjoint()) * Complex64::new(0.5, 0.0))
}

/// Largest difference between the side-A MUB tables obtained by summing
/// the joint outcome probabilities over each side-B basis, and between
/// each of those and the table of the reduced state.
pub fn no_signalling_check(
    rho_joint: &DensityMatrix,
    side_b: [&MeasurementBasis; 2],
    mub_a: &MubSet,
) -> Result<f64> {
    let n_a = mub_a.dim();
    let n_b = side_b[0].dim();
    check_dim(n_b, side_b[1].dim())?;
    check_dim(n_a * n_b, rho_joint.dim())?;
    let direct = table_from_density(&partial_trace_b(rho_joint, n_a, n_b)?, mub_a)?;
    let conditioned: Vec<Vec<Vec<f64>>> = side_b
        .iter()
        .map(|basis_b| {
            mub_a
                .bases()
                .iter()
                .map(|basis_a| {
                    (0..n_a)
                        .map(|i| {
                            (0..n_b)
                                .map(|j| {
                                    let effect = kron(&basis_a.projector(i), &basis_b.projector(j));
                                    rho_joint.expectation(&effect).map(|p| p.re)
                                })
                                .sum::<Result<f64>>()
                        })
                        .collect::<Result<Vec<f64>>>()
                })
                .collect::<Result<Vec<Vec<f64>>>>()
        })
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for ((r0, r1), rd) in conditioned[0]
        .iter()
        .zip(&conditioned[1])
        .zip(direct.rows())
    {
        for ((&x, &y), &d) in r0.iter().zip(r1).zip(rd) {
            worst = worst
                .max((x - y).abs())
                .max((x - d).abs())
                .max((y - d).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::saqm::{mub_set, Predictor};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn z_and_x() -> (MeasurementBasis, MeasurementBasis) {
        let m = mub_set(2).unwrap();
        (m.bases()[0].clone(), m.bases()[1].clone())
    }

    #[test]
    fn product_state_does_not_signal() {
        let a = DensityMatrix::pure(
            &Predictor::normalized(vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)])
                .unwrap(),
        );
        let b = DensityMatrix::maximally_mixed(2).unwrap();
        let joint = DensityMatrix::new(kron(a.entries(), b.entries())).unwrap();
        let (z, x) = z_and_x();
        assert!(no_signalling_check(&joint, [&z, &x], &mub_set(2).unwrap()).unwrap() < 1e-15);
        let back = partial_trace_b(&joint, 2, 2).unwrap();
        assert!(back.frobenius_distance(&a).unwrap() < 1e-15);
    }

    #[test]
    fn bell_state_marginal_is_mixed() {
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let bell = DensityMatrix::pure(&Predictor::new(vec![s, zero, zero, s]).unwrap());
        let (z, x) = z_and_x();
        assert!(no_signalling_check(&bell, [&z, &x], &mub_set(2).unwrap()).unwrap() < 1e-12);
        let marginal = partial_trace_b(&bell, 2, 2).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(marginal.frobenius_distance(&mixed).unwrap() < 1e-15);
    }

    #[test]
    fn dimension_checks() {
        let (z, x) = z_and_x();
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(no_signalling_check(&rho, [&z, &x], &mub_set(2).unwrap()).is_err());
    }
}
