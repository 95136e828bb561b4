//! Random states and bases for property tests and audits.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{DensityMatrix, MeasurementBasis, Predictor, Result};

pub use super::amplitude::random_series_parallel;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed unit vector.
pub fn random_predictor<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<Predictor> {
    Predictor::normalized((0..n).map(|_| gaussian(rng)).collect())
}

/// `G G† / tr(G G†)` for a complex Ginibre matrix `G`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<DensityMatrix> {
    let g = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let m = &g * g.adjoint();
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let trace = m.trace();
    DensityMatrix::new(m / trace)
}

/// Haar-distributed unitary by Gram-Schmidt on a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let mut q = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        let mut v = g.column(j).clone_owned();
        // two passes keep the columns orthonormal to rounding
        for _ in 0..2 {
            for k in 0..j {
                let qk = q.column(k).clone_owned();
                let proj = qk.dotc(&v);
                v -= qk * proj;
            }
        }
        let norm = v.norm();
        q.set_column(j, &(v / Complex64::new(norm, 0.0)));
    }
    q
}

pub fn random_basis<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<MeasurementBasis> {
    MeasurementBasis::from_unitary(&random_unitary(rng, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn random_objects_are_valid() {
        let mut rng = StdRng::seed_from_u64(1);
        for n in [2, 3, 5, 8] {
            assert_eq!(random_predictor(&mut rng, n).unwrap().dim(), n);
            assert!(random_density(&mut rng, n).unwrap().eigenvalues()[0] > 0.0);
            assert_eq!(random_basis(&mut rng, n).unwrap().dim(), n);
        }
    }
}
