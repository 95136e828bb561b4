use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::{check_dim, hermitian_eigenvalues, hermiticity_deviation, norm};
use super::STATE_TOLERANCE;
use super::{DensityMatrix, MeasurementBasis, Predictor, Result, SaqmError, EIGENVALUE_FLOOR};

/// `p_k = |⟨a_k|ψ⟩|²`.
pub fn born_probabilities(psi: &Predictor, basis: &MeasurementBasis) -> Result<Vec<f64>> {
    Ok(basis
        .overlaps(psi.components())?
        .iter()
        .map(|c| c.norm_sqr())
        .collect())
}

/// `|Σ_i |⟨a_i|ψ⟩|^k - 1|`, zero for every state only at `k = 2`.
pub fn exponent_deviation(psi: &Predictor, basis: &MeasurementBasis, k: f64) -> Result<f64> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(SaqmError::InvalidArgument(format!(
            "exponent must be positive, got {k}"
        )));
    }
    let total: f64 = basis
        .overlaps(psi.components())?
        .iter()
        .map(|c| c.norm().powf(k))
        .sum();
    Ok((total - 1.0).abs())
}

/// `arccos Σ_i |⟨a_i|ψ₁⟩| |⟨a_i|ψ₂⟩|`, in `[0, π/2]`.
///
/// Evaluated as `2 asin(‖√p₁ - √p₂‖ / 2)`, the same quantity without the
/// loss of precision of `arccos` near 1.
pub fn statistical_distance(
    psi1: &Predictor,
    psi2: &Predictor,
    basis: &MeasurementBasis,
) -> Result<f64> {
    check_dim(psi1.dim(), psi2.dim())?;
    let a = basis.overlaps(psi1.components())?;
    let b = basis.overlaps(psi2.components())?;
    let cosine: f64 = a.iter().zip(&b).map(|(x, y)| x.norm() * y.norm()).sum();
    if cosine > 1.0 + STATE_TOLERANCE {
        return Err(SaqmError::ArgumentOutOfRange { value: cosine });
    }
    let chord = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x.norm() - y.norm()).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok((2.0 * (chord / 2.0).min(1.0).asin()).min(std::f64::consts::FRAC_PI_2))
}

/// `steps + 1` predictors along the geodesic from `psi_a` to the ray of
/// `psi_b`, generated by one fixed rotation in the plane of the two.
///
/// The global phase of `psi_b` is chosen to make `⟨a|b⟩` real and
/// non-negative; the last element equals `psi_b` up to that phase.
pub fn continuous_path(
    psi_a: &Predictor,
    psi_b: &Predictor,
    steps: usize,
) -> Result<Vec<Predictor>> {
    if steps == 0 {
        return Err(SaqmError::InvalidArgument(
            "steps must be at least 1".into(),
        ));
    }
    let overlap = psi_a.inner(psi_b)?;
    let phase = if overlap.norm() > 0.0 {
        overlap.conj() / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let a = psi_a.components();
    let c = overlap.norm();
    let orth: Vec<Complex64> = psi_b
        .components()
        .iter()
        .zip(a)
        .map(|(b, a)| phase * b - a * c)
        .collect();
    let s = norm(&orth);
    if s <= STATE_TOLERANCE {
        return Ok(vec![psi_a.clone(); steps + 1]);
    }
    let w: Vec<Complex64> = orth.iter().map(|x| x / s).collect();
    let theta = s.atan2(c);
    (0..=steps)
        .map(|j| {
            let t = theta * j as f64 / steps as f64;
            let (sin, cos) = t.sin_cos();
            Predictor::normalized(a.iter().zip(&w).map(|(a, w)| a * cos + w * sin).collect())
        })
        .collect()
}

/// `tr(ρ E)` for an effect `0 ≤ E ≤ I`, clamped to `[0, 1]`.
pub fn trace_probability(rho: &DensityMatrix, effect: &DMatrix<Complex64>) -> Result<f64> {
    check_dim(rho.dim(), effect.nrows())?;
    check_dim(rho.dim(), effect.ncols())?;
    if !(hermiticity_deviation(effect) <= STATE_TOLERANCE) {
        return Err(SaqmError::InvalidEffect {
            eigenvalue: f64::NAN,
        });
    }
    let ev = hermitian_eigenvalues(effect);
    for &e in [ev[0], ev[ev.len() - 1]].iter() {
        if !(EIGENVALUE_FLOOR..=1.0 - EIGENVALUE_FLOOR).contains(&e) {
            return Err(SaqmError::InvalidEffect { eigenvalue: e });
        }
    }
    Ok(rho.expectation(effect)?.re.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plus() -> Predictor {
        Predictor::new(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]).unwrap()
    }

    #[test]
    fn born_examples() {
        let z = MeasurementBasis::standard(3).unwrap();
        let e1 = Predictor::basis_vector(3, 1).unwrap();
        assert_eq!(born_probabilities(&e1, &z).unwrap(), vec![0.0, 1.0, 0.0]);
        let p = born_probabilities(&plus(), &MeasurementBasis::standard(2).unwrap()).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
        assert!(matches!(
            born_probabilities(&e1, &MeasurementBasis::standard(2).unwrap()),
            Err(SaqmError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn exponent_examples() {
        let z = MeasurementBasis::standard(2).unwrap();
        assert!(exponent_deviation(&plus(), &z, 2.0).unwrap() < 1e-15);
        let d = exponent_deviation(&plus(), &z, 1.0).unwrap();
        assert!((d - (2.0f64.sqrt() - 1.0)).abs() < 1e-15);
        let e = Predictor::basis_vector(2, 0).unwrap();
        for k in [0.5, 1.0, 3.0] {
            assert_eq!(exponent_deviation(&e, &z, k).unwrap(), 0.0);
        }
        assert!(exponent_deviation(&e, &z, 0.0).is_err());
    }

    #[test]
    fn distance_examples() {
        let z = MeasurementBasis::standard(2).unwrap();
        let e0 = Predictor::basis_vector(2, 0).unwrap();
        let e1 = Predictor::basis_vector(2, 1).unwrap();
        assert_eq!(statistical_distance(&e0, &e0, &z).unwrap(), 0.0);
        assert!((statistical_distance(&e0, &e1, &z).unwrap() - FRAC_PI_2).abs() < 1e-15);
        let d = statistical_distance(&e0, &plus(), &z).unwrap();
        assert!((d - FRAC_1_SQRT_2.acos()).abs() < 1e-15);
    }

    #[test]
    fn path_between_orthogonal_states() {
        let e0 = Predictor::basis_vector(2, 0).unwrap();
        let e1 = Predictor::basis_vector(2, 1).unwrap();
        let path = continuous_path(&e0, &e1, 4).unwrap();
        assert_eq!(path.len(), 5);
        let mid = path[2].components();
        assert!((mid[0].norm() - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((mid[1].norm() - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(path[4].same_ray(&e1, 1e-12));
        let z = MeasurementBasis::standard(2).unwrap();
        for pair in path.windows(2) {
            assert!(statistical_distance(&pair[0], &pair[1], &z).unwrap() < FRAC_PI_2 - 1e-3);
        }
    }

    #[test]
    fn constant_path() {
        let p = plus();
        let phased =
            Predictor::new(p.components().iter().map(|x| x * c(0.0, 1.0)).collect()).unwrap();
        for q in continuous_path(&p, &phased, 3).unwrap() {
            assert_eq!(q, p);
        }
    }

    #[test]
    fn trace_probability_examples() {
        let rho = DensityMatrix::pure(&plus());
        let id = DMatrix::<Complex64>::identity(2, 2);
        assert!((trace_probability(&rho, &id).unwrap() - 1.0).abs() < 1e-15);
        let p0 = MeasurementBasis::standard(2).unwrap().projector(0);
        assert!((trace_probability(&rho, &p0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(trace_probability(&rho, &DMatrix::zeros(2, 2)).unwrap(), 0.0);
        let bad = id * c(2.0, 0.0);
        assert!(matches!(
            trace_probability(&rho, &bad),
            Err(SaqmError::InvalidEffect { .. })
        ));
    }
}
