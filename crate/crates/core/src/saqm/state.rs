use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Result, SaqmError, EIGENVALUE_FLOOR, STATE_TOLERANCE};

/// Unit vector holding the outcome probabilities of a preparation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct Predictor {
    components: Vec<Complex64>,
}

impl Predictor {
    /// Accepts `components` if its norm is 1 within [`STATE_TOLERANCE`].
    pub fn new(components: Vec<Complex64>) -> Result<Self> {
        if components.len() < 2 {
            return Err(SaqmError::DimensionTooSmall(components.len()));
        }
        let norm = norm(&components);
        if !((norm - 1.0).abs() <= STATE_TOLERANCE) {
            return Err(SaqmError::NotUnitNorm { norm });
        }
        Ok(Self { components })
    }

    /// Scales `components` to unit norm.
    pub fn normalized(components: Vec<Complex64>) -> Result<Self> {
        let n = norm(&components);
        if !(n > 0.0 && n.is_finite()) {
            return Err(SaqmError::NotUnitNorm { norm: n });
        }
        Self::new(components.into_iter().map(|c| c / n).collect())
    }

    /// Computational basis vector `j` of dimension `n`.
    pub fn basis_vector(n: usize, j: usize) -> Result<Self> {
        if j >= n {
            return Err(SaqmError::InvalidArgument(format!(
                "index {j} out of range for dimension {n}"
            )));
        }
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        c[j] = Complex64::new(1.0, 0.0);
        Self::new(c)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Complex64] {
        &self.components
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Predictor) -> Result<Complex64> {
        check_dim(self.dim(), other.dim())?;
        Ok(inner(&self.components, &other.components))
    }

    /// Equality of rays: `|⟨a|b⟩| = 1` within `tol`.
    pub fn same_ray(&self, other: &Predictor, tol: f64) -> bool {
        self.inner(other)
            .map(|c| (c.norm() - 1.0).abs() <= tol)
            .unwrap_or(false)
    }
}

impl TryFrom<Vec<Complex64>> for Predictor {
    type Error = SaqmError;
    fn try_from(v: Vec<Complex64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Predictor> for Vec<Complex64> {
    fn from(p: Predictor) -> Self {
        p.components
    }
}

/// Orthonormal basis; vector `k` plays the role of the eigenvector `|a_k⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    vectors: Vec<Vec<Complex64>>,
}

impl MeasurementBasis {
    /// Accepts `vectors` if its Gram matrix is the identity within
    /// [`STATE_TOLERANCE`].
    pub fn new(vectors: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = vectors.len();
        if n < 2 {
            return Err(SaqmError::DimensionTooSmall(n));
        }
        for v in &vectors {
            check_dim(n, v.len())?;
        }
        let mut deviation: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                deviation = deviation.max((inner(&vectors[i], &vectors[j]) - target).norm());
            }
        }
        if !(deviation <= STATE_TOLERANCE) {
            return Err(SaqmError::NotOrthonormal { deviation });
        }
        Ok(Self { vectors })
    }

    pub fn standard(n: usize) -> Result<Self> {
        Self::new(
            (0..n)
                .map(|j| {
                    (0..n)
                        .map(|k| Complex64::new(if j == k { 1.0 } else { 0.0 }, 0.0))
                        .collect()
                })
                .collect(),
        )
    }

    /// Columns of a unitary matrix.
    pub fn from_unitary(u: &DMatrix<Complex64>) -> Result<Self> {
        Self::new(
            (0..u.ncols())
                .map(|j| u.column(j).iter().copied().collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> &[Complex64] {
        &self.vectors[k]
    }

    /// `⟨a_k|ψ⟩` for every `k`.
    pub fn overlaps(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        check_dim(self.dim(), psi.len())?;
        Ok(self.vectors.iter().map(|a| inner(a, psi)).collect())
    }

    /// `|a_k⟩⟨a_k|`.
    pub fn projector(&self, k: usize) -> DMatrix<Complex64> {
        let v = DVector::from_column_slice(&self.vectors[k]);
        &v * v.adjoint()
    }

    /// Basis vectors as the element `k` of the predictor type.
    pub fn predictor(&self, k: usize) -> Predictor {
        Predictor {
            components: self.vectors[k].clone(),
        }
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity and trace within [`STATE_TOLERANCE`] and
    /// eigenvalues above [`EIGENVALUE_FLOOR`].
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        let n = entries.nrows();
        check_dim(n, entries.ncols())?;
        if n < 2 {
            return Err(SaqmError::DimensionTooSmall(n));
        }
        let deviation = hermiticity_deviation(&entries);
        if !(deviation <= STATE_TOLERANCE) {
            return Err(SaqmError::NotHermitian { deviation });
        }
        let trace = entries.trace();
        if !((trace - 1.0).norm() <= STATE_TOLERANCE) {
            return Err(SaqmError::NotUnitTrace { trace: trace.re });
        }
        let lowest = hermitian_eigenvalues(&entries)[0];
        if lowest < EIGENVALUE_FLOOR {
            return Err(SaqmError::NegativeEigenvalue { eigenvalue: lowest });
        }
        Ok(Self { entries })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn pure(psi: &Predictor) -> Self {
        let v = DVector::from_column_slice(psi.components());
        Self {
            entries: &v * v.adjoint(),
        }
    }

    /// `I / n`.
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        Self::new(DMatrix::identity(n, n) / Complex64::new(n as f64, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.entries)
    }

    /// Frobenius norm of `self - other`.
    pub fn frobenius_distance(&self, other: &DensityMatrix) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok((&self.entries - &other.entries).norm())
    }

    /// `tr(ρ M)`.
    pub fn expectation(&self, m: &DMatrix<Complex64>) -> Result<Complex64> {
        check_dim(self.dim(), m.nrows())?;
        check_dim(self.dim(), m.ncols())?;
        Ok((&self.entries * m).trace())
    }
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let hermitian = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut ev: Vec<f64> = SymmetricEigen::new(hermitian)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub(crate) fn hermiticity_deviation(m: &DMatrix<Complex64>) -> f64 {
    (m - m.adjoint())
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(SaqmError::DimensionMismatch { expected, got })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn predictor_requires_unit_norm() {
        assert!(matches!(
            Predictor::new(vec![c(1.0, 0.0), c(1.0, 0.0)]),
            Err(SaqmError::NotUnitNorm { .. })
        ));
        assert!(matches!(
            Predictor::new(vec![c(1.0, 0.0)]),
            Err(SaqmError::DimensionTooSmall(1))
        ));
        let p = Predictor::normalized(vec![c(3.0, 0.0), c(0.0, 4.0)]).unwrap();
        assert!((p.components()[1] - c(0.0, 0.8)).norm() < 1e-15);
    }

    #[test]
    fn same_ray_ignores_global_phase() {
        let a = Predictor::normalized(vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let phase = Complex64::from_polar(1.0, 0.7);
        let b = Predictor::new(a.components().iter().map(|x| x * phase).collect()).unwrap();
        assert!(a.same_ray(&b, 1e-12));
        assert!(!a.same_ray(&Predictor::basis_vector(2, 0).unwrap(), 1e-12));
    }

    #[test]
    fn basis_is_validated() {
        assert!(MeasurementBasis::standard(3).is_ok());
        let skew = vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ];
        assert!(matches!(
            MeasurementBasis::new(skew),
            Err(SaqmError::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn density_matrix_validation() {
        let neg =
            DMatrix::from_row_slice(2, 2, &[c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)]);
        assert!(matches!(
            DensityMatrix::new(neg),
            Err(SaqmError::NegativeEigenvalue { .. })
        ));
        let skew =
            DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        assert!(matches!(
            DensityMatrix::new(skew),
            Err(SaqmError::NotHermitian { .. })
        ));
        let trace = DMatrix::identity(2, 2);
        assert!(matches!(
            DensityMatrix::new(trace),
            Err(SaqmError::NotUnitTrace { .. })
        ));
        let mixed = DensityMatrix::maximally_mixed(3).unwrap();
        for e in mixed.eigenvalues() {
            assert!((e - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn complex_hermitian_eigenvalues() {
        // σy has eigenvalues ±1
        let sy =
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        let ev = hermitian_eigenvalues(&sy);
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }
}
