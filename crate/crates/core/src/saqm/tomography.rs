use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::check_dim;
use super::{DensityMatrix, MeasurementBasis, Result, SaqmError, STATE_TOLERANCE};

/// `N + 1` pairwise mutually unbiased bases of dimension `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct MubSet {
    bases: Vec<MeasurementBasis>,
}

impl MubSet {
    /// Checks that every cross-basis overlap-squared equals `1/N` within 1e-10.
    pub fn new(bases: Vec<MeasurementBasis>) -> Result<Self> {
        let n = bases.first().map_or(0, MeasurementBasis::dim);
        check_dim(n + 1, bases.len())?;
        for b in &bases {
            check_dim(n, b.dim())?;
        }
        let set = Self { bases };
        let deviation = set.unbiasedness_deviation();
        if !(deviation <= 1e-10) {
            return Err(SaqmError::NotOrthonormal { deviation });
        }
        Ok(set)
    }

    pub fn dim(&self) -> usize {
        self.bases[0].dim()
    }

    pub fn bases(&self) -> &[MeasurementBasis] {
        &self.bases
    }

    /// `max | |⟨e|f⟩|² - 1/N |` over vectors of distinct bases.
    pub fn unbiasedness_deviation(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for (i, a) in self.bases.iter().enumerate() {
            for b in &self.bases[i + 1..] {
                for e in a.vectors() {
                    for o in b.overlaps(e).expect("equal dimensions") {
                        worst = worst.max((o.norm_sqr() - 1.0 / n as f64).abs());
                    }
                }
            }
        }
        worst
    }
}

/// For `N = 2` the σz, σx, σy eigenbases in that order. For odd prime `N`
/// the computational basis followed by the bases
/// `e_j(k) = ω^{b k² + j k} / √N`, `b = 0..N`, with `ω = e^{2πi/N}`.
pub fn mub_set(n: usize) -> Result<MubSet> {
    if !is_prime(n) {
        return Err(SaqmError::UnsupportedDimension(n));
    }
    let c = |re, im| Complex64::new(re, im);
    let s = FRAC_1_SQRT_2;
    if n == 2 {
        return MubSet::new(vec![
            MeasurementBasis::standard(2)?,
            MeasurementBasis::new(vec![
                vec![c(s, 0.0), c(s, 0.0)],
                vec![c(s, 0.0), c(-s, 0.0)],
            ])?,
            MeasurementBasis::new(vec![
                vec![c(s, 0.0), c(0.0, s)],
                vec![c(s, 0.0), c(0.0, -s)],
            ])?,
        ]);
    }
    let norm = 1.0 / (n as f64).sqrt();
    let mut bases = vec![MeasurementBasis::standard(n)?];
    for b in 0..n {
        let vectors = (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| {
                        let e = (b * k * k + j * k) % n;
                        Complex64::from_polar(norm, TAU * e as f64 / n as f64)
                    })
                    .collect()
            })
            .collect();
        bases.push(MeasurementBasis::new(vectors)?);
    }
    MubSet::new(bases)
}

fn is_prime(n: usize) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

/// Outcome probabilities of the `N + 1` bases of a [`MubSet`]; row `b`
/// belongs to basis `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableJson", into = "TableJson")]
pub struct ProbabilityTable {
    n: usize,
    rows: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    n: usize,
    rows: Vec<Vec<f64>>,
}

impl TryFrom<TableJson> for ProbabilityTable {
    type Error = SaqmError;
    fn try_from(t: TableJson) -> Result<Self> {
        let table = Self::new(t.rows)?;
        check_dim(t.n, table.n)?;
        Ok(table)
    }
}

impl From<ProbabilityTable> for TableJson {
    fn from(t: ProbabilityTable) -> Self {
        Self {
            n: t.n,
            rows: t.rows,
        }
    }
}

impl ProbabilityTable {
    /// Requires an `(N + 1) × N` array with entries in `[0, 1]` and each
    /// row summing to 1 within 1e-12.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        if n < 2 {
            return Err(SaqmError::DimensionTooSmall(n));
        }
        if rows.len() != n + 1 {
            return Err(SaqmError::InvalidTable(format!(
                "{} rows for dimension {n}, expected {}",
                rows.len(),
                n + 1
            )));
        }
        for (b, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(SaqmError::InvalidTable(format!(
                    "row {b} has {} entries",
                    row.len()
                )));
            }
            if let Some(p) = row
                .iter()
                .find(|p| !(-STATE_TOLERANCE..=1.0 + STATE_TOLERANCE).contains(*p))
            {
                return Err(SaqmError::InvalidTable(format!("row {b} has entry {p}")));
            }
            let sum: f64 = row.iter().sum();
            if !((sum - 1.0).abs() <= STATE_TOLERANCE) {
                return Err(SaqmError::InvalidTable(format!("row {b} sums to {sum}")));
            }
        }
        Ok(Self { n, rows })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Largest entrywise difference.
    pub fn max_difference(&self, other: &ProbabilityTable) -> Result<f64> {
        check_dim(self.n, other.n)?;
        Ok(self
            .rows
            .iter()
            .flatten()
            .zip(other.rows.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain numbers serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| SaqmError::Serialization(e.to_string()))
    }
}

/// Entry `(b, i) = ⟨e_{b,i}|ρ|e_{b,i}⟩`.
pub fn table_from_density(rho: &DensityMatrix, mubs: &MubSet) -> Result<ProbabilityTable> {
    check_dim(mubs.dim(), rho.dim())?;
    let rows = mubs
        .bases()
        .iter()
        .map(|basis| {
            (0..basis.dim())
                .map(|i| {
                    let e = nalgebra::DVector::from_column_slice(basis.vector(i));
                    (e.adjoint() * rho.entries() * &e)[(0, 0)]
                        .re
                        .clamp(0.0, 1.0)
                })
                .collect()
        })
        .collect();
    Ok(ProbabilityTable {
        n: mubs.dim(),
        rows,
    })
}

/// `ρ = Σ_{b,i} p_{b,i} Π_{b,i} - I`, validated as a density matrix.
///
/// A table that no quantum state can produce fails with
/// `NegativeEigenvalue`.
pub fn density_from_table(table: &ProbabilityTable, mubs: &MubSet) -> Result<DensityMatrix> {
    let n = mubs.dim();
    check_dim(n, table.dim())?;
    let mut rho = -DMatrix::<Complex64>::identity(n, n);
    for (basis, row) in mubs.bases().iter().zip(table.rows()) {
        for (i, &p) in row.iter().enumerate() {
            rho += basis.projector(i) * Complex64::new(p, 0.0);
        }
    }
    // restore exact Hermiticity lost to rounding
    let rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    DensityMatrix::new(rho)
}

#[derive(Serialize, Deserialize)]
struct DensityJson {
    n: usize,
    real: Vec<Vec<f64>>,
    imag: Vec<Vec<f64>>,
}

impl DensityMatrix {
    /// `{"n": N, "real": [[..]], "imag": [[..]]}`.
    pub fn to_json(&self) -> String {
        let n = self.dim();
        let m = self.entries();
        let part = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..n)
                .map(|i| (0..n).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        serde_json::to_string(&DensityJson {
            n,
            real: part(|c| c.re),
            imag: part(|c| c.im),
        })
        .expect("plain numbers serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let d: DensityJson =
            serde_json::from_str(text).map_err(|e| SaqmError::Serialization(e.to_string()))?;
        let n = d.n;
        check_dim(n, d.real.len())?;
        check_dim(n, d.imag.len())?;
        for row in d.real.iter().chain(&d.imag) {
            check_dim(n, row.len())?;
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(d.real[i][j], d.imag[i][j])
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::saqm::Predictor;

    #[test]
    fn qubit_mubs_are_pauli_eigenbases() {
        let m = mub_set(2).unwrap();
        assert_eq!(m.bases().len(), 3);
        assert!(m.unbiasedness_deviation() < 1e-15);
        let y = m.bases()[2].vector(0);
        assert!((y[1] - Complex64::new(0.0, FRAC_1_SQRT_2)).norm() < 1e-16);
    }

    #[test]
    fn prime_mubs() {
        for n in [3, 5, 7] {
            let m = mub_set(n).unwrap();
            assert_eq!(m.bases().len(), n + 1);
            assert!(m.unbiasedness_deviation() < 1e-10);
        }
        for n in [0, 1, 4, 6, 9] {
            assert_eq!(mub_set(n), Err(SaqmError::UnsupportedDimension(n)));
        }
    }

    #[test]
    fn table_examples() {
        let m = mub_set(2).unwrap();
        let mixed = table_from_density(&DensityMatrix::maximally_mixed(2).unwrap(), &m).unwrap();
        assert!(mixed
            .rows()
            .iter()
            .flatten()
            .all(|&p| (p - 0.5).abs() < 1e-15));
        let zero = DensityMatrix::pure(&Predictor::basis_vector(2, 0).unwrap());
        let t = table_from_density(&zero, &m).unwrap();
        assert_eq!(t.rows()[0], vec![1.0, 0.0]);
        for row in &t.rows()[1..] {
            assert!((row[0] - 0.5).abs() < 1e-15 && (row[1] - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn inverse_examples() {
        let m = mub_set(2).unwrap();
        let half = ProbabilityTable::new(vec![vec![0.5, 0.5]; 3]).unwrap();
        let rho = density_from_table(&half, &m).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(rho.frobenius_distance(&mixed).unwrap() < 1e-15);
        let corner = ProbabilityTable::new(vec![vec![1.0, 0.0]; 3]).unwrap();
        match density_from_table(&corner, &m) {
            Err(SaqmError::NegativeEigenvalue { eigenvalue }) => {
                assert!((eigenvalue - (1.0 - 3f64.sqrt()) / 2.0).abs() < 1e-12)
            }
            other => panic!("expected NegativeEigenvalue, got {other:?}"),
        }
    }

    #[test]
    fn table_validation() {
        assert!(ProbabilityTable::new(vec![vec![0.5, 0.5]; 2]).is_err());
        assert!(ProbabilityTable::new(vec![vec![0.6, 0.5]; 3]).is_err());
        assert!(ProbabilityTable::new(vec![vec![1.5, -0.5]; 3]).is_err());
    }

    #[test]
    fn json_round_trips() {
        let m = mub_set(3).unwrap();
        let psi = Predictor::normalized(vec![
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.7, 0.2),
            Complex64::new(0.1, 0.9),
        ])
        .unwrap();
        let rho = DensityMatrix::pure(&psi);
        let t = table_from_density(&rho, &m).unwrap();
        let text = t.to_json();
        assert!(text.starts_with("{\"n\":3,\"rows\":"));
        assert_eq!(ProbabilityTable::from_json(&text).unwrap(), t);
        assert_eq!(DensityMatrix::from_json(&rho.to_json()).unwrap(), rho);
        assert!(ProbabilityTable::from_json(
            "{\"n\":2,\"rows\":[[0.5,0.5],[0.5,0.5],[0.5,0.5],[1,0]]}"
        )
        .is_err());
    }
}
