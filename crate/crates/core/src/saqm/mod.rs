//! The statistical algorithm of quantum mechanics as a standalone scheme.
//!
//! Predictors are unit vectors, outcome probabilities follow the Born rule,
//! amplitudes compose by the sum and product rules, and density matrices are
//! in bijection with probability tables over `N + 1` mutually unbiased bases.
//! The counting module holds the integer identities separating classical,
//! real and complex probability schemes.

pub mod amplitude;
pub mod born;
pub mod composite;
pub mod counting;
pub mod random;
pub mod state;
pub mod tomography;

use thiserror::Error;

pub use amplitude::{
    compose_amplitudes, compose_amplitudes_ordered, path_sum, reverse_amplitude, AmplitudeNetwork,
    Edge, ReductionOrder,
};
pub use born::{
    born_probabilities, continuous_path, exponent_deviation, statistical_distance,
    trace_probability,
};
pub use composite::{kron, no_signalling_check, partial_trace_b};
pub use counting::{
    hardy_counts, real_space_violation, wootters_g_identity, wootters_g_identity_with, HardyCounts,
    RealSpaceCounts,
};
pub use state::{hermitian_eigenvalues, DensityMatrix, MeasurementBasis, Predictor};
pub use tomography::{density_from_table, mub_set, table_from_density, MubSet, ProbabilityTable};

/// Normalization and Hermiticity tolerance of the state types.
pub const STATE_TOLERANCE: f64 = 1e-12;
/// Most negative eigenvalue still accepted as non-negative.
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SaqmError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("vector norm {norm} is not 1")]
    NotUnitNorm { norm: f64 },
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("trace {trace} is not 1")]
    NotUnitTrace { trace: f64 },
    #[error("negative eigenvalue {eigenvalue:e}: not a valid density matrix")]
    NegativeEigenvalue { eigenvalue: f64 },
    #[error("basis is not orthonormal (Gram deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },
    #[error("no mutually unbiased basis construction for dimension {0}")]
    UnsupportedDimension(usize),
    #[error("invalid probability table: {0}")]
    InvalidTable(String),
    #[error("cosine argument {value} lies outside [0, 1]")]
    ArgumentOutOfRange { value: f64 },
    #[error("network is not series-parallel reducible")]
    NotSeriesParallel,
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("effect has eigenvalue {eigenvalue} outside [0, 1]")]
    InvalidEffect { eigenvalue: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, SaqmError>;
