//! Numerics for two strands of quantum foundations work.
//!
//! * [`schwarzian`], [`schrodinger1d`] and [`qshje`] build the quantum
//!   stationary Hamilton-Jacobi apparatus: Schwarzian calculus on sampled
//!   functions, a Numerov/shooting solver for the 1D stationary Schrödinger
//!   equation, and the reconstruction of the reduced action, quantum
//!   potential and Floyd trajectories from a pair of independent solutions.
//! * [`saqm`] is the statistical algorithm: predictors and the Born rule,
//!   amplitude composition, statistical distance, mutually unbiased bases
//!   and probability-table tomography, and the counting identities that
//!   separate classical, real and complex probability schemes.
//!
//! Every operation is a pure function of its inputs.

// `!(x <= tol)` deliberately treats NaN as a failure
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod qshje;
pub mod saqm;
pub mod schrodinger1d;
pub mod schwarzian;

pub use num_complex::Complex64;
