//! Reduced action, quantum potential and Floyd trajectories from a pair of
//! independent solutions of the stationary Schrödinger equation.
//!
//! With `θ = arg(u + i v)` unwrapped along the grid, the reduced action is
//! `S₀ = ħ θ` and the conjugate momentum `p = S₀' = ħ W / (u² + v²)`, where
//! `W` is the (constant) Wronskian of the pair. The quantum stationary
//! Hamilton-Jacobi equation
//!
//! ```text
//! (1/2m) S₀'² + V - E = -(ħ²/4m) {S₀, q}
//! ```
//!
//! is then checked numerically with `Q = (ħ²/4m) {S₀, q}`.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use thiserror::Error;

use crate::schrodinger1d::{
    seed_index, solution_pair, solution_pair_at, Potential, SchrodingerError, SolutionPair,
    Wavefunction,
};
use crate::schwarzian::{schwarzian, InteriorSamples, RealGrid, SampledFunction, SchwarzianError};

/// Fraction of grid points dropped at each edge by sup-norm checks.
pub const EDGE_FRACTION: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QshjeError {
    #[error(transparent)]
    Schwarzian(#[from] SchwarzianError),
    #[error(transparent)]
    Schrodinger(#[from] SchrodingerError),
    #[error("solution pair is degenerate (zero Wronskian)")]
    DegeneratePair,
    #[error("bipolar coefficients A = B = 0 give the zero function")]
    DegenerateCoefficients,
    #[error("reduced action has non-positive momentum at q = {q}")]
    NonPositiveMomentum { q: f64 },
    #[error("time is not strictly monotone near q = {q}")]
    NonMonotoneTime { q: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("energy {energy} has no classically allowed region on the grid")]
    NoAllowedRegion { energy: f64 },
}

/// Quantum reduced action `S₀` with its exact derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedAction {
    pub grid: RealGrid,
    pub s0: Vec<f64>,
    pub s0_prime: Vec<f64>,
    pub energy: f64,
    pub hbar: f64,
    pub mass: f64,
    /// Wronskian of the generating pair.
    pub wronskian: f64,
    /// `ħ |W| / max(u² + v²)`, a lower bound for `|S₀'|`.
    pub momentum_floor: f64,
}

impl ReducedAction {
    /// `a S₀ + b`, with the derivative scaled accordingly.
    pub fn affine(&self, a: f64, b: f64) -> Self {
        Self {
            s0: self.s0.iter().map(|s| a * s + b).collect(),
            s0_prime: self.s0_prime.iter().map(|p| a * p).collect(),
            momentum_floor: self.momentum_floor * a.abs(),
            ..self.clone()
        }
    }

    pub fn min_abs_momentum(&self) -> f64 {
        self.s0_prime
            .iter()
            .map(|p| p.abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// `max |e^{2iS₀/ħ} (u - iv)/(u + iv) - 1|` against the generating pair.
    pub fn phase_deviation(&self, pair: &SolutionPair) -> f64 {
        (0..self.s0.len())
            .map(|i| {
                let psi = Complex64::new(pair.u[i], pair.v[i]);
                let phase = Complex64::from_polar(1.0, 2.0 * self.s0[i] / self.hbar);
                (phase * psi.conj() / psi - 1.0).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// `S₀ = ħ arg(u + i v)`, unwrapped continuously and anchored so that
/// `S₀ = 0` at the pair's reference point; `S₀' = ħ W / (u² + v²)`.
///
/// With this orientation `e^{2iS₀/ħ} = (u + iv)/(u - iv)`.
pub fn reduced_action_from_pair(
    pair: &SolutionPair,
    hbar: f64,
) -> Result<ReducedAction, QshjeError> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(QshjeError::InvalidArgument("hbar must be positive".into()));
    }
    let w = pair.wronskian;
    if w == 0.0 || !w.is_finite() {
        return Err(QshjeError::DegeneratePair);
    }
    let n = pair.u.len();
    let mut theta = Vec::with_capacity(n);
    let mut prev = 0.0;
    for i in 0..n {
        let raw = pair.v[i].atan2(pair.u[i]);
        let t = if i == 0 {
            raw
        } else {
            raw + 2.0 * PI * ((prev - raw) / (2.0 * PI)).round()
        };
        theta.push(t);
        prev = t;
    }
    let anchor = 2.0 * PI * (theta[pair.reference_index] / (2.0 * PI)).round();
    let r: Vec<f64> = (0..n)
        .map(|i| pair.u[i] * pair.u[i] + pair.v[i] * pair.v[i])
        .collect();
    let r_max = r.iter().copied().fold(0.0, f64::max);
    Ok(ReducedAction {
        grid: pair.grid,
        s0: theta.iter().map(|t| hbar * (t - anchor)).collect(),
        s0_prime: r.iter().map(|ri| hbar * w / ri).collect(),
        energy: pair.energy,
        hbar,
        mass: pair.mass,
        wronskian: w,
        momentum_floor: hbar * w.abs() / r_max,
    })
}

/// `Q = (ħ²/4m) {S₀, q}` on the interior; higher derivatives of `S₀` are
/// finite differences of the exact `S₀'` samples.
pub fn quantum_potential(action: &ReducedAction) -> Result<InteriorSamples, QshjeError> {
    let f = SampledFunction::from_real(action.grid, &action.s0)?.with_derivative(
        1,
        action
            .s0_prime
            .iter()
            .map(|&p| Complex64::new(p, 0.0))
            .collect(),
    )?;
    let k = action.hbar * action.hbar / (4.0 * action.mass);
    Ok(schwarzian(&f)?.map(|_, s| Complex64::new(k * s.re, 0.0)))
}

/// Index range left after dropping [`EDGE_FRACTION`] of the points per side.
pub fn central_range(grid: &RealGrid) -> std::ops::RangeInclusive<usize> {
    let n = grid.len();
    let edge = ((n - 1) as f64 * EDGE_FRACTION).ceil() as usize;
    edge..=(n - 1 - edge)
}

/// Pointwise `(1/2m) S₀'² + V - E + Q` wherever `Q` is defined.
pub fn qshje_residual_profile(
    action: &ReducedAction,
    potential: &Potential,
) -> Result<InteriorSamples, QshjeError> {
    let q = quantum_potential(action)?;
    let v = potential.sample(&action.grid)?;
    let m = action.mass;
    Ok(q.map(|i, qi| {
        let p = action.s0_prime[i];
        Complex64::new(p * p / (2.0 * m) + v[i] - action.energy + qi.re, 0.0)
    }))
}

/// Sup of the QSHJE residual over the central 90% of the grid.
pub fn qshje_residual(action: &ReducedAction, potential: &Potential) -> Result<f64, QshjeError> {
    let profile = qshje_residual_profile(action, potential)?;
    let central = central_range(&action.grid);
    Ok(profile
        .iter()
        .filter(|(i, _, _)| central.contains(i))
        .map(|(_, _, r)| r.re.abs())
        .fold(0.0, f64::max))
}

/// `ψ = (S₀')^{-1/2} (A e^{iS₀/ħ} + B e^{-iS₀/ħ})`.
///
/// `(A, B) = (1/2, 1/2)` reproduces `u / ħ` and `(1/2i, -1/2i)` reproduces
/// `v / ħ` for a pair in the `W = ħ` convention.
pub fn bipolar_reconstruct(
    action: &ReducedAction,
    a: Complex64,
    b: Complex64,
) -> Result<Wavefunction, QshjeError> {
    if a == Complex64::new(0.0, 0.0) && b == Complex64::new(0.0, 0.0) {
        return Err(QshjeError::DegenerateCoefficients);
    }
    let mut values = Vec::with_capacity(action.s0.len());
    for (i, (&s, &p)) in action.s0.iter().zip(&action.s0_prime).enumerate() {
        if !(p > 0.0) {
            return Err(QshjeError::NonPositiveMomentum {
                q: action.grid.point(i),
            });
        }
        let phase = Complex64::from_polar(1.0, s / action.hbar);
        values.push((a * phase + b * phase.conj()) / p.sqrt());
    }
    Ok(Wavefunction {
        grid: action.grid,
        values,
        energy: action.energy,
    })
}

/// Relative sup-norm error of `candidate` against `target` after the best
/// single complex rescale of `candidate`, restricted to `range`.
pub fn rescaled_relative_error(
    candidate: &[Complex64],
    target: &[Complex64],
    range: std::ops::RangeInclusive<usize>,
) -> f64 {
    let (mut num, mut den) = (Complex64::new(0.0, 0.0), 0.0);
    for i in range.clone() {
        num += candidate[i].conj() * target[i];
        den += candidate[i].norm_sqr();
    }
    let alpha = num / den;
    let scale = range.clone().map(|i| target[i].norm()).fold(0.0, f64::max);
    range
        .map(|i| (alpha * candidate[i] - target[i]).norm())
        .fold(0.0, f64::max)
        / scale
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub q: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
}

/// `1e-6 · max(|E|, 1)`.
pub fn default_energy_step(energy: f64) -> f64 {
    1e-6 * energy.abs().max(1.0)
}

/// Floyd trajectory from Jacobi's theorem `t(q) = ∂S₀/∂E` by a central
/// difference over `E ± dE`, all three pairs seeded at the same point.
///
/// The trajectory covers the grid minus [`EDGE_FRACTION`] at each end and
/// starts at `t = 0`.
pub fn floyd_trajectory(
    potential: &Potential,
    energy: f64,
    grid: &RealGrid,
    d_energy: f64,
) -> Result<Trajectory, QshjeError> {
    if !(d_energy > 0.0 && d_energy.is_finite()) {
        return Err(QshjeError::InvalidArgument(format!(
            "energy step must be positive, got {d_energy}"
        )));
    }
    let reference = seed_index(potential, energy, grid)?;
    let action_at = |e: f64| -> Result<ReducedAction, QshjeError> {
        reduced_action_from_pair(
            &solution_pair_at(potential, e, grid, reference)?,
            potential.hbar,
        )
    };
    let (lower, centre, upper) = std::thread::scope(|s| {
        let lo = s.spawn(|| action_at(energy - d_energy));
        let hi = s.spawn(|| action_at(energy + d_energy));
        let mid = action_at(energy);
        (
            lo.join().expect("worker panicked"),
            mid,
            hi.join().expect("worker panicked"),
        )
    });
    let (lower, centre, upper) = (lower?, centre?, upper?);

    let raw: Vec<f64> = (0..grid.len())
        .map(|i| (upper.s0[i] - lower.s0[i]) / (2.0 * d_energy))
        .collect();
    let central = central_range(grid);
    let (first, last) = (*central.start(), *central.end());
    let ascending = raw[last] > raw[first];
    for i in (first + 1)..=last {
        let step = raw[i] - raw[i - 1];
        if !(if ascending { step > 0.0 } else { step < 0.0 }) {
            return Err(QshjeError::NonMonotoneTime { q: grid.point(i) });
        }
    }
    let t0 = raw[first];
    Ok(Trajectory {
        samples: central
            .map(|i| TrajectorySample {
                t: raw[i] - t0,
                q: grid.point(i),
                p: centre.s0_prime[i],
            })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalLimitRow {
    pub hbar: f64,
    /// `sup |Q|` over the central half of the allowed region.
    pub sup_abs_q: f64,
    /// `min |S₀' - sqrt(2m(E - V))|` over the same region.
    pub min_momentum_deviation: f64,
    /// `max |S₀' - sqrt(2m(E - V))|` over the same region.
    pub max_momentum_deviation: f64,
    /// `min |S₀'|` over the whole grid.
    pub min_abs_momentum: f64,
}

/// Middle half (by index) of the classically allowed interval `V < E`.
pub fn central_allowed_range(v: &[f64], energy: f64) -> Option<std::ops::RangeInclusive<usize>> {
    let first = v.iter().position(|&x| x < energy)?;
    let last = v.iter().rposition(|&x| x < energy)?;
    let quarter = (last - first) / 4;
    Some((first + quarter)..=(last - quarter))
}

/// Quantum potential and momentum against the classical `sqrt(2m(E - V))`
/// for each ħ of the sequence.
pub fn classical_limit_scan(
    potential: &Potential,
    energy: f64,
    grid: &RealGrid,
    hbar_sequence: &[f64],
) -> Result<Vec<ClassicalLimitRow>, QshjeError> {
    let v = potential.sample(grid)?;
    let range = central_allowed_range(&v, energy).ok_or(QshjeError::NoAllowedRegion { energy })?;
    hbar_sequence
        .iter()
        .map(|&hbar| {
            let pot = potential.with_hbar(hbar)?;
            let action = reduced_action_from_pair(&solution_pair(&pot, energy, grid)?, hbar)?;
            let q = quantum_potential(&action)?;
            let mut row = ClassicalLimitRow {
                hbar,
                sup_abs_q: 0.0,
                min_momentum_deviation: f64::INFINITY,
                max_momentum_deviation: 0.0,
                min_abs_momentum: action.min_abs_momentum(),
            };
            for i in range.clone() {
                if let Some(qi) = q.get(i) {
                    row.sup_abs_q = row.sup_abs_q.max(qi.re.abs());
                }
                let classical = (2.0 * action.mass * (energy - v[i])).sqrt();
                let dev = (action.s0_prime[i].abs() - classical).abs();
                row.min_momentum_deviation = row.min_momentum_deviation.min(dev);
                row.max_momentum_deviation = row.max_momentum_deviation.max(dev);
            }
            Ok(row)
        })
        .collect()
}

/// CSV with header `q,S0,p,Q,residual`, one row per point where `Q` exists.
pub fn write_action_csv<W: Write>(
    mut out: W,
    action: &ReducedAction,
    potential: &Potential,
) -> Result<(), QshjeError> {
    let q = quantum_potential(action)?;
    let residual = qshje_residual_profile(action, potential)?;
    let io = |e: io::Error| QshjeError::InvalidArgument(e.to_string());
    writeln!(out, "q,S0,p,Q,residual").map_err(io)?;
    for (i, x, qi) in q.iter() {
        let r = residual.get(i).unwrap_or_default().re;
        writeln!(
            out,
            "{x:e},{:e},{:e},{:e},{r:e}",
            action.s0[i], action.s0_prime[i], qi.re
        )
        .map_err(io)?;
    }
    Ok(())
}

/// CSV with header `t,q,p`.
pub fn write_trajectory_csv<W: Write>(mut out: W, trajectory: &Trajectory) -> io::Result<()> {
    writeln!(out, "t,q,p")?;
    for s in &trajectory.samples {
        writeln!(out, "{:e},{:e},{:e}", s.t, s.q, s.p)?;
    }
    Ok(())
}
