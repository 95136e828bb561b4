//! Stationary 1D Schrödinger equation `(-ħ²/2m ψ'' + V ψ) = E ψ`.
//!
//! Written as `ψ'' = g(q) ψ` with `g = 2m (V - E) / ħ²` and integrated with
//! the Numerov three-term recurrence. Eigenvalues are found by node-count
//! bracketing followed by bisection on the matching condition of a left and
//! a right shot.

use std::io::Read;
use std::path::Path;

use num_complex::Complex64;
use thiserror::Error;

use crate::schwarzian::{RealGrid, SchwarzianError};

/// Seed amplitude used at confining boundaries.
pub const WKB_SEED: f64 = 1e-30;
/// Shots are rescaled by `1 / RENORM_THRESHOLD` once they exceed it.
pub const RENORM_THRESHOLD: f64 = 1e100;
/// Unrenormalized integration fails past this magnitude.
pub const OVERFLOW_LIMIT: f64 = 1e300;
pub const BISECTION_TOLERANCE: f64 = 1e-12;
pub const BISECTION_MAX_ITER: usize = 60;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchrodingerError {
    #[error(transparent)]
    Grid(#[from] SchwarzianError),
    #[error("solution overflowed near q = {q}; shrink the domain or renormalize")]
    Overflow { q: f64 },
    #[error("no eigenvalue in [{e_min}, {e_max}]")]
    NoEigenvalueInRange { e_min: f64, e_max: f64 },
    #[error("solution pair is degenerate (zero Wronskian)")]
    DegeneratePair,
    #[error("seed values are both zero")]
    ZeroSeed,
    #[error("q = {q} lies outside the tabulated potential")]
    OutsideTable { q: f64 },
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("grid [{q_min}, {q_max}] does not coincide with the well walls [0, {length}]")]
    WallMismatch { q_min: f64, q_max: f64, length: f64 },
    #[error("invalid energy range [{e_min}, {e_max}]")]
    InvalidRange { e_min: f64, e_max: f64 },
    #[error("failed to read potential table: {0}")]
    Table(String),
}

/// Piecewise-linear potential from `(q, V)` samples; `q` strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPotential {
    q: Vec<f64>,
    v: Vec<f64>,
}

impl TabulatedPotential {
    pub fn new(q: Vec<f64>, v: Vec<f64>) -> Result<Self, SchrodingerError> {
        if q.len() != v.len() || q.len() < 2 {
            return Err(SchrodingerError::InvalidPotential(
                "table needs at least two (q, V) rows".into(),
            ));
        }
        if q.iter().chain(&v).any(|x| !x.is_finite()) {
            return Err(SchrodingerError::InvalidPotential(
                "table entries must be finite".into(),
            ));
        }
        if q.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SchrodingerError::InvalidPotential(
                "table q column must be strictly increasing".into(),
            ));
        }
        Ok(Self { q, v })
    }

    /// Two-column CSV `q,V`; a non-numeric first row is taken as a header.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self, SchrodingerError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let (mut q, mut v) = (Vec::new(), Vec::new());
        for (row, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| SchrodingerError::Table(e.to_string()))?;
            if record.len() != 2 {
                return Err(SchrodingerError::Table(format!(
                    "row {} has {} columns, expected 2",
                    row + 1,
                    record.len()
                )));
            }
            let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
            match parsed {
                (Ok(a), Ok(b)) => {
                    q.push(a);
                    v.push(b);
                }
                _ if row == 0 => continue,
                _ => {
                    return Err(SchrodingerError::Table(format!(
                        "row {} is not numeric",
                        row + 1
                    )))
                }
            }
        }
        Self::new(q, v)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self, SchrodingerError> {
        let file = std::fs::File::open(path.as_ref())
            .map_err(|e| SchrodingerError::Table(e.to_string()))?;
        Self::from_csv_reader(file)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.q[0], self.q[self.q.len() - 1])
    }

    pub fn value(&self, q: f64) -> Result<f64, SchrodingerError> {
        let (lo, hi) = self.domain();
        let slack = 1e-12 * (hi - lo);
        if q < lo - slack || q > hi + slack {
            return Err(SchrodingerError::OutsideTable { q });
        }
        let k = self
            .q
            .partition_point(|&x| x <= q)
            .clamp(1, self.q.len() - 1);
        let (q0, q1) = (self.q[k - 1], self.q[k]);
        let t = (q - q0) / (q1 - q0);
        Ok(self.v[k - 1] + t * (self.v[k] - self.v[k - 1]))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    /// `V = 0`.
    Free,
    /// `V = m ω² q² / 2`.
    Harmonic {
        omega: f64,
    },
    /// `V = 0` on `[0, L]` with Dirichlet walls at both ends.
    InfiniteWell {
        length: f64,
    },
    /// `V = slope · q`.
    Linear {
        slope: f64,
    },
    Tabulated(TabulatedPotential),
}

/// A potential together with the constants ħ and m of the equation.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    pub kind: PotentialKind,
    pub hbar: f64,
    pub mass: f64,
}

impl Potential {
    pub fn new(kind: PotentialKind, hbar: f64, mass: f64) -> Result<Self, SchrodingerError> {
        if !(hbar > 0.0 && hbar.is_finite()) || !(mass > 0.0 && mass.is_finite()) {
            return Err(SchrodingerError::InvalidPotential(
                "hbar and mass must be positive".into(),
            ));
        }
        match &kind {
            PotentialKind::Harmonic { omega } if !(*omega > 0.0 && omega.is_finite()) => {
                return Err(SchrodingerError::InvalidPotential(
                    "omega must be positive".into(),
                ))
            }
            PotentialKind::InfiniteWell { length } if !(*length > 0.0 && length.is_finite()) => {
                return Err(SchrodingerError::InvalidPotential(
                    "well length must be positive".into(),
                ))
            }
            PotentialKind::Linear { slope } if !slope.is_finite() => {
                return Err(SchrodingerError::InvalidPotential(
                    "slope must be finite".into(),
                ))
            }
            _ => {}
        }
        Ok(Self { kind, hbar, mass })
    }

    pub fn free(hbar: f64, mass: f64) -> Result<Self, SchrodingerError> {
        Self::new(PotentialKind::Free, hbar, mass)
    }

    pub fn harmonic(omega: f64, hbar: f64, mass: f64) -> Result<Self, SchrodingerError> {
        Self::new(PotentialKind::Harmonic { omega }, hbar, mass)
    }

    pub fn infinite_well(length: f64, hbar: f64, mass: f64) -> Result<Self, SchrodingerError> {
        Self::new(PotentialKind::InfiniteWell { length }, hbar, mass)
    }

    pub fn linear(slope: f64, hbar: f64, mass: f64) -> Result<Self, SchrodingerError> {
        Self::new(PotentialKind::Linear { slope }, hbar, mass)
    }

    pub fn tabulated(
        table: TabulatedPotential,
        hbar: f64,
        mass: f64,
    ) -> Result<Self, SchrodingerError> {
        Self::new(PotentialKind::Tabulated(table), hbar, mass)
    }

    /// Same potential with a different ħ.
    pub fn with_hbar(&self, hbar: f64) -> Result<Self, SchrodingerError> {
        Self::new(self.kind.clone(), hbar, self.mass)
    }

    pub fn value(&self, q: f64) -> Result<f64, SchrodingerError> {
        Ok(match &self.kind {
            PotentialKind::Free | PotentialKind::InfiniteWell { .. } => 0.0,
            PotentialKind::Harmonic { omega } => 0.5 * self.mass * omega * omega * q * q,
            PotentialKind::Linear { slope } => slope * q,
            PotentialKind::Tabulated(t) => t.value(q)?,
        })
    }

    pub fn is_hard_wall(&self) -> bool {
        matches!(self.kind, PotentialKind::InfiniteWell { .. })
    }

    /// Grid the CLI and tests use when none is given.
    pub fn reference_grid(&self, n_points: usize) -> Result<RealGrid, SchrodingerError> {
        let (lo, hi) = match &self.kind {
            PotentialKind::InfiniteWell { length } => (0.0, *length),
            PotentialKind::Tabulated(t) => t.domain(),
            _ => (-10.0, 10.0),
        };
        Ok(RealGrid::new(lo, hi, n_points)?)
    }

    fn check_grid(&self, grid: &RealGrid) -> Result<(), SchrodingerError> {
        if let PotentialKind::InfiniteWell { length } = self.kind {
            let tol = 1e-12 * length;
            if grid.q_min().abs() > tol || (grid.q_max() - length).abs() > tol {
                return Err(SchrodingerError::WallMismatch {
                    q_min: grid.q_min(),
                    q_max: grid.q_max(),
                    length,
                });
            }
        }
        Ok(())
    }

    /// Potential sampled on the grid.
    pub fn sample(&self, grid: &RealGrid) -> Result<Vec<f64>, SchrodingerError> {
        self.check_grid(grid)?;
        grid.points().map(|q| self.value(q)).collect()
    }

    /// `g = 2m (V - E) / ħ²` on the grid.
    fn coefficient(&self, energy: f64, grid: &RealGrid) -> Result<Vec<f64>, SchrodingerError> {
        let scale = 2.0 * self.mass / (self.hbar * self.hbar);
        Ok(self
            .sample(grid)?
            .into_iter()
            .map(|v| scale * (v - energy))
            .collect())
    }
}

/// Sampled solution of the stationary equation.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    pub grid: RealGrid,
    pub values: Vec<Complex64>,
    pub energy: f64,
}

impl Wavefunction {
    fn from_real(grid: RealGrid, values: &[f64], energy: f64) -> Self {
        Self {
            grid,
            values: values.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            energy,
        }
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    /// `h Σ |ψ_i|²`.
    pub fn norm_squared(&self) -> f64 {
        self.grid.spacing() * self.values.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// `h Σ conj(ψ_i) φ_i`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        let h = self.grid.spacing();
        h * self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
    }

    /// Number of sign changes of the real part, ignoring exact zeros.
    pub fn sign_changes(&self) -> usize {
        count_sign_changes(self.values.iter().map(|z| z.re))
    }
}

fn count_sign_changes(values: impl Iterator<Item = f64>) -> usize {
    let mut last = 0.0;
    let mut changes = 0;
    for x in values {
        if x == 0.0 || !x.is_finite() {
            continue;
        }
        if last != 0.0 && x.signum() != last {
            changes += 1;
        }
        last = x.signum();
    }
    changes
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    LeftToRight,
    RightToLeft,
}

/// Numerov recurrence for `ψ'' = g ψ`, in place on `y`.
///
/// `y[from]` and its neighbour towards `to` must be set; the recurrence
/// fills everything up to `to` inclusive.
fn propagate(
    g: &[f64],
    h: f64,
    y: &mut [f64],
    from: usize,
    to: usize,
    renormalize: bool,
) -> Result<(), usize> {
    let w = h * h / 12.0;
    let a = |i: usize| 1.0 - w * g[i];
    let forward = to > from;
    let steps = from.abs_diff(to);
    if steps < 2 {
        return Ok(());
    }
    let step = |i: usize| if forward { i + 1 } else { i - 1 };
    // Summed form: with phi = (1 - w g) y the recurrence is
    // phi[i+1] - 2 phi[i] + phi[i-1] = h^2 g[i] y[i]; carrying the first
    // difference of phi explicitly avoids the O(eps / h^2) loss of the
    // direct three-term form.
    let mut cur = step(from);
    let mut phi = a(cur) * y[cur];
    let mut delta = phi - a(from) * y[from];
    let mut lo = from;
    while cur != to {
        let next = step(cur);
        delta += h * h * g[cur] * y[cur];
        phi += delta;
        y[next] = phi / a(next);
        let mag = y[next].abs();
        if !mag.is_finite() {
            return Err(next);
        }
        if renormalize && mag > RENORM_THRESHOLD {
            let (l, r) = if forward { (lo, next) } else { (next, lo) };
            for v in &mut y[l..=r] {
                *v /= RENORM_THRESHOLD;
            }
            phi /= RENORM_THRESHOLD;
            delta /= RENORM_THRESHOLD;
            lo = from;
        } else if !renormalize && mag > OVERFLOW_LIMIT {
            return Err(next);
        }
        cur = next;
    }
    Ok(())
}

/// Propagate a solution across the whole grid from two seed values.
///
/// `LeftToRight` seeds `(ψ_0, ψ_1)`; `RightToLeft` seeds `(ψ_{n-1}, ψ_{n-2})`.
/// No renormalization is applied.
pub fn numerov_integrate(
    potential: &Potential,
    energy: f64,
    grid: &RealGrid,
    direction: Direction,
    seed: (f64, f64),
) -> Result<Wavefunction, SchrodingerError> {
    if seed.0 == 0.0 && seed.1 == 0.0 {
        return Err(SchrodingerError::ZeroSeed);
    }
    let g = potential.coefficient(energy, grid)?;
    let n = grid.len();
    let mut y = vec![0.0; n];
    let (from, to) = match direction {
        Direction::LeftToRight => {
            y[0] = seed.0;
            y[1] = seed.1;
            (0, n - 1)
        }
        Direction::RightToLeft => {
            y[n - 1] = seed.0;
            y[n - 2] = seed.1;
            (n - 1, 0)
        }
    };
    propagate(&g, grid.spacing(), &mut y, from, to, false)
        .map_err(|i| SchrodingerError::Overflow { q: grid.point(i) })?;
    Ok(Wavefunction::from_real(*grid, &y, energy))
}

/// Left and right shots at one energy, meeting at `matching`.
struct Shots {
    left: Vec<f64>,
    right: Vec<f64>,
    matching: usize,
}

impl Shots {
    fn compute(
        potential: &Potential,
        energy: f64,
        grid: &RealGrid,
        g: &[f64],
    ) -> Result<Self, SchrodingerError> {
        let n = grid.len();
        let h = grid.spacing();
        let matching = matching_index(potential, energy, grid)?;
        let mut left = vec![0.0; n];
        let mut right = vec![0.0; n];
        let (l0, l1) = boundary_seed(potential, g, h, 0);
        left[0] = l0;
        left[1] = l1;
        let (r0, r1) = boundary_seed(potential, g, h, n - 1);
        right[n - 1] = r0;
        right[n - 2] = r1;
        let overflow = |i: usize| SchrodingerError::Overflow { q: grid.point(i) };
        propagate(g, h, &mut left, 0, matching + 1, true).map_err(overflow)?;
        propagate(g, h, &mut right, n - 1, matching - 1, true).map_err(overflow)?;
        Ok(Self {
            left,
            right,
            matching,
        })
    }

    fn log_derivative_mismatch(&self, h: f64) -> f64 {
        let m = self.matching;
        let ld = |y: &[f64]| (y[m + 1] - y[m - 1]) / (2.0 * h * y[m]);
        ld(&self.left) - ld(&self.right)
    }

    /// Discrete Wronskian of the two shots, each scaled by its local maximum.
    /// Continuous in `E` and zero exactly when the shots are proportional.
    fn matching_function(&self) -> f64 {
        let m = self.matching;
        let scale = |y: &[f64]| y[m - 1].abs().max(y[m].abs()).max(y[m + 1].abs());
        let (l, r) = (&self.left, &self.right);
        (l[m + 1] * r[m] - l[m] * r[m + 1]) / (scale(l) * scale(r))
    }

    /// The two shots joined at the matching point, in unit discrete L² norm.
    fn joined(&self, grid: &RealGrid, energy: f64) -> Wavefunction {
        let m = self.matching;
        let (l, r) = (&self.left, &self.right);
        let s = (l[m] * r[m] + l[m + 1] * r[m + 1]) / (r[m] * r[m] + r[m + 1] * r[m + 1]);
        let mut y: Vec<f64> = (0..grid.len())
            .map(|i| if i <= m { l[i] } else { s * r[i] })
            .collect();
        let norm = (grid.spacing() * y.iter().map(|v| v * v).sum::<f64>()).sqrt();
        y.iter_mut().for_each(|v| *v /= norm);
        Wavefunction::from_real(*grid, &y, energy)
    }
}

/// Boundary seed at grid end `i`: Dirichlet for hard walls, WKB decay else.
fn boundary_seed(potential: &Potential, g: &[f64], h: f64, i: usize) -> (f64, f64) {
    if potential.is_hard_wall() {
        (0.0, h)
    } else {
        let kappa = g[i].max(0.0).sqrt();
        (WKB_SEED, WKB_SEED * (kappa * h).exp())
    }
}

/// Rightmost classical turning point, or the grid midpoint when there is none.
fn matching_index(
    potential: &Potential,
    energy: f64,
    grid: &RealGrid,
) -> Result<usize, SchrodingerError> {
    let n = grid.len();
    let mid = n / 2;
    if potential.is_hard_wall() {
        return Ok(mid);
    }
    let v = potential.sample(grid)?;
    let turning = (0..n - 1)
        .rev()
        .find(|&i| (v[i] - energy).signum() != (v[i + 1] - energy).signum());
    Ok(turning.unwrap_or(mid).clamp(2, n - 3))
}

/// Difference of the logarithmic derivatives of the left and right decaying
/// shots at the matching point. Zero when `E` admits a solution decaying at
/// both ends.
pub fn shoot_mismatch(
    potential: &Potential,
    energy: f64,
    grid: &RealGrid,
) -> Result<f64, SchrodingerError> {
    let g = potential.coefficient(energy, grid)?;
    let shots = Shots::compute(potential, energy, grid, &g)?;
    Ok(shots.log_derivative_mismatch(grid.spacing()))
}

/// Nodes of the left shot across the whole grid; equals the number of
/// eigenvalues below `energy`.
fn node_count(
    potential: &Potential,
    energy: f64,
    grid: &RealGrid,
) -> Result<usize, SchrodingerError> {
    let g = potential.coefficient(energy, grid)?;
    let n = grid.len();
    let mut y = vec![0.0; n];
    let (a, b) = boundary_seed(potential, &g, grid.spacing(), 0);
    y[0] = a;
    y[1] = b;
    propagate(&g, grid.spacing(), &mut y, 0, n - 1, true)
        .map_err(|i| SchrodingerError::Overflow { q: grid.point(i) })?;
    Ok(count_sign_changes(y.into_iter()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub energies: Vec<f64>,
    pub node_counts: Vec<usize>,
    pub wavefunctions: Vec<Wavefunction>,
}

impl EigenResult {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }
}

/// Upper energy limit for states decaying at both grid ends.
fn bound_state_ceiling(potential: &Potential, grid: &RealGrid) -> Result<f64, SchrodingerError> {
    if potential.is_hard_wall() {
        return Ok(f64::INFINITY);
    }
    let lo = potential.value(grid.q_min())?;
    let hi = potential.value(grid.q_max())?;
    Ok(lo.min(hi))
}

/// All eigenvalues in `[e_min, e_max]` (at most `max_count`), ascending, with
/// their normalized eigenfunctions.
pub fn find_eigenvalues(
    potential: &Potential,
    grid: &RealGrid,
    e_min: f64,
    e_max: f64,
    max_count: usize,
) -> Result<EigenResult, SchrodingerError> {
    if !(e_min.is_finite() && e_max.is_finite() && e_min < e_max) {
        return Err(SchrodingerError::InvalidRange { e_min, e_max });
    }
    let none = SchrodingerError::NoEigenvalueInRange { e_min, e_max };
    let top = e_max.min(bound_state_ceiling(potential, grid)?);
    if top <= e_min {
        return Err(none);
    }
    let n_lo = node_count(potential, e_min, grid)?;
    let n_hi = node_count(potential, top, grid)?;
    if n_hi <= n_lo || max_count == 0 {
        return Err(none);
    }

    let mut result = EigenResult {
        energies: Vec::new(),
        node_counts: Vec::new(),
        wavefunctions: Vec::new(),
    };
    let mut lower = e_min;
    for level in n_lo..n_hi.min(n_lo + max_count) {
        let energy = refine_level(potential, grid, level, lower, top)?;
        let g = potential.coefficient(energy, grid)?;
        let psi = Shots::compute(potential, energy, grid, &g)?.joined(grid, energy);
        result.node_counts.push(psi.sign_changes());
        result.energies.push(energy);
        result.wavefunctions.push(psi);
        lower = energy;
    }
    Ok(result)
}

/// Locate the eigenvalue with `level` nodes inside `(lo, hi)`.
fn refine_level(
    potential: &Potential,
    grid: &RealGrid,
    level: usize,
    mut lo: f64,
    mut hi: f64,
) -> Result<f64, SchrodingerError> {
    let matching_at = |e: f64| -> Result<f64, SchrodingerError> {
        let g = potential.coefficient(e, grid)?;
        Ok(Shots::compute(potential, e, grid, &g)?.matching_function())
    };
    let mut lo_nodes = node_count(potential, lo, grid)?;
    let mut hi_nodes = node_count(potential, hi, grid)?;
    let mut iterations = 0;
    // isolate: nodes(lo) == level, nodes(hi) == level + 1
    while (lo_nodes != level || hi_nodes != level + 1)
        && iterations < 4 * BISECTION_MAX_ITER
        && hi - lo > BISECTION_TOLERANCE
    {
        let mid = 0.5 * (lo + hi);
        let nodes = node_count(potential, mid, grid)?;
        if nodes <= level {
            lo = mid;
            lo_nodes = nodes;
        } else {
            hi = mid;
            hi_nodes = nodes;
        }
        iterations += 1;
    }

    let mut f_lo = matching_at(lo)?;
    let f_hi = matching_at(hi)?;
    let mut iterations = 0;
    if f_lo.signum() != f_hi.signum() {
        while hi - lo > BISECTION_TOLERANCE && iterations < BISECTION_MAX_ITER {
            let mid = 0.5 * (lo + hi);
            let f_mid = matching_at(mid)?;
            if f_mid == 0.0 {
                return Ok(mid);
            }
            if f_mid.signum() == f_lo.signum() {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
            iterations += 1;
        }
    } else {
        while hi - lo > BISECTION_TOLERANCE && iterations < BISECTION_MAX_ITER {
            let mid = 0.5 * (lo + hi);
            if node_count(potential, mid, grid)? <= level {
                lo = mid;
            } else {
                hi = mid;
            }
            iterations += 1;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Initial condition `ψ(q_ref) = value`, `ψ'(q_ref) = slope`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Seed {
    pub value: f64,
    pub slope: f64,
}

/// Two real, linearly independent solutions at one energy, scaled so that
/// the Wronskian `u v' - v u'` equals ħ.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionPair {
    pub grid: RealGrid,
    pub energy: f64,
    pub hbar: f64,
    pub mass: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// `u'` and `v'` samples (fourth-order accurate).
    pub du: Vec<f64>,
    pub dv: Vec<f64>,
    pub wronskian: f64,
    /// Grid index where the seeds were imposed.
    pub reference_index: usize,
}

impl SolutionPair {
    /// Build a pair from externally computed samples (e.g. closed forms).
    /// The samples are rescaled to the `W = ħ` convention.
    #[allow(clippy::too_many_arguments)]
    pub fn from_samples(
        grid: RealGrid,
        energy: f64,
        hbar: f64,
        mass: f64,
        u: Vec<f64>,
        du: Vec<f64>,
        v: Vec<f64>,
        dv: Vec<f64>,
        reference_index: usize,
    ) -> Result<Self, SchrodingerError> {
        let n = grid.len();
        for len in [u.len(), du.len(), v.len(), dv.len()] {
            if len != n {
                return Err(SchwarzianError::LengthMismatch {
                    expected: n,
                    got: len,
                }
                .into());
            }
        }
        let c = reference_index.min(n - 1);
        let w = u[c] * dv[c] - v[c] * du[c];
        let scale = (u[c].abs() + du[c].abs()) * (v[c].abs() + dv[c].abs());
        if !(w.abs() > 1e-12 * scale) {
            return Err(SchrodingerError::DegeneratePair);
        }
        let mut pair = Self {
            grid,
            energy,
            hbar,
            mass,
            u,
            v,
            du,
            dv,
            wronskian: w,
            reference_index: c,
        };
        pair.normalize();
        Ok(pair)
    }

    /// Closed-form free-particle pair `u = cos k(q - q_c)`, `v = sin k(q - q_c)`
    /// with `k = sqrt(2mE)/ħ`, `E > 0`.
    pub fn free_particle(
        grid: RealGrid,
        energy: f64,
        hbar: f64,
        mass: f64,
    ) -> Result<Self, SchrodingerError> {
        if !(energy > 0.0) {
            return Err(SchrodingerError::InvalidPotential(
                "closed-form free pair needs E > 0".into(),
            ));
        }
        let k = (2.0 * mass * energy).sqrt() / hbar;
        let c = grid.len() / 2;
        let qc = grid.point(c);
        let x: Vec<f64> = grid.points().map(|q| k * (q - qc)).collect();
        Self::from_samples(
            grid,
            energy,
            hbar,
            mass,
            x.iter().map(|t| t.cos()).collect(),
            x.iter().map(|t| -k * t.sin()).collect(),
            x.iter().map(|t| t.sin()).collect(),
            x.iter().map(|t| k * t.cos()).collect(),
            c,
        )
    }

    fn normalize(&mut self) {
        let lambda = (self.hbar / self.wronskian.abs()).sqrt();
        let flip = self.wronskian.signum();
        self.u.iter_mut().for_each(|x| *x *= lambda);
        self.du.iter_mut().for_each(|x| *x *= lambda);
        self.v.iter_mut().for_each(|x| *x *= lambda * flip);
        self.dv.iter_mut().for_each(|x| *x *= lambda * flip);
        self.wronskian = self.hbar;
    }

    /// Pointwise `u v' - v u'` from the stored samples.
    pub fn wronskian_profile(&self) -> Vec<f64> {
        (0..self.u.len())
            .map(|i| self.u[i] * self.dv[i] - self.v[i] * self.du[i])
            .collect()
    }

    /// `max |W(q) - W(q_ref)| / |W(q_ref)|`.
    pub fn wronskian_drift(&self) -> f64 {
        let profile = self.wronskian_profile();
        let w0 = profile[self.reference_index];
        profile
            .iter()
            .map(|w| (w - w0).abs() / w0.abs())
            .fold(0.0, f64::max)
    }

    pub fn u_wavefunction(&self) -> Wavefunction {
        Wavefunction::from_real(self.grid, &self.u, self.energy)
    }

    pub fn v_wavefunction(&self) -> Wavefunction {
        Wavefunction::from_real(self.grid, &self.v, self.energy)
    }
}

/// Local wavenumber `sqrt(2m|E - V|)/ħ` at the reference point, or `1/L` of
/// the grid when it vanishes.
/// Local wavenumber `sqrt|g|` at index `c`, floored by the turning-point
/// scale `|g'|^{1/3}` and by `1/L` so the seeded pair stays balanced near
/// and at turning points.
fn reference_wavenumber(g: &[f64], c: usize, grid: &RealGrid) -> f64 {
    let h = grid.spacing();
    let slope = (g[c + 1] - g[c - 1]) / (2.0 * h);
    g[c].abs()
        .sqrt()
        .max(slope.abs().cbrt())
        .max(1.0 / (grid.q_max() - grid.q_min()))
}

/// Default seed point: the grid midpoint when it is classically allowed
/// (`V <= E`), otherwise the centre of the allowed interval nearest to it,
/// and the midpoint again when no point is allowed.
pub fn seed_index(
    potential: &Potential,
    energy: f64,
    grid: &RealGrid,
) -> Result<usize, SchrodingerError> {
    let g = potential.coefficient(energy, grid)?;
    let n = g.len();
    let mid = n / 2;
    if g[mid] <= 0.0 {
        return Ok(mid);
    }
    let mut best: Option<(usize, usize)> = None;
    let mut i = 0;
    while i < n {
        if g[i] > 0.0 {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && g[i] <= 0.0 {
            i += 1;
        }
        let centre = (start + i - 1) / 2;
        if best.is_none_or(|(c, _)| centre.abs_diff(mid) < c.abs_diff(mid)) {
            best = Some((centre, i - start));
        }
    }
    Ok(best.map_or(mid, |(c, _)| c).clamp(1, n - 2))
}

/// Solution pair seeded at [`seed_index`]; see [`solution_pair_at`].
pub fn solution_pair(
    potential: &Potential,
    energy: f64,
    grid: &RealGrid,
) -> Result<SolutionPair, SchrodingerError> {
    solution_pair_at(
        potential,
        energy,
        grid,
        seed_index(potential, energy, grid)?,
    )
}

/// Solution pair seeded at index `reference` with `u = 1, u' = 0` and
/// `v = 0, v' = k_ref` (the local wavenumber), then rescaled to `W = ħ`.
/// `E` need not be an eigenvalue.
pub fn solution_pair_at(
    potential: &Potential,
    energy: f64,
    grid: &RealGrid,
    reference: usize,
) -> Result<SolutionPair, SchrodingerError> {
    let g = potential.coefficient(energy, grid)?;
    let c = reference.clamp(1, grid.len() - 2);
    let k = reference_wavenumber(&g, c, grid);
    solution_pair_with_seeds(
        potential,
        energy,
        grid,
        c,
        Seed {
            value: 1.0,
            slope: 0.0,
        },
        Seed {
            value: 0.0,
            slope: k,
        },
    )
}

/// Solution pair from explicit initial conditions at grid index `reference`.
pub fn solution_pair_with_seeds(
    potential: &Potential,
    energy: f64,
    grid: &RealGrid,
    reference: usize,
    seed_u: Seed,
    seed_v: Seed,
) -> Result<SolutionPair, SchrodingerError> {
    let g = potential.coefficient(energy, grid)?;
    let n = grid.len();
    let c = reference.clamp(1, n - 2);
    let h = grid.spacing();
    let integrate = |seed: Seed| -> Result<Vec<f64>, SchrodingerError> {
        if seed.value == 0.0 && seed.slope == 0.0 {
            return Err(SchrodingerError::ZeroSeed);
        }
        let mut y = vec![0.0; n];
        let (plus, minus) = taylor_neighbours(&g, c, h, seed);
        y[c] = seed.value;
        y[c + 1] = plus;
        y[c - 1] = minus;
        let overflow = |i: usize| SchrodingerError::Overflow { q: grid.point(i) };
        propagate(&g, h, &mut y, c, n - 1, false).map_err(overflow)?;
        propagate(&g, h, &mut y, c, 0, false).map_err(overflow)?;
        Ok(y)
    };
    let u = integrate(seed_u)?;
    let v = integrate(seed_v)?;
    let du = numerov_derivative(&g, h, &u);
    let dv = numerov_derivative(&g, h, &v);
    let w = seed_u.value * seed_v.slope - seed_v.value * seed_u.slope;
    let scale =
        (seed_u.value.abs() + seed_u.slope.abs()) * (seed_v.value.abs() + seed_v.slope.abs());
    if !(w.abs() > 1e-12 * scale) {
        return Err(SchrodingerError::DegeneratePair);
    }
    let mut pair = SolutionPair {
        grid: *grid,
        energy,
        hbar: potential.hbar,
        mass: potential.mass,
        u,
        v,
        du,
        dv,
        wronskian: w,
        reference_index: c,
    };
    pair.normalize();
    Ok(pair)
}

/// `ψ(q_c ± h)` from the Taylor series of `ψ'' = g ψ` through `h⁴`.
fn taylor_neighbours(g: &[f64], c: usize, h: f64, seed: Seed) -> (f64, f64) {
    let (y, y1) = (seed.value, seed.slope);
    let g0 = g[c];
    let g1 = (g[c + 1] - g[c - 1]) / (2.0 * h);
    let g2 = (g[c + 1] - 2.0 * g0 + g[c - 1]) / (h * h);
    let y2 = g0 * y;
    let y3 = g1 * y + g0 * y1;
    let y4 = g2 * y + 2.0 * g1 * y1 + g0 * y2;
    let even = y + h * h / 2.0 * y2 + h.powi(4) / 24.0 * y4;
    let odd = h * y1 + h.powi(3) / 6.0 * y3;
    (even + odd, even - odd)
}

/// `ψ'` from Numerov samples: `[(1 - h²g₊/6) ψ₊ - (1 - h²g₋/6) ψ₋] / 2h`.
///
/// At the two ends a ghost point is produced by one more Numerov step, with
/// `g` extrapolated quadratically from the three nearest grid values.
fn numerov_derivative(g: &[f64], h: f64, y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let w = h * h / 12.0;
    let central = |gm: f64, ym: f64, gp: f64, yp: f64| {
        ((1.0 - 2.0 * w * gp) * yp - (1.0 - 2.0 * w * gm) * ym) / (2.0 * h)
    };
    let ghost = |g0: f64, y0: f64, g1: f64, y1: f64, g_ghost: f64| {
        (2.0 * y0 * (1.0 + 5.0 * w * g0) - y1 * (1.0 - w * g1)) / (1.0 - w * g_ghost)
    };
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = central(g[i - 1], y[i - 1], g[i + 1], y[i + 1]);
    }
    let g_left = 3.0 * g[0] - 3.0 * g[1] + g[2];
    let y_left = ghost(g[0], y[0], g[1], y[1], g_left);
    d[0] = central(g_left, y_left, g[1], y[1]);
    let g_right = 3.0 * g[n - 1] - 3.0 * g[n - 2] + g[n - 3];
    let y_right = ghost(g[n - 1], y[n - 1], g[n - 2], y[n - 2], g_right);
    d[n - 1] = central(g[n - 2], y[n - 2], g_right, y_right);
    d
}
