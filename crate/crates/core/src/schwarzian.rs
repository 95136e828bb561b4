//! Schwarzian derivative on uniform grids.
//!
//! The Schwarzian `{f, x} = f'''/f' - 3/2 (f''/f')^2` is computed from
//! sampled values. Callers may attach analytic derivative samples; any order
//! that is missing is produced by centered finite differences of the highest
//! lower order that is available:
//!
//! * first and second derivatives: 3-point centered stencils, `O(h^2)`;
//! * third derivative from values: 4-point centered stencil, `O(h^2)`.
//!
//! Results are only reported where every stencil fits, as an
//! [`InteriorSamples`] carrying explicit index bounds.

use num_complex::Complex64;
use thiserror::Error;

/// Minimum number of grid points; the third-derivative stencil plus a
/// non-trivial interior needs at least this many.
pub const MIN_GRID_POINTS: usize = 9;

/// `|f'| < VANISHING_RATIO * max|f'|` counts as a vanishing derivative.
pub const VANISHING_RATIO: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchwarzianError {
    #[error("grid needs at least {MIN_GRID_POINTS} points, got {0}")]
    GridTooSmall(usize),
    #[error("invalid grid bounds [{q_min}, {q_max}]")]
    InvalidBounds { q_min: f64, q_max: f64 },
    #[error("sample length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("first derivative vanishes at q = {q}")]
    DerivativeVanishes { q: f64 },
    #[error("Moebius denominator vanishes at q = {q}")]
    PoleOnGrid { q: f64 },
    #[error("Moebius map is degenerate (AD - BC = 0)")]
    DegenerateMap,
    #[error("coordinate map is not strictly monotone near q = {q}")]
    NonMonotoneMap { q: f64 },
    #[error("sampled functions live on different grids")]
    GridMismatch,
    #[error("derivative order must be 1, 2 or 3, got {0}")]
    InvalidOrder(usize),
}

/// Uniform grid `q_min = q_0 < q_1 < ... < q_{n-1} = q_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealGrid {
    q_min: f64,
    q_max: f64,
    n_points: usize,
}

impl RealGrid {
    pub fn new(q_min: f64, q_max: f64, n_points: usize) -> Result<Self, SchwarzianError> {
        if !(q_min.is_finite() && q_max.is_finite() && q_min < q_max) {
            return Err(SchwarzianError::InvalidBounds { q_min, q_max });
        }
        if n_points < MIN_GRID_POINTS {
            return Err(SchwarzianError::GridTooSmall(n_points));
        }
        Ok(Self {
            q_min,
            q_max,
            n_points,
        })
    }

    pub fn q_min(&self) -> f64 {
        self.q_min
    }

    pub fn q_max(&self) -> f64 {
        self.q_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.q_max - self.q_min) / (self.n_points - 1) as f64
    }

    /// Coordinate of grid point `i`. The last point is exactly `q_max`.
    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.q_max
        } else {
            self.q_min + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.point(i))
    }

    /// Index of the grid point nearest to `q`, clamped to the grid.
    pub fn nearest_index(&self, q: f64) -> usize {
        let x = ((q - self.q_min) / self.spacing()).round();
        x.clamp(0.0, (self.n_points - 1) as f64) as usize
    }
}

/// Samples of a (possibly complex) function on a [`RealGrid`], with optional
/// caller-supplied derivative samples of orders 1 to 3.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: RealGrid,
    values: Vec<Complex64>,
    derivatives: [Option<Vec<Complex64>>; 3],
}

impl SampledFunction {
    pub fn new(grid: RealGrid, values: Vec<Complex64>) -> Result<Self, SchwarzianError> {
        check_len(&grid, values.len())?;
        Ok(Self {
            grid,
            values,
            derivatives: [None, None, None],
        })
    }

    pub fn from_real(grid: RealGrid, values: &[f64]) -> Result<Self, SchwarzianError> {
        Self::new(
            grid,
            values.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn from_fn(grid: RealGrid, f: impl Fn(f64) -> Complex64) -> Self {
        Self {
            grid,
            values: grid.points().map(f).collect(),
            derivatives: [None, None, None],
        }
    }

    pub fn from_real_fn(grid: RealGrid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |q| Complex64::new(f(q), 0.0))
    }

    /// Values and the first three derivatives, all from closures.
    pub fn analytic(
        grid: RealGrid,
        f: impl Fn(f64) -> Complex64,
        d1: impl Fn(f64) -> Complex64,
        d2: impl Fn(f64) -> Complex64,
        d3: impl Fn(f64) -> Complex64,
    ) -> Self {
        let sample = |g: &dyn Fn(f64) -> Complex64| grid.points().map(g).collect::<Vec<_>>();
        Self {
            grid,
            values: sample(&f),
            derivatives: [Some(sample(&d1)), Some(sample(&d2)), Some(sample(&d3))],
        }
    }

    /// Real-valued variant of [`SampledFunction::analytic`].
    pub fn analytic_real(
        grid: RealGrid,
        f: impl Fn(f64) -> f64,
        d1: impl Fn(f64) -> f64,
        d2: impl Fn(f64) -> f64,
        d3: impl Fn(f64) -> f64,
    ) -> Self {
        let c = |x: f64| Complex64::new(x, 0.0);
        Self::analytic(grid, |q| c(f(q)), |q| c(d1(q)), |q| c(d2(q)), |q| c(d3(q)))
    }

    /// Attach derivative samples of the given order (1, 2 or 3).
    pub fn with_derivative(
        mut self,
        order: usize,
        samples: Vec<Complex64>,
    ) -> Result<Self, SchwarzianError> {
        if !(1..=3).contains(&order) {
            return Err(SchwarzianError::InvalidOrder(order));
        }
        check_len(&self.grid, samples.len())?;
        self.derivatives[order - 1] = Some(samples);
        Ok(self)
    }

    pub fn without_derivatives(mut self) -> Self {
        self.derivatives = [None, None, None];
        self
    }

    pub fn grid(&self) -> &RealGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn derivative(&self, order: usize) -> Option<&[Complex64]> {
        match order {
            1..=3 => self.derivatives[order - 1].as_deref(),
            _ => None,
        }
    }
}

fn check_len(grid: &RealGrid, got: usize) -> Result<(), SchwarzianError> {
    if got != grid.len() {
        return Err(SchwarzianError::LengthMismatch {
            expected: grid.len(),
            got,
        });
    }
    Ok(())
}

/// Samples defined on the index range `first..=last` of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct InteriorSamples {
    grid: RealGrid,
    first: usize,
    values: Vec<Complex64>,
}

impl InteriorSamples {
    pub fn new(grid: RealGrid, first: usize, values: Vec<Complex64>) -> Self {
        debug_assert!(first + values.len() <= grid.len());
        Self {
            grid,
            first,
            values,
        }
    }

    pub fn grid(&self) -> &RealGrid {
        &self.grid
    }

    pub fn first(&self) -> usize {
        self.first
    }

    /// Last valid grid index (inclusive).
    pub fn last(&self) -> usize {
        self.first + self.values.len() - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Value at grid index `i`, `None` outside the valid range.
    pub fn get(&self, i: usize) -> Option<Complex64> {
        i.checked_sub(self.first)
            .and_then(|k| self.values.get(k).copied())
    }

    /// `(grid index, q, value)` triples.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64, Complex64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(k, &v)| (self.first + k, self.grid.point(self.first + k), v))
    }

    pub fn map(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            first: self.first,
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(k, &v)| f(self.first + k, v))
                .collect(),
        }
    }

    /// Sup-norm of `self - other` over the common index range.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        let lo = self.first.max(other.first);
        let hi = self.last().min(other.last());
        (lo..=hi)
            .filter_map(|i| Some((self.get(i)? - other.get(i)?).norm()))
            .fold(0.0, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Constants `xi` and `m` entering the inhomogeneous term
/// `(q^A; q^B) = -(xi^2 / 4m) {q^A, q^B}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HjConstants {
    pub xi: f64,
    pub mass: f64,
}

impl HjConstants {
    pub fn new(xi: f64, mass: f64) -> Self {
        Self { xi, mass }
    }

    /// `xi^2 / 4m`.
    pub fn coefficient(&self) -> f64 {
        self.xi * self.xi / (4.0 * self.mass)
    }
}

/// Derivatives of orders 1..=3 on the full grid, valid on `margin..n-margin`.
struct DerivativeStack {
    d: [Vec<Complex64>; 3],
    margin: usize,
}

impl DerivativeStack {
    fn build(f: &SampledFunction) -> Self {
        let h = f.grid.spacing();
        let supplied = |k: usize| f.derivatives[k].clone();

        let (d1, m1) = match supplied(0) {
            Some(d) => (d, 0),
            None => (first_difference(&f.values, h), 1),
        };
        let (d2, m2) = match (supplied(1), &f.derivatives[0]) {
            (Some(d), _) => (d, 0),
            (None, Some(d1)) => (first_difference(d1, h), 1),
            (None, None) => (second_difference(&f.values, h), 1),
        };
        let (d3, m3) = match (supplied(2), &f.derivatives[1], &f.derivatives[0]) {
            (Some(d), _, _) => (d, 0),
            (None, Some(d2), _) => (first_difference(d2, h), 1),
            (None, None, Some(d1)) => (second_difference(d1, h), 1),
            (None, None, None) => (third_difference(&f.values, h), 2),
        };
        Self {
            d: [d1, d2, d3],
            margin: m1.max(m2).max(m3),
        }
    }

    fn range(&self) -> std::ops::RangeInclusive<usize> {
        let n = self.d[0].len();
        self.margin..=(n - 1 - self.margin)
    }
}

fn first_difference(v: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = v.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for i in 1..n - 1 {
        out[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
    out
}

fn second_difference(v: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = v.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for i in 1..n - 1 {
        out[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h);
    }
    out
}

fn third_difference(v: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = v.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for i in 2..n - 2 {
        out[i] = (v[i + 2] - 2.0 * v[i + 1] + 2.0 * v[i - 1] - v[i - 2]) / (2.0 * h * h * h);
    }
    out
}

fn check_nonvanishing(
    grid: &RealGrid,
    d1: &[Complex64],
    range: std::ops::RangeInclusive<usize>,
) -> Result<(), SchwarzianError> {
    let max = range.clone().map(|i| d1[i].norm()).fold(0.0, f64::max);
    for i in range {
        if !(d1[i].norm() >= VANISHING_RATIO * max) || max == 0.0 {
            return Err(SchwarzianError::DerivativeVanishes { q: grid.point(i) });
        }
    }
    Ok(())
}

/// `{f, x} = f'''/f' - 3/2 (f''/f')^2` on the range where all stencils fit.
pub fn schwarzian(f: &SampledFunction) -> Result<InteriorSamples, SchwarzianError> {
    let stack = DerivativeStack::build(f);
    let [d1, d2, d3] = &stack.d;
    check_nonvanishing(&f.grid, d1, stack.range())?;
    let values = stack
        .range()
        .map(|i| {
            let r2 = d2[i] / d1[i];
            d3[i] / d1[i] - 1.5 * r2 * r2
        })
        .collect();
    Ok(InteriorSamples::new(f.grid, stack.margin, values))
}

/// Möbius map `w -> (A w + B) / (C w + D)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl MoebiusMap {
    pub fn new(
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
    ) -> Result<Self, SchwarzianError> {
        let m = Self { a, b, c, d };
        let scale = (a * d).norm() + (b * c).norm();
        if !(m.determinant().norm() > f64::EPSILON * scale) {
            return Err(SchwarzianError::DegenerateMap);
        }
        Ok(m)
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Result<Self, SchwarzianError> {
        let z = |x: f64| Complex64::new(x, 0.0);
        Self::new(z(a), z(b), z(c), z(d))
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            a: one,
            b: zero,
            c: zero,
            d: one,
        }
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, w: Complex64) -> Complex64 {
        (self.a * w + self.b) / (self.c * w + self.d)
    }

    /// `self ∘ other`, i.e. the coefficient-matrix product `self * other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }
}

/// Pointwise `(A f + B)/(C f + D)`; supplied derivatives are pushed through
/// the chain rule, missing ones stay missing.
pub fn apply_moebius(
    m: &MoebiusMap,
    f: &SampledFunction,
) -> Result<SampledFunction, SchwarzianError> {
    let n = f.values.len();
    let det = m.determinant();
    let mut values = Vec::with_capacity(n);
    // h'(w), h''(w), h'''(w) for h(w) = (A w + B)/(C w + D)
    let mut h = Vec::with_capacity(n);
    for (i, &w) in f.values.iter().enumerate() {
        let den = m.c * w + m.d;
        let scale = (m.c * w).norm() + m.d.norm();
        if !(den.norm() > 1e-12 * scale) {
            return Err(SchwarzianError::PoleOnGrid { q: f.grid.point(i) });
        }
        values.push((m.a * w + m.b) / den);
        let inv = 1.0 / den;
        let h1 = det * inv * inv;
        let h2 = -2.0 * m.c * h1 * inv;
        let h3 = -3.0 * m.c * h2 * inv;
        h.push([h1, h2, h3]);
    }

    let d = &f.derivatives;
    let d1 = d[0]
        .as_ref()
        .map(|d1| (0..n).map(|i| h[i][0] * d1[i]).collect());
    let d2 = match (&d[0], &d[1]) {
        (Some(d1), Some(d2)) => Some(
            (0..n)
                .map(|i| h[i][1] * d1[i] * d1[i] + h[i][0] * d2[i])
                .collect(),
        ),
        _ => None,
    };
    let d3 = match (&d[0], &d[1], &d[2]) {
        (Some(d1), Some(d2), Some(d3)) => Some(
            (0..n)
                .map(|i| {
                    h[i][2] * d1[i] * d1[i] * d1[i]
                        + 3.0 * h[i][1] * d1[i] * d2[i]
                        + h[i][0] * d3[i]
                })
                .collect(),
        ),
        _ => None,
    };
    Ok(SampledFunction {
        grid: f.grid,
        values,
        derivatives: [d1, d2, d3],
    })
}

/// `sup |{M∘f, x} - {f, x}|` over the common interior.
pub fn moebius_invariance_deviation(
    f: &SampledFunction,
    m: &MoebiusMap,
) -> Result<f64, SchwarzianError> {
    let s = schwarzian(f)?;
    let s_moved = schwarzian(&apply_moebius(m, f)?)?;
    Ok(s.sup_distance(&s_moved))
}

fn check_monotone(
    grid: &RealGrid,
    d1: &[Complex64],
    range: std::ops::RangeInclusive<usize>,
) -> Result<(), SchwarzianError> {
    let mut sign = 0.0;
    for i in range {
        let s = d1[i].re.signum();
        if d1[i].re == 0.0 || (sign != 0.0 && s != sign) {
            return Err(SchwarzianError::NonMonotoneMap { q: grid.point(i) });
        }
        sign = s;
    }
    Ok(())
}

/// `(q^A; q^B) = -(xi^2/4m) {q^A, q^B}` for a map sampled over `q^B`.
pub fn inhomogeneous_term(
    map: &SampledFunction,
    constants: &HjConstants,
) -> Result<InteriorSamples, SchwarzianError> {
    let k = constants.coefficient();
    Ok(schwarzian(map)?.map(|_, s| -k * s))
}

/// Deviation of the cocycle identity
/// `(q^A; q^C) = (∂_{q^C} q^B)^2 [(q^A; q^B) - (q^C; q^B)]`.
///
/// `qa` and `qc` are sampled over the base coordinate `q^B` on `qb_grid`.
/// The left side is computed from the derivatives of `q^A` with respect to
/// `q^C` (change of variable), the right side from the two Schwarzians in
/// `q^B`.
pub fn cocycle_deviation(
    qa: &SampledFunction,
    qb_grid: &RealGrid,
    qc: &SampledFunction,
    constants: &HjConstants,
) -> Result<f64, SchwarzianError> {
    if qa.grid != *qb_grid || qc.grid != *qb_grid {
        return Err(SchwarzianError::GridMismatch);
    }
    let sa = DerivativeStack::build(qa);
    let sc = DerivativeStack::build(qc);
    let margin = sa.margin.max(sc.margin);
    let range = margin..=(qb_grid.len() - 1 - margin);
    check_monotone(qb_grid, &sa.d[0], range.clone())?;
    check_monotone(qb_grid, &sc.d[0], range.clone())?;

    let k = constants.coefficient();
    let mut worst: f64 = 0.0;
    for i in range {
        let [a1, a2, a3] = [sa.d[0][i], sa.d[1][i], sa.d[2][i]];
        let [c1, c2, c3] = [sc.d[0][i], sc.d[1][i], sc.d[2][i]];

        // derivatives of q^A with respect to q^C
        let da1 = a1 / c1;
        let da2 = (a2 * c1 - a1 * c2) / (c1 * c1 * c1);
        let da3 = (a3 * c1 - a1 * c3) / c1.powi(4) - 3.0 * c2 * (a2 * c1 - a1 * c2) / c1.powi(5);
        let r = da2 / da1;
        let lhs = -k * (da3 / da1 - 1.5 * r * r);

        let ra = a2 / a1;
        let rc = c2 / c1;
        let s_ab = a3 / a1 - 1.5 * ra * ra;
        let s_cb = c3 / c1 - 1.5 * rc * rc;
        let rhs = (1.0 / (c1 * c1)) * (-k * s_ab + k * s_cb);

        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// Whether [`transform_w`] keeps the inhomogeneous Schwarzian term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformLaw {
    /// `W'(q') = (∂_{q'} q)^2 W(q) + (q; q')`.
    Quantum,
    /// Quadratic-differential law `W'(q') = (∂_{q'} q)^2 W(q)`.
    Classical,
}

/// Transform `W(q)` under the coordinate change `q' = map(q)`.
///
/// The result is indexed by the original grid: entry `i` is `W'` evaluated
/// at `q' = map(q_i)`. The inhomogeneous term uses
/// `{q, q'} = -(∂_{q'} q)^2 {q', q}`.
pub fn transform_w(
    w: &SampledFunction,
    map: &SampledFunction,
    constants: &HjConstants,
    law: TransformLaw,
) -> Result<InteriorSamples, SchwarzianError> {
    if w.grid != map.grid {
        return Err(SchwarzianError::GridMismatch);
    }
    let stack = DerivativeStack::build(map);
    check_monotone(&map.grid, &stack.d[0], stack.range())?;
    let jac = &stack.d[0];
    let inhomogeneous = match law {
        TransformLaw::Quantum => Some(schwarzian(map)?),
        TransformLaw::Classical => None,
    };
    let first = stack.margin;
    let values = stack
        .range()
        .map(|i| {
            let dq = 1.0 / jac[i];
            let mut out = dq * dq * w.values[i];
            if let Some(s) = &inhomogeneous {
                // (q; q') = -k {q, q'} = k (∂_{q'} q)^2 {q', q}
                out += constants.coefficient() * dq * dq * s.get(i).unwrap_or_default();
            }
            out
        })
        .collect();
    Ok(InteriorSamples::new(map.grid, first, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert_eq!(
            RealGrid::new(0.0, 1.0, 8),
            Err(SchwarzianError::GridTooSmall(8))
        );
        assert!(matches!(
            RealGrid::new(1.0, 1.0, 20),
            Err(SchwarzianError::InvalidBounds { .. })
        ));
        let g = RealGrid::new(-1.0, 1.0, 21).unwrap();
        assert!((g.spacing() - 0.1).abs() < 1e-15);
        assert_eq!(g.point(20), 1.0);
        assert_eq!(g.nearest_index(0.0), 10);
    }

    #[test]
    fn identity_has_zero_schwarzian() {
        let g = RealGrid::new(-1.0, 1.0, 101).unwrap();
        let f = SampledFunction::from_real_fn(g, |x| x);
        let s = schwarzian(&f).unwrap();
        assert_eq!(s.first(), 2);
        assert_eq!(s.last(), 98);
        assert!(s.sup_norm() < 1e-9);
    }

    #[test]
    fn moebius_function_has_zero_schwarzian() {
        let g = RealGrid::new(0.0, 1.0, 201).unwrap();
        let f = SampledFunction::from_real_fn(g, |x| (2.0 * x + 1.0) / (x + 3.0));
        assert!(schwarzian(&f).unwrap().sup_norm() < 1e-3);
        let fa = SampledFunction::analytic_real(
            g,
            |x| (2.0 * x + 1.0) / (x + 3.0),
            |x| 5.0 / (x + 3.0).powi(2),
            |x| -10.0 / (x + 3.0).powi(3),
            |x| 30.0 / (x + 3.0).powi(4),
        );
        let s = schwarzian(&fa).unwrap();
        assert_eq!(s.len(), 201);
        assert!(s.sup_norm() < 1e-12);
    }

    #[test]
    fn complex_exponential_has_schwarzian_two() {
        let g = RealGrid::new(0.0, 1.0, 401).unwrap();
        let i = Complex64::i();
        let f = SampledFunction::analytic(
            g,
            |x| (2.0 * i * x).exp(),
            |x| 2.0 * i * (2.0 * i * x).exp(),
            |x| -4.0 * (2.0 * i * x).exp(),
            |x| -8.0 * i * (2.0 * i * x).exp(),
        );
        let s = schwarzian(&f).unwrap();
        assert!(s.values().iter().all(|v| (v - c(2.0)).norm() < 1e-12));
        let fd = schwarzian(&f.without_derivatives()).unwrap();
        assert!(fd.values().iter().all(|v| (v - c(2.0)).norm() < 1e-3));
    }

    #[test]
    fn tangent_has_schwarzian_two() {
        let g = RealGrid::new(0.1, 1.0, 901).unwrap();
        let f = SampledFunction::from_real_fn(g, f64::tan);
        let s = schwarzian(&f).unwrap();
        assert!(s.values().iter().all(|v| (v - c(2.0)).norm() < 1e-3));
    }

    #[test]
    fn vanishing_derivative_is_reported() {
        let g = RealGrid::new(-1.0, 1.0, 101).unwrap();
        let f = SampledFunction::from_real_fn(g, |x| x * x);
        assert!(matches!(
            schwarzian(&f),
            Err(SchwarzianError::DerivativeVanishes { .. })
        ));
        let flat = SampledFunction::from_real_fn(g, |_| 3.0);
        assert!(matches!(
            schwarzian(&flat),
            Err(SchwarzianError::DerivativeVanishes { .. })
        ));
    }

    #[test]
    fn moebius_identity_and_inversion() {
        let g = RealGrid::new(1.0, 2.0, 11).unwrap();
        let f = SampledFunction::from_real_fn(g, |x| x);
        let same = apply_moebius(&MoebiusMap::identity(), &f).unwrap();
        assert_eq!(same.values(), f.values());
        let inv = MoebiusMap::real(0.0, 1.0, 1.0, 0.0).unwrap();
        let out = apply_moebius(&inv, &f).unwrap();
        for (q, v) in g.points().zip(out.values()) {
            assert!((v - c(1.0 / q)).norm() < 1e-15);
        }
    }

    #[test]
    fn moebius_composition_matches_matrix_product() {
        let g = RealGrid::new(0.0, 1.0, 21).unwrap();
        let f = SampledFunction::from_real_fn(g, |x| x * x + 0.5);
        let m1 = MoebiusMap::real(2.0, 1.0, 0.5, 3.0).unwrap();
        let m2 = MoebiusMap::real(1.0, -1.0, 1.0, 4.0).unwrap();
        let twice = apply_moebius(&m1, &apply_moebius(&m2, &f).unwrap()).unwrap();
        // oracle: 2x2 matrix product written out by hand
        let (a, b, cc, d) = (
            2.0 * 1.0 + 1.0 * 1.0,
            -(2.0 * 1.0) + 1.0 * 4.0,
            0.5 * 1.0 + 3.0 * 1.0,
            -(0.5 * 1.0) + 3.0 * 4.0,
        );
        let product = MoebiusMap::real(a, b, cc, d).unwrap();
        assert_eq!(m1.compose(&m2), product);
        let once = apply_moebius(&product, &f).unwrap();
        for (x, y) in twice.values().iter().zip(once.values()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn pole_and_degenerate_map_are_rejected() {
        let g = RealGrid::new(-1.0, 1.0, 21).unwrap();
        let f = SampledFunction::from_real_fn(g, |x| x);
        let m = MoebiusMap::real(1.0, 0.0, 1.0, 0.0);
        assert_eq!(m, Err(SchwarzianError::DegenerateMap));
        let pole = MoebiusMap::real(0.0, 1.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            apply_moebius(&pole, &f),
            Err(SchwarzianError::PoleOnGrid { .. })
        ));
    }

    #[test]
    fn invariance_under_translation_and_dilation() {
        let g = RealGrid::new(0.1, 1.0, 201).unwrap();
        let tan = SampledFunction::analytic_real(
            g,
            f64::tan,
            |x| 1.0 / x.cos().powi(2),
            |x| 2.0 * x.tan() / x.cos().powi(2),
            |x| (2.0 + 4.0 * x.tan().powi(2)) / x.cos().powi(2),
        );
        let shift = MoebiusMap::real(1.0, 1.0, 0.0, 1.0).unwrap();
        assert!(moebius_invariance_deviation(&tan, &shift).unwrap() < 1e-6);

        let i = Complex64::i();
        let e = SampledFunction::analytic(
            g,
            |x| (2.0 * i * x).exp(),
            |x| 2.0 * i * (2.0 * i * x).exp(),
            |x| -4.0 * (2.0 * i * x).exp(),
            |x| -8.0 * i * (2.0 * i * x).exp(),
        );
        let dil = MoebiusMap::real(2.0, 0.0, 0.0, 1.0).unwrap();
        assert!(moebius_invariance_deviation(&e, &dil).unwrap() < 1e-6);

        let id = SampledFunction::analytic_real(g, |x| x, |_| 1.0, |_| 0.0, |_| 0.0);
        let m = MoebiusMap::real(1.0, 2.0, 0.3, 1.0).unwrap();
        assert!(moebius_invariance_deviation(&id, &m).unwrap() < 1e-6);
    }

    #[test]
    fn cocycle_trivial_cases() {
        let g = RealGrid::new(0.5, 1.5, 101).unwrap();
        let k = HjConstants::new(1.0, 0.5);
        let id = SampledFunction::analytic_real(g, |x| x, |_| 1.0, |_| 0.0, |_| 0.0);
        assert_eq!(cocycle_deviation(&id, &g, &id, &k).unwrap(), 0.0);
        let mob = SampledFunction::analytic_real(
            g,
            |x| (2.0 * x + 1.0) / (x + 3.0),
            |x| 5.0 / (x + 3.0).powi(2),
            |x| -10.0 / (x + 3.0).powi(3),
            |x| 30.0 / (x + 3.0).powi(4),
        );
        assert!(cocycle_deviation(&mob, &g, &id, &k).unwrap() < 1e-14);
    }

    #[test]
    fn cocycle_cubic_and_exponential() {
        let g = RealGrid::new(0.5, 1.5, 201).unwrap();
        let k = HjConstants::new(1.0, 0.5);
        let qa = SampledFunction::analytic_real(
            g,
            |x| x.powi(3) + x,
            |x| 3.0 * x * x + 1.0,
            |x| 6.0 * x,
            |_| 6.0,
        );
        let qc = SampledFunction::analytic_real(g, f64::exp, f64::exp, f64::exp, f64::exp);
        assert!(cocycle_deviation(&qa, &g, &qc, &k).unwrap() < 1e-5);
    }

    #[test]
    fn cocycle_rejects_non_monotone() {
        let g = RealGrid::new(-1.0, 1.0, 101).unwrap();
        let k = HjConstants::new(1.0, 0.5);
        let bad = SampledFunction::analytic_real(g, |x| x * x, |x| 2.0 * x, |_| 2.0, |_| 0.0);
        let id = SampledFunction::analytic_real(g, |x| x, |_| 1.0, |_| 0.0, |_| 0.0);
        assert!(matches!(
            cocycle_deviation(&bad, &g, &id, &k),
            Err(SchwarzianError::NonMonotoneMap { .. })
        ));
        let other = RealGrid::new(-1.0, 1.0, 51).unwrap();
        assert_eq!(
            cocycle_deviation(&id, &other, &id, &k),
            Err(SchwarzianError::GridMismatch)
        );
    }

    #[test]
    fn transform_w_identity_and_fixed_point() {
        let g = RealGrid::new(0.5, 1.5, 51).unwrap();
        let k = HjConstants::new(1.0, 0.5);
        let id = SampledFunction::analytic_real(g, |x| x, |_| 1.0, |_| 0.0, |_| 0.0);
        let w = SampledFunction::from_real_fn(g, |x| x.sin() - 0.3);
        let out = transform_w(&w, &id, &k, TransformLaw::Quantum).unwrap();
        for (i, _, v) in out.iter() {
            assert!((v - w.values()[i]).norm() < 1e-15);
        }
        let zero = SampledFunction::from_real_fn(g, |_| 0.0);
        let out = transform_w(&zero, &id, &k, TransformLaw::Quantum).unwrap();
        assert_eq!(out.sup_norm(), 0.0);
    }

    #[test]
    fn inhomogeneous_term_moves_w_zero() {
        let g = RealGrid::new(0.5, 1.5, 101).unwrap();
        let k = HjConstants::new(1.0, 0.5);
        let map = SampledFunction::analytic_real(
            g,
            |x| x.powi(3) + x,
            |x| 3.0 * x * x + 1.0,
            |x| 6.0 * x,
            |_| 6.0,
        );
        let zero = SampledFunction::from_real_fn(g, |_| 0.0);
        let quantum = transform_w(&zero, &map, &k, TransformLaw::Quantum).unwrap();
        let classical = transform_w(&zero, &map, &k, TransformLaw::Classical).unwrap();
        assert_eq!(classical.sup_norm(), 0.0);
        for (_, x, v) in quantum.iter() {
            // derivatives of the inverse map q(q') written out directly
            let p1 = 3.0 * x * x + 1.0;
            let p2 = 6.0 * x;
            let p3 = 6.0;
            let x1 = 1.0 / p1;
            let x2 = -p2 / p1.powi(3);
            let x3 = (3.0 * p2 * p2 - p1 * p3) / p1.powi(5);
            let s_inverse = x3 / x1 - 1.5 * (x2 / x1).powi(2);
            let expected = -k.coefficient() * s_inverse;
            assert!(expected.abs() > 1e-3);
            assert!((v - c(expected)).norm() < 1e-12);
        }
    }
}
