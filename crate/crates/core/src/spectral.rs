//! Periodic grids, complex fields and their Fourier coefficients.
//!
//! A [`Field`] holds samples of a function on the grid `x_k = -π + k·2π/K`
//! (per axis, row-major with the last axis contiguous). A [`Spectrum`] holds
//! its Fourier coefficients in FFT order, `{0, 1, …, K/2-1, -K/2, …, -1}` per
//! axis, normalized like the continuous coefficients
//!
//! ```text
//! u_n = (2π)^-d ∫ u(x) e^{-i n·x} dx  ≈  K^-d Σ_k u(x_k) e^{-i n·x_k}
//! ```
//!
//! so the mean of a field is its coefficient at `n = 0` and a pure mode
//! `e^{i m·x}` has coefficient exactly one at `m`. Relative to the raw DFT
//! `F_n = Σ_k u_k e^{-2πi nk/K}` this is `u_n = (-1)^{n_1+…+n_d} F_n / K^d`;
//! the sign comes from the grid starting at `-π` instead of `0`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if forward {
            p.plan_fft_forward(len)
        } else {
            p.plan_fft_inverse(len)
        }
    })
}

/// Uniform grid on `[-π, π)^d` with `K` points per axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    dimension: usize,
    points: usize,
}

impl GridSpec {
    /// `points` must be a power of two, at least 4.
    pub fn new(dimension: usize, points: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::invalid("grid dimension must be positive"));
        }
        if points < 4 || !points.is_power_of_two() {
            return Err(Error::invalid(format!(
                "points per axis must be a power of two >= 4, got {points}"
            )));
        }
        points
            .checked_pow(dimension as u32)
            .ok_or_else(|| Error::invalid("grid size overflows"))?;
        Ok(GridSpec { dimension, points })
    }

    pub fn one_d(points: usize) -> Result<Self> {
        Self::new(1, points)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Total number of samples, `K^d`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dimension as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.points as f64
    }

    /// Coordinate of grid index `k` along any axis.
    pub fn coordinate(&self, k: usize) -> f64 {
        -PI + k as f64 * self.spacing()
    }

    /// Signed frequency stored at position `k` along an axis.
    pub fn frequency(&self, k: usize) -> i64 {
        let half = self.points / 2;
        if k < half {
            k as i64
        } else {
            k as i64 - self.points as i64
        }
    }

    /// Storage position of frequency `n` along an axis, if representable.
    pub fn position(&self, n: i64) -> Option<usize> {
        let half = (self.points / 2) as i64;
        if n >= 0 && n < half {
            Some(n as usize)
        } else if n < 0 && n >= -half {
            Some((n + self.points as i64) as usize)
        } else {
            None
        }
    }

    /// Per-axis indices of a flat (row-major) index.
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dimension];
        for slot in idx.iter_mut().rev() {
            *slot = flat % self.points;
            flat /= self.points;
        }
        idx
    }

    /// Flat index of the coefficient at frequency vector `freq`.
    pub fn flat_index(&self, freq: &[i64]) -> Option<usize> {
        if freq.len() != self.dimension {
            return None;
        }
        freq.iter()
            .try_fold(0usize, |acc, &n| Some(acc * self.points + self.position(n)?))
    }

    /// Frequency vector stored at a flat index.
    pub fn frequencies_at(&self, flat: usize) -> Vec<i64> {
        self.unravel(flat)
            .into_iter()
            .map(|k| self.frequency(k))
            .collect()
    }

    /// `|n|²` for every flat coefficient index.
    pub fn wavenumbers_squared(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                self.frequencies_at(i)
                    .iter()
                    .map(|&n| (n * n) as f64)
                    .sum()
            })
            .collect()
    }

    /// Frequency vector `j·e_1`, the convention used for scalar mode labels.
    pub fn axis_mode(&self, j: i64) -> Vec<i64> {
        let mut v = vec![0; self.dimension];
        v[0] = j;
        v
    }

    fn parity_sign(&self, flat: usize) -> f64 {
        let s: usize = self.unravel(flat).iter().sum();
        if s % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

fn check_finite(values: &[C64], what: &str) -> Result<()> {
    match values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        None => Ok(()),
        Some(i) => Err(Error::invalid(format!("{what} entry {i} is not finite"))),
    }
}

/// Samples of a complex function on a [`GridSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Vec<C64>,
}

impl Field {
    pub fn new(grid: GridSpec, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "field has {} values, grid needs {}",
                values.len(),
                grid.len()
            )));
        }
        check_finite(&values, "field")?;
        Ok(Field { grid, values })
    }

    pub(crate) fn from_raw(grid: GridSpec, values: Vec<C64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Field { grid, values }
    }

    /// Samples `f` at every grid point; `f` receives the coordinate vector.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(&[f64]) -> C64) -> Result<Self> {
        let mut x = vec![0.0; grid.dimension()];
        let values = (0..grid.len())
            .map(|i| {
                for (xa, k) in x.iter_mut().zip(grid.unravel(i)) {
                    *xa = grid.coordinate(k);
                }
                f(&x)
            })
            .collect();
        Field::new(grid, values)
    }

    pub fn constant(grid: GridSpec, c: C64) -> Result<Self> {
        Field::new(grid, vec![c; grid.len()])
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn min_modulus(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min)
    }

    /// Pointwise map, keeping the grid.
    pub fn map(&self, f: impl Fn(C64) -> C64) -> Result<Field> {
        Field::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Largest pointwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖self - other‖_{L²}` with the mean-based inner product.
    pub fn l2_distance(&self, other: &Field) -> f64 {
        let s: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        (s / self.values.len() as f64).sqrt()
    }
}

/// Fourier coefficients of a field.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    grid: GridSpec,
    coefficients: Vec<C64>,
}

impl Spectrum {
    pub fn new(grid: GridSpec, coefficients: Vec<C64>) -> Result<Self> {
        if coefficients.len() != grid.len() {
            return Err(Error::invalid(format!(
                "spectrum has {} coefficients, grid needs {}",
                coefficients.len(),
                grid.len()
            )));
        }
        check_finite(&coefficients, "spectrum")?;
        Ok(Spectrum { grid, coefficients })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Spectrum {
            grid,
            coefficients: vec![C64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    pub(crate) fn coefficients_mut(&mut self) -> &mut [C64] {
        &mut self.coefficients
    }

    /// Coefficient at a frequency vector; zero when not representable.
    pub fn get(&self, freq: &[i64]) -> C64 {
        self.grid
            .flat_index(freq)
            .map(|i| self.coefficients[i])
            .unwrap_or_default()
    }

    pub fn set(&mut self, freq: &[i64], value: C64) -> Result<()> {
        let i = self
            .grid
            .flat_index(freq)
            .ok_or_else(|| Error::invalid(format!("frequency {freq:?} not on grid")))?;
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::invalid("coefficient is not finite"));
        }
        self.coefficients[i] = value;
        Ok(())
    }

    /// Coefficient of `e^{i j x_1}`.
    pub fn mode(&self, j: i64) -> C64 {
        self.get(&self.grid.axis_mode(j))
    }

    pub fn mean(&self) -> C64 {
        self.coefficients[0]
    }

    pub fn l2_norm(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// `(Σ_n (1+|n|²)^s |u_n|²)^{1/2}`.
pub fn hs_norm(s: &Spectrum, sobolev_s: f64) -> f64 {
    s.grid
        .wavenumbers_squared()
        .iter()
        .zip(&s.coefficients)
        .map(|(n2, c)| (1.0 + n2).powf(sobolev_s) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// In-place unnormalized multi-dimensional FFT along every axis.
pub(crate) fn fft_nd(data: &mut [C64], grid: &GridSpec, forward: bool) {
    let k = grid.points();
    let d = grid.dimension();
    let fft = plan(k, forward);
    let mut scratch = vec![C64::default(); fft.get_inplace_scratch_len()];
    // last axis: contiguous lines
    fft.process_with_scratch(data, &mut scratch);
    if d == 1 {
        return;
    }
    let mut line = vec![C64::default(); k];
    for axis in 0..d - 1 {
        let stride = k.pow((d - 1 - axis) as u32);
        let outer = k.pow(axis as u32);
        for o in 0..outer {
            for inner in 0..stride {
                let base = o * k * stride + inner;
                for (m, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + m * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (m, v) in line.iter().enumerate() {
                    data[base + m * stride] = *v;
                }
            }
        }
    }
}

pub fn forward_transform(f: &Field) -> Spectrum {
    let grid = f.grid;
    let mut data = f.values.clone();
    fft_nd(&mut data, &grid, true);
    let scale = 1.0 / grid.len() as f64;
    for (i, c) in data.iter_mut().enumerate() {
        *c *= grid.parity_sign(i) * scale;
    }
    Spectrum {
        grid,
        coefficients: data,
    }
}

pub fn inverse_transform(s: &Spectrum) -> Field {
    let grid = s.grid;
    let mut data: Vec<C64> = s
        .coefficients
        .iter()
        .enumerate()
        .map(|(i, c)| c * grid.parity_sign(i))
        .collect();
    fft_nd(&mut data, &grid, false);
    Field::from_raw(grid, data)
}

/// L² norm with the mean-based inner product, so `‖e^{imx}‖ = 1`.
pub fn l2_norm(f: &Field) -> f64 {
    let s: f64 = f.values.iter().map(|v| v.norm_sqr()).sum();
    (s / f.values.len() as f64).sqrt()
}

/// Frequency-zero coefficient, i.e. the grid average.
pub fn mean(f: &Field) -> C64 {
    f.values.iter().sum::<C64>() / f.values.len() as f64
}

pub const DEFAULT_MEAN_THRESHOLD: f64 = 1e-12;
pub const DEFAULT_MODULUS_RATIO: f64 = 0.05;

/// Admissibility test for the pointwise logarithm.
///
/// A field passes when `|⟨f⟩| > mean_threshold` and
/// `min_x |f(x)| > modulus_ratio · |⟨f⟩|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainCheck {
    pub mean_threshold: f64,
    pub modulus_ratio: f64,
}

impl Default for DomainCheck {
    fn default() -> Self {
        DomainCheck {
            mean_threshold: DEFAULT_MEAN_THRESHOLD,
            modulus_ratio: DEFAULT_MODULUS_RATIO,
        }
    }
}

impl DomainCheck {
    pub fn check(&self, f: &Field) -> bool {
        self.ensure(f).is_ok()
    }

    pub fn ensure(&self, f: &Field) -> Result<()> {
        self.ensure_values(&f.values)
    }

    pub(crate) fn ensure_values(&self, values: &[C64]) -> Result<()> {
        let m = (values.iter().sum::<C64>() / values.len() as f64).norm();
        if m <= self.mean_threshold {
            return Err(Error::ZeroMean {
                modulus: m,
                threshold: self.mean_threshold,
            });
        }
        let min = values.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
        if min <= self.modulus_ratio * m {
            return Err(Error::DomainViolation {
                min_modulus: min,
                mean_modulus: m,
            });
        }
        Ok(())
    }
}

/// [`DomainCheck`] with default thresholds.
pub fn domain_check(f: &Field) -> bool {
    DomainCheck::default().check(f)
}

/// The coordinates `f = e^{iθ}(a + w)` with `⟨w⟩ = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarDecomposition {
    pub a: f64,
    pub theta: f64,
    /// Zero-mean remainder; its coefficient at frequency zero is exactly 0.
    pub w: Spectrum,
}

impl PolarDecomposition {
    pub fn reconstruct(&self) -> Field {
        let mut s = self.w.clone();
        s.coefficients[0] = C64::new(self.a, 0.0);
        let rot = C64::from_polar(1.0, self.theta);
        for c in s.coefficients.iter_mut() {
            *c *= rot;
        }
        inverse_transform(&s)
    }
}

pub fn polar_decompose(f: &Field) -> Result<PolarDecomposition> {
    polar_decompose_with(f, DEFAULT_MEAN_THRESHOLD)
}

pub fn polar_decompose_with(f: &Field, mean_threshold: f64) -> Result<PolarDecomposition> {
    let spec = forward_transform(f);
    polar_from_spectrum(&spec, mean_threshold)
}

pub(crate) fn polar_from_spectrum(
    spec: &Spectrum,
    mean_threshold: f64,
) -> Result<PolarDecomposition> {
    let m = spec.mean();
    let a = m.norm();
    if a <= mean_threshold {
        return Err(Error::ZeroMean {
            modulus: a,
            threshold: mean_threshold,
        });
    }
    let theta = m.arg();
    let rot = C64::from_polar(1.0, -theta);
    let mut w = spec.clone();
    for c in w.coefficients.iter_mut() {
        *c *= rot;
    }
    w.coefficients[0] = C64::new(0.0, 0.0);
    Ok(PolarDecomposition { a, theta, w })
}

/// Pointwise logarithm `log⟨f⟩ + Log(f(x)/⟨f⟩)` on the admissible domain.
///
/// The branch is anchored at the mean: `log|⟨f⟩| + i·arg⟨f⟩` plus the
/// principal logarithm of the ratio, which stays continuous while
/// `f/⟨f⟩` keeps away from the negative real axis.
pub fn field_log(f: &Field) -> Result<Field> {
    field_log_with(f, &DomainCheck::default())
}

pub fn field_log_with(f: &Field, check: &DomainCheck) -> Result<Field> {
    check.ensure(f)?;
    let m = mean(f);
    let base = C64::new(m.norm().ln(), m.arg());
    Ok(Field::from_raw(
        f.grid,
        f.values.iter().map(|&v| base + (v / m).ln()).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn g(k: usize) -> GridSpec {
        GridSpec::one_d(k).unwrap()
    }

    fn mode(grid: GridSpec, m: i64, amp: C64) -> Field {
        Field::from_fn(grid, |x| amp * C64::from_polar(1.0, m as f64 * x[0])).unwrap()
    }

    fn psi0(grid: GridSpec) -> Field {
        Field::from_fn(grid, |x| C64::new(1.0 / (1.0 + 0.2 * x[0].cos()), 0.0)).unwrap()
    }

    /// Composite Simpson rule on one period, the quadrature oracle.
    fn simpson(f: impl Fn(f64) -> f64, n: usize) -> f64 {
        let h = 2.0 * PI / n as f64;
        let mut s = f(-PI) + f(PI);
        for i in 1..n {
            let x = -PI + i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        s * h / 3.0 / (2.0 * PI)
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::one_d(6).is_err());
        assert!(GridSpec::one_d(2).is_err());
        assert!(GridSpec::new(0, 8).is_err());
        let g = GridSpec::new(2, 8).unwrap();
        assert_eq!(g.len(), 64);
        assert_eq!(g.frequency(4), -4);
        assert_eq!(g.position(-1), Some(7));
        assert_eq!(g.position(4), None);
        assert_eq!(g.flat_index(&[1, -1]), Some(8 + 7));
        assert_eq!(g.frequencies_at(15), vec![1, -1]);
    }

    #[test]
    fn constant_and_pure_modes() {
        let s = forward_transform(&Field::constant(g(16), C64::new(1.0, 0.0)).unwrap());
        assert_relative_eq!(s.mean().re, 1.0, epsilon = 1e-15);
        assert!(s.coefficients()[1..].iter().all(|c| c.norm() < 1e-15));

        let s = forward_transform(&mode(g(128), 3, C64::new(1.0, 0.0)));
        for (i, c) in s.coefficients().iter().enumerate() {
            let expect = if s.grid().frequency(i) == 3 { 1.0 } else { 0.0 };
            assert!((c - expect).norm() < 1e-13, "index {i}: {c}");
        }
        // negative frequencies land in the upper half
        let s = forward_transform(&mode(g(16), -2, C64::new(0.0, 2.0)));
        assert!((s.mode(-2) - C64::new(0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn psi0_mean_matches_quadrature() {
        let oracle = simpson(|x| 1.0 / (1.0 + 0.2 * x.cos()), 20_000);
        assert_relative_eq!(oracle, 1.0 / 0.96f64.sqrt(), epsilon = 1e-12);
        let f = psi0(g(128));
        assert_relative_eq!(forward_transform(&f).mean().re, oracle, epsilon = 1e-12);
        assert_relative_eq!(mean(&f).re, 1.02062, epsilon = 1e-5);
    }

    #[test]
    fn psi0_norm_matches_quadrature() {
        let oracle = simpson(|x| (1.0 + 0.2 * x.cos()).powi(-2), 20_000).sqrt();
        assert_relative_eq!(oracle, 0.96f64.powf(-0.75), epsilon = 1e-12);
        assert_relative_eq!(l2_norm(&psi0(g(128))), oracle, epsilon = 1e-12);
        assert_relative_eq!(oracle, 1.03110, epsilon = 1e-5);
    }

    #[test]
    fn inverse_of_single_coefficients() {
        let grid = g(32);
        let mut s = Spectrum::zeros(grid);
        s.set(&[0], C64::new(1.0, 0.0)).unwrap();
        let f = inverse_transform(&s);
        assert!(f.values().iter().all(|v| (v - 1.0).norm() < 1e-15));

        let mut s = Spectrum::zeros(grid);
        s.set(&[1], C64::new(1.0, 0.0)).unwrap();
        let f = inverse_transform(&s);
        for (k, v) in f.values().iter().enumerate() {
            let x = grid.coordinate(k);
            assert!((v - C64::from_polar(1.0, x)).norm() < 1e-14);
        }
    }

    #[test]
    fn norms_of_plane_waves() {
        assert_relative_eq!(l2_norm(&mode(g(64), 5, C64::new(1.0, 0.0))), 1.0, epsilon = 1e-14);
        assert_relative_eq!(l2_norm(&mode(g(64), 3, C64::new(2.0, 0.0))), 2.0, epsilon = 1e-14);
        let s = forward_transform(&Field::constant(g(16), C64::new(1.0, 0.0)).unwrap());
        assert_relative_eq!(hs_norm(&s, 3.7), 1.0, epsilon = 1e-14);
        let s = forward_transform(&mode(g(16), 1, C64::new(1.0, 0.0)));
        assert_relative_eq!(hs_norm(&s, 1.0), 2f64.sqrt(), epsilon = 1e-14);
        let s = forward_transform(&mode(g(16), 2, C64::new(1.0, 0.0)));
        assert_relative_eq!(hs_norm(&s, 2.0), 5.0, epsilon = 1e-13);
    }

    #[test]
    fn means() {
        assert!(mean(&mode(g(16), 1, C64::new(1.0, 0.0))).norm() < 1e-15);
        let f = Field::from_fn(g(16), |x| 2.0 + C64::from_polar(1.0, x[0])).unwrap();
        assert!((mean(&f) - 2.0).norm() < 1e-15);
    }

    #[test]
    fn polar_examples() {
        let c = C64::from_polar(3.0, PI / 6.0);
        let p = polar_decompose(&Field::constant(g(16), c).unwrap()).unwrap();
        assert_relative_eq!(p.a, 3.0, epsilon = 1e-14);
        assert_relative_eq!(p.theta, PI / 6.0, epsilon = 1e-14);
        assert!(p.w.l2_norm() < 1e-14);

        let f = Field::from_fn(g(32), |x| 1.0 + 0.1 * C64::from_polar(1.0, x[0])).unwrap();
        let p = polar_decompose(&f).unwrap();
        assert_relative_eq!(p.a, 1.0, epsilon = 1e-14);
        assert!(p.theta.abs() < 1e-15);
        assert_eq!(p.w.mean(), C64::new(0.0, 0.0));
        assert!((p.w.mode(1) - 0.1).norm() < 1e-15);

        let err = polar_decompose(&mode(g(32), 1, C64::new(1.0, 0.0))).unwrap_err();
        assert!(matches!(err, Error::ZeroMean { .. }));
    }

    #[test]
    fn logarithm() {
        let f = Field::constant(g(8), C64::new(2f64.exp(), 0.0)).unwrap();
        let l = field_log(&f).unwrap();
        assert!(l.values().iter().all(|v| (v - 2.0).norm() < 1e-14));

        let f = Field::constant(g(8), C64::from_polar(3.0, PI / 6.0)).unwrap();
        let l = field_log(&f).unwrap();
        let expect = C64::new(3f64.ln(), PI / 6.0);
        assert!(l.values().iter().all(|v| (v - expect).norm() < 1e-14));

        let f = Field::from_fn(g(64), |x| 1.0 + 0.1 * C64::from_polar(1.0, x[0])).unwrap();
        let l = field_log(&f).unwrap();
        for (a, b) in l.values().iter().zip(f.values()) {
            assert!((a.exp() - b).norm() < 1e-10);
        }

        let bad = mode(g(16), 1, C64::new(1.0, 0.0));
        assert!(matches!(field_log(&bad), Err(Error::ZeroMean { .. })));
    }

    #[test]
    fn domain_examples() {
        assert!(domain_check(&Field::constant(g(16), C64::new(5.0, 0.0)).unwrap()));
        assert!(domain_check(&psi0(g(128))));
        assert!(!domain_check(&mode(g(16), 1, C64::new(1.0, 0.0))));
        // nonzero mean but a near-zero point
        let f = Field::from_fn(g(64), |x| C64::new(1.0 + x[0].cos(), 0.0)).unwrap();
        assert!(!domain_check(&f));
        let loose = DomainCheck { modulus_ratio: 0.0, ..Default::default() };
        assert!(!loose.check(&f), "exact zero at x = -π");
    }

    #[test]
    fn nonfinite_rejected() {
        assert!(Field::new(g(4), vec![C64::new(f64::NAN, 0.0); 4]).is_err());
        assert!(Field::new(g(4), vec![C64::new(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn two_dimensional_modes() {
        let grid = GridSpec::new(2, 8).unwrap();
        let f = Field::from_fn(grid, |x| C64::from_polar(1.0, 2.0 * x[0] - 3.0 * x[1])).unwrap();
        let s = forward_transform(&f);
        assert!((s.get(&[2, -3]) - 1.0).norm() < 1e-14);
        assert_relative_eq!(s.l2_norm(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(hs_norm(&s, 1.0), 14f64.sqrt(), epsilon = 1e-13);
        let back = inverse_transform(&s);
        assert!(back.max_abs_diff(&f) < 1e-14);
    }
}
