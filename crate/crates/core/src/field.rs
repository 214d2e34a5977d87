//! Periodic spectral discretization of the real line.
//!
//! The line is replaced by the box `[-L, L)` sampled at `n` points. All
//! derivatives are Fourier multipliers and all integrals use the periodic
//! trapezoid rule `dx * sum`, which is spectrally accurate for the smooth,
//! exponentially decaying profiles this crate works with.
//!
//! Derivative convention: the pointwise first derivative uses the symbol `i k`
//! with the Nyquist mode set to zero (so real data stays real), while every
//! second-order operator (kinetic energy, Helmholtz inverse, linear
//! Schrödinger flow) uses the full symbol `k²`. The kinetic energy is
//! evaluated in transform space, so it is exactly the quadratic form whose
//! gradient is `-∂xx`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlannerScalar};

use crate::error::{Error, Result};

/// Default half length of the periodic box, `20π`.
pub const DEFAULT_HALF_LENGTH: f64 = 20.0 * std::f64::consts::PI;
/// Default number of grid samples.
pub const DEFAULT_POINTS: usize = 1024;

struct GridInner {
    half_length: f64,
    n: usize,
    dx: f64,
    x: Vec<f64>,
    k: Vec<f64>,
    k_deriv: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

/// Uniform periodic grid on `[-L, L)`. Cheap to clone; clones share the
/// transform plans.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("half_length", &self.inner.half_length)
            .field("n", &self.inner.n)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.n == other.inner.n && self.inner.half_length == other.inner.half_length)
    }
}

impl Grid {
    pub fn new(half_length: f64, n: usize) -> Result<Self> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::invalid(format!("half length must be positive, got {half_length}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::invalid(format!("n must be a power of two >= 8, got {n}")));
        }
        let dx = 2.0 * half_length / n as f64;
        let x = (0..n).map(|i| -half_length + i as f64 * dx).collect();
        let dk = std::f64::consts::PI / half_length;
        let k: Vec<f64> = (0..n)
            .map(|j| {
                let m = if j < n / 2 { j as i64 } else { j as i64 - n as i64 };
                m as f64 * dk
            })
            .collect();
        let mut k_deriv = k.clone();
        k_deriv[n / 2] = 0.0;
        // The scalar kernels keep forward+inverse round trips unbiased in norm;
        // the SIMD planner drifts by ~1e-16 per round trip, which adds up
        // over long integrations.
        let mut planner = FftPlannerScalar::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        Ok(Grid {
            inner: Arc::new(GridInner {
                half_length,
                n,
                dx,
                x,
                k,
                k_deriv,
                fwd,
                inv,
            }),
        })
    }

    /// The default `[-20π, 20π)` box with 1024 samples.
    pub fn default_box() -> Self {
        Grid::new(DEFAULT_HALF_LENGTH, DEFAULT_POINTS).expect("default grid is valid")
    }

    pub fn half_length(&self) -> f64 {
        self.inner.half_length
    }

    pub fn len(&self) -> usize {
        self.inner.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        self.inner.dx
    }

    pub fn points(&self) -> &[f64] {
        &self.inner.x
    }

    /// Wavenumbers `π j / L` in transform ordering, Nyquist mode included.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.inner.k
    }

    /// Wavenumbers used for differentiation (Nyquist mode zeroed).
    pub fn derivative_symbol(&self) -> &[f64] {
        &self.inner.k_deriv
    }

    /// Index of the sample at `x = 0`.
    pub fn center_index(&self) -> usize {
        self.inner.n / 2
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.inner.fwd.process(data);
    }

    /// Normalized inverse transform.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.inner.inv.process(data);
        let scale = 1.0 / self.inner.n as f64;
        data.iter_mut().for_each(|z| *z *= scale);
    }

    /// Sample a real function on the grid.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Field {
        let values = self.inner.x.iter().map(|&x| Complex64::new(f(x), 0.0)).collect();
        Field::from_values(self, values)
    }

    /// Sample a complex function on the grid.
    pub fn sample_complex(&self, f: impl Fn(f64) -> Complex64) -> Field {
        let values = self.inner.x.iter().map(|&x| f(x)).collect();
        Field::from_values(self, values)
    }

    pub fn zeros(&self) -> Field {
        Field::from_values(self, vec![Complex64::new(0.0, 0.0); self.inner.n])
    }

    /// Apply the Fourier multiplier `symbol(j)` (transform index `j`) to `values`.
    fn apply_multiplier(
        &self,
        values: &[Complex64],
        symbol: impl Fn(usize) -> Complex64,
    ) -> Vec<Complex64> {
        let mut buf = values.to_vec();
        self.forward(&mut buf);
        buf.iter_mut().enumerate().for_each(|(j, z)| *z *= symbol(j));
        self.inverse(&mut buf);
        buf
    }
}

pub fn make_grid(half_length: f64, n: usize) -> Result<Grid> {
    Grid::new(half_length, n)
}

/// Complex samples on a [`Grid`].
#[derive(Clone, Debug)]
pub struct Field {
    grid: Grid,
    values: Vec<Complex64>,
}

impl Field {
    /// Panics if `values.len() != grid.len()`.
    pub fn from_values(grid: &Grid, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), grid.len(), "field length must match grid");
        Field {
            grid: grid.clone(),
            values,
        }
    }

    pub fn from_real(grid: &Grid, re: &[f64]) -> Self {
        Field::from_values(grid, re.iter().map(|&r| Complex64::new(r, 0.0)).collect())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Field {
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Field, f: impl Fn(Complex64, Complex64) -> Complex64) -> Field {
        debug_assert!(self.grid == other.grid);
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Field {
        self.map(|z| z * c)
    }

    pub fn add(&self, other: &Field) -> Field {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Field {
        self.zip_map(other, |a, b| a - b)
    }

    /// Pointwise modulus as a real field.
    pub fn modulus(&self) -> Field {
        self.map(|z| Complex64::new(z.norm(), 0.0))
    }

    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    /// Integral of `f(|z|)` by the trapezoid rule.
    pub fn integrate_modulus(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.grid.dx() * self.values.iter().map(|z| f(z.norm())).sum::<f64>()
    }

    /// `L²` inner product `∫ conj(self) other dx`.
    pub fn inner(&self, other: &Field) -> Complex64 {
        let sum: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum();
        sum * self.grid.dx()
    }

    /// `∫|f|² dx`.
    pub fn norm_sq(&self) -> f64 {
        self.grid.dx() * self.values.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// `∫|f_x|² dx`, evaluated as `(dx/n) Σ k² |f̂_k|²`.
    pub fn kinetic(&self) -> f64 {
        let k = self.grid.wavenumbers();
        let spec = self.spectrum();
        let sum: f64 = spec.iter().zip(k).map(|(z, k)| k * k * z.norm_sqr()).sum();
        sum * self.grid.dx() / self.grid.len() as f64
    }

    /// Squared `H¹` norm `|f|₂² + |f_x|₂²`.
    pub fn h1_norm_sq(&self) -> f64 {
        self.norm_sq() + self.kinetic()
    }

    /// Discrete Fourier coefficients (unnormalized forward transform).
    pub fn spectrum(&self) -> Vec<Complex64> {
        let mut buf = self.values.clone();
        self.grid.forward(&mut buf);
        buf
    }

    /// Sample value interpolated at the grid point nearest to `x`.
    pub fn nearest(&self, x: f64) -> Complex64 {
        let g = &self.grid;
        let i = ((x + g.half_length()) / g.dx()).round() as i64;
        let i = i.rem_euclid(g.len() as i64) as usize;
        self.values[i]
    }

    /// Index of the largest modulus sample.
    pub fn argmax_modulus(&self) -> usize {
        self.values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }
}

/// Ordered pair `(u, v)` on one grid.
#[derive(Clone, Debug)]
pub struct State {
    pub u: Field,
    pub v: Field,
}

impl State {
    /// Panics if the components live on different grids.
    pub fn new(u: Field, v: Field) -> Self {
        assert!(u.grid() == v.grid(), "state components must share a grid");
        State { u, v }
    }

    pub fn zeros(grid: &Grid) -> Self {
        State::new(grid.zeros(), grid.zeros())
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }

    pub fn map(&self, f: impl Fn(&Field) -> Field) -> State {
        State::new(f(&self.u), f(&self.v))
    }

    pub fn add(&self, other: &State) -> State {
        State::new(self.u.add(&other.u), self.v.add(&other.v))
    }

    pub fn sub(&self, other: &State) -> State {
        State::new(self.u.sub(&other.u), self.v.sub(&other.v))
    }

    pub fn scale(&self, c: f64) -> State {
        State::new(self.u.scale(c), self.v.scale(c))
    }

    /// Real part of the `L² × L²` pairing.
    pub fn pairing(&self, other: &State) -> f64 {
        self.u.inner(&other.u).re + self.v.inner(&other.v).re
    }

    pub fn l2_norm(&self) -> f64 {
        (self.u.norm_sq() + self.v.norm_sq()).sqrt()
    }
}

/// `(dx Σ|f_i|^s)^{1/s}`.
pub fn lp_norm(f: &Field, s: f64) -> Result<f64> {
    if !(s >= 1.0) {
        return Err(Error::invalid(format!("Lebesgue exponent must be >= 1, got {s}")));
    }
    let integral = f.integrate_modulus(|m| m.powf(s));
    Ok(integral.powf(1.0 / s))
}

pub fn spectral_derivative(f: &Field) -> Field {
    let g = f.grid();
    let k = g.derivative_symbol();
    let values = g.apply_multiplier(f.values(), |j| Complex64::new(0.0, k[j]));
    Field::from_values(g, values)
}

/// Second derivative with symbol `-k²`.
pub fn spectral_second_derivative(f: &Field) -> Field {
    let g = f.grid();
    let k = g.wavenumbers();
    let values = g.apply_multiplier(f.values(), |j| Complex64::new(-k[j] * k[j], 0.0));
    Field::from_values(g, values)
}

/// `√(‖u‖₁² + ‖v‖₁²)`.
pub fn y_norm(s: &State) -> f64 {
    (s.u.h1_norm_sq() + s.v.h1_norm_sq()).sqrt()
}

/// Shift by `y`: returns `f(x - y)` via the multiplier `e^{-iky}`.
pub fn translate(f: &Field, y: f64) -> Field {
    if y == 0.0 {
        return f.clone();
    }
    let g = f.grid();
    let k = g.wavenumbers();
    let values = g.apply_multiplier(f.values(), |j| Complex64::from_polar(1.0, -k[j] * y));
    Field::from_values(g, values)
}

pub fn phase_rotate(f: &Field, theta: f64) -> Field {
    let w = Complex64::from_polar(1.0, theta);
    f.map(|z| z * w)
}

/// Solve `(ω - ∂xx) g = f` on the periodic grid.
pub fn helmholtz_invert(omega: f64, f: &Field) -> Result<Field> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::invalid(format!("Helmholtz shift must be positive, got {omega}")));
    }
    let g = f.grid();
    let k = g.wavenumbers();
    let values = g.apply_multiplier(f.values(), |j| Complex64::new(1.0 / (omega + k[j] * k[j]), 0.0));
    Ok(Field::from_values(g, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sech(x: f64) -> f64 {
        1.0 / x.cosh()
    }

    #[test]
    fn grid_spacing_and_origin() {
        let g = make_grid(10.0, 16).unwrap();
        assert_eq!(g.dx(), 1.25);
        assert_eq!(g.points()[0], -10.0);
        let g = make_grid(20.0 * PI, 1024).unwrap();
        assert!((g.dx() - 40.0 * PI / 1024.0).abs() < 1e-15);
        assert!((g.dx() * 1024.0 - 40.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(matches!(make_grid(10.0, 12), Err(Error::InvalidArgument(_))));
        assert!(matches!(make_grid(10.0, 4), Err(Error::InvalidArgument(_))));
        assert!(matches!(make_grid(0.0, 16), Err(Error::InvalidArgument(_))));
        assert!(matches!(make_grid(-1.0, 16), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn wavenumbers_in_transform_order() {
        let g = make_grid(PI, 8).unwrap();
        let expected = [0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0];
        for (k, e) in g.wavenumbers().iter().zip(expected) {
            assert!((k - e).abs() < 1e-14);
        }
        assert_eq!(g.derivative_symbol()[4], 0.0);
    }

    #[test]
    fn sech_norms() {
        let g = Grid::default_box();
        let f = g.sample(sech);
        assert_eq!(lp_norm(&g.zeros(), 2.0).unwrap(), 0.0);
        assert!((lp_norm(&f, 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-10);
        assert!((lp_norm(&f, 4.0).unwrap() - (4.0f64 / 3.0).powf(0.25)).abs() < 1e-10);
        assert!(matches!(lp_norm(&f, 0.5), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn derivative_examples() {
        let g = make_grid(10.0, 64).unwrap();
        let w = PI / 10.0;
        let d = spectral_derivative(&g.sample(|x| (w * x).sin()));
        for (x, z) in g.points().iter().zip(d.values()) {
            assert!((z.re - w * (w * x).cos()).abs() < 1e-13);
            assert!(z.im.abs() < 1e-13);
        }
        let d = spectral_derivative(&g.sample(|_| 1.0));
        assert!(d.values().iter().all(|z| z.norm() < 1e-14));

        let g = Grid::default_box();
        let d = spectral_derivative(&g.sample(sech));
        for (x, z) in g.points().iter().zip(d.values()) {
            assert!((z.re + sech(*x) * x.tanh()).abs() < 1e-10);
        }
    }

    #[test]
    fn y_norm_examples() {
        let g = Grid::default_box();
        assert_eq!(y_norm(&State::zeros(&g)), 0.0);
        let s = State::new(g.sample(sech), g.zeros());
        assert!((y_norm(&s) - (2.0f64 + 2.0 / 3.0).sqrt()).abs() < 1e-9);
        let s = State::new(g.sample(sech), g.sample(sech));
        assert!((y_norm(&s) - (16.0f64 / 3.0).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn symmetry_actions() {
        let g = Grid::default_box();
        let f = g.sample(sech);
        let t = translate(&f, 0.0);
        assert_eq!(t.values(), f.values());
        let r = phase_rotate(&f, 2.0 * PI);
        for (a, b) in r.values().iter().zip(f.values()) {
            assert!((a - b).norm() < 1e-15);
        }
        let shifted = translate(&f, 3.0);
        // x = 3 is not a grid point; compare against the analytic shift there.
        let i = g.points().iter().position(|&x| x > 3.0).unwrap();
        let x = g.points()[i];
        assert!((shifted.values()[i].re - sech(x - 3.0)).abs() < 1e-8);
        assert!((shifted.nearest(3.0).re - 1.0).abs() < g.dx() * g.dx());
    }

    #[test]
    fn helmholtz_examples() {
        let g = Grid::default_box();
        let c = helmholtz_invert(2.0, &g.sample(|_| 3.0)).unwrap();
        assert!(c.values().iter().all(|z| (z.re - 1.5).abs() < 1e-14));
        let h = helmholtz_invert(1.0, &g.sample(|x| 2.0 * sech(x).powi(3))).unwrap();
        for (x, z) in g.points().iter().zip(h.values()) {
            assert!((z.re - sech(*x)).abs() < 1e-8);
        }
        let z = helmholtz_invert(1.0, &g.zeros()).unwrap();
        assert!(z.values().iter().all(|z| z.norm() == 0.0));
        assert!(matches!(helmholtz_invert(0.0, &g.zeros()), Err(Error::InvalidArgument(_))));
        assert!(matches!(helmholtz_invert(-1.0, &g.zeros()), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn default_box_tails_are_negligible() {
        let g = Grid::default_box();
        assert!(sech(g.points()[0]) < 1e-12);
    }
}
