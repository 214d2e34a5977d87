//! Exact solution families used as oracles.

use num_complex::Complex64;
use statrs::function::beta::beta;

use crate::error::{Error, Result};
use crate::field::{spectral_second_derivative, translate, Field, Grid, State};
use crate::model::check_single_params;

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

/// `∫ sech^m(y) dy = B(m/2, 1/2)`.
fn sech_power_integral(m: f64) -> f64 {
    beta(0.5 * m, 0.5)
}

/// Continuum mass of the single-equation profile with parameter `λ`.
fn single_profile_mass(alpha_exp: f64, beta_coef: f64, lambda: f64) -> f64 {
    let e = 1.0 / (alpha_exp - 1.0);
    let amp_sq = (lambda / beta_coef).powf(2.0 * e);
    let width = 2.0 / (lambda.sqrt() * (alpha_exp - 1.0));
    amp_sq * width * sech_power_integral(4.0 * e)
}

/// Sample `(λ/β)^{1/(α−1)} sech^{2/(α−1)}(√λ (α−1) x / 2)`.
pub fn single_profile_for_lambda(alpha_exp: f64, beta_coef: f64, lambda: f64, grid: &Grid) -> Field {
    let e = 1.0 / (alpha_exp - 1.0);
    let amp = (lambda / beta_coef).powf(e);
    let k = lambda.sqrt() * (alpha_exp - 1.0) / 2.0;
    grid.sample(|x| amp * sech(k * x).powf(2.0 * e))
}

/// Minimizer `h_s` of `J(h) = ∫|h_x|² − β|h|^{α+1}` at mass `s`, together
/// with the `λ` fixing its mass. `λ` is found by bisection on the increasing
/// map from `λ` to the continuum mass of the profile.
pub fn single_profile(alpha_exp: f64, beta_coef: f64, s: f64, grid: &Grid) -> Result<(Field, f64)> {
    check_single_params(alpha_exp, beta_coef)?;
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::invalid(format!("target mass must be positive, got {s}")));
    }
    let mass = |lambda: f64| single_profile_mass(alpha_exp, beta_coef, lambda);
    let mut lo = 1e-12;
    if mass(lo) > s {
        return Err(Error::Internal(format!("mass bracket does not contain s = {s}")));
    }
    let mut hi = 1.0;
    while mass(hi) <= s {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Internal(format!("mass bracket does not contain s = {s}")));
        }
    }
    for _ in 0..400 {
        if hi - lo <= 1e-13 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mass(mid) <= s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);
    Ok((single_profile_for_lambda(alpha_exp, beta_coef, lambda, grid), lambda))
}

/// `‖−2h″ − (α+1)β h^α + 2λh‖₂`, the defect of the single-equation profile.
pub fn single_profile_residual(h: &Field, alpha_exp: f64, beta_coef: f64, lambda: f64) -> f64 {
    let d2 = spectral_second_derivative(h);
    d2.zip_map(h, |d, v| {
        let m = v.norm();
        let nonlinear = if m > 0.0 { v * m.powf(alpha_exp - 1.0) } else { v };
        -2.0 * d - (alpha_exp + 1.0) * beta_coef * nonlinear + 2.0 * lambda * v
    })
    .norm_sq()
    .sqrt()
}

/// `(φ_Ω, φ_Ω)` with `φ_Ω = √(2Ω/(α+1)) sech(√Ω x)`: the equal-amplitude
/// solution for `α = β`, `τ = 1`, `p = r = 2q = 4`.
pub fn symmetric_pair(alpha: f64, omega: f64, grid: &Grid) -> Result<State> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::invalid(format!("frequency must be positive, got {omega}")));
    }
    if !(alpha > -1.0) {
        return Err(Error::invalid(format!("alpha must exceed -1, got {alpha}")));
    }
    let amp = (2.0 * omega / (alpha + 1.0)).sqrt();
    let k = omega.sqrt();
    let phi = grid.sample(|x| amp * sech(k * x));
    Ok(State::new(phi.clone(), phi))
}

/// Amplitudes `(A, B)` of the asymmetric pair `(A sech(√Ω x), B sech(√Ω x))`
/// solving `αA² + τB² = 2Ω`, `βB² + τA² = 2Ω`.
pub fn nguyen_amplitudes(alpha: f64, beta: f64, tau: f64, omega: f64) -> Result<(f64, f64)> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::invalid(format!("frequency must be positive, got {omega}")));
    }
    let det = tau * tau - alpha * beta;
    if det == 0.0 {
        return Err(Error::InvalidFamily(format!("τ² = αβ ({tau}² = {alpha}·{beta})")));
    }
    let a_sq = 2.0 * omega * (tau - beta) / det;
    let b_sq = 2.0 * omega * (tau - alpha) / det;
    if !(a_sq > 0.0 && b_sq > 0.0) {
        return Err(Error::InvalidFamily(format!(
            "non-positive squared amplitudes ({a_sq}, {b_sq}) for α={alpha}, β={beta}, τ={tau}"
        )));
    }
    Ok((a_sq.sqrt(), b_sq.sqrt()))
}

pub fn nguyen_pair(alpha: f64, beta: f64, tau: f64, omega: f64, grid: &Grid) -> Result<State> {
    let (a, b) = nguyen_amplitudes(alpha, beta, tau, omega)?;
    let k = omega.sqrt();
    Ok(State::new(
        grid.sample(|x| a * sech(k * x)),
        grid.sample(|x| b * sech(k * x)),
    ))
}

/// Parameters of the solitary-wave ansatz
/// `u = e^{i(ω₁−σ²)t + iσx + iλ₁} Φ(x − 2σt)`, likewise for `v`.
///
/// `e^{iσx}` is only periodic on the box when `2σL` is a multiple of `2π`.
#[derive(Clone, Debug)]
pub struct TravelingWaveSpec {
    pub omega1: f64,
    pub omega2: f64,
    pub sigma: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub profile: State,
}

impl TravelingWaveSpec {
    pub fn new(omega1: f64, omega2: f64, sigma: f64, profile: State) -> Result<Self> {
        let tol = 1e-12;
        let real = |f: &Field| f.values().iter().all(|z| z.im.abs() < tol);
        if !real(&profile.u) || !real(&profile.v) {
            return Err(Error::invalid("traveling-wave profile must be real valued"));
        }
        Ok(TravelingWaveSpec {
            omega1,
            omega2,
            sigma,
            lambda1: 0.0,
            lambda2: 0.0,
            profile,
        })
    }

    pub fn with_phases(mut self, lambda1: f64, lambda2: f64) -> Self {
        self.lambda1 = lambda1;
        self.lambda2 = lambda2;
        self
    }
}

pub fn traveling_wave(spec: &TravelingWaveSpec, t: f64) -> State {
    let sigma = spec.sigma;
    let shift = 2.0 * sigma * t;
    let build = |profile: &Field, omega: f64, lambda: f64| {
        let moved = translate(profile, shift);
        let x = profile.grid().points();
        let phase0 = (omega - sigma * sigma) * t + lambda;
        let values = moved
            .values()
            .iter()
            .zip(x)
            .map(|(z, &xi)| z * Complex64::from_polar(1.0, phase0 + sigma * xi))
            .collect();
        Field::from_values(profile.grid(), values)
    };
    State::new(
        build(&spec.profile.u, spec.omega1, spec.lambda1),
        build(&spec.profile.v, spec.omega2, spec.lambda2),
    )
}
