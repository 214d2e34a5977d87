//! Energy, masses and Euler–Lagrange structure of the coupled system
//!
//! ```text
//! i u_t + u_xx + (α|u|^{p-2} + Σ_k τ_k |v|^{q_k} |u|^{q_k-2}) u = 0
//! i v_t + v_xx + (β|v|^{r-2} + Σ_k τ_k |u|^{q_k} |v|^{q_k-2}) v = 0
//! ```
//!
//! with energy `H = |u_x|² + |v_x|² − (a|u|_p^p + b|v|_r^r + Σ_k c_k |uv|_{q_k}^{q_k})`,
//! `a = 2α/p`, `b = 2β/r`, `c_k = 2τ_k/q_k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{spectral_second_derivative, Field, State};

/// Moduli below this are treated as zero inside fractional powers.
const MODULUS_FLOOR: f64 = 1e-300;

/// One mixed term `τ |v|^q |u|^{q-2} u` (and its mirror in the `v` equation).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coupling {
    pub tau: f64,
    pub q: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub r: f64,
    pub couplings: Vec<Coupling>,
}

fn check_positive(field: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::config(field, format!("{field} must be positive, got {value}")))
    }
}

fn check_exponent(field: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 2.0 && value < 6.0 {
        Ok(())
    } else {
        Err(Error::config(field, format!("{field} out of range (2,6), got {value}")))
    }
}

impl ModelParams {
    pub fn new(alpha: f64, beta: f64, p: f64, r: f64, couplings: Vec<Coupling>) -> Result<Self> {
        let params = ModelParams {
            alpha,
            beta,
            p,
            r,
            couplings,
        };
        params.validate()?;
        Ok(params)
    }

    /// Single coupling term `(τ, q)`.
    pub fn single(alpha: f64, beta: f64, tau: f64, p: f64, r: f64, q: f64) -> Result<Self> {
        ModelParams::new(alpha, beta, p, r, vec![Coupling { tau, q }])
    }

    /// `α = β = τ = 1`, `p = r = 4`, `q = 2`.
    pub fn symmetric_quartic() -> Self {
        ModelParams::single(1.0, 1.0, 1.0, 4.0, 4.0, 2.0).expect("valid parameters")
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("alpha", self.alpha)?;
        check_positive("beta", self.beta)?;
        check_exponent("p", self.p)?;
        check_exponent("r", self.r)?;
        if self.couplings.is_empty() {
            return Err(Error::config("couplings", "at least one coupling term is required"));
        }
        for (i, c) in self.couplings.iter().enumerate() {
            check_positive(&format!("couplings[{i}].tau"), c.tau)?;
            if !(c.q.is_finite() && c.q > 1.0 && c.q < 3.0) {
                return Err(Error::config(
                    format!("couplings[{i}].q"),
                    format!("2q out of range (2,6), got q = {}", c.q),
                ));
            }
        }
        Ok(())
    }

    pub fn a(&self) -> f64 {
        2.0 * self.alpha / self.p
    }

    pub fn b(&self) -> f64 {
        2.0 * self.beta / self.r
    }

    /// Coefficients `c_k = 2τ_k / q_k`.
    pub fn c(&self) -> Vec<f64> {
        self.couplings.iter().map(|c| 2.0 * c.tau / c.q).collect()
    }

    /// The same model with `u` and `v` exchanged.
    pub fn swapped(&self) -> ModelParams {
        ModelParams {
            alpha: self.beta,
            beta: self.alpha,
            p: self.r,
            r: self.p,
            couplings: self.couplings.clone(),
        }
    }
}

/// Lagrange multipliers `(ω₁, ω₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierPair {
    pub omega1: f64,
    pub omega2: f64,
}

/// `m^e` with `m` floored away from zero; 0 for `m = 0` when `e > 0`.
#[inline]
pub(crate) fn pow_mod(m: f64, e: f64) -> f64 {
    if e == 0.0 {
        return 1.0;
    }
    if m <= 0.0 {
        return if e > 0.0 { 0.0 } else { (e * MODULUS_FLOOR.ln()).exp() };
    }
    (e * m.max(MODULUS_FLOOR).ln()).exp()
}

/// Real potential coefficients `(V_u, V_v)` at one sample with moduli `(mu, mv)`:
/// `V_u = α mu^{p-2} + Σ τ_k mv^{q_k} mu^{q_k-2}`. Mixed contributions at a
/// vanishing modulus are taken as 0, which is the limit of `V_u · u`.
#[inline]
pub fn potential_coefficients(params: &ModelParams, mu: f64, mv: f64) -> (f64, f64) {
    let mut vu = params.alpha * pow_mod(mu, params.p - 2.0);
    let mut vv = params.beta * pow_mod(mv, params.r - 2.0);
    for c in &params.couplings {
        if mu > MODULUS_FLOOR {
            vu += c.tau * pow_mod(mv, c.q) * pow_mod(mu, c.q - 2.0);
        }
        if mv > MODULUS_FLOOR {
            vv += c.tau * pow_mod(mu, c.q) * pow_mod(mv, c.q - 2.0);
        }
    }
    let clean = |x: f64| if x.is_finite() { x } else { 0.0 };
    (clean(vu), clean(vv))
}

/// Right-hand sides of the stationary system, `(V_u u, V_v v)`.
pub fn nonlinearity(params: &ModelParams, s: &State) -> State {
    let n = s.grid().len();
    let mut nu = Vec::with_capacity(n);
    let mut nv = Vec::with_capacity(n);
    for (&u, &v) in s.u.values().iter().zip(s.v.values()) {
        let (vu, vv) = potential_coefficients(params, u.norm(), v.norm());
        nu.push(u * vu);
        nv.push(v * vv);
    }
    State::new(Field::from_values(s.grid(), nu), Field::from_values(s.grid(), nv))
}

/// Pieces of the energy, kept separate for the diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyParts {
    pub kinetic_u: f64,
    pub kinetic_v: f64,
    /// `a |u|_p^p`
    pub power_u: f64,
    /// `b |v|_r^r`
    pub power_v: f64,
    /// `Σ c_k |uv|_{q_k}^{q_k}`
    pub mixed: f64,
    /// `Σ τ_k ∫|u|^{q_k}|v|^{q_k}`, the mixed term as it enters the multiplier identities.
    pub mixed_tau: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.kinetic_u + self.kinetic_v - (self.power_u + self.power_v + self.mixed)
    }
}

pub fn energy_parts(params: &ModelParams, s: &State) -> EnergyParts {
    let dx = s.grid().dx();
    let (mut pu, mut pv, mut mixed, mut mixed_tau) = (0.0, 0.0, 0.0, 0.0);
    let c = params.c();
    for (&u, &v) in s.u.values().iter().zip(s.v.values()) {
        let (mu, mv) = (u.norm(), v.norm());
        pu += pow_mod(mu, params.p);
        pv += pow_mod(mv, params.r);
        for (ck, cp) in c.iter().zip(&params.couplings) {
            let prod = pow_mod(mu * mv, cp.q);
            mixed += ck * prod;
            mixed_tau += cp.tau * prod;
        }
    }
    EnergyParts {
        kinetic_u: s.u.kinetic(),
        kinetic_v: s.v.kinetic(),
        power_u: params.a() * pu * dx,
        power_v: params.b() * pv * dx,
        mixed: mixed * dx,
        mixed_tau: mixed_tau * dx,
    }
}

/// The energy `H(u, v)`.
pub fn energy(params: &ModelParams, s: &State) -> f64 {
    energy_parts(params, s).total()
}

/// `Q(f) = |f|₂²`.
pub fn mass(f: &Field) -> f64 {
    f.norm_sq()
}

/// `J(h) = ∫ |h_x|² − β |h|^{α+1}` for exponent `α ∈ (1,5)` and `β > 0`.
pub fn j_functional(h: &Field, alpha_exp: f64, beta_coef: f64) -> Result<f64> {
    check_single_params(alpha_exp, beta_coef)?;
    let potential = h.integrate_modulus(|m| pow_mod(m, alpha_exp + 1.0));
    Ok(h.kinetic() - beta_coef * potential)
}

pub(crate) fn check_single_params(alpha_exp: f64, beta_coef: f64) -> Result<()> {
    if !(alpha_exp > 1.0 && alpha_exp < 5.0) {
        return Err(Error::invalid(format!("exponent must lie in (1,5), got {alpha_exp}")));
    }
    if !(beta_coef > 0.0 && beta_coef.is_finite()) {
        return Err(Error::invalid(format!("coefficient must be positive, got {beta_coef}")));
    }
    Ok(())
}

/// Half the `L²` gradient of `H`:
/// `(−u_xx − V_u u, −v_xx − V_v v)`.
///
/// With this normalization the stationary system reads
/// `gradient + ω · component = 0`, and for any direction `D`,
/// `d/dε H(s + εD)|₀ = 2 Re⟨G, D⟩`.
pub fn energy_gradient(params: &ModelParams, s: &State) -> State {
    let rhs = nonlinearity(params, s);
    let lap = s.map(spectral_second_derivative);
    State::new(
        lap.u.zip_map(&rhs.u, |d2, n| -d2 - n),
        lap.v.zip_map(&rhs.v, |d2, n| -d2 - n),
    )
}

/// Recover `(ω₁, ω₂)` from the integral identities obtained by pairing the
/// stationary equations with `Φ` and `Ψ`.
pub fn multipliers(params: &ModelParams, s: &State) -> Result<MultiplierPair> {
    let qu = mass(&s.u);
    let qv = mass(&s.v);
    if !(qu > 0.0) || !(qv > 0.0) {
        return Err(Error::DegenerateConstraint(format!(
            "component masses must be positive, got ({qu:e}, {qv:e})"
        )));
    }
    let parts = energy_parts(params, s);
    // a|u|_p^p = (2/p) α|u|_p^p, so α|u|_p^p = (p/2) * power_u.
    let alpha_term = 0.5 * params.p * parts.power_u;
    let beta_term = 0.5 * params.r * parts.power_v;
    Ok(MultiplierPair {
        omega1: -(parts.kinetic_u - alpha_term - parts.mixed_tau) / qu,
        omega2: -(parts.kinetic_v - beta_term - parts.mixed_tau) / qv,
    })
}

/// `‖−Φ″ + ω₁Φ − RHS₁‖₂ + ‖−Ψ″ + ω₂Ψ − RHS₂‖₂`.
pub fn el_residual(params: &ModelParams, s: &State, m: MultiplierPair) -> f64 {
    let g = energy_gradient(params, s);
    let ru = g.u.zip_map(&s.u, |gi, ui| gi + ui * m.omega1);
    let rv = g.v.zip_map(&s.v, |gi, vi| gi + vi * m.omega2);
    ru.norm_sq().sqrt() + rv.norm_sq().sqrt()
}
