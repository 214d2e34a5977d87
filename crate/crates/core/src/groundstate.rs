//! Two-constraint energy minimization by normalized gradient flow, with
//! concentration diagnostics, surface scans and structure checks.

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::single_profile;
use crate::error::{Error, Result};
use crate::field::{helmholtz_invert, spectral_second_derivative, Field, Grid, State};
use crate::model::{
    el_residual, energy, energy_parts, j_functional, multipliers, pow_mod, potential_coefficients,
    ModelParams, MultiplierPair,
};

/// Relative per-step slack allowed in the energy before a step is rejected.
const ENERGY_SLACK: f64 = 1e-12;
/// Backtracking gives up once the step shrinks by this factor.
const MIN_STEP_FRACTION: f64 = 1e-8;
/// Equal energies within this distance are broken by residual.
const TIE_TOLERANCE: f64 = 1e-10;
/// Classification threshold of the concentration function.
pub const CLASSIFICATION_EPSILON: f64 = 0.05;

/// Target masses `(s, t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintPair {
    pub s: f64,
    pub t: f64,
}

impl ConstraintPair {
    pub fn new(s: f64, t: f64) -> Result<Self> {
        let c = ConstraintPair { s, t };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, m) in [("s", self.s), ("t", self.t)] {
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::invalid(format!(
                    "mass {name} must be positive, got {m}; use minimize_single for a vanishing component"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartKind {
    Gaussian,
    SechAnsatz,
    Random,
    Provided,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MinimizerConfig {
    pub half_length: f64,
    pub points: usize,
    pub dtau: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Starting guesses, run independently; the lowest energy wins.
    pub starts: Vec<StartKind>,
    pub seed: u64,
    /// Explicit starting state, used when `starts` contains `provided`.
    #[serde(skip)]
    pub initial: Option<State>,
}

impl Default for MinimizerConfig {
    fn default() -> Self {
        MinimizerConfig {
            half_length: crate::field::DEFAULT_HALF_LENGTH,
            points: crate::field::DEFAULT_POINTS,
            dtau: 0.1,
            tol: 1e-9,
            max_iter: 20_000,
            starts: vec![StartKind::Gaussian, StartKind::SechAnsatz, StartKind::Random],
            seed: 0,
            initial: None,
        }
    }
}

impl MinimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dtau > 0.0 && self.dtau.is_finite()) {
            return Err(Error::config("dtau", format!("must be positive, got {}", self.dtau)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::config("tol", format!("must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::config("max_iter", "must be at least 1"));
        }
        if self.starts.is_empty() {
            return Err(Error::config("starts", "at least one start is required"));
        }
        if self.starts.contains(&StartKind::Provided) && self.initial.is_none() {
            return Err(Error::config("starts", "`provided` start requires an initial state"));
        }
        Grid::new(self.half_length, self.points).map_err(|e| Error::config("grid", e.to_string()))?;
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.half_length, self.points)
    }

    /// A single run from the given state.
    pub fn from_state(initial: State) -> Self {
        let grid = initial.grid();
        MinimizerConfig {
            half_length: grid.half_length(),
            points: grid.len(),
            starts: vec![StartKind::Provided],
            initial: Some(initial),
            ..Default::default()
        }
    }
}

/// Outcome of one start of a multistart run.
#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub start: StartKind,
    pub theta: Option<f64>,
    pub residual: Option<f64>,
    pub iterations: Option<usize>,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct GroundState {
    pub profile: State,
    pub multipliers: MultiplierPair,
    pub theta: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub start: StartKind,
    pub runs: Vec<RunSummary>,
    /// Energy after every accepted step of the winning run.
    pub energy_trace: Vec<f64>,
}

/// Minimizer of `J` at fixed mass.
#[derive(Clone, Debug)]
pub struct SingleGroundState {
    pub profile: Field,
    pub lambda: f64,
    pub j_value: f64,
    pub residual: f64,
    pub iterations: usize,
}

enum Objective<'a> {
    Pair(&'a ModelParams),
    Single { alpha_exp: f64, beta_coef: f64 },
}

impl Objective<'_> {
    /// Real potentials `V_j` with the stationary system `−u_j″ + ω_j u_j = V_j u_j`.
    fn potentials(&self, comps: &[Field]) -> Vec<Vec<f64>> {
        match self {
            Objective::Pair(params) => {
                let (mut vu, mut vv) = (Vec::new(), Vec::new());
                for (u, v) in comps[0].values().iter().zip(comps[1].values()) {
                    let (a, b) = potential_coefficients(params, u.norm(), v.norm());
                    vu.push(a);
                    vv.push(b);
                }
                vec![vu, vv]
            }
            Objective::Single { alpha_exp, beta_coef } => {
                let c = 0.5 * (alpha_exp + 1.0) * beta_coef;
                vec![comps[0]
                    .values()
                    .iter()
                    .map(|h| c * pow_mod(h.norm(), alpha_exp - 1.0))
                    .collect()]
            }
        }
    }

    fn energy(&self, comps: &[Field]) -> f64 {
        match self {
            Objective::Pair(params) => energy(params, &State::new(comps[0].clone(), comps[1].clone())),
            Objective::Single { alpha_exp, beta_coef } => {
                j_functional(&comps[0], *alpha_exp, *beta_coef).unwrap_or(f64::NAN)
            }
        }
    }
}

struct Stationarity {
    omegas: Vec<f64>,
    potentials: Vec<Vec<f64>>,
    residual: f64,
}

fn stationarity(obj: &Objective, comps: &[Field]) -> Stationarity {
    let potentials = obj.potentials(comps);
    let mut omegas = Vec::with_capacity(comps.len());
    let mut residual = 0.0;
    for (u, pot) in comps.iter().zip(&potentials) {
        let q = u.norm_sq();
        let dx = u.grid().dx();
        let paired: f64 = u.values().iter().zip(pot).map(|(z, w)| w * z.norm_sqr()).sum::<f64>() * dx;
        let omega = (paired - u.kinetic()) / q;
        let d2 = spectral_second_derivative(u);
        let r: f64 = d2
            .values()
            .iter()
            .zip(u.values())
            .zip(pot)
            .map(|((d, z), w)| (-d + z * (omega - w)).norm_sqr())
            .sum::<f64>()
            * dx;
        residual += r.sqrt();
        omegas.push(omega);
    }
    Stationarity { omegas, potentials, residual }
}

/// Scale samples to the given mass.
fn normalize(f: &Field, target: f64) -> Result<Field> {
    let q = f.norm_sq();
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::NumericalBlowup {
            at: 0.0,
            reason: format!("cannot renormalize a component of mass {q:e}"),
        });
    }
    Ok(f.scale((target / q).sqrt()))
}

/// One semi-implicit step per component:
/// `(σ − ∂xx) w = (σ − ω) u + V u`, `σ = 1/dτ + max(ω, 0)`,
/// followed by renormalization. A fixed point solves the stationary system
/// with the multiplier `ω` recovered from the pairing identity.
fn flow_step(comps: &[Field], st: &Stationarity, dtau: f64, masses: &[f64]) -> Result<Vec<Field>> {
    comps
        .iter()
        .zip(&st.potentials)
        .zip(&st.omegas)
        .zip(masses)
        .map(|(((u, pot), &omega), &m)| {
            let sigma = 1.0 / dtau + omega.max(0.0);
            let rhs: Vec<Complex64> = u
                .values()
                .iter()
                .zip(pot)
                .map(|(z, w)| z * (sigma - omega + w))
                .collect();
            let w = helmholtz_invert(sigma, &Field::from_values(u.grid(), rhs))?;
            let w = w.map(|z| Complex64::new(z.re, 0.0));
            normalize(&w, m)
        })
        .collect()
}

struct FlowOutcome {
    comps: Vec<Field>,
    energy: f64,
    residual: f64,
    omegas: Vec<f64>,
    iterations: usize,
    energy_trace: Vec<f64>,
}

fn run_flow(obj: &Objective, start: Vec<Field>, masses: &[f64], cfg: &MinimizerConfig) -> Result<FlowOutcome> {
    let mut comps = start
        .iter()
        .zip(masses)
        .map(|(f, &m)| normalize(&f.modulus(), m))
        .collect::<Result<Vec<_>>>()?;
    let mut h = obj.energy(&comps);
    let mut trace = vec![h];
    let mut dtau = cfg.dtau;
    let mut last_residual = f64::INFINITY;
    for it in 0..cfg.max_iter {
        let st = stationarity(obj, &comps);
        if !st.residual.is_finite() || !h.is_finite() {
            return Err(Error::NumericalBlowup {
                at: it as f64,
                reason: "non-finite energy or residual".into(),
            });
        }
        last_residual = st.residual;
        if st.residual < cfg.tol {
            return Ok(FlowOutcome {
                comps,
                energy: h,
                residual: st.residual,
                omegas: st.omegas,
                iterations: it,
                energy_trace: trace,
            });
        }
        loop {
            let next = flow_step(&comps, &st, dtau, masses)?;
            let h_next = obj.energy(&next);
            if h_next.is_finite() && h_next <= h + ENERGY_SLACK * h.abs().max(1.0) {
                comps = next;
                h = h_next;
                trace.push(h);
                dtau = (2.0 * dtau).min(cfg.dtau);
                break;
            }
            dtau *= 0.5;
            if dtau < cfg.dtau * MIN_STEP_FRACTION {
                return Err(Error::NumericalBlowup {
                    at: it as f64,
                    reason: format!("energy increased at every step size (H = {h})"),
                });
            }
        }
    }
    Err(Error::Diverged {
        iterations: cfg.max_iter,
        residual: last_residual,
    })
}

fn gaussian(grid: &Grid, width: f64) -> Field {
    grid.sample(|x| (-0.5 * (x / width).powi(2)).exp())
}

fn random_profile(grid: &Grid, rng: &mut ChaCha8Rng) -> Field {
    let terms = rng.random_range(2..=3);
    let params: Vec<(f64, f64, f64)> = (0..terms)
        .map(|_| {
            (
                rng.random_range(0.3..1.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(0.7..2.0),
            )
        })
        .collect();
    grid.sample(|x| {
        params
            .iter()
            .map(|&(a, c, w)| a * (-0.5 * ((x - c) / w).powi(2)).exp())
            .sum()
    })
}

fn pick_best<T>(candidates: Vec<(T, f64, f64)>) -> Option<T> {
    let best_h = candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    candidates
        .into_iter()
        .filter(|c| c.1 <= best_h + TIE_TOLERANCE)
        .min_by(|a, b| a.2.total_cmp(&b.2))
        .map(|c| c.0)
}

/// Ground state of `H` on `Σ_{s,t}`.
///
/// Iterates stay real and nonnegative. Each configured start runs
/// independently; among converged runs the lowest energy wins, with ties
/// within `1e-10` going to the smaller residual.
pub fn minimize(params: &ModelParams, c: ConstraintPair, cfg: &MinimizerConfig) -> Result<GroundState> {
    params.validate()?;
    c.validate()?;
    cfg.validate()?;
    let grid = cfg.grid()?;
    let obj = Objective::Pair(params);
    let masses = [c.s, c.t];
    let mut runs = Vec::new();
    let mut converged = Vec::new();
    let mut first_error = None;
    for (i, &kind) in cfg.starts.iter().enumerate() {
        let start = match kind {
            StartKind::Gaussian => vec![gaussian(&grid, 1.0), gaussian(&grid, 1.0)],
            StartKind::SechAnsatz => vec![
                single_profile(params.p - 1.0, params.a(), c.s, &grid)?.0,
                single_profile(params.r - 1.0, params.b(), c.t, &grid)?.0,
            ],
            StartKind::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i as u64));
                vec![random_profile(&grid, &mut rng), random_profile(&grid, &mut rng)]
            }
            StartKind::Provided => {
                let s = cfg.initial.as_ref().expect("validated");
                if s.grid() != &grid {
                    return Err(Error::config("initial", "initial state grid differs from the configured grid"));
                }
                vec![s.u.clone(), s.v.clone()]
            }
        };
        match run_flow(&obj, start, &masses, cfg) {
            Ok(out) => {
                runs.push(RunSummary {
                    start: kind,
                    theta: Some(out.energy),
                    residual: Some(out.residual),
                    iterations: Some(out.iterations),
                    error: None,
                });
                let (h, r) = (out.energy, out.residual);
                converged.push(((kind, out), h, r));
            }
            Err(e) => {
                runs.push(RunSummary {
                    start: kind,
                    theta: None,
                    residual: None,
                    iterations: None,
                    error: Some(e.to_string()),
                });
                first_error.get_or_insert(e);
            }
        }
    }
    let Some((start, out)) = pick_best(converged) else {
        return Err(first_error.unwrap_or_else(|| Error::Internal("no start was run".into())));
    };
    let mut comps = out.comps.into_iter();
    let profile = State::new(comps.next().unwrap(), comps.next().unwrap());
    let m = multipliers(params, &profile)?;
    let residual = el_residual(params, &profile, m);
    Ok(GroundState {
        theta: energy(params, &profile),
        multipliers: m,
        converged: residual < cfg.tol,
        residual,
        iterations: out.iterations,
        start,
        profile,
        runs,
        energy_trace: out.energy_trace,
    })
}

/// Minimizer of `J(h) = ∫|h_x|² − β|h|^{α+1}` at mass `s`.
pub fn minimize_single(alpha_exp: f64, beta_coef: f64, s: f64, cfg: &MinimizerConfig) -> Result<SingleGroundState> {
    crate::model::check_single_params(alpha_exp, beta_coef)?;
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::invalid(format!("mass must be positive, got {s}")));
    }
    cfg.validate()?;
    let grid = cfg.grid()?;
    let obj = Objective::Single { alpha_exp, beta_coef };
    let mut converged = Vec::new();
    let mut first_error = None;
    for (i, &kind) in cfg.starts.iter().enumerate() {
        let start = match kind {
            StartKind::Gaussian => gaussian(&grid, 1.0),
            StartKind::SechAnsatz => grid.sample(|x| 1.0 / x.cosh()),
            StartKind::Random => random_profile(&grid, &mut ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i as u64))),
            StartKind::Provided => cfg.initial.as_ref().expect("validated").u.clone(),
        };
        match run_flow(&obj, vec![start], &[s], cfg) {
            Ok(out) => {
                let (h, r) = (out.energy, out.residual);
                converged.push((out, h, r));
            }
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    let Some(out) = pick_best(converged) else {
        return Err(first_error.unwrap_or_else(|| Error::Internal("no start was run".into())));
    };
    Ok(SingleGroundState {
        j_value: out.energy,
        lambda: out.omegas[0],
        residual: out.residual,
        iterations: out.iterations,
        profile: out.comps.into_iter().next().unwrap(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Vanishing,
    Dichotomy,
    Compactness,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConcentrationReport {
    pub zeta_values: Vec<f64>,
    pub m_values: Vec<f64>,
    pub gamma_estimate: f64,
    pub total_mass: f64,
    pub classification: Classification,
}

/// `nw` evenly spaced window half-widths from `dx` to `L/4`.
pub fn default_zeta_values(grid: &Grid, nw: usize) -> Vec<f64> {
    let hi = grid.half_length() / 4.0;
    let lo = grid.dx();
    (0..nw)
        .map(|i| lo + (hi - lo) * i as f64 / (nw.max(2) - 1) as f64)
        .collect()
}

/// Concentration function `M(ζ) = max_y ∫_{y−ζ}^{y+ζ} (|u|² + |v|²)` over
/// window centers on the grid. A window holds the `2⌊ζ/dx⌋ + 1` samples
/// nearest its center; `γ` is `M` at the largest `ζ`.
pub fn concentration_profile(s: &State, zeta_values: &[f64]) -> ConcentrationReport {
    let grid = s.grid();
    let n = grid.len();
    let dx = grid.dx();
    let rho: Vec<f64> = s
        .u
        .values()
        .iter()
        .zip(s.v.values())
        .map(|(u, v)| (u.norm_sqr() + v.norm_sqr()) * dx)
        .collect();
    let total: f64 = rho.iter().sum();
    // prefix sums over two periods make every periodic window contiguous
    let mut prefix = vec![0.0; 2 * n + 1];
    for i in 0..2 * n {
        prefix[i + 1] = prefix[i] + rho[i % n];
    }
    let mut m_values = Vec::with_capacity(zeta_values.len());
    let mut running = 0.0f64;
    for &zeta in zeta_values {
        let half = (zeta.max(0.0) / dx + 1e-9).floor() as usize;
        let width = 2 * half + 1;
        let m = if width >= n {
            total
        } else {
            (0..n)
                .map(|start| prefix[start + width] - prefix[start])
                .fold(0.0, f64::max)
        };
        // sliding sums inherit rounding; keep M non-decreasing in ζ
        running = running.max(m);
        m_values.push(running);
    }
    let gamma = m_values.last().copied().unwrap_or(0.0);
    let classification = if total <= 0.0 || gamma < CLASSIFICATION_EPSILON * total {
        Classification::Vanishing
    } else if gamma > (1.0 - CLASSIFICATION_EPSILON) * total {
        Classification::Compactness
    } else {
        Classification::Dichotomy
    };
    ConcentrationReport {
        zeta_values: zeta_values.to_vec(),
        m_values,
        gamma_estimate: gamma,
        total_mass: total,
        classification,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaCell {
    pub s: f64,
    pub t: f64,
    pub theta: Option<f64>,
    pub omega1: Option<f64>,
    pub omega2: Option<f64>,
    pub residual: Option<f64>,
    pub iterations: Option<usize>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaSurface {
    pub s_values: Vec<f64>,
    pub t_values: Vec<f64>,
    /// Row-major over `s_values` × `t_values`.
    pub cells: Vec<ThetaCell>,
}

impl ThetaSurface {
    pub fn cell(&self, i: usize, j: usize) -> &ThetaCell {
        &self.cells[i * self.t_values.len() + j]
    }

    /// Converged `Θ` at `(s, t)` if that point is on the grid.
    pub fn theta_at(&self, s: f64, t: f64) -> Option<Option<f64>> {
        let i = find_value(&self.s_values, s)?;
        let j = find_value(&self.t_values, t)?;
        Some(self.cell(i, j).theta)
    }
}

fn find_value(values: &[f64], x: f64) -> Option<usize> {
    values
        .iter()
        .position(|&v| (v - x).abs() <= 1e-12 * v.abs().max(1.0))
}

/// Minimize on every cell of `s_values × t_values` using `jobs` workers.
/// Failed cells record their error; the scan continues.
pub fn theta_scan(
    params: &ModelParams,
    s_values: &[f64],
    t_values: &[f64],
    cfg: &MinimizerConfig,
    jobs: usize,
) -> Result<ThetaSurface> {
    params.validate()?;
    cfg.validate()?;
    let points: Vec<(f64, f64)> = s_values
        .iter()
        .flat_map(|&s| t_values.iter().map(move |&t| (s, t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    let cells = pool.install(|| {
        points
            .par_iter()
            .map(|&(s, t)| {
                let result = ConstraintPair::new(s, t).and_then(|c| minimize(params, c, cfg));
                match result {
                    Ok(g) => ThetaCell {
                        s,
                        t,
                        theta: Some(g.theta),
                        omega1: Some(g.multipliers.omega1),
                        omega2: Some(g.multipliers.omega2),
                        residual: Some(g.residual),
                        iterations: Some(g.iterations),
                        error: None,
                    },
                    Err(e) => ThetaCell {
                        s,
                        t,
                        theta: None,
                        omega1: None,
                        omega2: None,
                        residual: None,
                        iterations: None,
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect()
    });
    Ok(ThetaSurface {
        s_values: s_values.to_vec(),
        t_values: t_values.to_vec(),
        cells,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Quadruple {
    pub s1: f64,
    pub t1: f64,
    pub s2: f64,
    pub t2: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubadditivityReport {
    pub checks: usize,
    pub skipped: usize,
    pub tolerance: f64,
    pub min_margin: Option<f64>,
    pub margins: Vec<Quadruple>,
    pub failures: Vec<Quadruple>,
}

pub const SUBADDITIVITY_TOLERANCE: f64 = 1e-7;

/// `Θ(s₁,t₁) + Θ(s₂,t₂) − Θ(s₁+s₂, t₁+t₂)` for every unordered pair of
/// cells whose sum lies on the grid. Pairs with an off-grid sum or a failed
/// cell are counted as skipped; margins at or below the tolerance fail.
pub fn subadditivity_check(surface: &ThetaSurface, tolerance: f64) -> SubadditivityReport {
    let points: Vec<(f64, f64, Option<f64>)> = surface
        .cells
        .iter()
        .map(|c| (c.s, c.t, c.theta))
        .collect();
    let mut report = SubadditivityReport {
        checks: 0,
        skipped: 0,
        tolerance,
        min_margin: None,
        margins: Vec::new(),
        failures: Vec::new(),
    };
    for (i, &(s1, t1, h1)) in points.iter().enumerate() {
        for &(s2, t2, h2) in &points[i..] {
            let sum = surface.theta_at(s1 + s2, t1 + t2);
            let (Some(h1), Some(h2), Some(Some(h12))) = (h1, h2, sum) else {
                report.skipped += 1;
                continue;
            };
            let q = Quadruple {
                s1,
                t1,
                s2,
                t2,
                margin: h1 + h2 - h12,
            };
            report.checks += 1;
            report.min_margin = Some(report.min_margin.map_or(q.margin, |m: f64| m.min(q.margin)));
            if q.margin <= tolerance {
                report.failures.push(q.clone());
            }
            report.margins.push(q);
        }
    }
    report
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub phase_u: f64,
    pub phase_v: f64,
    pub phase_deviation_u: f64,
    pub phase_deviation_v: f64,
    /// Smallest modulus of either component over `|x| ≤ L/2`.
    pub min_modulus: f64,
    /// `|Φ′|² − a|Φ|_p^p − c|ΦΨ|_q^q`, negative at a minimizer.
    pub negativity_u: f64,
    /// `|Ψ′|² − b|Ψ|_r^r − c|ΦΨ|_q^q`, negative at a minimizer.
    pub negativity_v: f64,
    pub gradient_norm_u: f64,
    pub gradient_norm_v: f64,
}

/// Modulus-weighted mean phase and the largest circular deviation from it
/// over samples above `1e-8` of the peak modulus.
fn phase_statistics(f: &Field) -> (f64, f64) {
    let peak = f.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return (0.0, 0.0);
    }
    let mean: Complex64 = f.values().iter().sum();
    let theta = mean.arg();
    let dev = f
        .values()
        .iter()
        .filter(|z| z.norm() > 1e-8 * peak)
        .map(|z| (z * Complex64::from_polar(1.0, -theta)).arg().abs())
        .fold(0.0, f64::max);
    (theta, dev)
}

pub fn structure_check(params: &ModelParams, g: &GroundState) -> StructureReport {
    let s = &g.profile;
    let (phase_u, phase_deviation_u) = phase_statistics(&s.u);
    let (phase_v, phase_deviation_v) = phase_statistics(&s.v);
    let half = s.grid().half_length() / 2.0;
    let min_modulus = s
        .grid()
        .points()
        .iter()
        .zip(s.u.values().iter().zip(s.v.values()))
        .filter(|(x, _)| x.abs() <= half)
        .map(|(_, (u, v))| u.norm().min(v.norm()))
        .fold(f64::INFINITY, f64::min);
    let parts = energy_parts(params, s);
    StructureReport {
        phase_u,
        phase_v,
        phase_deviation_u,
        phase_deviation_v,
        min_modulus,
        negativity_u: parts.kinetic_u - parts.power_u - parts.mixed,
        negativity_v: parts.kinetic_v - parts.power_v - parts.mixed,
        gradient_norm_u: parts.kinetic_u.sqrt(),
        gradient_norm_v: parts.kinetic_v.sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::phase_rotate;

    fn sech(x: f64) -> f64 {
        1.0 / x.cosh()
    }

    fn quartic_ground_state() -> GroundState {
        let cfg = MinimizerConfig {
            starts: vec![StartKind::SechAnsatz],
            ..Default::default()
        };
        minimize(&ModelParams::symmetric_quartic(), ConstraintPair::new(2.0, 2.0).unwrap(), &cfg).unwrap()
    }

    // J(2 sech 2x) for exponent 3, coefficient 1, by quadrature on n = 8192.
    const J_MASS_FOUR: f64 = -5.33333333333332860;

    #[test]
    fn symmetric_quartic_benchmark() {
        let g = quartic_ground_state();
        assert!((g.theta + 4.0 / 3.0).abs() < 1e-6, "{}", g.theta);
        assert!((g.multipliers.omega1 - 1.0).abs() < 1e-5);
        assert!((g.multipliers.omega2 - 1.0).abs() < 1e-5);
        assert!(g.converged && g.residual < 1e-9);
        assert!((g.profile.u.norm_sq() - 2.0).abs() < 1e-13 * 2.0);
        assert!((g.profile.v.norm_sq() - 2.0).abs() < 1e-13 * 2.0);
        let err = g
            .profile
            .u
            .values()
            .iter()
            .zip(g.profile.u.grid().points())
            .map(|(z, &x)| (z.re - sech(x)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn energy_descends_monotonically() {
        let g = quartic_ground_state();
        for w in g.energy_trace.windows(2) {
            assert!(w[1] <= w[0] + ENERGY_SLACK * w[0].abs().max(1.0));
        }
        assert_eq!(*g.energy_trace.last().unwrap(), g.theta);
    }

    #[test]
    fn theta_is_negative_for_unit_masses() {
        let cfg = MinimizerConfig::default();
        for params in [
            ModelParams::symmetric_quartic(),
            ModelParams::single(1.0, 2.0, 0.5, 3.0, 5.0, 2.5).unwrap(),
        ] {
            let g = minimize(&params, ConstraintPair::new(1.0, 1.0).unwrap(), &cfg).unwrap();
            assert!(g.theta < 0.0);
            assert!(g.multipliers.omega1 > 0.0 && g.multipliers.omega2 > 0.0);
            let c = concentration_profile(&g.profile, &default_zeta_values(g.profile.grid(), 32));
            assert_eq!(c.classification, Classification::Compactness);
            assert!(c.gamma_estimate / 2.0 > 0.999);
        }
    }

    #[test]
    fn multistart_reports_every_run() {
        let g = minimize(
            &ModelParams::symmetric_quartic(),
            ConstraintPair::new(2.0, 2.0).unwrap(),
            &MinimizerConfig::default(),
        )
        .unwrap();
        assert_eq!(g.runs.len(), 3);
        let best = g.runs.iter().filter_map(|r| r.theta).fold(f64::INFINITY, f64::min);
        assert!(g.theta <= best + TIE_TOLERANCE);
    }

    #[test]
    fn rejects_bad_input() {
        let p = ModelParams::symmetric_quartic();
        assert!(ConstraintPair::new(0.0, 1.0).is_err());
        let cfg = MinimizerConfig {
            dtau: 0.0,
            ..Default::default()
        };
        assert!(matches!(
            minimize(&p, ConstraintPair { s: 1.0, t: 1.0 }, &cfg),
            Err(Error::Config { .. })
        ));
        assert!(minimize_single(3.0, 1.0, 0.0, &MinimizerConfig::default()).is_err());
        assert!(minimize_single(3.0, 1.0, -1.0, &MinimizerConfig::default()).is_err());
    }

    #[test]
    fn diverged_error_carries_residual() {
        let cfg = MinimizerConfig {
            max_iter: 3,
            starts: vec![StartKind::Gaussian],
            ..Default::default()
        };
        match minimize(&ModelParams::symmetric_quartic(), ConstraintPair::new(2.0, 2.0).unwrap(), &cfg) {
            Err(Error::Diverged { iterations, residual }) => {
                assert_eq!(iterations, 3);
                assert!(residual > 0.0 && residual.is_finite());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn single_component_minimizers() {
        let cfg = MinimizerConfig::default();
        let out = minimize_single(3.0, 1.0, 2.0, &cfg).unwrap();
        assert!((out.j_value + 2.0 / 3.0).abs() < 1e-6);
        let peak = out.profile.argmax_modulus();
        let shift = out.profile.grid().points()[peak];
        let err = out
            .profile
            .values()
            .iter()
            .zip(out.profile.grid().points())
            .map(|(z, &x)| (z.re - sech(x - shift)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");

        let out = minimize_single(3.0, 1.0, 4.0, &cfg).unwrap();
        assert!((out.j_value - J_MASS_FOUR).abs() < 1e-6, "{}", out.j_value);
        assert!((J_MASS_FOUR + 16.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn concentration_examples() {
        let g = Grid::default_box();
        let zeros = State::zeros(&g);
        let zetas = default_zeta_values(&g, 16);
        let c = concentration_profile(&zeros, &zetas);
        assert_eq!(c.gamma_estimate, 0.0);
        assert_eq!(c.classification, Classification::Vanishing);

        let l = g.half_length();
        let two = g.sample(|x| sech(x + l / 2.0) + sech(x - l / 2.0));
        let s = State::new(two.clone(), two);
        let c = concentration_profile(&s, &zetas);
        assert!(c.m_values.windows(2).all(|w| w[1] >= w[0]));
        assert!((c.gamma_estimate / c.total_mass - 0.5).abs() < 1e-6);
        assert_eq!(c.classification, Classification::Dichotomy);
        assert!(c.gamma_estimate <= c.total_mass + 1e-9);
    }

    #[test]
    fn scan_and_subadditivity() {
        let p = ModelParams::symmetric_quartic();
        let cfg = MinimizerConfig {
            starts: vec![StartKind::SechAnsatz],
            ..Default::default()
        };
        let one = theta_scan(&p, &[2.0], &[2.0], &cfg, 1).unwrap();
        let direct = minimize(&p, ConstraintPair::new(2.0, 2.0).unwrap(), &cfg).unwrap();
        assert_eq!(one.cells[0].theta, Some(direct.theta));
        let empty = subadditivity_check(&one, SUBADDITIVITY_TOLERANCE);
        assert_eq!(empty.checks, 0);
        assert!(empty.margins.is_empty());

        let surface = theta_scan(&p, &[1.0, 2.0], &[1.0, 2.0], &cfg, 2).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let a = surface.cell(i, j).theta.unwrap();
                let b = surface.cell(j, i).theta.unwrap();
                assert!((a - b).abs() < 1e-6);
                assert!(a < 0.0);
            }
        }
        let report = subadditivity_check(&surface, SUBADDITIVITY_TOLERANCE);
        // only (1,1) + (1,1) lands back inside {1,2}²
        assert_eq!(report.checks, 1);
        assert!(report.failures.is_empty());
        assert!(report.min_margin.unwrap() > 0.0);
    }

    #[test]
    fn structure_of_rotated_ground_state() {
        let p = ModelParams::symmetric_quartic();
        let mut g = quartic_ground_state();
        let base = structure_check(&p, &g);
        assert!(base.min_modulus > 0.0);
        assert!(base.negativity_u < 0.0 && base.negativity_v < 0.0);
        assert!(base.gradient_norm_u > 0.0 && base.gradient_norm_v > 0.0);

        g.profile = State::new(phase_rotate(&g.profile.u, 0.7), phase_rotate(&g.profile.v, -1.1));
        let r = structure_check(&p, &g);
        assert!(r.phase_deviation_u < 1e-8 && r.phase_deviation_v < 1e-8);
        assert!((r.phase_u - 0.7).abs() < 1e-12);
        assert!((r.phase_v + 1.1).abs() < 1e-12);

        let grid = g.profile.grid().clone();
        let mut flipped = quartic_ground_state();
        let u = flipped.profile.u.values().to_vec();
        let tail: Vec<Complex64> = grid
            .points()
            .iter()
            .zip(u)
            .map(|(&x, z)| if x > 5.0 { -z } else { z })
            .collect();
        flipped.profile.u = Field::from_values(&grid, tail);
        let r = structure_check(&p, &flipped);
        assert!((r.phase_deviation_u - std::f64::consts::PI).abs() < 1e-6);
    }
}
