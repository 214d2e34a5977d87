//! Split-step time integration, conservation monitoring, the distance to a
//! symmetry orbit, and the orbital-stability experiment.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{phase_rotate, translate, y_norm, Field, Grid, State};
use crate::groundstate::GroundState;
use crate::model::{energy, potential_coefficients, ModelParams};

/// Highest mode index `|j|` (wavenumber `πj/L`) in stability perturbations.
pub const PERTURBATION_MODES: i64 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub horizon: f64,
    /// Diagnostics are taken every `sample_stride` steps.
    pub sample_stride: usize,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            dt: 1e-3,
            horizon: 50.0,
            sample_stride: 100,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::config("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::config("horizon", format!("must be positive, got {}", self.horizon)));
        }
        if self.dt > self.horizon {
            return Err(Error::config("dt", "must not exceed the horizon"));
        }
        if self.sample_stride == 0 {
            return Err(Error::config("sample_stride", "must be at least 1"));
        }
        Ok(())
    }

    /// Number of steps; the step is shortened so they end exactly at the horizon.
    pub fn steps(&self) -> usize {
        (self.horizon / self.dt - 1e-9).ceil().max(1.0) as usize
    }

    pub fn effective_dt(&self) -> f64 {
        self.horizon / self.steps() as f64
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct TrajectoryReport {
    pub dt: f64,
    pub steps: usize,
    pub times: Vec<f64>,
    pub q_u: Vec<f64>,
    pub q_v: Vec<f64>,
    pub h_values: Vec<f64>,
    pub drift_q_u: f64,
    pub drift_q_v: f64,
    pub drift_h: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distances: Option<Vec<f64>>,
}

fn relative_drift(values: &[f64]) -> f64 {
    let Some(&first) = values.first() else {
        return 0.0;
    };
    values
        .iter()
        .map(|v| (v - first).abs())
        .fold(0.0, f64::max)
        / first.abs().max(1.0)
}

impl TrajectoryReport {
    fn push(&mut self, params: &ModelParams, t: f64, s: &State) {
        self.times.push(t);
        self.q_u.push(s.u.norm_sq());
        self.q_v.push(s.v.norm_sq());
        self.h_values.push(energy(params, s));
    }

    fn finish(&mut self) {
        self.drift_q_u = relative_drift(&self.q_u);
        self.drift_q_v = relative_drift(&self.q_v);
        self.drift_h = relative_drift(&self.h_values);
    }
}

/// `e^{iθ} − 1`, accurate to relative rounding for small `θ`. Rotating as
/// `z + z (e^{iθ} − 1)` keeps the modulus error unbiased; `z e^{iθ}` with a
/// rounded `cos θ` near 1 shifts every repeated rotation the same way, which
/// shows up as a steady mass drift over long runs.
fn rotation_increment(theta: f64) -> Complex64 {
    let h = (0.5 * theta).sin();
    Complex64::new(-2.0 * h * h, theta.sin())
}

/// Strang splitting with step `dt` (negative steps run backward in time).
struct Propagator<'a> {
    params: &'a ModelParams,
    grid: Grid,
    dt: f64,
    full: Vec<Complex64>,
    half: Vec<Complex64>,
}

impl<'a> Propagator<'a> {
    fn new(params: &'a ModelParams, grid: &Grid, dt: f64) -> Self {
        let k = grid.wavenumbers();
        let symbol = |h: f64| -> Vec<Complex64> { k.iter().map(|&kj| rotation_increment(-kj * kj * h)).collect() };
        Propagator {
            params,
            grid: grid.clone(),
            dt,
            full: symbol(dt),
            half: symbol(0.5 * dt),
        }
    }

    /// Fourier multiplier `e^{−ik²h}`, stored as its increment.
    fn linear(&self, f: &mut [Complex64], increment: &[Complex64]) {
        self.grid.forward(f);
        f.iter_mut().zip(increment).for_each(|(z, w)| *z += *z * w);
        self.grid.inverse(f);
    }

    /// Exact flow of `i u_t + V_u u = 0`: the moduli, hence the potentials, are frozen.
    fn nonlinear(&self, u: &mut [Complex64], v: &mut [Complex64]) {
        for (a, b) in u.iter_mut().zip(v.iter_mut()) {
            let (vu, vv) = potential_coefficients(self.params, a.norm(), b.norm());
            *a += *a * rotation_increment(self.dt * vu);
            *b += *b * rotation_increment(self.dt * vv);
        }
    }

    /// `steps` Strang steps, calling `observe` after every `stride` steps
    /// (and once at the start). Linear half-steps between observations are
    /// fused into full steps.
    fn run(
        &self,
        s0: &State,
        steps: usize,
        stride: usize,
        mut observe: impl FnMut(f64, &State) -> Result<()>,
    ) -> Result<State> {
        let mut u = s0.u.values().to_vec();
        let mut v = s0.v.values().to_vec();
        observe(0.0, s0)?;
        let mut done = 0;
        let mut state = s0.clone();
        while done < steps {
            let chunk = stride.min(steps - done);
            self.linear(&mut u, &self.half);
            self.linear(&mut v, &self.half);
            self.nonlinear(&mut u, &mut v);
            for _ in 1..chunk {
                self.linear(&mut u, &self.full);
                self.linear(&mut v, &self.full);
                self.nonlinear(&mut u, &mut v);
            }
            self.linear(&mut u, &self.half);
            self.linear(&mut v, &self.half);
            if !u.iter().chain(v.iter()).all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NumericalBlowup {
                    at: done as f64 * self.dt,
                    reason: "non-finite samples".into(),
                });
            }
            done += chunk;
            state = State::new(
                Field::from_values(&self.grid, u.clone()),
                Field::from_values(&self.grid, v.clone()),
            );
            observe(done as f64 * self.dt, &state)?;
        }
        Ok(state)
    }
}

/// Integrate the coupled system to `cfg.horizon`, monitoring masses and energy.
pub fn evolve(params: &ModelParams, s0: &State, cfg: &EvolutionConfig) -> Result<(State, TrajectoryReport)> {
    evolve_with(params, s0, cfg, |_, _| Ok(()))
}

fn evolve_with(
    params: &ModelParams,
    s0: &State,
    cfg: &EvolutionConfig,
    mut extra: impl FnMut(f64, &State) -> Result<()>,
) -> Result<(State, TrajectoryReport)> {
    params.validate()?;
    cfg.validate()?;
    let steps = cfg.steps();
    let dt = cfg.effective_dt();
    let mut report = TrajectoryReport {
        dt,
        steps,
        ..Default::default()
    };
    let prop = Propagator::new(params, s0.grid(), dt);
    let end = prop.run(s0, steps, cfg.sample_stride, |t, s| {
        report.push(params, t, s);
        extra(t, s)
    })?;
    report.finish();
    Ok((end, report))
}

/// `steps` Strang steps of signed size `dt`, without diagnostics.
pub fn propagate(params: &ModelParams, s0: &State, dt: f64, steps: usize) -> Result<State> {
    params.validate()?;
    if !(dt != 0.0 && dt.is_finite()) {
        return Err(Error::invalid(format!("step must be finite and nonzero, got {dt}")));
    }
    Propagator::new(params, s0.grid(), dt).run(s0, steps, steps.max(1), |_, _| Ok(()))
}

/// Closest point of the orbit `{(e^{iθ₁} Φ(· − y), e^{iθ₂} Ψ(· − y))}` of
/// `reference` to a state, in the `Y` norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Alignment {
    pub distance: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub y: f64,
}

/// `H¹` cross-correlation `c(y) = ⟨translate(r, y), s⟩₁` in transform form.
struct Correlation {
    /// `(k, F(k))` with `c(y) = dx/n Σ F(k) e^{iky}`.
    terms: Vec<(f64, Complex64)>,
    scale: f64,
}

impl Correlation {
    fn new(r: &Field, s: &Field) -> Self {
        let g = r.grid();
        let (rh, sh) = (r.spectrum(), s.spectrum());
        let terms = g
            .wavenumbers()
            .iter()
            .zip(rh.iter().zip(&sh))
            .map(|(&k, (a, b))| (k, a.conj() * b * (1.0 + k * k)))
            .collect();
        Correlation {
            terms,
            scale: g.dx() / g.len() as f64,
        }
    }

    /// `(c, c′, c″)` at `y`.
    fn eval(&self, y: f64) -> (Complex64, Complex64, Complex64) {
        let (mut c0, mut c1, mut c2) = (Complex64::default(), Complex64::default(), Complex64::default());
        for &(k, f) in &self.terms {
            let w = f * Complex64::from_polar(1.0, k * y);
            c0 += w;
            c1 += w * Complex64::new(0.0, k);
            c2 -= w * (k * k);
        }
        (c0 * self.scale, c1 * self.scale, c2 * self.scale)
    }

    /// `c` at every grid shift `y_m = m dx`.
    fn on_grid(&self, g: &Grid) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = self.terms.iter().map(|t| t.1).collect();
        g.inverse(&mut buf);
        let n = g.len() as f64;
        buf.iter().map(|z| z * self.scale * n).collect()
    }
}

/// `Σ_j |c_j(y)|` with its first two derivatives.
fn score(corr: &[Correlation; 2], y: f64) -> (f64, f64, f64) {
    let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
    for c in corr {
        let (a, b, d) = c.eval(y);
        let m = a.norm();
        if m < 1e-300 {
            continue;
        }
        let re = (a.conj() * b).re;
        s0 += m;
        s1 += re / m;
        s2 += (b.norm_sqr() + (a.conj() * d).re) / m - re * re / (m * m * m);
    }
    (s0, s1, s2)
}

fn wrap(y: f64, half_length: f64) -> f64 {
    let period = 2.0 * half_length;
    let w = (y + half_length).rem_euclid(period) - half_length;
    if w <= -half_length {
        w + period
    } else {
        w
    }
}

/// Minimize `‖(e^{iθ₁} T_y Φ, e^{iθ₂} T_y Ψ) − s‖_Y` over `y, θ₁, θ₂`.
///
/// For fixed `y` the optimal phases are the arguments of the `H¹` inner
/// products, so only `y` is searched: the grid maximum of the correlation,
/// a golden-section search on the neighbouring cells, then Newton steps on
/// the derivative to reach full precision.
pub fn symmetry_distance(s: &State, reference: &State) -> Result<Alignment> {
    let g = s.grid();
    if reference.grid() != g {
        return Err(Error::invalid("state and reference live on different grids"));
    }
    let corr = [Correlation::new(&reference.u, &s.u), Correlation::new(&reference.v, &s.v)];
    let dx = g.dx();
    let (cu, cv) = (corr[0].on_grid(g), corr[1].on_grid(g));
    let best = (0..g.len())
        .max_by(|&i, &j| (cu[i].norm() + cv[i].norm()).total_cmp(&(cu[j].norm() + cv[j].norm())))
        .unwrap_or(0);
    let y0 = best as f64 * dx;

    let (mut lo, mut hi) = (y0 - dx, y0 + dx);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let (mut fa, mut fb) = (score(&corr, a).0, score(&corr, b).0);
    for _ in 0..40 {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = score(&corr, b).0;
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = score(&corr, a).0;
        }
    }
    let mut y = 0.5 * (lo + hi);
    for _ in 0..4 {
        let (_, d1, d2) = score(&corr, y);
        if !(d2 < 0.0) {
            break;
        }
        let next = y - d1 / d2;
        if (next - y).abs() > dx {
            break;
        }
        y = next;
    }
    // keep the better of the polished point and the grid point
    if score(&corr, y0).0 > score(&corr, y).0 {
        y = y0;
    }
    let theta = |c: &Correlation| {
        let z = c.eval(y).0;
        if z.norm() > 0.0 {
            z.arg()
        } else {
            0.0
        }
    };
    let (theta1, theta2) = (theta(&corr[0]), theta(&corr[1]));
    let aligned = State::new(
        phase_rotate(&translate(&reference.u, y), theta1),
        phase_rotate(&translate(&reference.v, y), theta2),
    );
    Ok(Alignment {
        distance: y_norm(&aligned.sub(s)),
        theta1,
        theta2,
        y: wrap(y, g.half_length()),
    })
}

/// Seeded random complex field built from the modes `|j| ≤ 8` of the box,
/// scaled to `Y` norm `delta`.
pub fn smooth_perturbation(grid: &Grid, delta: f64, seed: u64) -> State {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut component = || {
        let modes: Vec<(f64, Complex64)> = (-PERTURBATION_MODES..=PERTURBATION_MODES)
            .map(|j| {
                let k = PI * j as f64 / grid.half_length();
                (k, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            })
            .collect();
        grid.sample_complex(|x| modes.iter().map(|&(k, c)| c * Complex64::from_polar(1.0, k * x)).sum())
    };
    let raw = State::new(component(), component());
    let norm = y_norm(&raw);
    if delta == 0.0 || norm == 0.0 {
        return State::zeros(grid);
    }
    raw.scale(delta / norm)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StabilityConfig {
    pub evolution: EvolutionConfig,
    pub seed: u64,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig {
            evolution: EvolutionConfig::default(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    pub delta: f64,
    pub seed: u64,
    pub times: Vec<f64>,
    pub distances: Vec<f64>,
    pub max_distance: f64,
    pub mean_distance: f64,
    /// Mean over the last quarter of the samples.
    pub final_quarter_mean: f64,
    pub trajectory: TrajectoryReport,
}

/// Perturb the ground state by a seeded smooth field of `Y` norm `delta`
/// (masses are not restored), evolve, and track the distance to the
/// ground state's symmetry orbit.
pub fn stability_experiment(
    params: &ModelParams,
    g: &GroundState,
    delta: f64,
    cfg: &StabilityConfig,
) -> Result<StabilityReport> {
    params
        .validate()
        .map_err(|e| Error::invalid(format!("parameters outside the validated range: {e}")))?;
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::invalid(format!("perturbation size must be nonnegative, got {delta}")));
    }
    if !g.converged {
        return Err(Error::invalid("stability runs need a converged ground state"));
    }
    let grid = g.profile.grid();
    let s0 = g.profile.add(&smooth_perturbation(grid, delta, cfg.seed));
    let mut distances = Vec::new();
    let (_, mut trajectory) = evolve_with(params, &s0, &cfg.evolution, |_, s| {
        distances.push(symmetry_distance(s, &g.profile)?.distance);
        Ok(())
    })?;
    let max_distance = distances.iter().copied().fold(0.0, f64::max);
    let mean = |d: &[f64]| d.iter().sum::<f64>() / d.len().max(1) as f64;
    let quarter = distances.len() - distances.len() * 3 / 4;
    let final_quarter_mean = mean(&distances[distances.len() - quarter..]);
    trajectory.distances = Some(distances.clone());
    Ok(StabilityReport {
        delta,
        seed: cfg.seed,
        times: trajectory.times.clone(),
        mean_distance: mean(&distances),
        distances,
        max_distance,
        final_quarter_mean,
        trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::symmetric_pair;
    use crate::field::spectral_derivative;
    use crate::groundstate::{minimize, ConstraintPair, MinimizerConfig, StartKind};
    use crate::model::Coupling;

    fn setup() -> (Grid, ModelParams, State) {
        let g = Grid::default_box();
        let p = ModelParams::symmetric_quartic();
        let s = symmetric_pair(1.0, 1.0, &g).unwrap();
        (g, p, s)
    }

    /// Real `H¹` pairing on states.
    fn h1_pairing(a: &State, b: &State) -> f64 {
        let one = |f: &Field, h: &Field| {
            let d = f.inner(h).re;
            let k = spectral_derivative(f).inner(&spectral_derivative(h)).re;
            d + k
        };
        one(&a.u, &b.u) + one(&a.v, &b.v)
    }

    #[test]
    fn config_validation() {
        assert!(EvolutionConfig::default().validate().is_ok());
        let bad = [
            EvolutionConfig { dt: 0.0, ..Default::default() },
            EvolutionConfig { dt: 2.0, horizon: 1.0, ..Default::default() },
            EvolutionConfig { sample_stride: 0, ..Default::default() },
        ];
        for c in bad {
            assert!(matches!(c.validate(), Err(Error::Config { .. })));
        }
        let c = EvolutionConfig { dt: 0.3, horizon: 1.0, sample_stride: 1 };
        assert_eq!(c.steps(), 4);
        assert!((c.effective_dt() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn zero_state_stays_zero() {
        let (g, p, _) = setup();
        let cfg = EvolutionConfig { dt: 1e-2, horizon: 1.0, sample_stride: 10 };
        let (end, report) = evolve(&p, &State::zeros(&g), &cfg).unwrap();
        assert!(end.u.values().iter().chain(end.v.values()).all(|z| z.norm() == 0.0));
        assert_eq!(report.times.len(), 11);
        assert_eq!(report.drift_h, 0.0);
    }

    #[test]
    fn masses_conserved_on_short_run() {
        let (g, p, s) = setup();
        let s0 = s.add(&smooth_perturbation(&g, 1e-2, 3));
        let cfg = EvolutionConfig { dt: 1e-3, horizon: 2.0, sample_stride: 50 };
        let (_, r) = evolve(&p, &s0, &cfg).unwrap();
        assert!(r.drift_q_u < 1e-13 && r.drift_q_v < 1e-13, "{} {}", r.drift_q_u, r.drift_q_v);
        assert!(r.drift_h < 1e-6);
        assert_eq!(r.times.len(), r.h_values.len());
        assert_eq!(r.q_u.len(), r.q_v.len());
    }

    #[test]
    fn time_reversal() {
        let (g, p, s) = setup();
        let s0 = s.add(&smooth_perturbation(&g, 1e-2, 5));
        let forward = propagate(&p, &s0, 1e-3, 1000).unwrap();
        let back = propagate(&p, &forward, -1e-3, 1000).unwrap();
        assert!(y_norm(&back.sub(&s0)) < 1e-8);
        assert!(propagate(&p, &s0, 0.0, 1).is_err());
    }

    #[test]
    fn gauge_covariance() {
        let (g, p, s) = setup();
        let s0 = s.add(&smooth_perturbation(&g, 1e-1, 9));
        let theta = 0.9;
        let rotated = State::new(phase_rotate(&s0.u, theta), phase_rotate(&s0.v, theta));
        let cfg = EvolutionConfig { dt: 1e-3, horizon: 0.5, sample_stride: 500 };
        let (a, _) = evolve(&p, &rotated, &cfg).unwrap();
        let (b, _) = evolve(&p, &s0, &cfg).unwrap();
        let b = State::new(phase_rotate(&b.u, theta), phase_rotate(&b.v, theta));
        assert!(y_norm(&a.sub(&b)) < 1e-10);
    }

    #[test]
    fn distance_to_itself_and_orbit_points() {
        let (_, _, s) = setup();
        let a = symmetry_distance(&s, &s).unwrap();
        assert!(a.distance < 1e-12 && a.y.abs() < 1e-10);

        let moved = State::new(
            phase_rotate(&translate(&s.u, 1.3), 0.7),
            phase_rotate(&translate(&s.v, 1.3), 0.7),
        );
        let a = symmetry_distance(&moved, &s).unwrap();
        assert!(a.distance < 1e-9, "{}", a.distance);
        assert!((a.y - 1.3).abs() < 1e-9);
        assert!((a.theta1 - 0.7).abs() < 1e-9 && (a.theta2 - 0.7).abs() < 1e-9);

        let other = Grid::new(10.0, 64).unwrap();
        assert!(symmetry_distance(&State::zeros(&other), &s).is_err());
    }

    #[test]
    fn distance_of_transverse_perturbation() {
        let (g, _, s) = setup();
        let eps = 1e-3;
        let bump = g.sample(|x| (-(x - 2.0) * (x - 2.0)).exp());
        let raw = State::new(bump.clone(), bump.scale(-0.5));
        assert!(symmetry_distance(&s.add(&raw.scale(eps / y_norm(&raw))), &s).unwrap().distance <= eps);

        // remove the components along the orbit's tangent directions
        let i_u = State::new(phase_rotate(&s.u, std::f64::consts::FRAC_PI_2), g.zeros());
        let i_v = State::new(g.zeros(), phase_rotate(&s.v, std::f64::consts::FRAC_PI_2));
        let dx = s.map(spectral_derivative);
        let mut w = raw;
        for t in [i_u, i_v, dx] {
            let c = h1_pairing(&w, &t) / h1_pairing(&t, &t);
            w = w.sub(&t.scale(c));
        }
        let w = w.scale(1.0 / y_norm(&w));
        let d = symmetry_distance(&s.add(&w.scale(eps)), &s).unwrap().distance;
        assert!(d <= eps * (1.0 + 1e-12) && d > 0.999 * eps, "{d}");
    }

    #[test]
    fn perturbation_is_smooth_and_sized() {
        let g = Grid::default_box();
        let p = smooth_perturbation(&g, 1e-2, 11);
        assert!((y_norm(&p) - 1e-2).abs() < 1e-15);
        let spec = p.u.spectrum();
        let n = g.len();
        for (j, z) in spec.iter().enumerate() {
            let m = if j <= n / 2 { j as i64 } else { j as i64 - n as i64 };
            if m.abs() > PERTURBATION_MODES {
                assert!(z.norm() < 1e-12 * n as f64);
            }
        }
        assert_eq!(y_norm(&smooth_perturbation(&g, 0.0, 11)), 0.0);
        assert_eq!(smooth_perturbation(&g, 1e-2, 11).u.values(), p.u.values());
    }

    #[test]
    fn stability_preconditions() {
        let p = ModelParams::symmetric_quartic();
        let cfg = MinimizerConfig {
            starts: vec![StartKind::SechAnsatz],
            ..Default::default()
        };
        let gs = minimize(&p, ConstraintPair::new(2.0, 2.0).unwrap(), &cfg).unwrap();
        let mut flipped = p.clone();
        flipped.couplings = vec![Coupling { tau: -1.0, q: 2.0 }];
        let sc = StabilityConfig::default();
        assert!(matches!(
            stability_experiment(&flipped, &gs, 1e-2, &sc),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(stability_experiment(&p, &gs, -1.0, &sc), Err(Error::InvalidArgument(_))));

        let short = StabilityConfig {
            // the split-step solitary wave deviates from the exact one by
            // O(dt²): ~1e-6 at dt = 1e-3, ~3e-7 at 5e-4
            evolution: EvolutionConfig { dt: 5e-4, horizon: 1.0, sample_stride: 200 },
            seed: 1,
        };
        let r = stability_experiment(&p, &gs, 0.0, &short).unwrap();
        assert!(r.max_distance < 1e-6, "{:?}", r.distances);
        assert_eq!(r.distances.len(), r.times.len());
    }
}
