//! Symmetric decreasing rearrangement on the grid and a harness for the
//! rearrangement inequalities (Pólya–Szegő, Riesz-type mixed term, energy
//! decrease, and the two-bump gradient gap).

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{lp_norm, Field, Grid, State};
use crate::model::{energy_parts, ModelParams};

/// Tolerance for imaginary parts and negative values of nominally
/// nonnegative real input.
const REAL_TOLERANCE: f64 = 1e-12;
/// Samples at or below this magnitude count as outside the support.
const SUPPORT_THRESHOLD: f64 = 1e-14;

fn real_nonnegative(f: &Field, what: &str) -> Result<Vec<f64>> {
    f.values()
        .iter()
        .enumerate()
        .map(|(i, z)| {
            if z.im.abs() > REAL_TOLERANCE || z.re < -REAL_TOLERANCE || !z.re.is_finite() {
                Err(Error::invalid(format!(
                    "{what} must be real and nonnegative; sample {i} is {z}"
                )))
            } else {
                Ok(z.re.max(0.0))
            }
        })
        .collect()
}

/// Grid indices in placement order: center, then alternating right and left.
fn center_out_order(n: usize) -> impl Iterator<Item = usize> {
    let c = n / 2;
    std::iter::once(c).chain((1..=c).flat_map(move |j| {
        let right = (c + j < n).then_some(c + j);
        let left = Some(c - j);
        right.into_iter().chain(left)
    }))
}

/// Symmetric decreasing rearrangement of real nonnegative samples.
///
/// Samples are sorted in descending order and placed center-out: the largest
/// at `x = 0`, the next to its right, then its left, and so on. Equal values
/// keep the rightmost original sample first. The output is a permutation of
/// the input, so every `L^s` norm is preserved exactly.
pub fn rearrange(f: &Field) -> Result<Field> {
    let values = real_nonnegative(f, "rearrangement input")?;
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(j.cmp(&i)));
    let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
    for (slot, src) in center_out_order(values.len()).zip(order) {
        out[slot] = Complex64::new(values[src], 0.0);
    }
    Ok(Field::from_values(f.grid(), out))
}

/// Cyclic shift by a whole number of samples, `out[i] = f[i - m]`.
fn roll(f: &Field, m: i64) -> Field {
    let n = f.grid().len() as i64;
    let src = f.values();
    let values = (0..n)
        .map(|i| src[(i - m).rem_euclid(n) as usize])
        .collect();
    Field::from_values(f.grid(), values)
}

/// Distribution function `μ(t) = |{L > t}|` of the piecewise-linear
/// interpolant `L` of nonnegative periodic samples.
///
/// `μ` is piecewise linear in `t` between sample values, which gives the
/// continuum rearrangement of `L` and its kinetic energy in closed form. The
/// sample permutation of [`rearrange`] cannot serve here: repeated sample
/// values turn into staircases whose gradient energy does not converge
/// under refinement.
pub struct Distribution {
    dx: f64,
    /// Distinct sample values, descending.
    levels: Vec<f64>,
    /// `μ` just above each level.
    above: Vec<f64>,
    /// `μ` just below each level.
    below: Vec<f64>,
    /// `(full, S1, S2)` after each level; on the next open interval
    /// `μ(t) = dx (full + S1 − t S2)`.
    state: Vec<(f64, f64, f64)>,
}

impl Distribution {
    pub fn new(f: &Field) -> Result<Self> {
        let values = real_nonnegative(f, "rearrangement input")?;
        let n = values.len();
        let dx = f.grid().dx();
        // (level, kind, slope): kind 0 = segment top, 1 = segment bottom, 2 = flat segment
        let mut events: Vec<(f64, u8, f64)> = Vec::with_capacity(2 * n);
        for i in 0..n {
            let (a, b) = (values[i], values[(i + 1) % n]);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            if hi > lo {
                let w = 1.0 / (hi - lo);
                events.push((hi, 0, w));
                events.push((lo, 1, w));
            } else {
                events.push((lo, 2, 0.0));
            }
        }
        events.sort_by(|x, y| y.0.total_cmp(&x.0));
        let (mut full, mut s1, mut s2) = (0.0f64, 0.0f64, 0.0f64);
        let mut levels = Vec::new();
        let mut above = Vec::new();
        let mut below = Vec::new();
        let mut state = Vec::new();
        let mu = |full: f64, s1: f64, s2: f64, t: f64| dx * (full + s1 - t * s2);
        let mut i = 0;
        while i < events.len() {
            let t = events[i].0;
            let before = mu(full, s1, s2, t);
            while i < events.len() && events[i].0 == t {
                let (level, kind, w) = events[i];
                match kind {
                    0 => {
                        s1 += level * w;
                        s2 += w;
                    }
                    1 => {
                        // leaves the partial set at its bottom value
                        s1 -= (level + 1.0 / w) * w;
                        s2 -= w;
                        full += 1.0;
                    }
                    _ => full += 1.0,
                }
                i += 1;
            }
            if s2.abs() < 1e-300 {
                s2 = 0.0;
            }
            levels.push(t);
            above.push(before);
            below.push(mu(full, s1, s2, t));
            state.push((full, s1, s2));
        }
        Ok(Distribution {
            dx,
            levels,
            above,
            below,
            state,
        })
    }

    /// Level `t` with `μ(t) = m`, for `0 ≤ m ≤ 2L`.
    pub fn quantile(&self, m: f64) -> f64 {
        let k = self.below.partition_point(|&b| b < m);
        if k >= self.levels.len() {
            return *self.levels.last().unwrap_or(&0.0);
        }
        if m >= self.above[k] || k == 0 {
            return self.levels[k];
        }
        // m lies on the open interval between levels k-1 and k
        let (full, s1, s2) = self.state[k - 1];
        if s2 <= 0.0 {
            return self.levels[k];
        }
        let t = (full + s1 - m / self.dx) / s2;
        t.clamp(self.levels[k], self.levels[k - 1])
    }

    /// `∫ |(L*)′|² dx = 4 ∫ dt / |μ′(t)|`.
    pub fn rearranged_kinetic(&self) -> f64 {
        let mut total = 0.0;
        for k in 0..self.levels.len().saturating_sub(1) {
            let dt = self.levels[k] - self.levels[k + 1];
            let s2 = self.state[k].2;
            if s2 > 0.0 {
                total += dt / (self.dx * s2);
            }
        }
        4.0 * total
    }
}

/// Kinetic energy of the piecewise-linear interpolant, `Σ |f_{i+1} − f_i|² / dx`.
pub fn interpolant_kinetic(f: &Field) -> f64 {
    let v = f.values();
    let n = v.len();
    (0..n).map(|i| (v[(i + 1) % n] - v[i]).norm_sqr()).sum::<f64>() / f.grid().dx()
}

/// Samples of the continuum rearrangement of the piecewise-linear
/// interpolant, `L*(x_i) = μ⁻¹(2|x_i|)`.
pub fn rearrange_interpolant(f: &Field) -> Result<Field> {
    let dist = Distribution::new(f)?;
    let values = f
        .grid()
        .points()
        .iter()
        .map(|&x| Complex64::new(dist.quantile(2.0 * x.abs()), 0.0))
        .collect();
    Ok(Field::from_values(f.grid(), values))
}

/// `e(x) = u(x + a₁) + v(x + a₂)` for functions with disjoint shifted supports.
///
/// Shifts are rounded to whole grid cells so compact support survives
/// exactly; a spectral shift would smear it across the box.
pub fn disjoint_sum(u: &Field, v: &Field, a1: f64, a2: f64) -> Result<Field> {
    real_nonnegative(u, "u")?;
    real_nonnegative(v, "v")?;
    let dx = u.grid().dx();
    let us = roll(u, -(a1 / dx).round() as i64);
    let vs = roll(v, -(a2 / dx).round() as i64);
    let overlap = us
        .values()
        .iter()
        .zip(vs.values())
        .filter(|(a, b)| a.norm() > SUPPORT_THRESHOLD && b.norm() > SUPPORT_THRESHOLD)
        .count();
    if overlap > 0 {
        return Err(Error::SupportOverlap { overlap });
    }
    Ok(us.add(&vs))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GarineqReport {
    /// `‖(e*)′‖²`
    pub lhs: f64,
    /// `‖e′‖² − ¾ min(‖u′‖², ‖v′‖²)`
    pub rhs: f64,
    pub margin: f64,
}

/// Evaluate both sides of the two-bump gradient gap
/// `‖(e*)′‖² ≤ ‖e′‖² − ¾ min{‖u′‖², ‖v′‖²}`.
///
/// All gradient norms are those of the piecewise-linear interpolants, and
/// `e*` is the exact rearrangement of the interpolant of `e`.
pub fn garineq_check(u: &Field, v: &Field, a1: f64, a2: f64) -> Result<GarineqReport> {
    let e = disjoint_sum(u, v, a1, a2)?;
    let lhs = Distribution::new(&e)?.rearranged_kinetic();
    let rhs = interpolant_kinetic(&e) - 0.75 * interpolant_kinetic(u).min(interpolant_kinetic(v));
    Ok(GarineqReport {
        lhs,
        rhs,
        margin: rhs - lhs,
    })
}

/// `a · exp(−1/(1 − (x/w)²))` on `|x| < w`, zero elsewhere.
pub fn bump(grid: &Grid, amplitude: f64, half_width: f64) -> Field {
    grid.sample(|x| {
        let y = x / half_width;
        if y.abs() < 1.0 {
            amplitude * (-1.0 / (1.0 - y * y)).exp()
        } else {
            0.0
        }
    })
}

/// Seeded mixture of 2–4 Gaussians with nonnegative weights.
pub fn random_gaussian_mixture(grid: &Grid, rng: &mut ChaCha8Rng) -> Field {
    let count = rng.random_range(2..=4);
    let terms: Vec<(f64, f64, f64)> = (0..count)
        .map(|_| {
            (
                rng.random_range(0.2..1.0),
                rng.random_range(-15.0..15.0),
                rng.random_range(0.7..3.0),
            )
        })
        .collect();
    grid.sample(|x| {
        terms
            .iter()
            .map(|&(a, c, w)| a * (-((x - c) / w).powi(2)).exp())
            .sum()
    })
}

/// Worst-case margins of the rearrangement inequalities over a seeded suite.
/// Every "violation" is signed so that a positive value breaks the
/// continuum inequality.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    /// Largest relative change of `|f|_s`, `s ∈ {1, 2, 3, 4.5, 6}`.
    pub lp_max_relative_error: f64,
    /// `max (‖(f*)′‖² − ‖f′‖²)` on piecewise-linear interpolants.
    pub kinetic_max_violation: f64,
    /// `max (∫ f^q g^q − ∫ (f*)^q (g*)^q)`.
    pub mixed_max_violation: f64,
    /// `max (H(f*, g*) − H(f, g))`.
    pub energy_max_violation: f64,
    /// Smallest two-bump gradient-gap margin.
    pub garineq_min_margin: f64,
    pub garineq: Vec<GarineqReport>,
}

impl InequalityReport {
    /// Amount by which the kinetic and mixed-term inequalities are violated,
    /// zero when both hold.
    pub fn slack(&self) -> f64 {
        self.kinetic_max_violation.max(self.mixed_max_violation).max(0.0)
    }
}

fn mixed_integral(f: &Field, g: &Field, q: f64) -> f64 {
    let dx = f.grid().dx();
    dx * f
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| (a.norm() * b.norm()).powf(q))
        .sum::<f64>()
}

/// Ten disjoint-bump configurations `(amp_u, w_u, amp_v, w_v, a₁, a₂)`.
pub fn garineq_configurations() -> Vec<(f64, f64, f64, f64, f64, f64)> {
    vec![
        (1.0, 1.0, 1.0, 1.0, 5.0, -5.0),
        (1.0, 1.0, 0.3, 1.0, 6.0, -6.0),
        (1.0, 2.0, 1.0, 1.0, 4.0, -4.0),
        (0.5, 1.5, 1.0, 3.0, 8.0, -2.0),
        (1.0, 1.0, 1.0, 1.0, 2.5, -2.5),
        (2.0, 3.0, 0.1, 0.8, 0.0, 10.0),
        (1.0, 4.0, 1.0, 4.0, 10.0, -10.0),
        (0.7, 1.2, 0.9, 2.2, -3.0, 7.0),
        (1.0, 0.8, 1.0, 2.5, 12.0, 3.0),
        (0.2, 2.0, 1.5, 1.0, -15.0, 15.0),
    ]
}

/// Run the inequality suite on `samples` seeded random pairs plus the fixed
/// bump configurations.
pub fn inequality_suite(
    params: &ModelParams,
    grid: &Grid,
    samples: usize,
    seed: u64,
) -> Result<InequalityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lp_err: f64 = 0.0;
    let mut kinetic: f64 = f64::NEG_INFINITY;
    let mut mixed: f64 = f64::NEG_INFINITY;
    let mut energy_gap: f64 = f64::NEG_INFINITY;
    for _ in 0..samples {
        let f = random_gaussian_mixture(grid, &mut rng);
        let g = random_gaussian_mixture(grid, &mut rng);
        let fs = rearrange(&f)?;
        let gs = rearrange(&g)?;
        for s in [1.0, 2.0, 3.0, 4.5, 6.0] {
            let before = lp_norm(&f, s)?;
            lp_err = lp_err.max((lp_norm(&fs, s)? - before).abs() / before);
        }
        let kf = interpolant_kinetic(&f);
        let kg = interpolant_kinetic(&g);
        let kfs = Distribution::new(&f)?.rearranged_kinetic();
        let kgs = Distribution::new(&g)?.rearranged_kinetic();
        kinetic = kinetic.max(kfs - kf).max(kgs - kg);
        for c in &params.couplings {
            mixed = mixed.max(mixed_integral(&f, &g, c.q) - mixed_integral(&fs, &gs, c.q));
        }
        // Same kinetic discretization on both sides; potential terms by
        // quadrature of the permuted samples.
        let before = State::new(f, g);
        let after = State::new(fs, gs);
        let potential = |s: &State| {
            let parts = energy_parts(params, s);
            parts.power_u + parts.power_v + parts.mixed
        };
        let h = kf + kg - potential(&before);
        let h_star = kfs + kgs - potential(&after);
        energy_gap = energy_gap.max(h_star - h);
    }
    let mut garineq = Vec::new();
    for (au, wu, av, wv, a1, a2) in garineq_configurations() {
        let u = bump(grid, au, wu);
        let v = bump(grid, av, wv);
        garineq.push(garineq_check(&u, &v, a1, a2)?);
    }
    let garineq_min_margin = garineq.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    Ok(InequalityReport {
        n: grid.len(),
        samples,
        seed,
        lp_max_relative_error: lp_err,
        kinetic_max_violation: kinetic,
        mixed_max_violation: mixed,
        energy_max_violation: energy_gap,
        garineq_min_margin,
        garineq,
    })
}
