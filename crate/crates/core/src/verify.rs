//! Consolidated self-check: closed-form residuals, the rearrangement suite,
//! the symmetric quartic ground state, and dynamics benchmarks.

use serde::{Deserialize, Serialize};

use crate::closed_form::{nguyen_pair, single_profile, single_profile_residual, symmetric_pair, TravelingWaveSpec};
use crate::dynamics::{evolve, smooth_perturbation, stability_experiment, symmetry_distance, EvolutionConfig, StabilityConfig};
use crate::error::Result;
use crate::field::{Grid, State, DEFAULT_HALF_LENGTH};
use crate::groundstate::{minimize, ConstraintPair, MinimizerConfig, StartKind};
use crate::model::{el_residual, ModelParams, MultiplierPair};
use crate::rearrange::{inequality_suite, InequalityReport};

/// Limits shared by `verify` and the rearrangement command.
pub const RESIDUAL_LIMIT: f64 = 1e-7;
pub const LP_LIMIT: f64 = 1e-13;
pub const INEQUALITY_SLACK: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Human-readable pass condition, e.g. `< 1e-7`.
    pub condition: String,
    pub passed: bool,
}

impl Check {
    pub fn below(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            condition: format!("< {limit:e}"),
            passed: value < limit,
        }
    }

    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            condition: format!("<= {limit:e}"),
            passed: value <= limit,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            condition: format!(">= {limit:e}"),
            passed: value >= limit,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub fast: bool,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn failures(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect()
    }

    /// One line per check.
    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let pad = width - c.name.chars().count();
            out.push_str(&format!(
                "{}  {}{}  {:>12.4e} {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                " ".repeat(pad),
                c.value,
                c.condition
            ));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyOptions {
    /// Skip the T = 50 stability run.
    pub fast: bool,
    /// Factor applied to the symmetric-pair amplitude before its residual
    /// checks; anything but 1 must make them fail.
    pub amplitude_factor: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            fast: false,
            amplitude_factor: 1.0,
        }
    }
}

/// Checks on a pair of rearrangement-suite reports at `n` and `2n`.
pub fn rearrangement_checks(coarse: &InequalityReport, fine: &InequalityReport) -> Vec<Check> {
    let both = |f: fn(&InequalityReport) -> f64| f(coarse).max(f(fine));
    vec![
        Check::below("rearrangement: L^s norms preserved", both(|r| r.lp_max_relative_error), LP_LIMIT),
        Check::at_most(
            "rearrangement: kinetic energy non-increase",
            both(|r| r.kinetic_max_violation),
            INEQUALITY_SLACK,
        ),
        Check::at_most(
            "rearrangement: kinetic slack shrinks under refinement",
            fine.kinetic_max_violation.max(0.0) - coarse.kinetic_max_violation.max(0.0),
            0.0,
        ),
        Check::at_most(
            "rearrangement: mixed term non-decrease",
            both(|r| r.mixed_max_violation),
            INEQUALITY_SLACK,
        ),
        Check::at_most(
            "rearrangement: mixed slack shrinks under refinement",
            fine.mixed_max_violation.max(0.0) - coarse.mixed_max_violation.max(0.0),
            0.0,
        ),
        Check::at_most(
            "rearrangement: energy decrease",
            both(|r| r.energy_max_violation),
            INEQUALITY_SLACK,
        ),
        Check::at_least(
            "rearrangement: two-bump gradient gap margin",
            coarse.garineq_min_margin.min(fine.garineq_min_margin),
            0.0,
        ),
    ]
}

fn scaled(s: State, c: f64) -> State {
    if c == 1.0 {
        s
    } else {
        s.scale(c)
    }
}

pub fn run_verify(opts: VerifyOptions) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    let grid = Grid::default_box();
    let quartic = ModelParams::symmetric_quartic();
    let unit = MultiplierPair { omega1: 1.0, omega2: 1.0 };

    // closed-form families under their generating multipliers
    let pair = scaled(symmetric_pair(1.0, 1.0, &grid)?, opts.amplitude_factor);
    checks.push(Check::below(
        "closed form: symmetric pair, omega = 1",
        el_residual(&quartic, &pair, unit),
        RESIDUAL_LIMIT,
    ));
    // sech(2x) is not resolved to 1e-7 by 1024 points on this box
    let fine = Grid::new(DEFAULT_HALF_LENGTH, 2048)?;
    let pair4 = scaled(symmetric_pair(1.0, 4.0, &fine)?, opts.amplitude_factor);
    checks.push(Check::below(
        "closed form: symmetric pair, omega = 4 (n = 2048)",
        el_residual(&quartic, &pair4, MultiplierPair { omega1: 4.0, omega2: 4.0 }),
        RESIDUAL_LIMIT,
    ));
    let nguyen = ModelParams::single(1.0, 1.0, 3.0, 4.0, 4.0, 2.0)?;
    checks.push(Check::below(
        "closed form: Nguyen pair, tau = 3",
        el_residual(&nguyen, &nguyen_pair(1.0, 1.0, 3.0, 1.0, &grid)?, unit),
        RESIDUAL_LIMIT,
    ));
    for alpha_exp in [2.0, 3.0] {
        let (h, lambda) = single_profile(alpha_exp, 1.0, 2.0, &grid)?;
        checks.push(Check::below(
            format!("closed form: single profile, exponent {alpha_exp}"),
            single_profile_residual(&h, alpha_exp, 1.0, lambda),
            RESIDUAL_LIMIT,
        ));
    }

    let coarse = inequality_suite(&quartic, &grid, 50, 2024)?;
    let fine_report = inequality_suite(&quartic, &fine, 50, 2024)?;
    checks.extend(rearrangement_checks(&coarse, &fine_report));

    let cfg = MinimizerConfig {
        starts: vec![StartKind::SechAnsatz],
        ..Default::default()
    };
    let g = minimize(&quartic, ConstraintPair::new(2.0, 2.0)?, &cfg)?;
    checks.push(Check::below("ground state: |theta + 4/3|", (g.theta + 4.0 / 3.0).abs(), 1e-6));
    checks.push(Check::below(
        "ground state: multiplier error",
        (g.multipliers.omega1 - 1.0).abs().max((g.multipliers.omega2 - 1.0).abs()),
        1e-5,
    ));
    checks.push(Check::below(
        "ground state: distance to (sech, sech)",
        symmetry_distance(&g.profile, &symmetric_pair(1.0, 1.0, &grid)?)?.distance,
        1e-5,
    ));

    let perturbed = g.profile.add(&smooth_perturbation(&grid, 1e-2, 0));
    let (_, traj) = evolve(
        &quartic,
        &perturbed,
        &EvolutionConfig {
            dt: 1e-3,
            horizon: 10.0,
            sample_stride: 100,
        },
    )?;
    checks.push(Check::below(
        "dynamics: mass drift",
        traj.drift_q_u.max(traj.drift_q_v),
        1e-12,
    ));
    checks.push(Check::below("dynamics: energy drift", traj.drift_h, 1e-6));

    let (end, _) = evolve(
        &quartic,
        &pair,
        &EvolutionConfig {
            dt: 1e-3,
            horizon: 2.0 * std::f64::consts::PI,
            sample_stride: 1000,
        },
    )?;
    checks.push(Check::below(
        "dynamics: standing wave returns after 2 pi",
        symmetry_distance(&end, &pair)?.distance,
        1e-6,
    ));

    let spec = TravelingWaveSpec::new(1.0, 1.0, 0.5, symmetric_pair(1.0, 1.0, &grid)?)?;
    let start = crate::closed_form::traveling_wave(&spec, 0.0);
    let (end, _) = evolve(
        &quartic,
        &start,
        &EvolutionConfig {
            dt: 1e-3,
            horizon: 4.0,
            sample_stride: 1000,
        },
    )?;
    let peak = grid.points()[end.u.argmax_modulus()];
    checks.push(Check::below(
        "dynamics: traveling wave displacement error / dx",
        (peak - 4.0).abs() / grid.dx(),
        1.0,
    ));

    if !opts.fast {
        let r = stability_experiment(&quartic, &g, 1e-2, &StabilityConfig::default())?;
        checks.push(Check::below("stability: max distance over T = 50", r.max_distance, 5e-2));
    }

    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        fast: opts.fast,
        checks,
        passed,
    })
}
