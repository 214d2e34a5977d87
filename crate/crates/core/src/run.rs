//! Command execution: turns a validated `RunConfig` into JSON summaries and
//! CSV artifacts.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::closed_form::{nguyen_pair, symmetric_pair, traveling_wave, TravelingWaveSpec};
use crate::config::{CommandKind, InitialSpec, RunConfig};
use crate::dynamics::{evolve, stability_experiment, StabilityReport, TrajectoryReport};
use crate::error::{Error, Result};
use crate::field::{Grid, State};
use crate::groundstate::{
    concentration_profile, default_zeta_values, minimize, structure_check, subadditivity_check, theta_scan,
    Classification, ConstraintPair, GroundState, MinimizerConfig, RunSummary, StructureReport, SubadditivityReport,
    ThetaSurface,
};
use crate::io::{read_state_csv, summary_json, write_state_csv, write_table_csv, write_text};
use crate::model::{mass, ModelParams};
use crate::rearrange::{inequality_suite, InequalityReport};
use crate::verify::{rearrangement_checks, run_verify, Check, VerifyReport};

/// Window count for the concentration function reported with ground states.
const CONCENTRATION_WINDOWS: usize = 64;

#[derive(Debug)]
pub struct Outcome {
    /// Pretty-printed JSON summary; also written to `summary.json` when an
    /// output directory is configured.
    pub summary: String,
    /// Human-readable table for commands that run checks.
    pub table: Option<String>,
    /// Names of failed checks; nonempty makes the CLI exit with status 1.
    pub failures: Vec<String>,
    pub files: Vec<PathBuf>,
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let mut files = Vec::new();
    let out = cfg.output_dir.as_deref();
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
    }
    let (summary, table, failures) = match cfg.command {
        CommandKind::Groundstate => (groundstate(cfg, out, &mut files)?, None, Vec::new()),
        CommandKind::ThetaScan => {
            let (s, f) = scan(cfg, out, &mut files)?;
            (s, None, f)
        }
        CommandKind::Evolve => (evolve_cmd(cfg, out, &mut files)?, None, Vec::new()),
        CommandKind::Stability => (stability(cfg, out, &mut files)?, None, Vec::new()),
        CommandKind::RearrangeCheck => {
            let (s, report) = rearrange_check(cfg)?;
            (s, Some(report.table()), failure_names(&report))
        }
        CommandKind::Verify => {
            let report = run_verify(cfg.verify)?;
            (summary_json(cfg, &report)?, Some(report.table()), failure_names(&report))
        }
    };
    if let Some(dir) = out {
        let path = dir.join("summary.json");
        write_text(&path, &summary)?;
        files.push(path);
    }
    Ok(Outcome {
        summary,
        table,
        failures,
        files,
    })
}

fn failure_names(r: &VerifyReport) -> Vec<String> {
    r.failures().into_iter().map(String::from).collect()
}

#[derive(Serialize)]
struct GroundStateSummary<'a> {
    theta: f64,
    omega1: f64,
    omega2: f64,
    residual: f64,
    iterations: usize,
    converged: bool,
    gamma: f64,
    total_mass: f64,
    classification: Classification,
    start: crate::groundstate::StartKind,
    runs: &'a [RunSummary],
    structure: StructureReport,
}

fn ground_state_summary<'a>(params: &ModelParams, g: &'a GroundState) -> GroundStateSummary<'a> {
    let conc = concentration_profile(&g.profile, &default_zeta_values(g.profile.grid(), CONCENTRATION_WINDOWS));
    GroundStateSummary {
        theta: g.theta,
        omega1: g.multipliers.omega1,
        omega2: g.multipliers.omega2,
        residual: g.residual,
        iterations: g.iterations,
        converged: g.converged,
        gamma: conc.gamma_estimate,
        total_mass: conc.total_mass,
        classification: conc.classification,
        start: g.start,
        runs: &g.runs,
        structure: structure_check(params, g),
    }
}

fn groundstate(cfg: &RunConfig, out: Option<&Path>, files: &mut Vec<PathBuf>) -> Result<String> {
    let g = minimize(&cfg.params, cfg.constraints, &cfg.minimizer_config())?;
    if let Some(dir) = out {
        let (u, v) = write_state_csv(dir, "profile", &g.profile)?;
        files.extend([u, v]);
    }
    summary_json(cfg, ground_state_summary(&cfg.params, &g))
}

#[derive(Serialize)]
struct ScanSummary<'a> {
    surface: &'a ThetaSurface,
    subadditivity: &'a SubadditivityReport,
}

fn scan(cfg: &RunConfig, out: Option<&Path>, files: &mut Vec<PathBuf>) -> Result<(String, Vec<String>)> {
    let surface = theta_scan(
        &cfg.params,
        &cfg.scan.s_values,
        &cfg.scan.t_values,
        &cfg.minimizer_config(),
        cfg.jobs,
    )?;
    let report = subadditivity_check(&surface, cfg.scan.tolerance);
    if let Some(dir) = out {
        let path = dir.join("surface.csv");
        let nan = |x: Option<f64>| x.unwrap_or(f64::NAN);
        write_table_csv(
            &path,
            &["s", "t", "theta", "omega1", "omega2", "residual"],
            surface
                .cells
                .iter()
                .map(|c| vec![c.s, c.t, nan(c.theta), nan(c.omega1), nan(c.omega2), nan(c.residual)]),
        )?;
        files.push(path);
        let path = dir.join("subadditivity.json");
        write_text(&path, &summary_json(cfg, &report)?)?;
        files.push(path);
    }
    let failures = report
        .failures
        .iter()
        .map(|q| format!("subadditivity at ({}, {}) + ({}, {}): margin {:e}", q.s1, q.t1, q.s2, q.t2, q.margin))
        .collect();
    let summary = summary_json(
        cfg,
        ScanSummary {
            surface: &surface,
            subadditivity: &report,
        },
    )?;
    Ok((summary, failures))
}

fn require_quartic(params: &ModelParams, family: &str) -> Result<()> {
    let quartic = params.p == 4.0 && params.r == 4.0 && params.couplings.len() == 1 && params.couplings[0].q == 2.0;
    if quartic {
        Ok(())
    } else {
        Err(Error::InvalidFamily(format!(
            "{family} needs p = r = 4 and a single coupling with q = 2"
        )))
    }
}

fn require_symmetric(params: &ModelParams, family: &str) -> Result<()> {
    require_quartic(params, family)?;
    if params.alpha == params.beta && params.couplings[0].tau == 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidFamily(format!("{family} needs alpha = beta and tau = 1")))
    }
}

/// Starting state of an `evolve` run.
pub fn initial_state(params: &ModelParams, spec: &InitialSpec, grid: &Grid) -> Result<State> {
    match spec {
        InitialSpec::SymmetricPair { omega } => {
            require_symmetric(params, "symmetric-pair")?;
            symmetric_pair(params.alpha, *omega, grid)
        }
        InitialSpec::NguyenPair { omega } => {
            require_quartic(params, "nguyen-pair")?;
            nguyen_pair(params.alpha, params.beta, params.couplings[0].tau, *omega, grid)
        }
        InitialSpec::TravelingWave { omega, sigma } => {
            require_symmetric(params, "traveling-wave")?;
            let spec = TravelingWaveSpec::new(*omega, *omega, *sigma, symmetric_pair(params.alpha, *omega, grid)?)?;
            Ok(traveling_wave(&spec, 0.0))
        }
        InitialSpec::File { u, v } => read_state_csv(u, v, Some(grid)),
    }
}

fn evolve_cmd(cfg: &RunConfig, out: Option<&Path>, files: &mut Vec<PathBuf>) -> Result<String> {
    let grid = cfg.grid.build()?;
    let s0 = initial_state(&cfg.params, &cfg.initial, &grid)?;
    let (end, report) = evolve(&cfg.params, &s0, &cfg.evolution)?;
    if let Some(dir) = out {
        files.push(write_trajectory_csv(dir, "trajectory.csv", &report)?);
        if cfg.snapshots {
            let (u, v) = write_state_csv(dir, "initial", &s0)?;
            files.extend([u, v]);
            let (u, v) = write_state_csv(dir, "final", &end)?;
            files.extend([u, v]);
        }
    }
    summary_json(cfg, &report)
}

fn write_trajectory_csv(dir: &Path, name: &str, r: &TrajectoryReport) -> Result<PathBuf> {
    let path = dir.join(name);
    write_table_csv(
        &path,
        &["t", "q_u", "q_v", "h"],
        (0..r.times.len()).map(|i| vec![r.times[i], r.q_u[i], r.q_v[i], r.h_values[i]]),
    )?;
    Ok(path)
}

#[derive(Serialize)]
struct SeedSummary {
    seed: u64,
    max_distance: f64,
    mean_distance: f64,
    final_quarter_mean: f64,
    drift_q_u: f64,
    drift_q_v: f64,
    drift_h: f64,
}

#[derive(Serialize)]
struct StabilitySummary<'a> {
    ground_state: GroundStateSummary<'a>,
    delta: f64,
    seeds: Vec<SeedSummary>,
}

/// The configured ground state: read from files and polished by a single
/// provided-start run, or computed at the configured constraints.
fn stability_ground_state(cfg: &RunConfig) -> Result<GroundState> {
    match &cfg.stability.ground_state {
        Some(files) => {
            let grid = cfg.grid.build()?;
            let s = read_state_csv(&files.u, &files.v, Some(&grid))?;
            let c = ConstraintPair::new(mass(&s.u), mass(&s.v))?;
            let mc = MinimizerConfig {
                tol: cfg.minimizer.tol,
                max_iter: cfg.minimizer.max_iter,
                dtau: cfg.minimizer.dtau,
                ..MinimizerConfig::from_state(s)
            };
            minimize(&cfg.params, c, &mc)
        }
        None => minimize(&cfg.params, cfg.constraints, &cfg.minimizer_config()),
    }
}

fn stability(cfg: &RunConfig, out: Option<&Path>, files: &mut Vec<PathBuf>) -> Result<String> {
    let g = stability_ground_state(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    let reports: Vec<StabilityReport> = pool.install(|| {
        cfg.stability
            .seeds
            .par_iter()
            .map(|&seed| stability_experiment(&cfg.params, &g, cfg.stability.delta, &cfg.stability_config(seed)))
            .collect::<Result<_>>()
    })?;
    if let Some(dir) = out {
        for r in &reports {
            let path = dir.join(format!("distance_seed{}.csv", r.seed));
            write_table_csv(
                &path,
                &["t", "d"],
                r.times.iter().zip(&r.distances).map(|(t, d)| vec![*t, *d]),
            )?;
            files.push(path);
        }
        let (u, v) = write_state_csv(dir, "ground_state", &g.profile)?;
        files.extend([u, v]);
    }
    let seeds = reports
        .iter()
        .map(|r| SeedSummary {
            seed: r.seed,
            max_distance: r.max_distance,
            mean_distance: r.mean_distance,
            final_quarter_mean: r.final_quarter_mean,
            drift_q_u: r.trajectory.drift_q_u,
            drift_q_v: r.trajectory.drift_q_v,
            drift_h: r.trajectory.drift_h,
        })
        .collect();
    summary_json(
        cfg,
        StabilitySummary {
            ground_state: ground_state_summary(&cfg.params, &g),
            delta: cfg.stability.delta,
            seeds,
        },
    )
}

#[derive(Serialize)]
struct RearrangeSummary {
    coarse: InequalityReport,
    fine: InequalityReport,
    checks: Vec<Check>,
    passed: bool,
}

/// Inequality suite at the configured resolution and at twice it.
fn rearrange_check(cfg: &RunConfig) -> Result<(String, VerifyReport)> {
    let grid = cfg.grid.build()?;
    let fine = Grid::new(grid.half_length(), 2 * grid.len())?;
    let o = cfg.rearrange;
    let coarse = inequality_suite(&cfg.params, &grid, o.samples, o.seed)?;
    let fine = inequality_suite(&cfg.params, &fine, o.samples, o.seed)?;
    let checks = rearrangement_checks(&coarse, &fine);
    let passed = checks.iter().all(|c| c.passed);
    let summary = summary_json(
        cfg,
        RearrangeSummary {
            coarse,
            fine,
            checks: checks.clone(),
            passed,
        },
    )?;
    Ok((
        summary,
        VerifyReport {
            fast: false,
            checks,
            passed,
        },
    ))
}
