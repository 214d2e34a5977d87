//! Command-line front end.
//!
//! Precedence, lowest first: built-in defaults, the `--config` file,
//! `--set` overrides in order, then dedicated flags (and `SOLWAVE_JOBS`).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::config::{from_value, CommandKind};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::run::execute;

#[derive(Parser, Debug)]
#[command(name = "solwave", version, about = "Coupled NLS ground states, rearrangement checks and orbital stability")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Minimize the energy at fixed masses.
    #[command(allow_negative_numbers = true)]
    Groundstate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        min: MinimizerFlags,
        /// Mass of the first component.
        #[arg(long)]
        s: Option<f64>,
        /// Mass of the second component.
        #[arg(long)]
        t: Option<f64>,
    },
    /// Ground-state energy over a mass grid plus the subadditivity report.
    #[command(allow_negative_numbers = true)]
    ThetaScan {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        min: MinimizerFlags,
        #[arg(long, value_delimiter = ',')]
        s_values: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        t_values: Option<Vec<f64>>,
        /// Margins at or below this value fail.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Integrate the flow from a closed-form family or field files.
    #[command(allow_negative_numbers = true)]
    Evolve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        evo: EvolutionFlags,
        /// symmetric-pair, nguyen-pair, traveling-wave or file.
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        sigma: Option<f64>,
        /// Field CSV of the first component (family `file`).
        #[arg(long)]
        initial_u: Option<PathBuf>,
        /// Field CSV of the second component (family `file`).
        #[arg(long)]
        initial_v: Option<PathBuf>,
        /// Also write the initial and final states.
        #[arg(long)]
        snapshots: bool,
    },
    /// Perturb a ground state and track its distance to the symmetry orbit.
    #[command(allow_negative_numbers = true)]
    Stability {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        min: MinimizerFlags,
        #[command(flatten)]
        evo: EvolutionFlags,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
        /// Ground state field CSVs; computed from --s/--t when absent.
        #[arg(long, requires = "ground_state_v")]
        ground_state_u: Option<PathBuf>,
        #[arg(long, requires = "ground_state_u")]
        ground_state_v: Option<PathBuf>,
        /// Perturbation size in the energy norm.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
    },
    /// Rearrangement inequality suite at n and 2n.
    #[command(allow_negative_numbers = true)]
    RearrangeCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the self-check suite and print a pass/fail table.
    #[command(allow_negative_numbers = true)]
    Verify {
        #[command(flatten)]
        common: Common,
        /// Skip the long stability run.
        #[arg(long)]
        fast: bool,
        /// Deliberate fault: scale the symmetric-pair amplitude.
        #[arg(long, hide = true)]
        amplitude_factor: Option<f64>,
    },
}

#[derive(Args, Debug, Default)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory for CSV and JSON artifacts.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for scans and stability seeds.
    #[arg(long, env = "SOLWAVE_JOBS")]
    pub jobs: Option<usize>,
    /// Model parameters as a JSON object.
    #[arg(long)]
    pub params: Option<String>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub half_length: Option<f64>,
    /// Override any config key: `--set dotted.path=<json>`.
    #[arg(long = "set", value_name = "PATH=JSON")]
    pub set: Vec<String>,
}

#[derive(Args, Debug, Default)]
pub struct MinimizerFlags {
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub dtau: Option<f64>,
    /// Comma-separated starts: gaussian, sech-ansatz, random.
    #[arg(long, value_delimiter = ',')]
    pub starts: Option<Vec<String>>,
    /// Seed of the random start.
    #[arg(long)]
    pub min_seed: Option<u64>,
}

#[derive(Args, Debug, Default)]
pub struct EvolutionFlags {
    #[arg(long)]
    pub dt: Option<f64>,
    /// Final time.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Steps between recorded samples.
    #[arg(long)]
    pub stride: Option<usize>,
}

/// Accumulates `(path, value)` overrides on top of a JSON document.
struct Overrides(Value);

impl Overrides {
    fn set(&mut self, path: &str, value: Value) -> Result<()> {
        let mut node = &mut self.0;
        let keys: Vec<&str> = path.split('.').collect();
        for key in &keys[..keys.len() - 1] {
            let obj = node
                .as_object_mut()
                .ok_or_else(|| Error::config(path, "cannot descend into a non-object"))?;
            node = obj.entry(key.to_string()).or_insert_with(|| Value::Object(Map::new()));
        }
        let obj = node
            .as_object_mut()
            .ok_or_else(|| Error::config(path, "cannot descend into a non-object"))?;
        obj.insert(keys[keys.len() - 1].to_string(), value);
        Ok(())
    }

    fn opt<T: serde::Serialize>(&mut self, path: &str, v: &Option<T>) -> Result<()> {
        match v {
            Some(v) => self.set(path, json!(v)),
            None => Ok(()),
        }
    }
}

fn parse_json(flag: &str, text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::config(flag, e.to_string()))
}

fn apply_common(o: &mut Overrides, c: &Common) -> Result<()> {
    for item in &c.set {
        let (path, raw) = item
            .split_once('=')
            .ok_or_else(|| Error::config("--set", format!("expected PATH=JSON, got `{item}`")))?;
        // bare words are taken as strings
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        o.set(path, value)?;
    }
    if let Some(p) = &c.params {
        o.set("params", parse_json("params", p)?)?;
    }
    o.opt("grid.points", &c.points)?;
    o.opt("grid.half_length", &c.half_length)?;
    o.opt("jobs", &c.jobs)?;
    o.opt("output_dir", &c.out)
}

fn apply_minimizer(o: &mut Overrides, m: &MinimizerFlags) -> Result<()> {
    o.opt("minimizer.tol", &m.tol)?;
    o.opt("minimizer.max_iter", &m.max_iter)?;
    o.opt("minimizer.dtau", &m.dtau)?;
    o.opt("minimizer.starts", &m.starts)?;
    o.opt("minimizer.seed", &m.min_seed)
}

fn apply_evolution(o: &mut Overrides, e: &EvolutionFlags) -> Result<()> {
    o.opt("evolution.dt", &e.dt)?;
    o.opt("evolution.horizon", &e.horizon)?;
    o.opt("evolution.sample_stride", &e.stride)
}

fn base_document(kind: CommandKind, common: &Common) -> Result<Value> {
    let mut doc = match &common.config {
        Some(path) => parse_json("config", &std::fs::read_to_string(path)?)?,
        None => json!({}),
    };
    let obj = doc
        .as_object_mut()
        .ok_or_else(|| Error::config("config", "top level must be a JSON object"))?;
    obj.insert("command".into(), json!(kind));
    obj.entry("params").or_insert_with(|| json!(ModelParams::symmetric_quartic()));
    Ok(doc)
}

/// Resolve the full run configuration document for a parsed command line.
pub fn resolve(command: &Command) -> Result<Value> {
    let (kind, common) = match command {
        Command::Groundstate { common, .. } => (CommandKind::Groundstate, common),
        Command::ThetaScan { common, .. } => (CommandKind::ThetaScan, common),
        Command::Evolve { common, .. } => (CommandKind::Evolve, common),
        Command::Stability { common, .. } => (CommandKind::Stability, common),
        Command::RearrangeCheck { common, .. } => (CommandKind::RearrangeCheck, common),
        Command::Verify { common, .. } => (CommandKind::Verify, common),
    };
    let mut o = Overrides(base_document(kind, common)?);
    apply_common(&mut o, common)?;
    match command {
        Command::Groundstate { min, s, t, .. } => {
            apply_minimizer(&mut o, min)?;
            o.opt("constraints.s", s)?;
            o.opt("constraints.t", t)?;
        }
        Command::ThetaScan {
            min,
            s_values,
            t_values,
            tolerance,
            ..
        } => {
            apply_minimizer(&mut o, min)?;
            o.opt("scan.s_values", s_values)?;
            o.opt("scan.t_values", t_values)?;
            o.opt("scan.tolerance", tolerance)?;
        }
        Command::Evolve {
            evo,
            family,
            omega,
            sigma,
            initial_u,
            initial_v,
            snapshots,
            ..
        } => {
            apply_evolution(&mut o, evo)?;
            if initial_u.is_some() || initial_v.is_some() {
                o.set("initial", json!({"family": "file", "u": initial_u, "v": initial_v}))?;
            }
            if let Some(f) = family {
                // switching family drops the previous family's fields
                let mut init = Map::new();
                init.insert("family".into(), json!(f));
                o.set("initial", Value::Object(init))?;
                o.opt("initial.u", initial_u)?;
                o.opt("initial.v", initial_v)?;
                if f != "file" {
                    o.set("initial.omega", json!(omega.unwrap_or(1.0)))?;
                }
                if f == "traveling-wave" {
                    o.set("initial.sigma", json!(sigma.unwrap_or(0.0)))?;
                }
            } else {
                o.opt("initial.omega", omega)?;
                o.opt("initial.sigma", sigma)?;
            }
            if *snapshots {
                o.set("snapshots", json!(true))?;
            }
        }
        Command::Stability {
            min,
            evo,
            s,
            t,
            ground_state_u,
            ground_state_v,
            delta,
            seeds,
            ..
        } => {
            apply_minimizer(&mut o, min)?;
            apply_evolution(&mut o, evo)?;
            o.opt("constraints.s", s)?;
            o.opt("constraints.t", t)?;
            o.opt("stability.ground_state.u", ground_state_u)?;
            o.opt("stability.ground_state.v", ground_state_v)?;
            o.opt("stability.delta", delta)?;
            o.opt("stability.seeds", seeds)?;
        }
        Command::RearrangeCheck { samples, seed, .. } => {
            o.opt("rearrange.samples", samples)?;
            o.opt("rearrange.seed", seed)?;
        }
        Command::Verify {
            fast,
            amplitude_factor,
            ..
        } => {
            if *fast {
                o.set("verify.fast", json!(true))?;
            }
            o.opt("verify.amplitude_factor", amplitude_factor)?;
        }
    }
    Ok(o.0)
}

fn run_parsed(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<bool> {
    let cfg = from_value(resolve(&cli.command)?)?;
    let outcome = execute(&cfg)?;
    if let Some(table) = &outcome.table {
        write!(stdout, "{table}")?;
    }
    if outcome.files.is_empty() {
        writeln!(stdout, "{}", outcome.summary)?;
    } else {
        for f in &outcome.files {
            writeln!(stdout, "wrote {}", f.display())?;
        }
    }
    for name in &outcome.failures {
        writeln!(stderr, "FAILED: {name}")?;
    }
    Ok(outcome.failures.is_empty())
}

/// Run the CLI on explicit arguments; returns the process exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    match run_parsed(&cli, stdout, stderr) {
        Ok(true) => 0,
        Ok(false) => {
            let _ = writeln!(stderr, "error: one or more checks failed");
            1
        }
        // a closed stdout (`| head`) is not a failure of the run
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
