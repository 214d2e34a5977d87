//! Run configuration: JSON parsing, defaults and validation.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dynamics::{EvolutionConfig, StabilityConfig};
use crate::error::{Error, Result};
use crate::field::{Grid, DEFAULT_HALF_LENGTH, DEFAULT_POINTS};
use crate::groundstate::{ConstraintPair, MinimizerConfig, StartKind};
use crate::model::ModelParams;
use crate::verify::VerifyOptions;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Groundstate,
    ThetaScan,
    Evolve,
    Stability,
    RearrangeCheck,
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub half_length: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            half_length: DEFAULT_HALF_LENGTH,
            points: DEFAULT_POINTS,
        }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        Grid::new(self.half_length, self.points)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MinimizerOptions {
    pub dtau: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub starts: Vec<StartKind>,
    pub seed: u64,
}

impl Default for MinimizerOptions {
    fn default() -> Self {
        let d = MinimizerConfig::default();
        MinimizerOptions {
            dtau: d.dtau,
            tol: d.tol,
            max_iter: d.max_iter,
            starts: d.starts,
            seed: d.seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanOptions {
    pub s_values: Vec<f64>,
    pub t_values: Vec<f64>,
    pub tolerance: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            s_values: vec![1.0, 2.0, 3.0, 4.0],
            t_values: vec![1.0, 2.0, 3.0, 4.0],
            tolerance: crate::groundstate::SUBADDITIVITY_TOLERANCE,
        }
    }
}

/// Starting state of an `evolve` run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialSpec {
    /// `(φ_Ω, φ_Ω)` for equal self-interaction.
    SymmetricPair { omega: f64 },
    NguyenPair { omega: f64 },
    /// Symmetric pair launched with velocity `2σ`.
    TravelingWave { omega: f64, sigma: f64 },
    /// Components read from field CSV files.
    File { u: PathBuf, v: PathBuf },
}

impl Default for InitialSpec {
    fn default() -> Self {
        InitialSpec::SymmetricPair { omega: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StabilityOptions {
    pub delta: f64,
    pub seeds: Vec<u64>,
    /// Ground state read from field CSVs; computed from `constraints` when absent.
    pub ground_state: Option<StateFiles>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFiles {
    pub u: PathBuf,
    pub v: PathBuf,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        StabilityOptions {
            delta: 1e-2,
            seeds: vec![0],
            ground_state: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RearrangeOptions {
    pub samples: usize,
    pub seed: u64,
}

impl Default for RearrangeOptions {
    fn default() -> Self {
        RearrangeOptions {
            samples: 50,
            seed: 2024,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    pub params: ModelParams,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub minimizer: MinimizerOptions,
    #[serde(default = "default_constraints")]
    pub constraints: ConstraintPair,
    #[serde(default)]
    pub scan: ScanOptions,
    #[serde(default)]
    pub evolution: EvolutionConfig,
    #[serde(default)]
    pub initial: InitialSpec,
    #[serde(default)]
    pub stability: StabilityOptions,
    #[serde(default)]
    pub rearrange: RearrangeOptions,
    #[serde(default)]
    pub verify: VerifyOptions,
    /// Write the initial and final state of `evolve` runs as CSV.
    #[serde(default)]
    pub snapshots: bool,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_constraints() -> ConstraintPair {
    ConstraintPair { s: 2.0, t: 2.0 }
}

fn default_jobs() -> usize {
    1
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.grid
            .build()
            .map_err(|e| Error::config("grid", e.to_string()))?;
        let cfg = self.minimizer_config();
        cfg.validate().map_err(|e| prefix(e, "minimizer"))?;
        if self.minimizer.starts.contains(&StartKind::Provided) {
            return Err(Error::config("minimizer.starts", "`provided` is not available from a config file"));
        }
        for (name, m) in [("constraints.s", self.constraints.s), ("constraints.t", self.constraints.t)] {
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::config(name, format!("must be positive, got {m}")));
            }
        }
        if self.command == CommandKind::ThetaScan {
            for (name, values) in [("scan.s_values", &self.scan.s_values), ("scan.t_values", &self.scan.t_values)] {
                if values.is_empty() || values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                    return Err(Error::config(name, "must be a nonempty list of positive masses"));
                }
            }
        }
        self.evolution.validate().map_err(|e| prefix(e, "evolution"))?;
        if !(self.stability.delta >= 0.0 && self.stability.delta.is_finite()) {
            return Err(Error::config("stability.delta", "must be nonnegative"));
        }
        if self.stability.seeds.is_empty() {
            return Err(Error::config("stability.seeds", "at least one seed is required"));
        }
        if self.rearrange.samples == 0 {
            return Err(Error::config("rearrange.samples", "must be at least 1"));
        }
        if !(self.verify.amplitude_factor.is_finite()) {
            return Err(Error::config("verify.amplitude_factor", "must be finite"));
        }
        if self.jobs == 0 {
            return Err(Error::config("jobs", "must be at least 1"));
        }
        match &self.initial {
            InitialSpec::SymmetricPair { omega }
            | InitialSpec::NguyenPair { omega }
            | InitialSpec::TravelingWave { omega, .. }
                if !(*omega > 0.0 && omega.is_finite()) =>
            {
                Err(Error::config("initial.omega", format!("must be positive, got {omega}")))
            }
            _ => Ok(()),
        }
    }

    pub fn minimizer_config(&self) -> MinimizerConfig {
        MinimizerConfig {
            half_length: self.grid.half_length,
            points: self.grid.points,
            dtau: self.minimizer.dtau,
            tol: self.minimizer.tol,
            max_iter: self.minimizer.max_iter,
            starts: self.minimizer.starts.clone(),
            seed: self.minimizer.seed,
            initial: None,
        }
    }

    pub fn stability_config(&self, seed: u64) -> StabilityConfig {
        StabilityConfig {
            evolution: self.evolution,
            seed,
        }
    }

    /// Minimal configuration for a command with the symmetric quartic model.
    pub fn for_command(command: CommandKind) -> Self {
        let value = serde_json::json!({
            "command": command,
            "params": ModelParams::symmetric_quartic(),
        });
        from_value(value).expect("default configuration is valid")
    }
}

fn prefix(e: Error, section: &str) -> Error {
    match e {
        Error::Config { field, message } => Error::config(format!("{section}.{field}"), message),
        other => Error::config(section, other.to_string()),
    }
}

/// Parse and validate a JSON document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::config("<document>", e.to_string()))?;
    from_value(value)
}

/// Deserialize an already parsed document, naming the failing field.
pub fn from_value(value: Value) -> Result<RunConfig> {
    let config: RunConfig = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner().to_string();
        let field = match unknown_field(&inner) {
            Some(key) if path == "." => key,
            Some(key) if !path.ends_with(&key) => format!("{path}.{key}"),
            _ => path,
        };
        Error::config(field, inner)
    })?;
    config.validate()?;
    Ok(config)
}

fn unknown_field(message: &str) -> Option<String> {
    let rest = message.strip_prefix("unknown field `")?;
    Some(rest[..rest.find('`')?].to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "command": "groundstate",
        "params": {"alpha": 1, "beta": 1, "p": 4, "r": 4, "couplings": [{"tau": 1, "q": 2}]}
    }"#;

    fn field_of(e: Error) -> String {
        match e {
            Error::Config { field, .. } => field,
            other => panic!("expected a configuration error, got {other}"),
        }
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.grid.half_length, 20.0 * std::f64::consts::PI);
        assert_eq!(c.grid.points, 1024);
        assert_eq!(c.minimizer.dtau, 0.1);
        assert_eq!(c.minimizer.tol, 1e-9);
        assert_eq!(c.params, ModelParams::symmetric_quartic());
        assert_eq!(RunConfig::for_command(CommandKind::Groundstate), c);
    }

    #[test]
    fn exponent_out_of_range() {
        let text = MINIMAL.replace("\"p\": 4", "\"p\": 6");
        let e = parse_config(&text).unwrap_err();
        assert!(e.to_string().contains("p out of range (2,6)"), "{e}");
        assert_eq!(field_of(e), "p");
        let text = MINIMAL.replace("\"q\": 2", "\"q\": 3");
        assert_eq!(field_of(parse_config(&text).unwrap_err()), "couplings[0].q");
    }

    #[test]
    fn unknown_keys_are_named() {
        let text = MINIMAL.replacen('{', "{\"gamma\": 1,", 1);
        assert_eq!(field_of(parse_config(&text).unwrap_err()), "gamma");
        let text = MINIMAL.replace("\"alpha\": 1", "\"alpha\": 1, \"gamma\": 2");
        assert_eq!(field_of(parse_config(&text).unwrap_err()), "params.gamma");
        let text = MINIMAL.replacen('{', "{\"grid\": {\"points\": 100},", 1);
        assert_eq!(field_of(parse_config(&text).unwrap_err()), "grid");
    }

    #[test]
    fn malformed_documents() {
        assert!(matches!(parse_config("{"), Err(Error::Config { .. })));
        assert!(matches!(parse_config("[]"), Err(Error::Config { .. })));
        let text = MINIMAL.replacen('{', "{\"evolution\": {\"dt\": -1},", 1);
        assert_eq!(field_of(parse_config(&text).unwrap_err()), "evolution.dt");
    }

    #[test]
    fn round_trips_through_json() {
        let text = MINIMAL.replacen('{', "{\"initial\": {\"family\": \"traveling-wave\", \"omega\": 1, \"sigma\": 0.5},", 1);
        let c = parse_config(&text).unwrap();
        let again = parse_config(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(c, again);
    }
}
