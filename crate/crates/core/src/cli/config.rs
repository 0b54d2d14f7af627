//! Run configurations: one JSON document per command.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::oracle::GridSpec;
use crate::prob::{Alphabet, HypothesisPair, JointPmf};
use crate::regions::{DegradedBroadcast, RatePoint, SolverOptions};
use crate::sim::SchemeParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    RegionGw,
    RegionHb,
    RegionGeneral,
    RegionNoisy,
    GaussianGw,
    GaussianHb,
    Simulate,
    Verify,
    LessNoisy,
}

pub const COMMANDS: [&str; 9] = [
    "region-gw",
    "region-hb",
    "region-general",
    "region-noisy",
    "gaussian-gw",
    "gaussian-hb",
    "simulate",
    "verify",
    "less-noisy",
];

impl Command {
    pub fn name(self) -> &'static str {
        COMMANDS[self as usize]
    }
}

/// Parameters of the scalar Gaussian examples. `r` is the swept rate: `R0`
/// for gaussian-gw, `R` for gaussian-hb.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianSpec {
    pub sigma1_sq: f64,
    pub sigma2_sq: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigmaz_sq: Option<f64>,
    pub r: Vec<f64>,
    /// `alpha_tilde` grid size per rate (gaussian-hb).
    #[serde(default = "default_grid")]
    pub grid: usize,
}

fn default_grid() -> usize {
    101
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSpec {
    pub scheme: SchemeParams,
    pub trials_h0: usize,
    pub trials_h1: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration_trials: Option<usize>,
    /// Block lengths to sweep; empty means `scheme.block_len` only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub block_lens: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyCheck {
    /// Solver frontier against the lattice enumeration.
    Frontier,
    /// Exact Neyman-Pearson exponents against the divergence.
    Stein,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteinSpec {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub epsilon: f64,
    pub n: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    pub check: VerifyCheck,
    #[serde(default)]
    pub grid: GridSpec,
    /// Added to the Hausdorff tolerance per unit of lattice step.
    #[serde(default = "default_lipschitz")]
    pub lipschitz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stein: Option<SteinSpec>,
}

fn default_lipschitz() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<HypothesisPair>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rates: Vec<RatePoint>,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bc: Option<DegradedBroadcast>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gaussian: Option<GaussianSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySpec>,
}

fn schema(path: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.into(),
        message: message.into(),
    }
}

/// Raw pmf blocks are checked first so normalization problems are reported
/// as such, with their location.
fn check_pmf(value: &Value, path: &str) -> Result<()> {
    #[derive(Deserialize)]
    struct Raw {
        axes: Vec<Alphabet>,
        mass: Vec<f64>,
    }
    let Ok(raw) = serde_json::from_value::<Raw>(value.clone()) else {
        return Ok(()); // shape problems surface in the typed pass
    };
    JointPmf::new(raw.axes, raw.mass)
        .map(|_| ())
        .map_err(|e| match e {
            Error::NotNormalized { .. } | Error::InvalidMass { .. } => Error::Normalization {
                path: path.into(),
                source: Box::new(e),
            },
            other => schema(path, other.to_string()),
        })
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let value: Value = serde_json::from_str(text).map_err(|e| schema("", e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| schema("", "expected an object"))?;
    match obj.get("command").and_then(Value::as_str) {
        Some(c) if COMMANDS.contains(&c) => {}
        Some(c) => {
            return Err(schema(
                "command",
                format!(
                    "unknown command `{c}`; expected one of {}",
                    COMMANDS.join(", ")
                ),
            ))
        }
        None => {
            return Err(schema(
                "command",
                format!("missing; expected one of {}", COMMANDS.join(", ")),
            ))
        }
    }
    if let Some(inst) = obj.get("instance") {
        for h in ["h0", "h1"] {
            if let Some(v) = inst.get(h) {
                check_pmf(v, &format!("instance.{h}"))?;
            }
        }
    }
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(if path == "." { "" } else { &path }, e.inner().to_string())
    })?;
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    /// Checks that the sections a command needs are present and sensible.
    pub fn validate(&self) -> Result<()> {
        use Command::*;
        let need_instance = matches!(
            self.command,
            RegionGw | RegionHb | RegionGeneral | RegionNoisy | Simulate | LessNoisy
        ) || (self.command == Verify
            && self
                .verify
                .as_ref()
                .is_some_and(|v| v.check == VerifyCheck::Frontier));
        if need_instance && self.instance.is_none() {
            return Err(schema("instance", "required by this command"));
        }
        let need_rates = matches!(self.command, RegionGw | RegionHb | RegionGeneral)
            || need_instance && self.command == Verify;
        if need_rates && self.rates.is_empty() {
            return Err(schema("rates", "at least one rate point is required"));
        }
        for (i, r) in self.rates.iter().enumerate() {
            r.validate()
                .map_err(|e| schema(&format!("rates[{i}]"), e.to_string()))?;
        }
        self.solver
            .validate()
            .map_err(|e| schema("solver", e.to_string()))?;
        match self.command {
            RegionNoisy if self.bc.is_none() => {
                return Err(schema("bc", "required by region-noisy"))
            }
            GaussianGw | GaussianHb => {
                let g = self
                    .gaussian
                    .as_ref()
                    .ok_or_else(|| schema("gaussian", "required by this command"))?;
                if g.r.is_empty() {
                    return Err(schema("gaussian.r", "at least one rate is required"));
                }
                if self.command == GaussianHb && g.sigmaz_sq.is_none() {
                    return Err(schema("gaussian.sigmaz_sq", "required by gaussian-hb"));
                }
            }
            Simulate => {
                let s = self
                    .simulate
                    .as_ref()
                    .ok_or_else(|| schema("simulate", "required by simulate"))?;
                if s.trials_h0 == 0 {
                    return Err(schema("simulate.trials_h0", "must be positive"));
                }
                if s.trials_h1 == 0 {
                    return Err(schema("simulate.trials_h1", "must be positive"));
                }
                if s.calibration_trials == Some(0) {
                    return Err(schema("simulate.calibration_trials", "must be positive"));
                }
                if s.block_lens.contains(&0) {
                    return Err(schema(
                        "simulate.block_lens",
                        "block lengths must be positive",
                    ));
                }
            }
            Verify => {
                let v = self
                    .verify
                    .as_ref()
                    .ok_or_else(|| schema("verify", "required by verify"))?;
                if v.check == VerifyCheck::Stein && v.stein.is_none() {
                    return Err(schema("verify.stein", "required by the stein check"));
                }
            }
            _ => {}
        }
        Ok(())
    }
}
