use std::path::{Path, PathBuf};

use odesc::escape::RadiusSchedule;
use odesc::RadixSpec;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// The dynamical system an experiment runs on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SystemFields", into = "SystemFields")]
pub enum SystemConfig {
    Odometer { radix: RadixSpec },
    Tent,
    /// Substitution model at a fixed stage, coded into the adding machine.
    Solenoid { branching: RadixSpec, stage: usize },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum SystemKind {
    Odometer,
    Tent,
    Solenoid,
}

/// Flat wire form, so parse errors inside a system keep their field path.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFields {
    kind: SystemKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radix: Option<RadixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    branching: Option<RadixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stage: Option<usize>,
}

impl TryFrom<SystemFields> for SystemConfig {
    type Error = String;

    fn try_from(f: SystemFields) -> Result<Self, String> {
        let unused = |name: &str, present: bool| {
            if present {
                Err(format!("field '{name}' does not apply to this system kind"))
            } else {
                Ok(())
            }
        };
        match f.kind {
            SystemKind::Odometer => {
                unused("branching", f.branching.is_some())?;
                unused("stage", f.stage.is_some())?;
                let radix = f.radix.ok_or("odometer needs 'radix'")?;
                Ok(SystemConfig::Odometer { radix })
            }
            SystemKind::Tent => {
                unused("radix", f.radix.is_some())?;
                unused("branching", f.branching.is_some())?;
                unused("stage", f.stage.is_some())?;
                Ok(SystemConfig::Tent)
            }
            SystemKind::Solenoid => {
                unused("radix", f.radix.is_some())?;
                let branching = f.branching.ok_or("solenoid needs 'branching'")?;
                let stage = f.stage.ok_or("solenoid needs 'stage'")?;
                Ok(SystemConfig::Solenoid { branching, stage })
            }
        }
    }
}

impl From<SystemConfig> for SystemFields {
    fn from(c: SystemConfig) -> Self {
        let empty = |kind| SystemFields {
            kind,
            radix: None,
            branching: None,
            stage: None,
        };
        match c {
            SystemConfig::Odometer { radix } => SystemFields {
                radix: Some(radix),
                ..empty(SystemKind::Odometer)
            },
            SystemConfig::Tent => empty(SystemKind::Tent),
            SystemConfig::Solenoid { branching, stage } => SystemFields {
                branching: Some(branching),
                stage: Some(stage),
                ..empty(SystemKind::Solenoid)
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoleConfig {
    /// Point text (`digits:…`, `seed:…`) on the adding machine, a rational on `[0, 1]` otherwise.
    pub center: String,
    pub schedule: RadiusSchedule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    Simulate,
    Construct,
    Classify,
    Sample,
    Verify,
    SolenoidCheck,
}

impl Action {
    pub fn name(self) -> &'static str {
        match self {
            Action::Simulate => "simulate",
            Action::Construct => "construct",
            Action::Classify => "classify",
            Action::Sample => "sample",
            Action::Verify => "verify",
            Action::SolenoidCheck => "solenoid-check",
        }
    }
}

/// A JSON experiment description. Hole indices in `schedule` are 1-based.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub holes: Vec<HoleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<Action>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// The two specs compared by `classify`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<(RadixSpec, RadixSpec)>,
    /// Partition depth checked by `verify` when no schedule is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_offset: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_scale: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Parses a config document; errors name the offending path.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let mut de = serde_json::Deserializer::from_str(text);
        let config: ExperimentConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path == "." || path == "?" {
                CliError::Usage(format!("config: {inner}"))
            } else {
                CliError::Usage(format!("config at {path}: {inner}"))
            }
        })?;
        de.end()
            .map_err(|e| CliError::Usage(format!("config: {e}")))?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
