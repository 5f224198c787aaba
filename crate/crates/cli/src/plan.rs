//! Experiment plan document: which endpoint/device/shots triples to run,
//! how often, and against which instance.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use qtsp_core::cloud::scenario::DEVICE_NAMES;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndpointKind {
    Adiabatic,
    Gate,
}

impl EndpointKind {
    pub fn path(self) -> &'static str {
        match self {
            EndpointKind::Adiabatic => "/tsp/adiabatic",
            EndpointKind::Gate => "/tsp/gate",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            EndpointKind::Adiabatic => "adiabatic",
            EndpointKind::Gate => "gate",
        }
    }
}

/// One experiment cell. A triple without `shots` submits once with the
/// service defaults, which is how error rows are captured.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanTriple {
    pub endpoint: EndpointKind,
    pub device: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    /// Path to the instance matrix file, relative to the plan file.
    pub instance: PathBuf,
    pub triples: Vec<PlanTriple>,
    #[serde(default = "default_repetitions")]
    pub repetitions: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_repetitions() -> u32 {
    3
}

impl ExperimentPlan {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let plan: ExperimentPlan = serde_json::from_str(text).context("cannot parse plan")?;
        plan.validate()?;
        Ok(plan)
    }

    /// Loads a plan and re-roots its instance path at the plan's directory.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read plan {}", path.display()))?;
        let mut plan = Self::from_json(&text)?;
        if plan.instance.is_relative() {
            if let Some(dir) = path.parent() {
                plan.instance = dir.join(&plan.instance);
            }
        }
        Ok(plan)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.repetitions < 1 {
            bail!("repetitions must be at least 1");
        }
        for t in &self.triples {
            if !DEVICE_NAMES.contains(&t.device.as_str()) {
                bail!("plan references unknown device {:?}", t.device);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_defaults() {
        let plan = ExperimentPlan::from_json(
            r#"{
                "instance": "m.txt",
                "triples": [
                    {"endpoint": "adiabatic", "device": "dwave_dw2000", "shots": 100},
                    {"endpoint": "gate", "device": "tn1"}
                ]
            }"#,
        )
        .unwrap();
        assert_eq!(plan.repetitions, 3);
        assert_eq!(plan.seed, 0);
        assert_eq!(plan.triples[1].shots, None);
    }

    #[test]
    fn rejects_unknown_devices_and_zero_repetitions() {
        assert!(ExperimentPlan::from_json(
            r#"{"instance": "m.txt", "triples": [{"endpoint": "gate", "device": "qpu9000"}]}"#
        )
        .is_err());
        assert!(ExperimentPlan::from_json(
            r#"{"instance": "m.txt", "repetitions": 0, "triples": []}"#
        )
        .is_err());
    }
}
