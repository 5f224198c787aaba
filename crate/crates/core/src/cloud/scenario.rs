//! Device catalog configuration. The catalog always holds the same eight
//! virtual devices; a scenario document overrides their fields plus the
//! clock scale and seed.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::money::Money;

/// Catalog device names, in the order they are listed by the registry.
pub const DEVICE_NAMES: [&str; 8] = [
    "local",
    "sv1",
    "tn1",
    "ionq",
    "riggeti_aspen8",
    "riggeti_aspen9",
    "dwave_dw2000",
    "dwave_advantage",
];

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("device {0:?} listed more than once")]
    DuplicateDevice(String),
    #[error("unknown device {0:?}")]
    UnknownDevice(String),
    #[error("device {device}: {problem}")]
    InvalidProfile { device: String, problem: String },
    #[error("cannot parse scenario document: {0}")]
    Parse(#[from] serde_json::Error),
}

/// Which kind of payload a device executes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Paradigm {
    Annealing,
    Gate,
    GateSimulator,
}

impl Paradigm {
    /// Gate and gate-simulator devices both execute circuits.
    pub fn executes_circuits(self) -> bool {
        matches!(self, Paradigm::Gate | Paradigm::GateSimulator)
    }
}

/// Qubit (or annealer-variable) budget of a device.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Capacity {
    #[serde(with = "unbounded_tag")]
    Unbounded,
    Limit(u32),
}

mod unbounded_tag {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("unbounded")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let tag = String::deserialize(d)?;
        if tag == "unbounded" {
            Ok(())
        } else {
            Err(de::Error::custom("expected \"unbounded\""))
        }
    }
}

impl Capacity {
    pub fn admits(self, requirement: u32) -> bool {
        match self {
            Capacity::Unbounded => true,
            Capacity::Limit(cap) => requirement <= cap,
        }
    }
}

/// Queueing delay before a submitted task starts, in seconds of virtual
/// time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueueDelay {
    Fixed(f64),
    Uniform(f64, f64),
    /// The task never leaves the queue; only a poll timeout ends it.
    Unbounded,
}

/// One virtual device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceProfile {
    pub name: String,
    pub paradigm: Paradigm,
    pub qubit_capacity: Capacity,
    pub available: bool,
    pub queue_delay: QueueDelay,
    pub per_task_fee: Money,
    pub per_shot_fee: Money,
    pub readout_flip: f64,
}

impl DeviceProfile {
    fn validate(&self) -> Result<(), ScenarioError> {
        let complain = |problem: &str| {
            Err(ScenarioError::InvalidProfile {
                device: self.name.clone(),
                problem: problem.to_string(),
            })
        };
        if self.per_task_fee.is_negative() || self.per_shot_fee.is_negative() {
            return complain("fees must be non-negative");
        }
        if !(0.0..=0.5).contains(&self.readout_flip) || self.readout_flip.is_nan() {
            return complain("readout_flip must lie in [0, 0.5]");
        }
        match self.queue_delay {
            QueueDelay::Fixed(s) if !(s >= 0.0) => complain("fixed delay must be >= 0"),
            QueueDelay::Uniform(lo, hi) if !(0.0 <= lo && lo <= hi) => {
                complain("uniform delay needs 0 <= low <= high")
            }
            _ => Ok(()),
        }
    }
}

/// Fully resolved configuration the registry is built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub clock_scale: f64,
    pub seed: u64,
    pub devices: Vec<DeviceProfile>,
}

fn money(s: &str) -> Money {
    s.parse().expect("literal amounts are well-formed")
}

impl Scenario {
    /// The bundled default scenario. Figures that are not observable
    /// behaviors (simulator capacities, fees, the sv1 noise level) are
    /// plain configuration defaults and can be overridden per run.
    pub fn paper() -> Self {
        let profile = |name: &str,
                       paradigm: Paradigm,
                       capacity: Capacity,
                       available: bool,
                       queue_delay: QueueDelay,
                       per_task: &str,
                       per_shot: &str,
                       readout_flip: f64| DeviceProfile {
            name: name.to_string(),
            paradigm,
            qubit_capacity: capacity,
            available,
            queue_delay,
            per_task_fee: money(per_task),
            per_shot_fee: money(per_shot),
            readout_flip,
        };
        use Capacity::{Limit, Unbounded};
        use Paradigm::{Annealing, Gate, GateSimulator};
        Scenario {
            clock_scale: 0.0,
            seed: 0,
            devices: vec![
                profile("local", GateSimulator, Unbounded, true, QueueDelay::Fixed(0.0), "0", "0", 0.0),
                profile("sv1", GateSimulator, Limit(34), true, QueueDelay::Uniform(17.0, 37.0), "0.30", "0.001", 0.4),
                profile("tn1", GateSimulator, Limit(50), false, QueueDelay::Fixed(5.0), "0.30", "0.002", 0.0),
                profile("ionq", Gate, Limit(11), true, QueueDelay::Fixed(45.0), "0.30", "0.01", 0.0),
                profile("riggeti_aspen8", Gate, Limit(31), false, QueueDelay::Fixed(45.0), "0.30", "0.00035", 0.0),
                profile("riggeti_aspen9", Gate, Limit(32), true, QueueDelay::Unbounded, "0.30", "0.00035", 0.0),
                profile("dwave_dw2000", Annealing, Limit(2048), true, QueueDelay::Fixed(21.0), "0.30", "0.00019", 0.0),
                profile("dwave_advantage", Annealing, Limit(5436), true, QueueDelay::Fixed(25.0), "0.30", "0.00019", 0.0),
            ],
        }
    }

    pub fn device(&self, name: &str) -> Option<&DeviceProfile> {
        self.devices.iter().find(|d| d.name == name)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        for (i, d) in self.devices.iter().enumerate() {
            if self.devices[..i].iter().any(|other| other.name == d.name) {
                return Err(ScenarioError::DuplicateDevice(d.name.clone()));
            }
            d.validate()?;
        }
        Ok(())
    }
}

/// Partial override document: only listed fields change relative to the
/// bundled defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioOverrides {
    pub clock_scale: Option<f64>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub devices: Vec<DeviceOverride>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceOverride {
    pub name: String,
    pub paradigm: Option<Paradigm>,
    pub qubit_capacity: Option<Capacity>,
    pub available: Option<bool>,
    pub queue_delay: Option<QueueDelay>,
    pub per_task_fee: Option<Money>,
    pub per_shot_fee: Option<Money>,
    pub readout_flip: Option<f64>,
}

impl ScenarioOverrides {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Applies the overrides to the bundled defaults. Each device may be
    /// named at most once and must exist in the catalog.
    pub fn resolve(&self) -> Result<Scenario, ScenarioError> {
        let mut scenario = Scenario::paper();
        if let Some(scale) = self.clock_scale {
            scenario.clock_scale = scale;
        }
        if let Some(seed) = self.seed {
            scenario.seed = seed;
        }
        for (i, ov) in self.devices.iter().enumerate() {
            if self.devices[..i].iter().any(|other| other.name == ov.name) {
                return Err(ScenarioError::DuplicateDevice(ov.name.clone()));
            }
            let profile = scenario
                .devices
                .iter_mut()
                .find(|d| d.name == ov.name)
                .ok_or_else(|| ScenarioError::UnknownDevice(ov.name.clone()))?;
            if let Some(v) = ov.paradigm {
                profile.paradigm = v;
            }
            if let Some(v) = ov.qubit_capacity {
                profile.qubit_capacity = v;
            }
            if let Some(v) = ov.available {
                profile.available = v;
            }
            if let Some(v) = ov.queue_delay {
                profile.queue_delay = v;
            }
            if let Some(v) = ov.per_task_fee {
                profile.per_task_fee = v;
            }
            if let Some(v) = ov.per_shot_fee {
                profile.per_shot_fee = v;
            }
            if let Some(v) = ov.readout_flip {
                profile.readout_flip = v;
            }
        }
        scenario.validate()?;
        Ok(scenario)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_scenario_is_valid_and_complete() {
        let s = Scenario::paper();
        s.validate().unwrap();
        let names: Vec<&str> = s.devices.iter().map(|d| d.name.as_str()).collect();
        assert_eq!(names, DEVICE_NAMES);
        assert_eq!(s.device("ionq").unwrap().qubit_capacity, Capacity::Limit(11));
        assert!(!s.device("riggeti_aspen8").unwrap().available);
        assert!(!s.device("tn1").unwrap().available);
        assert_eq!(s.device("riggeti_aspen9").unwrap().queue_delay, QueueDelay::Unbounded);
        assert_eq!(s.device("dwave_dw2000").unwrap().queue_delay, QueueDelay::Fixed(21.0));
    }

    #[test]
    fn empty_overrides_keep_defaults() {
        let overrides = ScenarioOverrides::from_json("{}").unwrap();
        assert_eq!(overrides.resolve().unwrap(), Scenario::paper());
    }

    #[test]
    fn overrides_apply_field_by_field() {
        let overrides = ScenarioOverrides::from_json(
            r#"{
                "seed": 9,
                "devices": [
                    {"name": "sv1", "readout_flip": 0.0, "qubit_capacity": 20},
                    {"name": "tn1", "available": true}
                ]
            }"#,
        )
        .unwrap();
        let s = overrides.resolve().unwrap();
        assert_eq!(s.seed, 9);
        assert_eq!(s.device("sv1").unwrap().readout_flip, 0.0);
        assert_eq!(s.device("sv1").unwrap().qubit_capacity, Capacity::Limit(20));
        assert!(s.device("tn1").unwrap().available);
        // untouched fields keep their defaults
        assert_eq!(s.device("sv1").unwrap().queue_delay, QueueDelay::Uniform(17.0, 37.0));
    }

    #[test]
    fn unknown_and_duplicate_devices_are_rejected() {
        let unknown = ScenarioOverrides::from_json(r#"{"devices": [{"name": "nope"}]}"#).unwrap();
        assert!(matches!(unknown.resolve(), Err(ScenarioError::UnknownDevice(_))));
        let dup = ScenarioOverrides::from_json(
            r#"{"devices": [{"name": "sv1"}, {"name": "sv1"}]}"#,
        )
        .unwrap();
        assert!(matches!(dup.resolve(), Err(ScenarioError::DuplicateDevice(_))));
    }

    #[test]
    fn invalid_profile_fields_are_rejected() {
        let bad = ScenarioOverrides::from_json(
            r#"{"devices": [{"name": "sv1", "readout_flip": 0.9}]}"#,
        )
        .unwrap();
        assert!(matches!(bad.resolve(), Err(ScenarioError::InvalidProfile { .. })));
    }

    #[test]
    fn scenario_json_round_trip() {
        let s = Scenario::paper();
        let text = serde_json::to_string_pretty(&s).unwrap();
        let back: Scenario = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }
}
