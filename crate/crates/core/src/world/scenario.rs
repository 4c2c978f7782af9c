//! Scenario documents (JSON, `"schema": 1`).

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::config::RunConfigPatch;
use crate::fixed::Fixed;
use crate::perception::{Emotion, StressLabel};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("scenario schema: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("unsupported scenario schema version {0}")]
    Version(u32),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("{context} refers to unknown {what} `{id}`")]
    Dangling { context: String, what: &'static str, id: String },
    #[error("{0} are not sorted by time")]
    Unsorted(&'static str),
    #[error("negative time {0}")]
    NegativeTime(Fixed),
    #[error("path {from} -> {to} must have a positive time")]
    PathTime { from: String, to: String },
    #[error("trace entry at {time}: {message}")]
    Trace { time: Fixed, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoomSpec {
    pub id: String,
    #[serde(rename = "type")]
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSpec {
    pub from: String,
    pub to: String,
    pub time: Fixed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotSpec {
    pub id: String,
    pub room: String,
}

fn neutral() -> Emotion {
    Emotion::Neutral
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeniorSpec {
    pub id: String,
    pub room: String,
    #[serde(default = "neutral")]
    pub emotion: Emotion,
    #[serde(default)]
    pub stressed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSpec {
    pub id: String,
    #[serde(rename = "type")]
    pub ty: String,
    pub room: String,
    #[serde(default = "yes")]
    pub available: bool,
    /// `false` for objects the planner does not know about yet.
    #[serde(default = "yes")]
    pub integrated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldSpec {
    pub robot: RobotSpec,
    pub rooms: Vec<RoomSpec>,
    pub paths: Vec<PathSpec>,
    #[serde(default)]
    pub seniors: Vec<SeniorSpec>,
    #[serde(default)]
    pub objects: Vec<ObjectSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selector {
    /// Every object whose type is a subtype of one of these.
    Types(Vec<String>),
    Objects(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EventEffect {
    SetAvailability { selector: Selector, available: bool },
    Spawn {
        id: String,
        #[serde(rename = "type")]
        ty: String,
        room: String,
    },
    SetEmotion { senior: String, emotion: Emotion },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExogenousEvent {
    pub time: Fixed,
    pub effect: EventEffect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    Stress,
    Emotion,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceEntry {
    pub time: Fixed,
    pub senior: String,
    pub kind: TraceKind,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PerceptionMode {
    #[default]
    Trace,
    Stochastic,
}

fn perfect() -> String {
    "perfect".to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerceptionSpec {
    #[serde(default)]
    pub mode: PerceptionMode,
    #[serde(default)]
    pub trace: Vec<TraceEntry>,
    /// Stochastic mode: confusion-matrix asset for the wristband.
    #[serde(default)]
    pub stress_matrix: Option<String>,
    #[serde(default)]
    pub emotion_matrix: Option<String>,
    /// Stochastic mode: times at which every senior is sampled.
    #[serde(default)]
    pub sample_times: Vec<Fixed>,
    /// `"perfect"` or a confusion-matrix asset for object recognition.
    #[serde(default = "perfect")]
    pub recognizer: String,
}

impl Default for PerceptionSpec {
    fn default() -> Self {
        PerceptionSpec {
            mode: PerceptionMode::Trace,
            trace: Vec::new(),
            stress_matrix: None,
            emotion_matrix: None,
            sample_times: Vec::new(),
            recognizer: perfect(),
        }
    }
}

/// Reference results shipped with a scenario.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    #[serde(default)]
    pub outcome: Option<String>,
    /// Golden plan files, in the order the plans are produced.
    #[serde(default)]
    pub plans: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    pub name: String,
    #[serde(default)]
    pub description: Option<String>,
    /// Domain file, relative to the scenario file.
    pub domain: String,
    /// Domain variant with a time window for every comfort goal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub windows_domain: Option<String>,
    #[serde(default)]
    pub taxonomy: Option<String>,
    pub world: WorldSpec,
    #[serde(default)]
    pub events: Vec<ExogenousEvent>,
    #[serde(default)]
    pub perception: PerceptionSpec,
    #[serde(default)]
    pub config: RunConfigPatch,
    #[serde(default)]
    pub expected: Expected,
}

pub fn load_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let s: Scenario = serde_json::from_str(text)?;
    s.check()?;
    Ok(s)
}

impl Scenario {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Checks references and orderings.
    pub fn check(&self) -> Result<(), ScenarioError> {
        if self.schema != SCHEMA_VERSION {
            return Err(ScenarioError::Version(self.schema));
        }
        let w = &self.world;
        let fresh = |id: &str, ids: &mut HashSet<String>| -> Result<(), ScenarioError> {
            if !ids.insert(id.to_string()) {
                return Err(ScenarioError::DuplicateId(id.to_string()));
            }
            Ok(())
        };
        let mut all: HashSet<String> = HashSet::new();
        for r in &w.rooms {
            fresh(&r.id, &mut all)?;
        }
        let room = |id: &str, context: String| -> Result<(), ScenarioError> {
            if w.rooms.iter().any(|r| r.id == id) {
                Ok(())
            } else {
                Err(ScenarioError::Dangling { context, what: "room", id: id.to_string() })
            }
        };
        for p in &w.paths {
            room(&p.from, format!("path {} -> {}", p.from, p.to))?;
            room(&p.to, format!("path {} -> {}", p.from, p.to))?;
            if !p.time.is_positive() {
                return Err(ScenarioError::PathTime { from: p.from.clone(), to: p.to.clone() });
            }
        }
        fresh(&w.robot.id, &mut all)?;
        room(&w.robot.room, format!("robot {}", w.robot.id))?;
        for s in &w.seniors {
            fresh(&s.id, &mut all)?;
            room(&s.room, format!("senior {}", s.id))?;
        }
        let mut objects: HashSet<String> = HashSet::new();
        for o in &w.objects {
            fresh(&o.id, &mut all)?;
            room(&o.room, format!("object {}", o.id))?;
            objects.insert(o.id.clone());
        }
        let senior = |id: &str, context: String| -> Result<(), ScenarioError> {
            if w.seniors.iter().any(|s| s.id == id) {
                Ok(())
            } else {
                Err(ScenarioError::Dangling { context, what: "senior", id: id.to_string() })
            }
        };

        let mut last = Fixed::ZERO;
        for e in &self.events {
            if e.time.is_negative() {
                return Err(ScenarioError::NegativeTime(e.time));
            }
            if e.time < last {
                return Err(ScenarioError::Unsorted("events"));
            }
            last = e.time;
            let context = format!("event at {}", e.time);
            match &e.effect {
                EventEffect::SetAvailability { selector: Selector::Objects(list), .. } => {
                    for id in list {
                        if !objects.contains(id) {
                            return Err(ScenarioError::Dangling { context, what: "object", id: id.clone() });
                        }
                    }
                }
                EventEffect::SetAvailability { selector: Selector::Types(_), .. } => {}
                EventEffect::Spawn { id, room: r, .. } => {
                    fresh(id, &mut all)?;
                    room(r, context)?;
                    objects.insert(id.clone());
                }
                EventEffect::SetEmotion { senior: s, .. } => senior(s, context)?,
            }
        }

        let mut last = Fixed::ZERO;
        for t in &self.perception.trace {
            if t.time.is_negative() {
                return Err(ScenarioError::NegativeTime(t.time));
            }
            if t.time < last {
                return Err(ScenarioError::Unsorted("trace entries"));
            }
            last = t.time;
            senior(&t.senior, format!("trace entry at {}", t.time))?;
            let ok = match t.kind {
                TraceKind::Stress => t.label.parse::<StressLabel>().is_ok(),
                TraceKind::Emotion => t.label.parse::<Emotion>().is_ok(),
            };
            if !ok {
                return Err(ScenarioError::Trace { time: t.time, message: format!("unknown label `{}`", t.label) });
            }
        }
        let mut last = Fixed::ZERO;
        for &t in &self.perception.sample_times {
            if t < last {
                return Err(ScenarioError::Unsorted("sample times"));
            }
            last = t;
        }
        Ok(())
    }
}
