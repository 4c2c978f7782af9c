//! Run configuration shared by the executor and the command line.

use serde::{Deserialize, Serialize};

use crate::fixed::Fixed;
use crate::perception::Emotion;
use crate::planner::DEFAULT_EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("`{0}` must be positive")]
    NotPositive(&'static str),
    #[error("time windows must satisfy terrified < sad < bored (got {terrified}, {sad}, {bored})")]
    WindowOrder { terrified: Fixed, sad: Fixed, bored: Fixed },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    /// Monitor step in seconds.
    pub stepsize: Fixed,
    pub epsilon: Fixed,
    pub window_terrified: Fixed,
    pub window_sad: Fixed,
    pub window_bored: Fixed,
    /// Look for new objects at every monitor step instead of only on failure.
    pub proactive: bool,
    /// Use the domain variant with a time window for every comfort goal.
    pub windows: bool,
    pub output: OutputFormat,
    pub max_replans: u32,
    pub node_budget: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            stepsize: Fixed::ONE,
            epsilon: DEFAULT_EPSILON,
            window_terrified: Fixed::from_int(600),
            window_sad: Fixed::from_int(1800),
            window_bored: Fixed::from_int(3600),
            proactive: false,
            windows: false,
            output: OutputFormat::Text,
            max_replans: 16,
            node_budget: 1_000_000,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, v) in [
            ("stepsize", self.stepsize),
            ("epsilon", self.epsilon),
            ("window_terrified", self.window_terrified),
            ("window_sad", self.window_sad),
            ("window_bored", self.window_bored),
        ] {
            if !v.is_positive() {
                return Err(ConfigError::NotPositive(name));
            }
        }
        if self.node_budget == 0 {
            return Err(ConfigError::NotPositive("node_budget"));
        }
        if !(self.window_terrified < self.window_sad && self.window_sad < self.window_bored) {
            return Err(ConfigError::WindowOrder {
                terrified: self.window_terrified,
                sad: self.window_sad,
                bored: self.window_bored,
            });
        }
        Ok(())
    }

    /// Window length for a negative emotion.
    pub fn window(&self, emotion: Emotion) -> Option<Fixed> {
        match emotion {
            Emotion::Terrified => Some(self.window_terrified),
            Emotion::Sad => Some(self.window_sad),
            Emotion::Bored => Some(self.window_bored),
            _ => None,
        }
    }

    pub fn apply(&mut self, patch: &RunConfigPatch) {
        macro_rules! set {
            ($($f:ident),*) => {$(
                if let Some(v) = patch.$f {
                    self.$f = v;
                }
            )*};
        }
        set!(seed, stepsize, epsilon, window_terrified, window_sad, window_bored, proactive, windows, output, max_replans, node_budget);
    }

    pub fn patched(mut self, patch: &RunConfigPatch) -> Self {
        self.apply(patch);
        self
    }
}

/// Partial configuration, as read from a config file or a scenario.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigPatch {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stepsize: Option<Fixed>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Fixed>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_terrified: Option<Fixed>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_sad: Option<Fixed>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_bored: Option<Fixed>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proactive: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub windows: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputFormat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_replans: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_budget: Option<u64>,
}
