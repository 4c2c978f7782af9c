use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Normalizes a class label: lowercase, spaces to `_`, hyphens dropped
/// (`Un-stressed` -> `unstressed`, `yo-yo` -> `yoyo`).
pub fn normalize_label(label: &str) -> String {
    label
        .trim()
        .to_lowercase()
        .replace('-', "")
        .split_whitespace()
        .collect::<Vec<_>>()
        .join("_")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emotion {
    Terrified,
    Angry,
    Disgusted,
    Happy,
    Neutral,
    Sad,
    Bored,
}

impl Emotion {
    pub const ALL: [Emotion; 7] = [
        Emotion::Terrified,
        Emotion::Angry,
        Emotion::Disgusted,
        Emotion::Happy,
        Emotion::Neutral,
        Emotion::Sad,
        Emotion::Bored,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Emotion::Terrified => "terrified",
            Emotion::Angry => "angry",
            Emotion::Disgusted => "disgusted",
            Emotion::Happy => "happy",
            Emotion::Neutral => "neutral",
            Emotion::Sad => "sad",
            Emotion::Bored => "bored",
        }
    }

    /// Emotions that have a planning predicate and a comfort goal.
    pub fn is_negative(self) -> bool {
        matches!(self, Emotion::Terrified | Emotion::Sad | Emotion::Bored)
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown label `{0}`")]
pub struct UnknownLabel(pub String);

impl FromStr for Emotion {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let n = normalize_label(s);
        Emotion::ALL
            .into_iter()
            .find(|e| e.as_str() == n)
            .ok_or(UnknownLabel(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StressLabel {
    Stressed,
    Unstressed,
}

impl StressLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            StressLabel::Stressed => "stressed",
            StressLabel::Unstressed => "unstressed",
        }
    }
}

impl fmt::Display for StressLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StressLabel {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match normalize_label(s).as_str() {
            "stressed" => Ok(StressLabel::Stressed),
            "unstressed" => Ok(StressLabel::Unstressed),
            _ => Err(UnknownLabel(s.to_string())),
        }
    }
}
