//! Sensor simulation: stress and emotion events, object recognition.

mod confusion;
mod labels;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use confusion::*;
pub use labels::*;

use crate::fixed::Fixed;
use crate::pddl::TypeHierarchy;
use crate::world::{Place, TraceEntry, TraceKind, WorldModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "label", rename_all = "snake_case")]
pub enum Reading {
    Stress(StressLabel),
    Emotion(Emotion),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PerceptionEvent {
    pub time: Fixed,
    pub senior: String,
    #[serde(flatten)]
    pub reading: Reading,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PerceptionError {
    #[error("trace entry at {time}: {source}")]
    Trace { time: Fixed, source: UnknownLabel },
    #[error(transparent)]
    Confusion(#[from] ConfusionError),
}

/// Replays a recorded trace.
#[derive(Debug, Clone)]
pub struct TraceProvider {
    entries: Vec<TraceEntry>,
    cursor: usize,
}

impl TraceProvider {
    pub fn new(entries: Vec<TraceEntry>) -> Self {
        TraceProvider { entries, cursor: 0 }
    }

    pub fn next_time(&self) -> Option<Fixed> {
        self.entries.get(self.cursor).map(|e| e.time)
    }

    pub fn next_event(&mut self, now: Fixed) -> Result<Option<PerceptionEvent>, PerceptionError> {
        let Some(e) = self.entries.get(self.cursor) else {
            return Ok(None);
        };
        if e.time > now {
            return Ok(None);
        }
        self.cursor += 1;
        let err = |source| PerceptionError::Trace { time: e.time, source };
        let reading = match e.kind {
            TraceKind::Stress => Reading::Stress(e.label.parse().map_err(err)?),
            TraceKind::Emotion => Reading::Emotion(e.label.parse().map_err(err)?),
        };
        Ok(Some(PerceptionEvent { time: e.time, senior: e.senior.clone(), reading }))
    }
}

/// Samples every senior's true state through confusion matrices at fixed times.
#[derive(Debug, Clone)]
pub struct StochasticProvider {
    stress: ConfusionMatrix,
    emotion: ConfusionMatrix,
    times: Vec<Fixed>,
    cursor: usize,
    pending: std::collections::VecDeque<PerceptionEvent>,
    rng: ChaCha8Rng,
}

impl StochasticProvider {
    pub fn new(stress: ConfusionMatrix, emotion: ConfusionMatrix, times: Vec<Fixed>, seed: u64) -> Self {
        StochasticProvider {
            stress,
            emotion,
            times,
            cursor: 0,
            pending: Default::default(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn next_time(&self) -> Option<Fixed> {
        self.pending.front().map(|e| e.time).or_else(|| self.times.get(self.cursor).copied())
    }

    pub fn next_event(&mut self, now: Fixed, world: &WorldModel) -> Result<Option<PerceptionEvent>, PerceptionError> {
        if self.pending.is_empty() {
            match self.times.get(self.cursor) {
                Some(&t) if t <= now => {
                    self.cursor += 1;
                    self.sample_all(t, world)?;
                }
                _ => return Ok(None),
            }
        }
        Ok(self.pending.pop_front())
    }

    fn sample_all(&mut self, time: Fixed, world: &WorldModel) -> Result<(), PerceptionError> {
        for s in &world.seniors {
            let truth = if s.stressed { StressLabel::Stressed } else { StressLabel::Unstressed };
            let stress = self.stress.sample(truth.as_str(), &mut self.rng)?;
            let stress = stress.parse().map_err(|source| PerceptionError::Trace { time, source })?;
            let emotion = self.emotion.sample(s.emotion.as_str(), &mut self.rng)?;
            let emotion = emotion.parse().map_err(|source| PerceptionError::Trace { time, source })?;
            self.pending.push_back(PerceptionEvent { time, senior: s.id.clone(), reading: Reading::Stress(stress) });
            self.pending.push_back(PerceptionEvent { time, senior: s.id.clone(), reading: Reading::Emotion(emotion) });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub enum PerceptionProvider {
    Trace(TraceProvider),
    Stochastic(StochasticProvider),
}

impl PerceptionProvider {
    /// Time of the next event the provider may deliver, if known.
    pub fn next_time(&self) -> Option<Fixed> {
        match self {
            PerceptionProvider::Trace(p) => p.next_time(),
            PerceptionProvider::Stochastic(p) => p.next_time(),
        }
    }

    pub fn next_event(&mut self, now: Fixed, world: &WorldModel) -> Result<Option<PerceptionEvent>, PerceptionError> {
        match self {
            PerceptionProvider::Trace(p) => p.next_event(now),
            PerceptionProvider::Stochastic(p) => p.next_event(now, world),
        }
    }

    /// All events due at or before `now`.
    pub fn poll(&mut self, now: Fixed, world: &WorldModel) -> Result<Vec<PerceptionEvent>, PerceptionError> {
        let mut out = Vec::new();
        while let Some(e) = self.next_event(now, world)? {
            out.push(e);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecognizedObject {
    pub id: String,
    #[serde(rename = "type")]
    pub ty: String,
    pub room: String,
}

#[derive(Debug, Clone)]
pub enum Recognizer {
    Perfect,
    Matrix { matrix: ConfusionMatrix, rng: ChaCha8Rng },
}

impl Recognizer {
    pub fn matrix(matrix: ConfusionMatrix, seed: u64) -> Self {
        Recognizer::Matrix { matrix, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Predicted label for an object of true type `ty`; `None` when the
    /// classifier has no class for it.
    pub fn classify(&mut self, ty: &str) -> Option<String> {
        match self {
            Recognizer::Perfect => Some(ty.to_string()),
            Recognizer::Matrix { matrix, rng } => {
                matrix.index_of(ty)?;
                matrix.sample(ty, rng).ok().map(normalize_label)
            }
        }
    }
}

/// Objects present in a room that the planner does not know about and whose
/// type belongs to `known`. Misclassifications outside `known` are dropped.
pub fn recognize_new_objects(
    world: &WorldModel,
    known: &TypeHierarchy,
    recognizer: &mut Recognizer,
) -> Vec<RecognizedObject> {
    let mut out = Vec::new();
    for o in &world.objects {
        let Place::Room(room) = &o.place else { continue };
        if o.integrated || !known.contains(&o.ty) {
            continue;
        }
        let Some(ty) = recognizer.classify(&o.ty) else { continue };
        if known.contains(&ty) {
            out.push(RecognizedObject { id: o.id.clone(), ty, room: room.clone() });
        }
    }
    out
}
