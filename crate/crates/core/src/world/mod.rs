//! Ground-truth simulation of the home: rooms, robot, seniors, objects and
//! scripted exogenous events.

mod scenario;

use std::collections::BTreeSet;

use serde::Serialize;

pub use scenario::*;

use crate::fixed::Fixed;
use crate::pddl::{GroundAtom, TypeHierarchy};
use crate::perception::Emotion;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WorldError {
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown type `{ty}` for object `{id}`")]
    UnknownType { id: String, ty: String },
    #[error("object `{0}` is already integrated")]
    AlreadyIntegrated(String),
    #[error("`{0}` would not be in exactly one place")]
    Conservation(String),
    #[error("id `{0}` already exists")]
    DuplicateId(String),
    #[error("cannot move time backwards from {from} to {to}")]
    Backwards { from: Fixed, to: Fixed },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "id", rename_all = "snake_case")]
pub enum Place {
    Room(String),
    Held(String),
    GivenTo(String),
    /// Transient while an effect set is being applied.
    Limbo,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Robot {
    pub id: String,
    pub room: String,
    pub free: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Senior {
    pub id: String,
    pub room: String,
    pub emotion: Emotion,
    pub stressed: bool,
    /// `soothed`, `cheerful`, `entertained`.
    pub comfort: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WorldObject {
    pub id: String,
    #[serde(rename = "type")]
    pub ty: String,
    pub place: Place,
    pub available: bool,
    pub filled: bool,
    pub integrated: bool,
    /// Type the planner knows the object by; differs from `ty` after a misrecognition.
    pub known_type: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AppliedEvent {
    pub time: Fixed,
    pub description: String,
}

/// Atoms visible through sensing at one instant.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ObservedState {
    pub time: Fixed,
    pub atoms: BTreeSet<GroundAtom>,
}

impl ObservedState {
    pub fn contains(&self, atom: &GroundAtom) -> bool {
        self.atoms.contains(atom)
    }
}

const COMFORT: [&str; 3] = ["soothed", "cheerful", "entertained"];

/// Predicates whose truth is owned by the simulated world and read through
/// sensing. Everything else (`path`, time windows) is planner-side knowledge.
pub const WORLD_PREDICATES: [&str; 13] = [
    "be", "available", "filled", "holding", "given", "suggested", "free", "terrified", "sad", "bored", "soothed",
    "cheerful", "entertained",
];

fn emotion_predicate(e: Emotion) -> Option<&'static str> {
    match e {
        Emotion::Terrified => Some("terrified"),
        Emotion::Sad => Some("sad"),
        Emotion::Bored => Some("bored"),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldModel {
    pub clock: Fixed,
    /// Full type knowledge of the simulator, including types the planner
    /// has not been told about.
    pub types: TypeHierarchy,
    pub rooms: Vec<RoomSpec>,
    pub paths: Vec<PathSpec>,
    pub robot: Robot,
    pub seniors: Vec<Senior>,
    pub objects: Vec<WorldObject>,
    pub suggested: BTreeSet<(String, String)>,
    events: Vec<ExogenousEvent>,
    next_event: usize,
}

impl WorldModel {
    pub fn from_spec(spec: &WorldSpec, events: &[ExogenousEvent], types: TypeHierarchy) -> Result<Self, WorldError> {
        let mut objects = Vec::new();
        for o in &spec.objects {
            if !types.contains(&o.ty) {
                return Err(WorldError::UnknownType { id: o.id.clone(), ty: o.ty.clone() });
            }
            objects.push(WorldObject {
                id: o.id.clone(),
                ty: o.ty.clone(),
                place: Place::Room(o.room.clone()),
                available: o.available,
                filled: false,
                integrated: o.integrated,
                known_type: o.integrated.then(|| o.ty.clone()),
            });
        }
        for e in events {
            if let EventEffect::Spawn { id, ty, .. } = &e.effect {
                if !types.contains(ty) {
                    return Err(WorldError::UnknownType { id: id.clone(), ty: ty.clone() });
                }
            }
        }
        Ok(WorldModel {
            clock: Fixed::ZERO,
            types,
            rooms: spec.rooms.clone(),
            paths: spec.paths.clone(),
            robot: Robot { id: spec.robot.id.clone(), room: spec.robot.room.clone(), free: true },
            seniors: spec
                .seniors
                .iter()
                .map(|s| Senior {
                    id: s.id.clone(),
                    room: s.room.clone(),
                    emotion: s.emotion,
                    stressed: s.stressed,
                    comfort: BTreeSet::new(),
                })
                .collect(),
            objects,
            suggested: BTreeSet::new(),
            events: events.to_vec(),
            next_event: 0,
        })
    }

    pub fn object(&self, id: &str) -> Option<&WorldObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    fn object_mut(&mut self, id: &str) -> Result<&mut WorldObject, WorldError> {
        self.objects
            .iter_mut()
            .find(|o| o.id == id)
            .ok_or_else(|| WorldError::UnknownObject(id.to_string()))
    }

    pub fn senior(&self, id: &str) -> Option<&Senior> {
        self.seniors.iter().find(|s| s.id == id)
    }

    fn senior_mut(&mut self, id: &str) -> Result<&mut Senior, WorldError> {
        self.seniors
            .iter_mut()
            .find(|s| s.id == id)
            .ok_or_else(|| WorldError::UnknownObject(id.to_string()))
    }

    /// Time of the next scripted event not yet applied.
    pub fn next_event_time(&self) -> Option<Fixed> {
        self.events.get(self.next_event).map(|e| e.time)
    }

    /// Moves the clock to `to`, applying scripted events with time <= `to`.
    pub fn advance(&mut self, to: Fixed) -> Result<Vec<AppliedEvent>, WorldError> {
        if to < self.clock {
            return Err(WorldError::Backwards { from: self.clock, to });
        }
        let mut applied = Vec::new();
        while let Some(e) = self.events.get(self.next_event).cloned() {
            if e.time > to {
                break;
            }
            self.next_event += 1;
            let description = self.apply_event(&e.effect)?;
            applied.push(AppliedEvent { time: e.time, description });
        }
        self.clock = to;
        Ok(applied)
    }

    fn apply_event(&mut self, effect: &EventEffect) -> Result<String, WorldError> {
        match effect {
            EventEffect::SetAvailability { selector, available } => {
                let targets: Vec<String> = match selector {
                    Selector::Objects(ids) => {
                        for id in ids {
                            self.object_mut(id)?;
                        }
                        ids.clone()
                    }
                    Selector::Types(tys) => self
                        .objects
                        .iter()
                        .filter(|o| tys.iter().any(|t| self.types.fits(&o.ty, t)))
                        .map(|o| o.id.clone())
                        .collect(),
                };
                let mut changed = Vec::new();
                for id in &targets {
                    let o = self.object_mut(id)?;
                    if matches!(o.place, Place::Room(_)) && o.available != *available {
                        o.available = *available;
                        changed.push(id.clone());
                    }
                }
                let what = match selector {
                    Selector::Objects(ids) => ids.join(", "),
                    Selector::Types(tys) => format!("all {}", tys.join(", ")),
                };
                let state = if *available { "available" } else { "unavailable" };
                Ok(format!("{what} set {state} (changed: {})", if changed.is_empty() { "none".into() } else { changed.join(", ") }))
            }
            EventEffect::Spawn { id, ty, room } => {
                if self.object(id).is_some() || self.senior(id).is_some() || self.robot.id == *id {
                    return Err(WorldError::DuplicateId(id.clone()));
                }
                self.objects.push(WorldObject {
                    id: id.clone(),
                    ty: ty.clone(),
                    place: Place::Room(room.clone()),
                    available: true,
                    filled: false,
                    integrated: false,
                    known_type: None,
                });
                Ok(format!("new object {id} of type {ty} appears in {room}"))
            }
            EventEffect::SetEmotion { senior, emotion } => {
                let s = self.senior_mut(senior)?;
                s.emotion = *emotion;
                Ok(format!("{senior} becomes {emotion}"))
            }
        }
    }

    fn object_atoms(&self, o: &WorldObject, out: &mut BTreeSet<GroundAtom>) {
        match &o.place {
            Place::Room(r) => {
                out.insert(GroundAtom::new("be", [o.id.as_str(), r]));
            }
            Place::Held(r) => {
                out.insert(GroundAtom::new("holding", [r.as_str(), &o.id]));
            }
            Place::GivenTo(s) => {
                out.insert(GroundAtom::new("given", [o.id.as_str(), s]));
            }
            Place::Limbo => {}
        }
        if o.available {
            out.insert(GroundAtom::new("available", [&o.id]));
        }
        if o.filled {
            out.insert(GroundAtom::new("filled", [&o.id]));
        }
    }

    fn atoms_where(&self, include: impl Fn(&WorldObject) -> bool) -> BTreeSet<GroundAtom> {
        let mut out = BTreeSet::new();
        out.insert(GroundAtom::new("be", [&self.robot.id, &self.robot.room]));
        if self.robot.free {
            out.insert(GroundAtom::new("free", [&self.robot.id]));
        }
        for s in &self.seniors {
            out.insert(GroundAtom::new("be", [&s.id, &s.room]));
            if let Some(p) = emotion_predicate(s.emotion) {
                out.insert(GroundAtom::new(p, [&s.id]));
            }
            for c in &s.comfort {
                out.insert(GroundAtom::new(c.as_str(), [&s.id]));
            }
        }
        for o in self.objects.iter().filter(|o| include(o)) {
            self.object_atoms(o, &mut out);
        }
        for (item, senior) in &self.suggested {
            if self.object(item).is_some_and(&include) {
                out.insert(GroundAtom::new("suggested", [item, senior]));
            }
        }
        out
    }

    /// Complete ground truth.
    pub fn atoms(&self) -> BTreeSet<GroundAtom> {
        self.atoms_where(|_| true)
    }

    /// Ground truth restricted to integrated objects.
    pub fn observe(&self) -> ObservedState {
        ObservedState { time: self.clock, atoms: self.atoms_where(|o| o.integrated) }
    }

    /// `(path a b)` in both directions for every edge.
    pub fn path_atoms(&self) -> Vec<GroundAtom> {
        let mut out = Vec::new();
        for p in &self.paths {
            out.push(GroundAtom::new("path", [&p.from, &p.to]));
            out.push(GroundAtom::new("path", [&p.to, &p.from]));
        }
        out
    }

    /// Applies an action's effect set: deletes first, then adds. Predicates
    /// the world does not track (`path`, time windows) are ignored.
    pub fn apply_effects(&mut self, del: &[GroundAtom], add: &[GroundAtom]) -> Result<(), WorldError> {
        for a in del {
            self.apply_atom(a, false)?;
        }
        for a in add {
            self.apply_atom(a, true)?;
        }
        if let Some(o) = self.objects.iter().find(|o| o.place == Place::Limbo) {
            return Err(WorldError::Conservation(o.id.clone()));
        }
        Ok(())
    }

    fn apply_atom(&mut self, atom: &GroundAtom, positive: bool) -> Result<(), WorldError> {
        let args: Vec<&str> = atom.args.iter().map(String::as_str).collect();
        match (atom.predicate.as_str(), args.as_slice()) {
            ("be", [x, room]) => {
                if *x == self.robot.id {
                    if positive {
                        self.robot.room = room.to_string();
                    }
                } else if self.senior(x).is_some() {
                    if positive {
                        self.senior_mut(x)?.room = room.to_string();
                    }
                } else {
                    let o = self.object_mut(x)?;
                    if positive {
                        o.place = Place::Room(room.to_string());
                    } else if o.place == Place::Room(room.to_string()) {
                        o.place = Place::Limbo;
                    }
                }
            }
            ("free", [r]) if *r == self.robot.id => self.robot.free = positive,
            ("available", [x]) => self.object_mut(x)?.available = positive,
            ("filled", [x]) => self.object_mut(x)?.filled = positive,
            ("holding", [r, x]) => {
                let o = self.object_mut(x)?;
                if positive {
                    o.place = Place::Held(r.to_string());
                } else if o.place == Place::Held(r.to_string()) {
                    o.place = Place::Limbo;
                }
            }
            ("given", [x, s]) => {
                let o = self.object_mut(x)?;
                if positive {
                    o.place = Place::GivenTo(s.to_string());
                } else if o.place == Place::GivenTo(s.to_string()) {
                    o.place = Place::Limbo;
                }
            }
            ("suggested", [x, s]) => {
                self.object_mut(x)?;
                let key = (x.to_string(), s.to_string());
                if positive {
                    self.suggested.insert(key);
                } else {
                    self.suggested.remove(&key);
                }
            }
            (p @ ("terrified" | "sad" | "bored"), [s]) => {
                let sr = self.senior_mut(s)?;
                if positive {
                    sr.emotion = p.parse().expect("emotion predicate");
                } else if emotion_predicate(sr.emotion) == Some(p) {
                    sr.emotion = Emotion::Neutral;
                }
            }
            (p, [s]) if COMFORT.contains(&p) => {
                let sr = self.senior_mut(s)?;
                if positive {
                    sr.comfort.insert(p.to_string());
                } else {
                    sr.comfort.remove(p);
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Makes a previously unknown object visible to the planner.
    pub fn integrate_object(&mut self, id: &str, known_type: &str) -> Result<(), WorldError> {
        let o = self.object_mut(id)?;
        if o.integrated {
            return Err(WorldError::AlreadyIntegrated(id.to_string()));
        }
        o.integrated = true;
        o.known_type = Some(known_type.to_string());
        Ok(())
    }
}
