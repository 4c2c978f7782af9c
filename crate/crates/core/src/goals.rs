//! Comfort goals generated from recognized negative emotions.

use serde::Serialize;

use crate::config::RunConfig;
use crate::fixed::Fixed;
use crate::pddl::{DomainModel, GroundAtom, ProblemModel, TimedLiteral};
use crate::perception::Emotion;
use crate::world::ObservedState;

/// Atoms that mark a senior as comforted.
pub const COMFORT_PREDICATES: [&str; 3] = ["soothed", "cheerful", "entertained"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Goal {
    pub senior: String,
    pub emotion: Emotion,
    pub target: GroundAtom,
    pub created_at: Fixed,
    pub deadline: Fixed,
}

impl Goal {
    /// Human-readable reason for pursuing this goal.
    pub fn rationale(&self) -> String {
        format!(
            "{} was recognized as {} at {}; the goal {} must hold before {}",
            self.senior,
            self.emotion,
            self.created_at.to_millis_string(),
            self.target,
            self.deadline.to_millis_string()
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GoalStatus {
    Active,
    Achieved,
    Expired,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GoalError {
    #[error("{senior} already has goal {existing}, cannot add {requested}")]
    Conflict { senior: String, existing: GroundAtom, requested: GroundAtom },
    #[error("goal {target} expired at {deadline}")]
    Expired { target: GroundAtom, deadline: Fixed },
}

/// `terrified -> soothed`, `sad -> cheerful`, `bored -> entertained`.
pub fn comfort_predicate(emotion: Emotion) -> Option<&'static str> {
    match emotion {
        Emotion::Terrified => Some("soothed"),
        Emotion::Sad => Some("cheerful"),
        Emotion::Bored => Some("entertained"),
        _ => None,
    }
}

/// Predicate that encodes the time window of a goal in the domain.
pub fn window_predicate(emotion: Emotion) -> Option<&'static str> {
    match emotion {
        Emotion::Terrified => Some("hydration_time"),
        Emotion::Sad => Some("cheering_time"),
        Emotion::Bored => Some("entertainment_time"),
        _ => None,
    }
}

pub fn goal_for_emotion(senior: &str, emotion: Emotion, now: Fixed, cfg: &RunConfig) -> Option<Goal> {
    let predicate = comfort_predicate(emotion)?;
    let window = cfg.window(emotion)?;
    Some(Goal {
        senior: senior.to_string(),
        emotion,
        target: GroundAtom::new(predicate, [senior]),
        created_at: now,
        deadline: now + window,
    })
}

pub fn goal_status(goal: &Goal, observed: &ObservedState, now: Fixed) -> GoalStatus {
    if observed.contains(&goal.target) {
        GoalStatus::Achieved
    } else if now >= goal.deadline {
        GoalStatus::Expired
    } else {
        GoalStatus::Active
    }
}

pub fn is_goal_active(goal: &Goal, observed: &ObservedState, now: Fixed) -> bool {
    goal_status(goal, observed, now) == GoalStatus::Active
}

/// Adds the goal atom and, when `domain` declares the window predicate, the
/// window: the atom holds initially and a timed literal removes it at the
/// deadline. Times are relative to `origin`.
pub fn emit_goal_constraints(
    goal: &Goal,
    domain: &DomainModel,
    prob: &ProblemModel,
    origin: Fixed,
) -> Result<ProblemModel, GoalError> {
    if goal.deadline <= origin {
        return Err(GoalError::Expired { target: goal.target.clone(), deadline: goal.deadline });
    }
    let mut out = prob.clone();
    if let Some(existing) = prob.goal.iter().find(|a| {
        COMFORT_PREDICATES.contains(&a.predicate.as_str()) && a.args == goal.target.args && **a != goal.target
    }) {
        return Err(GoalError::Conflict {
            senior: goal.senior.clone(),
            existing: existing.clone(),
            requested: goal.target.clone(),
        });
    }
    if !out.goal.contains(&goal.target) {
        out.goal.push(goal.target.clone());
    }
    if let Some(p) = window_predicate(goal.emotion).filter(|p| domain.predicate(p).is_some()) {
        let atom = GroundAtom::new(p, [&goal.senior]);
        if !out.init.contains(&atom) {
            out.init.push(atom.clone());
        }
        let til = TimedLiteral { time: goal.deadline - origin, atom, positive: false };
        if !out.tils.contains(&til) {
            let at = out.tils.partition_point(|t| t.time <= til.time);
            out.tils.insert(at, til);
        }
    }
    Ok(out)
}
