//! Chronologically ordered plan conditions.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::fixed::Fixed;
use crate::pddl::{GroundAtom, GroundTask};
use crate::planner::{CheckPhase, TemporalPlan};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Checkpoint {
    /// Absolute time.
    pub time: Fixed,
    pub phase: CheckPhase,
    /// Index into the plan's steps; `None` for the goal checkpoint.
    pub step: Option<usize>,
    pub conditions: Vec<GroundAtom>,
}

impl Checkpoint {
    pub fn first_violation(&self, state: &BTreeSet<GroundAtom>) -> Option<&GroundAtom> {
        self.conditions.iter().find(|c| !state.contains(c))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Timeline {
    pub checkpoints: Vec<Checkpoint>,
}

fn phase_rank(p: CheckPhase) -> u8 {
    match p {
        CheckPhase::AtEnd => 0,
        CheckPhase::OverAll => 1,
        CheckPhase::AtStart => 2,
        CheckPhase::Goal => 3,
    }
}

impl Timeline {
    pub fn len(&self) -> usize {
        self.checkpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checkpoints.is_empty()
    }

    /// Checkpoints due exactly at `t`.
    pub fn due(&self, t: Fixed) -> impl Iterator<Item = &Checkpoint> {
        let from = self.checkpoints.partition_point(|c| c.time < t);
        self.checkpoints[from..].iter().take_while(move |c| c.time == t)
    }

    /// Distinct checkpoint times, ascending.
    pub fn times(&self) -> Vec<Fixed> {
        let mut out: Vec<Fixed> = self.checkpoints.iter().map(|c| c.time).collect();
        out.dedup();
        out
    }
}

/// Builds the monitoring timeline of `plan`. At-start and at-end conditions
/// are checked at the step's start and end; over-all conditions are sampled
/// at every multiple of `stepsize` and every other checkpoint time strictly
/// inside the step; goals are checked at the makespan. Steps are looked up
/// in `task` by name and arguments; unknown steps contribute nothing.
pub fn build_timeline(plan: &TemporalPlan, task: &GroundTask, stepsize: Fixed) -> Timeline {
    let origin = plan.time_origin;
    let atoms = |ids: &[u32]| -> Vec<GroundAtom> { ids.iter().map(|&i| task.atom(i).clone()).collect() };
    let mut cps = Vec::new();
    let mut overall = Vec::new();
    for (i, s) in plan.steps.iter().enumerate() {
        let Some(ai) = task.find_action(&s.action, &s.args) else { continue };
        let a = &task.actions[ai];
        let (start, end) = (origin + s.start, origin + s.end());
        if !a.at_start.is_empty() {
            cps.push(Checkpoint { time: start, phase: CheckPhase::AtStart, step: Some(i), conditions: atoms(&a.at_start) });
        }
        if !a.at_end.is_empty() {
            cps.push(Checkpoint { time: end, phase: CheckPhase::AtEnd, step: Some(i), conditions: atoms(&a.at_end) });
        }
        if !a.over_all.is_empty() {
            overall.push((i, start, end, atoms(&a.over_all)));
        }
    }
    let goal: Vec<GroundAtom> = task.goal.iter().map(|&g| task.atom(g).clone()).collect();
    if !goal.is_empty() {
        cps.push(Checkpoint { time: origin + plan.makespan, phase: CheckPhase::Goal, step: None, conditions: goal });
    }
    let mut instants: BTreeSet<Fixed> = cps.iter().map(|c| c.time).collect();
    for s in &plan.steps {
        instants.insert(origin + s.start);
        instants.insert(origin + s.end());
    }
    if stepsize.is_positive() {
        for (i, start, end, conds) in overall {
            let mut k = start.micros() / stepsize.micros() + 1;
            let mut times: BTreeSet<Fixed> = instants.range(start..end).copied().filter(|&t| t > start).collect();
            loop {
                let g = Fixed::from_micros(k * stepsize.micros());
                if g >= end {
                    break;
                }
                if g > start {
                    times.insert(g);
                }
                k += 1;
            }
            for t in times {
                cps.push(Checkpoint { time: t, phase: CheckPhase::OverAll, step: Some(i), conditions: conds.clone() });
            }
        }
    }
    cps.sort_by(|a, b| {
        (a.time, phase_rank(a.phase), a.step.unwrap_or(usize::MAX)).cmp(&(b.time, phase_rank(b.phase), b.step.unwrap_or(usize::MAX)))
    });
    Timeline { checkpoints: cps }
}

/// A condition found false during monitoring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailureReport {
    pub time: Fixed,
    pub condition: GroundAtom,
    pub phase: CheckPhase,
    /// 0-based step index, `None` for the goal checkpoint.
    pub step: Option<usize>,
    pub action: Option<String>,
}

impl FailureReport {
    pub fn describe(&self) -> String {
        match (&self.step, &self.action) {
            (Some(i), Some(a)) => format!(
                "at {}: condition {} required {} by a{} {} is false",
                self.time.to_millis_string(),
                self.condition,
                self.phase,
                i + 1,
                a
            ),
            _ => format!("at {}: goal {} is false", self.time.to_millis_string(), self.condition),
        }
    }
}

/// First checkpoint due at `t` with a condition missing from `observed`.
pub fn detect_failure(
    timeline: &Timeline,
    plan: &TemporalPlan,
    observed: &BTreeSet<GroundAtom>,
    t: Fixed,
) -> Option<FailureReport> {
    timeline.due(t).find_map(|c| {
        c.first_violation(observed).map(|cond| FailureReport {
            time: t,
            condition: cond.clone(),
            phase: c.phase,
            step: c.step,
            action: c.step.map(|i| plan.steps[i].label()),
        })
    })
}
