//! Event-based plan validation with epsilon separation.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use super::{PlannerConfig, TemporalPlan};
use crate::fixed::Fixed;
use crate::pddl::{AtomId, AtomSet, GroundAtom, GroundTask};

/// Where in an action's lifetime a condition is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckPhase {
    AtStart,
    OverAll,
    AtEnd,
    Goal,
}

impl fmt::Display for CheckPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckPhase::AtStart => "at-start",
            CheckPhase::OverAll => "over-all",
            CheckPhase::AtEnd => "at-end",
            CheckPhase::Goal => "goal",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// The condition is false when checked.
    Unsatisfied,
    /// The condition was changed by another action less than epsilon earlier.
    NotSeparated,
    /// The step names an action that is not in the task, or starts before 0.
    InvalidStep,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub time: Fixed,
    pub kind: ViolationKind,
    pub phase: CheckPhase,
    pub condition: Option<GroundAtom>,
    /// Zero-based step index.
    pub step: Option<usize>,
    pub action: Option<String>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {}: ", self.time.to_millis_string())?;
        if let (Some(step), Some(action)) = (self.step, &self.action) {
            write!(f, "a{} {action} ", step + 1)?;
        }
        match (self.kind, &self.condition) {
            (ViolationKind::InvalidStep, _) => f.write_str("is not a valid step"),
            (ViolationKind::Unsatisfied, Some(c)) => write!(f, "{} condition {c} is false", self.phase),
            (ViolationKind::NotSeparated, Some(c)) => {
                write!(f, "{} condition {c} is not separated by epsilon from the effect that set it", self.phase)
            }
            (_, None) => write!(f, "{} check failed", self.phase),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violation: Option<Violation>,
    pub achieved_goals: Vec<GroundAtom>,
    pub makespan: Fixed,
    pub cost: Fixed,
    pub metric: Fixed,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum EventKind {
    Til,
    End,
    Start,
}

struct Sim<'a> {
    task: &'a GroundTask,
    eps: Fixed,
    atoms: AtomSet,
    /// Last action effect on each atom: (time, step).
    touched: HashMap<AtomId, (Fixed, usize)>,
}

impl Sim<'_> {
    fn check(&self, t: Fixed, step: usize, phase: CheckPhase, conds: &[AtomId], label: &str) -> Result<(), Violation> {
        for &p in conds {
            let kind = if !self.atoms.contains(p) {
                Some(ViolationKind::Unsatisfied)
            } else if phase != CheckPhase::OverAll
                && self.touched.get(&p).is_some_and(|&(tc, s)| s != step && t - tc < self.eps)
            {
                Some(ViolationKind::NotSeparated)
            } else {
                None
            };
            if let Some(kind) = kind {
                return Err(Violation {
                    time: t,
                    kind,
                    phase,
                    condition: Some(self.task.atom(p).clone()),
                    step: Some(step),
                    action: Some(label.to_string()),
                });
            }
        }
        Ok(())
    }

    fn effects(&mut self, t: Fixed, step: usize, del: &[AtomId], add: &[AtomId]) {
        for &p in del {
            self.atoms.remove(p);
            self.touched.insert(p, (t, step));
        }
        for &p in add {
            self.atoms.insert(p);
            self.touched.insert(p, (t, step));
        }
    }
}

/// Simulates `plan` against `task`, reporting the first violated condition.
pub fn validate_plan(task: &GroundTask, plan: &TemporalPlan, cfg: &PlannerConfig) -> ValidationReport {
    let weights = cfg.weights_for(task);
    let summary = TemporalPlan::from_steps(plan.steps.clone(), task, weights);
    let mut report = ValidationReport {
        valid: false,
        violation: None,
        achieved_goals: Vec::new(),
        makespan: summary.makespan,
        cost: summary.cost,
        metric: summary.metric,
    };

    let mut resolved = Vec::with_capacity(plan.steps.len());
    for (i, s) in plan.steps.iter().enumerate() {
        match task.find_action(&s.action, &s.args) {
            Some(idx) if !s.start.is_negative() => resolved.push((s.start, idx)),
            _ => {
                report.violation = Some(Violation {
                    time: s.start,
                    kind: ViolationKind::InvalidStep,
                    phase: CheckPhase::AtStart,
                    condition: None,
                    step: Some(i),
                    action: Some(s.label()),
                });
                return report;
            }
        }
    }
    let makespan = resolved
        .iter()
        .map(|&(s, i)| s + task.actions[i].duration)
        .max()
        .unwrap_or(Fixed::ZERO);
    report.makespan = makespan;
    report.metric = weights.0.mul(makespan) + weights.1.mul(report.cost);

    let mut events: Vec<(Fixed, EventKind, usize)> = Vec::new();
    for (k, til) in task.tils.iter().enumerate() {
        if til.time <= makespan {
            events.push((til.time, EventKind::Til, k));
        }
    }
    for (i, &(s, idx)) in resolved.iter().enumerate() {
        events.push((s, EventKind::Start, i));
        events.push((s + task.actions[idx].duration, EventKind::End, i));
    }
    events.sort();

    let mut sim = Sim { task, eps: cfg.epsilon, atoms: task.init.clone(), touched: HashMap::new() };
    let labels: Vec<String> = plan.steps.iter().map(|s| s.label()).collect();
    let mut open: Vec<usize> = Vec::new();

    let result = (|| -> Result<(), Violation> {
        for &(t, kind, i) in &events {
            match kind {
                EventKind::Til => {
                    let til = task.tils[i];
                    if til.positive {
                        sim.atoms.insert(til.atom);
                    } else {
                        sim.atoms.remove(til.atom);
                    }
                }
                EventKind::Start => {
                    let a = &task.actions[resolved[i].1];
                    sim.check(t, i, CheckPhase::AtStart, &a.at_start, &labels[i])?;
                    sim.effects(t, i, &a.start_del, &a.start_add);
                    open.push(i);
                    open.sort_unstable();
                }
                EventKind::End => {
                    let a = &task.actions[resolved[i].1];
                    open.retain(|&j| j != i);
                    sim.check(t, i, CheckPhase::AtEnd, &a.at_end, &labels[i])?;
                    sim.effects(t, i, &a.end_del, &a.end_add);
                }
            }
            for &j in &open {
                let (s, idx) = resolved[j];
                let a = &task.actions[idx];
                if s <= t && t < s + a.duration {
                    sim.check(t, j, CheckPhase::OverAll, &a.over_all, &labels[j])?;
                }
            }
        }
        if let Some(&g) = task.goal.iter().find(|&&g| !sim.atoms.contains(g)) {
            return Err(Violation {
                time: makespan,
                kind: ViolationKind::Unsatisfied,
                phase: CheckPhase::Goal,
                condition: Some(task.atom(g).clone()),
                step: None,
                action: None,
            });
        }
        Ok(())
    })();

    report.achieved_goals = task
        .goal
        .iter()
        .filter(|&&g| sim.atoms.contains(g))
        .map(|&g| task.atom(g).clone())
        .collect();
    match result {
        Ok(()) => report.valid = true,
        Err(v) => report.violation = Some(v),
    }
    report
}
