//! Execution log entries.

use std::fmt::Write as _;

use serde::Serialize;

use crate::fixed::Fixed;
use crate::goals::{Goal, GoalStatus};
use crate::pddl::GroundAtom;
use crate::perception::{PerceptionEvent, RecognizedObject};
use crate::planner::{CheckPhase, TemporalPlan};

use super::timeline::FailureReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    GoalAchieved,
    GoalExpired,
    Unsolvable,
    /// No goal was ever generated.
    NoGoal,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::GoalAchieved => "goal-achieved",
            Outcome::GoalExpired => "goal-expired",
            Outcome::Unsolvable => "unsolvable",
            Outcome::NoGoal => "no-goal",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Repair {
    /// The new plan uses an object the failed plan did not.
    AlternativeObject { object: String, newly_recognized: bool },
    /// The new plan recommends something instead of handing over an object.
    Suggestion { item: String },
    /// Same objects, new schedule.
    Reschedule,
}

impl Repair {
    pub fn describe(&self) -> String {
        match self {
            Repair::AlternativeObject { object, newly_recognized: true } => {
                format!("repaired with the newly recognized object {object}")
            }
            Repair::AlternativeObject { object, newly_recognized: false } => {
                format!("repaired with the alternative object {object}")
            }
            Repair::Suggestion { item } => {
                format!("no alternative object can be handed over; repaired by recommending {item}")
            }
            Repair::Reschedule => "repaired by rescheduling with the same objects".to_string(),
        }
    }
}

/// Why the original plan existed, what broke it, how it was repaired.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Explanation {
    pub goal: String,
    pub failure: String,
    pub repair: String,
    pub repair_kind: Repair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanReason {
    NewGoal,
    Repair,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlanRecord {
    pub reason: PlanReason,
    pub plan: TemporalPlan,
    pub text_absolute: String,
    pub text_relative: String,
    pub problem: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explanation: Option<Explanation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LogEntry {
    Perception { time: Fixed, event: PerceptionEvent },
    GoalCreated { time: Fixed, goal: Goal },
    Exogenous { time: Fixed, description: String },
    Plan { time: Fixed, record: Box<PlanRecord> },
    ActionStart { time: Fixed, step: usize, action: String },
    ActionEnd { time: Fixed, step: usize, action: String },
    Checkpoint {
        time: Fixed,
        phase: CheckPhase,
        #[serde(skip_serializing_if = "Option::is_none")]
        step: Option<usize>,
        satisfied: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        violated: Option<GroundAtom>,
    },
    Failure { time: Fixed, report: FailureReport },
    Abort { time: Fixed, step: usize, action: String },
    Recognized { time: Fixed, objects: Vec<RecognizedObject> },
    Integrated { time: Fixed, object: RecognizedObject, new_type: bool },
    GoalStatus { time: Fixed, target: GroundAtom, status: GoalStatus },
    Unsolvable { time: Fixed, goal: String, failure: Option<String>, reason: String },
    Outcome { time: Fixed, outcome: Outcome },
}

impl LogEntry {
    pub fn time(&self) -> Fixed {
        match self {
            LogEntry::Perception { time, .. }
            | LogEntry::GoalCreated { time, .. }
            | LogEntry::Exogenous { time, .. }
            | LogEntry::Plan { time, .. }
            | LogEntry::ActionStart { time, .. }
            | LogEntry::ActionEnd { time, .. }
            | LogEntry::Checkpoint { time, .. }
            | LogEntry::Failure { time, .. }
            | LogEntry::Abort { time, .. }
            | LogEntry::Recognized { time, .. }
            | LogEntry::Integrated { time, .. }
            | LogEntry::GoalStatus { time, .. }
            | LogEntry::Unsolvable { time, .. }
            | LogEntry::Outcome { time, .. } => *time,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ExecutionLog {
    pub scenario: String,
    pub entries: Vec<LogEntry>,
}

impl ExecutionLog {
    pub fn push(&mut self, e: LogEntry) {
        debug_assert!(self.entries.last().is_none_or(|l| l.time() <= e.time()));
        self.entries.push(e);
    }

    pub fn outcome(&self) -> Option<Outcome> {
        self.entries.iter().rev().find_map(|e| match e {
            LogEntry::Outcome { outcome, .. } => Some(*outcome),
            _ => None,
        })
    }

    pub fn plans(&self) -> impl Iterator<Item = (Fixed, &PlanRecord)> {
        self.entries.iter().filter_map(|e| match e {
            LogEntry::Plan { time, record } => Some((*time, &**record)),
            _ => None,
        })
    }

    pub fn failures(&self) -> impl Iterator<Item = &FailureReport> {
        self.entries.iter().filter_map(|e| match e {
            LogEntry::Failure { report, .. } => Some(report),
            _ => None,
        })
    }

    /// One JSON object per line.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&serde_json::to_string(e).expect("log entry serializes"));
            out.push('\n');
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let _ = write!(out, "[{}] ", e.time().to_millis_string());
            let _ = match e {
                LogEntry::Perception { event, .. } => {
                    let reading = match event.reading {
                        crate::perception::Reading::Stress(s) => format!("stress {s}"),
                        crate::perception::Reading::Emotion(m) => format!("emotion {m}"),
                    };
                    writeln!(out, "perceived {} {}", event.senior, reading)
                }
                LogEntry::GoalCreated { goal, .. } => writeln!(
                    out,
                    "goal {} for {} ({}), deadline {}",
                    goal.target,
                    goal.senior,
                    goal.emotion,
                    goal.deadline.to_millis_string()
                ),
                LogEntry::Exogenous { description, .. } => writeln!(out, "event: {description}"),
                LogEntry::Plan { record, .. } => {
                    let what = match record.reason {
                        PlanReason::NewGoal => "plan",
                        PlanReason::Repair => "repair plan",
                    };
                    let _ = writeln!(out, "{what} ({} actions, metric {}):", record.plan.len(), record.plan.metric.to_millis_string());
                    out.push_str(&record.text_absolute);
                    if let Some(x) = &record.explanation {
                        let _ = writeln!(out, "  explanation:");
                        let _ = writeln!(out, "    goal: {}", x.goal);
                        let _ = writeln!(out, "    failure: {}", x.failure);
                        let _ = writeln!(out, "    repair: {}", x.repair);
                    }
                    Ok(())
                }
                LogEntry::ActionStart { step, action, .. } => writeln!(out, "start a{} {action}", step + 1),
                LogEntry::ActionEnd { step, action, .. } => writeln!(out, "end a{} {action}", step + 1),
                LogEntry::Checkpoint { phase, step, satisfied, violated, .. } => {
                    let who = step.map(|s| format!("a{} ", s + 1)).unwrap_or_default();
                    match (satisfied, violated) {
                        (false, Some(v)) => writeln!(out, "check {who}{phase}: {v} is false"),
                        _ => writeln!(out, "check {who}{phase}: ok"),
                    }
                }
                LogEntry::Failure { report, .. } => writeln!(out, "failure {}", report.describe()),
                LogEntry::Abort { step, action, .. } => writeln!(out, "abort a{} {action}", step + 1),
                LogEntry::Recognized { objects, .. } => {
                    if objects.is_empty() {
                        writeln!(out, "recognized no new objects")
                    } else {
                        let list: Vec<String> = objects.iter().map(|o| format!("{} ({}, {})", o.id, o.ty, o.room)).collect();
                        writeln!(out, "recognized {}", list.join(", "))
                    }
                }
                LogEntry::Integrated { object, new_type, .. } => {
                    let note = if *new_type { format!(" (type {} added to the domain)", object.ty) } else { String::new() };
                    writeln!(out, "integrated {} of type {} in {}{note}", object.id, object.ty, object.room)
                }
                LogEntry::GoalStatus { target, status, .. } => {
                    let s = match status {
                        GoalStatus::Active => "still active",
                        GoalStatus::Achieved => "achieved",
                        GoalStatus::Expired => "expired",
                    };
                    writeln!(out, "goal {target} {s}")
                }
                LogEntry::Unsolvable { reason, .. } => writeln!(out, "no plan: {reason}"),
                LogEntry::Outcome { outcome, .. } => writeln!(out, "outcome: {}", outcome.as_str()),
            };
        }
        out
    }
}
