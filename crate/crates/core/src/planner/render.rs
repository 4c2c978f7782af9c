//! Plan text and JSON renderings, and the plan-file reader.

use std::fmt::Write;

use serde_json::json;

use super::{PlanStep, PlannerConfig, TemporalPlan};
use crate::fixed::Fixed;
use crate::pddl::GroundTask;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rendering {
    /// Start times offset by the plan's time origin.
    #[default]
    Absolute,
    /// Start times as stored, counted from the plan's own zero.
    Relative,
}

/// One line per step: `a<i> : <start> : (<action> <args>)`.
pub fn render_text(plan: &TemporalPlan, rendering: Rendering) -> String {
    let origin = match rendering {
        Rendering::Absolute => plan.time_origin,
        Rendering::Relative => Fixed::ZERO,
    };
    let mut out = String::new();
    for (i, s) in plan.steps.iter().enumerate() {
        let _ = writeln!(out, "a{} : {} : {}", i + 1, (origin + s.start).to_millis_string(), s.label());
    }
    out
}

pub fn render_json(plan: &TemporalPlan) -> serde_json::Value {
    let steps: Vec<_> = plan
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            json!({
                "id": format!("a{}", i + 1),
                "start": s.start,
                "absolute_start": plan.time_origin + s.start,
                "action": s.action,
                "args": s.args,
                "duration": s.duration,
            })
        })
        .collect();
    json!({
        "time_origin": plan.time_origin,
        "makespan": plan.makespan,
        "cost": plan.cost,
        "metric": plan.metric,
        "steps": steps,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("plan line {line}: {message}")]
pub struct ParsePlanError {
    pub line: usize,
    pub message: String,
}

/// Reads a plan in the text rendering. Also accepts the common
/// `<start>: (<action> <args>) [<duration>]` form. Durations come from the
/// task when the action is known, else from the bracket.
pub fn parse_plan(text: &str, task: &GroundTask) -> Result<TemporalPlan, ParsePlanError> {
    let mut steps = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split(';').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: &str| ParsePlanError { line: n + 1, message: message.to_string() };
        let open = line.find('(').ok_or_else(|| err("missing `(`"))?;
        let close = line.rfind(')').filter(|&c| c > open).ok_or_else(|| err("missing `)`"))?;
        let prefix = line[..open].trim().trim_end_matches(':');
        let time = prefix
            .rsplit(':')
            .map(str::trim)
            .find(|s| !s.is_empty())
            .ok_or_else(|| err("missing start time"))?;
        let start: Fixed = time.parse().map_err(|_| err(&format!("invalid start time `{time}`")))?;
        let mut words = line[open + 1..close].split_whitespace();
        let action = words.next().ok_or_else(|| err("empty action"))?.to_string();
        let args: Vec<String> = words.map(str::to_string).collect();
        let rest = line[close + 1..].trim();
        let bracket = if rest.is_empty() {
            None
        } else {
            let inner = rest
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| err("trailing text after action"))?;
            Some(inner.trim().parse::<Fixed>().map_err(|_| err("invalid duration"))?)
        };
        let duration = match task.find_action(&action, &args) {
            Some(i) => task.actions[i].duration,
            None => bracket.unwrap_or(Fixed::ZERO),
        };
        steps.push(PlanStep { start, action, args, duration });
    }
    let cfg = PlannerConfig::default();
    Ok(TemporalPlan::from_steps(steps, task, cfg.weights_for(task)))
}
