//! Sequential temporal planner, plan validator and plan text formats.

mod heuristic;
mod render;
mod search;
mod validate;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::fixed::Fixed;
use crate::pddl::{GroundAction, GroundTask, MetricVar};

pub use render::{parse_plan, render_json, render_text, ParsePlanError, Rendering};
pub use search::plan;
pub use validate::{validate_plan, CheckPhase, ValidationReport, Violation, ViolationKind};

/// Default separation between dependent time points, in seconds.
pub const DEFAULT_EPSILON: Fixed = Fixed::from_millis(2);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlannerConfig {
    pub epsilon: Fixed,
    /// Maximum number of node expansions before giving up.
    pub node_budget: usize,
    /// Overrides the task metric's `(total-time, total-cost)` weights.
    pub weights: Option<(Fixed, Fixed)>,
    pub makespan_bound: Option<Fixed>,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            epsilon: DEFAULT_EPSILON,
            node_budget: 1_000_000,
            weights: None,
            makespan_bound: None,
        }
    }
}

impl PlannerConfig {
    pub fn weights_for(&self, task: &GroundTask) -> (Fixed, Fixed) {
        self.weights.unwrap_or((
            task.metric.weight(MetricVar::TotalTime),
            task.metric.weight(MetricVar::TotalCost),
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanStep {
    /// Relative to the plan's time origin.
    pub start: Fixed,
    pub action: String,
    pub args: Vec<String>,
    pub duration: Fixed,
}

impl PlanStep {
    pub fn from_ground(start: Fixed, a: &GroundAction) -> Self {
        PlanStep {
            start,
            action: a.name.clone(),
            args: a.args.clone(),
            duration: a.duration,
        }
    }

    pub fn end(&self) -> Fixed {
        self.start + self.duration
    }

    /// `(name arg ...)`
    pub fn label(&self) -> String {
        let mut s = format!("({}", self.action);
        for a in &self.args {
            s.push(' ');
            s.push_str(a);
        }
        s.push(')');
        s
    }
}

impl fmt::Display for PlanStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} [{}]", self.start.to_millis_string(), self.label(), self.duration)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemporalPlan {
    pub steps: Vec<PlanStep>,
    pub makespan: Fixed,
    pub cost: Fixed,
    pub metric: Fixed,
    /// Absolute time corresponding to relative time 0.
    pub time_origin: Fixed,
}

impl TemporalPlan {
    pub fn empty() -> Self {
        TemporalPlan {
            steps: Vec::new(),
            makespan: Fixed::ZERO,
            cost: Fixed::ZERO,
            metric: Fixed::ZERO,
            time_origin: Fixed::ZERO,
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn with_origin(mut self, origin: Fixed) -> Self {
        self.time_origin = origin;
        self
    }

    /// Builds a plan from steps, filling in makespan, cost and metric from the task.
    pub fn from_steps(steps: Vec<PlanStep>, task: &GroundTask, weights: (Fixed, Fixed)) -> Self {
        let makespan = steps.iter().map(PlanStep::end).max().unwrap_or(Fixed::ZERO);
        let cost = steps
            .iter()
            .filter_map(|s| task.find_action(&s.action, &s.args))
            .map(|i| task.actions[i].cost)
            .sum();
        TemporalPlan {
            metric: weights.0.mul(makespan) + weights.1.mul(cost),
            steps,
            makespan,
            cost,
            time_origin: Fixed::ZERO,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlanError {
    #[error("no plan exists (search space exhausted after {expanded} expansions)")]
    Unsolvable { expanded: usize },
    #[error("node budget of {budget} expansions exhausted without finding a plan")]
    BudgetExhausted { budget: usize },
    #[error("invalid planner configuration: {0}")]
    Config(String),
}

impl PlanError {
    pub fn proved_unsolvable(&self) -> bool {
        matches!(self, PlanError::Unsolvable { .. })
    }
}

/// Metric value of a plan under the task's metric.
pub fn metric_value(plan: &TemporalPlan, task: &GroundTask) -> Fixed {
    let cfg = PlannerConfig::default();
    TemporalPlan::from_steps(plan.steps.clone(), task, cfg.weights_for(task)).metric
}
