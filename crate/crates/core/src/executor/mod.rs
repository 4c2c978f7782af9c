//! Deliberation loop: perceive, generate goals, plan, act, monitor, repair.

mod formulate;
mod log;
mod timeline;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

pub use formulate::{formulate, FormulateError};
pub use log::{ExecutionLog, Explanation, LogEntry, Outcome, PlanReason, PlanRecord, Repair};
pub use timeline::{build_timeline, detect_failure, Checkpoint, FailureReport, Timeline};

use crate::config::{ConfigError, RunConfig};
use crate::fixed::Fixed;
use crate::goals::{goal_for_emotion, goal_status, Goal, GoalStatus};
use crate::pddl::{self, ground, AtomId, DomainModel, GroundAtom, GroundError, GroundTask, PddlError, TypeHierarchy};
use crate::perception::{
    load_confusion, recognize_new_objects, ConfusionError, ConfusionMatrix, Emotion, PerceptionError,
    PerceptionProvider, Reading, RecognizedObject, Recognizer, StochasticProvider, StressLabel, TraceProvider,
};
use crate::planner::{self, render_text, CheckPhase, PlanError, PlannerConfig, Rendering, TemporalPlan};
use crate::taxonomy::{augment_types, integrate_types, load_taxonomy, AugmentedTypeSet, Taxonomy, TaxonomyError};
use crate::world::{
    load_scenario, PerceptionMode, Scenario, ScenarioError, WorldError, WorldModel, WORLD_PREDICATES,
};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Scenario { path: PathBuf, source: ScenarioError },
    #[error("{}: {source}", path.display())]
    Pddl { path: PathBuf, source: PddlError },
    #[error("{}: {source}", path.display())]
    Taxonomy { path: PathBuf, source: TaxonomyError },
    #[error("{}: {source}", path.display())]
    Confusion { path: PathBuf, source: ConfusionError },
    #[error("scenario `{0}` has no windows_domain")]
    NoWindowsDomain(String),
}

fn read(path: &Path) -> Result<String, LoadError> {
    std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.to_path_buf(), source })
}

fn read_matrix(path: &Path) -> Result<ConfusionMatrix, LoadError> {
    load_confusion(&read(path)?).map_err(|source| LoadError::Confusion { path: path.to_path_buf(), source })
}

/// A scenario together with the files it refers to.
#[derive(Debug, Clone)]
pub struct RunInputs {
    pub scenario: Scenario,
    pub domain: DomainModel,
    pub taxonomy: Taxonomy,
    pub stress_matrix: Option<ConfusionMatrix>,
    pub emotion_matrix: Option<ConfusionMatrix>,
    pub recognizer_matrix: Option<ConfusionMatrix>,
}

impl RunInputs {
    /// Loads a scenario file; referenced files are resolved relative to it.
    /// With `windows`, the scenario's windows domain replaces its domain.
    pub fn load(path: &Path, windows: bool) -> Result<Self, LoadError> {
        let scenario =
            load_scenario(&read(path)?).map_err(|source| LoadError::Scenario { path: path.to_path_buf(), source })?;
        let dir = path.parent().unwrap_or(Path::new("."));
        let domain_file = if windows {
            scenario.windows_domain.clone().ok_or_else(|| LoadError::NoWindowsDomain(scenario.name.clone()))?
        } else {
            scenario.domain.clone()
        };
        let domain_path = dir.join(domain_file);
        let domain = pddl::parse_domain(&read(&domain_path)?)
            .map_err(|source| LoadError::Pddl { path: domain_path.clone(), source })?;
        let taxonomy = match &scenario.taxonomy {
            Some(t) => {
                let p = dir.join(t);
                load_taxonomy(&read(&p)?).map_err(|source| LoadError::Taxonomy { path: p, source })?
            }
            None => Taxonomy::default(),
        };
        let matrix = |name: &Option<String>| name.as_ref().map(|n| read_matrix(&dir.join(n))).transpose();
        let stress_matrix = matrix(&scenario.perception.stress_matrix)?;
        let emotion_matrix = matrix(&scenario.perception.emotion_matrix)?;
        let recognizer_matrix = match scenario.perception.recognizer.as_str() {
            "perfect" => None,
            other => Some(read_matrix(&dir.join(other))?),
        };
        Ok(RunInputs { scenario, domain, taxonomy, stress_matrix, emotion_matrix, recognizer_matrix })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExecError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Perception(#[from] PerceptionError),
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error(transparent)]
    Formulate(#[from] FormulateError),
    #[error("planner: {0}")]
    Planner(PlanError),
    #[error("perceived type `{0}` has no place in the augmented hierarchy")]
    UnplacedType(String),
}

/// Runs a scenario to completion.
pub fn run(inputs: &RunInputs, cfg: &RunConfig) -> Result<ExecutionLog, ExecError> {
    run_detailed(inputs, cfg).map(|r| r.log)
}

/// Log plus the final ground-truth world.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub log: ExecutionLog,
    pub world: WorldModel,
}

pub fn run_detailed(inputs: &RunInputs, cfg: &RunConfig) -> Result<RunResult, ExecError> {
    cfg.validate()?;
    Executor::new(inputs, cfg)?.run()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Item {
    End(usize),
    OverAll(usize),
    Start(usize),
    Goal,
}

#[derive(Debug)]
struct Execution {
    plan: TemporalPlan,
    task: GroundTask,
    timeline: Timeline,
    /// `(time, item, checkpoint index)` in execution order.
    agenda: Vec<(Fixed, Item, Option<usize>)>,
    cursor: usize,
    started: Vec<bool>,
    ended: Vec<bool>,
    planner_facts: Vec<GroundAtom>,
}

impl Execution {
    fn new(plan: TemporalPlan, task: GroundTask, stepsize: Fixed) -> Self {
        let timeline = build_timeline(&plan, &task, stepsize);
        let mut agenda = Vec::new();
        let origin = plan.time_origin;
        let mut with_cp: BTreeMap<(usize, u8), usize> = BTreeMap::new();
        for (k, c) in timeline.checkpoints.iter().enumerate() {
            match (c.phase, c.step) {
                (CheckPhase::AtStart, Some(i)) => {
                    with_cp.insert((i, 0), k);
                }
                (CheckPhase::AtEnd, Some(i)) => {
                    with_cp.insert((i, 1), k);
                }
                (CheckPhase::OverAll, Some(i)) => agenda.push((c.time, Item::OverAll(i), Some(k))),
                _ => agenda.push((c.time, Item::Goal, Some(k))),
            }
        }
        for (i, s) in plan.steps.iter().enumerate() {
            agenda.push((origin + s.start, Item::Start(i), with_cp.get(&(i, 0)).copied()));
            agenda.push((origin + s.end(), Item::End(i), with_cp.get(&(i, 1)).copied()));
        }
        if !agenda.iter().any(|(_, it, _)| *it == Item::Goal) {
            agenda.push((origin + plan.makespan, Item::Goal, None));
        }
        agenda.sort();
        let planner_facts = task
            .problem
            .init
            .iter()
            .filter(|a| !WORLD_PREDICATES.contains(&a.predicate.as_str()))
            .cloned()
            .collect();
        let n = plan.len();
        Execution {
            plan,
            task,
            timeline,
            agenda,
            cursor: 0,
            started: vec![false; n],
            ended: vec![false; n],
            planner_facts,
        }
    }

    fn next_time(&self) -> Option<Fixed> {
        self.agenda.get(self.cursor).map(|(t, _, _)| *t)
    }

    fn atoms(&self, ids: &[AtomId]) -> Vec<GroundAtom> {
        ids.iter().map(|&i| self.task.atom(i).clone()).collect()
    }

    fn action(&self, step: usize) -> &pddl::GroundAction {
        let s = &self.plan.steps[step];
        let i = self.task.find_action(&s.action, &s.args).expect("plan steps come from the task");
        &self.task.actions[i]
    }
}

struct FailureContext {
    report: FailureReport,
    old_objects: BTreeSet<String>,
    recognized: Vec<String>,
}

struct Executor {
    cfg: RunConfig,
    name: String,
    world: WorldModel,
    domain: DomainModel,
    known: TypeHierarchy,
    recognizer: Recognizer,
    provider: PerceptionProvider,
    stress: BTreeMap<String, StressLabel>,
    goals: Vec<Goal>,
    exec: Option<Execution>,
    log: ExecutionLog,
    plans_made: u32,
    achieved: usize,
    expired: usize,
    unsolvable: usize,
}

impl Executor {
    fn new(inputs: &RunInputs, cfg: &RunConfig) -> Result<Self, ExecError> {
        let s = &inputs.scenario;
        let aug = augment_types(&inputs.domain.types, &inputs.taxonomy);
        let known = integrate_types(&inputs.domain, &aug)?.types;
        let world = WorldModel::from_spec(&s.world, &s.events, known.clone())?;
        let recognizer = match &inputs.recognizer_matrix {
            Some(m) => Recognizer::matrix(m.clone(), cfg.seed ^ 0x5eed_0b1e),
            None => Recognizer::Perfect,
        };
        let provider = match s.perception.mode {
            PerceptionMode::Trace => PerceptionProvider::Trace(TraceProvider::new(s.perception.trace.clone())),
            PerceptionMode::Stochastic => {
                let stress = inputs
                    .stress_matrix
                    .clone()
                    .unwrap_or_else(|| ConfusionMatrix::identity(["stressed", "unstressed"]));
                let emotion = inputs
                    .emotion_matrix
                    .clone()
                    .unwrap_or_else(|| ConfusionMatrix::identity(Emotion::ALL.map(Emotion::as_str)));
                PerceptionProvider::Stochastic(StochasticProvider::new(
                    stress,
                    emotion,
                    s.perception.sample_times.clone(),
                    cfg.seed,
                ))
            }
        };
        Ok(Executor {
            cfg: cfg.clone(),
            name: s.name.clone(),
            world,
            domain: inputs.domain.clone(),
            known,
            recognizer,
            provider,
            stress: BTreeMap::new(),
            goals: Vec::new(),
            exec: None,
            log: ExecutionLog { scenario: s.name.clone(), entries: Vec::new() },
            plans_made: 0,
            achieved: 0,
            expired: 0,
            unsolvable: 0,
        })
    }

    fn run(mut self) -> Result<RunResult, ExecError> {
        let mut t = Fixed::ZERO;
        loop {
            self.step(t)?;
            match self.next_instant(t) {
                Some(n) => t = n,
                None => break,
            }
        }
        let outcome = if self.unsolvable > 0 {
            Outcome::Unsolvable
        } else if self.expired > 0 {
            Outcome::GoalExpired
        } else if self.achieved > 0 {
            Outcome::GoalAchieved
        } else {
            Outcome::NoGoal
        };
        self.log.push(LogEntry::Outcome { time: t, outcome });
        Ok(RunResult { log: self.log, world: self.world })
    }

    fn next_instant(&self, t: Fixed) -> Option<Fixed> {
        let mut candidates = Vec::new();
        candidates.extend(self.world.next_event_time());
        candidates.extend(self.provider.next_time());
        if let Some(e) = &self.exec {
            candidates.extend(e.next_time());
            let step = self.cfg.stepsize.micros();
            candidates.push(Fixed::from_micros((t.micros() / step + 1) * step));
        }
        candidates.extend(self.goals.iter().map(|g| g.deadline));
        candidates.into_iter().filter(|&c| c > t).min()
    }

    fn step(&mut self, t: Fixed) -> Result<(), ExecError> {
        for e in self.world.advance(t)? {
            self.log.push(LogEntry::Exogenous { time: t, description: e.description });
        }
        let mut new_goal = false;
        for event in self.provider.poll(t, &self.world)? {
            self.log.push(LogEntry::Perception { time: t, event: event.clone() });
            match event.reading {
                Reading::Stress(s) => {
                    self.stress.insert(event.senior.clone(), s);
                }
                Reading::Emotion(e) => {
                    let stressed = self.stress.get(&event.senior) == Some(&StressLabel::Stressed);
                    let busy = self.goals.iter().any(|g| g.senior == event.senior);
                    if stressed && !busy {
                        if let Some(goal) = goal_for_emotion(&event.senior, e, t, &self.cfg) {
                            self.log.push(LogEntry::GoalCreated { time: t, goal: goal.clone() });
                            self.goals.push(goal);
                            new_goal = true;
                        }
                    }
                }
            }
        }
        if self.cfg.proactive && (self.exec.is_some() || new_goal) {
            let found = recognize_new_objects(&self.world, &self.known, &mut self.recognizer);
            if !found.is_empty() {
                self.log.push(LogEntry::Recognized { time: t, objects: found.clone() });
                for r in &found {
                    self.integrate(t, r)?;
                }
            }
        }
        if new_goal {
            self.abort_in_flight(t);
            self.replan(t, PlanReason::NewGoal, None)?;
        }
        self.process_agenda(t)?;
        self.check_expiry(t);
        Ok(())
    }

    fn checked_state(&self, t: Fixed) -> BTreeSet<GroundAtom> {
        let mut s = self.world.observe().atoms;
        if let Some(e) = &self.exec {
            s.extend(e.planner_facts.iter().cloned());
            let rel = t - e.plan.time_origin;
            for til in e.task.problem.tils.iter().filter(|l| l.time <= rel) {
                if WORLD_PREDICATES.contains(&til.atom.predicate.as_str()) {
                    continue;
                }
                if til.positive {
                    s.insert(til.atom.clone());
                } else {
                    s.remove(&til.atom);
                }
            }
        }
        s
    }

    fn process_agenda(&mut self, t: Fixed) -> Result<(), ExecError> {
        loop {
            let Some(exec) = &self.exec else { return Ok(()) };
            let Some(&(time, item, cp)) = exec.agenda.get(exec.cursor) else { return Ok(()) };
            if time != t {
                return Ok(());
            }
            self.exec.as_mut().expect("execution").cursor += 1;
            if let Some(k) = cp {
                let state = self.checked_state(t);
                let exec = self.exec.as_ref().expect("execution");
                let c = &exec.timeline.checkpoints[k];
                let violated = c.first_violation(&state).cloned();
                if let Some(condition) = violated {
                    let report = FailureReport {
                        time: t,
                        condition: condition.clone(),
                        phase: c.phase,
                        step: c.step,
                        action: c.step.map(|i| exec.plan.steps[i].label()),
                    };
                    self.log.push(LogEntry::Checkpoint {
                        time: t,
                        phase: c.phase,
                        step: c.step,
                        satisfied: false,
                        violated: Some(condition),
                    });
                    self.handle_failure(t, report)?;
                    continue;
                }
                if c.phase != CheckPhase::OverAll {
                    self.log.push(LogEntry::Checkpoint {
                        time: t,
                        phase: c.phase,
                        step: c.step,
                        satisfied: true,
                        violated: None,
                    });
                }
            }
            match item {
                Item::Start(i) => {
                    let exec = self.exec.as_mut().expect("execution");
                    let a = exec.action(i);
                    let (del, add) = (exec.atoms(&a.start_del), exec.atoms(&a.start_add));
                    exec.started[i] = true;
                    let action = exec.plan.steps[i].label();
                    self.world.apply_effects(&del, &add)?;
                    self.log.push(LogEntry::ActionStart { time: t, step: i, action });
                }
                Item::End(i) => {
                    let exec = self.exec.as_mut().expect("execution");
                    let a = exec.action(i);
                    let (del, add) = (exec.atoms(&a.end_del), exec.atoms(&a.end_add));
                    exec.ended[i] = true;
                    let action = exec.plan.steps[i].label();
                    self.world.apply_effects(&del, &add)?;
                    self.log.push(LogEntry::ActionEnd { time: t, step: i, action });
                }
                Item::OverAll(_) => {}
                Item::Goal => {
                    let observed = self.world.observe();
                    let mut remaining = Vec::new();
                    for g in std::mem::take(&mut self.goals) {
                        if observed.contains(&g.target) {
                            self.log.push(LogEntry::GoalStatus {
                                time: t,
                                target: g.target.clone(),
                                status: GoalStatus::Achieved,
                            });
                            self.achieved += 1;
                        } else {
                            remaining.push(g);
                        }
                    }
                    self.goals = remaining;
                    self.exec = None;
                }
            }
        }
    }

    fn abort_in_flight(&mut self, t: Fixed) {
        let Some(exec) = &self.exec else { return };
        let mut aborted = Vec::new();
        for i in 0..exec.plan.len() {
            if exec.started[i] && !exec.ended[i] {
                aborted.push((i, exec.plan.steps[i].label()));
            }
        }
        for (step, action) in aborted {
            self.log.push(LogEntry::Abort { time: t, step, action });
        }
        self.world.robot.free = true;
        self.exec = None;
    }

    fn integrate(&mut self, t: Fixed, r: &RecognizedObject) -> Result<(), ExecError> {
        let new_type = !self.domain.types.contains(&r.ty);
        if new_type {
            let mut additions = Vec::new();
            let mut ty = r.ty.as_str();
            while !self.domain.types.contains(ty) {
                let parent = self.known.parent(ty).ok_or_else(|| ExecError::UnplacedType(r.ty.clone()))?;
                additions.push((ty.to_string(), parent.to_string()));
                ty = parent;
            }
            additions.reverse();
            self.domain = integrate_types(&self.domain, &AugmentedTypeSet { additions })?;
        }
        self.world.integrate_object(&r.id, &r.ty)?;
        self.log.push(LogEntry::Integrated { time: t, object: r.clone(), new_type });
        Ok(())
    }

    fn handle_failure(&mut self, t: Fixed, report: FailureReport) -> Result<(), ExecError> {
        self.log.push(LogEntry::Failure { time: t, report: report.clone() });
        let old_objects: BTreeSet<String> = self
            .exec
            .as_ref()
            .map(|e| e.plan.steps.iter().flat_map(|s| s.args.iter().cloned()).collect())
            .unwrap_or_default();
        self.abort_in_flight(t);

        let found = recognize_new_objects(&self.world, &self.known, &mut self.recognizer);
        self.log.push(LogEntry::Recognized { time: t, objects: found.clone() });
        for r in &found {
            self.integrate(t, r)?;
        }

        let observed = self.world.observe();
        let mut active = Vec::new();
        for g in std::mem::take(&mut self.goals) {
            let status = goal_status(&g, &observed, t);
            self.log.push(LogEntry::GoalStatus { time: t, target: g.target.clone(), status });
            match status {
                GoalStatus::Active => active.push(g),
                GoalStatus::Achieved => self.achieved += 1,
                GoalStatus::Expired => self.expired += 1,
            }
        }
        self.goals = active;
        if self.goals.is_empty() {
            return Ok(());
        }
        let recognized = found.into_iter().map(|r| r.id).collect();
        self.replan(t, PlanReason::Repair, Some(FailureContext { report, old_objects, recognized }))
    }

    fn goal_rationale(&self) -> String {
        self.goals.iter().map(Goal::rationale).collect::<Vec<_>>().join("; ")
    }

    fn give_up(&mut self, t: Fixed, failure: Option<&FailureContext>, reason: String) {
        self.log.push(LogEntry::Unsolvable {
            time: t,
            goal: self.goal_rationale(),
            failure: failure.map(|f| f.report.describe()),
            reason,
        });
        self.unsolvable += self.goals.len();
        self.goals.clear();
        self.exec = None;
    }

    fn replan(&mut self, t: Fixed, reason: PlanReason, failure: Option<FailureContext>) -> Result<(), ExecError> {
        if self.plans_made > self.cfg.max_replans {
            self.give_up(t, failure.as_ref(), format!("replanning limit of {} reached", self.cfg.max_replans));
            return Ok(());
        }
        self.plans_made += 1;
        let name = if t == Fixed::ZERO {
            self.name.clone()
        } else {
            format!("{}-at-{}", self.name, t.micros() / 1000)
        };
        let prob = formulate(&name, &self.world, &self.domain, &self.goals, t)?;
        let problem = pddl::serialize_problem(&prob);
        let task = ground(Arc::new(self.domain.clone()), Arc::new(prob))?;
        let pcfg = PlannerConfig {
            epsilon: self.cfg.epsilon,
            node_budget: self.cfg.node_budget as usize,
            ..PlannerConfig::default()
        };
        let plan = match planner::plan(&task, &pcfg) {
            Ok(p) => p.with_origin(t),
            Err(e @ (PlanError::Unsolvable { .. } | PlanError::BudgetExhausted { .. })) => {
                self.give_up(t, failure.as_ref(), e.to_string());
                return Ok(());
            }
            Err(e) => return Err(ExecError::Planner(e)),
        };
        let explanation = failure.as_ref().map(|f| {
            let repair = classify_repair(&plan, &task, &self.world, f);
            Explanation {
                goal: self.goal_rationale(),
                failure: f.report.describe(),
                repair: repair.describe(),
                repair_kind: repair,
            }
        });
        let record = PlanRecord {
            reason,
            text_absolute: render_text(&plan, Rendering::Absolute),
            text_relative: render_text(&plan, Rendering::Relative),
            plan: plan.clone(),
            problem,
            explanation,
        };
        self.log.push(LogEntry::Plan { time: t, record: Box::new(record) });
        self.exec = Some(Execution::new(plan, task, self.cfg.stepsize));
        Ok(())
    }

    fn check_expiry(&mut self, t: Fixed) {
        let observed = self.world.observe();
        let mut remaining = Vec::new();
        for g in std::mem::take(&mut self.goals) {
            if goal_status(&g, &observed, t) == GoalStatus::Expired {
                self.log.push(LogEntry::GoalStatus { time: t, target: g.target.clone(), status: GoalStatus::Expired });
                self.expired += 1;
            } else {
                remaining.push(g);
            }
        }
        self.goals = remaining;
        if self.goals.is_empty() && self.exec.is_some() {
            self.abort_in_flight(t);
        }
    }
}

fn classify_repair(plan: &TemporalPlan, task: &GroundTask, world: &WorldModel, f: &FailureContext) -> Repair {
    for s in &plan.steps {
        let Some(i) = task.find_action(&s.action, &s.args) else { continue };
        if let Some(a) = task.actions[i].end_add.iter().map(|&id| task.atom(id)).find(|a| a.predicate == "suggested") {
            return Repair::Suggestion { item: a.args[0].clone() };
        }
    }
    for s in &plan.steps {
        for arg in &s.args {
            if world.object(arg).is_some() && !f.old_objects.contains(arg) {
                return Repair::AlternativeObject {
                    object: arg.clone(),
                    newly_recognized: f.recognized.contains(arg),
                };
            }
        }
    }
    Repair::Reschedule
}
