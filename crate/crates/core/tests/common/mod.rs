//! Shared fixtures and oracles for integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;
use std::sync::Arc;

use alhome::assets::asset_path;
use alhome::config::RunConfig;
use alhome::executor::{build_timeline, run, RunInputs, Timeline};
use alhome::pddl::{ground, parse_domain, parse_problem, GroundAtom, GroundTask};
use alhome::planner::{CheckPhase, TemporalPlan};
use alhome::world::{EventEffect, ExogenousEvent, Selector};
use alhome::Fixed;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn asset(name: &str) -> PathBuf {
    asset_path(name)
}

pub fn read_asset(name: &str) -> String {
    std::fs::read_to_string(asset(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn load_task(domain: &str, problem: &str) -> GroundTask {
    task_from_text(&read_asset(domain), &read_asset(problem))
}

pub fn task_from_text(domain: &str, problem: &str) -> GroundTask {
    let d = parse_domain(domain).expect("domain parses");
    let p = parse_problem(problem, &d).expect("problem parses");
    ground(Arc::new(d), Arc::new(p)).expect("task grounds")
}

pub fn scenario_inputs(n: u32) -> RunInputs {
    RunInputs::load(&asset(&format!("scenario{n}.json")), false).expect("scenario loads")
}

pub const DELIVERY_DOMAIN: &str = "
(define (domain delivery)
  (:requirements :typing :durative-actions :fluents :action-costs)
  (:types room item bot - object)
  (:predicates
    (loc ?b - bot ?r - room)
    (in ?i - item ?r - room)
    (carrying ?b - bot ?i - item)
    (link ?a - room ?c - room)
    (idle ?b - bot))
  (:functions (travel ?a - room ?c - room) (total-cost))
  (:durative-action go
    :parameters (?b - bot ?from - room ?to - room)
    :duration (= ?duration (travel ?from ?to))
    :condition (and (at start (loc ?b ?from)) (at start (idle ?b)) (over all (link ?from ?to)))
    :effect (and (at start (not (idle ?b))) (at end (not (loc ?b ?from))) (at end (loc ?b ?to)) (at end (idle ?b))))
  (:durative-action pick
    :parameters (?b - bot ?i - item ?r - room)
    :duration (= ?duration 3)
    :condition (and (at start (loc ?b ?r)) (at start (in ?i ?r)) (at start (idle ?b)) (over all (loc ?b ?r)))
    :effect (and (at start (not (in ?i ?r))) (at start (not (idle ?b))) (at end (carrying ?b ?i)) (at end (idle ?b))))
  (:durative-action drop
    :parameters (?b - bot ?i - item ?r - room)
    :duration (= ?duration 2)
    :condition (and (at start (loc ?b ?r)) (at start (carrying ?b ?i)) (at start (idle ?b)))
    :effect (and (at start (not (idle ?b))) (at end (not (carrying ?b ?i))) (at end (in ?i ?r)) (at end (idle ?b))))
  (:durative-action courier
    :parameters (?b - bot ?i - item ?from - room ?to - room)
    :duration (= ?duration 1)
    :condition (and (at start (in ?i ?from)) (at start (idle ?b)) (at start (link ?from ?to)))
    :effect (and (at start (not (idle ?b))) (at end (not (in ?i ?from))) (at end (in ?i ?to)) (at end (idle ?b))
                 (at end (increase (total-cost) 40)))))
";

/// Random solvable-or-not delivery problem text.
pub fn random_delivery_problem<R: Rng>(rng: &mut R) -> String {
    let n_rooms = rng.gen_range(3..=5);
    let n_items = rng.gen_range(1..=2);
    let rooms: Vec<String> = (0..n_rooms).map(|i| format!("r{i}")).collect();
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for i in 1..n_rooms {
        if rng.gen_bool(0.85) {
            edges.insert((rng.gen_range(0..i), i));
        }
    }
    for _ in 0..rng.gen_range(0..3) {
        let (a, b) = (rng.gen_range(0..n_rooms), rng.gen_range(0..n_rooms));
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    let mut p = String::from("(define (problem rnd) (:domain delivery)\n (:objects bot1 - bot");
    for r in &rooms {
        p += &format!(" {r}");
    }
    p += " - room";
    for i in 0..n_items {
        p += &format!(" it{i}");
    }
    p += " - item)\n (:init (idle bot1)";
    p += &format!(" (loc bot1 {})", rooms.choose(rng).unwrap());
    for i in 0..n_items {
        p += &format!(" (in it{i} {})", rooms.choose(rng).unwrap());
    }
    for &(a, b) in &edges {
        let t = rng.gen_range(1..=30);
        p += &format!(" (link r{a} r{b}) (link r{b} r{a}) (= (travel r{a} r{b}) {t}) (= (travel r{b} r{a}) {t})");
    }
    p += ")\n (:goal (and";
    for i in 0..n_items {
        p += &format!(" (in it{i} {})", rooms.choose(rng).unwrap());
    }
    if rng.gen_bool(0.3) {
        p += &format!(" (loc bot1 {})", rooms.choose(rng).unwrap());
    }
    p += "))\n";
    p += match rng.gen_range(0..3) {
        0 => " (:metric minimize (+ (total-time) (total-cost)))",
        1 => " (:metric minimize (total-time))",
        _ => " (:metric minimize (+ (* 2 (total-time)) (total-cost)))",
    };
    p += ")\n";
    p
}

/// Exhaustive search over sequential epsilon-chained schedules, with
/// per-state memoization of the best metric value reached. Returns the
/// optimal metric value, or `None` if the goal is unreachable. Tasks with
/// timed literals are not supported.
pub fn brute_force_optimum(task: &GroundTask, eps: Fixed, weights: (Fixed, Fixed)) -> Option<Fixed> {
    assert!(task.tils.is_empty());
    let atoms = |ids: &[u32]| -> Vec<GroundAtom> { ids.iter().map(|&i| task.atom(i).clone()).collect() };
    struct A {
        dur: Fixed,
        cost: Fixed,
        pre: Vec<GroundAtom>,
        inv: Vec<GroundAtom>,
        post: Vec<GroundAtom>,
        sdel: Vec<GroundAtom>,
        sadd: Vec<GroundAtom>,
        edel: Vec<GroundAtom>,
        eadd: Vec<GroundAtom>,
    }
    let acts: Vec<A> = task
        .actions
        .iter()
        .map(|a| A {
            dur: a.duration,
            cost: a.cost,
            pre: atoms(&a.at_start),
            inv: atoms(&a.over_all),
            post: atoms(&a.at_end),
            sdel: atoms(&a.start_del),
            sadd: atoms(&a.start_add),
            edel: atoms(&a.end_del),
            eadd: atoms(&a.end_add),
        })
        .collect();
    let init: BTreeSet<GroundAtom> = task.init.iter().map(|i| task.atom(i).clone()).collect();
    let goal: Vec<GroundAtom> = atoms(&task.goal);
    let value = |makespan: Fixed, cost: Fixed| weights.0.mul(makespan) + weights.1.mul(cost);

    fn dfs(
        s: &BTreeSet<GroundAtom>,
        ready: Fixed,
        makespan: Fixed,
        cost: Fixed,
        acts: &[A],
        goal: &[GroundAtom],
        eps: Fixed,
        value: &dyn Fn(Fixed, Fixed) -> Fixed,
        memo: &mut HashMap<BTreeSet<GroundAtom>, Fixed>,
        best: &mut Option<Fixed>,
    ) {
        let g = value(makespan, cost);
        if best.is_some_and(|b| g >= b) {
            return;
        }
        if let Some(&m) = memo.get(s) {
            if m <= g {
                return;
            }
        }
        memo.insert(s.clone(), g);
        if goal.iter().all(|a| s.contains(a)) {
            *best = Some(g);
            return;
        }
        for a in acts {
            if !a.pre.iter().all(|p| s.contains(p)) {
                continue;
            }
            let mut n = s.clone();
            for d in &a.sdel {
                n.remove(d);
            }
            n.extend(a.sadd.iter().cloned());
            if !a.inv.iter().all(|p| n.contains(p)) || !a.post.iter().all(|p| n.contains(p)) {
                continue;
            }
            for d in &a.edel {
                n.remove(d);
            }
            n.extend(a.eadd.iter().cloned());
            let end = ready + a.dur;
            dfs(&n, end + eps, end, cost + a.cost, acts, goal, eps, value, memo, best);
        }
    }

    let mut best = None;
    let mut memo = HashMap::new();
    dfs(&init, Fixed::ZERO, Fixed::ZERO, Fixed::ZERO, &acts, &goal, eps, &value, &mut memo, &mut best);
    best
}

/// A scenario with one exogenous event that falsifies a future checkpoint.
pub struct MonitorCase {
    pub inputs: RunInputs,
    pub cfg: RunConfig,
    pub event_time: Fixed,
    pub atom: GroundAtom,
    /// First checkpoint at or after the event that requires `atom`.
    pub expected_detection: Fixed,
}

/// Initial plan and timeline of a shipped scenario with its events removed.
pub fn baseline(n: u32, cfg: &RunConfig) -> (RunInputs, TemporalPlan, GroundTask, Timeline) {
    let mut inputs = scenario_inputs(n);
    inputs.scenario.events.clear();
    let log = run(&inputs, cfg).expect("baseline runs");
    let (_, record) = log.plans().next().expect("initial plan");
    let problem = parse_problem(&record.problem, &inputs.domain).expect("logged problem parses");
    let task = ground(Arc::new(inputs.domain.clone()), Arc::new(problem)).expect("grounds");
    let timeline = build_timeline(&record.plan, &task, cfg.stepsize);
    (inputs, record.plan.clone(), task, timeline)
}

pub fn random_monitor_case<R: Rng>(rng: &mut R) -> MonitorCase {
    let n = rng.gen_range(1..=3);
    let stepsize = *[Fixed::from_millis(250), Fixed::from_millis(500), Fixed::ONE, Fixed::from_int(2)]
        .choose(rng)
        .unwrap();
    let cfg = RunConfig { stepsize, ..RunConfig::default() };
    let (mut inputs, _plan, _task, timeline) = baseline(n, &cfg);
    let falsifiable = |a: &GroundAtom| matches!(a.predicate.as_str(), "available" | "terrified" | "sad" | "bored");
    let candidates: Vec<(Fixed, GroundAtom)> = timeline
        .checkpoints
        .iter()
        .filter(|c| c.phase == CheckPhase::AtStart)
        .flat_map(|c| c.conditions.iter().filter(|a| falsifiable(a)).map(move |a| (c.time, a.clone())))
        .collect();
    let (cp_time, atom) = candidates.choose(rng).expect("falsifiable checkpoint").clone();
    let event_time = Fixed::from_micros(rng.gen_range(1..=cp_time.micros()));
    let effect = if atom.predicate == "available" {
        EventEffect::SetAvailability { selector: Selector::Objects(vec![atom.args[0].clone()]), available: false }
    } else {
        EventEffect::SetEmotion { senior: atom.args[0].clone(), emotion: alhome::perception::Emotion::Neutral }
    };
    inputs.scenario.events = vec![ExogenousEvent { time: event_time, effect }];
    let expected_detection = timeline
        .checkpoints
        .iter()
        .find(|c| c.time >= event_time && c.conditions.contains(&atom))
        .expect("checkpoint after event")
        .time;
    MonitorCase { inputs, cfg, event_time, atom, expected_detection }
}

/// Goal-mapping properties shared by the property tests and the acceptance suite.
pub mod goal_props {
    use std::collections::BTreeSet;

    use alhome::config::RunConfig;
    use alhome::goals::{comfort_predicate, goal_for_emotion, goal_status, is_goal_active, GoalStatus};
    use alhome::perception::Emotion;
    use alhome::world::ObservedState;
    use alhome::Fixed;
    use proptest::prelude::*;

    pub fn emotion() -> impl Strategy<Value = Emotion> {
        prop::sample::select(Emotion::ALL.to_vec())
    }

    pub fn time() -> impl Strategy<Value = Fixed> {
        (0i64..10_000_000_000).prop_map(Fixed::from_micros)
    }

    /// Windows with terrified < sad < bored.
    pub fn ordered_config() -> impl Strategy<Value = RunConfig> {
        (1i64..1000, 1i64..1000, 1i64..1000).prop_map(|(a, b, c)| RunConfig {
            window_terrified: Fixed::from_int(a),
            window_sad: Fixed::from_int(a + b),
            window_bored: Fixed::from_int(a + b + c),
            ..RunConfig::default()
        })
    }

    pub fn totality(e: Emotion, now: Fixed, cfg: &RunConfig) -> Result<(), TestCaseError> {
        let goal = goal_for_emotion("senior1", e, now, cfg);
        prop_assert_eq!(goal.is_some(), e.is_negative());
        prop_assert_eq!(comfort_predicate(e).is_some(), e.is_negative());
        if let Some(g) = goal {
            prop_assert_eq!(g.target.args, vec!["senior1".to_string()]);
            prop_assert!(g.deadline > g.created_at);
            prop_assert_eq!(g.created_at, now);
        }
        Ok(())
    }

    pub fn injectivity(a: Emotion, b: Emotion, cfg: &RunConfig) -> Result<(), TestCaseError> {
        let ga = goal_for_emotion("s", a, Fixed::ZERO, cfg);
        let gb = goal_for_emotion("s", b, Fixed::ZERO, cfg);
        if let (Some(ga), Some(gb)) = (ga, gb) {
            prop_assert_eq!(ga.target == gb.target, a == b);
        }
        Ok(())
    }

    pub fn window_order(now: Fixed, cfg: &RunConfig) -> Result<(), TestCaseError> {
        let d = |e| goal_for_emotion("s", e, now, cfg).unwrap().deadline;
        prop_assert!(d(Emotion::Terrified) < d(Emotion::Sad));
        prop_assert!(d(Emotion::Sad) < d(Emotion::Bored));
        prop_assert!(cfg.validate().is_ok());
        Ok(())
    }

    pub fn inactive_when_true(e: Emotion, now: Fixed, dt: i64) -> Result<(), TestCaseError> {
        let cfg = RunConfig::default();
        let Some(g) = goal_for_emotion("senior1", e, now, &cfg) else { return Ok(()) };
        let t = now + Fixed::from_micros(dt);
        let state = |atoms: Vec<_>| ObservedState { time: t, atoms: atoms.into_iter().collect::<BTreeSet<_>>() };
        let holds = state(vec![g.target.clone()]);
        prop_assert!(!is_goal_active(&g, &holds, t));
        prop_assert_eq!(goal_status(&g, &holds, t), GoalStatus::Achieved);
        let expected = if t >= g.deadline { GoalStatus::Expired } else { GoalStatus::Active };
        prop_assert_eq!(goal_status(&g, &state(vec![]), t), expected);
        Ok(())
    }
}
