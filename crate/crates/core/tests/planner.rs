mod common;

use std::sync::Arc;

use alhome::pddl::{ground, parse_problem, GroundTask};
use alhome::planner::{
    parse_plan, plan, render_json, render_text, validate_plan, CheckPhase, PlanError, PlannerConfig, Rendering,
    TemporalPlan, ViolationKind,
};
use alhome::taxonomy::{augment_types, integrate_types};
use alhome::Fixed;
use common::{brute_force_optimum, load_task, read_asset, scenario_inputs, task_from_text, DELIVERY_DOMAIN};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cfg() -> PlannerConfig {
    PlannerConfig::default()
}

#[test]
fn scenario1_initial_plan_matches_golden() {
    let task = load_task("domain.pddl", "problem-scenario1.pddl");
    let p = plan(&task, &cfg()).unwrap();
    assert_eq!(render_text(&p, Rendering::Absolute), read_asset("golden/fig6.txt"));
    assert_eq!(p.len(), 12);
    assert_eq!(p.makespan, Fixed::from_micros(320_022_000));
    assert_eq!(p.cost, Fixed::ZERO);
}

#[test]
fn shipped_initial_problems_have_valid_plans() {
    for n in 1..=3 {
        let task = load_task("domain.pddl", &format!("problem-scenario{n}.pddl"));
        let p = plan(&task, &cfg()).unwrap();
        let report = validate_plan(&task, &p, &cfg());
        assert!(report.valid, "scenario{n}: {:?}", report.violation);
        assert_eq!(report.metric, p.metric);
        assert!(p.steps.iter().all(|s| s.action != "suggest_entertainment2"));
    }
}

#[test]
fn plan_steps_are_epsilon_chained() {
    let task = load_task("domain.pddl", "problem-scenario2.pddl");
    let p = plan(&task, &cfg()).unwrap();
    assert_eq!(p.steps[0].start, Fixed::ZERO);
    for w in p.steps.windows(2) {
        assert_eq!(w[1].start, w[0].end() + cfg().epsilon);
    }
}

#[test]
fn text_rendering_round_trips() {
    let task = load_task("domain.pddl", "problem-scenario1.pddl");
    let p = plan(&task, &cfg()).unwrap();
    let parsed = parse_plan(&render_text(&p, Rendering::Relative), &task).unwrap();
    assert_eq!(parsed.steps, p.steps);
    assert_eq!(parsed.metric, p.metric);
    let shifted = p.clone().with_origin(Fixed::from_int(100));
    assert!(render_text(&shifted, Rendering::Absolute).starts_with("a1 : 100.000 : (move"));
    let json = render_json(&shifted);
    assert_eq!(json["steps"].as_array().unwrap().len(), 12);
    assert_eq!(json["steps"][0]["id"], "a1");
}

#[test]
fn parse_plan_reports_bad_lines() {
    let task = load_task("domain.pddl", "problem-scenario1.pddl");
    let e = parse_plan("a1 : 0.000 : (move robot1 bedroom1 corridor1)\na2 : x : (move)\n", &task).unwrap_err();
    assert_eq!(e.line, 2);
    assert!(parse_plan("0.000: move robot1", &task).is_err());
    let alt = parse_plan("0.000: (move robot1 bedroom1 corridor1) [30.000]\n", &task).unwrap();
    assert_eq!(alt.steps[0].duration, Fixed::from_int(30));
}

const LINE: &str = "(define (problem line) (:domain delivery)
 (:objects bot1 - bot r0 r1 r2 - room it0 - item)
 (:init (idle bot1) (loc bot1 r0) (in it0 r1)
   (link r0 r1) (link r1 r0) (link r1 r2) (link r2 r1)
   (= (travel r0 r1) 5) (= (travel r1 r0) 5) (= (travel r1 r2) 7) (= (travel r2 r1) 7)
   GOAL-EXTRA)
 (:goal (and GOAL))
 (:metric minimize (+ (total-time) (total-cost))))";

fn line_task(init_extra: &str, goal: &str) -> GroundTask {
    task_from_text(DELIVERY_DOMAIN, &LINE.replace("GOAL-EXTRA", init_extra).replace("GOAL", goal))
}

#[test]
fn empty_goal_gives_empty_plan() {
    let task = line_task("", "");
    let p = plan(&task, &cfg()).unwrap();
    assert!(p.is_empty());
    assert_eq!(p.metric, Fixed::ZERO);
}

#[test]
fn unreachable_goal_is_proved_unsolvable() {
    // r3 has no links.
    let text = LINE
        .replace("r0 r1 r2 - room", "r0 r1 r2 r3 - room")
        .replace("GOAL-EXTRA", "")
        .replace("GOAL", "(in it0 r3)");
    let task = task_from_text(DELIVERY_DOMAIN, &text);
    let e = plan(&task, &cfg()).unwrap_err();
    assert!(e.proved_unsolvable(), "{e}");
}

#[test]
fn node_budget_is_reported() {
    let task = line_task("", "(in it0 r2)");
    let e = plan(&task, &PlannerConfig { node_budget: 1, ..cfg() }).unwrap_err();
    assert!(matches!(e, PlanError::BudgetExhausted { budget: 1 }), "{e}");
}

#[test]
fn invalid_epsilon_is_rejected() {
    let task = line_task("", "");
    let e = plan(&task, &PlannerConfig { epsilon: Fixed::ZERO, ..cfg() }).unwrap_err();
    assert!(matches!(e, PlanError::Config(_)));
}

#[test]
fn metric_weights_choose_between_courier_and_carrying() {
    // Carrying it0 from r1 to r2 takes 5 + 3 + 7 + 2 seconds; the courier
    // takes 1 second but costs 40.
    let task = line_task("", "(in it0 r2)");
    let p = plan(&task, &cfg()).unwrap();
    assert!(p.steps.iter().all(|s| s.action != "courier"), "{}", render_text(&p, Rendering::Relative));
    let fast = plan(&task, &PlannerConfig { weights: Some((Fixed::ONE, Fixed::ZERO)), ..cfg() }).unwrap();
    assert_eq!(fast.steps.len(), 1);
    assert_eq!(fast.steps[0].action, "courier");
}

#[test]
fn deadline_literal_forces_the_fast_option() {
    // With a window closing at 10 only the courier fits.
    let text = DELIVERY_DOMAIN
        .replace("(idle ?b - bot))", "(idle ?b - bot) (open))")
        .replace(
            ":condition (and (at start (in ?i ?from))",
            ":condition (and (at start (in ?i ?from)) (over all (open))",
        )
        .replace(
            "(:durative-action drop\n    :parameters (?b - bot ?i - item ?r - room)\n    :duration (= ?duration 2)\n    :condition (and",
            "(:durative-action drop\n    :parameters (?b - bot ?i - item ?r - room)\n    :duration (= ?duration 2)\n    :condition (and (over all (open))",
        );
    let problem = LINE
        .replace("GOAL-EXTRA", "(open) (at 10 (not (open)))")
        .replace("GOAL", "(in it0 r2)");
    let task = task_from_text(&text, &problem);
    assert_eq!(task.tils.len(), 1);
    let p = plan(&task, &cfg()).unwrap();
    assert_eq!(p.steps.len(), 1);
    assert_eq!(p.steps[0].action, "courier");
    assert!(validate_plan(&task, &p, &cfg()).valid);

    let too_late = problem.replace("(at 10 (not (open)))", "(at 0.5 (not (open)))");
    let task = task_from_text(&text, &too_late);
    assert!(plan(&task, &cfg()).unwrap_err().proved_unsolvable());
}

#[test]
fn plans_are_deterministic() {
    let task = load_task("domain.pddl", "problem-scenario3.pddl");
    let a = plan(&task, &cfg()).unwrap();
    let b = plan(&task, &cfg()).unwrap();
    assert_eq!(a, b);
}

fn check_optimal(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let task = task_from_text(DELIVERY_DOMAIN, &common::random_delivery_problem(&mut rng));
    let c = cfg();
    let weights = c.weights_for(&task);
    let expected = brute_force_optimum(&task, c.epsilon, weights);
    match plan(&task, &c) {
        Ok(p) => {
            let report = validate_plan(&task, &p, &c);
            prop_assert!(report.valid, "{:?}", report.violation);
            prop_assert_eq!(Some(p.metric), expected);
            prop_assert_eq!(report.metric, p.metric);
        }
        Err(e) => {
            prop_assert!(e.proved_unsolvable());
            prop_assert_eq!(expected, None);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]
    #[test]
    fn planner_is_optimal_on_small_tasks(seed in any::<u64>()) {
        check_optimal(seed)?;
    }
}

// Validator.

fn golden_relative(name: &str, task: &GroundTask) -> TemporalPlan {
    let mut p = parse_plan(&read_asset(name), task).unwrap();
    let origin = p.steps.first().map_or(Fixed::ZERO, |s| s.start);
    for s in &mut p.steps {
        s.start -= origin;
    }
    TemporalPlan::from_steps(p.steps, task, cfg().weights_for(task))
}

/// Ground task of the first repair problem logged for a shipped scenario.
fn repair_task(n: u32) -> GroundTask {
    let inputs = scenario_inputs(n);
    let log = alhome::executor::run(&inputs, &Default::default()).unwrap();
    let (_, record) = log.plans().nth(1).expect("repair plan");
    // Repairs may mention newly integrated types.
    let aug = augment_types(&inputs.domain.types, &inputs.taxonomy);
    let domain = integrate_types(&inputs.domain, &aug).unwrap();
    let problem = parse_problem(&record.problem, &domain).unwrap();
    ground(Arc::new(domain), Arc::new(problem)).unwrap()
}

#[test]
fn all_golden_plans_validate() {
    for (n, initial, repair) in [(1, "fig6", "fig7"), (2, "fig8", "fig9"), (3, "fig10", "fig11")] {
        let task = load_task("domain.pddl", &format!("problem-scenario{n}.pddl"));
        let r = validate_plan(&task, &golden_relative(&format!("golden/{initial}.txt"), &task), &cfg());
        assert!(r.valid, "{initial}: {:?}", r.violation);
        let task = repair_task(n);
        let r = validate_plan(&task, &golden_relative(&format!("golden/{repair}.txt"), &task), &cfg());
        assert!(r.valid, "{repair}: {:?}", r.violation);
    }
}

#[test]
fn validator_reports_golden_metric() {
    let task = load_task("domain.pddl", "problem-scenario1.pddl");
    let r = validate_plan(&task, &golden_relative("golden/fig6.txt", &task), &cfg());
    assert_eq!(r.metric, Fixed::from_micros(320_022_000));
    assert_eq!(r.achieved_goals.len(), 1);
}

#[test]
fn swapping_carry_and_fill_names_the_holding_condition() {
    let task = load_task("domain.pddl", "problem-scenario1.pddl");
    let mut p = golden_relative("golden/fig6.txt", &task);
    let (s4, s5) = (p.steps[4].start, p.steps[5].start);
    p.steps.swap(4, 5);
    p.steps[4].start = s4;
    p.steps[5].start = s5;
    let r = validate_plan(&task, &p, &cfg());
    let v = r.violation.expect("invalid");
    assert_eq!(v.kind, ViolationKind::Unsatisfied);
    assert_eq!(v.phase, CheckPhase::AtStart);
    assert_eq!(v.step, Some(4));
    assert_eq!(v.condition.unwrap().to_string(), "(holding robot1 glass_id05)");
}

#[test]
fn dropping_the_give_step_misses_the_goal() {
    let task = load_task("domain.pddl", "problem-scenario1.pddl");
    let mut p = golden_relative("golden/fig6.txt", &task);
    p.steps.remove(10);
    let v = validate_plan(&task, &p, &cfg()).violation.expect("invalid");
    assert_eq!(v.step, Some(10));
    assert_eq!(v.condition.unwrap().to_string(), "(given glass_id05 senior1)");
}

#[test]
fn retiming_by_epsilon_breaks_separation() {
    let task = load_task("domain.pddl", "problem-scenario1.pddl");
    let mut p = golden_relative("golden/fig6.txt", &task);
    p.steps[0].start += cfg().epsilon;
    let v = validate_plan(&task, &p, &cfg()).violation.expect("invalid");
    assert!(v.condition.is_some());
    assert!(matches!(v.kind, ViolationKind::NotSeparated | ViolationKind::Unsatisfied));
}

#[test]
fn unknown_steps_are_invalid() {
    let task = load_task("domain.pddl", "problem-scenario1.pddl");
    let p = parse_plan("0.000: (move robot1 bedroom1 kitchen1) [5.000]\n", &task).unwrap();
    let v = validate_plan(&task, &p, &cfg()).violation.expect("invalid");
    assert_eq!(v.kind, ViolationKind::InvalidStep);
}

#[test]
fn goal_deadline_is_enforced_by_validator() {
    // Shifting the whole plan past the 600 s window violates the
    // hydration_time condition of the last step.
    let task = load_task("domain.pddl", "problem-scenario1.pddl");
    let mut p = golden_relative("golden/fig6.txt", &task);
    for s in &mut p.steps {
        s.start += Fixed::from_int(400);
    }
    let v = validate_plan(&task, &p, &cfg()).violation.expect("invalid");
    assert_eq!(v.condition.unwrap().to_string(), "(hydration_time senior1)");
}
