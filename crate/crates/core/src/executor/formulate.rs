//! Builds planning problems from the observed world.

use crate::fixed::Fixed;
use crate::goals::{emit_goal_constraints, Goal, GoalError};
use crate::pddl::{DomainModel, GroundAtom, GroundFunction, Metric, ProblemModel, ROOT_TYPE};
use crate::world::WorldModel;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulateError {
    #[error(transparent)]
    Goal(#[from] GoalError),
    #[error("object `{id}` has type `{ty}` unknown to the domain")]
    UnknownType { id: String, ty: String },
}

/// Problem whose initial state is the world as observed at `origin`:
/// robot, seniors, rooms and integrated objects; observed atoms plus the
/// room graph; one goal per entry in `goals`.
pub fn formulate(
    name: &str,
    world: &WorldModel,
    domain: &DomainModel,
    goals: &[Goal],
    origin: Fixed,
) -> Result<ProblemModel, FormulateError> {
    let mut objects = vec![(world.robot.id.clone(), "robot".to_string())];
    objects.extend(world.seniors.iter().map(|s| (s.id.clone(), "senior".to_string())));
    objects.extend(world.rooms.iter().map(|r| (r.id.clone(), r.ty.clone())));
    for o in world.objects.iter().filter(|o| o.integrated) {
        let ty = o.known_type.clone().unwrap_or_else(|| o.ty.clone());
        objects.push((o.id.clone(), ty));
    }
    for (id, ty) in &objects {
        if ty != ROOT_TYPE && !domain.types.contains(ty) {
            return Err(FormulateError::UnknownType { id: id.clone(), ty: ty.clone() });
        }
    }
    let mut init: Vec<GroundAtom> = world.observe().atoms.into_iter().collect();
    init.extend(world.path_atoms());
    let mut functions = Vec::new();
    if domain.function("moving_time").is_some() {
        for p in &world.paths {
            for (a, b) in [(&p.from, &p.to), (&p.to, &p.from)] {
                let f = GroundFunction { name: "moving_time".into(), args: vec![a.clone(), b.clone()] };
                functions.push((f, p.time));
            }
        }
    }
    let mut prob = ProblemModel {
        name: name.to_string(),
        domain: domain.name.clone(),
        objects,
        init,
        functions,
        tils: Vec::new(),
        goal: Vec::new(),
        metric: Some(Metric::makespan_plus_cost()),
    };
    for g in goals {
        prob = emit_goal_constraints(g, domain, &prob, origin)?;
    }
    Ok(prob)
}
