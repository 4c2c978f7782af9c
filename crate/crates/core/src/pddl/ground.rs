//! Grounding of durative action schemas over a problem's objects.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use super::model::*;
use super::state::AtomSet;
use crate::fixed::Fixed;

pub type AtomId = u32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroundError {
    #[error("action {action} has non-positive duration {duration}")]
    NonPositiveDuration { action: String, duration: Fixed },
    #[error("action {action} has negative cost {cost}")]
    NegativeCost { action: String, cost: Fixed },
    #[error("problem is for domain `{found}` but `{expected}` was supplied")]
    DomainMismatch { expected: String, found: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundAction {
    pub name: String,
    pub args: Vec<String>,
    pub duration: Fixed,
    pub cost: Fixed,
    pub at_start: Vec<AtomId>,
    pub over_all: Vec<AtomId>,
    pub at_end: Vec<AtomId>,
    pub start_add: Vec<AtomId>,
    pub start_del: Vec<AtomId>,
    pub end_add: Vec<AtomId>,
    pub end_del: Vec<AtomId>,
}

impl GroundAction {
    /// `(name arg1 arg2 ...)`
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.name)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroundTil {
    pub time: Fixed,
    pub atom: AtomId,
    pub positive: bool,
}

/// A fully instantiated planning task.
#[derive(Debug, Clone)]
pub struct GroundTask {
    pub domain: Arc<DomainModel>,
    pub problem: Arc<ProblemModel>,
    pub atoms: Vec<GroundAtom>,
    index: HashMap<GroundAtom, AtomId>,
    /// Sorted by `(name, args)`.
    pub actions: Vec<GroundAction>,
    pub init: AtomSet,
    /// Sorted by time.
    pub tils: Vec<GroundTil>,
    pub goal: Vec<AtomId>,
    pub metric: Metric,
}

impl GroundTask {
    pub fn atom_id(&self, atom: &GroundAtom) -> Option<AtomId> {
        self.index.get(atom).copied()
    }

    pub fn atom(&self, id: AtomId) -> &GroundAtom {
        &self.atoms[id as usize]
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn find_action(&self, name: &str, args: &[String]) -> Option<usize> {
        self.actions
            .binary_search_by(|a| (a.name.as_str(), a.args.as_slice()).cmp(&(name, args)))
            .ok()
    }

    pub fn empty_state(&self) -> AtomSet {
        AtomSet::new(self.atoms.len())
    }
}

/// Predicates that neither an action effect nor a timed literal can change.
pub fn static_predicates(domain: &DomainModel, problem: &ProblemModel) -> BTreeSet<String> {
    let fluent = domain.fluent_predicates();
    let timed: HashSet<&str> = problem.tils.iter().map(|t| t.atom.predicate.as_str()).collect();
    domain
        .predicates
        .iter()
        .map(|p| p.name.as_str())
        .filter(|p| !fluent.contains(p) && !timed.contains(p))
        .map(str::to_string)
        .collect()
}

struct Interner {
    atoms: Vec<GroundAtom>,
    index: HashMap<GroundAtom, AtomId>,
}

impl Interner {
    fn intern(&mut self, atom: GroundAtom) -> AtomId {
        if let Some(&id) = self.index.get(&atom) {
            return id;
        }
        let id = self.atoms.len() as AtomId;
        self.atoms.push(atom.clone());
        self.index.insert(atom, id);
        id
    }
}

fn bind(pattern: &AtomPattern, params: &[TypedParam], binding: &[&str]) -> Option<GroundAtom> {
    let mut args = Vec::with_capacity(pattern.args.len());
    for t in &pattern.args {
        match t {
            Term::Const(c) => args.push(c.clone()),
            Term::Var(v) => {
                let i = params.iter().position(|p| p.name == *v)?;
                args.push(binding.get(i)?.to_string());
            }
        }
    }
    Some(GroundAtom { predicate: pattern.predicate.clone(), args })
}

fn eval(expr: &NumericExpr, params: &[TypedParam], binding: &[&str], problem: &ProblemModel) -> Option<Fixed> {
    match expr {
        NumericExpr::Constant(v) => Some(*v),
        NumericExpr::Function { name, args } => {
            let pattern = AtomPattern { predicate: name.clone(), args: args.clone() };
            let g = bind(&pattern, params, binding)?;
            problem.function_value(&GroundFunction { name: g.predicate, args: g.args })
        }
    }
}

struct Candidate {
    name: String,
    args: Vec<String>,
    duration: Fixed,
    cost: Fixed,
    lists: [Vec<GroundAtom>; 7],
}

fn instantiate(
    schema: &DurativeActionSchema,
    problem: &ProblemModel,
    domain: &DomainModel,
    statics: &BTreeSet<String>,
    static_facts: &HashSet<GroundAtom>,
    out: &mut Vec<Candidate>,
) -> Result<(), GroundError> {
    let domains: Vec<Vec<&str>> = schema
        .params
        .iter()
        .map(|p| {
            problem
                .objects
                .iter()
                .filter(|(_, t)| p.ty.admits(t, &domain.types))
                .map(|(o, _)| o.as_str())
                .collect()
        })
        .collect();
    // Static conditions indexed by the last parameter they mention.
    let mut checks: Vec<Vec<&AtomPattern>> = vec![Vec::new(); schema.params.len() + 1];
    for c in schema.conditions().filter(|c| statics.contains(&c.predicate)) {
        let last = c
            .args
            .iter()
            .filter_map(|t| match t {
                Term::Var(v) => schema.params.iter().position(|p| p.name == *v).map(|i| i + 1),
                Term::Const(_) => None,
            })
            .max()
            .unwrap_or(0);
        checks[last].push(c);
    }
    if checks[0].iter().any(|c| bind(c, &schema.params, &[]).is_none_or(|g| !static_facts.contains(&g))) {
        return Ok(());
    }
    let mut binding: Vec<&str> = Vec::with_capacity(schema.params.len());
    search(schema, problem, &domains, &checks, static_facts, &mut binding, out)
}

fn search<'a>(
    schema: &DurativeActionSchema,
    problem: &ProblemModel,
    domains: &[Vec<&'a str>],
    checks: &[Vec<&AtomPattern>],
    static_facts: &HashSet<GroundAtom>,
    binding: &mut Vec<&'a str>,
    out: &mut Vec<Candidate>,
) -> Result<(), GroundError> {
    let depth = binding.len();
    if depth == domains.len() {
        return emit(schema, problem, binding, out);
    }
    for &obj in &domains[depth] {
        binding.push(obj);
        let ok = checks[depth + 1]
            .iter()
            .all(|c| bind(c, &schema.params, binding).is_some_and(|g| static_facts.contains(&g)));
        if ok {
            search(schema, problem, domains, checks, static_facts, binding, out)?;
        }
        binding.pop();
    }
    Ok(())
}

fn emit(schema: &DurativeActionSchema, problem: &ProblemModel, binding: &[&str], out: &mut Vec<Candidate>) -> Result<(), GroundError> {
    let params = &schema.params;
    let label = || {
        let mut s = format!("({}", schema.name);
        for b in binding {
            s.push(' ');
            s.push_str(b);
        }
        s + ")"
    };
    let Some(duration) = eval(&schema.duration, params, binding, problem) else {
        return Ok(());
    };
    if !duration.is_positive() {
        return Err(GroundError::NonPositiveDuration { action: label(), duration });
    }
    let mut cost = Fixed::ZERO;
    for c in &schema.costs {
        let Some(v) = eval(&c.amount, params, binding, problem) else {
            return Ok(());
        };
        if v.is_negative() {
            return Err(GroundError::NegativeCost { action: label(), cost: v });
        }
        cost += v;
    }
    let g = |list: &[AtomPattern]| -> Vec<GroundAtom> {
        list.iter().filter_map(|p| bind(p, params, binding)).collect()
    };
    out.push(Candidate {
        name: schema.name.clone(),
        args: binding.iter().map(|s| s.to_string()).collect(),
        duration,
        cost,
        lists: [
            g(&schema.at_start),
            g(&schema.over_all),
            g(&schema.at_end),
            g(&schema.start_add),
            g(&schema.start_del),
            g(&schema.end_add),
            g(&schema.end_del),
        ],
    });
    Ok(())
}

/// Instantiates every schema, dropping actions whose static conditions fail,
/// whose duration or cost function is undefined, or whose conditions are not
/// relaxed-reachable from the initial state and timed literals.
pub fn ground(domain: Arc<DomainModel>, problem: Arc<ProblemModel>) -> Result<GroundTask, GroundError> {
    if !problem.domain.eq_ignore_ascii_case(&domain.name) {
        return Err(GroundError::DomainMismatch { expected: domain.name.clone(), found: problem.domain.clone() });
    }
    let statics = static_predicates(&domain, &problem);
    let static_facts: HashSet<GroundAtom> =
        problem.init.iter().filter(|a| statics.contains(&a.predicate)).cloned().collect();

    let mut candidates = Vec::new();
    for schema in &domain.actions {
        instantiate(schema, &problem, &domain, &statics, &static_facts, &mut candidates)?;
    }

    // Relaxed reachability.
    let mut reached: HashSet<GroundAtom> = problem.init.iter().cloned().collect();
    reached.extend(problem.tils.iter().filter(|t| t.positive).map(|t| t.atom.clone()));
    let mut live = vec![false; candidates.len()];
    loop {
        let mut changed = false;
        for (i, c) in candidates.iter().enumerate() {
            if live[i] {
                continue;
            }
            let [s, o, e, sa, _, _, _] = &c.lists;
            let ok = s.iter().all(|a| reached.contains(a))
                && o.iter().chain(e).all(|a| reached.contains(a) || sa.contains(a));
            if ok {
                live[i] = true;
                changed = true;
                reached.extend(c.lists[3].iter().cloned());
                reached.extend(c.lists[5].iter().cloned());
            }
        }
        if !changed {
            break;
        }
    }
    let mut kept: Vec<Candidate> = candidates.into_iter().zip(live).filter(|(_, l)| *l).map(|(c, _)| c).collect();
    kept.sort_by(|a, b| (&a.name, &a.args).cmp(&(&b.name, &b.args)));

    let mut interner = Interner { atoms: Vec::new(), index: HashMap::new() };
    let init_ids: Vec<AtomId> = problem.init.iter().map(|a| interner.intern(a.clone())).collect();
    let tils: Vec<GroundTil> = problem
        .tils
        .iter()
        .map(|t| GroundTil { time: t.time, atom: interner.intern(t.atom.clone()), positive: t.positive })
        .collect();
    let goal: Vec<AtomId> = problem.goal.iter().map(|a| interner.intern(a.clone())).collect();
    let actions: Vec<GroundAction> = kept
        .into_iter()
        .map(|c| {
            let [s, o, e, sa, sd, ea, ed] = c.lists;
            let mut ids = |v: Vec<GroundAtom>| v.into_iter().map(|a| interner.intern(a)).collect::<Vec<_>>();
            GroundAction {
                name: c.name,
                args: c.args,
                duration: c.duration,
                cost: c.cost,
                at_start: ids(s),
                over_all: ids(o),
                at_end: ids(e),
                start_add: ids(sa),
                start_del: ids(sd),
                end_add: ids(ea),
                end_del: ids(ed),
            }
        })
        .collect();
    let n = interner.atoms.len();
    Ok(GroundTask {
        metric: problem.metric_or_default(),
        domain,
        problem,
        atoms: interner.atoms,
        index: interner.index,
        actions,
        init: AtomSet::from_ids(n, init_ids),
        tils,
        goal,
    })
}
