//! Best-first search over epsilon-chained sequential schedules.
//!
//! Each action starts `epsilon` after the previous one ends (the first at 0,
//! or at a timed literal when waiting for one). Nodes are ordered by
//! `(f, path)` so ties resolve to the lexicographically smallest action
//! sequence, where action indices follow `(name, args)` order.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use super::heuristic::{relevant_actions, MaxHeuristic};
use super::{PlanError, PlanStep, PlannerConfig, TemporalPlan};
use crate::fixed::Fixed;
use crate::pddl::{AtomId, AtomSet, GroundTask, GroundTil};

const WAIT: u32 = u32::MAX;

#[derive(Clone)]
struct Node {
    atoms: AtomSet,
    til_next: usize,
    makespan: Fixed,
    ready: Fixed,
    cost: Fixed,
    waited: bool,
    path: Vec<u32>,
    starts: Vec<Fixed>,
}

struct Entry {
    f: Fixed,
    node: Node,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap.
        (other.f, &other.node.path).cmp(&(self.f, &self.node.path))
    }
}

fn apply_til(atoms: &mut AtomSet, til: &GroundTil) {
    if til.positive {
        atoms.insert(til.atom);
    } else {
        atoms.remove(til.atom);
    }
}

/// Starts action `idx` at `node.ready`; `None` if a condition fails.
fn successor(task: &GroundTask, node: &Node, idx: usize, eps: Fixed) -> Option<Node> {
    let a = &task.actions[idx];
    let tils = &task.tils;
    let start = node.ready;
    let end = start + a.duration;
    let mut atoms = node.atoms.clone();
    let mut k = node.til_next;
    while k < tils.len() && tils[k].time <= start {
        apply_til(&mut atoms, &tils[k]);
        k += 1;
    }
    if !atoms.contains_all(&a.at_start) {
        return None;
    }
    for &p in &a.start_del {
        atoms.remove(p);
    }
    for &p in &a.start_add {
        atoms.insert(p);
    }
    if !atoms.contains_all(&a.over_all) {
        return None;
    }
    while k < tils.len() && tils[k].time < end {
        apply_til(&mut atoms, &tils[k]);
        if !atoms.contains_all(&a.over_all) {
            return None;
        }
        k += 1;
    }
    while k < tils.len() && tils[k].time <= end {
        apply_til(&mut atoms, &tils[k]);
        k += 1;
    }
    if !atoms.contains_all(&a.at_end) {
        return None;
    }
    for &p in &a.end_del {
        atoms.remove(p);
    }
    for &p in &a.end_add {
        atoms.insert(p);
    }
    let mut path = node.path.clone();
    path.push(idx as u32);
    let mut starts = node.starts.clone();
    starts.push(start);
    Some(Node {
        atoms,
        til_next: k,
        makespan: end,
        ready: end + eps,
        cost: node.cost + a.cost,
        waited: false,
        path,
        starts,
    })
}

/// Idles until the next positive timed literal after `ready`.
fn wait_successor(task: &GroundTask, node: &Node) -> Option<Node> {
    let tils = &task.tils;
    let target = tils[node.til_next..].iter().find(|t| t.positive && t.time > node.ready)?.time;
    let mut atoms = node.atoms.clone();
    let mut k = node.til_next;
    while k < tils.len() && tils[k].time <= target {
        apply_til(&mut atoms, &tils[k]);
        k += 1;
    }
    let mut path = node.path.clone();
    path.push(WAIT);
    let mut starts = node.starts.clone();
    starts.push(target);
    Some(Node {
        atoms,
        til_next: k,
        makespan: node.makespan,
        ready: target,
        cost: node.cost,
        waited: true,
        path,
        starts,
    })
}

type Key = (AtomSet, usize);
type Frontier = Vec<(Fixed, Fixed, Fixed)>;

fn dominated(frontier: Option<&Frontier>, n: &Node) -> bool {
    frontier.is_some_and(|f| {
        f.iter()
            .any(|&(r, m, c)| r <= n.ready && m <= n.makespan && c <= n.cost)
    })
}

/// Finds a metric-minimal sequential plan.
pub fn plan(task: &GroundTask, cfg: &PlannerConfig) -> Result<TemporalPlan, PlanError> {
    if !cfg.epsilon.is_positive() {
        return Err(PlanError::Config("epsilon must be positive".into()));
    }
    let weights = cfg.weights_for(task);
    if weights.0.is_negative() || weights.1.is_negative() {
        return Err(PlanError::Config("metric weights must be nonnegative".into()));
    }
    let relevant = relevant_actions(task);
    let candidates: Vec<usize> = (0..task.actions.len()).filter(|&i| relevant[i]).collect();
    let h = MaxHeuristic::new(task, &relevant, weights);
    let pending = |til_next: usize| -> Vec<(Fixed, AtomId)> {
        task.tils[til_next..]
            .iter()
            .filter(|t| t.positive)
            .map(|t| (t.time, t.atom))
            .collect()
    };
    let g = |n: &Node| weights.0.mul(n.makespan) + weights.1.mul(n.cost);

    let mut root = Node {
        atoms: task.init.clone(),
        til_next: 0,
        makespan: Fixed::ZERO,
        ready: Fixed::ZERO,
        cost: Fixed::ZERO,
        waited: false,
        path: Vec::new(),
        starts: Vec::new(),
    };
    while root.til_next < task.tils.len() && task.tils[root.til_next].time <= Fixed::ZERO {
        apply_til(&mut root.atoms, &task.tils[root.til_next]);
        root.til_next += 1;
    }

    let mut open = BinaryHeap::new();
    let mut closed: HashMap<Key, Frontier> = HashMap::new();
    let mut expanded = 0usize;
    if let Some(h0) = h.eval(&root.atoms, &pending(root.til_next), root.makespan) {
        open.push(Entry { f: h0, node: root });
    }

    while let Some(Entry { node, .. }) = open.pop() {
        let key = (node.atoms.clone(), node.til_next);
        if dominated(closed.get(&key), &node) {
            continue;
        }
        if !node.waited && node.atoms.contains_all(&task.goal) {
            log::debug!("plan found after {expanded} expansions");
            let steps = node
                .path
                .iter()
                .zip(&node.starts)
                .filter(|(i, _)| **i != WAIT)
                .map(|(&i, &s)| PlanStep::from_ground(s, &task.actions[i as usize]))
                .collect();
            return Ok(TemporalPlan::from_steps(steps, task, weights));
        }
        expanded += 1;
        if expanded > cfg.node_budget {
            return Err(PlanError::BudgetExhausted { budget: cfg.node_budget });
        }
        let frontier = closed.entry(key).or_default();
        frontier.retain(|&(r, m, c)| !(node.ready <= r && node.makespan <= m && node.cost <= c));
        frontier.push((node.ready, node.makespan, node.cost));

        let succs = candidates
            .iter()
            .filter_map(|&i| successor(task, &node, i, cfg.epsilon))
            .chain(wait_successor(task, &node));
        for s in succs {
            if cfg.makespan_bound.is_some_and(|b| s.makespan > b) {
                continue;
            }
            if dominated(closed.get(&(s.atoms.clone(), s.til_next)), &s) {
                continue;
            }
            let Some(hv) = h.eval(&s.atoms, &pending(s.til_next), s.makespan) else {
                continue;
            };
            open.push(Entry { f: g(&s) + hv, node: s });
        }
    }
    Err(PlanError::Unsolvable { expanded })
}
