//! Relevance analysis and the max-cost relaxed heuristic.

use crate::fixed::Fixed;
use crate::pddl::{AtomId, AtomSet, GroundTask};

/// Actions that can contribute to the goal. An atom an action both requires
/// at start and adds back later does not count as an achievement.
pub(crate) fn relevant_actions(task: &GroundTask) -> Vec<bool> {
    let mut relevant_atom = vec![false; task.num_atoms()];
    for &g in &task.goal {
        relevant_atom[g as usize] = true;
    }
    let mut relevant = vec![false; task.actions.len()];
    loop {
        let mut changed = false;
        for (i, a) in task.actions.iter().enumerate() {
            if relevant[i] {
                continue;
            }
            let achieves = a
                .start_add
                .iter()
                .chain(&a.end_add)
                .any(|&p| relevant_atom[p as usize] && !a.at_start.contains(&p));
            if achieves {
                relevant[i] = true;
                changed = true;
                for &p in a.at_start.iter().chain(&a.over_all).chain(&a.at_end) {
                    relevant_atom[p as usize] = true;
                }
            }
        }
        if !changed {
            return relevant;
        }
    }
}

pub(crate) struct MaxHeuristic {
    actions: Vec<RelaxedAction>,
    goal: Vec<AtomId>,
    num_atoms: usize,
    time_weight: Fixed,
}

struct RelaxedAction {
    pre: Vec<AtomId>,
    add: Vec<AtomId>,
    weight: Fixed,
}

impl MaxHeuristic {
    pub(crate) fn new(task: &GroundTask, relevant: &[bool], weights: (Fixed, Fixed)) -> Self {
        let actions = task
            .actions
            .iter()
            .zip(relevant)
            .filter(|(_, r)| **r)
            .map(|(a, _)| {
                let mut pre: Vec<AtomId> = a
                    .at_start
                    .iter()
                    .chain(&a.over_all)
                    .chain(&a.at_end)
                    .copied()
                    .filter(|p| !a.start_add.contains(p) || a.at_start.contains(p))
                    .collect();
                pre.sort_unstable();
                pre.dedup();
                let mut add: Vec<AtomId> = a.start_add.iter().chain(&a.end_add).copied().collect();
                add.sort_unstable();
                add.dedup();
                RelaxedAction {
                    pre,
                    add,
                    weight: weights.0.mul(a.duration) + weights.1.mul(a.cost),
                }
            })
            .collect();
        MaxHeuristic {
            actions,
            goal: task.goal.clone(),
            num_atoms: task.num_atoms(),
            time_weight: weights.0,
        }
    }

    /// Lower bound on the remaining metric, or `None` when the goal is
    /// unreachable even ignoring deletes.
    pub(crate) fn eval(&self, atoms: &AtomSet, pending: &[(Fixed, AtomId)], makespan: Fixed) -> Option<Fixed> {
        const INF: i64 = i64::MAX;
        let mut cost = vec![INF; self.num_atoms];
        for p in atoms.iter() {
            cost[p as usize] = 0;
        }
        for &(t, p) in pending {
            let v = self.time_weight.mul((t - makespan).max(Fixed::ZERO)).micros();
            cost[p as usize] = cost[p as usize].min(v);
        }
        loop {
            let mut changed = false;
            for a in &self.actions {
                let mut pre = 0i64;
                for &p in &a.pre {
                    pre = pre.max(cost[p as usize]);
                    if pre == INF {
                        break;
                    }
                }
                if pre == INF {
                    continue;
                }
                let v = pre.saturating_add(a.weight.micros());
                for &q in &a.add {
                    if v < cost[q as usize] {
                        cost[q as usize] = v;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut h = 0i64;
        for &g in &self.goal {
            h = h.max(cost[g as usize]);
        }
        (h != INF).then(|| Fixed::from_micros(h))
    }
}
