//! Canonical PDDL text output. `parse(serialize(x)) == x` for anything the
//! parser accepts.

use std::fmt::Write;

use super::model::*;
use super::types::TypeHierarchy;

fn params(out: &mut String, ps: &[TypedParam]) {
    for (i, p) in ps.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "?{} - {}", p.name, p.ty);
    }
}

fn types_section(out: &mut String, types: &TypeHierarchy) {
    if types.is_empty() {
        return;
    }
    out.push_str("  (:types\n");
    for ty in types.types() {
        let _ = writeln!(out, "    {ty} - {}", types.parent(ty).unwrap_or("object"));
    }
    out.push_str("  )\n");
}

fn conjunction(out: &mut String, items: &[String], indent: &str) {
    match items {
        [] => out.push_str("()"),
        [one] => out.push_str(one),
        many => {
            out.push_str("(and");
            for it in many {
                let _ = write!(out, "\n{indent}{it}");
            }
            out.push(')');
        }
    }
}

fn action(out: &mut String, a: &DurativeActionSchema) {
    let _ = writeln!(out, "  (:durative-action {}", a.name);
    out.push_str("    :parameters (");
    params(out, &a.params);
    out.push_str(")\n");
    let _ = writeln!(out, "    :duration (= ?duration {})", a.duration);

    let mut conds = Vec::new();
    conds.extend(a.at_start.iter().map(|c| format!("(at start {c})")));
    conds.extend(a.over_all.iter().map(|c| format!("(over all {c})")));
    conds.extend(a.at_end.iter().map(|c| format!("(at end {c})")));
    out.push_str("    :condition ");
    conjunction(out, &conds, "      ");
    out.push('\n');

    let mut effs = Vec::new();
    effs.extend(a.start_del.iter().map(|e| format!("(at start (not {e}))")));
    effs.extend(a.start_add.iter().map(|e| format!("(at start {e})")));
    effs.extend(a.end_del.iter().map(|e| format!("(at end (not {e}))")));
    effs.extend(a.end_add.iter().map(|e| format!("(at end {e})")));
    for c in &a.costs {
        let when = match c.when {
            TimePoint::AtStart => "start",
            TimePoint::AtEnd => "end",
        };
        effs.push(format!("(at {when} (increase (total-cost) {}))", c.amount));
    }
    out.push_str("    :effect ");
    conjunction(out, &effs, "      ");
    out.push_str("\n  )\n");
}

pub fn serialize_domain(d: &DomainModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (domain {})", d.name);
    if !d.requirements.is_empty() {
        let reqs: Vec<_> = d.requirements.iter().map(|r| r.keyword()).collect();
        let _ = writeln!(out, "  (:requirements {})", reqs.join(" "));
    }
    types_section(&mut out, &d.types);
    if !d.predicates.is_empty() {
        out.push_str("  (:predicates\n");
        for p in &d.predicates {
            let _ = write!(out, "    ({}", p.name);
            if !p.params.is_empty() {
                out.push(' ');
                params(&mut out, &p.params);
            }
            out.push_str(")\n");
        }
        out.push_str("  )\n");
    }
    if !d.functions.is_empty() {
        out.push_str("  (:functions\n");
        for f in &d.functions {
            let _ = write!(out, "    ({}", f.name);
            if !f.params.is_empty() {
                out.push(' ');
                params(&mut out, &f.params);
            }
            out.push_str(")\n");
        }
        out.push_str("  )\n");
    }
    for a in &d.actions {
        action(&mut out, a);
    }
    out.push_str(")\n");
    out
}

fn metric_text(m: &Metric) -> String {
    let parts: Vec<String> = m
        .terms
        .iter()
        .map(|(w, v)| {
            let var = match v {
                MetricVar::TotalTime => "(total-time)",
                MetricVar::TotalCost => "(total-cost)",
            };
            if *w == crate::fixed::Fixed::ONE {
                var.to_string()
            } else {
                format!("(* {w} {var})")
            }
        })
        .collect();
    match parts.as_slice() {
        [one] => one.clone(),
        _ => format!("(+ {})", parts.join(" ")),
    }
}

pub fn serialize_problem(p: &ProblemModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (problem {})", p.name);
    let _ = writeln!(out, "  (:domain {})", p.domain);
    out.push_str("  (:objects\n");
    for (o, t) in &p.objects {
        let _ = writeln!(out, "    {o} - {t}");
    }
    out.push_str("  )\n  (:init\n");
    for a in &p.init {
        let _ = writeln!(out, "    {a}");
    }
    for (f, v) in &p.functions {
        let _ = writeln!(out, "    (= {f} {v})");
    }
    for til in &p.tils {
        if til.positive {
            let _ = writeln!(out, "    (at {} {})", til.time, til.atom);
        } else {
            let _ = writeln!(out, "    (at {} (not {}))", til.time, til.atom);
        }
    }
    out.push_str("  )\n  (:goal ");
    let goal: Vec<String> = p.goal.iter().map(|g| g.to_string()).collect();
    conjunction(&mut out, &goal, "    ");
    out.push_str(")\n");
    if let Some(m) = &p.metric {
        let _ = writeln!(out, "  (:metric minimize {})", metric_text(m));
    }
    out.push_str(")\n");
    out
}
