//! Reader for the supported PDDL 2.2 subset.

use std::collections::{HashMap, HashSet};

use super::error::{PddlError, PddlErrorKind as K, Pos, Result};
use super::model::*;
use super::sexpr::{read_all, SExpr};
use super::types::{TypeError, TypeHierarchy, TypeRef, ROOT_TYPE};
use crate::fixed::Fixed;

fn err<T>(kind: K, pos: Pos) -> Result<T> {
    Err(PddlError::new(kind, pos))
}

fn syntax<T>(msg: impl Into<String>, pos: Pos) -> Result<T> {
    err(K::Syntax(msg.into()), pos)
}

fn atom_of(e: &SExpr, what: &str) -> Result<String> {
    match e.as_atom() {
        Some(a) => Ok(a.to_string()),
        None => syntax(format!("expected {what}"), e.pos()),
    }
}

fn list_of<'a>(e: &'a SExpr, what: &str) -> Result<&'a [SExpr]> {
    match e.as_list() {
        Some(items) => Ok(items),
        None => syntax(format!("expected {what}"), e.pos()),
    }
}

fn number(e: &SExpr) -> Result<Fixed> {
    let text = atom_of(e, "a number")?;
    text.parse().map_err(|_| PddlError::new(K::Number(text), e.pos()))
}

fn type_error(e: TypeError, pos: Pos) -> PddlError {
    let kind = match e {
        TypeError::Undeclared(t) => K::UnknownType(t),
        TypeError::Duplicate(t) => K::Duplicate(t),
        TypeError::ConflictingParent { ty, .. } => K::Duplicate(ty),
        TypeError::Cycle(t) => K::CyclicType(t),
    };
    PddlError::new(kind, pos)
}

/// Splits `(define (<kind> NAME) sections...)` into its name and sections.
fn define_block<'a>(text: &str, exprs: &'a [SExpr], kind: &str) -> Result<(String, &'a [SExpr])> {
    let top = match exprs {
        [one] => one,
        [] => return syntax("empty input", Pos { line: 1, col: 1 }),
        [_, second, ..] => return syntax("expected a single `define` block", second.pos()),
    };
    let _ = text;
    let items = list_of(top, "`(define ...)`")?;
    if !items.first().is_some_and(|h| h.is_keyword("define")) {
        return syntax("expected `define`", top.pos());
    }
    let header = items.get(1).ok_or_else(|| PddlError::new(K::Syntax(format!("missing `({kind} NAME)`")), top.pos()))?;
    let h = list_of(header, &format!("`({kind} NAME)`"))?;
    match h {
        [k, name] if k.is_keyword(kind) => Ok((atom_of(name, "a name")?, &items[2..])),
        _ => syntax(format!("expected `({kind} NAME)`"), header.pos()),
    }
}

/// Parses `a b - t c - (either x y) d` style lists. Untyped names default to `object`.
fn typed_list(items: &[SExpr], allow_either: bool) -> Result<Vec<(String, TypeRef, Pos)>> {
    let mut out = Vec::new();
    let mut pending: Vec<(String, Pos)> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let item = &items[i];
        if item.as_atom() == Some("-") {
            let ty_expr = items
                .get(i + 1)
                .ok_or_else(|| PddlError::new(K::Syntax("`-` must be followed by a type".into()), item.pos()))?;
            let ty = match ty_expr {
                SExpr::Atom(t, _) => TypeRef::Named(t.clone()),
                SExpr::List(members, pos) => {
                    if !allow_either || !ty_expr.head_is("either") {
                        return err(K::Unsupported("`either` is only allowed on parameters".into()), *pos);
                    }
                    let names = members[1..]
                        .iter()
                        .map(|m| atom_of(m, "a type name"))
                        .collect::<Result<Vec<_>>>()?;
                    if names.is_empty() {
                        return syntax("empty `either`", *pos);
                    }
                    TypeRef::Either(names)
                }
            };
            if pending.is_empty() {
                return syntax("type annotation without names", item.pos());
            }
            for (name, pos) in pending.drain(..) {
                out.push((name, ty.clone(), pos));
            }
            i += 2;
        } else {
            pending.push((atom_of(item, "a name")?, item.pos()));
            i += 1;
        }
    }
    for (name, pos) in pending {
        out.push((name, TypeRef::object(), pos));
    }
    Ok(out)
}

fn check_type_ref(ty: &TypeRef, types: &TypeHierarchy, pos: Pos) -> Result<()> {
    for m in ty.members() {
        if !types.contains(m) {
            return err(K::UnknownType(m.clone()), pos);
        }
    }
    Ok(())
}

fn typed_params(items: &[SExpr], types: &TypeHierarchy) -> Result<Vec<TypedParam>> {
    let mut seen = HashSet::new();
    typed_list(items, true)?
        .into_iter()
        .map(|(name, ty, pos)| {
            let Some(var) = name.strip_prefix('?') else {
                return syntax(format!("parameter `{name}` must start with `?`"), pos);
            };
            if !seen.insert(var.to_string()) {
                return err(K::Duplicate(name.clone()), pos);
            }
            check_type_ref(&ty, types, pos)?;
            Ok(TypedParam { name: var.to_string(), ty })
        })
        .collect()
}

fn requirements(items: &[SExpr]) -> Result<Vec<Requirement>> {
    items
        .iter()
        .map(|r| {
            let kw = atom_of(r, "a requirement flag")?;
            Requirement::from_keyword(&kw).ok_or_else(|| PddlError::new(K::UnsupportedRequirement(kw), r.pos()))
        })
        .collect()
}

/// Parses a domain definition.
pub fn parse_domain(text: &str) -> Result<DomainModel> {
    let exprs = read_all(text)?;
    let (name, sections) = define_block(text, &exprs, "domain")?;

    let mut by_kind: HashMap<String, &SExpr> = HashMap::new();
    let mut action_exprs = Vec::new();
    for section in sections {
        let head = section
            .head()
            .ok_or_else(|| PddlError::new(K::Syntax("expected a `(:section ...)`".into()), section.pos()))?
            .to_ascii_lowercase();
        match head.as_str() {
            ":requirements" | ":types" | ":predicates" | ":functions" => {
                if by_kind.insert(head.clone(), section).is_some() {
                    return err(K::Duplicate(head), section.pos());
                }
            }
            ":durative-action" => action_exprs.push(section),
            ":action" => return err(K::Unsupported("instantaneous `:action`".into()), section.pos()),
            ":constants" | ":derived" | ":constraints" => {
                return err(K::Unsupported(format!("`{head}` section")), section.pos())
            }
            other => return syntax(format!("unknown section `{other}`"), section.pos()),
        }
    }
    let rest = |k: &str| by_kind.get(k).map(|s| &s.as_list().unwrap()[1..]);

    let requirements = match rest(":requirements") {
        Some(items) => requirements(items)?,
        None => Vec::new(),
    };

    let types = match by_kind.get(":types") {
        Some(section) => {
            let entries = typed_list(&section.as_list().unwrap()[1..], false)?;
            let mut seen = HashSet::new();
            let mut pairs = Vec::new();
            for (ty, parent, pos) in &entries {
                if ty != ROOT_TYPE && !seen.insert(ty.clone()) {
                    return err(K::Duplicate(ty.clone()), *pos);
                }
                let TypeRef::Named(parent) = parent else { unreachable!() };
                pairs.push((ty.clone(), parent.clone()));
            }
            TypeHierarchy::from_pairs(pairs).map_err(|e| type_error(e, section.pos()))?
        }
        None => TypeHierarchy::new(),
    };

    let mut predicates: Vec<PredicateDecl> = Vec::new();
    for p in rest(":predicates").unwrap_or(&[]) {
        let items = list_of(p, "a predicate declaration")?;
        let name = atom_of(items.first().ok_or_else(|| PddlError::new(K::Syntax("empty predicate".into()), p.pos()))?, "a predicate name")?;
        if RESERVED.iter().any(|k| name.eq_ignore_ascii_case(k)) {
            return err(K::Unsupported(format!("predicate named `{name}`")), p.pos());
        }
        if predicates.iter().any(|q| q.name == name) {
            return err(K::Duplicate(name), p.pos());
        }
        let params = typed_params(&items[1..], &types)?;
        predicates.push(PredicateDecl { name, params });
    }

    let mut functions: Vec<FunctionDecl> = Vec::new();
    let fitems = rest(":functions").unwrap_or(&[]);
    let mut i = 0;
    while i < fitems.len() {
        let f = &fitems[i];
        if f.as_atom() == Some("-") {
            match fitems.get(i + 1) {
                Some(t) if t.is_keyword("number") => {
                    i += 2;
                    continue;
                }
                _ => return err(K::Unsupported("non-numeric function type".into()), f.pos()),
            }
        }
        let items = list_of(f, "a function declaration")?;
        let name = atom_of(items.first().ok_or_else(|| PddlError::new(K::Syntax("empty function".into()), f.pos()))?, "a function name")?;
        if functions.iter().any(|q| q.name == name) {
            return err(K::Duplicate(name), f.pos());
        }
        let params = typed_params(&items[1..], &types)?;
        functions.push(FunctionDecl { name, params });
        i += 1;
    }

    let mut dom = DomainModel {
        name,
        requirements,
        types,
        predicates,
        functions,
        actions: Vec::new(),
    };
    for a in action_exprs {
        let action = parse_action(a, &dom)?;
        if dom.action(&action.name).is_some() {
            return err(K::Duplicate(action.name), a.pos());
        }
        dom.actions.push(action);
    }
    Ok(dom)
}

struct Scope<'a> {
    dom: &'a DomainModel,
    params: &'a [TypedParam],
}

impl Scope<'_> {
    fn var_type(&self, name: &str, pos: Pos) -> Result<&TypeRef> {
        match self.params.iter().find(|p| p.name == name) {
            Some(p) => Ok(&p.ty),
            None => err(K::UndeclaredVariable(name.to_string()), pos),
        }
    }

    fn term(&self, e: &SExpr, expected: &TypeRef) -> Result<Term> {
        let text = atom_of(e, "a term")?;
        let Some(var) = text.strip_prefix('?') else {
            return err(K::Unsupported(format!("constant `{text}` in an action schema")), e.pos());
        };
        let ty = self.var_type(var, e.pos())?;
        if !ty.within(expected, &self.dom.types) {
            return err(
                K::TypeMismatch { arg: text.clone(), found: ty.to_string(), expected: expected.to_string() },
                e.pos(),
            );
        }
        Ok(Term::Var(var.to_string()))
    }

    fn atom(&self, e: &SExpr) -> Result<AtomPattern> {
        let items = list_of(e, "an atom")?;
        let name = atom_of(items.first().ok_or_else(|| PddlError::new(K::Syntax("empty atom".into()), e.pos()))?, "a predicate name")?;
        let Some(decl) = self.dom.predicate(&name) else {
            return err(K::UnknownPredicate(name), e.pos());
        };
        let args = &items[1..];
        if args.len() != decl.params.len() {
            return err(K::ArityMismatch { name, expected: decl.params.len(), found: args.len() }, e.pos());
        }
        let args = args
            .iter()
            .zip(&decl.params)
            .map(|(a, p)| self.term(a, &p.ty))
            .collect::<Result<Vec<_>>>()?;
        Ok(AtomPattern { predicate: name, args })
    }

    fn numeric(&self, e: &SExpr) -> Result<NumericExpr> {
        match e {
            SExpr::Atom(..) => Ok(NumericExpr::Constant(number(e)?)),
            SExpr::List(items, pos) => {
                let name = atom_of(items.first().ok_or_else(|| PddlError::new(K::Syntax("empty expression".into()), *pos))?, "a function name")?;
                let Some(decl) = self.dom.function(&name) else {
                    if ["+", "-", "*", "/"].contains(&name.as_str()) {
                        return err(K::Unsupported("arithmetic in numeric expressions".into()), *pos);
                    }
                    return err(K::UnknownFunction(name), *pos);
                };
                let args = &items[1..];
                if args.len() != decl.params.len() {
                    return err(K::ArityMismatch { name, expected: decl.params.len(), found: args.len() }, *pos);
                }
                let args = args
                    .iter()
                    .zip(&decl.params)
                    .map(|(a, p)| self.term(a, &p.ty))
                    .collect::<Result<Vec<_>>>()?;
                Ok(NumericExpr::Function { name, args })
            }
        }
    }
}

fn timing(e: &SExpr) -> Option<(&'static str, &SExpr)> {
    let items = e.as_list()?;
    match items {
        [at, start, body] if at.is_keyword("at") && start.is_keyword("start") => Some(("start", body)),
        [at, end, body] if at.is_keyword("at") && end.is_keyword("end") => Some(("end", body)),
        [over, all, body] if over.is_keyword("over") && all.is_keyword("all") => Some(("all", body)),
        _ => None,
    }
}

fn is_empty_list(e: &SExpr) -> bool {
    e.as_list().is_some_and(|l| l.is_empty())
}

/// Keywords that cannot name a predicate.
const RESERVED: [&str; 5] = ["not", "and", "or", "at", "="];

const UNSUPPORTED_HEADS: [&str; 10] = ["or", "imply", "forall", "exists", "when", "preference", ">", "<", ">=", "<="];

fn parse_condition(e: &SExpr, when: Option<&str>, scope: &Scope, a: &mut DurativeActionSchema) -> Result<()> {
    if is_empty_list(e) {
        return Ok(());
    }
    if e.head_is("and") {
        for c in &e.as_list().unwrap()[1..] {
            parse_condition(c, when, scope, a)?;
        }
        return Ok(());
    }
    if let Some((w, body)) = timing(e) {
        if when.is_some() {
            return syntax("nested temporal qualifier", e.pos());
        }
        return parse_condition(body, Some(w), scope, a);
    }
    if e.head_is("not") {
        return err(K::Unsupported("negative condition".into()), e.pos());
    }
    if let Some(h) = e.head() {
        if UNSUPPORTED_HEADS.iter().any(|u| h.eq_ignore_ascii_case(u)) || h == "=" {
            return err(K::Unsupported(format!("`{h}` in a condition")), e.pos());
        }
    }
    let Some(w) = when else {
        return syntax("durative conditions need `at start`, `over all` or `at end`", e.pos());
    };
    let atom = scope.atom(e)?;
    match w {
        "start" => a.at_start.push(atom),
        "all" => a.over_all.push(atom),
        _ => a.at_end.push(atom),
    }
    Ok(())
}

fn parse_effect(e: &SExpr, when: Option<TimePoint>, scope: &Scope, a: &mut DurativeActionSchema) -> Result<()> {
    if is_empty_list(e) {
        return Ok(());
    }
    if e.head_is("and") {
        for c in &e.as_list().unwrap()[1..] {
            parse_effect(c, when, scope, a)?;
        }
        return Ok(());
    }
    if let Some((w, body)) = timing(e) {
        if when.is_some() {
            return syntax("nested temporal qualifier", e.pos());
        }
        let tp = match w {
            "start" => TimePoint::AtStart,
            "end" => TimePoint::AtEnd,
            _ => return err(K::Unsupported("continuous (`over all`) effect".into()), e.pos()),
        };
        return parse_effect(body, Some(tp), scope, a);
    }
    let Some(w) = when else {
        return syntax("durative effects need `at start` or `at end`", e.pos());
    };
    if let Some(h) = e.head() {
        let lower = h.to_ascii_lowercase();
        if lower == "increase" {
            let items = e.as_list().unwrap();
            match items {
                [_, target, amount] if target.head_is("total-cost") && target.as_list().unwrap().len() == 1 => {
                    if scope.dom.function("total-cost").is_none() {
                        return err(K::UnknownFunction("total-cost".into()), target.pos());
                    }
                    let amount = scope.numeric(amount)?;
                    a.costs.push(CostIncrease { when: w, amount });
                    return Ok(());
                }
                _ => return err(K::Unsupported("numeric effect other than `(increase (total-cost) ...)`".into()), e.pos()),
            }
        }
        if ["decrease", "assign", "scale-up", "scale-down"].contains(&lower.as_str()) {
            return err(K::Unsupported(format!("numeric effect `{h}`")), e.pos());
        }
        if UNSUPPORTED_HEADS.iter().any(|u| lower == *u) {
            return err(K::Unsupported(format!("`{h}` in an effect")), e.pos());
        }
    }
    let (negative, body) = if e.head_is("not") {
        match e.as_list().unwrap() {
            [_, body] => (true, body),
            _ => return syntax("`not` takes one argument", e.pos()),
        }
    } else {
        (false, e)
    };
    let atom = scope.atom(body)?;
    match (w, negative) {
        (TimePoint::AtStart, false) => a.start_add.push(atom),
        (TimePoint::AtStart, true) => a.start_del.push(atom),
        (TimePoint::AtEnd, false) => a.end_add.push(atom),
        (TimePoint::AtEnd, true) => a.end_del.push(atom),
    }
    Ok(())
}

fn parse_action(e: &SExpr, dom: &DomainModel) -> Result<DurativeActionSchema> {
    let items = e.as_list().unwrap();
    let name = atom_of(items.get(1).ok_or_else(|| PddlError::new(K::Syntax("missing action name".into()), e.pos()))?, "an action name")?;
    let mut fields: HashMap<String, &SExpr> = HashMap::new();
    let mut i = 2;
    while i < items.len() {
        let key = atom_of(&items[i], "an action keyword")?.to_ascii_lowercase();
        if ![":parameters", ":duration", ":condition", ":effect"].contains(&key.as_str()) {
            return syntax(format!("unknown action keyword `{key}`"), items[i].pos());
        }
        let value = items
            .get(i + 1)
            .ok_or_else(|| PddlError::new(K::Syntax(format!("`{key}` needs a value")), items[i].pos()))?;
        if fields.insert(key.clone(), value).is_some() {
            return err(K::Duplicate(key), items[i].pos());
        }
        i += 2;
    }
    let params = match fields.get(":parameters") {
        Some(p) => typed_params(list_of(p, "a parameter list")?, &dom.types)?,
        None => Vec::new(),
    };
    let scope = Scope { dom, params: &params };
    let Some(dur) = fields.get(":duration") else {
        return syntax(format!("action `{name}` has no `:duration`"), e.pos());
    };
    let duration = match list_of(dur, "`(= ?duration ...)`")? {
        [eq, var, value] if eq.as_atom() == Some("=") && var.is_keyword("?duration") => scope.numeric(value)?,
        _ => return err(K::Unsupported("duration constraint other than `(= ?duration ...)`".into()), dur.pos()),
    };
    let mut action = DurativeActionSchema {
        name,
        params: params.clone(),
        duration,
        at_start: Vec::new(),
        over_all: Vec::new(),
        at_end: Vec::new(),
        start_add: Vec::new(),
        start_del: Vec::new(),
        end_add: Vec::new(),
        end_del: Vec::new(),
        costs: Vec::new(),
    };
    if let Some(c) = fields.get(":condition") {
        parse_condition(c, None, &scope, &mut action)?;
    }
    if let Some(eff) = fields.get(":effect") {
        parse_effect(eff, None, &scope, &mut action)?;
    }
    Ok(action)
}

struct ProblemScope<'a> {
    dom: &'a DomainModel,
    objects: HashMap<String, String>,
}

impl ProblemScope<'_> {
    fn object_arg(&self, e: &SExpr, expected: &TypeRef) -> Result<String> {
        let name = atom_of(e, "an object name")?;
        let Some(ty) = self.objects.get(&name) else {
            return err(K::UnknownObject(name), e.pos());
        };
        if !expected.admits(ty, &self.dom.types) {
            return err(K::TypeMismatch { arg: name, found: ty.clone(), expected: expected.to_string() }, e.pos());
        }
        Ok(name)
    }

    fn ground_atom(&self, e: &SExpr) -> Result<GroundAtom> {
        let items = list_of(e, "a ground atom")?;
        let name = atom_of(items.first().ok_or_else(|| PddlError::new(K::Syntax("empty atom".into()), e.pos()))?, "a predicate name")?;
        if RESERVED.iter().any(|k| name.eq_ignore_ascii_case(k)) {
            return err(K::Unsupported(format!("`{name}` here")), e.pos());
        }
        let Some(decl) = self.dom.predicate(&name) else {
            return err(K::UnknownPredicate(name), e.pos());
        };
        let args = &items[1..];
        if args.len() != decl.params.len() {
            return err(K::ArityMismatch { name, expected: decl.params.len(), found: args.len() }, e.pos());
        }
        let args = args
            .iter()
            .zip(&decl.params)
            .map(|(a, p)| self.object_arg(a, &p.ty))
            .collect::<Result<Vec<_>>>()?;
        Ok(GroundAtom { predicate: name, args })
    }

    fn ground_function(&self, e: &SExpr) -> Result<GroundFunction> {
        let items = list_of(e, "a function term")?;
        let name = atom_of(items.first().ok_or_else(|| PddlError::new(K::Syntax("empty function term".into()), e.pos()))?, "a function name")?;
        let Some(decl) = self.dom.function(&name) else {
            return err(K::UnknownFunction(name), e.pos());
        };
        let args = &items[1..];
        if args.len() != decl.params.len() {
            return err(K::ArityMismatch { name, expected: decl.params.len(), found: args.len() }, e.pos());
        }
        let args = args
            .iter()
            .zip(&decl.params)
            .map(|(a, p)| self.object_arg(a, &p.ty))
            .collect::<Result<Vec<_>>>()?;
        Ok(GroundFunction { name, args })
    }
}

fn metric_expr(e: &SExpr, coeff: Fixed, out: &mut Vec<(Fixed, MetricVar)>) -> Result<()> {
    let items = list_of(e, "a metric expression")?;
    let head = items
        .first()
        .and_then(SExpr::as_atom)
        .ok_or_else(|| PddlError::new(K::Syntax("empty metric expression".into()), e.pos()))?
        .to_ascii_lowercase();
    match (head.as_str(), items.len()) {
        ("total-time", 1) => out.push((coeff, MetricVar::TotalTime)),
        ("total-cost", 1) => out.push((coeff, MetricVar::TotalCost)),
        ("+", n) if n >= 2 => {
            for sub in &items[1..] {
                metric_expr(sub, coeff, out)?;
            }
        }
        ("*", 3) => {
            let (k, sub) = if items[1].as_atom().is_some() { (&items[1], &items[2]) } else { (&items[2], &items[1]) };
            let k = number(k)?;
            if k.is_negative() {
                return err(K::Unsupported("negative metric coefficient".into()), e.pos());
            }
            metric_expr(sub, coeff.mul(k), out)?;
        }
        _ => return err(K::Unsupported("metric must combine `total-time` and `total-cost`".into()), e.pos()),
    }
    Ok(())
}

/// Parses a problem definition against an already parsed domain.
pub fn parse_problem(text: &str, dom: &DomainModel) -> Result<ProblemModel> {
    let exprs = read_all(text)?;
    let (name, sections) = define_block(text, &exprs, "problem")?;
    let mut domain_name = None;
    let mut objects: Vec<(String, String)> = Vec::new();
    let mut init_expr = None;
    let mut goal_expr = None;
    let mut metric_section = None;

    let mut seen_sections = HashSet::new();
    for section in sections {
        let items = list_of(section, "a `(:section ...)`")?;
        let head = section
            .head()
            .ok_or_else(|| PddlError::new(K::Syntax("expected a section keyword".into()), section.pos()))?
            .to_ascii_lowercase();
        if !seen_sections.insert(head.clone()) {
            return err(K::Duplicate(head), section.pos());
        }
        match head.as_str() {
            ":domain" => match items {
                [_, d] => domain_name = Some((atom_of(d, "a domain name")?, d.pos())),
                _ => return syntax("expected `(:domain NAME)`", section.pos()),
            },
            ":requirements" => {
                requirements(&items[1..])?;
            }
            ":objects" => {
                for (obj, ty, pos) in typed_list(&items[1..], false)? {
                    let TypeRef::Named(ty) = ty else { unreachable!() };
                    if !dom.types.contains(&ty) {
                        return err(K::UnknownType(ty), pos);
                    }
                    if objects.iter().any(|(o, _)| *o == obj) {
                        return err(K::Duplicate(obj), pos);
                    }
                    objects.push((obj, ty));
                }
            }
            ":init" => init_expr = Some(&items[1..]),
            ":goal" => match items {
                [_, g] => goal_expr = Some(g),
                _ => return syntax("expected `(:goal CONDITION)`", section.pos()),
            },
            ":metric" => metric_section = Some(section),
            ":constraints" | ":length" => return err(K::Unsupported(format!("`{head}` section")), section.pos()),
            other => return syntax(format!("unknown section `{other}`"), section.pos()),
        }
    }
    let Some((domain_name, dpos)) = domain_name else {
        return syntax("missing `(:domain NAME)`", exprs[0].pos());
    };
    if !domain_name.eq_ignore_ascii_case(&dom.name) {
        return err(K::DomainMismatch { expected: dom.name.clone(), found: domain_name }, dpos);
    }

    let scope = ProblemScope {
        dom,
        objects: objects.iter().cloned().collect(),
    };

    let mut init = Vec::new();
    let mut functions: Vec<(GroundFunction, Fixed)> = Vec::new();
    let mut tils = Vec::new();
    for item in init_expr.unwrap_or(&[]) {
        let items = list_of(item, "an initial fact")?;
        if item.head() == Some("=") {
            let [_, f, v] = items else {
                return syntax("expected `(= (f ...) value)`", item.pos());
            };
            let f = scope.ground_function(f)?;
            let v = number(v)?;
            if v.is_negative() {
                return err(K::Number(v.to_string()), item.pos());
            }
            if functions.iter().any(|(g, _)| *g == f) {
                return err(K::Duplicate(f.to_string()), item.pos());
            }
            functions.push((f, v));
        } else if item.head_is("at") && items.len() == 3 && items[1].as_atom().is_some() {
            let time = number(&items[1])?;
            if time.is_negative() {
                return err(K::NegativeTime(time.to_string()), item.pos());
            }
            let (positive, body) = if items[2].head_is("not") {
                match items[2].as_list().unwrap() {
                    [_, body] => (false, body),
                    _ => return syntax("`not` takes one argument", items[2].pos()),
                }
            } else {
                (true, &items[2])
            };
            tils.push(TimedLiteral { time, atom: scope.ground_atom(body)?, positive });
        } else {
            init.push(scope.ground_atom(item)?);
        }
    }
    tils.sort_by_key(|t| t.time);

    let mut goal = Vec::new();
    if let Some(g) = goal_expr {
        let parts: Vec<&SExpr> = if g.head_is("and") { g.as_list().unwrap()[1..].iter().collect() } else if is_empty_list(g) { Vec::new() } else { vec![g] };
        for p in parts {
            if p.head_is("not") {
                return err(K::Unsupported("negative goal".into()), p.pos());
            }
            goal.push(scope.ground_atom(p)?);
        }
    }

    let metric = match metric_section {
        None => None,
        Some(section) => {
            let items = section.as_list().unwrap();
            match items {
                [_, dir, e] if dir.is_keyword("minimize") => {
                    let mut terms = Vec::new();
                    metric_expr(e, Fixed::ONE, &mut terms)?;
                    Some(Metric { terms })
                }
                [_, dir, _] if dir.is_keyword("maximize") => {
                    return err(K::Unsupported("`maximize` metric".into()), dir.pos())
                }
                _ => return syntax("expected `(:metric minimize EXPR)`", section.pos()),
            }
        }
    };

    Ok(ProblemModel {
        name,
        domain: domain_name,
        objects,
        init,
        functions,
        tils,
        goal,
        metric,
    })
}
