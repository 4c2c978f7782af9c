use std::fmt;

use serde::{Deserialize, Serialize};

use super::types::{TypeHierarchy, TypeRef};
use crate::fixed::Fixed;

/// Requirement flags accepted by the parser.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Requirement {
    Strips,
    Typing,
    DurativeActions,
    Fluents,
    TimedInitialLiterals,
    ActionCosts,
}

impl Requirement {
    pub const ALL: [Requirement; 6] = [
        Requirement::Strips,
        Requirement::Typing,
        Requirement::DurativeActions,
        Requirement::Fluents,
        Requirement::TimedInitialLiterals,
        Requirement::ActionCosts,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            Requirement::Strips => ":strips",
            Requirement::Typing => ":typing",
            Requirement::DurativeActions => ":durative-actions",
            Requirement::Fluents => ":fluents",
            Requirement::TimedInitialLiterals => ":timed-initial-literals",
            Requirement::ActionCosts => ":action-costs",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.keyword().eq_ignore_ascii_case(s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Const(c) => f.write_str(c),
        }
    }
}

/// An atom over schema parameters, e.g. `(be ?robot ?loc1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AtomPattern {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl fmt::Display for AtomPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

/// A variable-free atom such as `(available glass_id05)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    pub fn new<P, I, S>(predicate: P, args: I) -> Self
    where
        P: Into<String>,
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        GroundAtom {
            predicate: predicate.into(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedParam {
    pub name: String,
    pub ty: TypeRef,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    pub params: Vec<TypedParam>,
}

/// Numeric function; only read at plan time (durations and costs).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionDecl {
    pub name: String,
    pub params: Vec<TypedParam>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NumericExpr {
    Constant(Fixed),
    Function { name: String, args: Vec<Term> },
}

impl fmt::Display for NumericExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumericExpr::Constant(v) => write!(f, "{v}"),
            NumericExpr::Function { name, args } => {
                write!(f, "({name}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimePoint {
    AtStart,
    AtEnd,
}

/// `(increase (total-cost) <amount>)` attached to the start or end of an action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostIncrease {
    pub when: TimePoint,
    pub amount: NumericExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DurativeActionSchema {
    pub name: String,
    pub params: Vec<TypedParam>,
    pub duration: NumericExpr,
    pub at_start: Vec<AtomPattern>,
    pub over_all: Vec<AtomPattern>,
    pub at_end: Vec<AtomPattern>,
    pub start_add: Vec<AtomPattern>,
    pub start_del: Vec<AtomPattern>,
    pub end_add: Vec<AtomPattern>,
    pub end_del: Vec<AtomPattern>,
    pub costs: Vec<CostIncrease>,
}

impl DurativeActionSchema {
    pub fn conditions(&self) -> impl Iterator<Item = &AtomPattern> {
        self.at_start.iter().chain(&self.over_all).chain(&self.at_end)
    }

    pub fn effects(&self) -> impl Iterator<Item = &AtomPattern> {
        self.start_add
            .iter()
            .chain(&self.start_del)
            .chain(&self.end_add)
            .chain(&self.end_del)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainModel {
    pub name: String,
    pub requirements: Vec<Requirement>,
    pub types: TypeHierarchy,
    pub predicates: Vec<PredicateDecl>,
    pub functions: Vec<FunctionDecl>,
    pub actions: Vec<DurativeActionSchema>,
}

impl DomainModel {
    pub fn predicate(&self, name: &str) -> Option<&PredicateDecl> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn function(&self, name: &str) -> Option<&FunctionDecl> {
        self.functions.iter().find(|p| p.name == name)
    }

    pub fn action(&self, name: &str) -> Option<&DurativeActionSchema> {
        self.actions.iter().find(|a| a.name == name)
    }

    /// Predicates that some action schema adds or deletes.
    pub fn fluent_predicates(&self) -> std::collections::BTreeSet<&str> {
        self.actions
            .iter()
            .flat_map(|a| a.effects())
            .map(|p| p.predicate.as_str())
            .collect()
    }
}

/// A variable-free numeric function term, e.g. `(moving_time bedroom1 corridor1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundFunction {
    pub name: String,
    pub args: Vec<String>,
}

impl fmt::Display for GroundFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.name)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

/// `(at <time> <literal>)` in the problem's init section.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedLiteral {
    pub time: Fixed,
    pub atom: GroundAtom,
    pub positive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricVar {
    TotalTime,
    TotalCost,
}

/// A minimised linear combination of `total-time` and `total-cost`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Metric {
    pub terms: Vec<(Fixed, MetricVar)>,
}

impl Metric {
    /// `minimize (+ (total-time) (total-cost))`.
    pub fn makespan_plus_cost() -> Self {
        Metric {
            terms: vec![(Fixed::ONE, MetricVar::TotalTime), (Fixed::ONE, MetricVar::TotalCost)],
        }
    }

    pub fn weight(&self, var: MetricVar) -> Fixed {
        self.terms.iter().filter(|(_, v)| *v == var).map(|(w, _)| *w).sum()
    }

    pub fn evaluate(&self, makespan: Fixed, cost: Fixed) -> Fixed {
        self.weight(MetricVar::TotalTime).mul(makespan) + self.weight(MetricVar::TotalCost).mul(cost)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemModel {
    pub name: String,
    pub domain: String,
    /// `(name, type)` in declaration order.
    pub objects: Vec<(String, String)>,
    pub init: Vec<GroundAtom>,
    pub functions: Vec<(GroundFunction, Fixed)>,
    /// Sorted by time (stable).
    pub tils: Vec<TimedLiteral>,
    pub goal: Vec<GroundAtom>,
    pub metric: Option<Metric>,
}

impl ProblemModel {
    pub fn object_type(&self, name: &str) -> Option<&str> {
        self.objects.iter().find(|(n, _)| n == name).map(|(_, t)| t.as_str())
    }

    pub fn function_value(&self, f: &GroundFunction) -> Option<Fixed> {
        self.functions.iter().find(|(g, _)| g == f).map(|(_, v)| *v)
    }

    pub fn metric_or_default(&self) -> Metric {
        self.metric.clone().unwrap_or_else(Metric::makespan_plus_cost)
    }

    /// Number of declared objects whose type fits `ty`.
    pub fn count_of_type(&self, ty: &str, h: &TypeHierarchy) -> usize {
        self.objects.iter().filter(|(_, t)| h.fits(t, ty)).count()
    }
}
